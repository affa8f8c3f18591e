#!/usr/bin/env python3
"""Reference vectors for the account/ring group (secp256k1) and hashing.

Pure-Python big-integer implementation, independent of the Rust code.
Prints the values frozen into crates/core unit tests.
"""
from Crypto.Hash import keccak

P = 2**256 - 2**32 - 977
Q = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8


def k256(b: bytes) -> bytes:
    h = keccak.new(digest_bits=256)
    h.update(b)
    return h.digest()


def add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    (x1, y1), (x2, y2) = p1, p2
    if x1 == x2 and (y1 + y2) % P == 0:
        return None
    if p1 == p2:
        lam = 3 * x1 * x1 * pow(2 * y1, -1, P) % P
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, P) % P
    x3 = (lam * lam - x1 - x2) % P
    return (x3, (lam * (x1 - x3) - y1) % P)


def mul(k, pt):
    acc = None
    while k:
        if k & 1:
            acc = add(acc, pt)
        pt = add(pt, pt)
        k >>= 1
    return acc


def encode(pt) -> bytes:
    if pt is None:
        return bytes(33)
    x, y = pt
    return bytes([2 + (y & 1)]) + x.to_bytes(32, "big")


def decode_even(xb: bytes):
    x = int.from_bytes(xb, "big")
    if x >= P:
        return None
    rhs = (x**3 + 7) % P
    y = pow(rhs, (P + 1) // 4, P)
    if y * y % P != rhs:
        return None
    if y & 1:
        y = P - y
    return (x, y)


def tag_prefix(tag: bytes) -> bytes:
    return len(tag).to_bytes(4, "big") + tag


def hash_to_scalar(tag: bytes, data: bytes) -> int:
    pre = tag_prefix(tag)
    wide = k256(pre + b"\x00" + data) + k256(pre + b"\x01" + data)
    return int.from_bytes(wide, "big") % Q


def hash_to_point(data: bytes):
    pre = tag_prefix(b"ZKBID/H2P/v1")
    for ctr in range(1 << 16):
        pt = decode_even(k256(pre + data + ctr.to_bytes(4, "big")))
        if pt is not None:
            return pt, ctr
    raise RuntimeError("aborted")


G = (GX, GY)
print("keccak(empty)      ", k256(b"").hex())
print("keccak('abc')      ", k256(b"abc").hex())
s = hash_to_scalar(b"ZKBID/FS/v1", b"zkbid golden vector")
print("h2s FS golden      ", s.to_bytes(32, "big").hex())
sk = int.from_bytes(k256(b"zkbid golden account"), "big") % Q
pk = mul(sk, G)
print("golden sk          ", sk.to_bytes(32, "big").hex())
print("golden pk          ", encode(pk).hex())
print("golden addr        ", k256(encode(pk))[12:].hex())
hp, ctr = hash_to_point(encode(pk))
print("H_p(golden pk)     ", encode(hp).hex(), "counter", ctr)
print("key image          ", encode(mul(sk, hp)).hex())
print("addr(G)            ", k256(encode(G))[12:].hex())
