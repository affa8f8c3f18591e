//! Keccak-256 digests and the domain-separated hash maps into the group.

use std::fmt;

use k256::elliptic_curve::ops::Reduce;
use k256::elliptic_curve::bigint::U512;
use serde::{Deserialize, Serialize};
use sha3::{Digest as _, Keccak256};

use crate::group::{GroupElement, Scalar};
use crate::CryptoError;

/// Tag for the try-and-increment map into the group.
pub const HASH_TO_POINT_TAG: &[u8] = b"ZKBID/H2P/v1";

/// Largest counter value tried by [`hash_to_point`] before giving up.
pub const HASH_TO_POINT_MAX_COUNTER: u32 = 1 << 16;

/// A 32-byte Keccak-256 output.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Digest32(#[serde(with = "crate::hexfmt::array")] pub [u8; 32]);

impl Digest32 {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
        crate::hexfmt::decode_array(s).map(Digest32)
    }
}

impl fmt::Debug for Digest32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest32({})", self.to_hex())
    }
}

impl fmt::Display for Digest32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Keccak-256 of `data`.
pub fn digest(data: &[u8]) -> Digest32 {
    Digest32(Keccak256::digest(data).into())
}

/// Keccak-256 over several parts, equivalent to hashing their concatenation.
pub fn digest_parts(parts: &[&[u8]]) -> Digest32 {
    let mut h = Keccak256::new();
    for p in parts {
        h.update(p);
    }
    Digest32(h.finalize().into())
}

fn tagged_hasher(tag: &[u8]) -> Keccak256 {
    let mut h = Keccak256::new();
    h.update((tag.len() as u32).to_be_bytes());
    h.update(tag);
    h
}

/// Maps `(tag, data)` to a scalar.
///
/// Two Keccak-256 calls over `len(tag) || tag || i || data` for `i = 0, 1`
/// give 512 bits, which are reduced mod `q`. The tag must be non-empty.
pub fn hash_to_scalar(tag: &[u8], data: &[u8]) -> Scalar {
    hash_to_scalar_parts(tag, &[data])
}

/// [`hash_to_scalar`] over the concatenation of `parts`.
pub fn hash_to_scalar_parts(tag: &[u8], parts: &[&[u8]]) -> Scalar {
    assert!(!tag.is_empty(), "hash_to_scalar requires a non-empty domain tag");
    let base = tagged_hasher(tag);
    let mut wide = [0u8; 64];
    for (i, chunk) in wide.chunks_exact_mut(32).enumerate() {
        let mut h = base.clone();
        h.update([i as u8]);
        for p in parts {
            h.update(p);
        }
        chunk.copy_from_slice(&h.finalize());
    }
    Scalar(<k256::Scalar as Reduce<U512>>::reduce(U512::from_be_slice(&wide)))
}

/// Deterministic map from bytes to a non-identity group element.
///
/// Try-and-increment: `x = keccak(len(tag) || tag || data || ctr)` is lifted to
/// the even-`y` point with that x-coordinate; on failure `ctr` is bumped.
pub fn hash_to_point(data: &[u8]) -> Result<GroupElement, CryptoError> {
    let base = {
        let mut h = tagged_hasher(HASH_TO_POINT_TAG);
        h.update(data);
        h
    };
    let mut candidate = [0u8; 33];
    candidate[0] = 0x02;
    for ctr in 0..HASH_TO_POINT_MAX_COUNTER {
        let mut h = base.clone();
        h.update(ctr.to_be_bytes());
        candidate[1..].copy_from_slice(&h.finalize());
        if let Ok(p) = GroupElement::from_bytes(&candidate) {
            debug_assert!(!p.is_identity());
            return Ok(p);
        }
    }
    Err(CryptoError::AbortedHashToPoint)
}
