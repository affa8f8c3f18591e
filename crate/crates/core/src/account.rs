//! Blockchain accounts `(addr, pk, sk)` and Schnorr-style account signatures.

use std::fmt;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::group::{GroupElement, Scalar};
use crate::hash::{digest, hash_to_scalar_parts};
use crate::CryptoError;

/// Domain tag for account signature challenges.
pub const SIGNATURE_TAG: &[u8] = b"ZKBID/SIG/v1";

pub const ADDRESS_LEN: usize = 20;

/// Last 20 bytes of the Keccak-256 digest of a compressed public key.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Address(#[serde(with = "crate::hexfmt::array")] pub [u8; ADDRESS_LEN]);

impl Address {
    pub fn as_bytes(&self) -> &[u8; ADDRESS_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
        crate::hexfmt::decode_array(s).map(Address)
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address({})", self.to_hex())
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

pub fn derive_address(pk: &GroupElement) -> Address {
    let d = digest(&pk.to_bytes());
    let mut addr = [0u8; ADDRESS_LEN];
    addr.copy_from_slice(&d.0[32 - ADDRESS_LEN..]);
    Address(addr)
}

/// A key pair together with its derived address.
///
/// Serializes as `{"sk": hex, "pk": hex, "addr": hex}`; deserialization
/// re-checks `pk = sk·g` and the address derivation.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AccountFile")]
pub struct Account {
    sk: Scalar,
    pk: GroupElement,
    addr: Address,
}

#[derive(Deserialize)]
struct AccountFile {
    sk: Scalar,
    pk: GroupElement,
    addr: Address,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AccountError {
    #[error("secret key must be non-zero")]
    ZeroSecret,
    #[error("public key does not match secret key")]
    KeyMismatch,
    #[error("address does not match public key")]
    AddressMismatch,
}

impl TryFrom<AccountFile> for Account {
    type Error = AccountError;

    fn try_from(f: AccountFile) -> Result<Self, AccountError> {
        let acct = Account::from_secret(f.sk)?;
        if acct.pk != f.pk {
            return Err(AccountError::KeyMismatch);
        }
        if acct.addr != f.addr {
            return Err(AccountError::AddressMismatch);
        }
        Ok(acct)
    }
}

impl Account {
    /// Samples `sk` uniformly from `[1, q)` and derives `pk` and `addr`.
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let sk = Scalar::random_nonzero(rng);
        Self::from_secret(sk).expect("non-zero secret")
    }

    pub fn from_secret(sk: Scalar) -> Result<Self, AccountError> {
        if sk.is_zero() {
            return Err(AccountError::ZeroSecret);
        }
        let pk = GroupElement::mul_base(&sk);
        Ok(Account {
            sk,
            pk,
            addr: derive_address(&pk),
        })
    }

    pub fn secret_key(&self) -> &Scalar {
        &self.sk
    }

    pub fn public_key(&self) -> &GroupElement {
        &self.pk
    }

    pub fn address(&self) -> Address {
        self.addr
    }

    pub fn sign<R: RngCore + CryptoRng>(&self, message: &[u8], rng: &mut R) -> AccountSignature {
        account_sign(&self.sk, message, rng)
    }
}

impl fmt::Debug for Account {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Account")
            .field("addr", &self.addr)
            .field("pk", &self.pk)
            .finish_non_exhaustive()
    }
}

/// `(challenge, response)` pair; 64 bytes on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountSignature {
    pub challenge: Scalar,
    pub response: Scalar,
}

impl AccountSignature {
    pub const LEN: usize = 64;

    pub fn to_bytes(&self) -> [u8; Self::LEN] {
        let mut out = [0u8; Self::LEN];
        out[..32].copy_from_slice(&self.challenge.to_bytes());
        out[32..].copy_from_slice(&self.response.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() != Self::LEN {
            return Err(CryptoError::InvalidLength {
                expected: Self::LEN,
                actual: bytes.len(),
            });
        }
        Ok(AccountSignature {
            challenge: Scalar::from_bytes(&bytes[..32])?,
            response: Scalar::from_bytes(&bytes[32..])?,
        })
    }
}

fn challenge(commitment: &GroupElement, pk: &GroupElement, message: &[u8]) -> Scalar {
    hash_to_scalar_parts(SIGNATURE_TAG, &[&commitment.to_bytes(), &pk.to_bytes(), message])
}

/// Schnorr signature: `R = r·g`, `c = H(R || pk || m)`, `s = r - c·sk`.
pub fn account_sign<R: RngCore + CryptoRng>(sk: &Scalar, message: &[u8], rng: &mut R) -> AccountSignature {
    let pk = GroupElement::mul_base(sk);
    let r = Scalar::random_nonzero(rng);
    let commitment = GroupElement::mul_base(&r);
    let c = challenge(&commitment, &pk, message);
    AccountSignature {
        challenge: c,
        response: r - c * *sk,
    }
}

/// Recomputes `R' = s·g + c·pk` and checks the challenge.
pub fn account_verify(pk: &GroupElement, message: &[u8], sig: &AccountSignature) -> bool {
    if pk.is_identity() {
        return false;
    }
    let commitment = GroupElement::lincomb_base(&sig.response, &sig.challenge, pk);
    challenge(&commitment, pk, message) == sig.challenge
}

/// [`account_verify`] over raw encodings; malformed input is a rejection.
pub fn account_verify_bytes(pk: &[u8], message: &[u8], sig: &[u8]) -> bool {
    match (GroupElement::from_bytes(pk), AccountSignature::from_bytes(sig)) {
        (Ok(pk), Ok(sig)) => account_verify(&pk, message, &sig),
        _ => false,
    }
}
