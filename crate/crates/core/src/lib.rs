//! Cryptographic and arithmetic building blocks for the ZKBID identity pipeline.
//!
//! * [`group`] and [`hash`]: secp256k1 scalars/points, Keccak-256 digests and the
//!   domain-separated hash-to-scalar / hash-to-point maps.
//! * [`account`]: `(addr, pk, sk)` accounts and Schnorr-style signatures.
//! * [`lrs`]: linkable ring signatures with ring-independent key images.
//! * [`face`] and [`dataset`]: fixed-point feature vectors, the similarity
//!   predicate, and the synthetic accuracy sweep.

pub mod account;
pub mod dataset;
pub mod face;
pub mod group;
pub mod hash;
pub mod hexfmt;
pub mod lrs;

pub use account::{derive_address, Account, AccountSignature, Address};
pub use face::{FeatureVector, ThresholdConfig};
pub use group::{GroupElement, Scalar};
pub use hash::{digest, hash_to_point, hash_to_scalar, Digest32};
pub use lrs::{LinkableRingSig, Ring};

/// Errors from decoding or constructing cryptographic values.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CryptoError {
    #[error("invalid length: expected {expected} bytes, got {actual}")]
    InvalidLength { expected: usize, actual: usize },
    #[error("scalar encoding is not reduced modulo the group order")]
    NonCanonicalScalar,
    #[error("bytes do not encode a group element")]
    InvalidPoint,
    #[error("invalid hex: {0}")]
    InvalidHex(String),
    #[error("hash-to-point exhausted its counter without finding a point")]
    AbortedHashToPoint,
}
