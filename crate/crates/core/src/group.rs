//! Scalars and points of the account / ring-signature group (secp256k1).
//!
//! Points always serialize to the 33-byte SEC1 compressed form. The identity
//! has no SEC1 compressed form, so it is written as 33 zero bytes.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use k256::elliptic_curve::group::GroupEncoding;
use k256::elliptic_curve::ops::{MulByGenerator, Reduce};
use k256::elliptic_curve::{Field, PrimeField};
use k256::{AffinePoint, ProjectivePoint, U256};
use rand::{CryptoRng, RngCore};

use crate::CryptoError;

pub const SCALAR_LEN: usize = 32;
pub const POINT_LEN: usize = 33;

/// Group order of secp256k1, big-endian.
pub const GROUP_ORDER_BE: [u8; 32] = [
    0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xfe,
    0xba, 0xae, 0xdc, 0xe6, 0xaf, 0x48, 0xa0, 0x3b, 0xbf, 0xd2, 0x5e, 0x8c, 0xd0, 0x36, 0x41, 0x41,
];

/// An integer modulo the group order `q`.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct Scalar(pub(crate) k256::Scalar);

impl Scalar {
    pub const ZERO: Scalar = Scalar(k256::Scalar::ZERO);
    pub const ONE: Scalar = Scalar(k256::Scalar::ONE);

    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        Scalar(k256::Scalar::random(rng))
    }

    /// Uniform in `[1, q)`: draws 32 big-endian bytes and rejects values
    /// that are zero or not below `q`.
    pub fn random_nonzero<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let mut buf = [0u8; 32];
            rng.fill_bytes(&mut buf);
            if let Ok(s) = Scalar::from_bytes(&buf) {
                if !s.is_zero() {
                    return s;
                }
            }
        }
    }

    pub fn from_u64(v: u64) -> Self {
        Scalar(k256::Scalar::from(v))
    }

    /// Canonical 32-byte big-endian decoding; rejects values `>= q`.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let arr: [u8; SCALAR_LEN] = bytes.try_into().map_err(|_| CryptoError::InvalidLength {
            expected: SCALAR_LEN,
            actual: bytes.len(),
        })?;
        Option::from(k256::Scalar::from_repr(arr.into()))
            .map(Scalar)
            .ok_or(CryptoError::NonCanonicalScalar)
    }

    /// Interprets 32 big-endian bytes as an integer and reduces it mod `q`.
    pub fn from_bytes_reduced(bytes: &[u8; 32]) -> Self {
        Scalar(<k256::Scalar as Reduce<U256>>::reduce_bytes(&(*bytes).into()))
    }

    pub fn to_bytes(&self) -> [u8; SCALAR_LEN] {
        self.0.to_bytes().into()
    }

    pub fn is_zero(&self) -> bool {
        bool::from(self.0.is_zero())
    }

    pub fn invert(&self) -> Option<Scalar> {
        Option::from(self.0.invert()).map(Scalar)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", hex::encode(self.to_bytes()))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

/// A point of the prime-order group.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct GroupElement(pub(crate) ProjectivePoint);

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement(ProjectivePoint::IDENTITY)
    }

    pub fn generator() -> Self {
        GroupElement(ProjectivePoint::GENERATOR)
    }

    /// `k·g` for the fixed generator `g`.
    pub fn mul_base(k: &Scalar) -> Self {
        GroupElement(ProjectivePoint::mul_by_generator(&k.0))
    }

    /// `a·g + b·P`.
    pub fn lincomb_base(a: &Scalar, b: &Scalar, p: &GroupElement) -> Self {
        GroupElement(ProjectivePoint::mul_by_generator(&a.0) + p.0 * b.0)
    }

    pub fn is_identity(&self) -> bool {
        self.0 == ProjectivePoint::IDENTITY
    }

    pub fn to_bytes(&self) -> [u8; POINT_LEN] {
        if self.is_identity() {
            return [0u8; POINT_LEN];
        }
        let enc = self.0.to_affine().to_bytes();
        let mut out = [0u8; POINT_LEN];
        out.copy_from_slice(&enc);
        out
    }

    /// Decodes the canonical 33-byte form. Accepts the all-zero identity encoding.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let arr: [u8; POINT_LEN] = bytes.try_into().map_err(|_| CryptoError::InvalidLength {
            expected: POINT_LEN,
            actual: bytes.len(),
        })?;
        if arr == [0u8; POINT_LEN] {
            return Ok(Self::identity());
        }
        if arr[0] != 0x02 && arr[0] != 0x03 {
            return Err(CryptoError::InvalidPoint);
        }
        let affine: Option<AffinePoint> = AffinePoint::from_bytes(&arr.into()).into();
        affine
            .map(|a| GroupElement(ProjectivePoint::from(a)))
            .ok_or(CryptoError::InvalidPoint)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({})", hex::encode(self.to_bytes()))
    }
}

impl Hash for GroupElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.to_bytes().hash(state)
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_bytes().cmp(&other.to_bytes())
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: GroupElement) -> GroupElement {
        GroupElement(self.0 + rhs.0)
    }
}

impl Sub for GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: GroupElement) -> GroupElement {
        GroupElement(self.0 - rhs.0)
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement(-self.0)
    }
}

impl Mul<Scalar> for GroupElement {
    type Output = GroupElement;
    fn mul(self, k: Scalar) -> GroupElement {
        GroupElement(self.0 * k.0)
    }
}

impl Mul<GroupElement> for Scalar {
    type Output = GroupElement;
    fn mul(self, p: GroupElement) -> GroupElement {
        GroupElement(p.0 * self.0)
    }
}
