//! Linkable ring signatures (LSAG) with ring-independent key images.
//!
//! A signature is `(I, c_1, s_1..s_n)` where `I = sk·H_p(pk)` is the key
//! image. Two signatures made with the same key carry the same image no matter
//! which rings or messages were used, which is what [`link`] compares.

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::group::{GroupElement, Scalar, POINT_LEN};
use crate::hash::{hash_to_point, hash_to_scalar_parts};
use crate::CryptoError;

/// Domain tag for the challenge chain.
pub const RING_TAG: &[u8] = b"ZKBID/LRS/v1";

pub const DEFAULT_RING_SIZE: usize = 11;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LrsError {
    #[error("public key does not match secret key")]
    KeyMismatch,
    #[error("signer is not the ring member at index {0}")]
    SignerNotInRing(usize),
    #[error("ring must contain at least one member")]
    EmptyRing,
    #[error("ring member {0} appears more than once")]
    DuplicateMember(usize),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
}

/// Ordered, duplicate-free list of public keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<GroupElement>", into = "Vec<GroupElement>")]
pub struct Ring {
    members: Vec<GroupElement>,
}

impl TryFrom<Vec<GroupElement>> for Ring {
    type Error = LrsError;
    fn try_from(v: Vec<GroupElement>) -> Result<Self, LrsError> {
        Ring::new(v)
    }
}

impl From<Ring> for Vec<GroupElement> {
    fn from(r: Ring) -> Self {
        r.members
    }
}

impl Ring {
    pub fn new(members: Vec<GroupElement>) -> Result<Self, LrsError> {
        if members.is_empty() {
            return Err(LrsError::EmptyRing);
        }
        let mut seen = std::collections::HashSet::with_capacity(members.len());
        for (i, m) in members.iter().enumerate() {
            if !seen.insert(m.to_bytes()) {
                return Err(LrsError::DuplicateMember(i));
            }
        }
        Ok(Ring { members })
    }

    pub fn members(&self) -> &[GroupElement] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, pk: &GroupElement) -> Option<usize> {
        self.members.iter().position(|m| m == pk)
    }

    /// `u32 count || 33-byte members`, the form hashed into every challenge.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + POINT_LEN * self.members.len());
        out.extend_from_slice(&(self.members.len() as u32).to_be_bytes());
        for m in &self.members {
            out.extend_from_slice(&m.to_bytes());
        }
        out
    }
}

/// Size of the anonymity set used when signing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingConfig {
    pub ring_size: usize,
}

impl Default for RingConfig {
    fn default() -> Self {
        RingConfig {
            ring_size: DEFAULT_RING_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkableRingSig {
    pub key_image: GroupElement,
    pub c1: Scalar,
    #[serde(rename = "s")]
    pub responses: Vec<Scalar>,
}

impl LinkableRingSig {
    pub fn encoded_len(&self) -> usize {
        POINT_LEN + 32 + 4 + 32 * self.responses.len()
    }

    /// `key_image || c1 || u32 n || s_1..s_n`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&self.key_image.to_bytes());
        out.extend_from_slice(&self.c1.to_bytes());
        out.extend_from_slice(&(self.responses.len() as u32).to_be_bytes());
        for s in &self.responses {
            out.extend_from_slice(&s.to_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let fixed = POINT_LEN + 32 + 4;
        if bytes.len() < fixed {
            return Err(CryptoError::InvalidLength {
                expected: fixed,
                actual: bytes.len(),
            });
        }
        let key_image = GroupElement::from_bytes(&bytes[..POINT_LEN])?;
        let c1 = Scalar::from_bytes(&bytes[POINT_LEN..POINT_LEN + 32])?;
        let n = u32::from_be_bytes(bytes[POINT_LEN + 32..fixed].try_into().unwrap()) as usize;
        let body = &bytes[fixed..];
        if body.len() as u64 != n as u64 * 32 {
            return Err(CryptoError::InvalidLength {
                expected: fixed.saturating_add(n.saturating_mul(32)),
                actual: bytes.len(),
            });
        }
        let responses = body
            .chunks_exact(32)
            .map(Scalar::from_bytes)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LinkableRingSig {
            key_image,
            c1,
            responses,
        })
    }
}

/// `sk·H_p(pk)`; fails if `pk` is not `sk·g`.
pub fn key_image(sk: &Scalar, pk: &GroupElement) -> Result<GroupElement, LrsError> {
    if GroupElement::mul_base(sk) != *pk {
        return Err(LrsError::KeyMismatch);
    }
    Ok(*sk * hash_to_point(&pk.to_bytes())?)
}

struct Transcript {
    prefix: Vec<u8>,
}

impl Transcript {
    fn new(ring: &Ring, image: &GroupElement, message: &[u8]) -> Self {
        let mut prefix = ring.encode();
        prefix.extend_from_slice(&image.to_bytes());
        prefix.extend_from_slice(message);
        Transcript { prefix }
    }

    fn challenge(&self, l: &GroupElement, r: &GroupElement) -> Scalar {
        hash_to_scalar_parts(RING_TAG, &[&self.prefix, &l.to_bytes(), &r.to_bytes()])
    }
}

fn member_points(ring: &Ring) -> Result<Vec<GroupElement>, CryptoError> {
    ring.members.iter().map(|m| hash_to_point(&m.to_bytes())).collect()
}

/// Signs `message` as ring member `signer_index`.
pub fn ring_sign<R: RngCore + CryptoRng>(
    sk: &Scalar,
    signer_index: usize,
    ring: &Ring,
    message: &[u8],
    rng: &mut R,
) -> Result<LinkableRingSig, LrsError> {
    let n = ring.len();
    let signer_pk = ring
        .members
        .get(signer_index)
        .ok_or(LrsError::SignerNotInRing(signer_index))?;
    if GroupElement::mul_base(sk) != *signer_pk {
        return Err(LrsError::SignerNotInRing(signer_index));
    }
    let hp = member_points(ring)?;
    let image = *sk * hp[signer_index];
    let transcript = Transcript::new(ring, &image, message);

    let mut challenges = vec![Scalar::ZERO; n];
    let mut responses = vec![Scalar::ZERO; n];

    let u = Scalar::random_nonzero(rng);
    let l = GroupElement::mul_base(&u);
    let r = u * hp[signer_index];
    challenges[(signer_index + 1) % n] = transcript.challenge(&l, &r);

    for step in 1..n {
        let j = (signer_index + step) % n;
        let s = Scalar::random(rng);
        responses[j] = s;
        let l = GroupElement::lincomb_base(&s, &challenges[j], &ring.members[j]);
        let r = s * hp[j] + challenges[j] * image;
        challenges[(j + 1) % n] = transcript.challenge(&l, &r);
    }
    responses[signer_index] = u - challenges[signer_index] * *sk;

    Ok(LinkableRingSig {
        key_image: image,
        c1: challenges[0],
        responses,
    })
}

fn verify_traced(ring: &Ring, message: &[u8], sig: &LinkableRingSig, mut visit: impl FnMut(usize)) -> bool {
    if sig.responses.len() != ring.len() || sig.key_image.is_identity() {
        return false;
    }
    let Ok(hp) = member_points(ring) else {
        return false;
    };
    let transcript = Transcript::new(ring, &sig.key_image, message);
    let mut c = sig.c1;
    for (j, (pk, s)) in ring.members.iter().zip(&sig.responses).enumerate() {
        visit(j);
        let l = GroupElement::lincomb_base(s, &c, pk);
        let r = *s * hp[j] + c * sig.key_image;
        c = transcript.challenge(&l, &r);
    }
    c == sig.c1
}

/// Accepts iff the challenge chain closes and the key image is not the identity.
pub fn ring_verify(ring: &Ring, message: &[u8], sig: &LinkableRingSig) -> bool {
    verify_traced(ring, message, sig, |_| {})
}

/// Key-image equality; both signatures are assumed already verified.
pub fn link(a: &LinkableRingSig, b: &LinkableRingSig) -> bool {
    a.key_image == b.key_image
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::account::Account;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    // Frozen from tools/oracles/secp256k1_goldens.py.
    const GOLDEN_SK: &str = "94cab111c1cc58eba5e3e08e5da8d9fb78e499e1ebb0898091c4be68dd76c354";
    const GOLDEN_IMAGE: &str = "03251a14b3385cc83e3228bd316201862a35f1daf9bbdf944fe0e82897247d75c6";

    fn random_ring(rng: &mut ChaCha20Rng, signer: &Account, n: usize) -> (Ring, usize) {
        let pos = rng.gen_range(0..n);
        let mut members: Vec<_> = (0..n - 1).map(|_| *Account::generate(rng).public_key()).collect();
        members.insert(pos, *signer.public_key());
        (Ring::new(members).unwrap(), pos)
    }

    #[test]
    fn key_image_golden_and_definitional() {
        let sk = Scalar::from_bytes(&hex::decode(GOLDEN_SK).unwrap()).unwrap();
        let acct = Account::from_secret(sk).unwrap();
        let img = key_image(&sk, acct.public_key()).unwrap();
        assert_eq!(hex::encode(img.to_bytes()), GOLDEN_IMAGE);
        assert_eq!(img, key_image(&sk, acct.public_key()).unwrap());
        let direct = sk * hash_to_point(&acct.public_key().to_bytes()).unwrap();
        assert_eq!(img, direct);
    }

    #[test]
    fn key_image_rejects_mismatched_pair() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let a = Account::generate(&mut rng);
        let b = Account::generate(&mut rng);
        assert_eq!(key_image(a.secret_key(), b.public_key()), Err(LrsError::KeyMismatch));
    }

    #[test]
    fn distinct_keys_give_distinct_images() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let mut images = std::collections::HashSet::new();
        for _ in 0..1000 {
            let a = Account::generate(&mut rng);
            assert!(images.insert(key_image(a.secret_key(), a.public_key()).unwrap().to_bytes()));
        }
    }

    #[test]
    fn ring_construction_rules() {
        let g = GroupElement::generator();
        assert_eq!(Ring::new(vec![]), Err(LrsError::EmptyRing));
        assert_eq!(Ring::new(vec![g, g]), Err(LrsError::DuplicateMember(1)));
    }

    #[test]
    fn signer_must_be_at_index() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let a = Account::generate(&mut rng);
        let (ring, pos) = random_ring(&mut rng, &a, 4);
        let wrong = (pos + 1) % 4;
        assert_eq!(
            ring_sign(a.secret_key(), wrong, &ring, b"m", &mut rng),
            Err(LrsError::SignerNotInRing(wrong))
        );
        assert_eq!(
            ring_sign(a.secret_key(), 9, &ring, b"m", &mut rng),
            Err(LrsError::SignerNotInRing(9))
        );
    }

    #[test]
    fn completeness_and_tamper_rejection() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for case in 0..100 {
            let n = [1, 2, 4, 11][case % 4];
            let a = Account::generate(&mut rng);
            let (ring, pos) = random_ring(&mut rng, &a, n);
            let msg: [u8; 16] = rng.gen();
            let sig = ring_sign(a.secret_key(), pos, &ring, &msg, &mut rng).unwrap();
            assert!(ring_verify(&ring, &msg, &sig));

            let mut m2 = msg;
            m2[rng.gen_range(0..16)] ^= 1 << rng.gen_range(0..8);
            assert!(!ring_verify(&ring, &m2, &sig));

            let mut forged = sig.clone();
            let k = rng.gen_range(0..n);
            forged.responses[k] = Scalar::random(&mut rng);
            assert!(!ring_verify(&ring, &msg, &forged));
        }
    }

    #[test]
    fn singleton_ring_reduces_to_schnorr_equation() {
        // With n = 1: c1 = H(.. || s·g + c1·pk || s·H_p(pk) + c1·I).
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let a = Account::generate(&mut rng);
        let ring = Ring::new(vec![*a.public_key()]).unwrap();
        let sig = ring_sign(a.secret_key(), 0, &ring, b"soul", &mut rng).unwrap();
        let hp = hash_to_point(&a.public_key().to_bytes()).unwrap();
        let l = sig.responses[0] * GroupElement::generator() + sig.c1 * *a.public_key();
        let r = sig.responses[0] * hp + sig.c1 * sig.key_image;
        let mut prefix = ring.encode();
        prefix.extend_from_slice(&sig.key_image.to_bytes());
        prefix.extend_from_slice(b"soul");
        let c = hash_to_scalar_parts(RING_TAG, &[&prefix, &l.to_bytes(), &r.to_bytes()]);
        assert_eq!(c, sig.c1);
        assert!(ring_verify(&ring, b"soul", &sig));
    }

    #[test]
    fn same_key_links_across_rings() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let a = Account::generate(&mut rng);
        let (r1, p1) = random_ring(&mut rng, &a, 4);
        let (r2, p2) = random_ring(&mut rng, &a, 7);
        let s1 = ring_sign(a.secret_key(), p1, &r1, b"one", &mut rng).unwrap();
        let s2 = ring_sign(a.secret_key(), p2, &r2, b"two", &mut rng).unwrap();
        assert_eq!(s1.key_image, s2.key_image);
        assert!(link(&s1, &s2));
        assert!(link(&s1, &s1));
        let b = Account::generate(&mut rng);
        let (r3, p3) = random_ring(&mut rng, &b, 4);
        let s3 = ring_sign(b.secret_key(), p3, &r3, b"one", &mut rng).unwrap();
        assert!(!link(&s1, &s3));
    }

    #[test]
    fn identity_key_image_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let a = Account::generate(&mut rng);
        let (ring, pos) = random_ring(&mut rng, &a, 3);
        let mut sig = ring_sign(a.secret_key(), pos, &ring, b"m", &mut rng).unwrap();
        sig.key_image = GroupElement::identity();
        assert!(!ring_verify(&ring, b"m", &sig));
    }

    #[test]
    fn wrong_response_count_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let a = Account::generate(&mut rng);
        let (ring, pos) = random_ring(&mut rng, &a, 3);
        let mut sig = ring_sign(a.secret_key(), pos, &ring, b"m", &mut rng).unwrap();
        sig.responses.pop();
        assert!(!ring_verify(&ring, b"m", &sig));
    }

    #[test]
    fn verifier_visits_every_member_once_in_order() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let n = 11;
        for _ in 0..5 {
            let a = Account::generate(&mut rng);
            let (ring, pos) = random_ring(&mut rng, &a, n);
            let sig = ring_sign(a.secret_key(), pos, &ring, b"m", &mut rng).unwrap();
            let mut trace = Vec::new();
            assert!(verify_traced(&ring, b"m", &sig, |j| trace.push(j)));
            assert_eq!(trace, (0..n).collect::<Vec<_>>());
            // A failing signature produces the same trace: no early exit on any slot.
            let mut bad = sig.clone();
            bad.responses[pos] = Scalar::random(&mut rng);
            let mut trace_bad = Vec::new();
            assert!(!verify_traced(&ring, b"m", &bad, |j| trace_bad.push(j)));
            assert_eq!(trace_bad, trace);
        }
    }

    #[test]
    fn json_shape() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let a = Account::generate(&mut rng);
        let (ring, pos) = random_ring(&mut rng, &a, 2);
        let sig = ring_sign(a.secret_key(), pos, &ring, b"m", &mut rng).unwrap();
        let v: serde_json::Value = serde_json::to_value(&sig).unwrap();
        assert!(v["key_image"].is_string());
        assert!(v["c1"].is_string());
        assert_eq!(v["s"].as_array().unwrap().len(), 2);
        let ring_json = serde_json::to_value(&ring).unwrap();
        assert_eq!(ring_json.as_array().unwrap().len(), 2);
        let dup = serde_json::json!([ring_json[0], ring_json[0]]);
        assert!(serde_json::from_value::<Ring>(dup).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn serialization_round_trips(seed in any::<u64>(), n in 1usize..6) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let a = Account::generate(&mut rng);
            let (ring, pos) = random_ring(&mut rng, &a, n);
            let sig = ring_sign(a.secret_key(), pos, &ring, b"m", &mut rng).unwrap();
            prop_assert_eq!(LinkableRingSig::from_bytes(&sig.to_bytes()).unwrap(), sig.clone());
            let json = serde_json::to_string(&sig).unwrap();
            prop_assert_eq!(serde_json::from_str::<LinkableRingSig>(&json).unwrap(), sig);
        }
    }
}
