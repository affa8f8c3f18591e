//! User-side construction of registration and certification bundles.

use rand::seq::SliceRandom;
use rand::{CryptoRng, Rng, RngCore};

use zkbid_core::face::{cosine_similarity_fixed, face_match, FeatureVector, ThresholdConfig};
use zkbid_core::lrs::{ring_sign, LrsError, Ring, RingConfig};
use zkbid_core::{Account, GroupElement};
use zkbid_zk::circuit::digest_to_field;
use zkbid_zk::{synthesize_witness, ProvingKey, PublicInputs, ZkError};

use crate::tx::{identity_hash, seed_pk_digest, CerInfo, RegInfo};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnrollError {
    #[error("ID number is empty")]
    EmptyId,
    #[error("live and card features do not match (similarity {similarity}, threshold {tau_fixed})")]
    FaceMismatch { similarity: i64, tau_fixed: i64 },
    #[error("prover failed: {0}")]
    ProverFailure(#[from] ZkError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    #[error("registry holds {available} seed keys, ring needs {required}")]
    InsufficientAnonymitySet { available: usize, required: usize },
    #[error("ring size must be at least 1")]
    EmptyRing,
    #[error("seed key is not in the registry snapshot")]
    SeedNotRegistered,
    #[error(transparent)]
    Ring(#[from] LrsError),
}

/// Result of a successful enrollment.
#[derive(Debug, Clone)]
pub struct Enrollment {
    pub seed: Account,
    pub reg: RegInfo,
    pub public: PublicInputs,
}

/// Face comparison, seed account creation, proof and seed signature.
///
/// Nothing is generated if the faces do not match.
pub fn enroll<R: RngCore + CryptoRng>(
    id_number: &str,
    live: &FeatureVector,
    card: &FeatureVector,
    pk: &ProvingKey,
    cfg: &ThresholdConfig,
    rng: &mut R,
) -> Result<Enrollment, EnrollError> {
    if id_number.is_empty() {
        return Err(EnrollError::EmptyId);
    }
    if !face_match(live, card, cfg) {
        return Err(EnrollError::FaceMismatch {
            similarity: cosine_similarity_fixed(live, card),
            tau_fixed: cfg.tau_fixed,
        });
    }
    let seed = Account::generate(rng);
    let id_hash = identity_hash(id_number);
    let public = PublicInputs::new(
        cfg,
        digest_to_field(&id_hash),
        digest_to_field(&seed_pk_digest(seed.public_key())),
    );
    let witness = synthesize_witness(live, card, &public)?;
    let zkp = zkbid_zk::prove(pk, &public, &witness, rng)?;
    let reg = RegInfo::new(zkp, id_hash, &seed, rng);
    Ok(Enrollment { seed, reg, public })
}

/// Result of a successful certification bundle build.
#[derive(Debug, Clone)]
pub struct Certification {
    pub soul: Account,
    pub cer: CerInfo,
    pub signer_index: usize,
}

/// Picks `ring_size - 1` distinct decoys uniformly from `registry`, places
/// the seed key at a uniform position, and ring-signs a fresh soul key.
pub fn certify<R: RngCore + CryptoRng>(
    seed: &Account,
    registry: &[GroupElement],
    ring_cfg: RingConfig,
    rng: &mut R,
) -> Result<Certification, CertifyError> {
    let n = ring_cfg.ring_size;
    if n == 0 {
        return Err(CertifyError::EmptyRing);
    }
    if registry.len() < n {
        return Err(CertifyError::InsufficientAnonymitySet {
            available: registry.len(),
            required: n,
        });
    }
    let own = seed.public_key();
    if !registry.contains(own) {
        return Err(CertifyError::SeedNotRegistered);
    }
    let others: Vec<GroupElement> = registry.iter().filter(|k| *k != own).copied().collect();
    let mut members: Vec<GroupElement> = others.choose_multiple(rng, n - 1).copied().collect();
    let signer_index = rng.gen_range(0..n);
    members.insert(signer_index, *own);
    let ring = Ring::new(members)?;

    let soul = Account::generate(rng);
    let sig = ring_sign(seed.secret_key(), signer_index, &ring, &soul.public_key().to_bytes(), rng)?;
    let cer = CerInfo {
        pk_soul: *soul.public_key(),
        ring,
        sig,
    };
    Ok(Certification {
        soul,
        cer,
        signer_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn certify_rejects_small_registry() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let seed = Account::generate(&mut rng);
        let mut registry: Vec<GroupElement> = (0..4).map(|_| *Account::generate(&mut rng).public_key()).collect();
        registry.push(*seed.public_key());
        let err = certify(&seed, &registry, RingConfig { ring_size: 11 }, &mut rng).unwrap_err();
        assert_eq!(
            err,
            CertifyError::InsufficientAnonymitySet {
                available: 5,
                required: 11
            }
        );
        let ok = certify(&seed, &registry, RingConfig { ring_size: 5 }, &mut rng).unwrap();
        assert!(ok.cer.signature_valid());
        assert_eq!(ok.cer.ring.members()[ok.signer_index], *seed.public_key());
    }

    #[test]
    fn certify_requires_own_key() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let seed = Account::generate(&mut rng);
        let registry: Vec<GroupElement> = (0..3).map(|_| *Account::generate(&mut rng).public_key()).collect();
        let err = certify(&seed, &registry, RingConfig { ring_size: 2 }, &mut rng).unwrap_err();
        assert_eq!(err, CertifyError::SeedNotRegistered);
    }
}
