#![allow(dead_code)]

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use zkbid_chain::{
    build_certification_tx, build_registration_tx, certify, enroll, Chain, Enrollment, Genesis, Transaction, TxPool,
};
use zkbid_core::face::{normalize_features, FeatureVector, ThresholdConfig, FEATURE_DIM};
use zkbid_core::lrs::RingConfig;
use zkbid_core::Account;
use zkbid_zk::{facematch_circuit, ProvingKey, VerificationKey};

pub fn keys() -> &'static (ProvingKey, VerificationKey) {
    static KEYS: OnceLock<(ProvingKey, VerificationKey)> = OnceLock::new();
    KEYS.get_or_init(|| zkbid_zk::transparent::keygen(facematch_circuit()))
}

pub fn cfg() -> ThresholdConfig {
    ThresholdConfig::default()
}

pub fn genesis(capacity: usize) -> Genesis {
    Genesis::new(&keys().1, &cfg(), capacity)
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// A live/card pair from the same synthetic face.
pub fn face_pair(rng: &mut ChaCha20Rng) -> (FeatureVector, FeatureVector) {
    let base: Vec<f64> = (0..FEATURE_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let noisy: Vec<f64> = base.iter().map(|x| x + rng.gen_range(-0.01..0.01)).collect();
    (normalize_features(&base).unwrap(), normalize_features(&noisy).unwrap())
}

pub fn enroll_user(id: &str, rng: &mut ChaCha20Rng) -> Enrollment {
    let (live, card) = face_pair(rng);
    enroll(id, &live, &card, &keys().0, &cfg(), rng).unwrap()
}

pub fn registration_tx(e: &Enrollment, nonce: u64, rng: &mut ChaCha20Rng) -> Transaction {
    build_registration_tx(&e.seed, &e.reg, nonce, rng).unwrap()
}

pub fn certification_tx(seed: &Account, chain: &Chain, ring_size: usize, rng: &mut ChaCha20Rng) -> (Account, Transaction) {
    let c = certify(seed, &chain.state().seed_keys(), RingConfig { ring_size }, rng).unwrap();
    let tx = build_certification_tx(&c.soul, &c.cer, 0, rng).unwrap();
    (c.soul, tx)
}

/// Submits one transaction and produces a block holding it.
pub fn run_one(chain: &mut Chain, tx: Transaction) -> zkbid_chain::Receipt {
    let mut pool = TxPool::new();
    pool.insert(tx, 0);
    let (_, mut receipts) = chain.produce_block(&mut pool);
    receipts.remove(0)
}
