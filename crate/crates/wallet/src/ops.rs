//! The wallet-side steps: setup, enroll, register, certify, status.

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use zkbid_chain::{build_certification_tx, build_registration_tx, Genesis, Receipt, DEFAULT_BLOCK_CAPACITY};
use zkbid_core::face::{FeatureVector, RawFeatures, ThresholdConfig};
use zkbid_core::lrs::RingConfig;
use zkbid_core::Account;
use zkbid_zk::{facematch_circuit, ProvingKey, VerificationKey};

use crate::endpoint::{Endpoint, LocalNode};
use crate::error::WalletError;
use crate::store::WalletStore;

/// Generates proving/verification keys, writes them, and creates a local
/// chain whose genesis deploys the verification key.
pub fn setup<R: RngCore + CryptoRng>(
    store: &WalletStore,
    cfg: &ThresholdConfig,
    rng: &mut R,
) -> Result<(ProvingKey, VerificationKey), WalletError> {
    if store.has_setup() {
        return Err(WalletError::AlreadySetUp(store.root().to_path_buf()));
    }
    let (pk, vk) = zkbid_zk::keygen(facematch_circuit(), rng);
    install_setup(store, &pk, &vk, cfg)?;
    Ok((pk, vk))
}

/// Writes externally generated keys and creates the local chain.
pub fn install_setup(
    store: &WalletStore,
    pk: &ProvingKey,
    vk: &VerificationKey,
    cfg: &ThresholdConfig,
) -> Result<(), WalletError> {
    let genesis = Genesis::new(vk, cfg, DEFAULT_BLOCK_CAPACITY);
    LocalNode::create(&store.node_dir(), &genesis)?;
    store.save_setup(pk, vk, cfg)
}

/// ID number with its two captures, as read from files.
#[derive(Debug, Clone)]
pub struct IdentityInput {
    pub id_number: String,
    pub live: RawFeatures,
    pub card: RawFeatures,
}

impl IdentityInput {
    pub fn normalized(&self) -> Result<(FeatureVector, FeatureVector), WalletError> {
        if self.id_number.is_empty() {
            return Err(WalletError::Input("ID number is empty".into()));
        }
        Ok((self.live.normalize()?, self.card.normalize()?))
    }
}

/// Face comparison, proof and seed account. Writes nothing unless every
/// step succeeds.
pub fn enroll<R: RngCore + CryptoRng>(
    store: &WalletStore,
    input: &IdentityInput,
    rng: &mut R,
) -> Result<zkbid_chain::Enrollment, WalletError> {
    if store.has_seed() {
        return Err(WalletError::AlreadyEnrolled);
    }
    let pk = store.proving_key()?;
    let cfg = store.threshold()?;
    let (live, card) = input.normalized()?;
    let e = zkbid_chain::enroll(&input.id_number, &live, &card, &pk, &cfg, rng)?;
    store.save_enrollment(&e.seed, &e.reg, &live, &card)?;
    Ok(e)
}

/// Submits the stored RegInfo and waits for its receipt. A contract
/// rejection is returned as `Ok` with an error status.
pub fn register<E: Endpoint, R: RngCore + CryptoRng>(
    store: &WalletStore,
    endpoint: &mut E,
    rng: &mut R,
) -> Result<Receipt, WalletError> {
    let seed = store.seed()?;
    let reg = store.reginfo()?;
    let nonce = endpoint.state()?.next_nonce(&seed.address());
    let tx = build_registration_tx(&seed, &reg, nonce, rng).map_err(|e| WalletError::Input(e.to_string()))?;
    let h = endpoint.submit(tx)?;
    let receipt = endpoint.wait_receipt(&h)?;
    store.append_receipt(&receipt)?;
    Ok(receipt)
}

#[derive(Debug, Clone)]
pub struct CertifyOutcome {
    pub soul: Account,
    pub receipt: Receipt,
}

/// Creates a soul account, ring-signs it with decoys from the current
/// registry and submits it. The soul account is kept only if accepted.
pub fn certify<E: Endpoint, R: RngCore + CryptoRng>(
    store: &WalletStore,
    endpoint: &mut E,
    ring_cfg: RingConfig,
    rng: &mut R,
) -> Result<CertifyOutcome, WalletError> {
    let seed = store.seed()?;
    let state = endpoint.state()?;
    if !state.is_registered_seed(seed.public_key()) {
        return Err(WalletError::NotRegistered);
    }
    let c = zkbid_chain::certify(&seed, &state.seed_keys(), ring_cfg, rng)?;
    let nonce = state.next_nonce(&c.soul.address());
    let tx = build_certification_tx(&c.soul, &c.cer, nonce, rng).map_err(|e| WalletError::Input(e.to_string()))?;
    let h = endpoint.submit(tx)?;
    let receipt = endpoint.wait_receipt(&h)?;
    store.append_receipt(&receipt)?;
    if receipt.accepted() {
        store.save_certification(&c.soul, &c.cer)?;
    }
    Ok(CertifyOutcome { soul: c.soul, receipt })
}

/// Registry sizes and chain height. Never contains key material.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusReport {
    pub height: u64,
    pub seed_accounts: usize,
    pub soul_accounts: usize,
    pub key_images: usize,
}

pub fn status<E: Endpoint>(endpoint: &E) -> Result<StatusReport, WalletError> {
    let counts = endpoint.state()?.counts();
    Ok(StatusReport {
        height: endpoint.height()?,
        seed_accounts: counts.seed,
        soul_accounts: counts.soul,
        key_images: counts.key_images,
    })
}
