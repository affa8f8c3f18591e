//! The identity-auth and soul-cert contracts as native state transitions.
//!
//! Every transaction first passes transaction-level checks (known target,
//! decodable payload, sender owns the signing key, signature, nonce). Failing
//! those leaves the state untouched. After that the nonce is consumed and the
//! contract's own checks run in their documented order; the first failure
//! becomes the receipt's error.

use serde::{Deserialize, Serialize};
use zkbid_core::hash::Digest32;
use zkbid_zk::VerificationKey;

use crate::codec::Writer;
use crate::state::{ChainState, SeedRecord};
use crate::tx::{identity_auth_address, soul_cert_address, CerInfo, RegInfo, Transaction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, thiserror::Error)]
pub enum ReceiptError {
    #[error("recipient is not a known contract")]
    BadTarget,
    #[error("payload does not decode")]
    MalformedPayload,
    #[error("sender address does not belong to the signing key")]
    SenderMismatch,
    #[error("transaction signature is invalid")]
    InvalidTxSignature,
    #[error("nonce already used")]
    StaleNonce,
    #[error("identity already registered")]
    DuplicateIdentity,
    #[error("face-match proof does not verify")]
    InvalidProof,
    #[error("seed signature over the identity hash does not verify")]
    InvalidSeedSignature,
    #[error("ring contains a key that is not a registered seed key")]
    UnregisteredRingMember,
    #[error("ring signature does not verify")]
    InvalidRingSignature,
    #[error("key image already used")]
    DuplicateKeyImage,
}

impl ReceiptError {
    fn code(self) -> u8 {
        self as u8 + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContractKind {
    IdentityAuth,
    SoulCert,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Receipt {
    pub tx_hash: Digest32,
    pub height: u64,
    pub index: u32,
    pub contract: ContractKind,
    pub sender: zkbid_core::Address,
    pub nonce: u64,
    #[serde(with = "status")]
    pub status: Result<(), ReceiptError>,
}

impl Receipt {
    pub fn accepted(&self) -> bool {
        self.status.is_ok()
    }

    pub fn error(&self) -> Option<ReceiptError> {
        self.status.err()
    }
}

mod status {
    use super::ReceiptError;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Status {
        accepted: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<ReceiptError>,
    }

    pub fn serialize<S: Serializer>(v: &Result<(), ReceiptError>, s: S) -> Result<S::Ok, S::Error> {
        Status {
            accepted: v.is_ok(),
            error: v.err(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Result<(), ReceiptError>, D::Error> {
        let st = Status::deserialize(d)?;
        match (st.accepted, st.error) {
            (true, None) => Ok(Ok(())),
            (false, Some(e)) => Ok(Err(e)),
            _ => Err(serde::de::Error::custom("inconsistent receipt status")),
        }
    }
}

/// Parameters fixed at genesis that the contracts read.
#[derive(Debug, Clone)]
pub struct ExecContext {
    pub vk: VerificationKey,
    pub tau_fixed: i64,
    pub eps_norm: i64,
}

fn tx_level<P>(
    state: &ChainState,
    tx: &Transaction,
    decode: impl FnOnce(&[u8]) -> Option<P>,
    signer: impl FnOnce(&P) -> zkbid_core::GroupElement,
) -> Result<P, ReceiptError> {
    let payload = decode(&tx.data).ok_or(ReceiptError::MalformedPayload)?;
    let pk = signer(&payload);
    if zkbid_core::derive_address(&pk) != tx.sender {
        return Err(ReceiptError::SenderMismatch);
    }
    if !tx.verify_sender(&pk) {
        return Err(ReceiptError::InvalidTxSignature);
    }
    if tx.nonce < state.next_nonce(&tx.sender) {
        return Err(ReceiptError::StaleNonce);
    }
    Ok(payload)
}

/// Identity-auth checks, in order: (i) identity not yet registered,
/// (ii) proof verifies, (iii) seed signature verifies.
pub fn exec_identity_auth(state: &mut ChainState, ctx: &ExecContext, tx: &Transaction) -> Result<(), ReceiptError> {
    if tx.recipient != identity_auth_address() {
        return Err(ReceiptError::BadTarget);
    }
    let reg = tx_level(state, tx, |d| RegInfo::decode(d).ok(), |r| r.pk_seed)?;
    state.set_next_nonce(tx.sender, tx.nonce + 1);

    if state.contains_identity(&reg.id_hash) {
        return Err(ReceiptError::DuplicateIdentity);
    }
    let public = reg.public_inputs(ctx.tau_fixed, ctx.eps_norm);
    if !zkbid_zk::verify(&ctx.vk, &public, &reg.zkp) {
        return Err(ReceiptError::InvalidProof);
    }
    if !reg.seed_signature_valid() {
        return Err(ReceiptError::InvalidSeedSignature);
    }
    state.insert_seed(
        reg.id_hash,
        SeedRecord {
            pk_seed: reg.pk_seed,
            zkp: reg.zkp,
        },
    );
    Ok(())
}

/// Soul-cert checks, in order: (i) every ring member is a registered seed
/// key, (ii) ring signature over `pk_soul` verifies, (iii) key image unused.
pub fn exec_soul_cert(state: &mut ChainState, tx: &Transaction) -> Result<(), ReceiptError> {
    if tx.recipient != soul_cert_address() {
        return Err(ReceiptError::BadTarget);
    }
    let cer = tx_level(state, tx, |d| CerInfo::decode(d).ok(), |c| c.pk_soul)?;
    state.set_next_nonce(tx.sender, tx.nonce + 1);

    if !cer.ring.members().iter().all(|m| state.is_registered_seed(m)) {
        return Err(ReceiptError::UnregisteredRingMember);
    }
    if !cer.signature_valid() {
        return Err(ReceiptError::InvalidRingSignature);
    }
    if state.contains_key_image(&cer.sig.key_image) {
        return Err(ReceiptError::DuplicateKeyImage);
    }
    state.insert_soul(cer.pk_soul, cer.sig.key_image);
    Ok(())
}

/// Routes `tx` by recipient, then folds the outcome into the state history.
pub fn execute_tx(state: &mut ChainState, ctx: &ExecContext, tx: &Transaction) -> (ContractKind, Result<(), ReceiptError>) {
    let (kind, result) = if tx.recipient == identity_auth_address() {
        (ContractKind::IdentityAuth, exec_identity_auth(state, ctx, tx))
    } else if tx.recipient == soul_cert_address() {
        (ContractKind::SoulCert, exec_soul_cert(state, tx))
    } else {
        (ContractKind::Unknown, Err(ReceiptError::BadTarget))
    };
    let mut w = Writer::new();
    w.raw(tx.hash().as_bytes()).u8(result.map_or_else(|e| e.code(), |_| 0));
    state.record(&w.finish());
    (kind, result)
}
