//! Transactions and the two contract payloads, `RegInfo` and `CerInfo`.

use std::sync::OnceLock;

use rand::{CryptoRng, RngCore};
use zkbid_core::account::{account_verify, derive_address};
use zkbid_core::hash::{digest, digest_parts, Digest32};
use zkbid_core::lrs::{ring_verify, LinkableRingSig, Ring};
use zkbid_core::{Account, AccountSignature, Address, GroupElement};
use zkbid_zk::circuit::digest_to_field;
use zkbid_zk::{Proof, PublicInputs};

use crate::codec::{DecodeError, Reader, Writer};

pub const TX_FORMAT: u16 = 0x0001;
pub const REGINFO_FORMAT: u16 = 0x0101;
pub const CERINFO_FORMAT: u16 = 0x0102;

const TX_SIGN_TAG: &[u8] = b"ZKBID/TXSIG/v1";
const ID_TAG: &[u8] = b"ZKBID/ID/v1";

fn contract_address(name: &[u8]) -> Address {
    let d = digest_parts(&[b"ZKBID/CONTRACT/", name]);
    let mut a = [0u8; 20];
    a.copy_from_slice(&d.0[12..]);
    Address(a)
}

pub fn identity_auth_address() -> Address {
    static A: OnceLock<Address> = OnceLock::new();
    *A.get_or_init(|| contract_address(b"identity-auth"))
}

pub fn soul_cert_address() -> Address {
    static A: OnceLock<Address> = OnceLock::new();
    *A.get_or_init(|| contract_address(b"soul-cert"))
}

/// `digest("ZKBID/ID/v1" || id_number)`.
pub fn identity_hash(id_number: &str) -> Digest32 {
    digest_parts(&[ID_TAG, id_number.as_bytes()])
}

/// The seed key as a circuit public input.
pub fn seed_pk_digest(pk: &GroupElement) -> Digest32 {
    digest(&pk.to_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TxError {
    #[error("registration info is inconsistent: {0}")]
    InconsistentRegInfo(&'static str),
    #[error("certification info is inconsistent: {0}")]
    InconsistentCerInfo(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub sender: Address,
    pub recipient: Address,
    pub nonce: u64,
    pub data: Vec<u8>,
    pub signature: AccountSignature,
}

fn signing_digest(sender: &Address, recipient: &Address, nonce: u64, data: &[u8]) -> Vec<u8> {
    let mut w = Writer::new();
    w.raw(TX_SIGN_TAG)
        .raw(sender.as_bytes())
        .raw(recipient.as_bytes())
        .u64(nonce)
        .bytes(data);
    digest(&w.finish()).0.to_vec()
}

impl Transaction {
    pub fn new_signed<R: RngCore + CryptoRng>(
        signer: &Account,
        recipient: Address,
        nonce: u64,
        data: Vec<u8>,
        rng: &mut R,
    ) -> Self {
        let sender = signer.address();
        let msg = signing_digest(&sender, &recipient, nonce, &data);
        Transaction {
            sender,
            recipient,
            nonce,
            signature: signer.sign(&msg, rng),
            data,
        }
    }

    pub fn signing_message(&self) -> Vec<u8> {
        signing_digest(&self.sender, &self.recipient, self.nonce, &self.data)
    }

    /// Checks the signature under `pk` and that `pk` owns the sender address.
    pub fn verify_sender(&self, pk: &GroupElement) -> bool {
        derive_address(pk) == self.sender && account_verify(pk, &self.signing_message(), &self.signature)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u16(TX_FORMAT)
            .raw(self.sender.as_bytes())
            .raw(self.recipient.as_bytes())
            .u64(self.nonce)
            .bytes(&self.data)
            .raw(&self.signature.to_bytes());
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        let tx = Self::read(&mut r)?;
        r.finish()?;
        Ok(tx)
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        r.format_id("transaction", TX_FORMAT)?;
        Ok(Transaction {
            sender: r.address("sender")?,
            recipient: r.address("recipient")?,
            nonce: r.u64("nonce")?,
            data: r.bytes("data")?.to_vec(),
            signature: r.account_signature("tx signature")?,
        })
    }

    pub fn hash(&self) -> Digest32 {
        digest(&self.encode())
    }
}

/// Registration bundle `(ZKP, Hash(ID), pk_seed, Sig_seed)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegInfo {
    pub zkp: Proof,
    pub id_hash: Digest32,
    pub pk_seed: GroupElement,
    pub sig_seed: AccountSignature,
}

impl RegInfo {
    /// Signs `id_hash` with the seed key.
    pub fn new<R: RngCore + CryptoRng>(zkp: Proof, id_hash: Digest32, seed: &Account, rng: &mut R) -> Self {
        RegInfo {
            zkp,
            id_hash,
            pk_seed: *seed.public_key(),
            sig_seed: seed.sign(id_hash.as_bytes(), rng),
        }
    }

    pub fn seed_signature_valid(&self) -> bool {
        account_verify(&self.pk_seed, self.id_hash.as_bytes(), &self.sig_seed)
    }

    /// The statement the proof must satisfy under the chain's threshold.
    pub fn public_inputs(&self, tau_fixed: i64, eps_norm: i64) -> PublicInputs {
        PublicInputs {
            tau_fixed,
            eps_norm,
            id_hash: digest_to_field(&self.id_hash),
            seed_pk_digest: digest_to_field(&seed_pk_digest(&self.pk_seed)),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u16(REGINFO_FORMAT)
            .bytes(self.zkp.as_bytes())
            .raw(self.id_hash.as_bytes())
            .raw(&self.pk_seed.to_bytes())
            .raw(&self.sig_seed.to_bytes());
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        r.format_id("RegInfo", REGINFO_FORMAT)?;
        let reg = RegInfo {
            zkp: Proof::from_bytes_unchecked(r.bytes("zkp")?),
            id_hash: r.digest("id_hash")?,
            pk_seed: r.point("pk_seed")?,
            sig_seed: r.account_signature("sig_seed")?,
        };
        r.finish()?;
        Ok(reg)
    }
}

/// Certification bundle `(pk_soul, L, σ)`; `σ` signs the encoding of `pk_soul`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CerInfo {
    pub pk_soul: GroupElement,
    pub ring: Ring,
    pub sig: LinkableRingSig,
}

impl CerInfo {
    pub fn signature_valid(&self) -> bool {
        ring_verify(&self.ring, &self.pk_soul.to_bytes(), &self.sig)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u16(CERINFO_FORMAT)
            .raw(&self.pk_soul.to_bytes())
            .bytes(&self.ring.encode())
            .bytes(&self.sig.to_bytes());
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        r.format_id("CerInfo", CERINFO_FORMAT)?;
        let pk_soul = r.point("pk_soul")?;
        let ring = decode_ring(r.bytes("ring")?)?;
        let sig = LinkableRingSig::from_bytes(r.bytes("ring signature")?).map_err(|_| DecodeError::Invalid("ring signature"))?;
        r.finish()?;
        Ok(CerInfo { pk_soul, ring, sig })
    }
}

fn decode_ring(bytes: &[u8]) -> Result<Ring, DecodeError> {
    let mut r = Reader::new(bytes);
    let n = r.u32("ring size")? as usize;
    if n.saturating_mul(zkbid_core::group::POINT_LEN) != r.remaining() {
        return Err(DecodeError::Invalid("ring size"));
    }
    let members = (0..n).map(|_| r.point("ring member")).collect::<Result<Vec<_>, _>>()?;
    Ring::new(members).map_err(|_| DecodeError::Invalid("ring"))
}

/// A signed transaction to the identity-auth contract from the seed account.
pub fn build_registration_tx<R: RngCore + CryptoRng>(
    seed: &Account,
    reg: &RegInfo,
    nonce: u64,
    rng: &mut R,
) -> Result<Transaction, TxError> {
    if derive_address(&reg.pk_seed) != seed.address() {
        return Err(TxError::InconsistentRegInfo("seed address does not match pk_seed"));
    }
    if !reg.seed_signature_valid() {
        return Err(TxError::InconsistentRegInfo("sig_seed does not verify over id_hash"));
    }
    Ok(Transaction::new_signed(seed, identity_auth_address(), nonce, reg.encode(), rng))
}

/// A signed transaction to the soul-cert contract from the soul account.
pub fn build_certification_tx<R: RngCore + CryptoRng>(
    soul: &Account,
    cer: &CerInfo,
    nonce: u64,
    rng: &mut R,
) -> Result<Transaction, TxError> {
    if cer.pk_soul != *soul.public_key() {
        return Err(TxError::InconsistentCerInfo("pk_soul is not the soul account key"));
    }
    Ok(Transaction::new_signed(soul, soul_cert_address(), nonce, cer.encode(), rng))
}
