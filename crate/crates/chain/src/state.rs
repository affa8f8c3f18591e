//! On-chain storage: SeedKeyStore, KeyImageSet, SoulKeyStore and nonces.

use std::collections::{BTreeMap, BTreeSet};

use zkbid_core::hash::{digest, Digest32};
use zkbid_core::{Address, GroupElement};
use zkbid_zk::Proof;

use crate::codec::{DecodeError, Reader, Writer};

pub const STATE_FORMAT: u16 = 0x0201;
const STATE_TAG: &[u8] = b"ZKBID/STATE/v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedRecord {
    pub pk_seed: GroupElement,
    pub zkp: Proof,
}

/// Append-only contract storage plus per-account nonces.
///
/// `history` accumulates every executed transaction and its outcome, so the
/// state root commits to rejected transactions as well as accepted ones.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChainState {
    seed_store: BTreeMap<Digest32, SeedRecord>,
    seed_keys: BTreeSet<GroupElement>,
    key_images: BTreeSet<GroupElement>,
    soul_store: BTreeSet<GroupElement>,
    next_nonce: BTreeMap<Address, u64>,
    history: Digest32,
}

/// Registry sizes, as reported by `status`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StoreCounts {
    pub seed: usize,
    pub soul: usize,
    pub key_images: usize,
}

impl ChainState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn seed_record(&self, id_hash: &Digest32) -> Option<&SeedRecord> {
        self.seed_store.get(id_hash)
    }

    pub fn contains_identity(&self, id_hash: &Digest32) -> bool {
        self.seed_store.contains_key(id_hash)
    }

    pub fn is_registered_seed(&self, pk: &GroupElement) -> bool {
        self.seed_keys.contains(pk)
    }

    /// Registered seed keys in canonical order: the anonymity set snapshot.
    pub fn seed_keys(&self) -> Vec<GroupElement> {
        self.seed_keys.iter().copied().collect()
    }

    pub fn contains_key_image(&self, image: &GroupElement) -> bool {
        self.key_images.contains(image)
    }

    pub fn is_certified_soul(&self, pk: &GroupElement) -> bool {
        self.soul_store.contains(pk)
    }

    pub fn soul_keys(&self) -> impl Iterator<Item = &GroupElement> {
        self.soul_store.iter()
    }

    pub fn key_images(&self) -> impl Iterator<Item = &GroupElement> {
        self.key_images.iter()
    }

    pub fn seed_entries(&self) -> impl Iterator<Item = (&Digest32, &SeedRecord)> {
        self.seed_store.iter()
    }

    pub fn counts(&self) -> StoreCounts {
        StoreCounts {
            seed: self.seed_store.len(),
            soul: self.soul_store.len(),
            key_images: self.key_images.len(),
        }
    }

    pub fn next_nonce(&self, addr: &Address) -> u64 {
        self.next_nonce.get(addr).copied().unwrap_or(0)
    }

    pub(crate) fn set_next_nonce(&mut self, addr: Address, next: u64) {
        self.next_nonce.insert(addr, next);
    }

    pub(crate) fn insert_seed(&mut self, id_hash: Digest32, record: SeedRecord) {
        self.seed_keys.insert(record.pk_seed);
        let prev = self.seed_store.insert(id_hash, record);
        debug_assert!(prev.is_none(), "seed store is append-only");
    }

    pub(crate) fn insert_soul(&mut self, pk_soul: GroupElement, key_image: GroupElement) {
        let fresh_soul = self.soul_store.insert(pk_soul);
        let fresh_image = self.key_images.insert(key_image);
        debug_assert!(fresh_soul && fresh_image, "soul stores are append-only");
    }

    pub(crate) fn record(&mut self, entry: &[u8]) {
        self.history = zkbid_core::hash::digest_parts(&[self.history.as_bytes(), entry]);
    }

    pub fn history(&self) -> Digest32 {
        self.history
    }

    /// Sorted, length-prefixed serialization of every store.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u16(STATE_FORMAT).raw(STATE_TAG);
        w.u32(self.seed_store.len() as u32);
        for (id_hash, rec) in &self.seed_store {
            w.raw(id_hash.as_bytes()).raw(&rec.pk_seed.to_bytes()).bytes(rec.zkp.as_bytes());
        }
        w.u32(self.key_images.len() as u32);
        for image in &self.key_images {
            w.raw(&image.to_bytes());
        }
        w.u32(self.soul_store.len() as u32);
        for pk in &self.soul_store {
            w.raw(&pk.to_bytes());
        }
        w.u32(self.next_nonce.len() as u32);
        for (addr, n) in &self.next_nonce {
            w.raw(addr.as_bytes()).u64(*n);
        }
        w.raw(self.history.as_bytes());
        w.finish()
    }

    pub fn from_canonical_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        r.format_id("state", STATE_FORMAT)?;
        if r.take(STATE_TAG.len(), "state tag")? != STATE_TAG {
            return Err(DecodeError::Invalid("state tag"));
        }
        let mut state = ChainState::new();
        for _ in 0..r.u32("seed count")? {
            let id_hash = r.digest("id_hash")?;
            let pk_seed = r.point("pk_seed")?;
            let zkp = Proof::from_bytes_unchecked(r.bytes("zkp")?);
            state.insert_seed(id_hash, SeedRecord { pk_seed, zkp });
        }
        let images = (0..r.u32("image count")?)
            .map(|_| r.point("key image"))
            .collect::<Result<Vec<_>, _>>()?;
        let souls = (0..r.u32("soul count")?)
            .map(|_| r.point("pk_soul"))
            .collect::<Result<Vec<_>, _>>()?;
        state.key_images.extend(images);
        state.soul_store.extend(souls);
        for _ in 0..r.u32("nonce count")? {
            let addr = r.address("address")?;
            let n = r.u64("nonce")?;
            state.next_nonce.insert(addr, n);
        }
        state.history = r.digest("history")?;
        r.finish()?;
        if state.canonical_bytes() != bytes {
            return Err(DecodeError::Invalid("non-canonical state encoding"));
        }
        Ok(state)
    }

    pub fn state_root(&self) -> Digest32 {
        digest(&self.canonical_bytes())
    }
}
