//! Genesis parameters and hash-linked blocks.

use zkbid_core::hash::{digest, digest_parts, Digest32};
use zkbid_zk::VerificationKey;

use crate::codec::{DecodeError, Reader, Writer};
use crate::contracts::ExecContext;
use crate::tx::Transaction;

pub const GENESIS_FORMAT: u16 = 0x0301;
pub const BLOCK_FORMAT: u16 = 0x0302;
pub const DEFAULT_BLOCK_CAPACITY: usize = 50;

/// Deployed verification key and contract parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genesis {
    pub vk: Vec<u8>,
    pub tau_fixed: i64,
    pub eps_norm: i64,
    pub block_capacity: u32,
}

impl Genesis {
    pub fn new(vk: &VerificationKey, cfg: &zkbid_core::ThresholdConfig, block_capacity: usize) -> Self {
        Genesis {
            vk: vk.to_bytes(),
            tau_fixed: cfg.tau_fixed,
            eps_norm: cfg.eps_norm,
            block_capacity: block_capacity as u32,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u16(GENESIS_FORMAT)
            .bytes(&self.vk)
            .i64(self.tau_fixed)
            .i64(self.eps_norm)
            .u32(self.block_capacity);
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        r.format_id("genesis", GENESIS_FORMAT)?;
        let g = Genesis {
            vk: r.bytes("vk")?.to_vec(),
            tau_fixed: r.i64("tau_fixed")?,
            eps_norm: r.i64("eps_norm")?,
            block_capacity: r.u32("block capacity")?,
        };
        r.finish()?;
        if g.block_capacity == 0 {
            return Err(DecodeError::Invalid("block capacity"));
        }
        Ok(g)
    }

    pub fn hash(&self) -> Digest32 {
        digest(&self.encode())
    }

    pub fn exec_context(&self) -> Result<ExecContext, zkbid_zk::ZkError> {
        Ok(ExecContext {
            vk: VerificationKey::from_bytes(&self.vk)?,
            tau_fixed: self.tau_fixed,
            eps_norm: self.eps_norm,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub height: u64,
    pub parent_hash: Digest32,
    pub txs: Vec<Transaction>,
    pub state_root: Digest32,
}

impl Block {
    pub fn tx_root(&self) -> Digest32 {
        let hashes: Vec<Digest32> = self.txs.iter().map(Transaction::hash).collect();
        let parts: Vec<&[u8]> = hashes.iter().map(|h| &h.0[..]).collect();
        digest_parts(&parts)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u16(BLOCK_FORMAT)
            .u64(self.height)
            .raw(self.parent_hash.as_bytes())
            .u32(self.txs.len() as u32);
        for tx in &self.txs {
            w.bytes(&tx.encode());
        }
        w.raw(self.state_root.as_bytes());
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        r.format_id("block", BLOCK_FORMAT)?;
        let height = r.u64("height")?;
        let parent_hash = r.digest("parent hash")?;
        let n = r.u32("tx count")? as usize;
        let mut txs = Vec::with_capacity(n.min(1024));
        for _ in 0..n {
            txs.push(Transaction::decode(r.bytes("transaction")?)?);
        }
        let state_root = r.digest("state root")?;
        r.finish()?;
        Ok(Block {
            height,
            parent_hash,
            txs,
            state_root,
        })
    }

    pub fn hash(&self) -> Digest32 {
        digest(&self.encode())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use zkbid_core::Account;

    #[test]
    fn block_round_trip_and_mutation() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let a = Account::generate(&mut rng);
        let tx = Transaction::new_signed(&a, a.address(), 4, vec![1, 2, 3], &mut rng);
        let b = Block {
            height: 3,
            parent_hash: digest(b"p"),
            txs: vec![tx.clone(), tx],
            state_root: digest(b"s"),
        };
        let enc = b.encode();
        assert_eq!(Block::decode(&enc).unwrap(), b);
        for i in 0..enc.len() {
            let mut m = enc.clone();
            m[i] ^= 0x01;
            if let Ok(d) = Block::decode(&m) {
                assert_ne!(d.hash(), b.hash());
            }
        }
    }

    #[test]
    fn genesis_round_trip() {
        let g = Genesis {
            vk: vec![9; 10],
            tau_fixed: -5,
            eps_norm: 1 << 20,
            block_capacity: 50,
        };
        assert_eq!(Genesis::decode(&g.encode()).unwrap(), g);
        let mut zero = g.clone();
        zero.block_capacity = 0;
        assert!(Genesis::decode(&zero.encode()).is_err());
    }
}
