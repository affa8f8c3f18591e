//! Transaction pool, block production and replay.

use std::collections::{BTreeMap, HashMap, HashSet};

use zkbid_core::hash::Digest32;
use zkbid_core::Address;

use crate::block::{Block, Genesis};
use crate::codec::DecodeError;
use crate::contracts::{execute_tx, ExecContext, Receipt};
use crate::state::ChainState;
use crate::tx::Transaction;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("block {height} does not extend the chain")]
    BrokenLinkage { height: u64 },
    #[error("state root mismatch at height {height}")]
    StateRootMismatch { height: u64 },
    #[error("block {height} holds {count} transactions, capacity is {capacity}")]
    OverCapacity { height: u64, count: usize, capacity: usize },
    #[error("invalid genesis: {0}")]
    BadGenesis(String),
    #[error("decode: {0}")]
    Decode(#[from] DecodeError),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for ChainError {
    fn from(e: std::io::Error) -> Self {
        ChainError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct PoolKey {
    arrival: u64,
    sender: Address,
    seq: u64,
}

/// Pending transactions ordered by arrival time, then sender address, then
/// insertion sequence. Duplicate transactions are ignored.
#[derive(Debug, Clone, Default)]
pub struct TxPool {
    entries: BTreeMap<PoolKey, Transaction>,
    hashes: HashSet<Digest32>,
    seq: u64,
}

impl TxPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` if the transaction is already pending.
    pub fn insert(&mut self, tx: Transaction, arrival: u64) -> bool {
        if !self.hashes.insert(tx.hash()) {
            return false;
        }
        let key = PoolKey {
            arrival,
            sender: tx.sender,
            seq: self.seq,
        };
        self.seq += 1;
        self.entries.insert(key, tx);
        true
    }

    pub fn contains(&self, hash: &Digest32) -> bool {
        self.hashes.contains(hash)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transaction> {
        self.entries.values()
    }

    /// Removes and returns up to `n` transactions from the front.
    pub fn take_front(&mut self, n: usize) -> Vec<Transaction> {
        let mut out = Vec::with_capacity(n.min(self.entries.len()));
        while out.len() < n {
            let Some((_, tx)) = self.entries.pop_first() else {
                break;
            };
            self.hashes.remove(&tx.hash());
            out.push(tx);
        }
        out
    }

    /// Drops every pending transaction whose hash is in `included`.
    pub fn remove_included(&mut self, included: &HashSet<Digest32>) {
        self.entries.retain(|_, tx| !included.contains(&tx.hash()));
        self.hashes.retain(|h| !included.contains(h));
    }
}

/// Executes up to `capacity` transactions from the front of `pool` against
/// `state`. Rejected transactions are dropped with a receipt.
pub fn pack_block(
    pool: &mut TxPool,
    state: &mut ChainState,
    ctx: &ExecContext,
    capacity: usize,
    height: u64,
    parent_hash: Digest32,
) -> (Block, Vec<Receipt>) {
    let txs = pool.take_front(capacity);
    let receipts = execute_all(state, ctx, &txs, height);
    let block = Block {
        height,
        parent_hash,
        txs,
        state_root: state.state_root(),
    };
    (block, receipts)
}

fn execute_all(state: &mut ChainState, ctx: &ExecContext, txs: &[Transaction], height: u64) -> Vec<Receipt> {
    txs.iter()
        .enumerate()
        .map(|(i, tx)| {
            let (contract, status) = execute_tx(state, ctx, tx);
            Receipt {
                tx_hash: tx.hash(),
                height,
                index: i as u32,
                contract,
                sender: tx.sender,
                nonce: tx.nonce,
                status,
            }
        })
        .collect()
}

/// One node's view of the chain: genesis, blocks, current state, receipts.
#[derive(Debug, Clone)]
pub struct Chain {
    genesis: Genesis,
    genesis_hash: Digest32,
    ctx: ExecContext,
    blocks: Vec<Block>,
    head_hash: Digest32,
    state: ChainState,
    receipts: Vec<Receipt>,
    receipt_index: HashMap<Digest32, usize>,
}

impl Chain {
    pub fn new(genesis: Genesis) -> Result<Self, ChainError> {
        if genesis.block_capacity == 0 {
            return Err(ChainError::BadGenesis("block capacity must be positive".into()));
        }
        let ctx = genesis.exec_context().map_err(|e| ChainError::BadGenesis(e.to_string()))?;
        let genesis_hash = genesis.hash();
        Ok(Chain {
            genesis,
            genesis_hash,
            ctx,
            blocks: Vec::new(),
            head_hash: genesis_hash,
            state: ChainState::new(),
            receipts: Vec::new(),
            receipt_index: HashMap::new(),
        })
    }

    pub fn genesis(&self) -> &Genesis {
        &self.genesis
    }

    pub fn genesis_hash(&self) -> Digest32 {
        self.genesis_hash
    }

    pub fn capacity(&self) -> usize {
        self.genesis.block_capacity as usize
    }

    pub fn height(&self) -> u64 {
        self.blocks.len() as u64
    }

    pub fn head_hash(&self) -> Digest32 {
        self.head_hash
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn receipts(&self) -> &[Receipt] {
        &self.receipts
    }

    pub fn receipt(&self, tx_hash: &Digest32) -> Option<&Receipt> {
        self.receipt_index.get(tx_hash).map(|&i| &self.receipts[i])
    }

    pub fn is_included(&self, tx_hash: &Digest32) -> bool {
        self.receipt_index.contains_key(tx_hash)
    }

    fn commit(&mut self, block: Block, receipts: &[Receipt]) {
        self.head_hash = block.hash();
        self.blocks.push(block);
        for r in receipts {
            // A resubmitted identical tx keeps its first receipt.
            self.receipt_index.entry(r.tx_hash).or_insert(self.receipts.len());
            self.receipts.push(r.clone());
        }
    }

    /// Packs the next block from `pool` and appends it.
    pub fn produce_block(&mut self, pool: &mut TxPool) -> (Block, Vec<Receipt>) {
        let height = self.height() + 1;
        let capacity = self.capacity();
        let (block, receipts) = pack_block(pool, &mut self.state, &self.ctx, capacity, height, self.head_hash);
        self.commit(block.clone(), &receipts);
        (block, receipts)
    }

    /// Validates and appends a block produced elsewhere. The chain is left
    /// unchanged on error.
    pub fn apply_block(&mut self, block: &Block) -> Result<Vec<Receipt>, ChainError> {
        let height = self.height() + 1;
        if block.height != height || block.parent_hash != self.head_hash {
            return Err(ChainError::BrokenLinkage { height: block.height });
        }
        if block.txs.len() > self.capacity() {
            return Err(ChainError::OverCapacity {
                height,
                count: block.txs.len(),
                capacity: self.capacity(),
            });
        }
        let mut state = self.state.clone();
        let receipts = execute_all(&mut state, &self.ctx, &block.txs, height);
        if state.state_root() != block.state_root {
            return Err(ChainError::StateRootMismatch { height });
        }
        self.state = state;
        self.commit(block.clone(), &receipts);
        Ok(receipts)
    }
}

/// Re-executes `blocks` from genesis, checking linkage and every state root.
pub fn replay_chain(genesis: &Genesis, blocks: &[Block]) -> Result<Chain, ChainError> {
    let mut chain = Chain::new(genesis.clone())?;
    for b in blocks {
        chain.apply_block(b)?;
    }
    Ok(chain)
}
