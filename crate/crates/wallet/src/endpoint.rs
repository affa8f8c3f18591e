//! Chain endpoints the wallet talks to. Receipts are obtained by polling
//! until the transaction is included.

use std::path::{Path, PathBuf};

use zkbid_chain::store::{append_block, append_receipts, create_chain_file, load_chain_file};
use zkbid_chain::{replay_chain, Chain, ChainState, Genesis, Receipt, Transaction, TxPool};
use zkbid_core::hash::Digest32;
use zkbid_netsim::{SimError, Simulation};

use crate::error::WalletError;

pub trait Endpoint {
    fn submit(&mut self, tx: Transaction) -> Result<Digest32, WalletError>;
    /// Blocks (in real or simulated time) until `tx_hash` has a receipt.
    fn wait_receipt(&mut self, tx_hash: &Digest32) -> Result<Receipt, WalletError>;
    /// Snapshot of the current chain state.
    fn state(&self) -> Result<ChainState, WalletError>;
    fn height(&self) -> Result<u64, WalletError>;
}

/// Single-node development chain persisted in a directory. Pending
/// transactions are packed into a block when a receipt is awaited.
pub struct LocalNode {
    dir: PathBuf,
    chain: Chain,
    pool: TxPool,
}

impl LocalNode {
    pub fn chain_path(dir: &Path) -> PathBuf {
        dir.join("chain.bin")
    }

    pub fn receipts_path(dir: &Path) -> PathBuf {
        dir.join("receipts.jsonl")
    }

    pub fn create(dir: &Path, genesis: &Genesis) -> Result<(), WalletError> {
        std::fs::create_dir_all(dir)?;
        create_chain_file(&Self::chain_path(dir), genesis)?;
        Ok(())
    }

    /// Loads and fully replays the chain file.
    pub fn open(dir: &Path) -> Result<Self, WalletError> {
        let path = Self::chain_path(dir);
        if !path.exists() {
            return Err(WalletError::Endpoint(format!("no chain at {}", path.display())));
        }
        let (genesis, blocks) = load_chain_file(&path)?;
        let chain = replay_chain(&genesis, &blocks)?;
        Ok(LocalNode {
            dir: dir.to_path_buf(),
            chain,
            pool: TxPool::new(),
        })
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }
}

impl Endpoint for LocalNode {
    fn submit(&mut self, tx: Transaction) -> Result<Digest32, WalletError> {
        let h = tx.hash();
        let arrival = self.pool.len() as u64;
        self.pool.insert(tx, arrival);
        Ok(h)
    }

    fn wait_receipt(&mut self, tx_hash: &Digest32) -> Result<Receipt, WalletError> {
        while self.chain.receipt(tx_hash).is_none() {
            if !self.pool.contains(tx_hash) {
                return Err(WalletError::Endpoint("transaction is neither pending nor included".into()));
            }
            let (block, receipts) = self.chain.produce_block(&mut self.pool);
            append_block(&Self::chain_path(&self.dir), &block)?;
            append_receipts(&Self::receipts_path(&self.dir), &receipts)?;
        }
        Ok(self.chain.receipt(tx_hash).cloned().expect("checked above"))
    }

    fn state(&self) -> Result<ChainState, WalletError> {
        Ok(self.chain.state().clone())
    }

    fn height(&self) -> Result<u64, WalletError> {
        Ok(self.chain.height())
    }
}

/// One node of a running simulation. Waiting advances simulated time.
pub struct SimEndpoint<'a> {
    pub sim: &'a mut Simulation,
    pub node: usize,
    /// Simulated milliseconds to wait before giving up.
    pub timeout_ms: u64,
}

impl<'a> SimEndpoint<'a> {
    pub fn new(sim: &'a mut Simulation, node: usize) -> Self {
        let timeout_ms = 100 * sim.config().block_interval_ms;
        SimEndpoint { sim, node, timeout_ms }
    }
}

fn sim_err(e: SimError) -> WalletError {
    WalletError::Endpoint(e.to_string())
}

impl Endpoint for SimEndpoint<'_> {
    fn submit(&mut self, tx: Transaction) -> Result<Digest32, WalletError> {
        let h = tx.hash();
        self.sim.submit_tx(self.node, tx).map_err(sim_err)?;
        Ok(h)
    }

    fn wait_receipt(&mut self, tx_hash: &Digest32) -> Result<Receipt, WalletError> {
        let deadline = self.sim.now() + self.timeout_ms;
        loop {
            let node = self.sim.node(self.node).map_err(sim_err)?;
            if let Some(r) = node.chain().receipt(tx_hash) {
                return Ok(r.clone());
            }
            if self.sim.now() > deadline {
                return Err(WalletError::Endpoint("timed out waiting for receipt".into()));
            }
            if self.sim.step().map_err(sim_err)?.is_none() {
                return Err(WalletError::Endpoint("simulation has no pending events".into()));
            }
        }
    }

    fn state(&self) -> Result<ChainState, WalletError> {
        Ok(self.sim.node(self.node).map_err(sim_err)?.chain().state().clone())
    }

    fn height(&self) -> Result<u64, WalletError> {
        Ok(self.sim.node(self.node).map_err(sim_err)?.chain().height())
    }
}
