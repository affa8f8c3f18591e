//! Discrete-event simulation of `n` nodes with flooding gossip and a
//! round-robin proposer.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use zkbid_chain::{Block, Chain, ChainError, Genesis, Receipt, Transaction, TxPool};
use zkbid_core::hash::{digest_parts, Digest32};

use crate::config::{ConfigError, SimConfig};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no node with index {0}")]
    UnknownNode(usize),
    #[error("genesis rejected: {0}")]
    Genesis(ChainError),
    #[error("node {node} rejected block {height}: {source}")]
    BlockRejected { node: usize, height: u64, source: ChainError },
    #[error("proposer {node} is at height {have}, expected {want}")]
    ProposerBehind { node: usize, have: u64, want: u64 },
    #[error("predicate not reached within {0} events")]
    Timeout(u64),
    #[error("user {user}: {what}")]
    UserFailed { user: usize, what: String },
}

/// Tie order at equal timestamps: blocks, then transactions, then production.
#[derive(Debug, Clone)]
enum Event {
    BlockDeliver { to: usize, block: Arc<Block> },
    TxDeliver { to: usize, tx: Arc<Transaction> },
    Produce,
}

impl Event {
    fn rank(&self) -> u8 {
        match self {
            Event::BlockDeliver { .. } => 0,
            Event::TxDeliver { .. } => 1,
            Event::Produce => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    chain: Chain,
    pool: TxPool,
    seen_txs: HashSet<Digest32>,
    seen_blocks: HashSet<Digest32>,
    pending_blocks: BTreeMap<u64, Arc<Block>>,
}

impl Node {
    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn pool(&self) -> &TxPool {
        &self.pool
    }
}

/// Where and when a transaction first landed in a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inclusion {
    pub time_ms: u64,
    pub receipt: Receipt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Until {
    /// Every pool is empty and no transaction is in flight.
    PoolsEmpty,
    /// Every node has at least this many blocks.
    Height(u64),
    /// Simulated clock reaches this time.
    Time(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub time_ms: u64,
    pub height: u64,
    pub events: u64,
}

pub struct Simulation {
    cfg: SimConfig,
    links: Vec<Vec<usize>>,
    nodes: Vec<Node>,
    queue: BTreeMap<(u64, u8, u64), Event>,
    seq: u64,
    now: u64,
    jitter: ChaCha20Rng,
    produced: u64,
    tx_in_flight: usize,
    inclusions: HashMap<Digest32, Inclusion>,
    trace: Digest32,
    events: u64,
}

/// Builds `cfg.n_nodes` nodes on the same genesis and schedules the first
/// block production one interval from now.
pub fn spawn_network(cfg: SimConfig, genesis: Genesis) -> Result<Simulation, SimError> {
    cfg.validate()?;
    if genesis.block_capacity as usize != cfg.block_capacity {
        return Err(ConfigError::Invalid(format!(
            "genesis capacity {} differs from config capacity {}",
            genesis.block_capacity, cfg.block_capacity
        ))
        .into());
    }
    let chain = Chain::new(genesis).map_err(SimError::Genesis)?;
    let node = Node {
        chain,
        pool: TxPool::new(),
        seen_txs: HashSet::new(),
        seen_blocks: HashSet::new(),
        pending_blocks: BTreeMap::new(),
    };
    let mut sim = Simulation {
        links: cfg.topology.links(cfg.n_nodes),
        nodes: vec![node; cfg.n_nodes],
        queue: BTreeMap::new(),
        seq: 0,
        now: 0,
        jitter: ChaCha20Rng::seed_from_u64(cfg.rng_seed),
        produced: 0,
        tx_in_flight: 0,
        inclusions: HashMap::new(),
        trace: Digest32([0; 32]),
        events: 0,
        cfg,
    };
    sim.schedule(sim.cfg.block_interval_ms, Event::Produce);
    Ok(sim)
}

impl Simulation {
    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> Result<&Node, SimError> {
        self.nodes.get(i).ok_or(SimError::UnknownNode(i))
    }

    pub fn links(&self) -> &[Vec<usize>] {
        &self.links
    }

    /// Removes every link touching `node`.
    pub fn isolate(&mut self, node: usize) -> Result<(), SimError> {
        self.node(node)?;
        self.links[node].clear();
        for l in &mut self.links {
            l.retain(|&j| j != node);
        }
        Ok(())
    }

    /// Lowest height across nodes.
    pub fn height(&self) -> u64 {
        self.nodes.iter().map(|n| n.chain.height()).min().unwrap_or(0)
    }

    pub fn blocks_produced(&self) -> u64 {
        self.produced
    }

    pub fn inclusion(&self, tx_hash: &Digest32) -> Option<&Inclusion> {
        self.inclusions.get(tx_hash)
    }

    /// Running digest over every processed event.
    pub fn trace_digest(&self) -> Digest32 {
        self.trace
    }

    pub fn events_processed(&self) -> u64 {
        self.events
    }

    /// True iff every node holds the same head block and state root.
    pub fn converged(&self) -> bool {
        let first = &self.nodes[0].chain;
        self.nodes
            .iter()
            .all(|n| n.chain.head_hash() == first.head_hash() && n.chain.state().state_root() == first.state().state_root())
    }

    fn schedule(&mut self, at: u64, ev: Event) {
        if matches!(ev, Event::TxDeliver { .. }) {
            self.tx_in_flight += 1;
        }
        self.queue.insert((at, ev.rank(), self.seq), ev);
        self.seq += 1;
    }

    fn link_delay(&mut self) -> u64 {
        let l = self.cfg.latency;
        l.base_ms + self.jitter.gen_range(0..=l.jitter_ms)
    }

    fn gossip_tx(&mut self, from: usize, tx: &Arc<Transaction>) {
        for j in self.links[from].clone() {
            let at = self.now + self.link_delay();
            self.schedule(at, Event::TxDeliver { to: j, tx: tx.clone() });
        }
    }

    fn gossip_block(&mut self, from: usize, block: &Arc<Block>) {
        for j in self.links[from].clone() {
            let at = self.now + self.link_delay();
            self.schedule(at, Event::BlockDeliver {
                to: j,
                block: block.clone(),
            });
        }
    }

    fn note(&mut self, kind: u8, node: usize, id: &Digest32) {
        let mut rec = [0u8; 17];
        rec[..8].copy_from_slice(&self.now.to_be_bytes());
        rec[8] = kind;
        rec[9..].copy_from_slice(&(node as u64).to_be_bytes());
        self.trace = digest_parts(&[self.trace.as_bytes(), &rec, id.as_bytes()]);
    }

    fn accept_tx(&mut self, node: usize, tx: Arc<Transaction>) -> bool {
        let h = tx.hash();
        let n = &mut self.nodes[node];
        if !n.seen_txs.insert(h) {
            return false;
        }
        n.pool.insert((*tx).clone(), self.now);
        self.gossip_tx(node, &tx);
        true
    }

    /// Puts `tx` into `node`'s pool at the current time and starts gossip.
    /// Returns `false` for a transaction the node has already seen.
    pub fn submit_tx(&mut self, node: usize, tx: Transaction) -> Result<bool, SimError> {
        self.node(node)?;
        let h = tx.hash();
        self.note(3, node, &h);
        Ok(self.accept_tx(node, Arc::new(tx)))
    }

    fn after_apply(&mut self, node: usize, block: &Block) {
        let hashes: HashSet<Digest32> = block.txs.iter().map(Transaction::hash).collect();
        let n = &mut self.nodes[node];
        n.pool.remove_included(&hashes);
        n.seen_txs.extend(hashes);
    }

    fn receive_block(&mut self, node: usize, block: Arc<Block>) -> Result<Vec<(usize, u64)>, SimError> {
        let mut applied = Vec::new();
        if !self.nodes[node].seen_blocks.insert(block.hash()) {
            return Ok(applied);
        }
        self.gossip_block(node, &block);
        if block.height <= self.nodes[node].chain.height() {
            return Ok(applied);
        }
        self.nodes[node].pending_blocks.insert(block.height, block);
        loop {
            let next = self.nodes[node].chain.height() + 1;
            let Some(b) = self.nodes[node].pending_blocks.remove(&next) else {
                break;
            };
            self.nodes[node].chain.apply_block(&b).map_err(|source| SimError::BlockRejected {
                node,
                height: next,
                source,
            })?;
            self.after_apply(node, &b);
            applied.push((node, next));
        }
        Ok(applied)
    }

    fn produce(&mut self) -> Result<Vec<(usize, u64)>, SimError> {
        let next_at = self.now + self.cfg.block_interval_ms;
        self.schedule(next_at, Event::Produce);
        let p = (self.produced % self.cfg.n_nodes as u64) as usize;
        if self.nodes[p].pool.is_empty() && !self.cfg.produce_empty_blocks {
            return Ok(Vec::new());
        }
        let have = self.nodes[p].chain.height();
        if have != self.produced {
            return Err(SimError::ProposerBehind {
                node: p,
                have,
                want: self.produced,
            });
        }
        let n = &mut self.nodes[p];
        let (block, receipts) = n.chain.produce_block(&mut n.pool);
        let height = block.height;
        self.produced += 1;
        for r in receipts {
            self.inclusions.entry(r.tx_hash).or_insert(Inclusion {
                time_ms: self.now,
                receipt: r,
            });
        }
        self.after_apply(p, &block);
        let block = Arc::new(block);
        self.nodes[p].seen_blocks.insert(block.hash());
        self.note(2, p, &block.hash());
        self.gossip_block(p, &block);
        Ok(vec![(p, height)])
    }

    /// Processes the earliest event. Returns the `(node, height)` pairs of
    /// blocks applied, or `None` if the queue is empty.
    pub fn step(&mut self) -> Result<Option<Vec<(usize, u64)>>, SimError> {
        let Some(((at, _, _), ev)) = self.queue.pop_first() else {
            return Ok(None);
        };
        debug_assert!(at >= self.now);
        self.now = at;
        self.events += 1;
        let applied = match ev {
            Event::BlockDeliver { to, block } => {
                self.note(0, to, &block.hash());
                self.receive_block(to, block)?
            }
            Event::TxDeliver { to, tx } => {
                self.tx_in_flight -= 1;
                self.note(1, to, &tx.hash());
                self.accept_tx(to, tx);
                Vec::new()
            }
            Event::Produce => self.produce()?,
        };
        Ok(Some(applied))
    }

    fn reached(&self, until: Until) -> bool {
        match until {
            Until::PoolsEmpty => self.tx_in_flight == 0 && self.nodes.iter().all(|n| n.pool.is_empty()),
            Until::Height(h) => self.height() >= h,
            Until::Time(t) => self.now >= t,
        }
    }

    pub fn run_until(&mut self, until: Until) -> Result<RunSummary, SimError> {
        let budget = self.cfg.max_events;
        let mut used = 0u64;
        while !self.reached(until) {
            if let Until::Time(t) = until {
                if self.queue.first_key_value().map_or(true, |((at, _, _), _)| *at > t) {
                    self.now = t;
                    break;
                }
            }
            if used >= budget {
                return Err(SimError::Timeout(budget));
            }
            if self.step()?.is_none() {
                return Err(SimError::Timeout(used));
            }
            used += 1;
        }
        Ok(RunSummary {
            time_ms: self.now,
            height: self.height(),
            events: used,
        })
    }
}
