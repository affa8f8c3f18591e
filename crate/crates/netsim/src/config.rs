use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid simulation config: {0}")]
    Invalid(String),
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("cannot parse config: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    FullyConnected,
    Ring,
    /// Node 0 is the hub.
    Star,
}

impl Topology {
    /// Sorted neighbor lists.
    pub fn links(self, n: usize) -> Vec<Vec<usize>> {
        (0..n)
            .map(|i| {
                let mut v: Vec<usize> = match self {
                    Topology::FullyConnected => (0..n).filter(|&j| j != i).collect(),
                    Topology::Ring => [(i + 1) % n, (i + n - 1) % n].into_iter().filter(|&j| j != i).collect(),
                    Topology::Star if i == 0 => (1..n).collect(),
                    Topology::Star => vec![0],
                };
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    }

    /// Longest shortest path, in hops.
    pub fn diameter(self, n: usize) -> usize {
        match (self, n) {
            (_, 0 | 1) => 0,
            (_, 2) => 1,
            (Topology::FullyConnected, _) => 1,
            (Topology::Ring, _) => n / 2,
            (Topology::Star, _) => 2,
        }
    }
}

/// Per-link delay: `base_ms` plus a uniform draw from `0..=jitter_ms`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatencyModel {
    pub base_ms: u64,
    pub jitter_ms: u64,
}

impl LatencyModel {
    pub fn max_ms(&self) -> u64 {
        self.base_ms.saturating_add(self.jitter_ms)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n_nodes: usize,
    pub topology: Topology,
    pub block_interval_ms: u64,
    pub block_capacity: usize,
    pub rng_seed: u64,
    pub latency: LatencyModel,
    pub produce_empty_blocks: bool,
    /// Events a single `run_until` call may process before giving up.
    pub max_events: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_nodes: 6,
            topology: Topology::FullyConnected,
            block_interval_ms: 15_000,
            block_capacity: zkbid_chain::DEFAULT_BLOCK_CAPACITY,
            rng_seed: 0,
            latency: LatencyModel {
                base_ms: 50,
                jitter_ms: 50,
            },
            produce_empty_blocks: true,
            max_events: 50_000_000,
        }
    }
}

impl SimConfig {
    /// Blocks must reach every node before the next proposer's turn, so the
    /// worst-case flood time has to fit inside one block interval.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_nodes == 0 {
            return Err(ConfigError::Invalid("n_nodes must be at least 1".into()));
        }
        if self.block_interval_ms == 0 {
            return Err(ConfigError::Invalid("block_interval_ms must be positive".into()));
        }
        if self.block_capacity == 0 || self.block_capacity > u32::MAX as usize {
            return Err(ConfigError::Invalid("block_capacity out of range".into()));
        }
        if self.max_events == 0 {
            return Err(ConfigError::Invalid("max_events must be positive".into()));
        }
        let flood = (self.topology.diameter(self.n_nodes) as u64).saturating_mul(self.latency.max_ms());
        if flood >= self.block_interval_ms {
            return Err(ConfigError::Invalid(format!(
                "worst-case propagation {flood} ms does not fit in block interval {} ms",
                self.block_interval_ms
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Chooses the parser by extension: `.toml`, anything else is JSON.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml(&text),
            _ => Self::from_json(&text),
        }
    }
}
