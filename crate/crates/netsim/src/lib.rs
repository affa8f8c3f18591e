//! Deterministic multi-node network simulation over `zkbid-chain`, with
//! tx gossip, round-robin block production and the concurrency benchmark.

pub mod bench;
pub mod config;
pub mod sim;

pub use bench::{
    concurrency_sweep, linear_fit, measure_iaac_latency, prepare_users, reports_to_csv, reports_to_dat,
    synthetic_identity, LatencyReport, SyntheticIdentity,
};
pub use config::{ConfigError, LatencyModel, SimConfig, Topology};
pub use sim::{spawn_network, Inclusion, Node, RunSummary, SimError, Simulation, Until};
