//! Deterministic single-writer chain: transactions, 50-transaction blocks,
//! a transaction pool, and the identity-auth / soul-cert contracts.

pub mod block;
pub mod chain;
pub mod client;
pub mod codec;
pub mod contracts;
pub mod privacy;
pub mod state;
pub mod store;
pub mod tx;

pub use block::{Block, Genesis, DEFAULT_BLOCK_CAPACITY};
pub use client::{certify, enroll, CertifyError, Certification, EnrollError, Enrollment};
pub use chain::{pack_block, replay_chain, Chain, ChainError, TxPool};
pub use contracts::{exec_identity_auth, exec_soul_cert, ContractKind, ExecContext, Receipt, ReceiptError};
pub use state::{ChainState, StoreCounts};
pub use tx::{build_certification_tx, build_registration_tx, identity_hash, CerInfo, RegInfo, Transaction, TxError};
