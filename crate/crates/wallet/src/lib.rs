//! User-side orchestration: wallet storage, chain endpoints, and the
//! enroll / register / certify / status steps behind the `zkbid` tool.

pub mod bench;
pub mod endpoint;
pub mod error;
pub mod ops;
pub mod store;

pub use endpoint::{Endpoint, LocalNode, SimEndpoint};
pub use error::{ExitClass, WalletError};
pub use ops::{certify, enroll, install_setup, register, setup, status, CertifyOutcome, IdentityInput, StatusReport};
pub use store::WalletStore;
