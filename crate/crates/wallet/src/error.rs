use std::path::PathBuf;

use zkbid_chain::{CertifyError, ChainError, EnrollError, ReceiptError};
use zkbid_core::face::FaceError;

#[derive(Debug, thiserror::Error)]
pub enum WalletError {
    #[error("no setup found at {0}; run `zkbid setup` first")]
    NotSetUp(PathBuf),
    #[error("setup already exists at {0}")]
    AlreadySetUp(PathBuf),
    #[error("no enrollment in this wallet; run `zkbid enroll` first")]
    NotEnrolled,
    #[error("this wallet already holds a seed account")]
    AlreadyEnrolled,
    #[error("seed account is not registered on chain")]
    NotRegistered,
    #[error("bad input: {0}")]
    Input(String),
    #[error(transparent)]
    Face(#[from] FaceError),
    #[error(transparent)]
    Enroll(#[from] EnrollError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error("transaction rejected: {0}")]
    Rejected(ReceiptError),
    #[error("endpoint: {0}")]
    Endpoint(String),
    #[error("wallet file {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ChainError> for WalletError {
    fn from(e: ChainError) -> Self {
        WalletError::Endpoint(e.to_string())
    }
}

/// Process exit status for each error class. `2` is left to argument
/// parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Input = 3,
    Rejected = 4,
    AnonymitySet = 5,
    WalletState = 6,
    Endpoint = 7,
    Prover = 8,
}

impl WalletError {
    pub fn class(&self) -> ExitClass {
        use WalletError::*;
        match self {
            Input(_) | Face(_) => ExitClass::Input,
            Enroll(EnrollError::ProverFailure(_)) => ExitClass::Prover,
            Enroll(_) => ExitClass::Input,
            Certify(CertifyError::InsufficientAnonymitySet { .. }) => ExitClass::AnonymitySet,
            Certify(_) => ExitClass::WalletState,
            Rejected(_) => ExitClass::Rejected,
            NotSetUp(_) | AlreadySetUp(_) | NotEnrolled | AlreadyEnrolled | NotRegistered | Corrupt { .. } => {
                ExitClass::WalletState
            }
            Endpoint(_) | Io(_) => ExitClass::Endpoint,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class() as i32
    }
}
