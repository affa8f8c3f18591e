//! On-disk wallet layout under `ZKBID_HOME`:
//!
//! ```text
//! setup/proving.key  setup/verifying.key  setup/threshold.json
//! node/chain.bin     node/receipts.jsonl
//! wallet/seed.json   wallet/features.json  wallet/reginfo.bin
//! wallet/soul.json   wallet/cerinfo.bin    wallet/receipts.jsonl
//! ```
//!
//! JSON files carry a `version` field. Files holding secret keys are created
//! with mode 0600 on Unix.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use zkbid_chain::{CerInfo, Receipt, RegInfo};
use zkbid_core::face::{FeatureVector, ThresholdConfig};
use zkbid_core::Account;
use zkbid_zk::{ProvingKey, VerificationKey};

use crate::error::WalletError;

pub const FILE_VERSION: u32 = 1;
pub const HOME_ENV: &str = "ZKBID_HOME";

#[derive(Serialize, Deserialize)]
struct Versioned<T> {
    version: u32,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize, Deserialize)]
struct AccountBody {
    account: Account,
}

#[derive(Serialize, Deserialize)]
struct FeatureBody {
    live: FeatureVector,
    card: FeatureVector,
}

#[derive(Serialize, Deserialize)]
struct ThresholdBody {
    threshold: ThresholdConfig,
}

#[derive(Debug, Clone)]
pub struct WalletStore {
    root: PathBuf,
}

impl WalletStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        WalletStore { root: root.into() }
    }

    /// `$ZKBID_HOME`, else `./.zkbid`.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(HOME_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".zkbid")))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn node_dir(&self) -> PathBuf {
        self.path("node")
    }

    pub fn exists(&self, rel: &str) -> bool {
        self.path(rel).exists()
    }

    fn write(&self, rel: &str, bytes: &[u8], secret: bool) -> Result<(), WalletError> {
        let path = self.path(rel);
        let dir = path.parent().expect("relative paths have a parent");
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{}.tmp", path.file_name().unwrap().to_string_lossy()));
        let mut opts = fs::OpenOptions::new();
        opts.write(true).create(true).truncate(true);
        #[cfg(unix)]
        if secret {
            use std::os::unix::fs::OpenOptionsExt;
            opts.mode(0o600);
        }
        #[cfg(not(unix))]
        let _ = secret;
        let mut f = opts.open(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    fn read(&self, rel: &str) -> Result<Vec<u8>, WalletError> {
        Ok(fs::read(self.path(rel))?)
    }

    fn corrupt(&self, rel: &str, reason: impl ToString) -> WalletError {
        WalletError::Corrupt {
            path: self.path(rel),
            reason: reason.to_string(),
        }
    }

    fn write_json<T: Serialize>(&self, rel: &str, body: T, secret: bool) -> Result<(), WalletError> {
        let v = Versioned {
            version: FILE_VERSION,
            body,
        };
        let text = serde_json::to_string_pretty(&v).expect("wallet files serialize");
        self.write(rel, text.as_bytes(), secret)
    }

    fn read_json<T: DeserializeOwned>(&self, rel: &str) -> Result<T, WalletError> {
        let bytes = self.read(rel)?;
        let v: Versioned<T> = serde_json::from_slice(&bytes).map_err(|e| self.corrupt(rel, e))?;
        if v.version != FILE_VERSION {
            return Err(self.corrupt(rel, format!("unsupported version {}", v.version)));
        }
        Ok(v.body)
    }

    // Setup artifacts.

    pub fn has_setup(&self) -> bool {
        self.exists("setup/verifying.key")
    }

    pub fn save_setup(&self, pk: &ProvingKey, vk: &VerificationKey, cfg: &ThresholdConfig) -> Result<(), WalletError> {
        self.write("setup/proving.key", &pk.to_bytes(), false)?;
        self.write("setup/verifying.key", &vk.to_bytes(), false)?;
        self.write_json("setup/threshold.json", ThresholdBody { threshold: *cfg }, false)
    }

    fn require_setup(&self) -> Result<(), WalletError> {
        if self.has_setup() {
            Ok(())
        } else {
            Err(WalletError::NotSetUp(self.root.clone()))
        }
    }

    pub fn proving_key(&self) -> Result<ProvingKey, WalletError> {
        self.require_setup()?;
        let rel = "setup/proving.key";
        ProvingKey::from_bytes(&self.read(rel)?).map_err(|e| self.corrupt(rel, e))
    }

    pub fn verifying_key(&self) -> Result<VerificationKey, WalletError> {
        self.require_setup()?;
        let rel = "setup/verifying.key";
        VerificationKey::from_bytes(&self.read(rel)?).map_err(|e| self.corrupt(rel, e))
    }

    pub fn threshold(&self) -> Result<ThresholdConfig, WalletError> {
        self.require_setup()?;
        Ok(self.read_json::<ThresholdBody>("setup/threshold.json")?.threshold)
    }

    // Seed side.

    pub fn has_seed(&self) -> bool {
        self.exists("wallet/seed.json")
    }

    /// Writes every enrollment artifact; the seed file goes last so that an
    /// interrupted write leaves the wallet looking unenrolled.
    pub fn save_enrollment(
        &self,
        seed: &Account,
        reg: &RegInfo,
        live: &FeatureVector,
        card: &FeatureVector,
    ) -> Result<(), WalletError> {
        self.write_json(
            "wallet/features.json",
            FeatureBody {
                live: live.clone(),
                card: card.clone(),
            },
            true,
        )?;
        self.write("wallet/reginfo.bin", &reg.encode(), false)?;
        self.write_json("wallet/seed.json", AccountBody { account: seed.clone() }, true)
    }

    pub fn seed(&self) -> Result<Account, WalletError> {
        if !self.has_seed() {
            return Err(WalletError::NotEnrolled);
        }
        Ok(self.read_json::<AccountBody>("wallet/seed.json")?.account)
    }

    pub fn reginfo(&self) -> Result<RegInfo, WalletError> {
        if !self.has_seed() {
            return Err(WalletError::NotEnrolled);
        }
        let rel = "wallet/reginfo.bin";
        RegInfo::decode(&self.read(rel)?).map_err(|e| self.corrupt(rel, e))
    }

    // Soul side.

    pub fn has_soul(&self) -> bool {
        self.exists("wallet/soul.json")
    }

    pub fn save_certification(&self, soul: &Account, cer: &CerInfo) -> Result<(), WalletError> {
        self.write("wallet/cerinfo.bin", &cer.encode(), false)?;
        self.write_json("wallet/soul.json", AccountBody { account: soul.clone() }, true)
    }

    pub fn soul(&self) -> Result<Option<Account>, WalletError> {
        if !self.has_soul() {
            return Ok(None);
        }
        Ok(Some(self.read_json::<AccountBody>("wallet/soul.json")?.account))
    }

    pub fn cerinfo(&self) -> Result<Option<CerInfo>, WalletError> {
        let rel = "wallet/cerinfo.bin";
        if !self.exists(rel) {
            return Ok(None);
        }
        CerInfo::decode(&self.read(rel)?).map(Some).map_err(|e| self.corrupt(rel, e))
    }

    // Receipts.

    pub fn append_receipt(&self, r: &Receipt) -> Result<(), WalletError> {
        fs::create_dir_all(self.path("wallet"))?;
        Ok(zkbid_chain::store::append_receipts(&self.path("wallet/receipts.jsonl"), std::slice::from_ref(r))?)
    }

    pub fn receipts(&self) -> Result<Vec<Receipt>, WalletError> {
        Ok(zkbid_chain::store::load_receipts(&self.path("wallet/receipts.jsonl"))?)
    }
}
