use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::rngs::OsRng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use zkbid_chain::Genesis;
use zkbid_core::dataset::{accuracy_sweep, generate_synthetic_dataset, sweep_to_csv, DatasetParams};
use zkbid_core::face::{RawFeatures, ThresholdConfig, DEFAULT_EPS_NORM, DEFAULT_THRESHOLD};
use zkbid_core::lrs::{RingConfig, DEFAULT_RING_SIZE};
use zkbid_netsim::{concurrency_sweep, prepare_users, reports_to_csv, reports_to_dat, SimConfig};
use zkbid_wallet::bench::{crypto_timings, timings_table};
use zkbid_wallet::{ops, IdentityInput, LocalNode, WalletError, WalletStore};

#[derive(Parser)]
#[command(name = "zkbid", version, about = "Seed/soul account wallet over a local or simulated chain")]
struct Cli {
    /// Wallet directory.
    #[arg(long, global = true, env = "ZKBID_HOME")]
    home: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate proving/verification keys and a local chain.
    Setup {
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        tau: f64,
        #[arg(long, default_value_t = DEFAULT_EPS_NORM)]
        eps_norm: i64,
        /// Deterministic key generation (testing only).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare faces, prove, and create the seed account.
    Enroll {
        #[arg(long)]
        id: String,
        #[arg(long)]
        live: PathBuf,
        #[arg(long)]
        card: PathBuf,
    },
    /// Submit the registration transaction.
    Register,
    /// Create and certify a soul account.
    Certify {
        #[arg(long, default_value_t = DEFAULT_RING_SIZE)]
        ring_size: usize,
    },
    /// Registry counts and chain height.
    Status {
        #[arg(long)]
        json: bool,
    },
    /// Operation timings and the simulated concurrency curve.
    Bench(BenchArgs),
    /// Face-match accuracy against threshold on synthetic data.
    Sweep {
        #[arg(long, default_value_t = 500)]
        subjects: usize,
        #[arg(long, default_value_t = 2)]
        per_subject: usize,
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 500)]
    users: usize,
    #[arg(long, default_value_t = 6)]
    nodes: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RING_SIZE)]
    ring_size: usize,
    /// User counts to simulate; defaults to a curve up to `--users`.
    #[arg(long, value_delimiter = ',')]
    counts: Vec<usize>,
    /// JSON or TOML simulation config; `--nodes` and `--seed` override it.
    #[arg(long)]
    sim_config: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 3)]
    proof_reps: usize,
    #[arg(long)]
    skip_timings: bool,
    /// Directory for `latency.csv` and `latency.dat`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_features(path: &Path) -> Result<RawFeatures, WalletError> {
    let text = std::fs::read_to_string(path).map_err(|e| WalletError::Input(format!("{}: {e}", path.display())))?;
    Ok(RawFeatures::from_json(&text)?)
}

fn run(cli: Cli) -> Result<i32, WalletError> {
    let store = cli.home.map(WalletStore::new).unwrap_or_else(WalletStore::from_env);
    match cli.cmd {
        Cmd::Setup { tau, eps_norm, seed } => {
            let cfg = ThresholdConfig::new(tau)?.with_eps_norm(eps_norm)?;
            match seed {
                Some(s) => ops::setup(&store, &cfg, &mut ChaCha20Rng::seed_from_u64(s))?,
                None => ops::setup(&store, &cfg, &mut OsRng)?,
            };
            println!("setup written to {}", store.root().display());
        }
        Cmd::Enroll { id, live, card } => {
            let input = IdentityInput {
                id_number: id,
                live: read_features(&live)?,
                card: read_features(&card)?,
            };
            let e = ops::enroll(&store, &input, &mut OsRng)?;
            println!("enrolled; seed address {}", e.seed.address().to_hex());
        }
        Cmd::Register => {
            let mut node = LocalNode::open(&store.node_dir())?;
            let r = ops::register(&store, &mut node, &mut OsRng)?;
            println!("{}", serde_json::to_string(&r).expect("receipt serializes"));
            if let Some(e) = r.error() {
                return Err(WalletError::Rejected(e));
            }
        }
        Cmd::Certify { ring_size } => {
            let mut node = LocalNode::open(&store.node_dir())?;
            let out = ops::certify(&store, &mut node, RingConfig { ring_size }, &mut OsRng)?;
            println!("{}", serde_json::to_string(&out.receipt).expect("receipt serializes"));
            match out.receipt.error() {
                Some(e) => return Err(WalletError::Rejected(e)),
                None => println!("soul address {}", out.soul.address().to_hex()),
            }
        }
        Cmd::Status { json } => {
            let node = LocalNode::open(&store.node_dir())?;
            let s = ops::status(&node)?;
            if json {
                println!("{}", serde_json::to_string(&s).expect("status serializes"));
            } else {
                println!("height        {}", s.height);
                println!("seed accounts {}", s.seed_accounts);
                println!("soul accounts {}", s.soul_accounts);
                println!("key images    {}", s.key_images);
            }
        }
        Cmd::Bench(args) => bench(&store, args)?,
        Cmd::Sweep {
            subjects,
            per_subject,
            noise,
            seed,
            out,
        } => {
            let data = generate_synthetic_dataset(DatasetParams {
                n_subjects: subjects,
                per_subject,
                intra_noise: noise,
                seed,
            })?;
            let thresholds: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
            let csv = sweep_to_csv(&accuracy_sweep(&data, &thresholds)?);
            match out {
                Some(p) => std::fs::write(p, csv)?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(0)
}

fn bench(store: &WalletStore, args: BenchArgs) -> Result<(), WalletError> {
    let cfg = if store.has_setup() { store.threshold()? } else { ThresholdConfig::default() };
    let (pk, vk) = if store.has_setup() {
        (store.proving_key()?, store.verifying_key()?)
    } else {
        eprintln!("no setup found; generating throwaway keys");
        zkbid_zk::keygen(zkbid_zk::facematch_circuit(), &mut ChaCha20Rng::seed_from_u64(args.seed))
    };

    if !args.skip_timings {
        let rows = crypto_timings(&pk, &cfg, args.ring_size, args.reps, args.proof_reps, args.seed)?;
        print!("{}", timings_table(&rows));
    }

    let mut sim_cfg = match &args.sim_config {
        Some(p) => SimConfig::load(p).map_err(|e| WalletError::Input(e.to_string()))?,
        None => SimConfig::default(),
    };
    sim_cfg.n_nodes = args.nodes;
    sim_cfg.rng_seed = args.seed;
    sim_cfg.validate().map_err(|e| WalletError::Input(e.to_string()))?;

    let counts = if args.counts.is_empty() {
        let mut c: Vec<usize> = [1, 10, 20, 30, 40, 50, 100, 200, 300, 400, 500]
            .into_iter()
            .filter(|&n| n < args.users)
            .collect();
        c.push(args.users);
        c
    } else {
        args.counts.clone()
    };
    let max = counts.iter().copied().max().unwrap_or(0);
    eprintln!("preparing {max} users");
    let users = prepare_users(&pk, &cfg, max, args.seed)?;
    let genesis = Genesis::new(&vk, &cfg, sim_cfg.block_capacity);
    let reports = concurrency_sweep(&sim_cfg, &genesis, &users, &counts, RingConfig {
        ring_size: args.ring_size,
    })
    .map_err(|e| WalletError::Endpoint(e.to_string()))?;
    let csv = reports_to_csv(&reports);
    print!("{csv}");
    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("latency.csv"), csv)?;
        std::fs::write(dir.join("latency.dat"), reports_to_dat(&reports))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
