//! The concurrency benchmark: many users run registration and then
//! certification against one simulated network.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use zkbid_chain::{build_certification_tx, build_registration_tx, certify, enroll, EnrollError, Enrollment, Genesis};
use zkbid_core::face::{normalize_features, FeatureVector, ThresholdConfig, FEATURE_DIM};
use zkbid_core::hash::Digest32;
use zkbid_core::lrs::RingConfig;
use zkbid_zk::ProvingKey;

use crate::config::SimConfig;
use crate::sim::{spawn_network, SimError, Simulation};

fn gaussian_unit<R: Rng>(rng: &mut R) -> Vec<f64> {
    (0..FEATURE_DIM).map(|_| StandardNormal.sample(rng)).collect()
}

/// A synthetic person: ID string and a live/card capture pair of one face.
#[derive(Debug, Clone)]
pub struct SyntheticIdentity {
    pub id_number: String,
    pub live: FeatureVector,
    pub card: FeatureVector,
}

/// `noise` is the RMS length of the perturbation between the two captures.
pub fn synthetic_identity<R: Rng>(index: usize, noise: f64, rng: &mut R) -> SyntheticIdentity {
    let face = gaussian_unit(rng);
    let norm = face.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sigma = noise / (face.len() as f64).sqrt();
    let perturb = gaussian_unit(rng);
    let card: Vec<f64> = face.iter().zip(&perturb).map(|(f, p)| f / norm + sigma * p).collect();
    SyntheticIdentity {
        id_number: format!("SIM-{index:06}"),
        live: normalize_features(&face).expect("gaussian vector is nonzero"),
        card: normalize_features(&card).expect("perturbed vector is nonzero"),
    }
}

/// Enrolls `n` synthetic users in parallel. User `i` draws from stream `i`
/// of a generator seeded with `seed`, so the result is independent of
/// thread scheduling.
pub fn prepare_users(
    pk: &ProvingKey,
    cfg: &ThresholdConfig,
    n: usize,
    seed: u64,
) -> Result<Vec<Enrollment>, EnrollError> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let ident = synthetic_identity(i, 0.05, &mut rng);
            enroll(&ident.id_number, &ident.live, &ident.card, pk, cfg, &mut rng)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub n_users: usize,
    /// Registration submission to certification inclusion, per user.
    pub per_user_ms: Vec<u64>,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub max_ms: u64,
    /// Blocks produced between the start of the run and the last inclusion.
    pub blocks: u64,
    pub registration_blocks: u64,
    pub certification_blocks: u64,
}

impl LatencyReport {
    fn from_times(n_users: usize, mut per_user_ms: Vec<u64>, blocks: u64, reg: u64, cert: u64) -> Self {
        let mean_ms = per_user_ms.iter().sum::<u64>() as f64 / n_users.max(1) as f64;
        let mut sorted = per_user_ms.clone();
        sorted.sort_unstable();
        let median_ms = match sorted.len() {
            0 => 0.0,
            l if l % 2 == 1 => sorted[l / 2] as f64,
            l => (sorted[l / 2 - 1] + sorted[l / 2]) as f64 / 2.0,
        };
        per_user_ms.shrink_to_fit();
        LatencyReport {
            n_users,
            max_ms: sorted.last().copied().unwrap_or(0),
            per_user_ms,
            mean_ms,
            median_ms,
            blocks,
            registration_blocks: reg,
            certification_blocks: cert,
        }
    }
}

pub const CSV_HEADER: &str = "n_users,mean_ms,max_ms,blocks";

pub fn reports_to_csv(reports: &[LatencyReport]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in reports {
        out.push_str(&format!("{},{:.1},{},{}\n", r.n_users, r.mean_ms, r.max_ms, r.blocks));
    }
    out
}

/// Whitespace-separated columns for gnuplot.
pub fn reports_to_dat(reports: &[LatencyReport]) -> String {
    let mut out = String::from("# n_users mean_ms max_ms blocks\n");
    for r in reports {
        out.push_str(&format!("{} {:.1} {} {}\n", r.n_users, r.mean_ms, r.max_ms, r.blocks));
    }
    out
}

enum Phase {
    Registering(Digest32),
    Certifying(Digest32),
    Done,
}

/// Drives every user through registration, then certification as soon as
/// its home node shows the registration receipt. User `i` is homed on node
/// `i mod n`. Ring size is capped by the registry size at signing time.
pub fn measure_iaac_latency(
    sim: &mut Simulation,
    users: &[Enrollment],
    ring_cfg: RingConfig,
) -> Result<LatencyReport, SimError> {
    let n_nodes = sim.config().n_nodes;
    let mut rng = ChaCha20Rng::seed_from_u64(sim.config().rng_seed ^ 0x5eed_ce27);
    let start = sim.now();
    let start_blocks = sim.blocks_produced();
    let mut phases = Vec::with_capacity(users.len());
    for (i, u) in users.iter().enumerate() {
        let home = i % n_nodes;
        let nonce = sim.node(home)?.chain().state().next_nonce(&u.seed.address());
        let tx = build_registration_tx(&u.seed, &u.reg, nonce, &mut rng).map_err(|e| SimError::UserFailed {
            user: i,
            what: e.to_string(),
        })?;
        phases.push(Phase::Registering(tx.hash()));
        sim.submit_tx(home, tx)?;
    }
    let mut by_node: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for i in 0..users.len() {
        by_node[i % n_nodes].push(i);
    }

    let mut times = vec![0u64; users.len()];
    let mut reg_heights = std::collections::BTreeSet::new();
    let mut cert_heights = std::collections::BTreeSet::new();
    let mut remaining = users.len();
    let budget = sim.config().max_events;
    let mut used = 0u64;
    while remaining > 0 {
        if used >= budget {
            return Err(SimError::Timeout(budget));
        }
        used += 1;
        let Some(applied) = sim.step()? else {
            return Err(SimError::Timeout(used));
        };
        for (node, _) in applied {
            for &i in &by_node[node] {
                let fail = |what: String| SimError::UserFailed { user: i, what };
                match phases[i] {
                    Phase::Registering(h) => {
                        let Some(r) = sim.node(node)?.chain().receipt(&h).cloned() else {
                            continue;
                        };
                        if let Some(e) = r.error() {
                            return Err(fail(format!("registration rejected: {e}")));
                        }
                        reg_heights.insert(r.height);
                        let registry = sim.node(node)?.chain().state().seed_keys();
                        let ring = RingConfig {
                            ring_size: ring_cfg.ring_size.min(registry.len()).max(1),
                        };
                        let c = certify(&users[i].seed, &registry, ring, &mut rng).map_err(|e| fail(e.to_string()))?;
                        let tx = build_certification_tx(&c.soul, &c.cer, 0, &mut rng).map_err(|e| fail(e.to_string()))?;
                        phases[i] = Phase::Certifying(tx.hash());
                        sim.submit_tx(node, tx)?;
                    }
                    Phase::Certifying(h) => {
                        let Some(r) = sim.node(node)?.chain().receipt(&h).cloned() else {
                            continue;
                        };
                        if let Some(e) = r.error() {
                            return Err(fail(format!("certification rejected: {e}")));
                        }
                        cert_heights.insert(r.height);
                        let included = sim.inclusion(&h).expect("receipt implies inclusion").time_ms;
                        times[i] = included - start;
                        phases[i] = Phase::Done;
                        remaining -= 1;
                    }
                    Phase::Done => {}
                }
            }
        }
    }
    let last = cert_heights.iter().next_back().copied().unwrap_or(start_blocks);
    Ok(LatencyReport::from_times(
        users.len(),
        times,
        last - start_blocks,
        reg_heights.len() as u64,
        cert_heights.len() as u64,
    ))
}

/// Runs [`measure_iaac_latency`] on a fresh network for each user count,
/// taking the first `n` of `users`.
pub fn concurrency_sweep(
    cfg: &SimConfig,
    genesis: &Genesis,
    users: &[Enrollment],
    counts: &[usize],
    ring_cfg: RingConfig,
) -> Result<Vec<LatencyReport>, SimError> {
    counts
        .iter()
        .map(|&n| {
            if n > users.len() {
                return Err(SimError::UserFailed {
                    user: n,
                    what: format!("only {} users prepared", users.len()),
                });
            }
            let mut sim = spawn_network(cfg.clone(), genesis.clone())?;
            measure_iaac_latency(&mut sim, &users[..n], ring_cfg)
        })
        .collect()
}

/// Least-squares line `y = slope * x + intercept` and its R².
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}
