//! Wall-clock timings of the user-side operations.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use zkbid_chain::tx::seed_pk_digest;
use zkbid_chain::identity_hash;
use zkbid_core::face::{face_match, ThresholdConfig};
use zkbid_core::lrs::{ring_sign, Ring};
use zkbid_core::Account;
use zkbid_netsim::synthetic_identity;
use zkbid_zk::circuit::digest_to_field;
use zkbid_zk::{synthesize_witness, ProvingKey, PublicInputs};

use crate::error::WalletError;

#[derive(Debug, Clone, Serialize)]
pub struct TimingRow {
    pub operation: &'static str,
    pub samples: usize,
    pub mean_ms: f64,
    pub max_ms: f64,
}

fn row(operation: &'static str, samples: &[Duration]) -> TimingRow {
    let ms: Vec<f64> = samples.iter().map(|d| d.as_secs_f64() * 1e3).collect();
    TimingRow {
        operation,
        samples: ms.len(),
        mean_ms: ms.iter().sum::<f64>() / ms.len().max(1) as f64,
        max_ms: ms.iter().copied().fold(0.0, f64::max),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

/// Face comparison, ZKP generation, account generation and ring signing,
/// in that order. Each is run `reps` times (proofs at most `proof_reps`).
pub fn crypto_timings(
    pk: &ProvingKey,
    cfg: &ThresholdConfig,
    ring_size: usize,
    reps: usize,
    proof_reps: usize,
    seed: u64,
) -> Result<Vec<TimingRow>, WalletError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let reps = reps.max(1);
    let ids: Vec<_> = (0..reps).map(|i| synthetic_identity(i, 0.05, &mut rng)).collect();

    let face: Vec<Duration> = ids.iter().map(|id| timed(|| face_match(&id.live, &id.card, cfg)).1).collect();

    let mut proofs = Vec::new();
    for id in ids.iter().take(proof_reps.max(1)) {
        let seed_acct = Account::generate(&mut rng);
        let public = PublicInputs::new(
            cfg,
            digest_to_field(&identity_hash(&id.id_number)),
            digest_to_field(&seed_pk_digest(seed_acct.public_key())),
        );
        let (res, d) = timed(|| {
            synthesize_witness(&id.live, &id.card, &public).and_then(|w| zkbid_zk::prove(pk, &public, &w, &mut rng))
        });
        res.map_err(|e| WalletError::Enroll(e.into()))?;
        proofs.push(d);
    }

    let accounts: Vec<Duration> = (0..reps).map(|_| timed(|| Account::generate(&mut rng)).1).collect();

    let signer = Account::generate(&mut rng);
    let mut members: Vec<_> = (1..ring_size.max(1)).map(|_| *Account::generate(&mut rng).public_key()).collect();
    members.insert(0, *signer.public_key());
    let ring = Ring::new(members).map_err(|e| WalletError::Input(e.to_string()))?;
    let mut signs = Vec::with_capacity(reps);
    for _ in 0..reps {
        let msg = Account::generate(&mut rng).public_key().to_bytes();
        let (res, d) = timed(|| ring_sign(signer.secret_key(), 0, &ring, &msg, &mut rng));
        res.map_err(|e| WalletError::Input(e.to_string()))?;
        signs.push(d);
    }

    Ok(vec![
        row("face comparison", &face),
        row("zkp generation", &proofs),
        row("account generation", &accounts),
        row("ring signing", &signs),
    ])
}

pub fn timings_table(rows: &[TimingRow]) -> String {
    let mut s = format!("{:<20} {:>8} {:>12} {:>12}\n", "operation", "samples", "mean_ms", "max_ms");
    for r in rows {
        s.push_str(&format!("{:<20} {:>8} {:>12.3} {:>12.3}\n", r.operation, r.samples, r.mean_ms, r.max_ms));
    }
    s
}
