//! Synthetic labeled face-pair data and the threshold accuracy sweep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::face::{
    cosine_similarity_fixed, normalize_features, FaceError, FeatureVector, ThresholdConfig, FEATURE_DIM,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetParams {
    pub n_subjects: usize,
    pub per_subject: usize,
    /// RMS length of the per-sample perturbation added to a unit centroid.
    /// Each coordinate gets `N(0, intra_noise^2 / 128)`.
    pub intra_noise: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct LabeledPair {
    pub a: FeatureVector,
    pub b: FeatureVector,
    pub same_subject: bool,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub params: DatasetParams,
    pub pairs: Vec<LabeledPair>,
}

/// Summary written next to sweep output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    #[serde(flatten)]
    pub params: DatasetParams,
    pub same_pairs: usize,
    pub cross_pairs: usize,
}

impl Dataset {
    pub fn manifest(&self) -> DatasetManifest {
        let same = self.pairs.iter().filter(|p| p.same_subject).count();
        DatasetManifest {
            version: 1,
            params: self.params,
            same_pairs: same,
            cross_pairs: self.pairs.len() - same,
        }
    }
}

fn unit_gaussian(rng: &mut ChaCha20Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..FEATURE_DIM).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Every subject gets a random unit centroid; samples are the centroid plus
/// Gaussian noise, renormalized. Emits all same-subject pairs and an equal
/// number of randomly drawn cross-subject pairs.
pub fn generate_synthetic_dataset(params: DatasetParams) -> Result<Dataset, FaceError> {
    if params.n_subjects < 2 || params.per_subject < 2 {
        return Err(FaceError::ConfigError(
            "need at least 2 subjects and 2 samples per subject".into(),
        ));
    }
    if !params.intra_noise.is_finite() || params.intra_noise < 0.0 {
        return Err(FaceError::ConfigError(format!("bad intra_noise {}", params.intra_noise)));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    let sigma = params.intra_noise / (FEATURE_DIM as f64).sqrt();

    let mut subjects: Vec<Vec<FeatureVector>> = Vec::with_capacity(params.n_subjects);
    for _ in 0..params.n_subjects {
        let centroid = unit_gaussian(&mut rng);
        let mut samples = Vec::with_capacity(params.per_subject);
        for _ in 0..params.per_subject {
            let noisy: Vec<f64> = centroid
                .iter()
                .map(|c| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    c + sigma * z
                })
                .collect();
            samples.push(normalize_features(&noisy)?);
        }
        subjects.push(samples);
    }

    let mut pairs = Vec::new();
    for samples in &subjects {
        for i in 0..samples.len() {
            for j in i + 1..samples.len() {
                pairs.push(LabeledPair {
                    a: samples[i].clone(),
                    b: samples[j].clone(),
                    same_subject: true,
                });
            }
        }
    }
    let same_count = pairs.len();
    for _ in 0..same_count {
        let s = rng.gen_range(0..params.n_subjects);
        let t = (s + rng.gen_range(1..params.n_subjects)) % params.n_subjects;
        let i = rng.gen_range(0..params.per_subject);
        let j = rng.gen_range(0..params.per_subject);
        pairs.push(LabeledPair {
            a: subjects[s][i].clone(),
            b: subjects[t][j].clone(),
            same_subject: false,
        });
    }
    Ok(Dataset { params, pairs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub accuracy: f64,
}

/// Fraction of pairs on which the threshold decision agrees with the label,
/// for each threshold, ordered by threshold.
pub fn accuracy_sweep(dataset: &Dataset, thresholds: &[f64]) -> Result<Vec<SweepPoint>, FaceError> {
    if dataset.pairs.is_empty() {
        return Err(FaceError::ConfigError("dataset is empty".into()));
    }
    let sims: Vec<(i64, bool)> = dataset
        .pairs
        .iter()
        .map(|p| (cosine_similarity_fixed(&p.a, &p.b), p.same_subject))
        .collect();
    let mut out = thresholds
        .iter()
        .map(|&t| {
            let cfg = ThresholdConfig::new(t)?;
            let correct = sims
                .iter()
                .filter(|(d, same)| (*d >= cfg.tau_fixed) == *same)
                .count();
            Ok(SweepPoint {
                threshold: t,
                accuracy: correct as f64 / sims.len() as f64,
            })
        })
        .collect::<Result<Vec<_>, FaceError>>()?;
    out.sort_by(|a, b| a.threshold.total_cmp(&b.threshold));
    Ok(out)
}

/// `threshold,accuracy` CSV with a header row.
pub fn sweep_to_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from("threshold,accuracy\n");
    for p in points {
        s.push_str(&format!("{:.4},{:.6}\n", p.threshold, p.accuracy));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::face::{UNIT_NORM_SQ, SIMILARITY_SCALE};

    fn params(noise: f64, seed: u64) -> DatasetParams {
        DatasetParams {
            n_subjects: 50,
            per_subject: 3,
            intra_noise: noise,
            seed,
        }
    }

    #[test]
    fn rejects_degenerate_parameters() {
        let mut p = params(0.05, 1);
        p.n_subjects = 1;
        assert!(generate_synthetic_dataset(p).is_err());
        let mut p = params(0.05, 1);
        p.per_subject = 1;
        assert!(generate_synthetic_dataset(p).is_err());
        assert!(generate_synthetic_dataset(params(-1.0, 1)).is_err());
    }

    #[test]
    fn zero_noise_same_pairs_are_near_identical() {
        let d = generate_synthetic_dataset(params(0.0, 2)).unwrap();
        for p in d.pairs.iter().filter(|p| p.same_subject) {
            let sim = cosine_similarity_fixed(&p.a, &p.b);
            assert!((sim - UNIT_NORM_SQ).abs() <= crate::face::DEFAULT_EPS_NORM);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let a = generate_synthetic_dataset(params(0.05, 3)).unwrap();
        let b = generate_synthetic_dataset(params(0.05, 3)).unwrap();
        assert_eq!(a.pairs.len(), b.pairs.len());
        for (x, y) in a.pairs.iter().zip(&b.pairs) {
            assert_eq!(x.a, y.a);
            assert_eq!(x.b, y.b);
            assert_eq!(x.same_subject, y.same_subject);
        }
        let m = a.manifest();
        assert_eq!(m.same_pairs, 150);
        assert_eq!(m.cross_pairs, 150);
    }

    #[test]
    fn same_subject_more_similar_than_cross_subject() {
        let d = generate_synthetic_dataset(DatasetParams {
            n_subjects: 500,
            per_subject: 2,
            intra_noise: 0.05,
            seed: 4,
        })
        .unwrap();
        let mean = |same: bool| {
            let v: Vec<f64> = d
                .pairs
                .iter()
                .filter(|p| p.same_subject == same)
                .map(|p| cosine_similarity_fixed(&p.a, &p.b) as f64 / SIMILARITY_SCALE)
                .collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!(mean(true) > mean(false));
    }

    #[test]
    fn sweep_on_trivial_datasets() {
        let e = |i: usize| {
            let mut v = vec![0.0; FEATURE_DIM];
            v[i] = 1.0;
            normalize_features(&v).unwrap()
        };
        let identical = Dataset {
            params: params(0.0, 0),
            pairs: (0..4)
                .map(|i| LabeledPair {
                    a: e(i),
                    b: e(i),
                    same_subject: true,
                })
                .collect(),
        };
        for p in accuracy_sweep(&identical, &[0.0, 0.5, 0.99]).unwrap() {
            assert_eq!(p.accuracy, 1.0);
        }
        let orthogonal = Dataset {
            params: params(0.0, 0),
            pairs: (0..4)
                .map(|i| LabeledPair {
                    a: e(i),
                    b: e(i + 1),
                    same_subject: false,
                })
                .collect(),
        };
        assert_eq!(accuracy_sweep(&orthogonal, &[0.9]).unwrap()[0].accuracy, 1.0);
        let empty = Dataset {
            params: params(0.0, 0),
            pairs: vec![],
        };
        assert!(accuracy_sweep(&empty, &[0.9]).is_err());
    }

    #[test]
    fn sweep_is_sorted_and_high_threshold_not_worse() {
        let d = generate_synthetic_dataset(params(0.05, 5)).unwrap();
        let pts = accuracy_sweep(&d, &[0.9, 0.5, 0.1]).unwrap();
        assert!(pts.windows(2).all(|w| w[0].threshold < w[1].threshold));
        let at = |t: f64| pts.iter().find(|p| p.threshold == t).unwrap().accuracy;
        assert!(at(0.9) >= at(0.5));
        assert!(sweep_to_csv(&pts).starts_with("threshold,accuracy\n0.1000,"));
    }
}
