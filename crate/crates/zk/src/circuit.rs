//! The face-match circuit: `Σ a_i·b_i ≥ tau_fixed` over two 128-d fixed-point
//! vectors that are each within `eps_norm` of unit norm.
//!
//! Public inputs, in order: `tau_fixed`, `eps_norm`, `id_hash`,
//! `seed_pk_digest`. The threshold and tolerance enter only as public inputs,
//! so one circuit (and one key pair) serves every configuration.

use std::sync::OnceLock;

use ark_ff::{BigInteger, PrimeField};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use zkbid_core::face::{cosine_similarity_fixed, FeatureVector, ThresholdConfig, COORD_BOUND, FEATURE_DIM, UNIT_NORM_SQ};
use zkbid_core::hash::Digest32;

use crate::r1cs::{fr_from_i64, pow2, LinearCombination as Lc, R1cs, R1csBuilder, ONE};
use crate::{Fr, ZkError};

pub const NUM_PUBLIC: usize = 4;
/// Magnitude bits per coordinate; with the sign bit this is an 18-bit check.
pub const MAGNITUDE_BITS: u32 = 17;
pub const SLACK_BITS: u32 = 35;
/// `eps_norm ≤ 2^21`, so each one-sided norm slack is at most `2^22`.
pub const NORM_SLACK_BITS: u32 = 23;
pub const MAX_EPS_NORM: i64 = 1 << 21;
pub const MAX_ABS_TAU_FIXED: i64 = UNIT_NORM_SQ;

#[derive(Debug, Clone)]
struct CoordVars {
    value: usize,
    sign: usize,
    magnitude: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Layout {
    coords: [Vec<CoordVars>; 2],
    products: Vec<usize>,
    squares: [Vec<usize>; 2],
    slack_bits: Vec<usize>,
    // [vector][lower, upper] -> bits
    norm_bits: [[Vec<usize>; 2]; 2],
}

fn lc_bits(bits: &[usize]) -> Lc {
    Lc(bits.iter().enumerate().map(|(k, &v)| (v, pow2(k as u32))).collect())
}

fn build() -> (R1cs, Layout) {
    let mut cs = R1csBuilder::new(NUM_PUBLIC);
    let tau = cs.public(0);
    let eps = cs.public(1);
    let id_hash = cs.public(2);
    let seed_digest = cs.public(3);

    let alloc_vector = |cs: &mut R1csBuilder| -> Vec<CoordVars> {
        (0..FEATURE_DIM)
            .map(|_| {
                let value = cs.alloc_witness();
                let sign = cs.alloc_witness();
                let magnitude = cs.alloc_witnesses(MAGNITUDE_BITS as usize);
                cs.enforce_boolean(sign);
                for &m in &magnitude {
                    cs.enforce_boolean(m);
                }
                // (1 - 2s) · Σ 2^k m_k = value
                cs.enforce(
                    Lc::var(ONE).term(sign, -Fr::from(2u64)),
                    lc_bits(&magnitude),
                    Lc::var(value),
                );
                CoordVars { value, sign, magnitude }
            })
            .collect()
    };
    let a = alloc_vector(&mut cs);
    let b = alloc_vector(&mut cs);

    let mut products = Vec::with_capacity(FEATURE_DIM);
    let mut squares = [Vec::with_capacity(FEATURE_DIM), Vec::with_capacity(FEATURE_DIM)];
    for i in 0..FEATURE_DIM {
        let (x, y) = (a[i].value, b[i].value);
        let p = cs.alloc_witness();
        cs.enforce(Lc::var(x), Lc::var(y), Lc::var(p));
        products.push(p);
        for (which, v) in [(0, x), (1, y)] {
            let s = cs.alloc_witness();
            cs.enforce(Lc::var(v), Lc::var(v), Lc::var(s));
            squares[which].push(s);
        }
    }

    // D - tau = Σ 2^k t_k
    let slack_bits = cs.alloc_witnesses(SLACK_BITS as usize);
    for &t in &slack_bits {
        cs.enforce_boolean(t);
    }
    let mut d_minus_tau = Lc(products.iter().map(|&p| (p, Fr::from(1u64))).collect());
    d_minus_tau = d_minus_tau.term(tau, -Fr::from(1u64));
    cs.enforce(d_minus_tau, Lc::var(ONE), lc_bits(&slack_bits));

    // S - 2^32 + eps ∈ [0, 2^23) and 2^32 + eps - S ∈ [0, 2^23)
    let unit = Fr::from(UNIT_NORM_SQ as u64);
    let mut norm_bits: [[Vec<usize>; 2]; 2] = Default::default();
    for which in 0..2 {
        let sum = || Lc(squares[which].iter().map(|&s| (s, Fr::from(1u64))).collect());
        let lower = sum().term(ONE, -unit).term(eps, Fr::from(1u64));
        let upper = Lc(sum().0.into_iter().map(|(v, c)| (v, -c)).collect())
            .term(ONE, unit)
            .term(eps, Fr::from(1u64));
        for (side, lc) in [lower, upper].into_iter().enumerate() {
            let bits = cs.alloc_witnesses(NORM_SLACK_BITS as usize);
            for &u in &bits {
                cs.enforce_boolean(u);
            }
            cs.enforce(lc, Lc::var(ONE), lc_bits(&bits));
            norm_bits[which][side] = bits;
        }
    }

    for v in [id_hash, seed_digest] {
        cs.enforce(Lc::var(v), Lc::var(ONE), Lc::var(v));
    }

    let layout = Layout {
        coords: [a, b],
        products,
        squares,
        slack_bits,
        norm_bits,
    };
    (cs.build(), layout)
}

fn cached() -> &'static (R1cs, Layout) {
    static CIRCUIT: OnceLock<(R1cs, Layout)> = OnceLock::new();
    CIRCUIT.get_or_init(build)
}

/// The face-match R1CS. Built once per process.
pub fn facematch_circuit() -> &'static R1cs {
    &cached().0
}

/// The circuit for `cfg`. Its shape does not depend on `cfg`; the threshold
/// and tolerance are bound through [`PublicInputs`].
pub fn build_facematch_circuit(_cfg: &ThresholdConfig) -> R1cs {
    facematch_circuit().clone()
}

/// Hash(ID) reduced into the scalar field.
pub fn id_hash_to_field(id: &[u8]) -> Fr {
    digest_to_field(&zkbid_core::hash::digest(id))
}

/// A 32-byte digest read big-endian and reduced into the scalar field.
pub fn digest_to_field(d: &Digest32) -> Fr {
    Fr::from_be_bytes_mod_order(d.as_bytes())
}

pub fn fr_to_bytes(x: &Fr) -> [u8; 32] {
    let mut out = [0u8; 32];
    out.copy_from_slice(&x.into_bigint().to_bytes_be());
    out
}

/// Rejects encodings that are not reduced.
pub fn fr_from_bytes(bytes: &[u8]) -> Option<Fr> {
    if bytes.len() != 32 {
        return None;
    }
    let x = Fr::from_be_bytes_mod_order(bytes);
    (fr_to_bytes(&x)[..] == *bytes).then_some(x)
}

mod fr_hex {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Fr, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(fr_to_bytes(x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Fr, D::Error> {
        let s = String::deserialize(d)?;
        let bytes = hex::decode(&s).map_err(serde::de::Error::custom)?;
        fr_from_bytes(&bytes).ok_or_else(|| serde::de::Error::custom("not a canonical field element"))
    }
}

/// The statement `x`: threshold, tolerance and the identity binding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicInputs {
    pub tau_fixed: i64,
    pub eps_norm: i64,
    #[serde(with = "fr_hex")]
    pub id_hash: Fr,
    #[serde(with = "fr_hex")]
    pub seed_pk_digest: Fr,
}

impl PublicInputs {
    pub fn new(cfg: &ThresholdConfig, id_hash: Fr, seed_pk_digest: Fr) -> Self {
        PublicInputs {
            tau_fixed: cfg.tau_fixed,
            eps_norm: cfg.eps_norm,
            id_hash,
            seed_pk_digest,
        }
    }

    pub fn check_ranges(&self) -> Result<(), ZkError> {
        if self.tau_fixed.abs() > MAX_ABS_TAU_FIXED {
            return Err(ZkError::PublicInputOutOfRange("tau_fixed"));
        }
        if !(0..=MAX_EPS_NORM).contains(&self.eps_norm) {
            return Err(ZkError::PublicInputOutOfRange("eps_norm"));
        }
        Ok(())
    }

    pub fn to_field_elements(&self) -> Result<Vec<Fr>, ZkError> {
        self.check_ranges()?;
        Ok(vec![
            fr_from_i64(self.tau_fixed),
            Fr::from(self.eps_norm as u64),
            self.id_hash,
            self.seed_pk_digest,
        ])
    }

    /// 128-byte canonical encoding, one 32-byte big-endian element per input.
    pub fn to_bytes(&self) -> Result<Vec<u8>, ZkError> {
        Ok(self.to_field_elements()?.iter().flat_map(fr_to_bytes).collect())
    }
}

/// The witness `W`: both vectors plus every auxiliary wire, in circuit order.
#[derive(Clone)]
pub struct Witness {
    a: FeatureVector,
    b: FeatureVector,
    values: Vec<Fr>,
}

impl std::fmt::Debug for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Witness").field("len", &self.values.len()).finish_non_exhaustive()
    }
}

impl Witness {
    pub fn a(&self) -> &FeatureVector {
        &self.a
    }

    pub fn b(&self) -> &FeatureVector {
        &self.b
    }

    /// Witness wires, excluding the constant and public inputs.
    pub fn values(&self) -> &[Fr] {
        &self.values
    }

    /// Direct access for soundness tests that corrupt individual wires.
    pub fn values_mut(&mut self) -> &mut [Fr] {
        &mut self.values
    }
}

fn bits_of(x: u64, n: u32) -> impl Iterator<Item = Fr> {
    (0..n).map(move |k| Fr::from((x >> k) & 1))
}

/// Builds a satisfying assignment, or reports which check fails.
///
/// Succeeds exactly when both vectors are in range and norm-valid for
/// `public.eps_norm` and their similarity is at least `public.tau_fixed`.
pub fn synthesize_witness(a: &FeatureVector, b: &FeatureVector, public: &PublicInputs) -> Result<Witness, ZkError> {
    public.check_ranges()?;
    for (which, v) in [('a', a), ('b', b)] {
        if let Some(index) = v.coords().iter().position(|c| c.abs() >= COORD_BOUND) {
            return Err(ZkError::CoordinateOutOfRange {
                which,
                index,
                value: v.coords()[index],
            });
        }
    }
    for (which, v) in [('a', a), ('b', b)] {
        let norm_sq = v.norm_sq();
        if (norm_sq - UNIT_NORM_SQ).abs() > public.eps_norm {
            return Err(ZkError::NormOutOfTolerance {
                which,
                norm_sq,
                eps: public.eps_norm,
            });
        }
    }
    let similarity = cosine_similarity_fixed(a, b);
    let slack = similarity - public.tau_fixed;
    if slack < 0 {
        return Err(ZkError::SimilarityBelowThreshold {
            similarity,
            tau_fixed: public.tau_fixed,
        });
    }
    debug_assert!(slack < 1 << SLACK_BITS);

    let (circuit, layout) = cached();
    let base = circuit.first_witness_index();
    let mut values = vec![Fr::from(0u64); circuit.num_witness()];
    let mut set = |var: usize, x: Fr| values[var - base] = x;

    for (vars, v) in layout.coords.iter().zip([a, b]) {
        for (cv, &c) in vars.iter().zip(v.coords().iter()) {
            set(cv.value, fr_from_i64(c));
            set(cv.sign, Fr::from((c < 0) as u64));
            for (&m, bit) in cv.magnitude.iter().zip(bits_of(c.unsigned_abs(), MAGNITUDE_BITS)) {
                set(m, bit);
            }
        }
    }
    for i in 0..FEATURE_DIM {
        let (x, y) = (a.coords()[i], b.coords()[i]);
        set(layout.products[i], fr_from_i64(x * y));
        set(layout.squares[0][i], Fr::from((x * x) as u64));
        set(layout.squares[1][i], Fr::from((y * y) as u64));
    }
    for (&t, bit) in layout.slack_bits.iter().zip(bits_of(slack as u64, SLACK_BITS)) {
        set(t, bit);
    }
    for (which, v) in [a, b].into_iter().enumerate() {
        let s = v.norm_sq();
        let lower = s - UNIT_NORM_SQ + public.eps_norm;
        let upper = UNIT_NORM_SQ + public.eps_norm - s;
        for (side, slack) in [lower, upper].into_iter().enumerate() {
            for (&u, bit) in layout.norm_bits[which][side].iter().zip(bits_of(slack as u64, NORM_SLACK_BITS)) {
                set(u, bit);
            }
        }
    }
    Ok(Witness {
        a: a.clone(),
        b: b.clone(),
        values,
    })
}

/// Families of constraints that [`violate_one`] can break in isolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintFamily {
    /// Sign-magnitude recomposition of coordinate `index` of vector `a`.
    Recomposition,
    /// Booleanity of the sign bit of a zero coordinate of `a`.
    SignBooleanity,
    Product,
    Square,
    Slack,
    NormLower,
    NormUpper,
}

/// Fault injection for soundness tests.
///
/// Starting from a satisfying witness for `public`, returns an assignment `z`
/// together with the single constraint it violates. Dependent slack wires are
/// re-derived so that every other constraint stays satisfied. `None` if the
/// witness offers no suitable wire (e.g. no zero coordinate).
pub fn violate_one(w: &Witness, public: &PublicInputs, family: ConstraintFamily, index: usize) -> Option<(Vec<Fr>, usize)> {
    let (circuit, layout) = cached();
    let mut z = circuit.assignment(&public.to_field_elements().ok()?, w.values()).ok()?;
    let i = index % FEATURE_DIM;
    let a = w.a.coords();
    let b = w.b.coords();
    let mut squares_a: Vec<i64> = a.iter().map(|x| x * x).collect();
    let mut products: Vec<i64> = a.iter().zip(b.iter()).map(|(x, y)| x * y).collect();
    let flip = |z: &mut Vec<Fr>, v: usize| z[v] = Fr::from(1u64) - z[v];
    match family {
        ConstraintFamily::Recomposition => flip(&mut z, layout.coords[0][i].magnitude[(index / FEATURE_DIM) % MAGNITUDE_BITS as usize]),
        ConstraintFamily::SignBooleanity => {
            let j = (0..FEATURE_DIM).map(|k| (i + k) % FEATURE_DIM).find(|&k| a[k] == 0)?;
            z[layout.coords[0][j].sign] = Fr::from(2u64);
        }
        ConstraintFamily::Product => {
            products[i] += 1;
            z[layout.products[i]] += Fr::from(1u64);
        }
        ConstraintFamily::Square => {
            squares_a[i] += 1;
            z[layout.squares[0][i]] += Fr::from(1u64);
        }
        ConstraintFamily::Slack => flip(&mut z, layout.slack_bits[index % SLACK_BITS as usize]),
        ConstraintFamily::NormLower => flip(&mut z, layout.norm_bits[0][0][index % NORM_SLACK_BITS as usize]),
        ConstraintFamily::NormUpper => flip(&mut z, layout.norm_bits[0][1][index % NORM_SLACK_BITS as usize]),
    }
    if matches!(family, ConstraintFamily::Product) {
        let slack = products.iter().sum::<i64>() - public.tau_fixed;
        if !(0..1 << SLACK_BITS).contains(&slack) {
            return None;
        }
        for (&t, bit) in layout.slack_bits.iter().zip(bits_of(slack as u64, SLACK_BITS)) {
            z[t] = bit;
        }
    }
    if matches!(family, ConstraintFamily::Square) {
        let s: i64 = squares_a.iter().sum();
        for (side, slack) in [s - UNIT_NORM_SQ + public.eps_norm, UNIT_NORM_SQ + public.eps_norm - s].into_iter().enumerate() {
            if !(0..1 << NORM_SLACK_BITS).contains(&slack) {
                return None;
            }
            for (&u, bit) in layout.norm_bits[0][side].iter().zip(bits_of(slack as u64, NORM_SLACK_BITS)) {
                z[u] = bit;
            }
        }
    }
    match circuit.unsatisfied(&z)[..] {
        [only] => Some((z, only)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use zkbid_core::face::{face_match, normalize_features};

    fn basis(i: usize) -> FeatureVector {
        let mut v = vec![0.0; FEATURE_DIM];
        v[i] = 1.0;
        normalize_features(&v).unwrap()
    }

    fn public(tau: f64) -> PublicInputs {
        PublicInputs::new(&ThresholdConfig::new(tau).unwrap(), Fr::from(7u64), Fr::from(9u64))
    }

    fn satisfied(w: &Witness, p: &PublicInputs) -> bool {
        let c = facematch_circuit();
        c.is_satisfied(&c.assignment(&p.to_field_elements().unwrap(), w.values()).unwrap())
    }

    #[test]
    fn golden_shape() {
        let c = facematch_circuit();
        assert_eq!(c.num_public(), 4);
        assert_eq!(c.num_constraints(), 5382);
        assert_eq!(c.num_witness(), 5375);
    }

    #[test]
    fn shape_independent_of_config() {
        let lo = build_facematch_circuit(&ThresholdConfig::new(0.1).unwrap());
        let hi = build_facematch_circuit(&ThresholdConfig::new(0.95).unwrap());
        assert_eq!(lo.digest(), hi.digest());
    }

    #[test]
    fn self_match_satisfies() {
        let v = basis(3);
        let p = public(0.90);
        let w = synthesize_witness(&v, &v, &p).unwrap();
        assert!(satisfied(&w, &p));
    }

    #[test]
    fn orthogonal_rejected_and_forced_witness_violates_slack() {
        let (x, y) = (basis(0), basis(1));
        let p = public(0.90);
        assert!(matches!(
            synthesize_witness(&x, &y, &p),
            Err(ZkError::SimilarityBelowThreshold { similarity: 0, .. })
        ));
        // Generate under tau = 0, then claim tau = 0.90.
        let w = synthesize_witness(&x, &y, &public(0.0)).unwrap();
        let c = facematch_circuit();
        let z = c.assignment(&p.to_field_elements().unwrap(), w.values()).unwrap();
        let bad = c.unsatisfied(&z);
        assert_eq!(bad.len(), 1);
        let slack = &c.constraints()[bad[0]];
        assert!(slack.c.0.len() == SLACK_BITS as usize);
    }

    #[test]
    fn boundary_similarity_is_inclusive() {
        let v = basis(5);
        let mut p = public(0.5);
        p.tau_fixed = UNIT_NORM_SQ;
        let w = synthesize_witness(&v, &v, &p).unwrap();
        assert!(satisfied(&w, &p));
        p.tau_fixed = UNIT_NORM_SQ + 1;
        assert!(synthesize_witness(&v, &v, &p).is_err());
    }

    #[test]
    fn negative_coordinates_and_threshold() {
        let mut raw = vec![0.0; FEATURE_DIM];
        raw[0] = -0.6;
        raw[1] = 0.8;
        let v = normalize_features(&raw).unwrap();
        let p = public(-0.7);
        let w = synthesize_witness(&v, &basis(0), &p).unwrap();
        assert!(satisfied(&w, &p));
    }

    #[test]
    fn norm_and_range_failures() {
        let mut coords = [0i64; FEATURE_DIM];
        coords[0] = 1 << 16;
        coords[1] = 1 << 11;
        let long = FeatureVector::from_coords_unvalidated(&coords).unwrap();
        assert!(matches!(
            synthesize_witness(&long, &basis(0), &public(0.5)),
            Err(ZkError::NormOutOfTolerance { which: 'a', .. })
        ));
        coords[1] = 0;
        coords[0] = COORD_BOUND;
        let wide = FeatureVector::from_coords_unvalidated(&coords).unwrap();
        assert!(matches!(
            synthesize_witness(&basis(0), &wide, &public(0.5)),
            Err(ZkError::CoordinateOutOfRange { which: 'b', index: 0, .. })
        ));
        let mut p = public(0.5);
        p.eps_norm = MAX_EPS_NORM + 1;
        assert_eq!(
            synthesize_witness(&basis(0), &basis(0), &p).unwrap_err(),
            ZkError::PublicInputOutOfRange("eps_norm")
        );
    }

    #[test]
    fn norm_tolerance_edges_match_circuit() {
        // |S - 2^32| == eps exactly, with the largest allowed eps.
        let mut coords = [0i64; FEATURE_DIM];
        coords[0] = 1 << 16;
        coords[1] = 1 << 10; // adds 2^20 to the squared norm
        coords[2] = 1 << 10;
        let v = FeatureVector::from_coords_unvalidated(&coords).unwrap();
        let mut p = public(0.5);
        p.eps_norm = 1 << 21;
        let w = synthesize_witness(&v, &v, &p).unwrap();
        assert!(satisfied(&w, &p));
        p.eps_norm = (1 << 21) - 1;
        assert!(synthesize_witness(&v, &v, &p).is_err());
    }

    #[test]
    fn corrupted_magnitude_bit_breaks_satisfaction() {
        let v = basis(0);
        let p = public(0.9);
        let mut w = synthesize_witness(&v, &v, &p).unwrap();
        assert!(satisfied(&w, &p));
        let c = facematch_circuit();
        let sign_idx = cached().1.coords[0][0].sign - c.first_witness_index();
        w.values_mut()[sign_idx] = Fr::from(2u64);
        assert!(!satisfied(&w, &p));
    }

    #[test]
    fn public_inputs_json_round_trip() {
        let p = PublicInputs::new(&ThresholdConfig::default(), id_hash_to_field(b"ID-123"), -Fr::from(1u64));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<PublicInputs>(&s).unwrap(), p);
        // Non-canonical field element encoding.
        let bad = s.replace(&hex::encode(fr_to_bytes(&p.seed_pk_digest)), &"ff".repeat(32));
        assert!(serde_json::from_str::<PublicInputs>(&bad).is_err());
    }

    #[test]
    fn witness_success_iff_plaintext_match_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha20Rng;
        let mut rng = ChaCha20Rng::seed_from_u64(0xfacade);
        let cfg = ThresholdConfig::default();
        let p = PublicInputs::new(&cfg, Fr::from(1u64), Fr::from(2u64));
        let mut accepted = 0;
        for _ in 0..1000 {
            let base: Vec<f64> = (0..FEATURE_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let noise = rng.gen_range(0.0..1.0);
            let other: Vec<f64> = base.iter().map(|x| x + noise * rng.gen_range(-1.0..1.0)).collect();
            let (a, b) = (normalize_features(&base).unwrap(), normalize_features(&other).unwrap());
            let plain = face_match(&a, &b, &cfg) && a.check_norm(cfg.eps_norm).is_ok() && b.check_norm(cfg.eps_norm).is_ok();
            assert_eq!(synthesize_witness(&a, &b, &p).is_ok(), plain);
            accepted += plain as usize;
        }
        assert!(accepted > 100 && accepted < 900, "degenerate split: {accepted}");
    }

    #[test]
    fn single_constraint_violations_break_divisibility() {
        use crate::qap::Qap;
        let qap = Qap::new(facematch_circuit());
        let mut raw = vec![0.0; FEATURE_DIM];
        for (k, x) in raw.iter_mut().enumerate().take(100) {
            *x = ((k * 37 % 11) as f64 - 5.0) / 5.0;
        }
        let a = normalize_features(&raw).unwrap();
        let p = public(0.5);
        let w = synthesize_witness(&a, &a, &p).unwrap();
        let families = [
            ConstraintFamily::Recomposition,
            ConstraintFamily::SignBooleanity,
            ConstraintFamily::Product,
            ConstraintFamily::Square,
            ConstraintFamily::Slack,
            ConstraintFamily::NormLower,
            ConstraintFamily::NormUpper,
        ];
        let mut seen = std::collections::HashSet::new();
        for family in families {
            for index in [0usize, 101, 300] {
                let (z, bad) = violate_one(&w, &p, family, index).unwrap_or_else(|| panic!("{family:?} {index}"));
                seen.insert(bad);
                assert!(!qap.is_divisible(&z), "{family:?} constraint {bad}");
            }
        }
        assert!(seen.len() > 2 * families.len());
    }
}
