//! Groth16 over BN254, built on this crate's QAP.

use ark_bn254::{Bn254, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::scalar_mul::ScalarMul;
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup, VariableBaseMSM};
use ark_ff::{Field, One, UniformRand, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use rand::{CryptoRng, RngCore};
use zkbid_core::hash::Digest32;

use crate::qap::Qap;
use crate::r1cs::R1cs;
use crate::Fr;

#[derive(Debug, Clone, PartialEq, Eq, CanonicalSerialize, CanonicalDeserialize)]
pub struct VerifyingKey {
    pub alpha_g1: G1Affine,
    pub beta_g2: G2Affine,
    pub gamma_g2: G2Affine,
    pub delta_g2: G2Affine,
    /// `(β·u_j(τ) + α·v_j(τ) + w_j(τ)) / γ` for the constant and each public input.
    pub ic: Vec<G1Affine>,
}

#[derive(Debug, Clone, PartialEq, Eq, CanonicalSerialize, CanonicalDeserialize)]
pub struct ProvingKey {
    pub circuit_digest: Digest32Wire,
    pub vk: VerifyingKey,
    pub beta_g1: G1Affine,
    pub delta_g1: G1Affine,
    pub a_query: Vec<G1Affine>,
    pub b_g1_query: Vec<G1Affine>,
    pub b_g2_query: Vec<G2Affine>,
    /// `τ^i · t(τ) / δ` for `i < N - 1`.
    pub h_query: Vec<G1Affine>,
    /// `(β·u_j(τ) + α·v_j(τ) + w_j(τ)) / δ` for each witness variable.
    pub l_query: Vec<G1Affine>,
}

/// [`Digest32`] with an ark-serialize encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, CanonicalSerialize, CanonicalDeserialize)]
pub struct Digest32Wire(pub [u8; 32]);

impl PartialEq<Digest32> for Digest32Wire {
    fn eq(&self, other: &Digest32) -> bool {
        self.0 == other.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, CanonicalSerialize, CanonicalDeserialize)]
pub struct Proof {
    pub a: G1Affine,
    pub b: G2Affine,
    pub c: G1Affine,
}

fn nonzero<R: RngCore + CryptoRng>(rng: &mut R) -> Fr {
    loop {
        let x = Fr::rand(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Samples the trapdoor `(α, β, γ, δ, τ)` and derives the keys. The trapdoor
/// lives only on this stack frame.
pub fn keygen<R: RngCore + CryptoRng>(r1cs: &R1cs, rng: &mut R) -> (ProvingKey, VerifyingKey) {
    let qap = Qap::new(r1cs);
    let (alpha, beta, gamma, delta) = (nonzero(rng), nonzero(rng), nonzero(rng), nonzero(rng));
    let (tau, eval) = loop {
        let tau = Fr::rand(rng);
        let eval = qap.evaluate_at(tau);
        if !eval.t.is_zero() {
            break (tau, eval);
        }
    };
    let gamma_inv = gamma.inverse().expect("non-zero");
    let delta_inv = delta.inverse().expect("non-zero");

    let g1 = G1Projective::generator();
    let g2 = G2Projective::generator();

    let num_inputs = qap.num_inputs();
    let combined: Vec<Fr> = (0..qap.num_vars())
        .map(|j| beta * eval.u[j] + alpha * eval.v[j] + eval.w[j])
        .collect();
    let ic_scalars: Vec<Fr> = combined[..num_inputs].iter().map(|x| *x * gamma_inv).collect();
    let l_scalars: Vec<Fr> = combined[num_inputs..].iter().map(|x| *x * delta_inv).collect();

    let h_len = qap.domain_size() - 1;
    let mut h_scalars = Vec::with_capacity(h_len);
    let mut power = eval.t * delta_inv;
    for _ in 0..h_len {
        h_scalars.push(power);
        power *= tau;
    }

    let vk = VerifyingKey {
        alpha_g1: (g1 * alpha).into_affine(),
        beta_g2: (g2 * beta).into_affine(),
        gamma_g2: (g2 * gamma).into_affine(),
        delta_g2: (g2 * delta).into_affine(),
        ic: g1.batch_mul(&ic_scalars),
    };
    let pk = ProvingKey {
        circuit_digest: Digest32Wire(r1cs.digest().0),
        beta_g1: (g1 * beta).into_affine(),
        delta_g1: (g1 * delta).into_affine(),
        a_query: g1.batch_mul(&eval.u),
        b_g1_query: g1.batch_mul(&eval.v),
        b_g2_query: g2.batch_mul(&eval.v),
        h_query: g1.batch_mul(&h_scalars),
        l_query: g1.batch_mul(&l_scalars),
        vk: vk.clone(),
    };
    (pk, vk)
}

/// Proves `z = (1, public, witness)`. The caller must have checked that `z`
/// satisfies `r1cs`; an unsatisfying `z` yields a proof that fails to verify.
pub fn prove_unchecked<R: RngCore + CryptoRng>(pk: &ProvingKey, r1cs: &R1cs, z: &[Fr], rng: &mut R) -> Proof {
    let qap = Qap::new(r1cs);
    let h = qap.quotient(z);
    let (r, s) = (Fr::rand(rng), Fr::rand(rng));
    let num_inputs = qap.num_inputs();

    let msm1 = |bases: &[G1Affine], scalars: &[Fr]| G1Projective::msm_unchecked(bases, scalars);
    let a = pk.vk.alpha_g1 + msm1(&pk.a_query, z) + pk.delta_g1 * r;
    let b_g2 = pk.vk.beta_g2 + G2Projective::msm_unchecked(&pk.b_g2_query, z) + pk.vk.delta_g2 * s;
    let b_g1 = pk.beta_g1 + msm1(&pk.b_g1_query, z) + pk.delta_g1 * s;
    let c = msm1(&pk.l_query, &z[num_inputs..]) + msm1(&pk.h_query, &h) + a * s + b_g1 * r
        - pk.delta_g1 * (r * s);

    Proof {
        a: a.into_affine(),
        b: b_g2.into_affine(),
        c: c.into_affine(),
    }
}

/// Checks `e(A, B) = e(α, β) · e(IC(x), γ) · e(C, δ)`.
pub fn verify(vk: &VerifyingKey, public: &[Fr], proof: &Proof) -> bool {
    if public.len() + 1 != vk.ic.len() {
        return false;
    }
    let ic = vk.ic[0].into_group() + G1Projective::msm_unchecked(&vk.ic[1..], public);
    let lhs = Bn254::multi_pairing(
        [proof.a, (-ic).into_affine(), -proof.c],
        [proof.b, vk.gamma_g2, vk.delta_g2],
    );
    let rhs: PairingOutput<Bn254> = Bn254::pairing(vk.alpha_g1, vk.beta_g2);
    !rhs.0.is_one() && lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn toy_completeness_and_soundness_smoke() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let r1cs = toy::cubic_circuit();
        let (pk, vk) = keygen(&r1cs, &mut rng);
        let (public, witness) = toy::cubic_assignment(Fr::from(3u64));
        assert_eq!(public[0], Fr::from(35u64));
        let z = r1cs.assignment(&public, &witness).unwrap();
        let proof = prove_unchecked(&pk, &r1cs, &z, &mut rng);
        assert!(verify(&vk, &public, &proof));
        assert!(!verify(&vk, &[Fr::from(36u64)], &proof));
        assert!(!verify(&vk, &[], &proof));

        let mut bad = z.clone();
        bad[2] = Fr::from(4u64);
        let forged = prove_unchecked(&pk, &r1cs, &bad, &mut rng);
        assert!(!verify(&vk, &public, &forged));
    }

    #[test]
    fn proofs_are_randomized() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let r1cs = toy::cubic_circuit();
        let (pk, vk) = keygen(&r1cs, &mut rng);
        let (public, witness) = toy::cubic_assignment(Fr::from(9u64));
        let z = r1cs.assignment(&public, &witness).unwrap();
        let p1 = prove_unchecked(&pk, &r1cs, &z, &mut rng);
        let p2 = prove_unchecked(&pk, &r1cs, &z, &mut rng);
        assert_ne!(p1, p2);
        assert!(verify(&vk, &public, &p1) && verify(&vk, &public, &p2));
    }

    #[test]
    fn keys_are_seed_deterministic_and_seed_dependent() {
        let r1cs = toy::cubic_circuit();
        let (pk1, _) = keygen(&r1cs, &mut ChaCha20Rng::seed_from_u64(5));
        let (pk2, _) = keygen(&r1cs, &mut ChaCha20Rng::seed_from_u64(5));
        let (pk3, vk3) = keygen(&r1cs, &mut ChaCha20Rng::seed_from_u64(6));
        assert_eq!(pk1, pk2);
        assert_ne!(pk1, pk3);
        let (public, witness) = toy::cubic_assignment(Fr::from(2u64));
        let z = r1cs.assignment(&public, &witness).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        assert!(verify(&vk3, &public, &prove_unchecked(&pk3, &r1cs, &z, &mut rng)));
        // Cross-key proofs do not verify.
        assert!(!verify(&vk3, &public, &prove_unchecked(&pk1, &r1cs, &z, &mut rng)));
    }
}
