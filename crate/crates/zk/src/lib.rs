//! Zero-knowledge face-match proofs.
//!
//! The face-match predicate is compiled to an R1CS ([`circuit`]), reduced to a
//! QAP ([`qap`]) and proven with a Groth16 prover over BN254 ([`groth16`]).
//! [`ProvingKey`], [`VerificationKey`] and [`Proof`] are the versioned byte
//! containers that travel through files and transactions.

pub mod circuit;
pub mod container;
pub mod groth16;
pub mod qap;
pub mod r1cs;
pub mod toy;
#[cfg(feature = "transparent-backend")]
pub mod transparent;

use rand::{CryptoRng, RngCore};

pub use ark_bn254::Fr;
pub use circuit::{build_facematch_circuit, facematch_circuit, synthesize_witness, PublicInputs, Witness};
pub use container::{Backend, Proof, ProvingKey, VerificationKey};
pub use r1cs::R1cs;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZkError {
    #[error("similarity {similarity} is below threshold {tau_fixed}")]
    SimilarityBelowThreshold { similarity: i64, tau_fixed: i64 },
    #[error("vector {which} squared norm {norm_sq} deviates from 2^32 by more than {eps}")]
    NormOutOfTolerance { which: char, norm_sq: i64, eps: i64 },
    #[error("vector {which} coordinate {index} out of range: {value}")]
    CoordinateOutOfRange { which: char, index: usize, value: i64 },
    #[error("public input {0} out of range")]
    PublicInputOutOfRange(&'static str),
    #[error("witness violates constraint {0}")]
    UnsatisfiedWitness(usize),
    #[error("key was generated for a different circuit")]
    CircuitMismatch,
    #[error("malformed encoding: {0}")]
    Malformed(String),
}

/// Generates Groth16 keys for `circuit`. The trapdoor is dropped on return.
pub fn keygen<R: RngCore + CryptoRng>(circuit: &R1cs, rng: &mut R) -> (ProvingKey, VerificationKey) {
    let (pk, vk) = groth16::keygen(circuit, rng);
    (ProvingKey::Groth16(pk), VerificationKey::Groth16(vk))
}

/// Proves the face-match statement `public` with `witness`.
///
/// The assignment is checked against the circuit before any group work.
pub fn prove<R: RngCore + CryptoRng>(
    pk: &ProvingKey,
    public: &PublicInputs,
    witness: &Witness,
    rng: &mut R,
) -> Result<Proof, ZkError> {
    let circuit = facematch_circuit();
    let public = public.to_field_elements()?;
    let z = circuit
        .assignment(&public, witness.values())
        .map_err(|e| ZkError::Malformed(e.to_string()))?;
    if let Some(i) = circuit.first_unsatisfied(&z) {
        return Err(ZkError::UnsatisfiedWitness(i));
    }
    match pk {
        ProvingKey::Groth16(pk) => {
            if pk.circuit_digest != circuit.digest() {
                return Err(ZkError::CircuitMismatch);
            }
            let proof = groth16::prove_unchecked(pk, circuit, &z, rng);
            Ok(Proof::groth16(&proof))
        }
        #[cfg(feature = "transparent-backend")]
        ProvingKey::Transparent(key) => {
            if key.circuit_digest != circuit.digest() {
                return Err(ZkError::CircuitMismatch);
            }
            Ok(transparent::prove(key, &public))
        }
    }
}

/// Accepts iff the backend's verification equation holds. Malformed keys,
/// inputs or proofs are rejections.
pub fn verify(vk: &VerificationKey, public: &PublicInputs, proof: &Proof) -> bool {
    let Ok(public) = public.to_field_elements() else {
        return false;
    };
    match vk {
        VerificationKey::Groth16(vk) => match proof.decode_groth16() {
            Ok(proof) => groth16::verify(vk, &public, &proof),
            Err(_) => false,
        },
        #[cfg(feature = "transparent-backend")]
        VerificationKey::Transparent(key) => transparent::verify(key, &public, proof),
    }
}

/// [`verify`] over raw container bytes.
pub fn verify_bytes(vk: &[u8], public: &PublicInputs, proof: &[u8]) -> bool {
    match VerificationKey::from_bytes(vk) {
        Ok(vk) => verify(&vk, public, &Proof::from_bytes_unchecked(proof)),
        Err(_) => false,
    }
}
