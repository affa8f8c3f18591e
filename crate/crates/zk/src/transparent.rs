//! Test-only backend: the "proof" is a hash commitment to a statement whose
//! witness the prover has checked against the circuit in the clear.
//!
//! It is neither zero-knowledge nor sound against a malicious prover. It
//! exists so multi-node simulations can run without pairing work, and it is
//! compiled only with the `transparent-backend` feature.

use zkbid_core::hash::{digest_parts, Digest32};

use crate::container::{Backend, Proof, ProvingKey, VerificationKey};
use crate::r1cs::R1cs;
use crate::{Fr, ZkError};

const TAG: &[u8] = b"ZKBID/TRANSPARENT/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransparentKey {
    pub circuit_digest: Digest32,
}

impl TransparentKey {
    pub fn to_bytes(&self) -> [u8; 32] {
        self.circuit_digest.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| ZkError::Malformed("transparent key must be 32 bytes".into()))?;
        Ok(TransparentKey {
            circuit_digest: Digest32(arr),
        })
    }
}

pub fn keygen(circuit: &R1cs) -> (ProvingKey, VerificationKey) {
    let key = TransparentKey {
        circuit_digest: circuit.digest(),
    };
    (ProvingKey::Transparent(key), VerificationKey::Transparent(key))
}

fn commitment(key: &TransparentKey, public: &[Fr]) -> [u8; 32] {
    let inputs: Vec<u8> = public.iter().flat_map(crate::circuit::fr_to_bytes).collect();
    digest_parts(&[TAG, key.circuit_digest.as_bytes(), &inputs]).0
}

/// Caller has already checked satisfiability.
pub(crate) fn prove(key: &TransparentKey, public: &[Fr]) -> Proof {
    Proof::transparent(&commitment(key, public))
}

pub(crate) fn verify(key: &TransparentKey, public: &[Fr], proof: &Proof) -> bool {
    match proof.payload(Backend::Transparent) {
        Ok(payload) => payload == commitment(key, public),
        Err(_) => false,
    }
}
