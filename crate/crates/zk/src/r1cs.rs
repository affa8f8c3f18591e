//! Rank-1 constraint systems over the BN254 scalar field.
//!
//! Variables are indexed into the full assignment `z = (1, public.., witness..)`:
//! index 0 is the constant one, `1..=num_public` are public inputs and the
//! rest are witness variables.

use ark_ff::{BigInteger, Field, PrimeField};
use zkbid_core::hash::Digest32;

use crate::Fr;

pub const ONE: usize = 0;

/// Sparse `Σ coeff · z[var]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearCombination(pub Vec<(usize, Fr)>);

impl LinearCombination {
    pub fn zero() -> Self {
        LinearCombination(Vec::new())
    }

    pub fn var(v: usize) -> Self {
        LinearCombination(vec![(v, Fr::from(1u64))])
    }

    pub fn constant(c: Fr) -> Self {
        LinearCombination(vec![(ONE, c)])
    }

    pub fn term(mut self, v: usize, coeff: Fr) -> Self {
        self.0.push((v, coeff));
        self
    }

    pub fn eval(&self, z: &[Fr]) -> Fr {
        self.0.iter().map(|(v, c)| z[*v] * c).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub a: LinearCombination,
    pub b: LinearCombination,
    pub c: LinearCombination,
}

impl Constraint {
    pub fn is_satisfied(&self, z: &[Fr]) -> bool {
        self.a.eval(z) * self.b.eval(z) == self.c.eval(z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct R1cs {
    num_public: usize,
    num_witness: usize,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum R1csError {
    #[error("constraint {constraint} references variable {var}, but only {num_vars} exist")]
    VariableOutOfRange { constraint: usize, var: usize, num_vars: usize },
    #[error("expected {expected} {kind} values, got {actual}")]
    AssignmentLength { kind: &'static str, expected: usize, actual: usize },
}

impl R1cs {
    pub fn new(num_public: usize, num_witness: usize, constraints: Vec<Constraint>) -> Result<Self, R1csError> {
        let r1cs = R1cs {
            num_public,
            num_witness,
            constraints,
        };
        let num_vars = r1cs.num_variables();
        for (i, c) in r1cs.constraints.iter().enumerate() {
            for (var, _) in c.a.0.iter().chain(&c.b.0).chain(&c.c.0) {
                if *var >= num_vars {
                    return Err(R1csError::VariableOutOfRange {
                        constraint: i,
                        var: *var,
                        num_vars,
                    });
                }
            }
        }
        Ok(r1cs)
    }

    pub fn num_public(&self) -> usize {
        self.num_public
    }

    pub fn num_witness(&self) -> usize {
        self.num_witness
    }

    pub fn num_variables(&self) -> usize {
        1 + self.num_public + self.num_witness
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn first_witness_index(&self) -> usize {
        1 + self.num_public
    }

    /// Concatenates `(1, public, witness)` after checking lengths.
    pub fn assignment(&self, public: &[Fr], witness: &[Fr]) -> Result<Vec<Fr>, R1csError> {
        if public.len() != self.num_public {
            return Err(R1csError::AssignmentLength {
                kind: "public",
                expected: self.num_public,
                actual: public.len(),
            });
        }
        if witness.len() != self.num_witness {
            return Err(R1csError::AssignmentLength {
                kind: "witness",
                expected: self.num_witness,
                actual: witness.len(),
            });
        }
        let mut z = Vec::with_capacity(self.num_variables());
        z.push(Fr::from(1u64));
        z.extend_from_slice(public);
        z.extend_from_slice(witness);
        Ok(z)
    }

    pub fn first_unsatisfied(&self, z: &[Fr]) -> Option<usize> {
        self.constraints.iter().position(|c| !c.is_satisfied(z))
    }

    pub fn unsatisfied(&self, z: &[Fr]) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_satisfied(z))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_satisfied(&self, z: &[Fr]) -> bool {
        z.len() == self.num_variables() && self.first_unsatisfied(z).is_none()
    }

    /// Keccak-256 over a canonical serialization of the whole system.
    pub fn digest(&self) -> Digest32 {
        let mut buf = Vec::new();
        buf.extend_from_slice(b"ZKBID/R1CS/v1");
        buf.extend_from_slice(&(self.num_public as u64).to_be_bytes());
        buf.extend_from_slice(&(self.num_witness as u64).to_be_bytes());
        buf.extend_from_slice(&(self.constraints.len() as u64).to_be_bytes());
        for c in &self.constraints {
            for lc in [&c.a, &c.b, &c.c] {
                buf.extend_from_slice(&(lc.0.len() as u32).to_be_bytes());
                for (v, coeff) in &lc.0 {
                    buf.extend_from_slice(&(*v as u64).to_be_bytes());
                    buf.extend_from_slice(&coeff.into_bigint().to_bytes_be());
                }
            }
        }
        zkbid_core::hash::digest(&buf)
    }
}

/// Incremental constructor. Public inputs are fixed up front so witness
/// indices can be handed out as variables are allocated.
#[derive(Debug)]
pub struct R1csBuilder {
    num_public: usize,
    num_witness: usize,
    constraints: Vec<Constraint>,
}

impl R1csBuilder {
    pub fn new(num_public: usize) -> Self {
        R1csBuilder {
            num_public,
            num_witness: 0,
            constraints: Vec::new(),
        }
    }

    pub fn public(&self, i: usize) -> usize {
        assert!(i < self.num_public, "public input {i} out of range");
        1 + i
    }

    pub fn alloc_witness(&mut self) -> usize {
        let v = 1 + self.num_public + self.num_witness;
        self.num_witness += 1;
        v
    }

    pub fn alloc_witnesses(&mut self, n: usize) -> Vec<usize> {
        (0..n).map(|_| self.alloc_witness()).collect()
    }

    pub fn enforce(&mut self, a: LinearCombination, b: LinearCombination, c: LinearCombination) {
        self.constraints.push(Constraint { a, b, c });
    }

    /// `v · (v - 1) = 0`.
    pub fn enforce_boolean(&mut self, v: usize) {
        self.enforce(
            LinearCombination::var(v),
            LinearCombination::var(v).term(ONE, -Fr::from(1u64)),
            LinearCombination::zero(),
        );
    }

    pub fn build(self) -> R1cs {
        R1cs::new(self.num_public, self.num_witness, self.constraints).expect("builder only hands out valid indices")
    }
}

/// Signed integer into the field.
pub fn fr_from_i64(v: i64) -> Fr {
    if v >= 0 {
        Fr::from(v as u64)
    } else {
        -Fr::from(v.unsigned_abs())
    }
}

/// `2^k` as a field element.
pub fn pow2(k: u32) -> Fr {
    Fr::from(2u64).pow([k as u64])
}
