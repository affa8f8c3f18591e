//! `x³ + x + 5 = out`, a three-constraint circuit for exercising the QAP and
//! prover on something small enough to check by hand.
//!
//! Variables: `[1, out, x, x², x³]`.

use crate::r1cs::{LinearCombination as Lc, R1cs, R1csBuilder, ONE};
use crate::Fr;

pub fn cubic_circuit() -> R1cs {
    let mut cs = R1csBuilder::new(1);
    let out = cs.public(0);
    let x = cs.alloc_witness();
    let x2 = cs.alloc_witness();
    let x3 = cs.alloc_witness();
    cs.enforce(Lc::var(x), Lc::var(x), Lc::var(x2));
    cs.enforce(Lc::var(x2), Lc::var(x), Lc::var(x3));
    cs.enforce(
        Lc::var(x3).term(x, Fr::from(1u64)).term(ONE, Fr::from(5u64)),
        Lc::var(ONE),
        Lc::var(out),
    );
    cs.build()
}

/// `(public, witness)` for a given `x`.
pub fn cubic_assignment(x: Fr) -> (Vec<Fr>, Vec<Fr>) {
    let x2 = x * x;
    let x3 = x2 * x;
    (vec![x3 + x + Fr::from(5u64)], vec![x, x2, x3])
}
