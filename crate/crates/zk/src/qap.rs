//! R1CS to QAP reduction over a radix-2 evaluation domain.
//!
//! Row `i < m` of the QAP is constraint `i`. The next `1 + num_public` rows
//! are input-consistency rows with `A = z_j` and `B = C = 0`; they make the
//! input polynomials linearly independent, which the verifier's input
//! commitment relies on. Remaining rows up to the domain size are zero.

use ark_ff::{FftField, Field, One, Zero};
use ark_poly::univariate::DensePolynomial;
use ark_poly::{DenseUVPolynomial, EvaluationDomain, Radix2EvaluationDomain};

use crate::r1cs::R1cs;
use crate::Fr;

pub type Domain = Radix2EvaluationDomain<Fr>;

type SparseRow = Vec<(usize, Fr)>;

#[derive(Debug, Clone)]
pub struct Qap {
    domain: Domain,
    num_vars: usize,
    num_inputs: usize,
    a: Vec<SparseRow>,
    b: Vec<SparseRow>,
    c: Vec<SparseRow>,
}

/// All variable polynomials evaluated at one point, plus `t` there.
#[derive(Debug, Clone)]
pub struct QapEvaluation {
    pub u: Vec<Fr>,
    pub v: Vec<Fr>,
    pub w: Vec<Fr>,
    pub t: Fr,
}

impl Qap {
    pub fn new(r1cs: &R1cs) -> Self {
        let num_inputs = 1 + r1cs.num_public();
        let rows = r1cs.num_constraints() + num_inputs;
        let domain = Domain::new(rows).expect("BN254 two-adicity covers any practical circuit");
        let mut a: Vec<SparseRow> = Vec::with_capacity(rows);
        let mut b: Vec<SparseRow> = Vec::with_capacity(rows);
        let mut c: Vec<SparseRow> = Vec::with_capacity(rows);
        for k in r1cs.constraints() {
            a.push(k.a.0.clone());
            b.push(k.b.0.clone());
            c.push(k.c.0.clone());
        }
        for j in 0..num_inputs {
            a.push(vec![(j, Fr::one())]);
            b.push(Vec::new());
            c.push(Vec::new());
        }
        Qap {
            domain,
            num_vars: r1cs.num_variables(),
            num_inputs,
            a,
            b,
            c,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.size()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    /// `t(X) = X^N - 1`.
    pub fn target(&self) -> DensePolynomial<Fr> {
        let mut coeffs = vec![Fr::zero(); self.domain_size() + 1];
        coeffs[0] = -Fr::one();
        coeffs[self.domain_size()] = Fr::one();
        DensePolynomial::from_coefficients_vec(coeffs)
    }

    fn column(&self, rows: &[SparseRow], j: usize) -> Vec<Fr> {
        let mut evals = vec![Fr::zero(); self.domain_size()];
        for (i, row) in rows.iter().enumerate() {
            for (v, coeff) in row {
                if *v == j {
                    evals[i] += coeff;
                }
            }
        }
        evals
    }

    /// `(u_j, v_j, w_j)` in coefficient form.
    pub fn variable_polys(&self, j: usize) -> [DensePolynomial<Fr>; 3] {
        [&self.a, &self.b, &self.c].map(|rows| {
            DensePolynomial::from_coefficients_vec(self.domain.ifft(&self.column(rows, j)))
        })
    }

    /// `⟨row, z⟩` for every row of A, B and C, padded to the domain size.
    pub fn row_evaluations(&self, z: &[Fr]) -> [Vec<Fr>; 3] {
        assert_eq!(z.len(), self.num_vars, "assignment length");
        [&self.a, &self.b, &self.c].map(|rows| {
            let mut out: Vec<Fr> = rows
                .iter()
                .map(|row| row.iter().map(|(v, c)| z[*v] * c).sum())
                .collect();
            out.resize(self.domain_size(), Fr::zero());
            out
        })
    }

    /// `A(X) = Σ z_j u_j(X)` and likewise `B`, `C`.
    pub fn combined(&self, z: &[Fr]) -> [DensePolynomial<Fr>; 3] {
        self.row_evaluations(z)
            .map(|evals| DensePolynomial::from_coefficients_vec(self.domain.ifft(&evals)))
    }

    /// `(A·B - C) mod t`. Since `X^N ≡ 1 (mod t)`, reduction folds
    /// coefficient `i + kN` onto `i`.
    pub fn remainder(&self, z: &[Fr]) -> DensePolynomial<Fr> {
        let [a, b, c] = self.combined(z);
        let p = &(&a * &b) - &c;
        let n = self.domain_size();
        let mut r = vec![Fr::zero(); n];
        for (i, coeff) in p.coeffs.iter().enumerate() {
            r[i % n] += coeff;
        }
        DensePolynomial::from_coefficients_vec(r)
    }

    pub fn is_divisible(&self, z: &[Fr]) -> bool {
        self.remainder(z).is_zero()
    }

    /// Coefficients of `h = (A·B - C) / t`, length `N - 1`.
    ///
    /// Evaluates on the coset `g·H`, where `t` is the non-zero constant
    /// `g^N - 1`. Only meaningful when `z` satisfies the constraints.
    pub fn quotient(&self, z: &[Fr]) -> Vec<Fr> {
        let n = self.domain_size();
        let coset = self
            .domain
            .get_coset(Fr::GENERATOR)
            .expect("generator is a valid coset offset");
        let [mut a, mut b, mut c] = self.row_evaluations(z);
        for v in [&mut a, &mut b, &mut c] {
            self.domain.ifft_in_place(v);
            coset.fft_in_place(v);
        }
        let t_inv = self
            .domain
            .evaluate_vanishing_polynomial(Fr::GENERATOR)
            .inverse()
            .expect("coset avoids the domain");
        let mut h: Vec<Fr> = a
            .iter()
            .zip(&b)
            .zip(&c)
            .map(|((a, b), c)| (*a * b - c) * t_inv)
            .collect();
        coset.ifft_in_place(&mut h);
        h.truncate(n - 1);
        h
    }

    /// Evaluates every `u_j, v_j, w_j` and `t` at `x`, via the Lagrange basis.
    pub fn evaluate_at(&self, x: Fr) -> QapEvaluation {
        let lagrange = self.domain.evaluate_all_lagrange_coefficients(x);
        let fold = |rows: &[SparseRow]| {
            let mut out = vec![Fr::zero(); self.num_vars];
            for (row, l) in rows.iter().zip(&lagrange) {
                for (v, c) in row {
                    out[*v] += *c * l;
                }
            }
            out
        };
        QapEvaluation {
            u: fold(&self.a),
            v: fold(&self.b),
            w: fold(&self.c),
            t: self.domain.evaluate_vanishing_polynomial(x),
        }
    }
}
