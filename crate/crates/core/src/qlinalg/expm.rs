// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense matrix exponentials.
//!
//! Hermitian and anti-Hermitian generators go through an eigendecomposition;
//! anything else uses scaling and squaring with a degree-13 Pade approximant
//! (Higham 2005).

use nalgebra::SymmetricEigen;

use super::operator::{CMatrix, Operator, C64, I};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// `exp(scale * generator)`.
pub fn matrix_exponential(generator: &Operator, scale: C64) -> Result<Operator> {
    if !generator.is_finite() || !(scale.re.is_finite() && scale.im.is_finite()) {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let tol = HERMITIAN_TOL * generator.max_abs().max(1.0);
    let m = generator.matrix();
    let out = if generator.hermiticity_defect() <= tol {
        expm_hermitian(m, scale)
    } else if anti_hermiticity_defect(m) <= tol {
        // A = i H with H = -i A Hermitian, so exp(sA) = exp((i s) H).
        expm_hermitian(&(m * -I), scale * I)
    } else {
        expm_pade(&(m * scale))
    };
    if !out.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("matrix exponential output"));
    }
    Operator::new(generator.space().clone(), out)
}

/// Unitary propagator `exp(-i H t)` of a Hermitian Hamiltonian.
pub fn propagator(hamiltonian: &Operator, t: f64) -> Result<Operator> {
    matrix_exponential(hamiltonian, C64::new(0.0, -t))
}

fn anti_hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] + m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn expm_hermitian(h: &CMatrix, scale: C64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let f = (scale * *lambda).exp();
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= f;
        }
    }
    scaled * v.adjoint()
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn expm_pade(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a / C64::new(2f64.powi(s), 0.0);
    let id = CMatrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9)) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8)) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Pade denominator is singular");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
