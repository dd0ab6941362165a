// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use nalgebra::DVector;

use super::operator::{CMatrix, Operator, C64, ZERO};
use super::space::HilbertSpace;
use crate::error::{Error, Result};

pub type CVector = DVector<C64>;

pub const KET_NORM_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct KetState {
    space: Arc<HilbertSpace>,
    amplitudes: CVector,
}

impl KetState {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(space: Arc<HilbertSpace>, amplitudes: CVector) -> Result<Self> {
        check_len(&space, amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::InvalidState(format!("ket norm is {norm}, expected 1")));
        }
        Ok(Self { space, amplitudes })
    }

    /// Normalizes the amplitudes; fails on the zero vector.
    pub fn normalized(space: Arc<HilbertSpace>, amplitudes: CVector) -> Result<Self> {
        check_len(&space, amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize a vector of norm {norm}")));
        }
        Ok(Self { space, amplitudes: amplitudes / C64::new(norm, 0.0) })
    }

    /// Product basis state with one level per factor.
    pub fn basis(space: Arc<HilbertSpace>, levels: &[usize]) -> Result<Self> {
        let idx = space.index(levels)?;
        let mut v = CVector::zeros(space.total_dim());
        v[idx] = C64::new(1.0, 0.0);
        Ok(Self { space, amplitudes: v })
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &KetState) -> Result<C64> {
        same_space(&self.space, &other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &KetState) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Applies an operator and renormalizes.
    pub fn apply_normalized(&self, op: &Operator) -> Result<KetState> {
        op.check_space(&self.space)?;
        KetState::normalized(self.space.clone(), op.matrix() * &self.amplitudes)
    }

    /// Applies a unitary without renormalizing (norm is checked).
    pub fn evolve(&self, unitary: &Operator) -> Result<KetState> {
        unitary.check_space(&self.space)?;
        KetState::new(self.space.clone(), unitary.matrix() * &self.amplitudes)
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { space: self.space.clone(), matrix: m }
    }
}

/// Density operator with validated Hermiticity, trace and positivity.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: Arc<HilbertSpace>,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(space: Arc<HilbertSpace>, matrix: CMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(space, matrix)?;
        rho.validate(HERMITIAN_TOL, TRACE_TOL, POSITIVITY_TOL)?;
        Ok(rho)
    }

    /// Only the shape is checked; used inside integrators between checkpoints.
    pub fn new_unchecked(space: Arc<HilbertSpace>, matrix: CMatrix) -> Result<Self> {
        check_len(&space, matrix.nrows())?;
        check_len(&space, matrix.ncols())?;
        Ok(Self { space, matrix })
    }

    /// Thermal (Bose-Einstein) state of a single mode truncated to `levels`,
    /// renormalized after truncation.
    pub fn thermal_mode(label: &str, levels: usize, n_th: f64) -> Result<Self> {
        if !(n_th >= 0.0) {
            return Err(Error::InvalidParameter(format!("thermal occupation must be >= 0 (got {n_th})")));
        }
        let space = HilbertSpace::single(label, levels)?;
        let ratio = if n_th == 0.0 { 0.0 } else { n_th / (1.0 + n_th) };
        let weights: Vec<f64> = (0..levels).map(|n| ratio.powi(n as i32)).collect();
        let total: f64 = weights.iter().sum();
        let m = CMatrix::from_fn(levels, levels, |i, j| if i == j { C64::new(weights[i] / total, 0.0) } else { ZERO });
        Self::new(space, m)
    }

    pub fn validate(&self, herm_tol: f64, trace_tol: f64, pos_tol: f64) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > herm_tol {
            return Err(Error::InvalidState(format!("density matrix not Hermitian (defect {herm:.3e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
            return Err(Error::InvalidState(format!("density matrix trace is {tr}")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -pos_tol {
            return Err(Error::InvalidState(format!("density matrix has eigenvalue {min_eig:.3e}")));
        }
        Ok(())
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(herm);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_to_ket(&self, ket: &KetState) -> Result<f64> {
        same_space(&self.space, ket.space())?;
        let v = ket.amplitudes();
        Ok(v.dotc(&(&self.matrix * v)).re)
    }

    /// Reduced state of one factor.
    pub fn partial_trace_keep(&self, label: &str) -> Result<DensityMatrix> {
        let pos = self
            .space
            .position(label)
            .ok_or_else(|| Error::Dimension(format!("space {} has no factor '{label}'", self.space)))?;
        let factors = self.space.factors();
        let d = factors[pos].dim;
        let left: usize = factors[..pos].iter().map(|f| f.dim).product();
        let right: usize = factors[pos + 1..].iter().map(|f| f.dim).product();
        let mut out = CMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let mut acc = ZERO;
                for l in 0..left {
                    for r in 0..right {
                        let i = (l * d + a) * right + r;
                        let j = (l * d + b) * right + r;
                        acc += self.matrix[(i, j)];
                    }
                }
                out[(a, b)] = acc;
            }
        }
        DensityMatrix::new_unchecked(HilbertSpace::single(label, d)?, out)
    }
}

/// Anything an expectation value can be taken in.
pub trait QuantumState {
    fn space(&self) -> &Arc<HilbertSpace>;
    fn expect_unchecked(&self, op: &Operator) -> C64;
}

impl QuantumState for KetState {
    fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    fn expect_unchecked(&self, op: &Operator) -> C64 {
        self.amplitudes.dotc(&(op.matrix() * &self.amplitudes))
    }
}

impl QuantumState for DensityMatrix {
    fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    fn expect_unchecked(&self, op: &Operator) -> C64 {
        trace_of_product(op.matrix(), &self.matrix)
    }
}

/// `Tr(op rho)` or `<psi|op|psi>`.
pub fn expect<S: QuantumState + ?Sized>(op: &Operator, state: &S) -> Result<C64> {
    op.check_space(state.space())?;
    Ok(state.expect_unchecked(op))
}

/// `Tr(a b)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Tensor product of single-factor kets in the order of `space`'s factors.
pub fn product_ket(space: Arc<HilbertSpace>, parts: &[&CVector]) -> Result<KetState> {
    if parts.len() != space.factors().len() {
        return Err(Error::Dimension(format!("expected {} factor kets", space.factors().len())));
    }
    let mut acc = CVector::from_element(1, C64::new(1.0, 0.0));
    for (f, p) in space.factors().iter().zip(parts) {
        if p.len() != f.dim {
            return Err(Error::Dimension(format!("factor '{}' ket has length {}, expected {}", f.label, p.len(), f.dim)));
        }
        acc = acc.kronecker(*p);
    }
    KetState::normalized(space, acc)
}

fn check_len(space: &HilbertSpace, len: usize) -> Result<()> {
    if len != space.total_dim() {
        return Err(Error::Dimension(format!("length {len} does not match space {space} (dim {})", space.total_dim())));
    }
    Ok(())
}

fn same_space(a: &HilbertSpace, b: &HilbertSpace) -> Result<()> {
    if a != b {
        return Err(Error::SpaceMismatch(format!("{a} vs {b}")));
    }
    Ok(())
}
