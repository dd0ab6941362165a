// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::space::{HilbertSpace, SPIN};
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense square operator on a [`HilbertSpace`].
///
/// Arithmetic through the `std::ops` impls panics when the two operands live
/// on different spaces; builders never mix spaces, so a mismatch is a bug.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: Arc<HilbertSpace>,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: Arc<HilbertSpace>, matrix: CMatrix) -> Result<Self> {
        let n = space.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Dimension(format!(
                "matrix is {}x{} but space {} has dimension {n}",
                matrix.nrows(),
                matrix.ncols(),
                space
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: Arc<HilbertSpace>) -> Self {
        let n = space.total_dim();
        Self { space, matrix: CMatrix::identity(n, n) }
    }

    pub fn zeros(space: Arc<HilbertSpace>) -> Self {
        let n = space.total_dim();
        Self { space, matrix: CMatrix::zeros(n, n) }
    }

    /// Diagonal operator from real entries.
    pub fn diagonal(space: Arc<HilbertSpace>, diag: &[f64]) -> Result<Self> {
        let n = space.total_dim();
        if diag.len() != n {
            return Err(Error::Dimension(format!("diagonal has {} entries, space needs {n}", diag.len())));
        }
        let matrix = CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO });
        Ok(Self { space, matrix })
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

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { space: self.space.clone(), matrix: &self.matrix * s }
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        self * other - other * self
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest entry of `|A - A^dag|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entry of `|U^dag U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.matrix.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Spectral norm of a Hermitian operator (largest |eigenvalue|).
    pub fn hermitian_spectral_norm(&self) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(self.matrix.clone());
        eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Real eigenvalues of a Hermitian operator in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let eig = nalgebra::SymmetricEigen::new(self.matrix.clone());
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    fn assert_same_space(&self, other: &Operator) {
        assert!(
            self.space == other.space,
            "operator space mismatch: {} vs {}",
            self.space,
            other.space
        );
    }

    pub fn check_space(&self, space: &HilbertSpace) -> Result<()> {
        if *self.space != *space {
            return Err(Error::SpaceMismatch(format!("operator on {} used with {}", self.space, space)));
        }
        Ok(())
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix + &rhs.matrix }
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        &self + &rhs
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix - &rhs.matrix }
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        &self - &rhs
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix * &rhs.matrix }
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        &self * &rhs
    }
}

macro_rules! mixed_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Operator> for Operator {
            type Output = Operator;
            fn $m(self, rhs: &Operator) -> Operator {
                (&self).$m(rhs)
            }
        }

        impl $tr<Operator> for &Operator {
            type Output = Operator;
            fn $m(self, rhs: Operator) -> Operator {
                self.$m(&rhs)
            }
        }
    };
}

mixed_binop!(Add, add);
mixed_binop!(Sub, sub);
mixed_binop!(Mul, mul);

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Mul<f64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        &self * rhs
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<C64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-ONE)
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        -&self
    }
}

/// Truncated bosonic lowering operator on a single `mode` factor.
pub fn destroy(n_levels: usize) -> Result<Operator> {
    if n_levels < 2 {
        return Err(Error::Dimension(format!("destroy needs at least 2 levels (got {n_levels})")));
    }
    let space = HilbertSpace::single("mode", n_levels)?;
    let mut m = CMatrix::zeros(n_levels, n_levels);
    for n in 1..n_levels {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator::new(space, m)
}

/// Truncated number operator `b^dag b` on a single `mode` factor.
pub fn number(n_levels: usize) -> Result<Operator> {
    let b = destroy(n_levels)?;
    Ok(&b.dagger() * &b)
}

/// Spin matrices in the dark/bright basis.
///
/// Basis order: dimension 2 is `(|D>, |B>)`; dimension 3 is `(|0>, |D>, |B>)`.
/// `sigma_z = |B><B| - |D><D|` and `sigma_minus = |D><B|`, so `sigma_z`
/// vanishes on `|0>`.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub dim: usize,
    pub sigma_z: Operator,
    pub sigma_x: Operator,
    pub sigma_plus: Operator,
    pub sigma_minus: Operator,
    /// `|0><0|`, present only for dimension 3.
    pub proj_zero: Option<Operator>,
    /// `|D><D| - |0><0|`, present only for dimension 3.
    pub sigma_z_prime: Option<Operator>,
}

impl SpinOperators {
    pub fn dark_index(&self) -> usize {
        spin_dark_index(self.dim)
    }

    pub fn bright_index(&self) -> usize {
        spin_dark_index(self.dim) + 1
    }
}

/// Position of `|D>` in the spin basis; `|B>` follows it and `|0>` (when
/// present) comes first.
pub fn spin_dark_index(spin_dim: usize) -> usize {
    if spin_dim == 3 { 1 } else { 0 }
}

pub fn spin_operators(spin_dim: usize) -> Result<SpinOperators> {
    if !(spin_dim == 2 || spin_dim == 3) {
        return Err(Error::Dimension(format!("spin dimension must be 2 or 3 (got {spin_dim})")));
    }
    let space = HilbertSpace::single(SPIN, spin_dim)?;
    let d = spin_dark_index(spin_dim);
    let b = d + 1;
    let mut minus = CMatrix::zeros(spin_dim, spin_dim);
    minus[(d, b)] = ONE;
    let mut z = CMatrix::zeros(spin_dim, spin_dim);
    z[(b, b)] = ONE;
    z[(d, d)] = -ONE;
    let sigma_minus = Operator::new(space.clone(), minus)?;
    let sigma_plus = sigma_minus.dagger();
    let sigma_x = &sigma_plus + &sigma_minus;
    let sigma_z = Operator::new(space.clone(), z)?;
    let (proj_zero, sigma_z_prime) = if spin_dim == 3 {
        let mut p0 = CMatrix::zeros(3, 3);
        p0[(0, 0)] = ONE;
        let mut zp = CMatrix::zeros(3, 3);
        zp[(d, d)] = ONE;
        zp[(0, 0)] = -ONE;
        (Some(Operator::new(space.clone(), p0)?), Some(Operator::new(space, zp)?))
    } else {
        (None, None)
    };
    Ok(SpinOperators { dim: spin_dim, sigma_z, sigma_x, sigma_plus, sigma_minus, proj_zero, sigma_z_prime })
}

/// Single-factor projector `|i><j|` on a space of dimension `dim`.
pub fn local_outer(label: &str, dim: usize, i: usize, j: usize) -> Result<Operator> {
    if i >= dim || j >= dim {
        return Err(Error::Dimension(format!("outer product index out of range for dim {dim}")));
    }
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = ONE;
    Operator::new(HilbertSpace::single(label, dim)?, m)
}

/// Kronecker-embed a single-factor operator into `space` at `slot`,
/// padding every other factor with the identity.
pub fn embed(op: &Operator, space: &Arc<HilbertSpace>, slot: &str) -> Result<Operator> {
    let pos = space
        .position(slot)
        .ok_or_else(|| Error::Dimension(format!("space {space} has no factor '{slot}'")))?;
    let factor_dim = space.factors()[pos].dim;
    if op.dim() != factor_dim {
        return Err(Error::Dimension(format!(
            "operator dimension {} does not match factor '{slot}' dimension {factor_dim}",
            op.dim()
        )));
    }
    let left: usize = space.factors()[..pos].iter().map(|f| f.dim).product();
    let right: usize = space.factors()[pos + 1..].iter().map(|f| f.dim).product();
    let n = space.total_dim();
    let mut m = CMatrix::zeros(n, n);
    let local = op.matrix();
    for l in 0..left {
        for a in 0..factor_dim {
            for b in 0..factor_dim {
                let v = local[(a, b)];
                if v == ZERO {
                    continue;
                }
                for r in 0..right {
                    let row = (l * factor_dim + a) * right + r;
                    let col = (l * factor_dim + b) * right + r;
                    m[(row, col)] = v;
                }
            }
        }
    }
    Operator::new(space.clone(), m)
}

/// Ladder and spin operators of the (b1, b2, spin) layout, embedded once.
#[derive(Clone, Debug)]
pub struct HybridOperators {
    pub space: Arc<HilbertSpace>,
    pub b1: Operator,
    pub b2: Operator,
    pub n1: Operator,
    pub n2: Operator,
    pub sigma_z: Operator,
    pub sigma_x: Operator,
    pub sigma_plus: Operator,
    pub sigma_minus: Operator,
    pub proj_zero: Option<Operator>,
    pub sigma_z_prime: Option<Operator>,
    pub spin: SpinOperators,
}

impl HybridOperators {
    pub fn new(space: &Arc<HilbertSpace>) -> Result<Self> {
        use super::space::{B1, B2};
        let d1 = space.dim_of(B1).ok_or_else(|| Error::Dimension(format!("{space} has no b1 factor")))?;
        let d2 = space.dim_of(B2).ok_or_else(|| Error::Dimension(format!("{space} has no b2 factor")))?;
        let ds = space.dim_of(SPIN).ok_or_else(|| Error::Dimension(format!("{space} has no spin factor")))?;
        let b1 = embed(&destroy(d1)?, space, B1)?;
        let b2 = embed(&destroy(d2)?, space, B2)?;
        let spin = spin_operators(ds)?;
        let n1 = &b1.dagger() * &b1;
        let n2 = &b2.dagger() * &b2;
        let lift = |op: &Operator| embed(op, space, SPIN);
        Ok(Self {
            space: space.clone(),
            sigma_z: lift(&spin.sigma_z)?,
            sigma_x: lift(&spin.sigma_x)?,
            sigma_plus: lift(&spin.sigma_plus)?,
            sigma_minus: lift(&spin.sigma_minus)?,
            proj_zero: spin.proj_zero.as_ref().map(lift).transpose()?,
            sigma_z_prime: spin.sigma_z_prime.as_ref().map(lift).transpose()?,
            b1,
            b2,
            n1,
            n2,
            spin,
        })
    }

    pub fn identity(&self) -> Operator {
        Operator::identity(self.space.clone())
    }

    /// Embedded spin projector `|i><j|` in spin-basis indices.
    pub fn spin_outer(&self, i: usize, j: usize) -> Result<Operator> {
        embed(&local_outer(SPIN, self.spin.dim, i, j)?, &self.space, SPIN)
    }

    /// Projector onto the highest Fock level of mode `slot`.
    pub fn top_level_projector(&self, slot: &str) -> Result<Operator> {
        let d = self
            .space
            .dim_of(slot)
            .ok_or_else(|| Error::Dimension(format!("no factor '{slot}'")))?;
        embed(&local_outer(slot, d, d - 1, d - 1)?, &self.space, slot)
    }
}
