// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! Squeezing amplification of the particle/wave phonon states and Wigner
//! tomography of single modes.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{
    destroy, matrix_exponential, number, product_ket, CVector, DensityMatrix, HilbertSpace, KetState, Operator, B1, B2,
    C64, ONE, ZERO,
};

pub const MODE: &str = "mode";

/// Smallest truncation accepted for squeezing parameter `r`.
pub fn guard_levels(r: f64) -> usize {
    (10.0 * r.abs().powi(2).max(1.0)).ceil() as usize
}

fn check_guard(r: f64, levels: usize) -> Result<()> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter(format!("squeezing parameter must be finite (got {r})")));
    }
    let need = guard_levels(r);
    if levels < need {
        return Err(Error::Truncation(format!("{levels} levels is below the squeezing guard of {need} for r = {r}")));
    }
    Ok(())
}

/// `exp[(r/2)(b+^2 - b^2)]` on a single mode.
pub fn squeeze_operator(r: f64, levels: usize) -> Result<Operator> {
    check_guard(r, levels)?;
    let b = destroy(levels)?;
    let bd = b.dagger();
    let gen = (&bd * &bd - &b * &b) * (0.5 * r);
    matrix_exponential(&gen, ONE)
}

/// `U |n>` on a single mode.
pub fn squeezed_fock(n: usize, r: f64, levels: usize) -> Result<KetState> {
    if n >= levels {
        return Err(Error::Dimension(format!("Fock level {n} outside {levels} levels")));
    }
    let u = squeeze_operator(r, levels)?;
    KetState::basis(HilbertSpace::single(MODE, levels)?, &[n])?.evolve(&u)
}

pub fn mean_occupation(state: &KetState) -> Result<f64> {
    let levels = state.space().total_dim();
    let n = Operator::new(state.space().clone(), number(levels)?.into_matrix())?;
    Ok(crate::qlinalg::expect(&n, state)?.re)
}

/// Closed forms `<S_0|n|S_0> = sinh^2 r` and `<S_1|n|S_1> = 3 sinh^2 r + 1`.
pub fn squeezed_moments(r: f64) -> (f64, f64) {
    let s2 = r.sinh().powi(2);
    (s2, 3.0 * s2 + 1.0)
}

/// Squeezed particle and wave states on a two-mode space:
/// `(e^{i phi}|S_10> + i|S_01>)/sqrt2` and
/// `((e^{i phi} - 1)|S_10> + i(e^{i phi} + 1)|S_01>)/2`.
pub fn amplified_states(phi: f64, r: f64, space: &Arc<HilbertSpace>) -> Result<(KetState, KetState)> {
    let (d1, d2) = match (space.dim_of(B1), space.dim_of(B2)) {
        (Some(a), Some(b)) if space.factors().len() == 2 => (a, b),
        _ => return Err(Error::Dimension(format!("{space} is not a two-mode space"))),
    };
    let s = |n: usize, d: usize| -> Result<CVector> { Ok(squeezed_fock(n, r, d)?.amplitudes().clone()) };
    let (s0_1, s1_1, s0_2, s1_2) = (s(0, d1)?, s(1, d1)?, s(0, d2)?, s(1, d2)?);
    let s10 = product_ket(space.clone(), &[&s1_1, &s0_2])?;
    let s01 = product_ket(space.clone(), &[&s0_1, &s1_2])?;
    let e = C64::from_polar(1.0, phi);
    let i = C64::new(0.0, 1.0);
    let p = s10.amplitudes() * (e * FRAC_1_SQRT_2) + s01.amplitudes() * (i * FRAC_1_SQRT_2);
    let w = s10.amplitudes() * ((e - ONE) * 0.5) + s01.amplitudes() * (i * (e + ONE) * 0.5);
    Ok((KetState::normalized(space.clone(), p)?, KetState::normalized(space.clone(), w)?))
}

/// `1 - |<W_r|P_r>|^2 = cos^2(phi) / 2`, independent of r.
pub fn infidelity(phi: f64) -> f64 {
    0.5 * phi.cos().powi(2)
}

pub fn infidelity_numeric(phi: f64, r: f64, levels: usize) -> Result<f64> {
    let space = HilbertSpace::two_mode(levels)?;
    let (p, w) = amplified_states(phi, r, &space)?;
    Ok(1.0 - w.fidelity(&p)?)
}

/// Square lattice over `[-half_width, half_width]^2` in (Re alpha, Im alpha).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub step: f64,
}

impl GridSpec {
    /// Lattice covering `+-max(4, 4 e^r)`.
    pub fn for_squeezing(r: f64, step: f64) -> Self {
        Self { half_width: 4.0f64.max(4.0 * r.abs().exp()), step }
    }

    pub fn axis(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::InvalidParameter(format!("grid step must be positive (got {})", self.step)));
        }
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(Error::InvalidParameter(format!("grid half-width must be positive (got {})", self.half_width)));
        }
        let n = (self.half_width / self.step).round() as i64;
        Ok((-n..=n).map(|k| k as f64 * self.step).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerField {
    pub re_alpha: Vec<f64>,
    pub im_alpha: Vec<f64>,
    /// Row `i` is `im_alpha[i]`, column `j` is `re_alpha[j]`.
    pub values: DMatrix<f64>,
    /// Lattice sum of W times the cell area.
    pub normalization: f64,
}

/// Scale factor between this module's W (unit integral) and the
/// `pi^-2 integral d^2 beta` kernel convention.
pub const KERNEL_SCALE: f64 = 1.0 / PI;

/// Wigner function at one point, normalized to unit integral over
/// d^2 alpha, from the Laguerre series evaluated by recurrence.
pub fn wigner_point(rho: &DensityMatrix, alpha: C64) -> f64 {
    let m = rho.matrix();
    let n = m.nrows();
    let a2 = alpha * 2.0;
    let mut w = vec![ZERO; n];
    w[0] = C64::new((-2.0 * alpha.norm_sqr()).exp() / PI, 0.0);
    let mut acc = m[(0, 0)].re * w[0].re;
    for k in 1..n {
        w[k] = a2 * w[k - 1] / (k as f64).sqrt();
        acc += 2.0 * (m[(0, k)] * w[k]).re;
    }
    for i in 1..n {
        let si = (i as f64).sqrt();
        let mut temp = w[i];
        w[i] = (a2.conj() * temp - w[i - 1] * si) / si;
        acc += (m[(i, i)] * w[i]).re;
        for k in i + 1..n {
            let next = (a2 * w[k - 1] - temp * si) / (k as f64).sqrt();
            temp = w[k];
            w[k] = next;
            acc += 2.0 * (m[(i, k)] * w[k]).re;
        }
    }
    2.0 * acc
}

pub fn wigner(rho: &DensityMatrix, grid: &GridSpec) -> Result<WignerField> {
    if rho.space().factors().len() != 1 {
        return Err(Error::Dimension("Wigner tomography needs a single-mode state".into()));
    }
    let axis = grid.axis()?;
    let rows: Vec<Vec<f64>> = axis
        .par_iter()
        .map(|&y| axis.iter().map(|&x| wigner_point(rho, C64::new(x, y))).collect())
        .collect();
    let n = axis.len();
    let values = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Wigner field"));
    }
    let normalization = values.sum() * grid.step * grid.step;
    Ok(WignerField { re_alpha: axis.clone(), im_alpha: axis, values, normalization })
}

/// Width of the connected W < 0 interval through the origin along a line
/// through 0 with direction `dir`; zero when W(0) >= 0.
pub fn negative_width(rho: &DensityMatrix, dir: C64, extent: f64, step: f64) -> Result<f64> {
    if !(step > 0.0) || !(extent > 0.0) {
        return Err(Error::InvalidParameter("need positive extent and step".into()));
    }
    let u = dir / dir.norm();
    let at = |s: f64| wigner_point(rho, u * s);
    if at(0.0) >= 0.0 {
        return Ok(0.0);
    }
    let edge = |sign: f64| {
        let mut s = 0.0;
        while s < extent {
            let next = s + step;
            let (a, b) = (at(sign * s), at(sign * next));
            if b >= 0.0 {
                return s + step * a / (a - b);
            }
            s = next;
        }
        extent
    };
    Ok(edge(1.0) + edge(-1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_zero_squeezing() {
        let u = squeeze_operator(0.0, 10).unwrap();
        assert!((&u - &Operator::identity(u.space().clone())).max_abs() < 1e-14);
    }

    #[test]
    fn guard() {
        assert_eq!(guard_levels(0.5), 10);
        assert_eq!(guard_levels(2.0), 40);
        assert!(squeeze_operator(2.0, 39).is_err());
        let u = squeeze_operator(2.0, 40).unwrap();
        assert!(u.unitarity_defect() < 1e-8);
    }

    #[test]
    fn moments_converge() {
        let (m0, m1) = squeezed_moments(1.0);
        assert!((m0 - 1.3811).abs() < 1e-4);
        assert!((m1 - 5.1433).abs() < 1e-4);
        let n0 = mean_occupation(&squeezed_fock(0, 1.0, 80).unwrap()).unwrap();
        let n1 = mean_occupation(&squeezed_fock(1, 1.0, 80).unwrap()).unwrap();
        assert!((n0 - m0).abs() < 1e-4, "{n0}");
        assert!((n1 - m1).abs() < 1e-3, "{n1}");
    }

    #[test]
    fn infidelity_closed_form() {
        assert_eq!(infidelity(0.0), 0.5);
        assert!(infidelity(PI / 2.0) < 1e-30);
        for phi in [0.0, 0.4, 1.1, 2.5] {
            let a = infidelity_numeric(phi, 0.0, 10).unwrap();
            let b = infidelity_numeric(phi, 0.7, 40).unwrap();
            assert!((a - infidelity(phi)).abs() < 1e-12);
            assert!((b - a).abs() < 1e-6);
        }
    }

    #[test]
    fn unsqueezed_states_reduce() {
        let s = HilbertSpace::two_mode(10).unwrap();
        let (p, w) = amplified_states(0.9, 0.0, &s).unwrap();
        let e = C64::from_polar(1.0, 0.9);
        let i = C64::new(0.0, 1.0);
        let mut pv = CVector::zeros(100);
        pv[s.index(&[1, 0]).unwrap()] = e * FRAC_1_SQRT_2;
        pv[s.index(&[0, 1]).unwrap()] = i * FRAC_1_SQRT_2;
        let mut wv = CVector::zeros(100);
        wv[s.index(&[1, 0]).unwrap()] = (e - ONE) * 0.5;
        wv[s.index(&[0, 1]).unwrap()] = i * (e + ONE) * 0.5;
        assert!((p.fidelity(&KetState::new(s.clone(), pv).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!((w.fidelity(&KetState::new(s.clone(), wv).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fock_wigner_laguerre() {
        // (2/pi) (-1)^n exp(-2|a|^2) L_n(4|a|^2)
        let laguerre = |n: usize, x: f64| -> f64 {
            let (mut l0, mut l1) = (1.0, 1.0 - x);
            if n == 0 {
                return l0;
            }
            for k in 1..n {
                let l2 = ((2 * k + 1) as f64 - x) * l1 / (k + 1) as f64 - k as f64 * l0 / (k + 1) as f64;
                l0 = l1;
                l1 = l2;
            }
            l1
        };
        for n in 0..5 {
            let rho = KetState::basis(HilbertSpace::single(MODE, 8).unwrap(), &[n]).unwrap().to_density_matrix();
            for a in [C64::new(0.0, 0.0), C64::new(0.3, -0.2), C64::new(-1.1, 0.7)] {
                let x = 4.0 * a.norm_sqr();
                let expect = 2.0 / PI * (-1f64).powi(n as i32) * (-x / 2.0).exp() * laguerre(n, x);
                assert!((wigner_point(&rho, a) - expect).abs() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn coherent_superposition_orientation() {
        // (|0> + |1>)/sqrt2 has <b> = 1/2, so W peaks on the positive real axis
        let s = HilbertSpace::single(MODE, 4).unwrap();
        let v = CVector::from_vec(vec![ONE, ONE, ZERO, ZERO]);
        let rho = KetState::normalized(s, v).unwrap().to_density_matrix();
        assert!(wigner_point(&rho, C64::new(0.4, 0.0)) > wigner_point(&rho, C64::new(-0.4, 0.0)));
        assert!((wigner_point(&rho, C64::new(0.0, 0.4)) - wigner_point(&rho, C64::new(0.0, -0.4))).abs() < 1e-14);
    }

    #[test]
    fn grid_rejects_bad_step() {
        let rho = KetState::basis(HilbertSpace::single(MODE, 3).unwrap(), &[0]).unwrap().to_density_matrix();
        assert!(wigner(&rho, &GridSpec { half_width: 4.0, step: 0.0 }).is_err());
        assert!(wigner(&rho, &GridSpec { half_width: 4.0, step: -0.1 }).is_err());
    }

    #[test]
    fn vacuum_field() {
        let rho = KetState::basis(HilbertSpace::single(MODE, 3).unwrap(), &[0]).unwrap().to_density_matrix();
        let f = wigner(&rho, &GridSpec { half_width: 4.0, step: 0.1 }).unwrap();
        assert!(f.values.iter().all(|v| *v >= 0.0));
        let c = f.re_alpha.len() / 2;
        assert_eq!(f.values.max(), f.values[(c, c)]);
        assert!((f.normalization - 1.0).abs() < 1e-6);
    }

    #[test]
    fn negative_widths() {
        let rho = KetState::basis(HilbertSpace::single(MODE, 4).unwrap(), &[1]).unwrap().to_density_matrix();
        // W_1 < 0 for |alpha| < 1/2
        let w = negative_width(&rho, C64::new(0.0, 1.0), 3.0, 1e-3).unwrap();
        assert!((w - 1.0).abs() < 1e-6);
        let vac = KetState::basis(HilbertSpace::single(MODE, 4).unwrap(), &[0]).unwrap().to_density_matrix();
        assert_eq!(negative_width(&vac, C64::new(1.0, 0.0), 3.0, 1e-3).unwrap(), 0.0);
    }
}
