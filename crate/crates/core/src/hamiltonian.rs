// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! Hamiltonian variants of the spin/two-CNT system, from the driven
//! three-level model down to the beam-splitter segments used by the
//! protocol. The NV spin is always written in the (|0>, |D>, |B>) basis
//! (or (|D>, |B>) for a bare qubit) with
//! |B> = (|+1> + |-1>)/sqrt2 and |D> = (|+1> - |-1>)/sqrt2.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{mediated_coupling, DerivedParams};
use crate::qlinalg::{HilbertSpace, HybridOperators, Operator, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianTag {
    FullTd,
    LowPlusAvg,
    SpinQubit,
    Effective,
    SegH0,
    SegH1,
    Jc,
}

impl HamiltonianTag {
    pub const ALL: [HamiltonianTag; 7] = [
        HamiltonianTag::FullTd,
        HamiltonianTag::LowPlusAvg,
        HamiltonianTag::SpinQubit,
        HamiltonianTag::Effective,
        HamiltonianTag::SegH0,
        HamiltonianTag::SegH1,
        HamiltonianTag::Jc,
    ];

    pub fn is_time_dependent(self) -> bool {
        self == HamiltonianTag::FullTd
    }

    pub fn name(self) -> &'static str {
        match self {
            HamiltonianTag::FullTd => "full-td",
            HamiltonianTag::LowPlusAvg => "low-plus-avg",
            HamiltonianTag::SpinQubit => "spin-qubit",
            HamiltonianTag::Effective => "effective",
            HamiltonianTag::SegH0 => "seg-h0",
            HamiltonianTag::SegH1 => "seg-h1",
            HamiltonianTag::Jc => "jc",
        }
    }
}

impl fmt::Display for HamiltonianTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HamiltonianTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown Hamiltonian '{s}'")))
    }
}

/// Rotating-frame driven model `H(t) = H_static + e^{2 i w0 t} V + h.c.`.
#[derive(Clone, Debug)]
pub struct TimeDependentHamiltonian {
    pub h_static: Operator,
    /// Positive-frequency drive part, `sqrt2 Omega |B><0|`.
    pub drive: Operator,
    pub omega_0: f64,
}

impl TimeDependentHamiltonian {
    pub fn at(&self, t: f64) -> Operator {
        let phase = C64::from_polar(1.0, 2.0 * self.omega_0 * t);
        let v = self.drive.scale(phase);
        &(&self.h_static + &v) + &v.dagger()
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        self.h_static.space()
    }

    /// Period of the carrier, pi / w0.
    pub fn period(&self) -> f64 {
        std::f64::consts::PI / self.omega_0
    }
}

fn require_spin_dim(ops: &HybridOperators, allowed: &[usize], what: &str) -> Result<()> {
    if allowed.contains(&ops.spin.dim) {
        Ok(())
    } else {
        Err(Error::Dimension(format!("{what} needs spin dimension in {allowed:?}, got {}", ops.spin.dim)))
    }
}

fn bright_dark(ops: &HybridOperators) -> Result<(Operator, Operator)> {
    let pb = ops.spin_outer(ops.spin.bright_index(), ops.spin.bright_index())?;
    let pd = ops.spin_outer(ops.spin.dark_index(), ops.spin.dark_index())?;
    Ok((pb, pd))
}

fn phonon_coupling(ops: &HybridOperators, dp: &DerivedParams) -> Operator {
    let q1 = &ops.b1 + &ops.b1.dagger();
    let q2 = &ops.b2 + &ops.b2.dagger();
    &(&ops.sigma_x * &q1) * dp.g1 + &(&ops.sigma_x * &q2) * dp.g2
}

/// Undriven part of the rotating-frame model:
/// `w_m sum n + Delta_- (P_B + P_D) + sqrt2 Omega (|B><0| + h.c.) + sum g sigma_x q`.
pub fn build_low(dp: &DerivedParams, space: &Arc<HilbertSpace>) -> Result<Operator> {
    let ops = HybridOperators::new(space)?;
    require_spin_dim(&ops, &[3], "the driven three-level model")?;
    let (pb, pd) = bright_dark(&ops)?;
    let drive = ops.spin_outer(ops.spin.bright_index(), 0)? * (SQRT_2 * dp.omega_rabi);
    let h = &(&ops.n1 + &ops.n2) * dp.omega_m
        + &(&pb + &pd) * dp.delta_minus
        + &drive
        + drive.dagger()
        + phonon_coupling(&ops, dp);
    Ok(h)
}

pub fn build_full_time_dependent(dp: &DerivedParams, space: &Arc<HilbertSpace>) -> Result<TimeDependentHamiltonian> {
    let ops = HybridOperators::new(space)?;
    require_spin_dim(&ops, &[3], "the driven three-level model")?;
    let h_static = build_low(dp, space)?;
    let drive = ops.spin_outer(ops.spin.bright_index(), 0)? * (SQRT_2 * dp.omega_rabi);
    Ok(TimeDependentHamiltonian { h_static, drive, omega_0: dp.omega_0 })
}

/// Counter-rotating drive folded in by time averaging:
/// `(3 Omega^2/Delta_+)(P_B + P_D) + (Omega^2/Delta_+)(P_B - P_D)`.
pub fn build_averaged_high(dp: &DerivedParams, space: &Arc<HilbertSpace>) -> Result<Operator> {
    let ops = HybridOperators::new(space)?;
    require_spin_dim(&ops, &[3], "the driven three-level model")?;
    let (pb, pd) = bright_dark(&ops)?;
    let w2 = dp.omega_rabi * dp.omega_rabi / dp.delta_plus;
    Ok(&(&pb + &pd) * (3.0 * w2) + &(&pb - &pd) * w2)
}

pub fn build_low_plus_avg(dp: &DerivedParams, space: &Arc<HilbertSpace>) -> Result<Operator> {
    if dp.omega_rabi > 0.0 && dp.delta_plus / dp.omega_rabi < 5.0 {
        log::warn!("Delta_+/Omega = {:.2}: time averaging of the drive is unreliable", dp.delta_plus / dp.omega_rabi);
    }
    Ok(build_low(dp, space)? + build_averaged_high(dp, space)?)
}

/// `w_m sum n + w_q sigma_z / 2 + sum g sigma_x q`.
pub fn build_spin_qubit(dp: &DerivedParams, space: &Arc<HilbertSpace>) -> Result<Operator> {
    let ops = HybridOperators::new(space)?;
    require_spin_dim(&ops, &[2, 3], "the spin-qubit model")?;
    Ok(&(&ops.n1 + &ops.n2) * dp.omega_m + &ops.sigma_z * (0.5 * dp.omega_q) + phonon_coupling(&ops, dp))
}

/// Dispersive beam-splitter Hamiltonian with the qubit Stark shift dropped.
pub fn build_effective(dp: &DerivedParams, space: &Arc<HilbertSpace>) -> Result<Operator> {
    let ops = HybridOperators::new(space)?;
    // prefactor 2 w_q / (w_q^2 - w_m^2), i.e. J for g1 = g2 = 1
    let c = mediated_coupling(1.0, 1.0, dp.omega_q, dp.omega_m)?;
    let exchange = &ops.b1 * &ops.b2.dagger() + &ops.b2 * &ops.b1.dagger();
    let phonon = &ops.n1 * (dp.g1 * dp.g1) + &ops.n2 * (dp.g2 * dp.g2) + exchange * (dp.g1 * dp.g2);
    Ok(&(&phonon * &ops.sigma_z) * c)
}

/// `H0 = J (n1 + n2 + b1 b2^dag + b2 b1^dag) sigma_z` or `H1 = J n1 sigma_z`.
pub fn build_segment(tag: HamiltonianTag, j: f64, space: &Arc<HilbertSpace>) -> Result<Operator> {
    if !(j > 0.0) {
        return Err(Error::InvalidParameter(format!("segment coupling J must be positive (got {j})")));
    }
    let ops = HybridOperators::new(space)?;
    let phonon = match tag {
        HamiltonianTag::SegH0 => &ops.n1 + &ops.n2 + &ops.b1 * &ops.b2.dagger() + &ops.b2 * &ops.b1.dagger(),
        HamiltonianTag::SegH1 => ops.n1.clone(),
        other => return Err(Error::InvalidParameter(format!("{other} is not a protocol segment"))),
    };
    Ok(&(&phonon * &ops.sigma_z) * j)
}

/// `g (sigma_+ b1 + sigma_- b1^dag)`.
pub fn build_jc(g: f64, space: &Arc<HilbertSpace>) -> Result<Operator> {
    let ops = HybridOperators::new(space)?;
    let a = &ops.sigma_plus * &ops.b1;
    Ok(&(&a + &a.dagger()) * g)
}

/// Static Hamiltonian for any tag except [`HamiltonianTag::FullTd`].
pub fn build_static(tag: HamiltonianTag, dp: &DerivedParams, space: &Arc<HilbertSpace>) -> Result<Operator> {
    match tag {
        HamiltonianTag::FullTd => Err(Error::InvalidParameter("full-td is time dependent; use build_full_time_dependent".into())),
        HamiltonianTag::LowPlusAvg => build_low_plus_avg(dp, space),
        HamiltonianTag::SpinQubit => build_spin_qubit(dp, space),
        HamiltonianTag::Effective => build_effective(dp, space),
        HamiltonianTag::SegH0 | HamiltonianTag::SegH1 => build_segment(tag, dp.j, space),
        HamiltonianTag::Jc => build_jc(dp.g(), space),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::reference_preset;
    use crate::qlinalg::{expect, propagator, KetState};

    fn preset() -> DerivedParams {
        reference_preset().unwrap()
    }

    #[test]
    fn all_static_builders_hermitian() {
        let dp = preset();
        let s3 = HilbertSpace::hybrid(3, 3).unwrap();
        for tag in HamiltonianTag::ALL.iter().copied().filter(|t| !t.is_time_dependent()) {
            let h = build_static(tag, &dp, &s3).unwrap();
            assert!(h.hermiticity_defect() < 1e-12 * h.max_abs().max(1.0), "{tag}");
        }
        let td = build_full_time_dependent(&dp, &s3).unwrap();
        for &t in &[0.0, 1.3e-9, 7.7e-7] {
            let h = td.at(t);
            assert!(h.hermiticity_defect() < 1e-12 * h.max_abs(), "t = {t}");
        }
    }

    #[test]
    fn driven_model_needs_three_levels() {
        let dp = preset();
        let s2 = HilbertSpace::hybrid(3, 2).unwrap();
        assert!(build_full_time_dependent(&dp, &s2).is_err());
        assert!(build_low_plus_avg(&dp, &s2).is_err());
    }

    #[test]
    fn undriven_spin_decouples_from_zero() {
        let mut dp = preset();
        dp.omega_rabi = 0.0;
        let s = HilbertSpace::hybrid(2, 3).unwrap();
        let td = build_full_time_dependent(&dp, &s).unwrap();
        let h = td.at(0.3e-6);
        let ops = HybridOperators::new(&s).unwrap();
        let p0 = ops.proj_zero.clone().unwrap();
        let mixing = &(&p0 * &h) - &(&(&p0 * &h) * &p0);
        assert!(mixing.max_abs() < 1e-12 * h.max_abs());
    }

    #[test]
    fn averaged_model_qubit_splitting() {
        let mut dp = preset();
        dp.g1 = 0.0;
        dp.g2 = 0.0;
        let s = HilbertSpace::hybrid(2, 3).unwrap();
        let h = build_low_plus_avg(&dp, &s).unwrap();
        // spin block at zero phonons, diagonalized independently
        let idx: Vec<usize> = (0..3).map(|k| s.index(&[0, 0, k]).unwrap()).collect();
        let block = nalgebra::Matrix3::from_fn(|i, j| h.matrix()[(idx[i], idx[j])]);
        let eig = nalgebra::SymmetricEigen::new(block);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // |D> is an eigenstate at Delta - Omega^2/Delta_+; the upper dressed
        // bright state sits about w_q above it.
        let w2 = dp.omega_rabi * dp.omega_rabi / dp.delta_plus;
        let e_dark = dp.delta - w2;
        assert!(ev.iter().any(|e| ((e - e_dark) / e_dark).abs() < 1e-12));
        let split = ev[2] - e_dark;
        assert!(((split - dp.omega_q) / dp.omega_q).abs() < 0.05, "split {split:e}, w_q {:e}", dp.omega_q);
    }

    #[test]
    fn spin_qubit_spectrum_and_parity() {
        let mut dp = preset();
        let s = HilbertSpace::hybrid(3, 2).unwrap();
        let ops = HybridOperators::new(&s).unwrap();
        let n_exc = &(&ops.n1 + &ops.n2) + &(&ops.sigma_plus * &ops.sigma_minus);
        let parity_diag: Vec<f64> = (0..s.total_dim())
            .map(|i| if (n_exc.matrix()[(i, i)].re.round() as i64) % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let parity = Operator::diagonal(s.clone(), &parity_diag).unwrap();
        let h = build_spin_qubit(&dp, &s).unwrap();
        assert!(h.commutator(&parity).max_abs() < 1e-10 * h.max_abs());
        dp.g1 = 0.0;
        dp.g2 = 0.0;
        let h0 = build_spin_qubit(&dp, &s).unwrap();
        let mut expected: Vec<f64> = Vec::new();
        for n in 0..5 {
            let multiplicity = (n + 1).min(5 - n);
            for _ in 0..multiplicity {
                expected.push(n as f64 * dp.omega_m - 0.5 * dp.omega_q);
                expected.push(n as f64 * dp.omega_m + 0.5 * dp.omega_q);
            }
        }
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let got = h0.hermitian_eigenvalues();
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-6 * dp.omega_m);
        }
    }

    #[test]
    fn effective_coefficients() {
        let dp = preset();
        let s = HilbertSpace::hybrid(3, 2).unwrap();
        let h = build_effective(&dp, &s).unwrap();
        // <1,0,B| H |0,1,B> is the exchange coefficient g1 g2 * 2wq/(wq^2-wm^2) = J
        let i = s.index(&[1, 0, 1]).unwrap();
        let j = s.index(&[0, 1, 1]).unwrap();
        assert!(((h.matrix()[(j, i)].re - dp.j) / dp.j).abs() < 1e-12);
        let ops = HybridOperators::new(&s).unwrap();
        assert!(h.commutator(&(&ops.n1 + &ops.n2)).max_abs() < 1e-12 * h.max_abs());

        let mut one_sided = dp.clone();
        one_sided.g2 = 0.0;
        let h1 = build_effective(&one_sided, &s).unwrap();
        let seg = build_segment(HamiltonianTag::SegH1, dp.j, &s).unwrap();
        assert!((&h1 - &seg).max_abs() < 1e-9 * dp.j);
    }

    #[test]
    fn segment_zero_spin_is_idle() {
        let s = HilbertSpace::hybrid(3, 3).unwrap();
        let h0 = build_segment(HamiltonianTag::SegH0, 1.0, &s).unwrap();
        for n1 in 0..3 {
            for n2 in 0..3 {
                let k = KetState::basis(s.clone(), &[n1, n2, 0]).unwrap();
                let out = h0.matrix() * k.amplitudes();
                assert!(out.norm() < 1e-15);
            }
        }
        assert!(build_segment(HamiltonianTag::Jc, 1.0, &s).is_err());
        assert!(build_segment(HamiltonianTag::SegH0, 0.0, &s).is_err());
    }

    #[test]
    fn hadamard_segment() {
        let j = 2.0;
        let s = HilbertSpace::hybrid(3, 3).unwrap();
        let h0 = build_segment(HamiltonianTag::SegH0, j, &s).unwrap();
        let u = propagator(&h0, std::f64::consts::PI / (4.0 * j)).unwrap();
        let psi = KetState::basis(s.clone(), &[1, 0, 1]).unwrap().evolve(&u).unwrap();
        let mut target = nalgebra::DVector::zeros(s.total_dim());
        target[s.index(&[1, 0, 1]).unwrap()] = C64::new(1.0, 0.0);
        target[s.index(&[0, 1, 1]).unwrap()] = C64::new(0.0, 1.0);
        let target = KetState::normalized(s.clone(), target).unwrap();
        assert!((psi.fidelity(&target).unwrap() - 1.0).abs() < 1e-12);
        let psi2 = psi.evolve(&u).unwrap();
        let b2 = KetState::basis(s.clone(), &[0, 1, 1]).unwrap();
        assert!((psi2.fidelity(&b2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_segment() {
        let j = 3.0;
        let t = 0.4;
        let s = HilbertSpace::hybrid(2, 3).unwrap();
        let h1 = build_segment(HamiltonianTag::SegH1, j, &s).unwrap();
        let u = propagator(&h1, t).unwrap();
        let d = s.index(&[1, 0, 1]).unwrap();
        // sigma_z = -1 on |D>, so exp(-i J n1 sigma_z t) = exp(+i J t)
        assert!((u.matrix()[(d, d)] - C64::from_polar(1.0, j * t)).norm() < 1e-12);
    }

    #[test]
    fn jc_transfer() {
        let g = 1.7;
        let s = HilbertSpace::hybrid(3, 2).unwrap();
        let h = build_jc(g, &s).unwrap();
        let ops = HybridOperators::new(&s).unwrap();
        let exc = &ops.n1 + &(&ops.sigma_plus * &ops.sigma_minus);
        assert!(h.commutator(&exc).max_abs() < 1e-10);
        let u = propagator(&h, std::f64::consts::PI / (2.0 * g)).unwrap();
        let out = KetState::basis(s.clone(), &[0, 0, 1]).unwrap().evolve(&u).unwrap();
        let target = KetState::basis(s.clone(), &[1, 0, 0]).unwrap();
        assert!(out.fidelity(&target).unwrap() > 1.0 - 1e-9);
        assert_eq!(build_jc(0.0, &s).unwrap().max_abs(), 0.0);
        let n1 = expect(&ops.n1, &out).unwrap();
        assert!((n1.re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tag_names_round_trip() {
        for t in HamiltonianTag::ALL {
            assert_eq!(t.name().parse::<HamiltonianTag>().unwrap(), t);
        }
    }
}
