// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! The delayed-choice sequence H0(tau0) -> H1(tau1) -> spin rotation ->
//! H0(tau0) and its diagnostics.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_jc, build_low_plus_avg, build_segment, build_spin_qubit, HamiltonianTag};
use crate::lindblad::{dephasing_channel, integrate, thermal_channels, CollapseChannel, PulseSchedule, StepControl};
use crate::params::{hadamard_time, DerivedParams};
use crate::qlinalg::{
    embed, propagator, CMatrix, CVector, DensityMatrix, HilbertSpace, HybridOperators, KetState, Operator, C64, ONE,
    SPIN, ZERO,
};

pub const DEFAULT_TRUNCATION: usize = 6;
pub const DEFAULT_LEAKAGE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum ProtocolModel {
    /// Beam-splitter and phase segments H0 / H1.
    EffectiveSegments,
    /// Two-level spin qubit with explicit CNT-spin exchange. Gate scans only.
    SpinQubitExact(Box<DerivedParams>),
    /// Three-level spin in the drive frame with the time-averaged fast part.
    /// Gate scans only.
    LowPlusAvg(Box<DerivedParams>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub varphi: f64,
    pub phi: f64,
    pub j: f64,
    pub gamma_m: f64,
    pub gamma_s: f64,
    pub n_th: f64,
    pub model: ProtocolModel,
    pub truncation: usize,
    pub leakage_tol: f64,
    pub step: StepControl,
}

impl ProtocolConfig {
    pub fn new(j: f64, gamma_m: f64, gamma_s: f64, n_th: f64) -> Self {
        Self {
            varphi: 0.0,
            phi: 0.0,
            j,
            gamma_m,
            gamma_s,
            n_th,
            model: ProtocolModel::EffectiveSegments,
            truncation: DEFAULT_TRUNCATION,
            leakage_tol: DEFAULT_LEAKAGE_TOL,
            step: StepControl::default(),
        }
    }

    pub fn from_derived(dp: &DerivedParams, dephasing: bool) -> Self {
        Self::new(dp.j, dp.gamma_m, if dephasing { dp.gamma_s } else { 0.0 }, dp.n_th)
    }

    pub fn with_angles(&self, varphi: f64, phi: f64) -> Self {
        Self { varphi, phi, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j > 0.0) || !self.j.is_finite() {
            return Err(Error::InvalidParameter(format!("J must be positive (got {})", self.j)));
        }
        for (name, v) in [("gamma_m", self.gamma_m), ("gamma_s", self.gamma_s), ("n_th", self.n_th)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be >= 0 (got {v})")));
            }
        }
        if !(0.0..=PI / 2.0).contains(&self.varphi) {
            return Err(Error::InvalidParameter(format!("varphi must lie in [0, pi/2] (got {})", self.varphi)));
        }
        if !(0.0..=TAU).contains(&self.phi) {
            return Err(Error::InvalidParameter(format!("phi must lie in [0, 2 pi] (got {}); tau1 would exceed 2 pi/J", self.phi)));
        }
        if self.truncation < 2 {
            return Err(Error::InvalidParameter("truncation must be at least 2 levels".into()));
        }
        Ok(())
    }

    pub fn tau0(&self) -> f64 {
        hadamard_time(self.j)
    }

    pub fn tau1(&self) -> f64 {
        self.phi / self.j
    }

    pub fn tau_t(&self) -> f64 {
        2.0 * self.tau0() + self.tau1()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub tau0: f64,
    pub tau1: f64,
    pub tau_t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpinPopulations {
    pub zero: f64,
    pub dark: f64,
    pub bright: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub varphi: f64,
    pub phi: f64,
    pub n1: f64,
    pub n2: f64,
    pub m4_1: f64,
    pub m4_2: f64,
    pub delta_n1: f64,
    pub delta_n2: f64,
    /// Fidelity to the ideal final state after removing the known spin
    /// frame phase.
    pub fidelity_to_target: f64,
    /// Same, without the frame correction.
    pub fidelity_raw: f64,
    pub spin_populations: SpinPopulations,
    pub timings: Timings,
    pub leakage: f64,
    pub trace_drift: f64,
}

/// `b1+ |vac> |D>`.
pub fn initial_state(space: &Arc<HilbertSpace>) -> Result<KetState> {
    let ds = space.dim_of(SPIN).ok_or_else(|| Error::Dimension(format!("{space} has no spin factor")))?;
    KetState::basis(space.clone(), &[1, 0, crate::qlinalg::spin_dark_index(ds)])
}

/// Real rotation in the (|0>, |D>) plane taking |D> to
/// cos(varphi)|0> + sin(varphi)|D> and |0> to sin(varphi)|0> - cos(varphi)|D>.
pub fn spin_rotation(varphi: f64, space: &Arc<HilbertSpace>) -> Result<Operator> {
    let ds = space.dim_of(SPIN).ok_or_else(|| Error::Dimension(format!("{space} has no spin factor")))?;
    if ds != 3 {
        return Err(Error::Dimension(format!("spin rotation needs the three-level spin, got dimension {ds}")));
    }
    let (s, c) = varphi.sin_cos();
    let mut r = CMatrix::identity(3, 3);
    r[(0, 0)] = C64::new(s, 0.0);
    r[(0, 1)] = C64::new(c, 0.0);
    r[(1, 0)] = C64::new(-c, 0.0);
    r[(1, 1)] = C64::new(s, 0.0);
    embed(&Operator::new(HilbertSpace::single(SPIN, 3)?, r)?, space, SPIN)
}

/// Spin phase `e^{i theta}` on |0>, used to undo the frame phase that the
/// diagonal part of H0 imprints on the |D> branch.
pub fn zero_phase(theta: f64, space: &Arc<HilbertSpace>) -> Result<Operator> {
    let mut z = CMatrix::identity(3, 3);
    z[(0, 0)] = C64::from_polar(1.0, theta);
    embed(&Operator::new(HilbertSpace::single(SPIN, 3)?, z)?, space, SPIN)
}

fn single_phonon(space: &Arc<HilbertSpace>, a1: C64, a2: C64, spin: &[C64]) -> CVector {
    let mut v = CVector::zeros(space.total_dim());
    for (s, &amp) in spin.iter().enumerate() {
        if amp == ZERO {
            continue;
        }
        v[space.index(&[1, 0, s]).unwrap()] += a1 * amp;
        v[space.index(&[0, 1, s]).unwrap()] += a2 * amp;
    }
    v
}

/// `cos(varphi)|particle>|0> + sin(varphi)|wave>|D>`.
pub fn target_final_state(varphi: f64, phi: f64, space: &Arc<HilbertSpace>) -> Result<KetState> {
    let ds = space.dim_of(SPIN).ok_or_else(|| Error::Dimension(format!("{space} has no spin factor")))?;
    if ds != 3 {
        return Err(Error::Dimension("target state needs the three-level spin".into()));
    }
    let e = C64::from_polar(1.0, phi);
    let i = C64::new(0.0, 1.0);
    let particle = (e * FRAC_1_SQRT_2, i * FRAC_1_SQRT_2);
    let wave = ((e - ONE) * 0.5, i * (e + ONE) * 0.5);
    let (s, c) = varphi.sin_cos();
    let v = single_phonon(space, particle.0, particle.1, &[C64::new(c, 0.0), ZERO, ZERO])
        + single_phonon(space, wave.0, wave.1, &[ZERO, C64::new(s, 0.0), ZERO]);
    KetState::new(space.clone(), v)
}

fn channels_for(ops: &HybridOperators, gamma_m: f64, n_th: f64, gamma_s: f64) -> Result<Vec<CollapseChannel>> {
    let mut ch = thermal_channels(ops, gamma_m, n_th)?;
    if gamma_s > 0.0 {
        ch.push(dephasing_channel(ops, gamma_s)?);
    }
    Ok(ch)
}

fn fourth(b: &Operator) -> Operator {
    let bd = b.dagger();
    &(&(&bd * &bd) * b) * b
}

pub fn run_delayed_choice(cfg: &ProtocolConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    if cfg.model != ProtocolModel::EffectiveSegments {
        return Err(Error::InvalidParameter("the full sequence runs on the effective segments only".into()));
    }
    let space = HilbertSpace::hybrid(cfg.truncation, 3)?;
    let ops = HybridOperators::new(&space)?;
    let (tau0, tau1) = (cfg.tau0(), cfg.tau1());
    let h0 = build_segment(HamiltonianTag::SegH0, cfg.j, &space)?;
    let h1 = build_segment(HamiltonianTag::SegH1, cfg.j, &space)?;
    let schedule = PulseSchedule::new(space.clone())
        .segment("H0", h0.clone(), tau0)?
        .segment("H1", h1, tau1)?
        .unitary("rotation", spin_rotation(cfg.varphi, &space)?)?
        .segment("H0", h0, tau0)?;
    let channels = channels_for(&ops, cfg.gamma_m, cfg.n_th, cfg.gamma_s)?;
    let rho0 = initial_state(&space)?.to_density_matrix();
    let traj = integrate(&schedule, &rho0, &channels, &[], &cfg.step)?;
    let rho = traj.final_state;
    let ev = |op: &Operator| crate::qlinalg::trace_of_product(op.matrix(), rho.matrix()).re;

    let top1 = ev(&ops.top_level_projector(crate::qlinalg::B1)?);
    let top2 = ev(&ops.top_level_projector(crate::qlinalg::B2)?);
    let leakage = top1.max(top2);
    if leakage > cfg.leakage_tol {
        return Err(Error::Truncation(format!(
            "top Fock level population {leakage:.3e} exceeds {:.1e} at {} levels per mode",
            cfg.leakage_tol, cfg.truncation
        )));
    }
    let (n1, n2) = (ev(&ops.n1), ev(&ops.n2));
    let (m4_1, m4_2) = (ev(&fourth(&ops.b1)), ev(&fourth(&ops.b2)));
    let target = target_final_state(cfg.varphi, cfg.phi, &space)?;
    let fidelity_raw = rho.fidelity_to_ket(&target)?;
    let corrected = crate::lindblad::apply_unitary(&rho, &zero_phase(cfg.j * tau0, &space)?)?;
    let fidelity = corrected.fidelity_to_ket(&target)?;
    let spin = rho.partial_trace_keep(SPIN)?;
    let sp = spin.matrix();
    Ok(ExperimentRecord {
        varphi: cfg.varphi,
        phi: cfg.phi,
        n1,
        n2,
        m4_1,
        m4_2,
        delta_n1: (m4_1 + n1 - n1 * n1).max(0.0).sqrt(),
        delta_n2: (m4_2 + n2 - n2 * n2).max(0.0).sqrt(),
        fidelity_to_target: fidelity.clamp(0.0, 1.0),
        fidelity_raw: fidelity_raw.clamp(0.0, 1.0),
        spin_populations: SpinPopulations { zero: sp[(0, 0)].re, dark: sp[(1, 1)].re, bright: sp[(2, 2)].re },
        timings: Timings { tau0, tau1, tau_t: cfg.tau_t() },
        leakage,
        trace_drift: traj.max_trace_drift,
    })
}

/// One record per (varphi, phi) cell, varphi outer and phi inner.
pub fn run_sweep(varphi_grid: &[f64], phi_grid: &[f64], cfg: &ProtocolConfig) -> Result<Vec<ExperimentRecord>> {
    if varphi_grid.is_empty() || phi_grid.is_empty() {
        return Err(Error::InvalidParameter("sweep grids must be non-empty".into()));
    }
    let cells: Vec<(f64, f64)> = varphi_grid.iter().flat_map(|&v| phi_grid.iter().map(move |&p| (v, p))).collect();
    cells.par_iter().map(|&(v, p)| run_delayed_choice(&cfg.with_angles(v, p))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gate {
    Hadamard,
    Phase,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GatePoint {
    pub delta: f64,
    pub fidelity: f64,
}

/// Gate fidelity against fractional timing errors `delta` (actual time is
/// tau (1 + delta)). The Hadamard starts from b1+|vac>|D>, the phase gate
/// from (b1+ + i b2+)/sqrt2 |vac>|D> with a pi phase target.
pub fn gate_fidelity_scan(gate: Gate, deltas: &[f64], cfg: &ProtocolConfig) -> Result<Vec<GatePoint>> {
    cfg.validate()?;
    if deltas.is_empty() {
        return Err(Error::InvalidParameter("no timing errors requested".into()));
    }
    if deltas.iter().any(|d| !(*d >= -1.0) || !d.is_finite()) {
        return Err(Error::InvalidParameter("timing errors must be >= -1".into()));
    }
    let space = HilbertSpace::hybrid(cfg.truncation, 3)?;
    let ops = HybridOperators::new(&space)?;
    let i = C64::new(0.0, 1.0);
    let dark = [ZERO, ONE, ZERO];
    let (tau, h, psi0, target) = match gate {
        Gate::Hadamard => {
            let h = gate_hamiltonian(&cfg.model, HamiltonianTag::SegH0, cfg.j, &space)?;
            let psi0 = single_phonon(&space, ONE, ZERO, &dark);
            let target = single_phonon(&space, C64::new(FRAC_1_SQRT_2, 0.0), i * FRAC_1_SQRT_2, &dark);
            (cfg.tau0(), h, psi0, target)
        }
        Gate::Phase => {
            let h = gate_hamiltonian(&cfg.model, HamiltonianTag::SegH1, cfg.j, &space)?;
            let psi0 = single_phonon(&space, C64::new(FRAC_1_SQRT_2, 0.0), i * FRAC_1_SQRT_2, &dark);
            let target = single_phonon(&space, C64::new(-FRAC_1_SQRT_2, 0.0), i * FRAC_1_SQRT_2, &dark);
            (PI / cfg.j, h, psi0, target)
        }
    };
    let psi0 = KetState::new(space.clone(), psi0)?;
    let target = KetState::new(space.clone(), target)?;
    let proj = Operator::new(space.clone(), target.amplitudes() * target.amplitudes().adjoint())?;
    let channels = channels_for(&ops, cfg.gamma_m, cfg.n_th, cfg.gamma_s)?;

    // one integration through all requested end times
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&a, &b| deltas[a].partial_cmp(&deltas[b]).unwrap());
    let mut schedule = PulseSchedule::new(space.clone());
    let mut t_prev = 0.0;
    let mut bounds = Vec::new();
    for &k in &order {
        let t = tau * (1.0 + deltas[k]);
        schedule = schedule.segment("gate", h.clone(), t - t_prev)?;
        bounds.push(k);
        t_prev = t;
    }
    let control = StepControl { min_steps_per_segment: 1, samples_per_segment: 1, ..cfg.step };
    let mut fid = vec![f64::NAN; deltas.len()];
    let mut rho = psi0.to_density_matrix();
    // keep per-step spacing near tau / min_steps of the default policy
    let h_target = tau / cfg.step.min_steps_per_segment as f64;
    for (seg, &k) in schedule.segments().iter().zip(&bounds) {
        if seg.duration > 0.0 {
            let steps = (seg.duration / h_target).ceil() as usize;
            let one = PulseSchedule::new(space.clone()).segment("gate", seg.hamiltonian.clone(), seg.duration)?;
            let c = StepControl { min_steps_per_segment: steps.max(1), ..control };
            rho = integrate(&one, &rho, &channels, &[], &c)?.final_state;
            rho = DensityMatrix::new_unchecked(space.clone(), rho.into_matrix())?;
        }
        fid[k] = crate::qlinalg::trace_of_product(proj.matrix(), rho.matrix()).re.clamp(0.0, 1.0);
    }
    Ok(deltas.iter().zip(fid).map(|(&delta, fidelity)| GatePoint { delta, fidelity }).collect())
}

/// Gate generator; the phase gate switches the second CNT off (g2 = 0).
fn gate_hamiltonian(model: &ProtocolModel, tag: HamiltonianTag, j: f64, space: &Arc<HilbertSpace>) -> Result<Operator> {
    let phase_only = |dp: &DerivedParams| {
        let mut dp = dp.clone();
        if tag == HamiltonianTag::SegH1 {
            dp.g2 = 0.0;
        }
        dp
    };
    match model {
        ProtocolModel::EffectiveSegments => build_segment(tag, j, space),
        ProtocolModel::SpinQubitExact(dp) => build_spin_qubit(&phase_only(dp), space),
        ProtocolModel::LowPlusAvg(dp) => build_low_plus_avg(&phase_only(dp), space),
    }
}

/// Range of timing errors around zero over which the sampled fidelity stays
/// at or above `threshold`, linearly interpolated between samples. `None`
/// when the zero-error point itself is below threshold.
pub fn fidelity_window(curve: &[GatePoint], threshold: f64) -> Option<(f64, f64)> {
    let mut pts: Vec<GatePoint> = curve.to_vec();
    pts.sort_by(|a, b| a.delta.partial_cmp(&b.delta).unwrap());
    let centre = pts.iter().enumerate().min_by(|a, b| a.1.delta.abs().partial_cmp(&b.1.delta.abs()).unwrap())?.0;
    if pts[centre].fidelity < threshold {
        return None;
    }
    let cross = |a: &GatePoint, b: &GatePoint| a.delta + (threshold - a.fidelity) * (b.delta - a.delta) / (b.fidelity - a.fidelity);
    let mut hi = pts.last().unwrap().delta;
    for w in pts[centre..].windows(2) {
        if w[1].fidelity < threshold {
            hi = cross(&w[0], &w[1]);
            break;
        }
    }
    let mut lo = pts[0].delta;
    for k in (1..=centre).rev() {
        if pts[k - 1].fidelity < threshold {
            lo = cross(&pts[k - 1], &pts[k]);
            break;
        }
    }
    Some((lo, hi))
}

/// Jaynes-Cummings preparation of the initial phonon: |vac>|B> evolved for
/// pi/(2g). Returns the prepared state and its fidelity to b1+|vac>|D>.
pub fn prepare_single_phonon(g: f64, levels: usize) -> Result<(KetState, f64)> {
    if !(g > 0.0) {
        return Err(Error::InvalidParameter(format!("JC coupling must be positive (got {g})")));
    }
    let space = HilbertSpace::hybrid(levels, 3)?;
    let h = build_jc(g, &space)?;
    let start = KetState::basis(space.clone(), &[0, 0, 2])?;
    let out = start.evolve(&propagator(&h, PI / (2.0 * g))?)?;
    let f = out.fidelity(&initial_state(&space)?)?;
    Ok((out, f))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AveragingSample {
    pub t: f64,
    pub n1_full: f64,
    pub n2_full: f64,
    pub n1_avg: f64,
    pub n2_avg: f64,
    pub n1_low: f64,
    pub n2_low: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AveragingComparison {
    pub samples: Vec<AveragingSample>,
    /// RMS occupation difference, driven model vs time-averaged model.
    pub rms_avg: f64,
    /// RMS occupation difference, driven model vs the undriven-frame part alone.
    pub rms_low: f64,
    pub carrier_steps: usize,
}

/// Unitary evolution of b1+|vac>|D> under the driven model, the
/// time-averaged model and the slow part alone, sampled at whole carrier
/// periods over `duration`.
pub fn validate_averaging(
    dp: &DerivedParams,
    levels: usize,
    duration: f64,
    samples: usize,
    steps_per_period: usize,
) -> Result<AveragingComparison> {
    use crate::hamiltonian::{build_full_time_dependent, build_low};
    if samples == 0 || steps_per_period == 0 || !(duration > 0.0) {
        return Err(Error::InvalidParameter("need positive duration, samples and steps".into()));
    }
    let space = HilbertSpace::hybrid(levels, 3)?;
    let ops = HybridOperators::new(&space)?;
    let td = build_full_time_dependent(dp, &space)?;
    let period = td.period();
    let periods_total = (duration / period).round().max(1.0) as u64;
    let stride = (periods_total / samples as u64).max(1);
    let u_period = crate::lindblad::propagate_unitary_td(|t| td.at(t), &space, 0.0, period, steps_per_period)?;
    let u_full = matrix_power(u_period.matrix(), stride);
    let dt = period * stride as f64;
    let u_avg = propagator(&build_low_plus_avg(dp, &space)?, dt)?;
    let u_low = propagator(&build_low(dp, &space)?, dt)?;
    let psi0 = initial_state(&space)?;
    let mut psi = [psi0.amplitudes().clone(), psi0.amplitudes().clone(), psi0.amplitudes().clone()];
    let occ = |v: &CVector, n: &Operator| v.dotc(&(n.matrix() * v)).re;
    let mut out = Vec::new();
    let (mut s_avg, mut s_low) = (0.0, 0.0);
    for k in 0..=samples {
        if k > 0 {
            psi[0] = &u_full * &psi[0];
            psi[1] = u_avg.matrix() * &psi[1];
            psi[2] = u_low.matrix() * &psi[2];
        }
        let s = AveragingSample {
            t: dt * k as f64,
            n1_full: occ(&psi[0], &ops.n1),
            n2_full: occ(&psi[0], &ops.n2),
            n1_avg: occ(&psi[1], &ops.n1),
            n2_avg: occ(&psi[1], &ops.n2),
            n1_low: occ(&psi[2], &ops.n1),
            n2_low: occ(&psi[2], &ops.n2),
        };
        s_avg += (s.n1_full - s.n1_avg).powi(2) + (s.n2_full - s.n2_avg).powi(2);
        s_low += (s.n1_full - s.n1_low).powi(2) + (s.n2_full - s.n2_low).powi(2);
        out.push(s);
    }
    let m = 2.0 * out.len() as f64;
    Ok(AveragingComparison {
        samples: out,
        rms_avg: (s_avg / m).sqrt(),
        rms_low: (s_low / m).sqrt(),
        carrier_steps: steps_per_period,
    })
}

fn matrix_power(m: &CMatrix, mut e: u64) -> CMatrix {
    let n = m.nrows();
    let mut base = m.clone();
    let mut acc = CMatrix::identity(n, n);
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::expect;
    use std::f64::consts::FRAC_PI_2;

    fn ideal(j: f64) -> ProtocolConfig {
        ProtocolConfig { truncation: 3, ..ProtocolConfig::new(j, 0.0, 0.0, 0.0) }
    }

    #[test]
    fn initial_state_properties() {
        let s = HilbertSpace::hybrid(4, 3).unwrap();
        let psi = initial_state(&s).unwrap();
        let ops = HybridOperators::new(&s).unwrap();
        assert!((expect(&ops.n1, &psi).unwrap().re - 1.0).abs() < 1e-15);
        assert_eq!(expect(&ops.n2, &psi).unwrap().re, 0.0);
        assert!((psi.norm() - 1.0).abs() < 1e-15);
        let spin = psi.to_density_matrix().partial_trace_keep(SPIN).unwrap();
        assert!((spin.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_convention() {
        let s = HilbertSpace::hybrid(2, 3).unwrap();
        let r = spin_rotation(FRAC_PI_2, &s).unwrap();
        assert!((&r - &Operator::identity(s.clone())).max_abs() < 1e-15);
        let r0 = spin_rotation(0.0, &s).unwrap();
        let d = KetState::basis(s.clone(), &[0, 0, 1]).unwrap();
        let z = KetState::basis(s.clone(), &[0, 0, 0]).unwrap();
        assert!((d.evolve(&r0).unwrap().fidelity(&z).unwrap() - 1.0).abs() < 1e-15);
        for v in [0.1, 0.7, 1.3] {
            let r = spin_rotation(v, &s).unwrap();
            assert!(r.unitarity_defect() < 1e-12);
            let out = d.evolve(&r).unwrap();
            assert!((out.overlap(&z).unwrap().re - v.cos()).abs() < 1e-14);
            assert!((out.overlap(&d).unwrap().re - v.sin()).abs() < 1e-14);
        }
        assert!(spin_rotation(0.3, &HilbertSpace::hybrid(2, 2).unwrap()).is_err());
    }

    #[test]
    fn target_norms_and_limits() {
        let s = HilbertSpace::hybrid(2, 3).unwrap();
        for k in 0..5 {
            for l in 0..5 {
                let t = target_final_state(k as f64 * 0.3, l as f64 * 1.1, &s).unwrap();
                assert!((t.norm() - 1.0).abs() < 1e-12);
                let t2 = target_final_state(k as f64 * 0.3, l as f64 * 1.1 + TAU, &s).unwrap();
                assert!((t.overlap(&t2).unwrap().norm() - 1.0).abs() < 1e-12);
            }
        }
        let t = target_final_state(0.0, 0.4, &s).unwrap();
        let spin = t.to_density_matrix().partial_trace_keep(SPIN).unwrap();
        assert!((spin.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wave_and_particle_limits() {
        let j = 1.0;
        let wave = run_delayed_choice(&ideal(j).with_angles(FRAC_PI_2, 0.0)).unwrap();
        assert!(wave.n1.abs() < 1e-6);
        assert!((wave.n2 - 1.0).abs() < 1e-6);
        assert!(wave.fidelity_to_target > 1.0 - 1e-8);
        for phi in [0.0, 1.0, 4.0] {
            let part = run_delayed_choice(&ideal(j).with_angles(0.0, phi)).unwrap();
            assert!((part.n1 - 0.5).abs() < 1e-6 && (part.n2 - 0.5).abs() < 1e-6);
            assert!(part.fidelity_to_target > 1.0 - 1e-8);
        }
    }

    #[test]
    fn frame_phase_between_branches() {
        let r = run_delayed_choice(&ideal(1.0).with_angles(std::f64::consts::FRAC_PI_4, 0.0)).unwrap();
        assert!(r.fidelity_to_target > 1.0 - 1e-8);
        // |cos^2 + e^{i pi/4} sin^2|^2 at varphi = pi/4
        let raw = (C64::new(0.5, 0.0) + C64::from_polar(0.5, std::f64::consts::FRAC_PI_4)).norm_sqr();
        assert!((r.fidelity_raw - raw).abs() < 1e-8);
    }

    #[test]
    fn config_rejections() {
        let c = ideal(1.0);
        assert!(run_delayed_choice(&c.with_angles(0.0, 7.0)).is_err());
        assert!(run_delayed_choice(&c.with_angles(2.0, 0.0)).is_err());
        assert!(run_sweep(&[], &[0.0], &c).is_err());
    }

    #[test]
    fn sweep_order() {
        let rows = run_sweep(&[0.0, 1.0], &[0.0, 2.0], &ideal(1.0)).unwrap();
        assert_eq!(rows.len(), 4);
        let order: Vec<(f64, f64)> = rows.iter().map(|r| (r.varphi, r.phi)).collect();
        assert_eq!(order, vec![(0.0, 0.0), (0.0, 2.0), (1.0, 0.0), (1.0, 2.0)]);
    }

    #[test]
    fn leakage_guard() {
        let mut c = ProtocolConfig::new(1.0, 0.2, 0.0, 5.0);
        c.truncation = 2;
        assert!(matches!(run_delayed_choice(&c), Err(Error::Truncation(_))));
    }

    #[test]
    fn ideal_gates() {
        let c = ideal(2.0);
        let h = gate_fidelity_scan(Gate::Hadamard, &[0.0, 0.2, -0.2], &c).unwrap();
        assert!((h[0].fidelity - 1.0).abs() < 1e-8);
        // (1 + cos(pi delta / 2)) / 2 for the beam splitter
        let expect = 0.5 * (1.0 + (PI * 0.2 / 2.0).cos());
        assert!((h[1].fidelity - expect).abs() < 1e-8);
        assert!((h[2].fidelity - expect).abs() < 1e-8);
        let p = gate_fidelity_scan(Gate::Phase, &[0.1, 0.0], &c).unwrap();
        assert!((p[1].fidelity - 1.0).abs() < 1e-8);
        assert!((p[0].fidelity - 0.5 * (1.0 + (PI * 0.1).cos())).abs() < 1e-8);
    }

    #[test]
    fn window_interpolation() {
        let curve: Vec<GatePoint> = [(-0.4, 0.7), (-0.2, 0.95), (0.0, 1.0), (0.2, 0.95), (0.4, 0.8)]
            .iter()
            .map(|&(delta, fidelity)| GatePoint { delta, fidelity })
            .collect();
        let (lo, hi) = fidelity_window(&curve, 0.9).unwrap();
        assert!((lo + 0.24).abs() < 1e-12);
        assert!((hi - 0.2 - 0.2 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn jc_preparation() {
        let (_, f) = prepare_single_phonon(TAU * 100e3, 3).unwrap();
        assert!(f > 1.0 - 1e-9);
    }
}
