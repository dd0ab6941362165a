// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runners: each produces one table and a summary block.

use std::f64::consts::{PI, TAU};

use super::config::{linspace, Experiment, GateChoice, RunConfig};
use super::table::{format_g12, Table};
use crate::analytics::{detection_probability, noise_breakdown, occupation, Bath, VacuumTime};
use crate::error::{Error, Result};
use crate::params::{critical_temperature, thermal_occupation, DerivedParams};
use crate::protocol::{fidelity_window, gate_fidelity_scan, run_sweep, validate_averaging, Gate};
use crate::qlinalg::C64;
use crate::squeezing::{
    infidelity, infidelity_numeric, mean_occupation, negative_width, squeezed_fock, squeezed_moments, wigner,
    wigner_point, GridSpec, KERNEL_SCALE,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub summary: Vec<(String, String)>,
}

impl Outcome {
    fn new(table: Table) -> Self {
        Self { table, summary: Vec::new() }
    }

    fn note(&mut self, key: &str, value: impl Into<String>) {
        self.summary.push((key.to_string(), value.into()));
    }

    fn num(&mut self, key: &str, v: f64) {
        self.note(key, format_g12(v));
    }
}

/// Validate `cfg` for `exp` and run it.
pub fn run_experiment(exp: Experiment, cfg: &RunConfig) -> Result<Outcome> {
    cfg.check_for(exp)?;
    let mut out = match exp {
        Experiment::DeriveParams => derive_params(cfg)?,
        Experiment::Morphing => morphing(cfg)?,
        Experiment::Noise => noise(cfg)?,
        Experiment::Visibility => visibility(cfg)?,
        Experiment::GateFidelity => gate_fidelity(cfg)?,
        Experiment::StateFidelity => state_fidelity(cfg)?,
        Experiment::Wigner => wigner_cuts(cfg)?,
        Experiment::SqueezeMoments => squeeze_moments(cfg)?,
        Experiment::ValidateAveraging => averaging(cfg)?,
    };
    out.summary.insert(0, ("experiment".into(), exp.name().into()));
    Ok(out)
}

fn echo_params(out: &mut Outcome, dp: &DerivedParams) {
    out.num("omega_m/2pi [Hz]", dp.omega_m / TAU);
    out.num("g/2pi [Hz]", dp.g() / TAU);
    out.num("omega_q/omega_m", dp.omega_q / dp.omega_m);
    out.num("J/2pi [Hz]", dp.j / TAU);
    out.num("n_th", dp.n_th);
    out.num("gamma_m/2pi [Hz]", dp.gamma_m / TAU);
    out.num("tau_0 [s]", dp.tau0);
    for w in &dp.warnings {
        out.note("warning", w.clone());
    }
}

fn derive_params(cfg: &RunConfig) -> Result<Outcome> {
    let dp = cfg.params.derive()?;
    let mut t = Table::new(&["quantity", "value", "unit"]);
    let rows: Vec<(&str, f64, &str)> = vec![
        ("omega_m/2pi", dp.omega_m / TAU, "Hz"),
        ("y_zp", dp.y_zp, "m"),
        ("gradient_1", dp.grad1, "T/m"),
        ("gradient_2", dp.grad2, "T/m"),
        ("g1/2pi", dp.g1 / TAU, "Hz"),
        ("g2/2pi", dp.g2 / TAU, "Hz"),
        ("omega_rabi/omega_m", dp.omega_rabi / dp.omega_m, "1"),
        ("omega_0/2pi", dp.omega_0 / TAU, "Hz"),
        ("delta_minus/omega_m", dp.delta_minus / dp.omega_m, "1"),
        ("delta_plus/omega_m", dp.delta_plus / dp.omega_m, "1"),
        ("delta/omega_m", dp.delta / dp.omega_m, "1"),
        ("omega_q/omega_m", dp.omega_q / dp.omega_m, "1"),
        ("J/2pi", dp.j / TAU, "Hz"),
        ("n_th", dp.n_th, "1"),
        ("gamma_m/2pi", dp.gamma_m / TAU, "Hz"),
        ("gamma_s/2pi", dp.gamma_s / TAU, "Hz"),
        ("tau_0", dp.tau0, "s"),
        ("tau_1_max", dp.tau1_max, "s"),
        ("tau_T_max", dp.tau_t_max, "s"),
        ("W1/2pi", dp.w1 / TAU, "Hz"),
        ("W2/2pi", dp.w2 / TAU, "Hz"),
        ("T_c", dp.t_c * 1e3, "mK"),
    ];
    let mut out = Outcome::new(Table::new(&[]));
    for (q, v, u) in rows {
        t.push(vec![q.into(), v.into(), u.into()])?;
        out.num(&format!("{q} [{u}]"), v);
    }
    for w in &dp.warnings {
        out.note("warning", w.clone());
    }
    out.table = t;
    Ok(out)
}

fn morphing(cfg: &RunConfig) -> Result<Outcome> {
    let dp = cfg.params.derive()?;
    let grid = cfg.grid.clone().unwrap_or_default();
    let (vg, pg) = (grid.varphi()?, grid.phi()?);
    let pc = cfg.protocol.clone().unwrap_or_default().config(&dp)?;
    let records = run_sweep(&vg, &pg, &pc)?;
    let mut t = Table::new(&["varphi", "phi", "n1_num", "n2_num", "n1_analytic", "n2_analytic", "fidelity"]);
    let bath = Bath::Occupation(pc.n_th);
    let mut worst = 0.0f64;
    for r in &records {
        let a1 = occupation(1, r.varphi, r.phi, bath, pc.gamma_m, r.timings.tau_t)?.exact;
        let a2 = occupation(2, r.varphi, r.phi, bath, pc.gamma_m, r.timings.tau_t)?.exact;
        worst = worst.max((r.n1 - a1).abs()).max((r.n2 - a2).abs());
        t.push(vec![r.varphi.into(), r.phi.into(), r.n1.into(), r.n2.into(), a1.into(), a2.into(), r.fidelity_to_target.into()])?;
    }
    let mut out = Outcome::new(t);
    echo_params(&mut out, &dp);
    out.note("cells", records.len().to_string());
    out.num("max |n_num - n_analytic|", worst);
    Ok(out)
}

fn numeric_noise(m4: f64, n: f64, p: f64) -> f64 {
    (m4 + n - n * n - p * (1.0 - p)).max(0.0).sqrt()
}

fn noise(cfg: &RunConfig) -> Result<Outcome> {
    let dp = cfg.params.derive()?;
    let grid = cfg.grid.clone().unwrap_or_default();
    let (vg, pg) = (grid.varphi()?, grid.phi()?);
    let pc = cfg.protocol.clone().unwrap_or_default().config(&dp)?;
    let records = run_sweep(&vg, &pg, &pc)?;
    let mut t = Table::new(&[
        "varphi", "phi", "dn1_num", "dn2_num", "dn1_analytic", "dn2_analytic", "dn1_tau_m", "dn2_tau_m", "r1", "r2",
    ]);
    let bath = Bath::Occupation(pc.n_th);
    let mut worst = 0.0f64;
    for r in &records {
        let tt = r.timings.tau_t;
        let nb = |k: u8, v: VacuumTime| noise_breakdown(k, r.varphi, r.phi, bath, pc.gamma_m, tt, dp.tau_t_max, v);
        let (a1, a2) = (nb(1, VacuumTime::TotalTime)?, nb(2, VacuumTime::TotalTime)?);
        let (m1, m2) = (nb(1, VacuumTime::PhononLifetime)?, nb(2, VacuumTime::PhononLifetime)?);
        let d1 = numeric_noise(r.m4_1, r.n1, detection_probability(1, r.varphi, r.phi)?);
        let d2 = numeric_noise(r.m4_2, r.n2, detection_probability(2, r.varphi, r.phi)?);
        worst = worst.max(((d1 - a1.delta_noise) / a1.delta_noise).abs());
        worst = worst.max(((d2 - a2.delta_noise) / a2.delta_noise).abs());
        t.push(vec![
            r.varphi.into(),
            r.phi.into(),
            d1.into(),
            d2.into(),
            a1.delta_noise.into(),
            a2.delta_noise.into(),
            m1.delta_noise.into(),
            m2.delta_noise.into(),
            a1.r_k.into(),
            a2.r_k.into(),
        ])?;
    }
    let mut out = Outcome::new(t);
    echo_params(&mut out, &dp);
    out.num("max relative |dn_num - dn_analytic|", worst);
    Ok(out)
}

fn visibility(cfg: &RunConfig) -> Result<Outcome> {
    let dp = cfg.params.derive()?;
    let v = cfg.visibility.clone().unwrap_or_default();
    if !(v.temperature_min_mk > 0.0 && v.temperature_min_mk < v.temperature_max_mk) || v.points < 2 {
        return Err(Error::Config("[visibility] need 0 < temperature_min_mk < temperature_max_mk and points >= 2".into()));
    }
    let mut t = Table::new(&["temperature_mk", "n_th", "b_bound", "r_visibility"]);
    for tk in linspace(v.temperature_min_mk, v.temperature_max_mk, v.points) {
        let n = thermal_occupation(dp.omega_m, tk * 1e-3);
        let nb = noise_breakdown(1, 0.0, 0.0, Bath::Occupation(n), dp.gamma_m, dp.tau_t_max, dp.tau_t_max, VacuumTime::TotalTime)?;
        t.push(vec![tk.into(), n.into(), nb.b_bound.into(), nb.r_visibility.into()])?;
    }
    let mut out = Outcome::new(t);
    echo_params(&mut out, &dp);
    let tc = critical_temperature(dp.j, dp.gamma_m, dp.omega_m)?;
    out.num("T_c [mK]", tc * 1e3);
    let at_tc = crate::analytics::visibility(Bath::Temperature { kelvin: tc, omega_m: dp.omega_m }, dp.gamma_m, dp.tau_t_max)?;
    out.num("R(T_c)", at_tc);
    out.num("n_th at T_c", thermal_occupation(dp.omega_m, tc));
    Ok(out)
}

fn gate_fidelity(cfg: &RunConfig) -> Result<Outcome> {
    let dp = cfg.params.derive()?;
    let g = cfg.gate.clone().unwrap_or_default();
    let deltas = g.deltas()?;
    let pc = cfg.protocol.clone().unwrap_or_default().config(&dp)?;
    let mut t = Table::new(&["gate", "delta", "fidelity"]);
    let mut out = Outcome::new(Table::new(&[]));
    echo_params(&mut out, &dp);
    for choice in &g.gates {
        let (gate, name) = match choice {
            GateChoice::Hadamard => (Gate::Hadamard, "hadamard"),
            GateChoice::Phase => (Gate::Phase, "phase"),
        };
        let curve = gate_fidelity_scan(gate, &deltas, &pc)?;
        for p in &curve {
            t.push(vec![name.into(), p.delta.into(), p.fidelity.into()])?;
        }
        let centre = curve.iter().min_by(|a, b| a.delta.abs().total_cmp(&b.delta.abs())).unwrap();
        out.num(&format!("{name} fidelity at delta={}", format_g12(centre.delta)), centre.fidelity);
        match fidelity_window(&curve, g.threshold) {
            Some((lo, hi)) => out.note(&format!("{name} window F >= {}", g.threshold), format!("[{}, {}]", format_g12(lo), format_g12(hi))),
            None => out.note(&format!("{name} window F >= {}", g.threshold), "none"),
        }
    }
    out.table = t;
    Ok(out)
}

fn state_fidelity(cfg: &RunConfig) -> Result<Outcome> {
    let dp = cfg.params.derive()?;
    let grid = cfg.grid.clone().unwrap_or_default();
    let (vg, pg) = (grid.varphi()?, grid.phi()?);
    let pc = cfg.protocol.clone().unwrap_or_default().config(&dp)?;
    let records = run_sweep(&vg, &pg, &pc)?;
    let mut t = Table::new(&["varphi", "phi", "fidelity", "fidelity_raw", "leakage"]);
    let mut worst = 1.0f64;
    for r in &records {
        worst = worst.min(r.fidelity_to_target);
        t.push(vec![r.varphi.into(), r.phi.into(), r.fidelity_to_target.into(), r.fidelity_raw.into(), r.leakage.into()])?;
    }
    let mut out = Outcome::new(t);
    echo_params(&mut out, &dp);
    out.num("min fidelity", worst);
    Ok(out)
}

fn wigner_cuts(cfg: &RunConfig) -> Result<Outcome> {
    let w = cfg.wigner.clone().unwrap_or_default();
    if w.fock > 1 {
        return Err(Error::Config("[wigner] fock must be 0 or 1".into()));
    }
    if w.r.is_empty() || !(w.step > 0.0) || !(w.cut_step > 0.0) {
        return Err(Error::Config("[wigner] need a non-empty r list and positive steps".into()));
    }
    let mut t = Table::new(&["r", "re_alpha", "im_alpha", "w"]);
    let mut out = Outcome::new(Table::new(&[]));
    out.num("Fourier-kernel scale", KERNEL_SCALE);
    for &r in &w.r {
        let rho = squeezed_fock(w.fock, r, w.levels)?.to_density_matrix();
        let grid = GridSpec::for_squeezing(r, w.step);
        let f = wigner(&rho, &grid)?;
        for (i, &y) in f.im_alpha.iter().enumerate() {
            for (j, &x) in f.re_alpha.iter().enumerate() {
                t.push(vec![r.into(), x.into(), y.into(), f.values[(i, j)].into()])?;
            }
        }
        let tag = format!("r={}", format_g12(r));
        out.num(&format!("{tag} W(0)"), wigner_point(&rho, C64::new(0.0, 0.0)));
        out.num(&format!("{tag} integral"), f.normalization);
        let extent = grid.half_width;
        out.num(&format!("{tag} negative width on Re(alpha)=0"), negative_width(&rho, C64::new(0.0, 1.0), extent, w.cut_step)?);
        out.num(&format!("{tag} negative width on Im(alpha)=0"), negative_width(&rho, C64::new(1.0, 0.0), extent, w.cut_step)?);
    }
    out.table = t;
    Ok(out)
}

fn squeeze_moments(cfg: &RunConfig) -> Result<Outcome> {
    let s = cfg.squeezing.clone().unwrap_or_default();
    if s.r.is_empty() || s.phi_points < 1 {
        return Err(Error::Config("[squeezing] need a non-empty r list and phi_points >= 1".into()));
    }
    let phis = linspace(0.0, TAU, s.phi_points);
    let if_ref: Vec<f64> = phis.iter().map(|&p| infidelity_numeric(p, 0.0, 10)).collect::<Result<_>>()?;
    let mut t = Table::new(&["r", "n_s0_num", "n_s0_exact", "n_s1_num", "n_s1_exact", "if_phi0_num", "max_if_shift"]);
    for &r in &s.r {
        let n0 = mean_occupation(&squeezed_fock(0, r, s.levels)?)?;
        let n1 = mean_occupation(&squeezed_fock(1, r, s.levels)?)?;
        let (e0, e1) = squeezed_moments(r);
        // two-mode space at a reduced truncation keeps the Kronecker product small
        let lv = crate::squeezing::guard_levels(r).max(40).min(s.levels);
        let shift = phis
            .iter()
            .zip(&if_ref)
            .map(|(&p, &f)| Ok((infidelity_numeric(p, r, lv)? - f).abs()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let if0 = infidelity_numeric(0.0, r, lv)?;
        t.push(vec![r.into(), n0.into(), e0.into(), n1.into(), e1.into(), if0.into(), shift.into()])?;
    }
    let mut out = Outcome::new(t);
    out.num("IF(0) closed form", infidelity(0.0));
    out.num("IF(pi/2) closed form", infidelity(PI / 2.0));
    Ok(out)
}

fn averaging(cfg: &RunConfig) -> Result<Outcome> {
    let a = cfg.averaging.clone().unwrap_or_default();
    let base = cfg.params.physical()?.omega_m;
    if a.delta_minus_over_rabi.is_empty() || !(a.cycles > 0.0) || a.samples == 0 || a.steps_per_period == 0 {
        return Err(Error::Config("[averaging] need panels, cycles > 0, samples and steps_per_period".into()));
    }
    let mut t = Table::new(&[
        "delta_minus_over_rabi", "t", "t_over_cycle", "n1_full", "n2_full", "n1_avg", "n2_avg", "n1_low", "n2_low",
    ]);
    let mut out = Outcome::new(Table::new(&[]));
    out.num("frequency scale", a.scale);
    out.num("scaled omega_m/2pi [Hz]", base * a.scale / TAU);
    for &k in &a.delta_minus_over_rabi {
        let dp = a.panel(base, k)?;
        let cycle = PI / dp.j;
        let cmp = validate_averaging(&dp, a.levels, a.cycles * cycle, a.samples, a.steps_per_period)?;
        for s in &cmp.samples {
            t.push(vec![
                k.into(),
                s.t.into(),
                (s.t / cycle).into(),
                s.n1_full.into(),
                s.n2_full.into(),
                s.n1_avg.into(),
                s.n2_avg.into(),
                s.n1_low.into(),
                s.n2_low.into(),
            ])?;
        }
        let tag = format!("Delta_-={}Omega", format_g12(k));
        out.num(&format!("{tag} omega_q/omega_m"), dp.omega_q / dp.omega_m);
        out.num(&format!("{tag} J/omega_m"), dp.j / dp.omega_m);
        out.num(&format!("{tag} RMS full vs averaged"), cmp.rms_avg);
        out.num(&format!("{tag} RMS full vs low only"), cmp.rms_low);
    }
    out.table = t;
    Ok(out)
}
