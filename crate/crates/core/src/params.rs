// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! SI experimental knobs and the derived couplings, frequencies and
//! temperature scales. Everything downstream works in rad/s with hbar = 1;
//! this is the only module that touches SI constants.

use std::f64::consts::{PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054571817e-34;
pub const K_B: f64 = 1.380649e-23;
pub const MU_B: f64 = 9.2740100783e-24;
pub const MU_0: f64 = 1.25663706212e-6;
pub const G_S: f64 = 2.0;

/// NV ground-state zero-field splitting, rad/s.
pub const NV_ZERO_FIELD: f64 = TAU * 2.87e9;

const DISPERSIVE_WARN_RATIO: f64 = 10.0;
const DETUNING_WARN_RATIO: f64 = 5.0;
const DIRECT_COUPLING_ADVISORY: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Effective CNT mass, kg.
    pub m: f64,
    pub omega_m: f64,
    /// Spin-CNT distances, m.
    pub d1: f64,
    pub d2: f64,
    /// dc currents, A.
    pub i1: f64,
    pub i2: f64,
    /// Drive amplitude, T.
    pub b0: f64,
    pub omega_0: f64,
    pub zero_field: f64,
    /// CNT length, m.
    pub length: f64,
    pub gamma_m: f64,
    pub gamma_s: f64,
    /// Bath temperature, K.
    pub temperature: f64,
}

impl PhysicalParams {
    /// The hardware knobs quoted for the proposal: 2 MHz CNTs, 2 nm spacing,
    /// 380 nA, a drive giving Omega = 10 omega_m detuned by 142 omega_m, 10 mK.
    pub fn reference_knobs() -> Self {
        let omega_m = TAU * 2e6;
        let omega_rabi = 10.0 * omega_m;
        let zero_field = NV_ZERO_FIELD;
        Self {
            m: 1.0e-22,
            omega_m,
            d1: 2e-9,
            d2: 2e-9,
            i1: 380e-9,
            i2: 380e-9,
            b0: drive_amplitude_for(omega_rabi),
            omega_0: zero_field - 142.0 * omega_m,
            zero_field,
            length: 10e-9,
            gamma_m: TAU * 0.4,
            gamma_s: TAU * 80.0,
            temperature: 10e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m", self.m),
            ("omega_m", self.omega_m),
            ("d1", self.d1),
            ("d2", self.d2),
            ("b0", self.b0),
            ("omega_0", self.omega_0),
            ("zero_field", self.zero_field),
            ("length", self.length),
            ("gamma_m", self.gamma_m),
            ("gamma_s", self.gamma_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite (got {v})")));
            }
        }
        for (name, v) in [("i1", self.i1), ("i2", self.i2), ("temperature", self.temperature)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be non-negative (got {v})")));
            }
        }
        Ok(())
    }
}

/// Values that replace the ones computed from the SI knobs. The figure
/// presets use the rounded numbers quoted with the figures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    /// Symmetric spin-CNT coupling, rad/s.
    pub g: Option<f64>,
    pub omega_rabi: Option<f64>,
    pub delta_minus: Option<f64>,
    pub omega_q: Option<f64>,
    pub j: Option<f64>,
    pub n_th: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedParams {
    pub omega_m: f64,
    pub y_zp: f64,
    pub grad1: f64,
    pub grad2: f64,
    pub g1: f64,
    pub g2: f64,
    pub omega_rabi: f64,
    pub omega_0: f64,
    pub zero_field: f64,
    pub delta_minus: f64,
    pub delta_plus: f64,
    pub delta: f64,
    pub omega_q: f64,
    pub j: f64,
    pub n_th: f64,
    pub gamma_m: f64,
    pub gamma_s: f64,
    pub tau0: f64,
    pub tau1_max: f64,
    pub tau_t_max: f64,
    pub w1: f64,
    pub w2: f64,
    /// +inf when gamma_m = 0; NaN when the critical-temperature formula is undefined.
    pub t_c: f64,
    pub warnings: Vec<String>,
}

impl DerivedParams {
    pub fn g(&self) -> f64 {
        0.5 * (self.g1 + self.g2)
    }

    /// Single-mode/spin dispersive ratio min |omega_q -+ omega_m| / max g.
    pub fn dispersive_ratio(&self) -> f64 {
        let g = self.g1.abs().max(self.g2.abs());
        if g == 0.0 {
            return f64::INFINITY;
        }
        (self.omega_q - self.omega_m).abs().min(self.omega_q + self.omega_m) / g
    }
}

/// Magnetic-field gradient of a straight wire at distance `d`, T/m.
pub fn field_gradient(current: f64, d: f64) -> f64 {
    MU_0 * current / (TAU * d * d)
}

/// Zero-point displacement sqrt(hbar / (2 m omega_m)), m.
pub fn zero_point_amplitude(m: f64, omega_m: f64) -> f64 {
    (HBAR / (2.0 * m * omega_m)).sqrt()
}

/// Spin-CNT coupling mu_B g_s y_zp G / hbar.
pub fn spin_cnt_coupling(y_zp: f64, gradient: f64) -> f64 {
    MU_B * G_S * y_zp * gradient / HBAR
}

/// Rabi frequency mu_B g_s B0 / (2 sqrt2 hbar).
pub fn rabi_frequency(b0: f64) -> f64 {
    MU_B * G_S * b0 / (2.0 * SQRT_2 * HBAR)
}

/// Inverse of [`rabi_frequency`].
pub fn drive_amplitude_for(omega_rabi: f64) -> f64 {
    omega_rabi * 2.0 * SQRT_2 * HBAR / (MU_B * G_S)
}

/// Dressed qubit splitting 2 Omega^2 (1/Delta + 1/Delta_+) together with Delta.
pub fn qubit_frequency(omega_rabi: f64, delta_minus: f64, delta_plus: f64) -> (f64, f64) {
    let delta = delta_minus + 3.0 * omega_rabi * omega_rabi / delta_plus;
    let omega_q = 2.0 * omega_rabi * omega_rabi * (1.0 / delta + 1.0 / delta_plus);
    (delta, omega_q)
}

/// Spin-mediated beam-splitter strength 2 g1 g2 omega_q / (omega_q^2 - omega_m^2).
pub fn mediated_coupling(g1: f64, g2: f64, omega_q: f64, omega_m: f64) -> Result<f64> {
    let den = omega_q * omega_q - omega_m * omega_m;
    if den.abs() <= 1e-12 * omega_m * omega_m {
        return Err(Error::DispersiveRegime(format!(
            "omega_q = omega_m = {omega_m:.6e} rad/s: the spin is resonant with the CNTs and J diverges"
        )));
    }
    Ok(2.0 * g1 * g2 * omega_q / den)
}

/// Bose-Einstein occupation at temperature `t` (K); zero at T = 0.
pub fn thermal_occupation(omega_m: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega_m / (K_B * t)).exp_m1()
}

/// Temperature with Bose occupation `n_th`.
pub fn temperature_for_occupation(omega_m: f64, n_th: f64) -> f64 {
    if n_th <= 0.0 {
        return 0.0;
    }
    HBAR * omega_m / (K_B * (1.0 + 1.0 / n_th).ln())
}

pub fn hadamard_time(j: f64) -> f64 {
    PI / (4.0 * j)
}

pub fn max_phase_time(j: f64) -> f64 {
    TAU / j
}

pub fn max_total_time(j: f64) -> f64 {
    5.0 * PI / (2.0 * j)
}

/// Temperature at which the signal visibility drops to one.
pub fn critical_temperature(j: f64, gamma_m: f64, omega_m: f64) -> Result<f64> {
    if !(gamma_m >= 0.0) || !(omega_m > 0.0) {
        return Err(Error::InvalidParameter("gamma_m must be >= 0 and omega_m > 0".into()));
    }
    if gamma_m == 0.0 {
        return Ok(f64::INFINITY);
    }
    let x = gamma_m / j;
    if !(j > 5.0 * PI * gamma_m) {
        return Err(Error::InvalidParameter(format!(
            "critical temperature undefined for J <= 5 pi gamma_m (J = {j:.4e}, gamma_m = {gamma_m:.4e})"
        )));
    }
    let arg = (1.0 + 15.0 * PI * x) / (1.0 - 5.0 * PI * x);
    Ok(HBAR * omega_m / (K_B * arg.ln()))
}

/// Direct magnetic CNT-CNT couplings (W1, W2) and whether W2 is small
/// compared with `j`.
pub fn direct_coupling(p: &PhysicalParams, j: f64) -> Result<(f64, f64, bool)> {
    if p.i1 != p.i2 || p.d1 != p.d2 {
        return Err(Error::InvalidParameter(
            "direct coupling needs a symmetric setup (I1 = I2, d1 = d2)".into(),
        ));
    }
    let y_zp = zero_point_amplitude(p.m, p.omega_m);
    let w1 = MU_0 * p.length * p.i1 * p.i1 * y_zp / (TAU * p.d1 * HBAR);
    let w2 = w1 * y_zp / p.d1;
    Ok((w1, w2, w2 < DIRECT_COUPLING_ADVISORY * j.abs()))
}

pub fn derive(p: &PhysicalParams) -> Result<DerivedParams> {
    derive_with(p, &Overrides::default())
}

pub fn derive_with(p: &PhysicalParams, o: &Overrides) -> Result<DerivedParams> {
    p.validate()?;
    let mut warnings = Vec::new();
    let y_zp = zero_point_amplitude(p.m, p.omega_m);
    let grad1 = field_gradient(p.i1, p.d1);
    let grad2 = field_gradient(p.i2, p.d2);
    let (g1, g2) = match o.g {
        Some(g) => (g, g),
        None => (spin_cnt_coupling(y_zp, grad1), spin_cnt_coupling(y_zp, grad2)),
    };
    let omega_rabi = o.omega_rabi.unwrap_or_else(|| rabi_frequency(p.b0));
    let (delta_minus, omega_0) = match o.delta_minus {
        Some(dm) => (dm, p.zero_field - dm),
        None => (p.zero_field - p.omega_0, p.omega_0),
    };
    let delta_plus = p.zero_field + omega_0;
    let (delta, omega_q_calc) = qubit_frequency(omega_rabi, delta_minus, delta_plus);
    let omega_q = o.omega_q.unwrap_or(omega_q_calc);
    let j = match o.j {
        Some(j) => j,
        None => mediated_coupling(g1, g2, omega_q, p.omega_m)?,
    };
    if !(j > 0.0) {
        return Err(Error::DispersiveRegime(format!(
            "J = {j:.4e} rad/s is not positive (omega_q = {:.4} omega_m); the protocol needs omega_q > omega_m",
            omega_q / p.omega_m
        )));
    }
    let n_th = o.n_th.unwrap_or_else(|| thermal_occupation(p.omega_m, p.temperature));
    let (w1, w2) = if p.i1 == p.i2 && p.d1 == p.d2 {
        let (w1, w2, small) = direct_coupling(p, j)?;
        if !small {
            warnings.push(format!("direct coupling W2 = {w2:.3e} rad/s is not small compared with J"));
        }
        (w1, w2)
    } else {
        (f64::NAN, f64::NAN)
    };
    let t_c = critical_temperature(j, p.gamma_m, p.omega_m).unwrap_or(f64::NAN);
    let mut dp = DerivedParams {
        omega_m: p.omega_m,
        y_zp,
        grad1,
        grad2,
        g1,
        g2,
        omega_rabi,
        omega_0,
        zero_field: p.zero_field,
        delta_minus,
        delta_plus,
        delta,
        omega_q,
        j,
        n_th,
        gamma_m: p.gamma_m,
        gamma_s: p.gamma_s,
        tau0: hadamard_time(j),
        tau1_max: max_phase_time(j),
        tau_t_max: max_total_time(j),
        w1,
        w2,
        t_c,
        warnings,
    };
    let ratio = dp.dispersive_ratio();
    if ratio < DISPERSIVE_WARN_RATIO {
        dp.warnings.push(format!("dispersive ratio |omega_q - omega_m|/g = {ratio:.2} is below {DISPERSIVE_WARN_RATIO}"));
    }
    if omega_rabi > 0.0 && delta / omega_rabi < DETUNING_WARN_RATIO {
        dp.warnings.push(format!("Delta/Omega = {:.2} is below {DETUNING_WARN_RATIO}", delta / omega_rabi));
    }
    for w in &dp.warnings {
        log::warn!("{w}");
    }
    Ok(dp)
}

/// Figure preset: SI knobs with the rounded values quoted alongside the
/// figures (g/2pi = 100 kHz, n_th = 100).
pub fn reference_preset() -> Result<DerivedParams> {
    let p = PhysicalParams::reference_knobs();
    let o = Overrides { g: Some(TAU * 100e3), n_th: Some(100.0), ..Overrides::default() };
    derive_with(&p, &o)
}
