// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form predictions for the delayed-choice protocol: detection
//! probabilities, occupations, fourth moments and fluctuation noise.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::thermal_occupation;

/// Bath specified either by temperature or by occupation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bath {
    Temperature { kelvin: f64, omega_m: f64 },
    Occupation(f64),
}

impl Bath {
    pub fn n_th(self) -> Result<f64> {
        let n = match self {
            Bath::Temperature { kelvin, omega_m } => {
                if !(kelvin >= 0.0) || !(omega_m > 0.0) {
                    return Err(Error::InvalidParameter("temperature must be >= 0 and omega_m > 0".into()));
                }
                thermal_occupation(omega_m, kelvin)
            }
            Bath::Occupation(n) => n,
        };
        if !(n >= 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(format!("thermal occupation must be finite and >= 0 (got {n})")));
        }
        Ok(n)
    }

    /// Exactly one of `temperature` or `n_th` must be given.
    pub fn from_options(temperature: Option<f64>, n_th: Option<f64>, omega_m: f64) -> Result<Self> {
        match (temperature, n_th) {
            (Some(kelvin), None) => Ok(Bath::Temperature { kelvin, omega_m }),
            (None, Some(n)) => Ok(Bath::Occupation(n)),
            _ => Err(Error::InvalidParameter("give exactly one of temperature or n_th".into())),
        }
    }
}

fn check_port(k: u8) -> Result<f64> {
    match k {
        1 => Ok(-1.0),
        2 => Ok(1.0),
        _ => Err(Error::InvalidParameter(format!("port must be 1 or 2 (got {k})"))),
    }
}

fn check_rate(gamma_m: f64, tau: f64) -> Result<()> {
    if !(gamma_m >= 0.0) || !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("rates and times must be >= 0 (gamma_m = {gamma_m}, tau = {tau})")));
    }
    Ok(())
}

/// `P_k = 1/2 + (-1)^k sin^2(varphi) cos(phi) / 2`.
pub fn detection_probability(k: u8, varphi: f64, phi: f64) -> Result<f64> {
    let sign = check_port(k)?;
    Ok(0.5 + sign * 0.5 * varphi.sin().powi(2) * phi.cos())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Occupation {
    pub exact: f64,
    pub linearized: f64,
}

/// `n_k = (P_k - n_th) e^{-gamma tau_T} + n_th`, plus the small-damping form
/// `P_k + n_th gamma tau_T`.
pub fn occupation(k: u8, varphi: f64, phi: f64, bath: Bath, gamma_m: f64, tau_t: f64) -> Result<Occupation> {
    check_rate(gamma_m, tau_t)?;
    let p = detection_probability(k, varphi, phi)?;
    let n_th = bath.n_th()?;
    let x = gamma_m * tau_t;
    Ok(Occupation { exact: (p - n_th) * (-x).exp() + n_th, linearized: p + n_th * x })
}

/// `X(t) = n(n-1) e^{-2 gamma t} + n(1-2n) e^{-gamma t} + n^2`.
pub fn moment_x(t: f64, n_th: f64, gamma_m: f64) -> f64 {
    let e = (-gamma_m * t).exp();
    n_th * (n_th - 1.0) * e * e + n_th * (1.0 - 2.0 * n_th) * e + n_th * n_th
}

/// `Y(t) = n (1 - e^{-gamma t}) e^{-gamma t}`.
pub fn moment_y(t: f64, n_th: f64, gamma_m: f64) -> f64 {
    let e = (-gamma_m * t).exp();
    n_th * (1.0 - e) * e
}

/// `<b_k+ b_k+ b_k b_k>(tau_T) = 2X + 2(-1)^k sin^2(varphi) cos(phi) Y`, with phi = J tau_1.
pub fn fourth_moment(k: u8, varphi: f64, phi: f64, bath: Bath, gamma_m: f64, tau_t: f64) -> Result<f64> {
    let sign = check_port(k)?;
    check_rate(gamma_m, tau_t)?;
    let n = bath.n_th()?;
    Ok(2.0 * moment_x(tau_t, n, gamma_m) + 2.0 * sign * varphi.sin().powi(2) * phi.cos() * moment_y(tau_t, n, gamma_m))
}

/// Full occupation variance `(delta n_k)^2` before linearization in gamma tau_T.
pub fn occupation_variance(k: u8, varphi: f64, phi: f64, bath: Bath, gamma_m: f64, tau_t: f64) -> Result<f64> {
    check_rate(gamma_m, tau_t)?;
    let p = detection_probability(k, varphi, phi)?;
    let n = bath.n_th()?;
    let e = (-gamma_m * tau_t).exp();
    Ok((n * n - 2.0 * p * n - p * p) * e * e - (2.0 * n + 1.0) * (n - p) * e + n * (n + 1.0))
}

/// Which time enters the vacuum term of the noise formula.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VacuumTime {
    /// gamma_m tau_T, the value the moment calculation produces.
    #[default]
    TotalTime,
    /// gamma_m tau_m = 1 with tau_m = 1/gamma_m.
    PhononLifetime,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseBreakdown {
    pub p_k: f64,
    pub n_k: f64,
    pub vac_term: f64,
    pub thermal_term: f64,
    /// sqrt(vac_term + thermal_term); NaN when the sum is negative.
    pub delta_noise: f64,
    /// P_k / delta_noise; +inf when the noise vanishes.
    pub r_k: f64,
    /// Total noise of both ports.
    pub s_total: f64,
    pub b_bound: f64,
    pub r_visibility: f64,
}

fn port_noise(p: f64, n_th: f64, x: f64, vac_x: f64) -> (f64, f64) {
    (p * (2.0 * p - 1.0) * vac_x, (2.0 * p + 1.0) * n_th * x)
}

/// Noise budget of port `k` at total time `tau_t`, with the bound
/// evaluated at `tau_t_max`.
pub fn noise_breakdown(
    k: u8,
    varphi: f64,
    phi: f64,
    bath: Bath,
    gamma_m: f64,
    tau_t: f64,
    tau_t_max: f64,
    vacuum: VacuumTime,
) -> Result<NoiseBreakdown> {
    check_rate(gamma_m, tau_t)?;
    check_rate(gamma_m, tau_t_max)?;
    let n_th = bath.n_th()?;
    let x = gamma_m * tau_t;
    let vac_x = match vacuum {
        VacuumTime::TotalTime => x,
        VacuumTime::PhononLifetime => {
            if gamma_m > 0.0 {
                1.0
            } else {
                0.0
            }
        }
    };
    let p = detection_probability(k, varphi, phi)?;
    let (vac_term, thermal_term) = port_noise(p, n_th, x, vac_x);
    let var = vac_term + thermal_term;
    let delta_noise = if var >= 0.0 { var.sqrt() } else { f64::NAN };
    let r_k = if delta_noise == 0.0 { f64::INFINITY } else { p / delta_noise };
    let q = 1.0 - p;
    let (v2, t2) = port_noise(q, n_th, x, vac_x);
    let s2 = var + v2 + t2;
    let b2 = gamma_m * tau_t_max * (1.0 + 4.0 * n_th);
    let b_bound = b2.sqrt();
    let r_visibility = if b_bound == 0.0 { f64::INFINITY } else { std::f64::consts::SQRT_2 / (2.0 * b_bound) };
    Ok(NoiseBreakdown {
        p_k: p,
        n_k: p + n_th * x,
        vac_term,
        thermal_term,
        delta_noise,
        r_k,
        s_total: if s2 >= 0.0 { s2.sqrt() } else { f64::NAN },
        b_bound,
        r_visibility,
    })
}

/// Signal visibility `sqrt2 / (2B)` at a given bath.
pub fn visibility(bath: Bath, gamma_m: f64, tau_t_max: f64) -> Result<f64> {
    Ok(noise_breakdown(1, 0.0, 0.0, bath, gamma_m, tau_t_max, tau_t_max, VacuumTime::TotalTime)?.r_visibility)
}
