// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: TOML with a fixed set of sections, unknown keys
//! rejected.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::params::{derive_with, DerivedParams, Overrides, PhysicalParams};
use crate::protocol::{ProtocolConfig, ProtocolModel, DEFAULT_LEAKAGE_TOL, DEFAULT_TRUNCATION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    DeriveParams,
    Morphing,
    Noise,
    Visibility,
    GateFidelity,
    StateFidelity,
    Wigner,
    SqueezeMoments,
    ValidateAveraging,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::DeriveParams => "derive-params",
            Experiment::Morphing => "morphing",
            Experiment::Noise => "noise",
            Experiment::Visibility => "visibility",
            Experiment::GateFidelity => "gate-fidelity",
            Experiment::StateFidelity => "state-fidelity",
            Experiment::Wigner => "wigner",
            Experiment::SqueezeMoments => "squeeze-moments",
            Experiment::ValidateAveraging => "validate-averaging",
        }
    }

    /// Sections an experiment reads besides `[params]`.
    fn sections(self) -> &'static [&'static str] {
        match self {
            Experiment::DeriveParams => &[],
            Experiment::Morphing | Experiment::Noise | Experiment::StateFidelity => &["protocol", "grid"],
            Experiment::Visibility => &["visibility"],
            Experiment::GateFidelity => &["protocol", "gate"],
            Experiment::Wigner => &["wigner"],
            Experiment::SqueezeMoments => &["squeezing"],
            Experiment::ValidateAveraging => &["averaging"],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// SI knobs with g/2pi = 100 kHz and n_th = 100.
    #[default]
    Reference,
    /// SI knobs only.
    Si,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(default)]
    pub preset: Preset,
    pub omega_m_hz: Option<f64>,
    pub zero_field_over_omega_m: Option<f64>,
    pub g_hz: Option<f64>,
    pub omega_rabi_over_omega_m: Option<f64>,
    pub delta_minus_over_omega_m: Option<f64>,
    pub omega_q_over_omega_m: Option<f64>,
    pub j_hz: Option<f64>,
    pub n_th: Option<f64>,
    pub temperature_mk: Option<f64>,
    pub gamma_m_hz: Option<f64>,
    pub gamma_s_hz: Option<f64>,
}

impl ParamsSection {
    pub fn physical(&self) -> Result<PhysicalParams> {
        let mut p = PhysicalParams::reference_knobs();
        if let Some(f) = self.omega_m_hz {
            p.omega_m = TAU * positive("omega_m_hz", f)?;
        }
        if let Some(r) = self.zero_field_over_omega_m {
            p.zero_field = positive("zero_field_over_omega_m", r)? * p.omega_m;
        }
        if let Some(g) = self.gamma_m_hz {
            p.gamma_m = TAU * non_negative("gamma_m_hz", g)?;
        }
        if let Some(g) = self.gamma_s_hz {
            p.gamma_s = TAU * non_negative("gamma_s_hz", g)?;
        }
        if let Some(t) = self.temperature_mk {
            p.temperature = 1e-3 * non_negative("temperature_mk", t)?;
        }
        Ok(p)
    }

    pub fn overrides(&self, omega_m: f64) -> Result<Overrides> {
        if self.n_th.is_some() && self.temperature_mk.is_some() {
            return Err(Error::Config("[params] give n_th or temperature_mk, not both".into()));
        }
        let mut o = match self.preset {
            Preset::Reference => Overrides { g: Some(TAU * 100e3), n_th: Some(100.0), ..Overrides::default() },
            Preset::Si => Overrides::default(),
        };
        if self.temperature_mk.is_some() {
            o.n_th = None;
        }
        if let Some(n) = self.n_th {
            o.n_th = Some(non_negative("n_th", n)?);
        }
        if let Some(g) = self.g_hz {
            o.g = Some(TAU * positive("g_hz", g)?);
        }
        if let Some(r) = self.omega_rabi_over_omega_m {
            o.omega_rabi = Some(positive("omega_rabi_over_omega_m", r)? * omega_m);
        }
        if let Some(r) = self.delta_minus_over_omega_m {
            o.delta_minus = Some(positive("delta_minus_over_omega_m", r)? * omega_m);
        }
        if let Some(r) = self.omega_q_over_omega_m {
            o.omega_q = Some(positive("omega_q_over_omega_m", r)? * omega_m);
        }
        if let Some(j) = self.j_hz {
            o.j = Some(TAU * positive("j_hz", j)?);
        }
        Ok(o)
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        let p = self.physical()?;
        derive_with(&p, &self.overrides(p.omega_m)?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    #[default]
    Effective,
    SpinQubit,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    /// Spin dephasing on (the exact-model master equation).
    #[serde(default)]
    pub dephasing: bool,
    #[serde(default = "default_leakage")]
    pub leakage_tol: f64,
    #[serde(default)]
    pub model: ModelChoice,
    /// Extra step refinement factor.
    #[serde(default = "one")]
    pub refine: usize,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            truncation: DEFAULT_TRUNCATION,
            dephasing: false,
            leakage_tol: DEFAULT_LEAKAGE_TOL,
            model: ModelChoice::Effective,
            refine: 1,
        }
    }
}

impl ProtocolSection {
    pub fn config(&self, dp: &DerivedParams) -> Result<ProtocolConfig> {
        let mut cfg = ProtocolConfig::from_derived(dp, self.dephasing);
        cfg.truncation = self.truncation;
        cfg.leakage_tol = positive("leakage_tol", self.leakage_tol)?;
        if self.refine == 0 {
            return Err(Error::Config("[protocol] refine must be >= 1".into()));
        }
        cfg.step.refine = self.refine;
        cfg.model = match self.model {
            ModelChoice::Effective => ProtocolModel::EffectiveSegments,
            ModelChoice::SpinQubit => ProtocolModel::SpinQubitExact(Box::new(dp.clone())),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Angle axis: either `points` evenly spaced over the full range or an
/// explicit list in units of pi.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub varphi_points: Option<usize>,
    pub varphi_over_pi: Option<Vec<f64>>,
    pub phi_points: Option<usize>,
    pub phi_over_pi: Option<Vec<f64>>,
}

impl GridSection {
    pub fn varphi(&self) -> Result<Vec<f64>> {
        axis("varphi", self.varphi_points, self.varphi_over_pi.as_deref(), PI / 2.0)
    }

    pub fn phi(&self) -> Result<Vec<f64>> {
        axis("phi", self.phi_points, self.phi_over_pi.as_deref(), TAU)
    }
}

fn axis(name: &str, points: Option<usize>, list: Option<&[f64]>, top: f64) -> Result<Vec<f64>> {
    let v: Vec<f64> = match (points, list) {
        (Some(n), None) if n >= 1 => linspace(0.0, top, n),
        (None, Some(l)) if !l.is_empty() => l.iter().map(|x| x * PI).collect(),
        _ => return Err(Error::Config(format!("[grid] give exactly one of {name}_points (>= 1) or a non-empty {name}_over_pi"))),
    };
    if v.iter().any(|x| !(0.0..=top + 1e-12).contains(x)) {
        return Err(Error::Config(format!("[grid] {name} values must lie in [0, {:.4}]", top)));
    }
    Ok(v.into_iter().map(|x| x.min(top)).collect())
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateChoice {
    Hadamard,
    Phase,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    #[serde(default = "both_gates")]
    pub gates: Vec<GateChoice>,
    #[serde(default = "neg_0_6")]
    pub delta_min: f64,
    #[serde(default = "pos_0_6")]
    pub delta_max: f64,
    #[serde(default = "delta_points")]
    pub delta_points: usize,
    #[serde(default = "threshold")]
    pub threshold: f64,
}

impl Default for GateSection {
    fn default() -> Self {
        Self {
            gates: both_gates(),
            delta_min: neg_0_6(),
            delta_max: pos_0_6(),
            delta_points: delta_points(),
            threshold: threshold(),
        }
    }
}

impl GateSection {
    pub fn deltas(&self) -> Result<Vec<f64>> {
        if self.gates.is_empty() {
            return Err(Error::Config("[gate] gates must not be empty".into()));
        }
        if !(self.delta_min < self.delta_max) || self.delta_min < -1.0 || self.delta_points < 2 {
            return Err(Error::Config("[gate] need -1 <= delta_min < delta_max and delta_points >= 2".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config("[gate] threshold must lie in [0, 1]".into()));
        }
        Ok(linspace(self.delta_min, self.delta_max, self.delta_points))
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisibilitySection {
    #[serde(default = "t_min")]
    pub temperature_min_mk: f64,
    #[serde(default = "t_max")]
    pub temperature_max_mk: f64,
    #[serde(default = "t_points")]
    pub points: usize,
}

impl Default for VisibilitySection {
    fn default() -> Self {
        Self { temperature_min_mk: t_min(), temperature_max_mk: t_max(), points: t_points() }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezingSection {
    #[serde(default = "r_list")]
    pub r: Vec<f64>,
    #[serde(default = "levels_80")]
    pub levels: usize,
    #[serde(default = "nine")]
    pub phi_points: usize,
}

impl Default for SqueezingSection {
    fn default() -> Self {
        Self { r: r_list(), levels: levels_80(), phi_points: nine() }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerSection {
    #[serde(default = "r_wigner")]
    pub r: Vec<f64>,
    /// Fock level squeezed (0 or 1).
    #[serde(default = "one")]
    pub fock: usize,
    #[serde(default = "levels_80")]
    pub levels: usize,
    #[serde(default = "wigner_step")]
    pub step: f64,
    #[serde(default = "cut_step")]
    pub cut_step: f64,
}

impl Default for WignerSection {
    fn default() -> Self {
        Self { r: r_wigner(), fock: 1, levels: levels_80(), step: wigner_step(), cut_step: cut_step() }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AveragingSection {
    /// Common factor applied to every frequency.
    #[serde(default = "scale")]
    pub scale: f64,
    #[serde(default = "rabi_15")]
    pub omega_rabi_over_omega_m: f64,
    #[serde(default = "panels")]
    pub delta_minus_over_rabi: Vec<f64>,
    #[serde(default = "g_ratio")]
    pub g_over_omega_m: f64,
    #[serde(default = "zero_field_ratio")]
    pub zero_field_over_omega_m: f64,
    /// Window length in beam-splitter cycles (pi/J each).
    #[serde(default = "one_f")]
    pub cycles: f64,
    #[serde(default = "samples")]
    pub samples: usize,
    #[serde(default = "steps_per_period")]
    pub steps_per_period: usize,
    #[serde(default = "three")]
    pub levels: usize,
}

impl Default for AveragingSection {
    fn default() -> Self {
        Self {
            scale: scale(),
            omega_rabi_over_omega_m: rabi_15(),
            delta_minus_over_rabi: panels(),
            g_over_omega_m: g_ratio(),
            zero_field_over_omega_m: zero_field_ratio(),
            cycles: 1.0,
            samples: samples(),
            steps_per_period: steps_per_period(),
            levels: 3,
        }
    }
}

impl AveragingSection {
    /// Derived parameters of one panel at the scaled frequencies.
    pub fn panel(&self, base_omega_m: f64, delta_ratio: f64) -> Result<DerivedParams> {
        let s = positive("scale", self.scale)?;
        let mut p = PhysicalParams::reference_knobs();
        p.omega_m = base_omega_m * s;
        let w = p.omega_m;
        p.zero_field = positive("zero_field_over_omega_m", self.zero_field_over_omega_m)? * w;
        let rabi = positive("omega_rabi_over_omega_m", self.omega_rabi_over_omega_m)? * w;
        let o = Overrides {
            g: Some(positive("g_over_omega_m", self.g_over_omega_m)? * w),
            omega_rabi: Some(rabi),
            delta_minus: Some(positive("delta_minus_over_rabi", delta_ratio)? * rabi),
            n_th: Some(0.0),
            ..Overrides::default()
        };
        derive_with(&p, &o)
    }
}

fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}
fn default_leakage() -> f64 {
    DEFAULT_LEAKAGE_TOL
}
fn one() -> usize {
    1
}
fn one_f() -> f64 {
    1.0
}
fn three() -> usize {
    3
}
fn nine() -> usize {
    9
}
fn both_gates() -> Vec<GateChoice> {
    vec![GateChoice::Hadamard, GateChoice::Phase]
}
fn neg_0_6() -> f64 {
    -0.6
}
fn pos_0_6() -> f64 {
    0.6
}
fn delta_points() -> usize {
    241
}
fn threshold() -> f64 {
    0.9
}
fn t_min() -> f64 {
    1.0
}
fn t_max() -> f64 {
    100.0
}
fn t_points() -> usize {
    100
}
fn r_list() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 1.0]
}
fn r_wigner() -> Vec<f64> {
    vec![0.0, 1.0]
}
fn levels_80() -> usize {
    80
}
fn wigner_step() -> f64 {
    0.1
}
fn cut_step() -> f64 {
    1e-3
}
fn scale() -> f64 {
    0.01
}
fn rabi_15() -> f64 {
    15.0
}
fn panels() -> Vec<f64> {
    vec![10.0, 25.0, 35.0]
}
fn g_ratio() -> f64 {
    0.05
}
fn zero_field_ratio() -> f64 {
    1435.0
}
fn samples() -> usize {
    200
}
fn steps_per_period() -> usize {
    400
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be positive (got {v})")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be >= 0 (got {v})")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub params: ParamsSection,
    pub protocol: Option<ProtocolSection>,
    pub grid: Option<GridSection>,
    pub gate: Option<GateSection>,
    pub visibility: Option<VisibilitySection>,
    pub squeezing: Option<SqueezingSection>,
    pub wigner: Option<WignerSection>,
    pub averaging: Option<AveragingSection>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Reject sections the experiment does not read and a mismatching
    /// `experiment` key.
    pub fn check_for(&self, exp: Experiment) -> Result<()> {
        if let Some(e) = self.experiment {
            if e != exp {
                return Err(Error::Config(format!(
                    "config is for '{}' but '{}' was requested",
                    e.name(),
                    exp.name()
                )));
            }
        }
        let present = [
            ("protocol", self.protocol.is_some()),
            ("grid", self.grid.is_some()),
            ("gate", self.gate.is_some()),
            ("visibility", self.visibility.is_some()),
            ("squeezing", self.squeezing.is_some()),
            ("wigner", self.wigner.is_some()),
            ("averaging", self.averaging.is_some()),
        ];
        for (name, is) in present {
            if is && !exp.sections().contains(&name) {
                return Err(Error::Config(format!("section [{name}] is not used by '{}'", exp.name())));
            }
        }
        if exp.sections().contains(&"grid") && self.grid.is_none() {
            return Err(Error::Config(format!("'{}' needs a [grid] section", exp.name())));
        }
        Ok(())
    }
}
