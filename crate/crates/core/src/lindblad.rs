// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! Master-equation integration with thermal phonon baths and optional spin
//! dephasing:
//!
//! `drho/dt = i[rho, H] - sum_c r_c (o+ o rho - 2 o rho o+ + rho o+ o)`
//!
//! with r = (gamma_m/2) n_th for b+, (gamma_m/2)(n_th + 1) for b and
//! gamma_s/2 for sigma_z'. Under this convention a lone phonon decays as
//! exp(-gamma_m t).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qlinalg::{CMatrix, DensityMatrix, HilbertSpace, HybridOperators, Operator, C64, I, ZERO};

pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;
pub const NEGATIVITY_LIMIT: f64 = 1e-6;
pub const UNITARITY_TOL: f64 = 1e-9;

/// One dissipator `rate * L(operator)` in the convention above.
#[derive(Clone, Debug)]
pub struct CollapseChannel {
    pub label: String,
    pub operator: Operator,
    pub rate: f64,
}

impl CollapseChannel {
    pub fn new(label: impl Into<String>, operator: Operator, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!("collapse rate must be >= 0 (got {rate})")));
        }
        Ok(Self { label: label.into(), operator, rate })
    }
}

/// Heating and cooling channels for both CNT modes at equal damping.
pub fn thermal_channels(ops: &HybridOperators, gamma_m: f64, n_th: f64) -> Result<Vec<CollapseChannel>> {
    if !(n_th >= 0.0) {
        return Err(Error::InvalidParameter(format!("n_th must be >= 0 (got {n_th})")));
    }
    let mut out = Vec::with_capacity(4);
    for (name, b) in [("b1", &ops.b1), ("b2", &ops.b2)] {
        out.push(CollapseChannel::new(format!("{name}+"), b.dagger(), 0.5 * gamma_m * n_th)?);
        out.push(CollapseChannel::new(name, b.clone(), 0.5 * gamma_m * (n_th + 1.0))?);
    }
    Ok(out)
}

/// Pure dephasing of the |0>/|D> coherence, `(gamma_s/2) L(sigma_z')`.
pub fn dephasing_channel(ops: &HybridOperators, gamma_s: f64) -> Result<CollapseChannel> {
    let op = ops
        .sigma_z_prime
        .clone()
        .ok_or_else(|| Error::Dimension("spin dephasing needs the three-level spin".into()))?;
    CollapseChannel::new("sz'", op, 0.5 * gamma_s)
}

/// Ordered Hamiltonian segments with instantaneous unitaries in between.
/// A unitary at index `i` acts just before segment `i`; index
/// `segments.len()` places it after the last segment.
#[derive(Clone, Debug)]
pub struct PulseSchedule {
    space: Arc<HilbertSpace>,
    segments: Vec<Segment>,
    unitaries: Vec<(usize, String, Operator)>,
}

#[derive(Clone, Debug)]
pub struct Segment {
    pub label: String,
    pub hamiltonian: Operator,
    pub duration: f64,
}

impl PulseSchedule {
    pub fn new(space: Arc<HilbertSpace>) -> Self {
        Self { space, segments: Vec::new(), unitaries: Vec::new() }
    }

    pub fn segment(mut self, label: impl Into<String>, hamiltonian: Operator, duration: f64) -> Result<Self> {
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::InvalidParameter(format!("segment duration must be >= 0 (got {duration})")));
        }
        hamiltonian.check_space(&self.space)?;
        if !hamiltonian.is_hermitian(1e-12 * hamiltonian.max_abs().max(1.0)) {
            return Err(Error::InvalidParameter("segment Hamiltonian is not Hermitian".into()));
        }
        self.segments.push(Segment { label: label.into(), hamiltonian, duration });
        Ok(self)
    }

    /// Inserts `u` after the segments added so far.
    pub fn unitary(mut self, label: impl Into<String>, u: Operator) -> Result<Self> {
        u.check_space(&self.space)?;
        let defect = u.unitarity_defect();
        if defect > UNITARITY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        self.unitaries.push((self.segments.len(), label.into(), u));
        Ok(self)
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    fn unitaries_at(&self, idx: usize) -> impl Iterator<Item = &Operator> {
        self.unitaries.iter().filter(move |(i, _, _)| *i == idx).map(|(_, _, u)| u)
    }
}

/// Step-size policy for the fixed-step RK4 integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    /// h <= 1 / (norm_factor * (||H|| + sum 2 r ||o||^2)).
    pub norm_factor: f64,
    pub min_steps_per_segment: usize,
    pub samples_per_segment: usize,
    /// Extra subdivision on top of the policy; 2 halves every step.
    pub refine: usize,
    /// Run the eigenvalue-based positivity check at segment ends.
    pub check_positivity: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { norm_factor: 50.0, min_steps_per_segment: 1000, samples_per_segment: 200, refine: 1, check_positivity: true }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub observables: BTreeMap<String, Vec<f64>>,
    pub final_state: DensityMatrix,
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
    /// Segment boundaries, starting at 0.
    pub segment_ends: Vec<f64>,
    pub steps: usize,
}

impl Trajectory {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.observables.get(name).map(|v| v.as_slice())
    }
}

/// Compressed-row sparse matrix used only inside the integrator.
#[derive(Clone, Debug)]
struct Csr {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl Csr {
    fn from_dense(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v != ZERO {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self { n, indptr, indices, values }
    }

    /// out = self * x for row-major n x n blocks.
    fn mul_dense(&self, x: &[C64], out: &mut [C64]) {
        let n = self.n;
        out.fill(ZERO);
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for p in self.indptr[i]..self.indptr[i + 1] {
                let v = self.values[p];
                let src = &x[self.indices[p] * n..(self.indices[p] + 1) * n];
                for (o, s) in row.iter_mut().zip(src) {
                    *o += v * s;
                }
            }
        }
    }

    /// out += alpha * self * x.
    fn mul_dense_acc(&self, x: &[C64], out: &mut [C64], alpha: f64) {
        let n = self.n;
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for p in self.indptr[i]..self.indptr[i + 1] {
                let v = self.values[p] * alpha;
                let src = &x[self.indices[p] * n..(self.indices[p] + 1) * n];
                for (o, s) in row.iter_mut().zip(src) {
                    *o += v * s;
                }
            }
        }
    }

    /// Tr(self * rho).
    fn trace_with(&self, rho: &[C64]) -> C64 {
        let n = self.n;
        let mut acc = ZERO;
        for i in 0..n {
            for p in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[p] * rho[self.indices[p] * n + i];
            }
        }
        acc
    }
}

fn to_row_major(m: &CMatrix) -> Vec<C64> {
    let n = m.nrows();
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = m[(i, j)];
        }
    }
    v
}

fn from_row_major(v: &[C64], n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| v[i * n + j])
}

fn adjoint_into(a: &[C64], out: &mut [C64], n: usize) {
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j].conj();
        }
    }
}

/// The generator in the form `-i(K rho - rho K+) + sum 2 r o rho o+`, with
/// `K = H - i sum r o+ o`.
struct Generator {
    n: usize,
    k: Csr,
    jumps: Vec<(Csr, f64)>,
    scratch_a: Vec<C64>,
    scratch_b: Vec<C64>,
}

impl Generator {
    fn new(h: &Operator, channels: &[CollapseChannel]) -> Self {
        let mut k = h.matrix().clone();
        let mut jumps = Vec::new();
        for c in channels.iter().filter(|c| c.rate > 0.0) {
            let o = c.operator.matrix();
            k -= (o.adjoint() * o) * C64::new(0.0, c.rate);
            jumps.push((Csr::from_dense(o), 2.0 * c.rate));
        }
        let n = h.dim();
        Self { n, k: Csr::from_dense(&k), jumps, scratch_a: vec![ZERO; n * n], scratch_b: vec![ZERO; n * n] }
    }

    fn apply(&mut self, rho: &[C64], out: &mut [C64]) {
        let n = self.n;
        self.k.mul_dense(rho, &mut self.scratch_a);
        let m = &self.scratch_a;
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = -I * (m[i * n + j] - m[j * n + i].conj());
            }
        }
        for (o, w) in &self.jumps {
            // o rho o+ = o (o rho)+ for Hermitian rho
            o.mul_dense(rho, &mut self.scratch_a);
            adjoint_into(&self.scratch_a, &mut self.scratch_b, n);
            o.mul_dense_acc(&self.scratch_b, out, *w);
        }
    }
}

fn check_channels(space: &HilbertSpace, channels: &[CollapseChannel]) -> Result<()> {
    for c in channels {
        c.operator.check_space(space)?;
    }
    Ok(())
}

/// Right-hand side of the master equation for a single state.
pub fn liouvillian_apply(h: &Operator, channels: &[CollapseChannel], rho: &DensityMatrix) -> Result<CMatrix> {
    h.check_space(rho.space())?;
    check_channels(rho.space(), channels)?;
    let n = h.dim();
    let mut gen = Generator::new(h, channels);
    let r = to_row_major(rho.matrix());
    let mut out = vec![ZERO; n * n];
    gen.apply(&r, &mut out);
    Ok(from_row_major(&out, n))
}

/// `U rho U+`, re-Hermitized.
pub fn apply_unitary(rho: &DensityMatrix, u: &Operator) -> Result<DensityMatrix> {
    u.check_space(rho.space())?;
    let defect = u.unitarity_defect();
    if defect > UNITARITY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let m = u.matrix() * rho.matrix() * u.matrix().adjoint();
    let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::new_unchecked(rho.space().clone(), herm)
}

fn hermitize_in_place(v: &mut [C64], n: usize) {
    for i in 0..n {
        v[i * n + i].im = 0.0;
        for j in i + 1..n {
            let a = 0.5 * (v[i * n + j] + v[j * n + i].conj());
            v[i * n + j] = a;
            v[j * n + i] = a.conj();
        }
    }
}

fn generator_scale(h: &Operator, channels: &[CollapseChannel]) -> f64 {
    let mut s = h.hermitian_spectral_norm();
    for c in channels.iter().filter(|c| c.rate > 0.0) {
        let oo = c.operator.dagger() * &c.operator;
        s += 2.0 * c.rate * oo.hermitian_spectral_norm();
    }
    s
}

/// Integrates `rho0` through `schedule`, sampling `observables` (taken as
/// Re Tr(O rho)) at evenly spaced points of every segment.
pub fn integrate(
    schedule: &PulseSchedule,
    rho0: &DensityMatrix,
    channels: &[CollapseChannel],
    observables: &[(&str, &Operator)],
    control: &StepControl,
) -> Result<Trajectory> {
    let space = schedule.space().clone();
    if **rho0.space() != *space {
        return Err(Error::SpaceMismatch(format!("initial state on {} but schedule on {space}", rho0.space())));
    }
    rho0.validate(1e-10, 1e-8, 1e-8)?;
    check_channels(&space, channels)?;
    for (_, o) in observables {
        o.check_space(&space)?;
    }
    if control.samples_per_segment == 0 || control.refine == 0 || !(control.norm_factor > 0.0) {
        return Err(Error::InvalidParameter("step control needs positive samples, refine and norm factor".into()));
    }
    let n = space.total_dim();
    let obs: Vec<(String, Csr)> = observables.iter().map(|(k, o)| (k.to_string(), Csr::from_dense(o.matrix()))).collect();
    let mut series: BTreeMap<String, Vec<f64>> = obs.iter().map(|(k, _)| (k.clone(), Vec::new())).collect();
    let mut times = Vec::new();
    let mut rho = to_row_major(rho0.matrix());
    let mut t = 0.0;
    let mut max_drift = 0.0f64;
    let mut min_eig = f64::INFINITY;
    let mut segment_ends = vec![0.0];
    let mut total_steps = 0usize;

    let record = |rho: &[C64], t: f64, times: &mut Vec<f64>, series: &mut BTreeMap<String, Vec<f64>>| {
        times.push(t);
        for (k, o) in &obs {
            series.get_mut(k).unwrap().push(o.trace_with(rho).re);
        }
    };

    let apply_unitaries = |idx: usize, rho: &mut Vec<C64>| -> Result<()> {
        for u in schedule.unitaries_at(idx) {
            let dm = DensityMatrix::new_unchecked(space.clone(), from_row_major(rho, n))?;
            *rho = to_row_major(apply_unitary(&dm, u)?.matrix());
        }
        Ok(())
    };

    apply_unitaries(0, &mut rho)?;
    record(&rho, t, &mut times, &mut series);

    let mut k1 = vec![ZERO; n * n];
    let mut k2 = vec![ZERO; n * n];
    let mut k3 = vec![ZERO; n * n];
    let mut k4 = vec![ZERO; n * n];
    let mut tmp = vec![ZERO; n * n];

    for (si, seg) in schedule.segments().iter().enumerate() {
        if seg.duration > 0.0 {
            let scale = generator_scale(&seg.hamiltonian, channels);
            let h_max = if scale > 0.0 { 1.0 / (control.norm_factor * scale) } else { f64::INFINITY };
            let mut steps = ((seg.duration / h_max).ceil() as usize).max(control.min_steps_per_segment).max(1);
            let per_sample = steps.div_ceil(control.samples_per_segment);
            steps = per_sample * control.samples_per_segment * control.refine;
            let per_sample = per_sample * control.refine;
            let h = seg.duration / steps as f64;
            let mut gen = Generator::new(&seg.hamiltonian, channels);
            let t0 = t;
            for step in 1..=steps {
                gen.apply(&rho, &mut k1);
                for (x, (r, k)) in tmp.iter_mut().zip(rho.iter().zip(&k1)) {
                    *x = r + k * (0.5 * h);
                }
                gen.apply(&tmp, &mut k2);
                for (x, (r, k)) in tmp.iter_mut().zip(rho.iter().zip(&k2)) {
                    *x = r + k * (0.5 * h);
                }
                gen.apply(&tmp, &mut k3);
                for (x, (r, k)) in tmp.iter_mut().zip(rho.iter().zip(&k3)) {
                    *x = r + k * h;
                }
                gen.apply(&tmp, &mut k4);
                let w = h / 6.0;
                for i in 0..n * n {
                    rho[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
                }
                if step % per_sample == 0 {
                    let ts = if step == steps { t0 + seg.duration } else { t0 + h * step as f64 };
                    record(&rho, ts, &mut times, &mut series);
                }
            }
            total_steps += steps;
            t = t0 + seg.duration;
            hermitize_in_place(&mut rho, n);
        }
        let dm = DensityMatrix::new_unchecked(space.clone(), from_row_major(&rho, n))?;
        let drift = (dm.trace() - C64::new(1.0, 0.0)).norm();
        max_drift = max_drift.max(drift);
        if !drift.is_finite() || drift > TRACE_DRIFT_LIMIT {
            return Err(Error::IntegrationQuality(format!(
                "trace drift {drift:.3e} after segment {si} ('{}') exceeds {TRACE_DRIFT_LIMIT:e}",
                seg.label
            )));
        }
        if control.check_positivity {
            let e = dm.min_eigenvalue();
            min_eig = min_eig.min(e);
            if e < -NEGATIVITY_LIMIT {
                return Err(Error::IntegrationQuality(format!(
                    "density matrix eigenvalue {e:.3e} after segment {si} ('{}') is below -{NEGATIVITY_LIMIT:e}",
                    seg.label
                )));
            }
        }
        segment_ends.push(t);
        apply_unitaries(si + 1, &mut rho)?;
    }

    let final_state = DensityMatrix::new_unchecked(space, from_row_major(&rho, n))?;
    Ok(Trajectory {
        times,
        observables: series,
        final_state,
        max_trace_drift: max_drift,
        min_eigenvalue: min_eig,
        segment_ends,
        steps: total_steps,
    })
}

/// Advances a ket-space unitary `U(t0 + dt, t0)` for a time-dependent
/// Hamiltonian with `steps` RK4 steps.
pub fn propagate_unitary_td<F>(h_of_t: F, space: &Arc<HilbertSpace>, t0: f64, dt: f64, steps: usize) -> Result<Operator>
where
    F: Fn(f64) -> Operator,
{
    if steps == 0 {
        return Err(Error::InvalidParameter("need at least one step".into()));
    }
    let n = space.total_dim();
    let h = dt / steps as f64;
    let mut u = CMatrix::identity(n, n);
    let mi = C64::new(0.0, -1.0);
    for s in 0..steps {
        let t = t0 + h * s as f64;
        let h0 = h_of_t(t);
        let hm = h_of_t(t + 0.5 * h);
        let h1 = h_of_t(t + h);
        let k1 = h0.matrix() * &u * mi;
        let k2 = hm.matrix() * (&u + &k1 * C64::new(0.5 * h, 0.0)) * mi;
        let k3 = hm.matrix() * (&u + &k2 * C64::new(0.5 * h, 0.0)) * mi;
        let k4 = h1.matrix() * (&u + &k3 * C64::new(h, 0.0)) * mi;
        u += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
    }
    Operator::new(space.clone(), u)
}
