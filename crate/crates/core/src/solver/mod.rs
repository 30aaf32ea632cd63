//! Mild-solution solvers: an exponential Euler time stepper for long runs and
//! Picard iteration of the Duhamel map on short intervals.

mod picard;

pub use picard::{default_levels, picard_solve, uniqueness_probe, PicardOutcome, UniquenessLevel, UniquenessReport};

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{domain, invalid, Error, Result};
use crate::field::{GridField, GridGeometry};
use crate::problem::ProblemSpec;
use crate::semigroup::{HeatKernelPlan, Spectrum};

fn default_threshold() -> f64 {
    1e8
}
fn default_picard_iters() -> usize {
    64
}
fn default_picard_tol() -> f64 {
    1e-12
}
fn default_true() -> bool {
    true
}
fn default_min_dt() -> f64 {
    1e-12
}
fn default_max_dt() -> f64 {
    1.0
}
fn default_max_steps() -> usize {
    2_000_000
}
fn default_picard_nodes() -> usize {
    32
}

/// Time-integration settings. Only `dt0` and `t_end` are required in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub dt0: f64,
    pub t_end: f64,
    /// Sup-norm level that counts as blow-up.
    #[serde(default = "default_threshold")]
    pub blowup_threshold: f64,
    #[serde(default = "default_picard_iters")]
    pub picard_max_iters: usize,
    /// Relative stopping tolerance of the Picard iteration.
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_true")]
    pub adapt: bool,
    #[serde(default = "default_min_dt")]
    pub min_dt: f64,
    /// Ceiling for step doubling.
    #[serde(default = "default_max_dt")]
    pub max_dt: f64,
    /// Accepted plus rejected steps before the run is declared inconclusive.
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Test mode: `false` drops the nonlinear load entirely.
    #[serde(default = "default_true")]
    pub nonlinearity: bool,
    /// Number of subintervals of the Picard inner time grid.
    #[serde(default = "default_picard_nodes")]
    pub picard_nodes: usize,
}

impl SolverConfig {
    pub fn new(dt0: f64, t_end: f64) -> Self {
        Self {
            dt0,
            t_end,
            blowup_threshold: default_threshold(),
            picard_max_iters: default_picard_iters(),
            picard_tol: default_picard_tol(),
            adapt: true,
            min_dt: default_min_dt(),
            max_dt: default_max_dt(),
            max_steps: default_max_steps(),
            nonlinearity: true,
            picard_nodes: default_picard_nodes(),
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.min_dt > 0.0 && self.dt0 > self.min_dt && self.dt0.is_finite()) {
            return Err(invalid("solver config needs dt0 > min_dt > 0"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(invalid("solver config needs finite t_end > 0"));
        }
        if !(self.picard_tol > 0.0) {
            return Err(invalid("solver config needs picard_tol > 0"));
        }
        if !(self.blowup_threshold > 0.0 && self.blowup_threshold.is_finite()) {
            return Err(invalid("blowup_threshold must be finite and > 0"));
        }
        if !(self.max_dt >= self.dt0) {
            return Err(invalid("max_dt must be ≥ dt0"));
        }
        if self.picard_nodes == 0 || self.picard_max_iters == 0 {
            return Err(invalid("picard_nodes and picard_max_iters must be ≥ 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Completed,
    BlowupDetected,
    StepUnderflow,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Completed => "completed",
            Self::BlowupDetected => "blowup_detected",
            Self::StepUnderflow => "step_underflow",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    /// SHA-256 of the JSON-serialized problem.
    pub spec_hash: String,
    pub geometry: GridGeometry,
    /// Largest boundary value `e^{−r(L−|μ|∞)²}` over the terms of `u₀` and `w`.
    pub truncation_bound: f64,
    /// Lebesgue index of `q_norms`.
    pub q: f64,
    pub blowup_threshold: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub q_norms: Vec<f64>,
    pub sup_norms: Vec<f64>,
    /// Step that produced each sample; 0 for the initial state.
    pub dt_history: Vec<f64>,
    pub verdict: Verdict,
    pub blowup_time_estimate: Option<f64>,
    pub metadata: TrajectoryMetadata,
}

impl TrajectoryRecord {
    /// Columns `t, q_norm, sup_norm, dt`.
    pub fn write_csv(&self, w: impl std::io::Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "q_norm", "sup_norm", "dt"])?;
        for i in 0..self.times.len() {
            out.write_record(&[
                self.times[i].to_string(),
                self.q_norms[i].to_string(),
                self.sup_norms[i].to_string(),
                self.dt_history[i].to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    fn push(&mut self, t: f64, u: &GridField, dt: f64) {
        self.times.push(t);
        self.q_norms.push(u.lq_norm(self.metadata.q));
        self.sup_norms.push(u.sup_norm());
        self.dt_history.push(dt);
    }
}

pub fn spec_hash(spec: &ProblemSpec) -> String {
    let bytes = serde_json::to_vec(spec).expect("problem serializes");
    hex::encode(Sha256::digest(&bytes))
}

pub fn truncation_bound(spec: &ProblemSpec, geometry: &GridGeometry) -> f64 {
    spec.u0
        .truncation_bound(geometry.half_width)
        .max(spec.w.truncation_bound(geometry.half_width))
}

/// `∫_a^{a+dt} τ^ϱ dτ` and the lag `a + dt − τ̄`, where `τ̄` is the
/// `τ^ϱ`-weighted centroid of the step.
///
/// Using the centroid rather than the half step keeps the first step
/// accurate when `ϱ < 0` puts most of the weight near `τ = 0`.
pub fn forcing_weight(a: f64, dt: f64, rho: f64) -> Result<(f64, f64)> {
    if !(rho > -1.0) {
        return Err(domain(format!("forcing needs rho > -1, got {rho}")));
    }
    if !(a >= 0.0 && dt > 0.0) {
        return Err(invalid(format!("forcing needs t_n ≥ 0 and dt > 0, got {a}, {dt}")));
    }
    let k = rho + 1.0;
    let b = a + dt;
    if a == 0.0 {
        // τ̄ = (k/(k+1))·b
        return Ok((b.powf(k) / k, b / (k + 1.0)));
    }
    let l = (dt / a).ln_1p();
    let em_k = (k * l).exp_m1();
    let weight = a.powf(k) * em_k / k;
    let centroid = a * (k / (k + 1.0)) * ((k + 1.0) * l).exp_m1() / em_k;
    Ok((weight, (b - centroid).clamp(0.0, dt)))
}

/// `∫_{t_n}^{t_n+dt} τ^ϱ S(t_n+dt−τ)w dτ ≈ W·S(lag)w`.
pub fn forcing_increment(
    plan: &HeatKernelPlan,
    w: &GridField,
    t_n: f64,
    dt: f64,
    rho: f64,
) -> Result<GridField> {
    let (weight, lag) = forcing_weight(t_n, dt, rho)?;
    if w.is_zero() {
        return GridField::zeros(*w.geometry());
    }
    plan.apply(w, lag)?.scaled(weight)
}

/// Exponential Euler with precomputed spectra of the state and its load.
pub(crate) struct Stepper<'a> {
    plan: &'a HeatKernelPlan,
    p: f64,
    q: f64,
    alpha: f64,
    rho: f64,
    nonlinear: bool,
    w_hat: Option<Spectrum>,
}

pub(crate) struct Prepared {
    u_hat: Spectrum,
    n_hat: Option<Spectrum>,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(
        spec: &ProblemSpec,
        plan: &'a HeatKernelPlan,
        w: &GridField,
        nonlinear: bool,
    ) -> Result<Self> {
        let w_hat = if w.is_zero() { None } else { Some(plan.forward(w)?) };
        Ok(Self { plan, p: spec.p, q: spec.q, alpha: spec.alpha, rho: spec.rho, nonlinear, w_hat })
    }

    pub(crate) fn prepare(&self, u: &GridField) -> Result<Prepared> {
        let u_hat = self.plan.forward(u)?;
        let n_hat = if self.nonlinear {
            let n = u.nonlinearity(self.p, self.q, self.alpha)?;
            if n.is_zero() { None } else { Some(self.plan.forward(&n)?) }
        } else {
            None
        };
        Ok(Prepared { u_hat, n_hat })
    }

    /// `S(dt)u + S(dt/2)(dt·N(u)) + W·S(lag)w`.
    pub(crate) fn advance(&self, prep: &Prepared, t_n: f64, dt: f64) -> Result<GridField> {
        let (weight, lag) = if self.w_hat.is_some() { forcing_weight(t_n, dt, self.rho)? } else { (0.0, 0.0) };
        let plan = self.plan;
        let mut out: Spectrum = Vec::with_capacity(prep.u_hat.len());
        for (i, &u) in prep.u_hat.iter().enumerate() {
            let mut c = u * plan.multiplier(i, dt);
            if let Some(n) = &prep.n_hat {
                c += n[i] * (dt * plan.multiplier(i, 0.5 * dt));
            }
            if let Some(w) = &self.w_hat {
                c += w[i] * (weight * plan.multiplier(i, lag));
            }
            out.push(c);
        }
        if out.iter().any(|c: &Complex<f64>| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("time step"));
        }
        plan.inverse(out)
    }
}

/// One exponential Euler step from `(t_n, u_n)`.
pub fn step(
    spec: &ProblemSpec,
    u_n: &GridField,
    w: &GridField,
    t_n: f64,
    dt: f64,
    plan: &HeatKernelPlan,
) -> Result<GridField> {
    step_with(spec, u_n, w, t_n, dt, plan, true)
}

/// [`step`] with the nonlinear load optionally switched off.
pub fn step_with(
    spec: &ProblemSpec,
    u_n: &GridField,
    w: &GridField,
    t_n: f64,
    dt: f64,
    plan: &HeatKernelPlan,
    nonlinear: bool,
) -> Result<GridField> {
    let stepper = Stepper::new(spec, plan, w, nonlinear)?;
    let prep = stepper.prepare(u_n)?;
    stepper.advance(&prep, t_n, dt)
}

/// A trajectory together with the last finite state.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: TrajectoryRecord,
    pub final_state: GridField,
}

/// Samples `u₀` and `w` on `geometry` and integrates to `t_end` or blow-up.
pub fn run(spec: &ProblemSpec, config: &SolverConfig, geometry: GridGeometry) -> Result<TrajectoryRecord> {
    Ok(run_with_state(spec, config, geometry)?.record)
}

pub fn run_with_state(spec: &ProblemSpec, config: &SolverConfig, geometry: GridGeometry) -> Result<RunOutput> {
    spec.check()?;
    if geometry.dim != spec.dim {
        return Err(invalid(format!(
            "grid dimension {} does not match problem dimension {}",
            geometry.dim, spec.dim
        )));
    }
    let plan = HeatKernelPlan::new(geometry)?;
    let u0 = GridField::sample(&spec.u0, geometry)?;
    let w = GridField::sample(&spec.w, geometry)?;
    run_fields(spec, config, &plan, u0, &w)
}

/// Growth above which a step is rejected and retried at half size.
pub const GROWTH_REJECT: f64 = 0.2;
/// Growth below which the next step is doubled.
pub const GROWTH_RELAX: f64 = 0.01;

/// Integrates from already-sampled fields.
pub fn run_fields(
    spec: &ProblemSpec,
    config: &SolverConfig,
    plan: &HeatKernelPlan,
    u0: GridField,
    w: &GridField,
) -> Result<RunOutput> {
    config.check()?;
    u0.require_same_geometry(w)?;
    let geometry = *plan.geometry();
    let stepper = Stepper::new(spec, plan, w, config.nonlinearity)?;
    let mut record = TrajectoryRecord {
        times: Vec::new(),
        q_norms: Vec::new(),
        sup_norms: Vec::new(),
        dt_history: Vec::new(),
        verdict: Verdict::Completed,
        blowup_time_estimate: None,
        metadata: TrajectoryMetadata {
            spec_hash: spec_hash(spec),
            geometry,
            truncation_bound: truncation_bound(spec, &geometry),
            q: spec.q,
            blowup_threshold: config.blowup_threshold,
            accepted_steps: 0,
            rejected_steps: 0,
        },
    };
    let threshold = config.blowup_threshold;
    let mut u = u0;
    let mut t = 0.0;
    let mut dt = config.dt0;
    record.push(t, &u, 0.0);
    if u.sup_norm() >= threshold {
        record.verdict = Verdict::BlowupDetected;
        record.blowup_time_estimate = Some(0.0);
        return Ok(RunOutput { record, final_state: u });
    }
    let mut budget = config.max_steps;
    'outer: while t < config.t_end {
        let prep = match stepper.prepare(&u) {
            Ok(p) => p,
            Err(Error::NonFinite(_)) => {
                record.verdict = Verdict::BlowupDetected;
                record.blowup_time_estimate = Some(t);
                break;
            }
            Err(e) => return Err(e),
        };
        let sup_n = u.sup_norm();
        loop {
            if budget == 0 {
                record.verdict = Verdict::StepUnderflow;
                break 'outer;
            }
            budget -= 1;
            let remaining = config.t_end - t;
            // Absorb rounding drift so a fixed-step run lands on t_end exactly.
            let h = if dt * (1.0 + 1e-9) >= remaining { remaining } else { dt };
            let candidate = match stepper.advance(&prep, t, h) {
                Ok(v) => Some(v),
                Err(Error::NonFinite(_)) => None,
                Err(e) => return Err(e),
            };
            let (crossed, growth) = match &candidate {
                Some(v) => {
                    let s = v.sup_norm();
                    let g = if sup_n > 0.0 { s / sup_n - 1.0 } else { 0.0 };
                    (s >= threshold, g)
                }
                None => (true, f64::INFINITY),
            };
            if config.adapt && growth > GROWTH_REJECT {
                if 0.5 * h >= config.min_dt {
                    dt = 0.5 * h;
                    record.metadata.rejected_steps += 1;
                    continue;
                }
                if !crossed {
                    record.verdict = Verdict::StepUnderflow;
                    break 'outer;
                }
            }
            if crossed {
                let (s, state) = bisect_crossing(&stepper, &prep, t, h, threshold)?;
                record.metadata.accepted_steps += 1;
                record.push(t + s, &state, s);
                record.verdict = Verdict::BlowupDetected;
                record.blowup_time_estimate = Some(t + s);
                u = state;
                break 'outer;
            }
            let next = candidate.expect("a finite state below the threshold");
            record.metadata.accepted_steps += 1;
            t = if h == remaining { config.t_end } else { t + h };
            record.push(t, &next, h);
            u = next;
            if config.adapt && growth < GROWTH_RELAX {
                dt = (2.0 * dt).min(config.max_dt);
            }
            break;
        }
    }
    Ok(RunOutput { record, final_state: u })
}

/// Smallest sub-step in `(0, h]` whose result reaches the threshold (or
/// overflows), together with the first finite state at or above it.
fn bisect_crossing(
    stepper: &Stepper<'_>,
    prep: &Prepared,
    t: f64,
    h: f64,
    threshold: f64,
) -> Result<(f64, GridField)> {
    let mut lo = 0.0;
    let mut hi = h;
    let mut best: Option<GridField> = None;
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (t + hi).max(1e-300) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match stepper.advance(prep, t, mid) {
            Ok(v) if v.sup_norm() >= threshold => {
                hi = mid;
                best = Some(v);
            }
            Ok(_) => lo = mid,
            Err(Error::NonFinite(_)) => hi = mid,
            Err(e) => return Err(e),
        }
    }
    let state = match best {
        Some(v) if v.sup_norm() >= threshold => v,
        _ => match stepper.advance(prep, t, hi) {
            Ok(v) => v,
            Err(Error::NonFinite(_)) => {
                return Err(Error::NonFinite("no finite state above the blow-up threshold"))
            }
            Err(e) => return Err(e),
        },
    };
    Ok((hi, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProfileSpec;

    fn geom(dim: usize, l: f64, m: usize) -> GridGeometry {
        GridGeometry::new(dim, l, m).unwrap()
    }

    #[test]
    fn forcing_weight_examples() {
        let (w, lag) = forcing_weight(0.0, 0.01, -0.5).unwrap();
        assert!((w - 0.2).abs() < 1e-15);
        assert!((lag - 0.01 * (1.0 - 0.5 / 1.5)).abs() < 1e-15, "{lag}");
        // ϱ = 0 reduces to dt and the half step.
        let (w, lag) = forcing_weight(3.0, 0.25, 0.0).unwrap();
        assert!((w - 0.25).abs() < 1e-15 && (lag - 0.125).abs() < 1e-14);
        assert!(forcing_weight(1.0, 0.1, -1.0).is_err());
    }

    #[test]
    fn forcing_weight_is_exact_far_from_zero() {
        for &(a, dt, rho) in &[(1e-9, 1e-3, -0.7), (5.0, 1e-8, 0.3), (2.0, 0.5, -0.5)] {
            let (w, _) = forcing_weight(a, dt, rho).unwrap();
            let k: f64 = rho + 1.0;
            let exact = ((a + dt).powf(k) - a.powf(k)) / k;
            assert!(((w - exact) / exact).abs() < 1e-6, "{a} {dt} {rho}");
        }
    }

    #[test]
    fn forcing_increment_examples() {
        let g = geom(1, 8.0, 64);
        let plan = HeatKernelPlan::new(g).unwrap();
        let z = GridField::zeros(g).unwrap();
        assert!(forcing_increment(&plan, &z, 0.0, 0.1, -0.5).unwrap().is_zero());
        let frozen = HeatKernelPlan::frozen(g).unwrap();
        let w = GridField::sample(&ProfileSpec::centered(1.0, 1.0, 1), g).unwrap();
        let inc = forcing_increment(&frozen, &w, 0.7, 0.05, 0.0).unwrap();
        let expect = w.scaled(0.05).unwrap();
        assert!(inc.sub(&expect).unwrap().sup_norm() < 1e-16);
    }

    #[test]
    fn pure_heat_step() {
        let g = geom(1, 16.0, 128);
        let plan = HeatKernelPlan::new(g).unwrap();
        let spec = ProblemSpec::parameters(1, 2.0, 2.0, 0.0, 0.0);
        let u = GridField::sample(&ProfileSpec::centered(1.0, 1.0, 1), g).unwrap();
        let z = GridField::zeros(g).unwrap();
        let a = step_with(&spec, &u, &z, 0.0, 0.3, &plan, false).unwrap();
        let b = plan.apply(&u, 0.3).unwrap();
        assert!(a.sub(&b).unwrap().sup_norm() < 1e-15);
    }

    #[test]
    fn forcing_only_step() {
        let g = geom(1, 16.0, 128);
        let plan = HeatKernelPlan::new(g).unwrap();
        let spec = ProblemSpec::parameters(1, 2.0, 2.0, 0.0, 0.0);
        let w = GridField::sample(&ProfileSpec::centered(1.0, 1.0, 1), g).unwrap();
        let z = GridField::zeros(g).unwrap();
        let dt = 0.01;
        let a = step(&spec, &z, &w, 0.0, dt, &plan).unwrap();
        let b = plan.apply(&w, dt / 2.0).unwrap().scaled(dt).unwrap();
        assert!(a.sub(&b).unwrap().sup_norm() < 1e-15);
    }

    #[test]
    fn constant_state_is_an_euler_step() {
        let g = geom(1, 4.0, 16);
        let plan = HeatKernelPlan::new(g).unwrap();
        let spec = ProblemSpec::parameters(1, 2.0, 2.0, 0.0, 0.0);
        let u = GridField::constant(g, 0.5).unwrap();
        let z = GridField::zeros(g).unwrap();
        let dt = 0.01;
        let next = step(&spec, &u, &z, 0.0, dt, &plan).unwrap();
        let exact = 1.0 / (1.0 / 0.5 - dt);
        for v in next.values() {
            assert!((v - (0.5 + dt * 0.25)).abs() < 1e-14);
            assert!((v - exact).abs() < dt * dt);
        }
    }

    #[test]
    fn zero_problem_completes_at_zero() {
        let spec = ProblemSpec::parameters(1, 2.0, 2.0, 1.0, 0.0);
        let rec = run(&spec, &SolverConfig::new(0.01, 1.0), geom(1, 8.0, 32)).unwrap();
        assert_eq!(rec.verdict, Verdict::Completed);
        assert!(rec.sup_norms.iter().all(|&s| s == 0.0));
        assert_eq!(rec.final_time(), 1.0);
        assert!(rec.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn config_json_defaults() {
        let c: SolverConfig = serde_json::from_str(r#"{"dt0":0.01,"t_end":5}"#).unwrap();
        assert_eq!(c, SolverConfig::new(0.01, 5.0));
        assert!(serde_json::from_str::<SolverConfig>(r#"{"dt0":0.01}"#).is_err());
        assert!(SolverConfig::new(0.0, 1.0).check().is_err());
    }

    #[test]
    fn csv_columns() {
        let spec = ProblemSpec::parameters(1, 2.0, 2.0, 1.0, 0.0)
            .with_profiles(ProfileSpec::centered(0.1, 1.0, 1), ProfileSpec::zero());
        let rec = run(&spec, &SolverConfig::new(0.05, 0.2), geom(1, 8.0, 32)).unwrap();
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("t,q_norm,sup_norm,dt\n0,"));
        assert_eq!(s.lines().count(), rec.times.len() + 1);
    }
}
