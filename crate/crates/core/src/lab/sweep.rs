//! Parameter sweeps: predicted regime against observed solver verdict.

use std::collections::BTreeSet;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{unix_time, write_json};
use crate::error::{invalid, Error, Result};
use crate::exponents::{classify, gep_exponents, Regime};
use crate::field::{GridField, GridGeometry};
use crate::problem::{ProblemSpec, ProfileSpec};
use crate::solver::{run, SolverConfig, Verdict};

pub const CSV_FILE: &str = "phase_diagram.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const METADATA_FILE: &str = "metadata.json";
pub const GNUPLOT_FILE: &str = "phase_diagram.dat";

/// Target norm after rescaling, as a fraction of `ε`.
const SMALL_DATA_MARGIN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    P,
    Q,
    Alpha,
    Rho,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::P => "p",
            Self::Q => "q",
            Self::Alpha => "alpha",
            Self::Rho => "rho",
        }
    }

    fn set(self, spec: &mut ProblemSpec, v: f64) {
        match self {
            Self::P => spec.p = v,
            Self::Q => spec.q = v,
            Self::Alpha => spec.alpha = v,
            Self::Rho => spec.rho = v,
        }
    }

    fn admits(self, v: f64) -> bool {
        match self {
            Self::P => v > 1.0,
            Self::Q => v >= 1.0,
            Self::Alpha => v >= 0.0,
            Self::Rho => v > -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    /// Evenly spaced, with both endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

fn default_jobs() -> usize {
    1
}
fn default_eps() -> f64 {
    1e-2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub base: ProblemSpec,
    pub axes: Vec<Axis>,
    pub solver: SolverConfig,
    /// Defaults to `GridGeometry::default_for(base.dim)`.
    #[serde(default)]
    pub geometry: Option<GridGeometry>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Norm bound imposed on `u₀` in `L^{p_c}` and on `w` in `L^ℓ` at points
    /// predicted to admit small-data global solutions.
    #[serde(default = "default_eps")]
    pub small_data_eps: f64,
}

impl SweepPlan {
    pub fn check(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(invalid("sweep plan has no axes"));
        }
        if self.axes.len() > 2 {
            return Err(invalid(format!("sweep plan has {} axes; at most 2 are supported", self.axes.len())));
        }
        let distinct: BTreeSet<_> = self.axes.iter().map(|a| a.param).collect();
        if distinct.len() != self.axes.len() {
            return Err(invalid("sweep axes must name distinct parameters"));
        }
        for a in &self.axes {
            let name = a.param.as_str();
            if a.count < 2 {
                return Err(invalid(format!("axis {name}: count must be ≥ 2")));
            }
            if !(a.min.is_finite() && a.max.is_finite() && a.min < a.max) {
                return Err(invalid(format!("axis {name}: need finite min < max")));
            }
            if !a.param.admits(a.min) || !a.param.admits(a.max) {
                return Err(invalid(format!("axis {name}: range [{}, {}] leaves the parameter domain", a.min, a.max)));
            }
        }
        if self.jobs == 0 {
            return Err(invalid("jobs must be ≥ 1"));
        }
        if !(self.small_data_eps > 0.0 && self.small_data_eps.is_finite()) {
            return Err(invalid("small_data_eps must be finite and > 0"));
        }
        self.base.check()?;
        self.solver.check()?;
        let g = self.geometry()?;
        if g.dim != self.base.dim {
            return Err(invalid(format!("geometry dimension {} differs from problem dimension {}", g.dim, self.base.dim)));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<GridGeometry> {
        match self.geometry {
            Some(g) => {
                g.check()?;
                Ok(g)
            }
            None => GridGeometry::default_for(self.base.dim),
        }
    }

    /// Grid points in lexicographic order, first axis slowest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new()];
        for axis in &self.axes {
            let vals = axis.values();
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    vals.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    pub fn spec_at(&self, point: &[f64]) -> ProblemSpec {
        let mut spec = self.base.clone();
        for (axis, &v) in self.axes.iter().zip(point) {
            axis.param.set(&mut spec, v);
        }
        spec
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observed {
    Completed,
    BlowupDetected,
    StepUnderflow,
    Error,
}

impl Observed {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Completed => "completed",
            Self::BlowupDetected => "blowup_detected",
            Self::StepUnderflow => "step_underflow",
            Self::Error => "error",
        }
    }
}

impl From<Verdict> for Observed {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Completed => Self::Completed,
            Verdict::BlowupDetected => Self::BlowupDetected,
            Verdict::StepUnderflow => Self::StepUnderflow,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Agree,
    Disagree,
    NotApplicable,
}

impl Agreement {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Agree => "agree",
            Self::Disagree => "disagree",
            Self::NotApplicable => "not_applicable",
        }
    }
}

/// Scored only where a definite outcome is predicted: blow-up, or global
/// existence for data made small.
pub fn agreement(predicted: Regime, small_data: bool, observed: Observed) -> Agreement {
    let expect = match predicted {
        Regime::Blowup => Observed::BlowupDetected,
        Regime::GlobalSmallData if small_data => Observed::Completed,
        _ => return Agreement::NotApplicable,
    };
    if observed == expect {
        Agreement::Agree
    } else {
        Agreement::Disagree
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub point: Vec<f64>,
    pub predicted: Regime,
    /// Data were rescaled to the small-data bound before the run.
    pub small_data: bool,
    pub observed: Observed,
    pub blowup_time: Option<f64>,
    pub agreement: Agreement,
    pub error: Option<String>,
}

/// `(∫|f|^r)^{1/r}`, also for `0 < r < 1`.
fn lebesgue_norm(f: &GridField, r: f64) -> f64 {
    if r >= 1.0 {
        return f.lq_norm(r);
    }
    let m = f.sup_norm();
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = f.values().iter().map(|v| (v.abs() / m).powf(r)).sum();
    m * (s * f.geometry().cell_volume()).powf(1.0 / r)
}

fn shrink(prof: &ProfileSpec, geometry: GridGeometry, r: f64, eps: f64) -> Result<ProfileSpec> {
    if prof.is_zero() {
        return Ok(prof.clone());
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("small-data rescaling needs a positive finite exponent, got {r}")));
    }
    let norm = lebesgue_norm(&GridField::sample(prof, geometry)?, r);
    if norm < eps {
        return Ok(prof.clone());
    }
    Ok(prof.scaled(SMALL_DATA_MARGIN * eps / norm))
}

/// Scales `u₀` below `ε` in `L^{p_c}` and `w` below `ε` in `L^ℓ`.
pub fn small_data(spec: &ProblemSpec, geometry: GridGeometry, eps: f64) -> Result<ProblemSpec> {
    let g = gep_exponents(spec.dim, spec.p, spec.q, spec.alpha, spec.rho)?;
    let mut out = spec.clone();
    out.u0 = shrink(&spec.u0, geometry, g.p_c, eps)?;
    out.w = shrink(&spec.w, geometry, g.ell, eps)?;
    Ok(out)
}

pub fn evaluate_point(plan: &SweepPlan, geometry: GridGeometry, point: &[f64]) -> SweepRecord {
    let spec = plan.spec_at(point);
    let predicted = classify(&spec);
    let small = predicted == Regime::GlobalSmallData;
    let outcome = if small { small_data(&spec, geometry, plan.small_data_eps) } else { Ok(spec) }
        .and_then(|s| run(&s, &plan.solver, geometry));
    let (observed, blowup_time, error) = match outcome {
        Ok(r) => (Observed::from(r.verdict), r.blowup_time_estimate, None),
        Err(e) => (Observed::Error, None, Some(e.to_string())),
    };
    SweepRecord {
        point: point.to_vec(),
        predicted,
        small_data: small,
        observed,
        blowup_time,
        agreement: agreement(predicted, small, observed),
        error,
    }
}

/// Evaluates every grid point on a pool of `jobs` threads. Rows come back in
/// lexicographic order whatever the pool size.
pub fn sweep_records(plan: &SweepPlan, jobs: usize) -> Result<Vec<SweepRecord>> {
    plan.check()?;
    if jobs == 0 {
        return Err(invalid("jobs must be ≥ 1"));
    }
    let geometry = plan.geometry()?;
    let points = plan.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| points.par_iter().map(|pt| evaluate_point(plan, geometry, pt)).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointError {
    pub point: Vec<f64>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub axes: Vec<Axis>,
    pub points: usize,
    /// Points with a definite prediction.
    pub scored: usize,
    pub agreed: usize,
    /// `agreed / scored`; absent when nothing is scored.
    pub agreement_rate: Option<f64>,
    pub errors: Vec<PointError>,
}

pub fn summarize(plan: &SweepPlan, records: &[SweepRecord]) -> SweepSummary {
    let scored = records.iter().filter(|r| r.agreement != Agreement::NotApplicable).count();
    let agreed = records.iter().filter(|r| r.agreement == Agreement::Agree).count();
    SweepSummary {
        axes: plan.axes.clone(),
        points: records.len(),
        scored,
        agreed,
        agreement_rate: (scored > 0).then(|| agreed as f64 / scored as f64),
        errors: records
            .iter()
            .filter_map(|r| r.error.as_ref().map(|m| PointError { point: r.point.clone(), message: m.clone() }))
            .collect(),
    }
}

/// Columns: axis values, `predicted`, `observed`, `blowup_time`, `agreement`.
pub fn write_csv(plan: &SweepPlan, records: &[SweepRecord], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = plan.axes.iter().map(|a| a.param.as_str()).collect();
    header.extend(["predicted", "observed", "blowup_time", "agreement"]);
    out.write_record(&header)?;
    for r in records {
        let mut row: Vec<String> = r.point.iter().map(f64::to_string).collect();
        row.push(r.predicted.as_str().into());
        row.push(r.observed.as_str().into());
        row.push(r.blowup_time.map(|t| t.to_string()).unwrap_or_default());
        row.push(r.agreement.as_str().into());
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub started_unix: f64,
    pub finished_unix: f64,
    pub jobs: usize,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub summary: SweepSummary,
    pub out_dir: PathBuf,
}

/// Runs the sweep and writes the CSV, the summary, and a metadata file with
/// the only non-reproducible fields.
pub fn run_sweep(plan: &SweepPlan, out_dir: &Path, jobs: usize) -> Result<SweepOutcome> {
    let started = unix_time();
    let records = sweep_records(plan, jobs)?;
    let summary = summarize(plan, &records);
    fs::create_dir_all(out_dir)?;
    write_csv(plan, &records, fs::File::create(out_dir.join(CSV_FILE))?)?;
    write_json(&out_dir.join(SUMMARY_FILE), &summary)?;
    let meta = SweepMetadata {
        started_unix: started,
        finished_unix: unix_time(),
        jobs,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    write_json(&out_dir.join(METADATA_FILE), &meta)?;
    Ok(SweepOutcome { records, summary, out_dir: out_dir.to_path_buf() })
}

fn regime_code(s: &str) -> Option<u8> {
    ["blowup", "global_small_data", "gap", "inadmissible"].iter().position(|&r| r == s).map(|i| i as u8)
}

fn observed_code(s: &str) -> Option<u8> {
    ["completed", "blowup_detected", "step_underflow", "error"].iter().position(|&r| r == s).map(|i| i as u8)
}

/// Converts a phase-diagram CSV into whitespace-separated columns with
/// numeric regime and verdict codes. Two-axis sweeps get a blank line
/// whenever the first axis advances, as `splot` expects.
pub fn csv_to_gnuplot(r: impl Read) -> Result<String> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let n_axes = header
        .iter()
        .position(|h| h == "predicted")
        .ok_or_else(|| invalid("CSV has no `predicted` column"))?;
    if n_axes == 0 || n_axes > 2 || header.len() != n_axes + 4 {
        return Err(invalid("CSV does not have the phase-diagram layout"));
    }
    let axes: Vec<&str> = header.iter().take(n_axes).collect();
    let mut out = format!(
        "# {} predicted observed blowup_time\n\
         # predicted: 0 blowup, 1 global_small_data, 2 gap, 3 inadmissible\n\
         # observed: 0 completed, 1 blowup_detected, 2 step_underflow, 3 error\n",
        axes.join(" ")
    );
    let mut prev: Option<String> = None;
    for row in rdr.records() {
        let row = row?;
        if n_axes == 2 {
            let lead = row[0].to_string();
            if prev.as_ref().is_some_and(|p| *p != lead) {
                out.push('\n');
            }
            prev = Some(lead);
        }
        let pred = regime_code(&row[n_axes]).ok_or_else(|| invalid(format!("unknown regime {:?}", &row[n_axes])))?;
        let obs = observed_code(&row[n_axes + 1])
            .ok_or_else(|| invalid(format!("unknown verdict {:?}", &row[n_axes + 1])))?;
        let bt = if row[n_axes + 2].is_empty() { "NaN" } else { &row[n_axes + 2] };
        for v in row.iter().take(n_axes) {
            out.push_str(v);
            out.push(' ');
        }
        out.push_str(&format!("{pred} {obs} {bt}\n"));
    }
    Ok(out)
}
