//! The heat semigroup `S(t) = e^{tΔ}` on grid fields.
//!
//! [`HeatKernelPlan::apply`] uses the periodic spectral multiplier
//! `e^{−t|k|²}`; [`apply_direct`] convolves with the free-space kernel
//! `(4πt)^{−N/2} e^{−|x|²/4t}` and serves as its oracle.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{require_geometry, GridField, GridGeometry};
use crate::oracles::wcond;
use crate::problem::ProblemSpec;
use crate::solver::TrajectoryRecord;

pub type Spectrum = Vec<Complex<f64>>;

/// Cached FFT plans and `|k|²` table for one grid geometry.
#[derive(Clone)]
pub struct HeatKernelPlan {
    geometry: GridGeometry,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k2: Vec<f64>,
    frozen: bool,
}

impl std::fmt::Debug for HeatKernelPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HeatKernelPlan")
            .field("geometry", &self.geometry)
            .field("frozen", &self.frozen)
            .finish()
    }
}

impl HeatKernelPlan {
    pub fn new(geometry: GridGeometry) -> Result<Self> {
        geometry.check()?;
        let m = geometry.points_per_axis;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let axis_k2: Vec<f64> = (0..m)
            .map(|j| {
                let js = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
                let k = std::f64::consts::PI * js / geometry.half_width;
                k * k
            })
            .collect();
        let mut k2 = vec![0.0; geometry.len()];
        for (i, v) in k2.iter_mut().enumerate() {
            let mut rest = i;
            let mut s = 0.0;
            for _ in 0..geometry.dim {
                s += axis_k2[rest % m];
                rest /= m;
            }
            *v = s;
        }
        Ok(Self { geometry, forward, inverse, k2, frozen: false })
    }

    /// A plan whose semigroup is the identity. Test mode for isolating the
    /// load terms of the time stepper.
    pub fn frozen(geometry: GridGeometry) -> Result<Self> {
        let mut plan = Self::new(geometry)?;
        plan.frozen = true;
        Ok(plan)
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    /// `|k|²` at each spectral index, in the same row-major order as the data.
    pub fn k2(&self) -> &[f64] {
        &self.k2
    }

    /// `e^{−t|k|²}` at one spectral index (1 for a frozen plan).
    pub fn multiplier(&self, index: usize, t: f64) -> f64 {
        if self.frozen || t == 0.0 {
            1.0
        } else {
            (-t * self.k2[index]).exp()
        }
    }

    pub fn forward(&self, f: &GridField) -> Result<Spectrum> {
        require_geometry(&self.geometry, f.geometry())?;
        let mut buf: Spectrum = f.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        Ok(buf)
    }

    /// Inverse transform, keeping the real part.
    pub fn inverse(&self, mut s: Spectrum) -> Result<GridField> {
        self.transform(&mut s, &self.inverse);
        let scale = 1.0 / self.geometry.len() as f64;
        GridField::from_values(self.geometry, s.into_iter().map(|c| c.re * scale).collect())
    }

    /// Multiplies a spectrum by `e^{−t|k|²}` in place.
    pub fn propagate(&self, s: &mut [Complex<f64>], t: f64) {
        if self.frozen || t == 0.0 {
            return;
        }
        for (c, k2) in s.iter_mut().zip(&self.k2) {
            *c *= (-t * k2).exp();
        }
    }

    /// `S(t)f`; `t = 0` returns `f` unchanged.
    pub fn apply(&self, f: &GridField, t: f64) -> Result<GridField> {
        require_geometry(&self.geometry, f.geometry())?;
        if !(t >= 0.0) || !t.is_finite() {
            return Err(invalid(format!("semigroup time must be finite and ≥ 0, got {t}")));
        }
        if t == 0.0 || self.frozen {
            return Ok(f.clone());
        }
        let mut s = self.forward(f)?;
        self.propagate(&mut s, t);
        self.inverse(s)
    }

    fn transform(&self, buf: &mut [Complex<f64>], fft: &Arc<dyn Fft<f64>>) {
        let m = self.geometry.points_per_axis;
        let dim = self.geometry.dim;
        let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // Last axis is contiguous.
        for row in buf.chunks_exact_mut(m) {
            fft.process_with_scratch(row, &mut scratch);
        }
        let mut line = vec![Complex::new(0.0, 0.0); m];
        for axis in 0..dim - 1 {
            let stride = m.pow((dim - 1 - axis) as u32);
            let block = stride * m;
            for base in (0..buf.len()).step_by(block) {
                for offset in 0..stride {
                    let start = base + offset;
                    for (j, c) in line.iter_mut().enumerate() {
                        *c = buf[start + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, c) in line.iter().enumerate() {
                        buf[start + j * stride] = *c;
                    }
                }
            }
        }
    }
}

/// Largest grid side allowed for [`apply_direct`] in three dimensions.
pub const DIRECT_MAX_M_3D: usize = 32;

/// `∫_{box} G(x−y, t) f(y) dy` by the rectangle rule with the free-space
/// kernel (no periodic images).
pub fn apply_direct(f: &GridField, t: f64) -> Result<GridField> {
    let g = *f.geometry();
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("apply_direct needs finite t > 0, got {t}")));
    }
    if g.dim == 3 && g.points_per_axis > DIRECT_MAX_M_3D {
        return Err(Error::Resource(format!(
            "direct convolution in 3D is limited to M ≤ {DIRECT_MAX_M_3D}, got {}",
            g.points_per_axis
        )));
    }
    let m = g.points_per_axis;
    let h = g.spacing();
    let norm = h / (4.0 * std::f64::consts::PI * t).sqrt();
    let kernel: Vec<f64> = (0..m)
        .flat_map(|i| {
            (0..m).map(move |j| {
                let d = (i as f64 - j as f64) * h;
                norm * (-d * d / (4.0 * t)).exp()
            })
        })
        .collect();
    let mut data = f.values().to_vec();
    let mut line = vec![0.0; m];
    for axis in 0..g.dim {
        let stride = m.pow((g.dim - 1 - axis) as u32);
        let block = stride * m;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (i, out) in line.iter_mut().enumerate() {
                    let row = &kernel[i * m..(i + 1) * m];
                    *out = row.iter().enumerate().map(|(j, k)| k * data[start + j * stride]).sum();
                }
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
    }
    GridField::from_values(g, data)
}

/// Relative tolerance for the inequality checks, before adding truncation.
pub const DEFAULT_TOL: f64 = 1e-8;

/// One evaluated inequality `lhs ≤ rhs` (or `≥` for lower bounds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Signed slack in the direction of the inequality.
    pub margin: f64,
    pub pass: bool,
}

/// `‖S(t)f‖_b ≤ t^{−(N/2)(1/a−1/b)}‖f‖_a` for each `t`.
pub fn smoothing_check(
    plan: &HeatKernelPlan,
    f: &GridField,
    a: f64,
    b: f64,
    t_list: &[f64],
    truncation: f64,
) -> Result<Vec<InequalityCheck>> {
    if !(1.0 <= a && a <= b) {
        return Err(invalid(format!("smoothing check needs 1 ≤ a ≤ b, got a={a}, b={b}")));
    }
    let n = f.dim() as f64;
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let exponent = -(n / 2.0) * (inv(a) - inv(b));
    let fa = f.lq_norm(a);
    t_list
        .iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(invalid(format!("smoothing check needs t > 0, got {t}")));
            }
            let lhs = plan.apply(f, t)?.lq_norm(b);
            let rhs = t.powf(exponent) * fa;
            let margin = rhs - lhs;
            let pass = lhs <= rhs * (1.0 + DEFAULT_TOL + truncation);
            Ok(InequalityCheck { t, lhs, rhs, margin, pass })
        })
        .collect()
}

/// `𝙲₀ = (4π)^{−N/2} ∫ e^{−|y|²/2} u₀(y) dy`, in closed form.
pub fn comparison_constant(spec: &ProblemSpec) -> f64 {
    let n = spec.dim as f64;
    (4.0 * std::f64::consts::PI).powf(-n / 2.0) * spec.u0.gaussian_weighted_integral(0.5, spec.dim)
}

/// The same constant by quadrature of a sampled `u₀`.
pub fn comparison_constant_grid(u0: &GridField) -> Result<f64> {
    let g = *u0.geometry();
    let mut x = [0.0; 3];
    let mut weighted = Vec::with_capacity(g.len());
    for (i, v) in u0.values().iter().enumerate() {
        g.point(i, &mut x);
        let r2: f64 = x[..g.dim].iter().map(|c| c * c).sum();
        weighted.push((-r2 / 2.0).exp() * v);
    }
    let integral = crate::field::pairwise_sum(&weighted) * g.cell_volume();
    Ok((4.0 * std::f64::consts::PI).powf(-(g.dim as f64) / 2.0) * integral)
}

/// Relative tolerance of the lower-bound check, before truncation.
pub const COMPARISON_TOL: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub c0: f64,
    /// `π^{N/2q} q^{−N/2q} 𝙲₀`.
    pub constant: f64,
    pub q: f64,
    /// Set when a precondition fails; `checks` is then empty.
    pub skipped: Option<String>,
    pub checks: Vec<InequalityCheck>,
    /// The bound is derived for global solutions; only a finite horizon is checked.
    pub horizon: f64,
}

impl ComparisonReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Checks `‖u(t)‖_q ≥ C t^{−(N/2)(1−1/q)}` at every recorded `t ≥ 1`.
///
/// `traj` must have been produced from `spec` with `q_norms` in the same `q`.
pub fn comparison_lower_bound(
    spec: &ProblemSpec,
    traj: &TrajectoryRecord,
    q: f64,
) -> Result<ComparisonReport> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(invalid(format!("comparison bound needs finite q ≥ 1, got {q}")));
    }
    let n = spec.dim as f64;
    let c0 = comparison_constant(spec);
    let constant = std::f64::consts::PI.powf(n / (2.0 * q)) * q.powf(-n / (2.0 * q)) * c0;
    let horizon = traj.times.last().copied().unwrap_or(0.0);
    let mut report =
        ComparisonReport { c0, constant, q, skipped: None, checks: Vec::new(), horizon };
    if !spec.u0.has_nonnegative_coefficients() {
        report.skipped = Some("u0 is not certified nonnegative".into());
        return Ok(report);
    }
    if !spec.w.is_zero() && !wcond::w_condition_check_default(&spec.w, spec.dim).holds_ass_w {
        report.skipped = Some("w fails the grid certificate of the positivity condition".into());
        return Ok(report);
    }
    let tol = COMPARISON_TOL + traj.metadata.truncation_bound;
    for (&t, &norm) in traj.times.iter().zip(&traj.q_norms) {
        if t < 1.0 {
            continue;
        }
        let rhs = constant * t.powf(-(n / 2.0) * (1.0 - 1.0 / q));
        report.checks.push(InequalityCheck {
            t,
            lhs: norm,
            rhs,
            margin: norm - rhs,
            pass: norm >= rhs * (1.0 - tol),
        });
    }
    Ok(report)
}
