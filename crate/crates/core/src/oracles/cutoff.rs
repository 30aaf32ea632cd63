//! Smooth cut-off functions and the Laplacian of `g(|x|²/T)^θ`.

use serde::{Deserialize, Serialize};

use super::jet::Jet;
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    /// 1 on `[1/2, 3/4]`, 0 on `[0, 1/4] ∪ [4/5, ∞)`.
    Psi1,
    /// 1 on `[0, 1]`, 0 on `[2, ∞)`.
    Psi2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub kind: CutoffKind,
    /// Power `θ > 2`.
    pub theta: f64,
    /// Scale `T > 1`.
    pub big_t: f64,
}

impl CutoffSpec {
    pub fn new(kind: CutoffKind, theta: f64, big_t: f64) -> Result<Self> {
        if !(theta > 2.0) {
            return Err(domain(format!("cut-off power must exceed 2, got {theta}")));
        }
        if !(big_t > 1.0) {
            return Err(domain(format!("cut-off scale must exceed 1, got {big_t}")));
        }
        Ok(Self { kind, theta, big_t })
    }
}

/// `e^{−1/s}` for `s > 0`, else 0.
fn bump(s: Jet) -> Jet {
    if s.v <= 0.0 {
        Jet::constant(0.0)
    } else {
        (-s.recip()).exp()
    }
}

/// `B(s)/(B(s) + B(1−s))`: 0 for `s ≤ 0`, 1 for `s ≥ 1`, smooth in between.
pub fn smooth_step(s: Jet) -> Jet {
    if s.v <= 0.0 {
        return Jet::constant(0.0);
    }
    if s.v >= 1.0 {
        return Jet::constant(1.0);
    }
    let a = bump(s);
    let b = bump(Jet::constant(1.0) - s);
    a / (a + b)
}

/// The cut-off profile with its first two derivatives at `s`.
pub fn profile(kind: CutoffKind, s: Jet) -> Jet {
    match kind {
        CutoffKind::Psi1 => {
            if s.v <= 0.25 || s.v >= 0.8 {
                Jet::constant(0.0)
            } else if s.v < 0.5 {
                smooth_step((s - Jet::constant(0.25)) * 4.0)
            } else if s.v <= 0.75 {
                Jet::constant(1.0)
            } else {
                smooth_step((Jet::constant(0.8) - s) * 20.0)
            }
        }
        CutoffKind::Psi2 => smooth_step(Jet::constant(2.0) - s),
    }
}

pub fn value(kind: CutoffKind, s: f64) -> f64 {
    profile(kind, Jet::constant(s)).v
}

/// `y` beyond which the profile vanishes.
pub fn support_end(kind: CutoffKind) -> f64 {
    match kind {
        CutoffKind::Psi1 => 0.8,
        CutoffKind::Psi2 => 2.0,
    }
}

/// `2θN g′g + 4θy g″g + 4θ(θ−1)y g′²` at `y`, so that
/// `Δ g(|x|²/T)^θ = bracket · g^{θ−2} / T`.
pub fn laplacian_bracket(kind: CutoffKind, theta: f64, dim: usize, y: f64) -> f64 {
    let g = profile(kind, Jet::variable(y));
    let n = dim as f64;
    2.0 * theta * n * g.d1 * g.v + 4.0 * theta * y * g.d2 * g.v + 4.0 * theta * (theta - 1.0) * y * g.d1 * g.d1
}

/// `g_{T,θ}(x) = g(|x|²/T)^θ`.
pub fn g_t_theta(cut: &CutoffSpec, x: &[f64]) -> f64 {
    let y = x.iter().map(|c| c * c).sum::<f64>() / cut.big_t;
    let g = value(cut.kind, y);
    if g == 0.0 { 0.0 } else { g.powf(cut.theta) }
}

/// `Δ g_{T,θ}(x)` from the radial formula with analytic `g′, g″`.
pub fn laplacian_analytic(cut: &CutoffSpec, x: &[f64]) -> f64 {
    let y = x.iter().map(|c| c * c).sum::<f64>() / cut.big_t;
    let g = value(cut.kind, y);
    if g == 0.0 {
        return 0.0;
    }
    laplacian_bracket(cut.kind, cut.theta, x.len(), y) * g.powf(cut.theta - 2.0) / cut.big_t
}

/// Cartesian second differences `Σᵢ (G(x+heᵢ) − 2G(x) + G(x−heᵢ))/h²`.
pub fn laplacian_fd(cut: &CutoffSpec, x: &[f64], h: f64) -> f64 {
    let center = g_t_theta(cut, x);
    let mut p = x.to_vec();
    let mut total = 0.0;
    for i in 0..x.len() {
        p[i] = x[i] + h;
        let plus = g_t_theta(cut, &p);
        p[i] = x[i] - h;
        let minus = g_t_theta(cut, &p);
        p[i] = x[i];
        total += (plus - 2.0 * center + minus) / (h * h);
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    pub dim: usize,
    pub theta: f64,
    /// Relative sup error of the finite differences at steps `h` and `h/2`.
    pub fd_error_h: f64,
    pub fd_error_h2: f64,
    /// `fd_error_h / fd_error_h2`, ≈ 4 for a second-order match.
    pub richardson_ratio: f64,
    /// `sup T|Δg_{T,θ}|/g^{θ−2}` at the two scales.
    pub c_emp_small_t: f64,
    pub c_emp_large_t: f64,
    pub small_t: f64,
    pub large_t: f64,
    pub c_emp_ratio: f64,
    pub pass: bool,
}

/// Sample points: `count` radii spaced uniformly in `|x|/√T` along a few
/// fixed directions, so the same `y` values are probed at every `T`.
fn sample_points(dim: usize, big_t: f64, y_max: f64, count: usize) -> Vec<Vec<f64>> {
    let dirs: Vec<Vec<f64>> = match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => vec![vec![1.0, 0.0], vec![0.6, 0.8], vec![-0.8, 0.6]],
        _ => {
            let s = 1.0 / 3f64.sqrt();
            vec![vec![s; 3], vec![1.0, 0.0, 0.0], vec![0.48, 0.6, 0.64]]
        }
    };
    let r_max = (y_max * big_t).sqrt();
    let mut out = Vec::new();
    for d in &dirs {
        for k in 0..=count {
            let r = r_max * k as f64 / count as f64;
            out.push(d.iter().map(|c| c * r).collect());
        }
    }
    out
}

/// Largest `T|Δg_{T,θ}|/g^{θ−2}` over the sample points inside the support.
pub fn c_emp(cut: &CutoffSpec, dim: usize, count: usize) -> f64 {
    let y_max = support_end(cut.kind);
    sample_points(dim, cut.big_t, y_max, count)
        .iter()
        .filter_map(|x| {
            let y = x.iter().map(|c| c * c).sum::<f64>() / cut.big_t;
            let g = value(cut.kind, y);
            let denom = g.powf(cut.theta - 2.0);
            (g > 0.0 && denom > 1e-200).then(|| cut.big_t * laplacian_analytic(cut, x).abs() / denom)
        })
        .fold(0.0, f64::max)
}

/// Compares the radial formula with finite differences at `h` and `h/2`
/// (`h = h_rel·√T`) and measures the stability of `C_emp` between
/// `cut.big_t` and `large_t`. `tol` bounds the relative finite-difference
/// error at `h/2`, the deviation of the Richardson ratio from 4 (as a
/// fraction), and the deviation of the `C_emp` ratio from 1.
pub fn cutoff_laplacian_check(
    cut: &CutoffSpec,
    dim: usize,
    count: usize,
    h_rel: f64,
    large_t: f64,
    tol: CutoffTolerance,
) -> Result<CutoffReport> {
    if !(1..=3).contains(&dim) {
        return Err(domain("cut-off check supports dimensions 1 to 3"));
    }
    let large = CutoffSpec::new(cut.kind, cut.theta, large_t)?;
    let y_max = support_end(cut.kind);
    let pts = sample_points(dim, cut.big_t, y_max * 1.05, count);
    let h = h_rel * cut.big_t.sqrt();
    let mut scale: f64 = 0.0;
    let mut err_h: f64 = 0.0;
    let mut err_h2: f64 = 0.0;
    for x in &pts {
        let exact = laplacian_analytic(cut, x);
        scale = scale.max(exact.abs());
        err_h = err_h.max((laplacian_fd(cut, x, h) - exact).abs());
        err_h2 = err_h2.max((laplacian_fd(cut, x, 0.5 * h) - exact).abs());
    }
    let fd_error_h = err_h / scale;
    let fd_error_h2 = err_h2 / scale;
    let richardson_ratio = fd_error_h / fd_error_h2;
    let c_small = c_emp(cut, dim, count);
    let c_large = c_emp(&large, dim, count);
    let c_emp_ratio = c_small / c_large;
    let pass = fd_error_h2 <= tol.fd_rel
        && (richardson_ratio / 4.0 - 1.0).abs() <= tol.richardson
        && (c_emp_ratio - 1.0).abs() <= tol.c_emp;
    Ok(CutoffReport {
        dim,
        theta: cut.theta,
        fd_error_h,
        fd_error_h2,
        richardson_ratio,
        c_emp_small_t: c_small,
        c_emp_large_t: c_large,
        small_t: cut.big_t,
        large_t,
        c_emp_ratio,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffTolerance {
    pub fd_rel: f64,
    pub richardson: f64,
    pub c_emp: f64,
}

impl Default for CutoffTolerance {
    fn default() -> Self {
        Self { fd_rel: 1e-3, richardson: 0.25, c_emp: 0.05 }
    }
}
