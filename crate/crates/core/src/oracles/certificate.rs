//! Growth rates in `T` of the two sides of the test-function estimate.
//!
//! With `p′ = p/(p−1)`, `ψ_T(x,t) = ψ₁((t−1)/T)^{p′} ψ₂(|x|²/T)^{2p′}`:
//!
//! * `𝕀₁(T) = ∫∫ t^γ ψ₁^{p′} B^{−1/(p−1)} |ΔB|^{p′} dx dt` with
//!   `B = ψ₂(|x|²/T)^{2p′}` and `γ = Nδ/(2(p−1))`; it should grow no faster
//!   than `T^{1 + N/2 − p′ + γ}`.
//! * `F(T) = ∫₁ᵀ t^ϱ ψ₁((t−1)/T)^{p′} dt · ∫ ψ₂(|x|²/T)^{2p′} w dx`; it
//!   should grow like `T^{ϱ+1}` when `∫w > 0`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::cutoff::{laplacian_bracket, value, CutoffKind};
use crate::error::{domain, Error, Result};
use crate::exponents::{certificate_exponent, delta};
use crate::problem::ProfileSpec;
use crate::quadrature::Composite;

/// Largest tensor grid for the forcing integral.
pub const MAX_TENSOR_NODES: usize = 20_000_000;

/// `T ∫ (1 + Tτ)^γ ψ₁(τ)^{p′} dτ` over the support `[1/4, 4/5]`.
pub fn time_factor(big_t: f64, gamma_exp: f64, p_prime: f64, degree: usize) -> f64 {
    let rule = Composite::new(degree, 4);
    let f = |tau: f64| (1.0 + big_t * tau).powf(gamma_exp) * value(CutoffKind::Psi1, tau).powf(p_prime);
    let pieces = [(0.25, 0.5), (0.5, 0.75), (0.75, 0.8)];
    big_t * pieces.iter().map(|&(a, b)| rule.integrate(a, b, f)).sum::<f64>()
}

fn ball_surface(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * std::f64::consts::PI.powf(n / 2.0) / gamma(n / 2.0)
}

/// `∫ B^{−1/(p−1)} |ΔB|^{p′} dx` in physical variables, by radial
/// quadrature over the transition shell `√T ≤ |x| ≤ √(2T)`. The powers of
/// `ψ₂` are combined in log space so the vanishing edge is harmless.
pub fn spatial_factor_i1(big_t: f64, dim: usize, p: f64, degree: usize) -> f64 {
    let p_prime = p / (p - 1.0);
    let theta = 2.0 * p_prime;
    let rule = Composite::new(degree, 8);
    let integrand = |r: f64| {
        let y = r * r / big_t;
        let g = value(CutoffKind::Psi2, y);
        let bracket = laplacian_bracket(CutoffKind::Psi2, theta, dim, y);
        if g <= 0.0 || bracket == 0.0 {
            return 0.0;
        }
        let ln_g = g.ln();
        let ln_b = theta * ln_g;
        let ln_lap = bracket.abs().ln() + (theta - 2.0) * ln_g - big_t.ln();
        let ln_f = -ln_b / (p - 1.0) + p_prime * ln_lap;
        r.powi(dim as i32 - 1) * ln_f.exp()
    };
    ball_surface(dim) * rule.integrate(big_t.sqrt(), (2.0 * big_t).sqrt(), integrand)
}

/// `∫ ψ₂(|x|²/T)^{2p′} w(x) dx` by tensor Gauss–Legendre on a box that
/// covers both the cut-off and the bulk of `w`.
pub fn spatial_factor_f(big_t: f64, w: &ProfileSpec, dim: usize, p: f64, degree: usize) -> Result<f64> {
    if w.is_zero() {
        return Ok(0.0);
    }
    let exponent = 2.0 * p / (p - 1.0);
    let reach = w
        .terms
        .iter()
        .map(|t| t.center.iter().fold(0.0f64, |m, c| m.max(c.abs())) + (40.0 / t.rate).sqrt())
        .fold(0.0, f64::max);
    let half = reach.min((2.0 * big_t).sqrt());
    let panels = 8;
    let nodes = Composite::new(degree, panels).nodes(-half, half);
    let count = nodes.len().pow(dim as u32);
    if count > MAX_TENSOR_NODES {
        return Err(Error::Resource(format!("tensor quadrature needs {count} nodes")));
    }
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    let mut total = 0.0;
    for _ in 0..count {
        let mut weight = 1.0;
        let mut r2 = 0.0;
        for a in 0..dim {
            let (xa, wa) = nodes[idx[a]];
            x[a] = xa;
            weight *= wa;
            r2 += xa * xa;
        }
        let cut = value(CutoffKind::Psi2, r2 / big_t);
        if cut > 0.0 {
            total += weight * cut.powf(exponent) * w.evaluate(&x);
        }
        for a in (0..dim).rev() {
            idx[a] += 1;
            if idx[a] < nodes.len() {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok(total)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Tolerance on fitted slopes.
pub const SLOPE_TOL: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub rho: f64,
    pub t_list: Vec<f64>,
    pub i1: Vec<f64>,
    pub f: Vec<f64>,
    pub slope_i1: f64,
    pub expected_slope_i1: f64,
    /// `None` when `F ≡ 0` or `∫w ≤ 0`.
    pub slope_f: Option<f64>,
    pub expected_slope_f: f64,
    /// `θ` of the certificate exponent; a contradiction needs `θ < 0`.
    pub theta: f64,
    /// `slope_f − slope_i1`, to be compared with `−θ`.
    pub decisive_difference: Option<f64>,
    pub contradiction_achievable: bool,
    pub applicable: bool,
    pub within_i1: bool,
    pub within_f: bool,
    pub pass: bool,
}

/// Computes `𝕀₁(T)` and `F(T)` on `t_list` and fits log–log slopes.
/// `degree` is the Gauss–Legendre degree per panel. A negative `tol` makes
/// the check fail by construction.
#[allow(clippy::too_many_arguments)]
pub fn certificate_scaling_check(
    dim: usize,
    p: f64,
    q: f64,
    alpha: f64,
    rho: f64,
    w: &ProfileSpec,
    t_list: &[f64],
    degree: usize,
    tol: f64,
) -> Result<CertificateReport> {
    if !(p > 1.0) || !(rho > -1.0) {
        return Err(domain("certificate check needs p > 1 and rho > -1"));
    }
    if t_list.len() < 2 || t_list.iter().any(|&t| !(t > 5.0)) {
        return Err(domain("certificate check needs at least two scales T > 5"));
    }
    let d = delta(alpha, q)?;
    let n = dim as f64;
    let p_prime = p / (p - 1.0);
    let gamma_exp = n * d / (2.0 * (p - 1.0));
    let theta = certificate_exponent(dim, p, q, alpha, rho)?;
    let expected_slope_i1 = 1.0 + n / 2.0 - p_prime + gamma_exp;
    let expected_slope_f = rho + 1.0;
    let mut i1 = Vec::with_capacity(t_list.len());
    let mut f = Vec::with_capacity(t_list.len());
    for &t in t_list {
        i1.push(time_factor(t, gamma_exp, p_prime, degree) * spatial_factor_i1(t, dim, p, degree));
        f.push(time_factor(t, rho, p_prime, degree) * spatial_factor_f(t, w, dim, p, degree)?);
    }
    let slope_i1 = loglog_slope(t_list, &i1);
    let applicable = f.iter().all(|&v| v > 0.0);
    let slope_f = applicable.then(|| loglog_slope(t_list, &f));
    let within_i1 = (slope_i1 - expected_slope_i1).abs() <= tol;
    let within_f = slope_f.is_some_and(|s| (s - expected_slope_f).abs() <= tol);
    let pass = slope_i1 <= expected_slope_i1 + tol
        && tol >= 0.0
        && slope_f.is_none_or(|s| s >= expected_slope_f - tol);
    Ok(CertificateReport {
        dim,
        p,
        q,
        alpha,
        rho,
        t_list: t_list.to_vec(),
        i1,
        f,
        slope_i1,
        expected_slope_i1,
        slope_f,
        expected_slope_f,
        theta,
        decisive_difference: slope_f.map(|s| s - slope_i1),
        contradiction_achievable: theta < 0.0,
        applicable,
        within_i1,
        within_f,
        pass,
    })
}
