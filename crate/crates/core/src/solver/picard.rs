//! Picard iteration of the Duhamel map on a uniform inner time grid.

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{forcing_weight, run_fields, SolverConfig};
use crate::error::{invalid, Error, Result};
use crate::field::{GridField, GridGeometry};
use crate::problem::ProblemSpec;
use crate::semigroup::{HeatKernelPlan, Spectrum};

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    /// `u(T)`.
    pub state: GridField,
    pub iterations: usize,
    /// Largest successive-difference quotient `dₖ/dₖ₋₁` seen.
    pub contraction_estimate: f64,
    /// `dₖ = maxⱼ ‖uₖ(tⱼ) − uₖ₋₁(tⱼ)‖_q` per iteration.
    pub differences: Vec<f64>,
}

/// Iterates
/// `Φ(u)(t) = S(t)u₀ + ∫₀ᵗ S(t−τ)‖u‖_q^α|u|^p dτ + ∫₀ᵗ τ^ϱ S(t−τ)w dτ`
/// on `tⱼ = jT/n`. The load is frozen at the left endpoint of each
/// subinterval and the semigroup integrated exactly against it; the forcing
/// uses the same `τ^ϱ` weights as the time stepper.
pub fn picard_solve(
    spec: &ProblemSpec,
    u0: &GridField,
    w: &GridField,
    t_final: f64,
    config: &SolverConfig,
    plan: &HeatKernelPlan,
) -> Result<PicardOutcome> {
    if !spec.validate().lwp_ok {
        return Err(invalid("Picard iteration needs a locally well-posed parameter set"));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(invalid(format!("Picard horizon must be finite and > 0, got {t_final}")));
    }
    if config.picard_nodes == 0 || !(config.picard_tol > 0.0) {
        return Err(invalid("Picard needs picard_nodes ≥ 1 and picard_tol > 0"));
    }
    u0.require_same_geometry(w)?;
    let n = config.picard_nodes;
    let dt = t_final / n as f64;
    let len = plan.geometry().len();

    // E = e^{−dt|k|²}, G = ∫₀^dt e^{−s|k|²} ds.
    let e: Vec<f64> = (0..len).map(|i| plan.multiplier(i, dt)).collect();
    let g: Vec<f64> = plan
        .k2()
        .iter()
        .map(|&k2| if plan.is_frozen() || k2 == 0.0 { dt } else { -(-dt * k2).exp_m1() / k2 })
        .collect();

    // Linear part on the grid: S(tⱼ)u₀ plus the forcing sum.
    let w_hat = if w.is_zero() { None } else { Some(plan.forward(w)?) };
    let mut linear: Vec<Spectrum> = Vec::with_capacity(n + 1);
    linear.push(plan.forward(u0)?);
    for j in 0..n {
        let t_j = j as f64 * dt;
        let mut next: Spectrum = linear[j].iter().zip(&e).map(|(c, m)| c * m).collect();
        if let Some(wh) = &w_hat {
            let (weight, lag) = forcing_weight(t_j, dt, spec.rho)?;
            for (i, c) in next.iter_mut().enumerate() {
                *c += wh[i] * (weight * plan.multiplier(i, lag));
            }
        }
        linear.push(next);
    }
    let linear_fields: Vec<GridField> =
        linear.iter().map(|s| plan.inverse(s.clone())).collect::<Result<_>>()?;

    let mut current = linear_fields.clone();
    let mut differences = Vec::new();
    let mut contraction_estimate: f64 = 0.0;
    let mut streak = 0;
    for iteration in 1..=config.picard_max_iters {
        let next = if config.nonlinearity {
            apply_map(spec, plan, &linear, &current, &e, &g)?
        } else {
            linear_fields.clone()
        };
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (a, b) in next.iter().zip(&current) {
            diff = diff.max(a.sub(b)?.lq_norm(spec.q));
            scale = scale.max(a.lq_norm(spec.q));
        }
        if let Some(&prev) = differences.last() {
            if prev > 0.0 {
                let ratio = diff / prev;
                contraction_estimate = contraction_estimate.max(ratio);
                if ratio >= 1.0 {
                    streak += 1;
                    if streak >= 3 {
                        return Err(Error::NonContraction { ratio, streak });
                    }
                } else {
                    streak = 0;
                }
            }
        }
        differences.push(diff);
        current = next;
        if diff <= config.picard_tol * scale || diff == 0.0 {
            let state = current.pop().expect("grid has n + 1 nodes");
            return Ok(PicardOutcome { state, iterations: iteration, contraction_estimate, differences });
        }
    }
    Err(Error::IterationCap(config.picard_max_iters))
}

fn apply_map(
    spec: &ProblemSpec,
    plan: &HeatKernelPlan,
    linear: &[Spectrum],
    current: &[GridField],
    e: &[f64],
    g: &[f64],
) -> Result<Vec<GridField>> {
    let len = e.len();
    let mut acc: Spectrum = vec![Complex::new(0.0, 0.0); len];
    let mut out = Vec::with_capacity(linear.len());
    out.push(plan.inverse(linear[0].clone())?);
    for j in 1..linear.len() {
        let load = current[j - 1].nonlinearity(spec.p, spec.q, spec.alpha)?;
        let load_hat = plan.forward(&load)?;
        for i in 0..len {
            acc[i] = acc[i] * e[i] + load_hat[i] * g[i];
        }
        let total: Spectrum = linear[j].iter().zip(&acc).map(|(a, b)| a + b).collect();
        out.push(plan.inverse(total)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniquenessLevel {
    /// Picard subintervals, equal to the number of fixed steps of the stepper.
    pub time_nodes: usize,
    pub points_per_axis: usize,
    /// `‖u_Picard(T) − u_step(T)‖_q / ‖u_step(T)‖_q`.
    pub discrepancy: f64,
    pub picard_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub t_final: f64,
    pub levels: Vec<UniquenessLevel>,
    /// `dₖ/dₖ₊₁` for consecutive levels.
    pub ratios: Vec<f64>,
    pub pass: bool,
}

/// Discrepancies below this are treated as agreement to rounding.
pub const DISCREPANCY_FLOOR: f64 = 1e-12;
/// Required reduction per simultaneous halving of `dt` and `h`.
pub const MIN_REFINEMENT_RATIO: f64 = 1.8;

/// `(time nodes, points per axis)` for three successive refinements.
pub fn default_levels(dim: usize) -> Vec<(usize, usize)> {
    match dim {
        1 => vec![(32, 128), (64, 256), (128, 512)],
        2 => vec![(16, 32), (32, 64), (64, 128)],
        _ => vec![(8, 16), (16, 32), (32, 64)],
    }
}

/// Compares Picard iteration with the fixed-step exponential Euler stepper
/// at `T` across the given refinement levels on `[−L, L]ᴺ`.
pub fn uniqueness_probe(
    spec: &ProblemSpec,
    t_final: f64,
    half_width: f64,
    levels: &[(usize, usize)],
    config: &SolverConfig,
) -> Result<UniquenessReport> {
    if !spec.validate().uniq_ok {
        return Err(invalid("uniqueness probe needs a parameter set in the uniqueness class"));
    }
    if levels.len() < 2 {
        return Err(invalid("uniqueness probe needs at least two refinement levels"));
    }
    let mut out = Vec::with_capacity(levels.len());
    for &(nodes, m) in levels {
        let geometry = GridGeometry::new(spec.dim, half_width, m)?;
        let plan = HeatKernelPlan::new(geometry)?;
        let u0 = GridField::sample(&spec.u0, geometry)?;
        let w = GridField::sample(&spec.w, geometry)?;
        let dt = t_final / nodes as f64;
        let mut cfg = config.clone();
        cfg.picard_nodes = nodes;
        cfg.dt0 = dt;
        cfg.t_end = t_final;
        cfg.adapt = false;
        cfg.max_dt = dt;
        cfg.min_dt = cfg.min_dt.min(0.5 * dt);
        let picard = picard_solve(spec, &u0, &w, t_final, &cfg, &plan)?;
        let stepped = run_fields(spec, &cfg, &plan, u0, &w)?.final_state;
        let reference = stepped.lq_norm(spec.q);
        let gap = picard.state.sub(&stepped)?.lq_norm(spec.q);
        let discrepancy = if gap == 0.0 { 0.0 } else { gap / reference.max(f64::MIN_POSITIVE) };
        out.push(UniquenessLevel {
            time_nodes: nodes,
            points_per_axis: m,
            discrepancy,
            picard_iterations: picard.iterations,
        });
    }
    let ratios: Vec<f64> = out
        .windows(2)
        .map(|w| if w[1].discrepancy == 0.0 { f64::INFINITY } else { w[0].discrepancy / w[1].discrepancy })
        .collect();
    let pass = out.windows(2).zip(&ratios).all(|(w, &r)| {
        w[1].discrepancy <= DISCREPANCY_FLOOR || r >= MIN_REFINEMENT_RATIO
    });
    Ok(UniquenessReport { t_final, levels: out, ratios, pass })
}
