//! Grid certificate for `inf_{λ>0, x} ∫ e^{−|x−y|²/λ} w(y) dy ≥ 0` and the
//! sign of `∫ w`.

use serde::{Deserialize, Serialize};

use crate::problem::ProfileSpec;

/// Values at or above this count as nonnegative.
pub const NONNEG_TOL: f64 = -1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WConditionReport {
    /// Smallest smoothed value on the grid; an upper bound for the true infimum.
    pub min_value: f64,
    pub argmin_lambda: f64,
    pub argmin_x: Vec<f64>,
    /// Whether the grid minimum is ≥ −10⁻¹⁰. A grid certificate, not a proof.
    pub holds_ass_w: bool,
    pub integral: f64,
    pub holds_ass_ww: bool,
    pub lambda_points: usize,
    pub x_points: usize,
}

/// Evaluates the smoothed profile in closed form on `lambda_grid × x_grid`.
pub fn w_condition_check(
    w: &ProfileSpec,
    dim: usize,
    lambda_grid: &[f64],
    x_grid: &[Vec<f64>],
) -> WConditionReport {
    let mut min_value = f64::INFINITY;
    let mut argmin_lambda = f64::NAN;
    let mut argmin_x = vec![0.0; dim];
    if w.is_zero() {
        min_value = 0.0;
    } else {
        for &lambda in lambda_grid {
            let smoothed = w.kernel_smoothed(lambda, dim);
            for x in x_grid {
                let v = smoothed.evaluate(x);
                if v < min_value {
                    min_value = v;
                    argmin_lambda = lambda;
                    argmin_x.clone_from(x);
                }
            }
        }
    }
    let integral = w.integral(dim);
    WConditionReport {
        min_value,
        argmin_lambda,
        argmin_x,
        holds_ass_w: min_value >= NONNEG_TOL,
        integral,
        holds_ass_ww: integral > 0.0,
        lambda_points: lambda_grid.len(),
        x_points: x_grid.len(),
    }
}

/// `10^{−3 + k/per_decade}` up to `10⁶`; includes `λ = 1` exactly.
pub fn default_lambda_grid(per_decade: usize) -> Vec<f64> {
    (0..=9 * per_decade).map(|k| 10f64.powf(-3.0 + k as f64 / per_decade as f64)).collect()
}

/// A uniform grid over `[−L, L]ᴺ` plus every term center.
pub fn default_x_grid(w: &ProfileSpec, dim: usize, half_width: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..per_axis)
        .map(|k| -half_width + 2.0 * half_width * k as f64 / (per_axis - 1) as f64)
        .collect();
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| axis.iter().map(move |&c| {
                let mut q = p.clone();
                q.push(c);
                q
            }))
            .collect();
    }
    out.extend(w.terms.iter().map(|t| t.center.clone()));
    out
}

/// The check with the default grids: 20 λ values per decade and an `x` grid
/// on `[−16, 16]ᴺ` (129, 33 or 17 points per axis in 1, 2, 3 dimensions).
pub fn w_condition_check_default(w: &ProfileSpec, dim: usize) -> WConditionReport {
    let per_axis = match dim {
        1 => 129,
        2 => 33,
        _ => 17,
    };
    let lambdas = default_lambda_grid(20);
    let xs = default_x_grid(w, dim, 16.0, per_axis);
    w_condition_check(w, dim, &lambdas, &xs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_gaussian() {
        let w = ProfileSpec::centered(1.0, 1.0, 2);
        let r = w_condition_check_default(&w, 2);
        assert!(r.holds_ass_w && r.holds_ass_ww);
        assert!((r.integral - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn two_scale_example() {
        let w = ProfileSpec::two_scale_example(0.8, 1);
        let r = w_condition_check_default(&w, 1);
        assert!((r.integral - 0.164_649).abs() < 1e-6);
        assert!(!r.holds_ass_w && r.holds_ass_ww);
        let at_one = w.kernel_smoothed(1.0, 1).evaluate(&[0.0]);
        assert!((at_one - (-0.020_675)).abs() < 1e-6, "{at_one}");
        assert!(r.min_value <= at_one);
    }

    #[test]
    fn lambda_grid_contains_one() {
        let g = default_lambda_grid(20);
        assert!(g.contains(&1.0));
        assert_eq!(g.first(), Some(&1e-3));
        assert!((g.last().unwrap() - 1e6).abs() < 1e-6);
    }

    #[test]
    fn zero_forcing() {
        let r = w_condition_check_default(&ProfileSpec::zero(), 1);
        assert!(r.holds_ass_w && !r.holds_ass_ww);
    }
}
