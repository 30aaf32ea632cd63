//! Shape of the local Lipschitz bound for `aᵖ‖x‖^α − bᵖ‖y‖^α`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionCheck {
    pub lhs: f64,
    pub rhs_shape: f64,
    pub ratio: f64,
}

/// `lhs = |aᵖ xᵅ − bᵖ yᵅ|` against
/// `yᵅ|a−b|(aᵖ⁻¹+bᵖ⁻¹) + aᵖ d (xᵅ⁻¹+yᵅ⁻¹)` for `α ≥ 1`, or with `aᵖ dᵅ` as
/// the second term when `α < 1`.
pub fn contraction_bound_check(
    a: f64,
    b: f64,
    xnorm: f64,
    ynorm: f64,
    diffnorm: f64,
    p: f64,
    alpha: f64,
) -> ContractionCheck {
    let lhs = (a.powf(p) * xnorm.powf(alpha) - b.powf(p) * ynorm.powf(alpha)).abs();
    let first = ynorm.powf(alpha) * (a - b).abs() * (a.powf(p - 1.0) + b.powf(p - 1.0));
    let second = if alpha >= 1.0 {
        a.powf(p) * diffnorm * (xnorm.powf(alpha - 1.0) + ynorm.powf(alpha - 1.0))
    } else {
        a.powf(p) * diffnorm.powf(alpha)
    };
    let rhs_shape = first + second;
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs_shape };
    ContractionCheck { lhs, rhs_shape, ratio }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionBatch {
    pub samples: usize,
    /// Empirical constant: largest ratio over the batch.
    pub max_ratio: f64,
}

/// Scalar realizations `x, y ∈ [−5, 5]` with `‖x‖ = |x|`, `d = |x − y|`,
/// and `a, b ∈ [0, 5)`.
pub fn contraction_batch(samples: usize, p: f64, alpha: f64, seed: u64) -> ContractionBatch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..samples {
        let a = rng.random_range(0.0..5.0);
        let b = rng.random_range(0.0..5.0);
        let x: f64 = rng.random_range(-5.0..5.0);
        let y: f64 = rng.random_range(-5.0..5.0);
        let c = contraction_bound_check(a, b, x.abs(), y.abs(), (x - y).abs(), p, alpha);
        max_ratio = max_ratio.max(c.ratio);
    }
    ContractionBatch { samples, max_ratio }
}
