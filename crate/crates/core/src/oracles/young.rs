//! `ab ≤ εaᵖ + (pε)^{−q/p} b^q/q` for conjugate `p, q`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Additive slack on the right-hand side, scaled by `max(1, rhs)`.
pub const YOUNG_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub fn young_check(a: f64, b: f64, p: f64, q: f64, eps: f64) -> Result<YoungCheck> {
    if !(p > 1.0 && q > 1.0) || (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 {
        return Err(domain(format!("p={p}, q={q} are not conjugate exponents")));
    }
    if !(a >= 0.0 && b >= 0.0 && eps > 0.0) {
        return Err(domain("young check needs a, b ≥ 0 and eps > 0"));
    }
    let lhs = a * b;
    let rhs = eps * a.powf(p) + (p * eps).powf(-q / p) * b.powf(q) / q;
    Ok(YoungCheck { lhs, rhs, pass: lhs <= rhs + YOUNG_SLACK * rhs.max(1.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungBatch {
    pub samples: usize,
    pub failures: usize,
    /// Smallest `rhs − lhs` seen.
    pub min_margin: f64,
}

/// Random `a, b ∈ [0, 10)`, `ε` log-uniform in `[10⁻³, 10³]`.
pub fn young_batch(samples: usize, p: f64, q: f64, seed: u64) -> Result<YoungBatch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..samples {
        let a = rng.random_range(0.0..10.0);
        let b = rng.random_range(0.0..10.0);
        let eps = 10f64.powf(rng.random_range(-3.0..3.0));
        let c = young_check(a, b, p, q, eps)?;
        failures += usize::from(!c.pass);
        min_margin = min_margin.min(c.rhs - c.lhs);
    }
    Ok(YoungBatch { samples, failures, min_margin })
}
