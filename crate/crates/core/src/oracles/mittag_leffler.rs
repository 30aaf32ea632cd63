//! The Mittag-Leffler function `E_a(z) = Σ zⁿ/Γ(na+1)` and the singular
//! Gronwall bound built on it.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{domain, Error, Result};

/// Relative remainder at which summation stops.
const STOP_REL: f64 = 1e-17;
/// Relative remainder below which the value counts as converged.
pub const CONVERGED_REL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    /// `a ∈ (0, 1]`.
    pub order: f64,
    /// `z ≥ 0`.
    pub argument: f64,
    /// Cap on the number of series terms.
    pub truncation: usize,
}

impl MLParams {
    pub fn new(order: f64, argument: f64) -> Self {
        Self { order, argument, truncation: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLValue {
    pub value: f64,
    pub terms: usize,
    /// Rigorous bound on the omitted tail.
    pub remainder_bound: f64,
    pub converged: bool,
}

/// Sums the series in log space. Since `ln Γ` is convex the term ratio
/// `z Γ(na+1)/Γ((n+1)a+1)` decreases in `n`, so once it is below 1 the tail
/// is bounded by a geometric series.
pub fn mittag_leffler(params: MLParams) -> Result<MLValue> {
    let MLParams { order: a, argument: z, truncation } = params;
    if !(a > 0.0 && a <= 1.0) {
        return Err(domain(format!("Mittag-Leffler order must lie in (0, 1], got {a}")));
    }
    if !(z >= 0.0 && z.is_finite()) {
        return Err(domain(format!("Mittag-Leffler argument must be finite and ≥ 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(MLValue { value: 1.0, terms: 1, remainder_bound: 0.0, converged: true });
    }
    let lz = z.ln();
    let log_term = |n: usize| n as f64 * lz - ln_gamma(n as f64 * a + 1.0);
    let mut sum = 1.0;
    let mut remainder_bound = f64::INFINITY;
    let mut n = 1;
    while n < truncation {
        let lt = log_term(n);
        if lt > 700.0 {
            break;
        }
        sum += lt.exp();
        let next = log_term(n + 1);
        let ratio = (next - lt).exp();
        if ratio < 1.0 {
            remainder_bound = next.exp() / (1.0 - ratio);
            if remainder_bound <= STOP_REL * sum {
                n += 1;
                break;
            }
        }
        n += 1;
    }
    let converged = remainder_bound <= CONVERGED_REL * sum;
    Ok(MLValue { value: sum, terms: n, remainder_bound, converged })
}

/// `A·E_{1−σ}(MΓ(1−σ)t^{1−σ})`; `A = 0` gives 0 for every `t`.
pub fn gronwall_bound(a: f64, m: f64, sigma: f64, t: f64) -> Result<f64> {
    if !(a >= 0.0 && m > 0.0 && (0.0..1.0).contains(&sigma) && t >= 0.0) {
        return Err(domain("gronwall bound needs A ≥ 0, M > 0, σ ∈ [0, 1), t ≥ 0"));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let order = 1.0 - sigma;
    let z = m * gamma(order) * t.powf(order);
    let ml = mittag_leffler(MLParams::new(order, z))?;
    if !ml.converged {
        return Err(Error::Invalid(format!("Mittag-Leffler series did not converge at z = {z}")));
    }
    Ok(a * ml.value)
}
