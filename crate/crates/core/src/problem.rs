//! Problem parameters and the Gaussian-sum profiles used for `u₀` and `w`.
//!
//! Profiles are finite sums `Σ cᵢ exp(−rᵢ |x − μᵢ|²)`. Everything the
//! laboratory needs from them (integrals, Gaussian-weighted integrals, heat
//! evolution, the λ-smoothed forcing) has a closed form, which is what makes
//! them useful as exact oracles for the grid-based machinery.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One term `c · exp(−r |x − μ|²)`. Serialized as `[c, r, [μ…]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64, Vec<f64>)", into = "(f64, f64, Vec<f64>)")]
pub struct GaussianTerm {
    pub coefficient: f64,
    pub rate: f64,
    pub center: Vec<f64>,
}

impl From<(f64, f64, Vec<f64>)> for GaussianTerm {
    fn from((coefficient, rate, center): (f64, f64, Vec<f64>)) -> Self {
        Self { coefficient, rate, center }
    }
}

impl From<GaussianTerm> for (f64, f64, Vec<f64>) {
    fn from(t: GaussianTerm) -> Self {
        (t.coefficient, t.rate, t.center)
    }
}

impl GaussianTerm {
    fn dist2(&self, x: &[f64]) -> f64 {
        self.center.iter().zip(x).map(|(c, xi)| (xi - c) * (xi - c)).sum()
    }

    fn center_norm2(&self) -> f64 {
        self.center.iter().map(|c| c * c).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    GaussianSum,
    Zero,
}

/// An analytic profile on ℝᴺ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    #[serde(default)]
    pub terms: Vec<GaussianTerm>,
}

impl ProfileSpec {
    pub fn zero() -> Self {
        Self { kind: ProfileKind::Zero, terms: Vec::new() }
    }

    pub fn gaussian_sum(terms: Vec<GaussianTerm>) -> Self {
        Self { kind: ProfileKind::GaussianSum, terms }
    }

    /// `c · exp(−r |x|²)` centered at the origin of ℝᴺ.
    pub fn centered(coefficient: f64, rate: f64, dim: usize) -> Self {
        Self::gaussian_sum(vec![GaussianTerm { coefficient, rate, center: vec![0.0; dim] }])
    }

    /// The sign-changing forcing `a·e^{−|y|²} − e^{−2|y|²}`.
    pub fn two_scale_example(a: f64, dim: usize) -> Self {
        Self::gaussian_sum(vec![
            GaussianTerm { coefficient: a, rate: 1.0, center: vec![0.0; dim] },
            GaussianTerm { coefficient: -1.0, rate: 2.0, center: vec![0.0; dim] },
        ])
    }

    /// Whether `a` lies in `2^{−N/2} < a ≤ (2/3)^{N/2}`, the range where
    /// [`ProfileSpec::two_scale_example`] has positive mass but a nonpositive
    /// `e^{−|y|²}`-weighted integral.
    pub fn two_scale_window(a: f64, dim: usize) -> bool {
        let n = dim as f64;
        a > 2f64.powf(-n / 2.0) && a <= (2.0 / 3.0f64).powf(n / 2.0)
    }

    pub fn is_zero(&self) -> bool {
        self.kind == ProfileKind::Zero
    }

    /// Checks the structural invariants for a profile on ℝᴺ.
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self.kind {
            ProfileKind::Zero if !self.terms.is_empty() => {
                Err(invalid("a zero profile carries no terms"))
            }
            ProfileKind::Zero => Ok(()),
            ProfileKind::GaussianSum if self.terms.is_empty() => {
                Err(invalid("gaussian_sum profile needs at least one term"))
            }
            ProfileKind::GaussianSum => {
                for (i, t) in self.terms.iter().enumerate() {
                    if !t.coefficient.is_finite() {
                        return Err(invalid(format!("term {i}: coefficient must be finite")));
                    }
                    if !(t.rate.is_finite() && t.rate > 0.0) {
                        return Err(invalid(format!("term {i}: rate must be finite and > 0")));
                    }
                    if t.center.len() != dim {
                        return Err(invalid(format!(
                            "term {i}: center has {} coordinates, dimension is {dim}",
                            t.center.len()
                        )));
                    }
                    if t.center.iter().any(|c| !c.is_finite()) {
                        return Err(invalid(format!("term {i}: center must be finite")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.coefficient * (-t.rate * t.dist2(x)).exp()).sum()
    }

    /// `∫ profile` over ℝᴺ, `Σ cᵢ (π/rᵢ)^{N/2}`.
    pub fn integral(&self, dim: usize) -> f64 {
        let half_n = dim as f64 / 2.0;
        self.terms.iter().map(|t| t.coefficient * (PI / t.rate).powf(half_n)).sum()
    }

    /// `∫ e^{−θ|y|²} profile(y) dy` in closed form.
    pub fn gaussian_weighted_integral(&self, theta: f64, dim: usize) -> f64 {
        let half_n = dim as f64 / 2.0;
        self.terms
            .iter()
            .map(|t| {
                let s = theta + t.rate;
                t.coefficient
                    * (PI / s).powf(half_n)
                    * (-theta * t.rate / s * t.center_norm2()).exp()
            })
            .sum()
    }

    /// The profile `x ↦ ∫ e^{−|x−y|²/λ} profile(y) dy`, again a Gaussian sum.
    pub fn kernel_smoothed(&self, lambda: f64, dim: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let half_n = dim as f64 / 2.0;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let d = 1.0 + t.rate * lambda;
                GaussianTerm {
                    coefficient: t.coefficient * (PI * lambda / d).powf(half_n),
                    rate: t.rate / d,
                    center: t.center.clone(),
                }
            })
            .collect();
        Self::gaussian_sum(terms)
    }

    /// Free-space heat evolution `S(t)·profile`, exact for Gaussian sums.
    pub fn heat_evolved(&self, t: f64, dim: usize) -> Self {
        if self.is_zero() || t == 0.0 {
            return self.clone();
        }
        let half_n = dim as f64 / 2.0;
        let terms = self
            .terms
            .iter()
            .map(|g| {
                let d = 1.0 + 4.0 * g.rate * t;
                GaussianTerm {
                    coefficient: g.coefficient * d.powf(-half_n),
                    rate: g.rate / d,
                    center: g.center.clone(),
                }
            })
            .collect();
        Self::gaussian_sum(terms)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coefficient *= factor;
        }
        out
    }

    pub fn min_rate(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.rate).reduce(f64::min)
    }

    /// Sufficient test for pointwise nonnegativity: every coefficient is ≥ 0.
    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient >= 0.0)
    }

    /// Upper bound on `|profile|` on the boundary of `[−L, L]ᴺ`, relative to
    /// the total coefficient mass. Zero profiles report 0.
    pub fn truncation_bound(&self, half_width: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let reach = t.center.iter().fold(0.0f64, |m, c| m.max(c.abs()));
                let gap = (half_width - reach).max(0.0);
                (-t.rate * gap * gap).exp()
            })
            .fold(0.0, f64::max)
    }
}

/// Σ cᵢ e^{−rᵢ|x−μᵢ|²}; the zero profile returns 0.
pub fn evaluate_profile(prof: &ProfileSpec, x: &[f64]) -> f64 {
    prof.evaluate(x)
}

/// Closed-form `∫_{ℝᴺ} profile`.
pub fn profile_integral(prof: &ProfileSpec, dim: usize) -> f64 {
    prof.integral(dim)
}

/// The full parameter set `(N, p, q, α, ϱ, u₀, w)`.
///
/// Deserialization does not enforce the domain constraints so that an
/// out-of-range document can still be inspected with [`ProblemSpec::validate`];
/// use [`ProblemSpec::new`] or [`ProblemSpec::check`] for a checked value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub rho: f64,
    pub u0: ProfileSpec,
    pub w: ProfileSpec,
}

impl ProblemSpec {
    pub fn new(
        dim: usize,
        p: f64,
        q: f64,
        alpha: f64,
        rho: f64,
        u0: ProfileSpec,
        w: ProfileSpec,
    ) -> Result<Self> {
        let spec = Self { dim, p, q, alpha, rho, u0, w };
        spec.check()?;
        Ok(spec)
    }

    /// Parameters only, both profiles zero. Handy for exponent arithmetic.
    pub fn parameters(dim: usize, p: f64, q: f64, alpha: f64, rho: f64) -> Self {
        Self { dim, p, q, alpha, rho, u0: ProfileSpec::zero(), w: ProfileSpec::zero() }
    }

    pub fn with_profiles(mut self, u0: ProfileSpec, w: ProfileSpec) -> Self {
        self.u0 = u0;
        self.w = w;
        self
    }

    /// Fails with the first violated base constraint.
    pub fn check(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(invalid("dim must be ≥ 1"));
        }
        if !(self.p.is_finite() && self.p > 1.0) {
            return Err(invalid("p must be > 1"));
        }
        if !(self.q.is_finite() && self.q >= 1.0) {
            return Err(invalid("q must be ≥ 1"));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(invalid("alpha must be ≥ 0"));
        }
        if !(self.rho.is_finite() && self.rho > -1.0) {
            return Err(invalid("rho must be > -1"));
        }
        self.u0.validate(self.dim).map_err(|e| invalid(format!("u0: {e}")))?;
        self.w.validate(self.dim).map_err(|e| invalid(format!("w: {e}")))?;
        Ok(())
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    /// `δ = α(1 − 1/q)`, or `None` when `q < 1`.
    pub fn delta(&self) -> Option<f64> {
        crate::exponents::delta(self.alpha, self.q).ok()
    }
}

/// Named admissibility flags for a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// `N ≥ 1, p > 1, q ≥ 1, α ≥ 0, ϱ > −1` and both profiles well formed.
    pub base_ok: bool,
    /// `q > N(p−1)/2`.
    pub q_above_scaling: bool,
    /// `α = 0` or `α ≥ 1`, the range where the fixed-point argument applies.
    pub alpha_admissible: bool,
    /// Local well-posedness in `Lᵠ`.
    pub lwp_ok: bool,
    /// `q ≥ p`.
    pub q_at_least_p: bool,
    /// Unconditional uniqueness in `C([0,T], Lᵠ)`.
    pub uniq_ok: bool,
}

impl ValidationReport {
    pub fn conditions(&self) -> [(&'static str, bool); 6] {
        [
            ("base_ok", self.base_ok),
            ("q_above_scaling", self.q_above_scaling),
            ("alpha_admissible", self.alpha_admissible),
            ("lwp_ok", self.lwp_ok),
            ("q_at_least_p", self.q_at_least_p),
            ("uniq_ok", self.uniq_ok),
        ]
    }
}

pub fn validate(spec: &ProblemSpec) -> ValidationReport {
    let base_ok = spec.check().is_ok();
    let n = spec.dim as f64;
    let q_above_scaling = spec.q > n * (spec.p - 1.0) / 2.0;
    let alpha_admissible = spec.alpha == 0.0 || spec.alpha >= 1.0;
    let lwp_ok = base_ok && q_above_scaling && alpha_admissible;
    let q_at_least_p = spec.q >= spec.p;
    ValidationReport {
        base_ok,
        q_above_scaling,
        alpha_admissible,
        lwp_ok,
        q_at_least_p,
        uniq_ok: lwp_ok && q_at_least_p,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(dim: usize, p: f64, q: f64, alpha: f64, rho: f64) -> ProblemSpec {
        ProblemSpec::parameters(dim, p, q, alpha, rho)
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&spec(1, 2.0, 2.0, 1.0, 0.0)).lwp_ok);
        assert!(!validate(&spec(3, 2.0, 1.0, 1.0, 0.0)).lwp_ok);
        let r = validate(&spec(2, 3.0, 3.0, 0.0, -0.5));
        assert!(r.uniq_ok, "{r:?}");
    }

    #[test]
    fn alpha_between_zero_and_one_is_not_covered() {
        let r = validate(&spec(1, 2.0, 2.0, 0.5, 0.0));
        assert!(r.base_ok);
        assert!(!r.lwp_ok);
    }

    #[test]
    fn invalid_base_is_a_flag_not_an_error() {
        let r = validate(&spec(1, 2.0, 0.5, 1.0, 0.0));
        assert!(!r.base_ok && !r.lwp_ok && !r.uniq_ok);
        assert!(ProblemSpec::new(1, 2.0, 0.5, 1.0, 0.0, ProfileSpec::zero(), ProfileSpec::zero())
            .is_err());
        assert!(!validate(&spec(0, 2.0, 2.0, 1.0, 0.0)).base_ok);
        assert!(!validate(&spec(1, 1.0, 2.0, 1.0, 0.0)).base_ok);
        assert!(!validate(&spec(1, 2.0, 2.0, 1.0, -1.0)).base_ok);
    }

    #[test]
    fn evaluate_examples() {
        let g = ProfileSpec::centered(1.0, 1.0, 1);
        assert_eq!(evaluate_profile(&g, &[0.0]), 1.0);
        let w = ProfileSpec::two_scale_example(0.8, 1);
        assert!((evaluate_profile(&w, &[0.0]) - (-0.2)).abs() < 1e-15);
        assert_eq!(evaluate_profile(&ProfileSpec::zero(), &[3.0]), 0.0);
    }

    #[test]
    fn integral_examples() {
        let g = ProfileSpec::centered(1.0, 1.0, 1);
        assert!((profile_integral(&g, 1) - 1.772_453_850_905_516).abs() < 1e-12);
        let w = ProfileSpec::two_scale_example(0.8, 1);
        let closed = std::f64::consts::PI.sqrt() * (0.8 - 0.5f64.sqrt());
        assert!((profile_integral(&w, 1) - closed).abs() < 1e-15);
        assert!((profile_integral(&w, 1) - 0.164_649).abs() < 1e-6);
        assert_eq!(profile_integral(&ProfileSpec::zero(), 2), 0.0);
    }

    #[test]
    fn weighted_integral_of_two_scale_example() {
        let w = ProfileSpec::two_scale_example(0.8, 1);
        let v = w.gaussian_weighted_integral(1.0, 1);
        assert!((v - (-0.020_675)).abs() < 1e-6, "{v}");
    }

    #[test]
    fn two_scale_window() {
        assert!(ProfileSpec::two_scale_window(0.8, 1));
        assert!(!ProfileSpec::two_scale_window(0.9, 1));
        assert!(!ProfileSpec::two_scale_window(0.7, 1));
    }

    #[test]
    fn profile_validation() {
        assert!(ProfileSpec::gaussian_sum(vec![]).validate(1).is_err());
        let mut z = ProfileSpec::zero();
        z.terms.push(GaussianTerm { coefficient: 1.0, rate: 1.0, center: vec![0.0] });
        assert!(z.validate(1).is_err());
        assert!(ProfileSpec::centered(1.0, 0.0, 1).validate(1).is_err());
        assert!(ProfileSpec::centered(1.0, 1.0, 2).validate(1).is_err());
        assert!(ProfileSpec::centered(1.0, 1.0, 2).validate(2).is_ok());
    }

    #[test]
    fn json_shape() {
        let s = ProblemSpec::parameters(1, 2.0, 2.0, 1.0, 0.0)
            .with_profiles(ProfileSpec::centered(0.5, 1.0, 1), ProfileSpec::zero());
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        for key in ["dim", "p", "q", "alpha", "rho", "u0", "w"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["u0"]["kind"], "gaussian_sum");
        assert_eq!(v["u0"]["terms"], serde_json::json!([[0.5, 1.0, [0.0]]]));
        let back: ProblemSpec = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
        let z: ProfileSpec = serde_json::from_str(r#"{"kind":"zero"}"#).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn heat_evolution_preserves_mass() {
        let g = ProfileSpec::two_scale_example(0.8, 2);
        let m0 = g.integral(2);
        let m1 = g.heat_evolved(3.0, 2).integral(2);
        assert!((m0 - m1).abs() < 1e-13);
    }
}
