//! Closed-form exponents, thresholds and the regime classifier.
//!
//! Everything here is double-precision arithmetic on the raw formulas; the
//! integration tests shadow each one in exact rational arithmetic.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};
use crate::problem::{validate, ProblemSpec, ValidationReport};

/// `δ = α(1 − 1/q)`.
pub fn delta(alpha: f64, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(domain(format!("delta needs q ≥ 1, got {q}")));
    }
    if !(alpha >= 0.0) {
        return Err(domain(format!("delta needs alpha ≥ 0, got {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    Ok(alpha * (1.0 - 1.0 / q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sigma {
    pub sigma: f64,
    pub p_sigma: f64,
    pub one_minus_p_sigma: f64,
}

/// `σ = N(p−1)/(2pq)` together with `pσ` and `1 − pσ`.
pub fn sigma(dim: usize, p: f64, q: f64) -> Result<Sigma> {
    if !(p > 1.0) || !(q >= 1.0) {
        return Err(domain(format!("sigma needs p > 1 and q ≥ 1, got p={p}, q={q}")));
    }
    let n = dim as f64;
    let sigma = n * (p - 1.0) / (2.0 * p * q);
    let p_sigma = n * (p - 1.0) / (2.0 * q);
    Ok(Sigma { sigma, p_sigma, one_minus_p_sigma: 1.0 - p_sigma })
}

/// The scaling exponent `p = 1 + 2/N − δ`.
pub fn fujita_scaling_p(dim: usize, q: f64, alpha: f64) -> Result<f64> {
    Ok(1.0 + 2.0 / dim as f64 - delta(alpha, q)?)
}

/// A real number or `+∞`. Serializes as a JSON number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn as_f64(self) -> f64 {
        match self {
            Self::Finite(x) => x,
            Self::PosInfinity => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x}"),
            Self::PosInfinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(x) => s.serialize_f64(*x),
            Self::PosInfinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Self::Finite(x)),
            Raw::Str(s) if s == "inf" => Ok(Self::PosInfinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

/// `p*(ϱ)`: `(N−2ϱ)/(N−2ϱ−2)` for `−1 < ϱ < 0`, `+∞` for `ϱ > 0`.
///
/// `ϱ = 0` is rejected: only the limit `N/(N−2)` is available there and the
/// function does not pick a side.
pub fn p_star(dim: usize, rho: f64) -> Result<ExtendedReal> {
    if !(rho > -1.0) {
        return Err(domain(format!("p_star needs rho > -1, got {rho}")));
    }
    if rho == 0.0 {
        return Err(domain("p_star is not defined at rho = 0"));
    }
    if rho > 0.0 {
        return Ok(ExtendedReal::PosInfinity);
    }
    let n = dim as f64;
    let d = n - 2.0 * rho - 2.0;
    if !(d > 0.0) {
        return Err(domain(format!("p_star needs N − 2ϱ − 2 > 0, got {d}")));
    }
    Ok(ExtendedReal::Finite((n - 2.0 * rho) / d))
}

/// The blow-up inequality `p + Nδ/(N−2ϱ−2) < (N−2ϱ)/(N−2ϱ−2)` with its
/// preconditions reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupCriterion {
    /// `N ≥ 3`.
    pub dim_ok: bool,
    /// `ϱ ≤ 0`.
    pub rho_ok: bool,
    /// `δ < 2/N`.
    pub delta_ok: bool,
    pub admissible: bool,
    /// The inequality itself, evaluated whenever `N − 2ϱ − 2 > 0`.
    pub inequality: bool,
    /// `admissible && inequality`.
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn blowup_criterion(dim: usize, p: f64, q: f64, alpha: f64, rho: f64) -> Result<BlowupCriterion> {
    let d = delta(alpha, q)?;
    let n = dim as f64;
    let dim_ok = dim >= 3;
    let rho_ok = rho <= 0.0;
    let delta_ok = d < 2.0 / n;
    let admissible = dim_ok && rho_ok && delta_ok;
    let den = n - 2.0 * rho - 2.0;
    let (lhs, rhs, inequality) = if den > 0.0 {
        let lhs = p + n * d / den;
        let rhs = (n - 2.0 * rho) / den;
        (lhs, rhs, lhs < rhs)
    } else {
        (f64::NAN, f64::NAN, false)
    };
    Ok(BlowupCriterion {
        dim_ok,
        rho_ok,
        delta_ok,
        admissible,
        inequality,
        holds: admissible && inequality,
        lhs,
        rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GepExponents {
    /// `(N−2ϱ−Nδ)/(N−2ϱ−2)`.
    pub threshold: f64,
    pub p_c: f64,
    pub ell: f64,
    /// `N ≥ 2`.
    pub dim_ok: bool,
    /// `−1 < ϱ < 0`.
    pub rho_ok: bool,
    /// `δ < 2/N`.
    pub delta_ok: bool,
    /// `N(p−1)/2 ≤ q ≤ p`.
    pub q_band_ok: bool,
}

impl GepExponents {
    pub fn preconditions_ok(&self) -> bool {
        self.dim_ok && self.rho_ok && self.delta_ok
    }
}

pub fn gep_exponents(dim: usize, p: f64, q: f64, alpha: f64, rho: f64) -> Result<GepExponents> {
    let d = delta(alpha, q)?;
    let n = dim as f64;
    let den_t = n - 2.0 * rho - 2.0;
    if !(den_t > 0.0) {
        return Err(domain(format!("threshold denominator N − 2ϱ − 2 = {den_t} is not positive")));
    }
    let den_c = 2.0 * (q - 1.0) + n * d;
    if !(den_c > 0.0) {
        return Err(domain(format!("p_c denominator 2(q−1) + Nδ = {den_c} is not positive")));
    }
    let k = (p - 1.0) * (q - 1.0);
    let den_l = den_c + 2.0 * (rho + 1.0) * k + 2.0 * (rho + 1.0) * d;
    if !(den_l > 0.0) {
        return Err(domain(format!("ell denominator = {den_l} is not positive")));
    }
    Ok(GepExponents {
        threshold: (n - 2.0 * rho - n * d) / den_t,
        p_c: n * (k + d * q) / den_c,
        ell: n * (k + d) / den_l,
        dim_ok: dim >= 2,
        rho_ok: rho > -1.0 && rho < 0.0,
        delta_ok: d < 2.0 / n,
        q_band_ok: n * (p - 1.0) / 2.0 <= q && q <= p,
    })
}

/// The admissible interval `(lo, hi)` for `1/r`, plus the four auxiliary
/// inequalities E1–E4 evaluated as printed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RWindow {
    pub lo: f64,
    pub hi: f64,
    /// `(2(q−1)+Nδp)/(NpK)` with `K = (p−1)(q−1)+qδ`.
    pub lower_a: f64,
    /// `1/p_c + 2ϱ/N + 2δ/(NpK)`.
    pub lower_b: f64,
    /// `1/p_c`.
    pub upper_a: f64,
    /// `(p−1)(q+δ−1)/(pK)`.
    pub upper_b: f64,
    pub nonempty: bool,
    pub e1: bool,
    pub e2: bool,
    pub e3: bool,
    pub e4: bool,
    pub e4_lhs: f64,
    pub e4_rhs: f64,
}

impl RWindow {
    /// Strict membership of `1/r`.
    pub fn contains(&self, inv_r: f64) -> bool {
        self.lo < inv_r && inv_r < self.hi
    }

    pub fn midpoint(&self) -> Option<f64> {
        self.nonempty.then(|| 0.5 * (self.lo + self.hi))
    }
}

pub fn r_window(dim: usize, p: f64, q: f64, alpha: f64, rho: f64, p_c: f64) -> Result<RWindow> {
    let d = delta(alpha, q)?;
    let n = dim as f64;
    let k = (p - 1.0) * (q - 1.0) + q * d;
    if !(k != 0.0 && p_c != 0.0 && p != 0.0 && p != 1.0) {
        return Err(domain("r_window has a zero denominator"));
    }
    let den_t = n - 2.0 * rho - 2.0;
    if den_t == 0.0 {
        return Err(domain("r_window: N − 2ϱ − 2 = 0"));
    }
    let lower_a = (2.0 * (q - 1.0) + n * d * p) / (n * p * k);
    let lower_b = 1.0 / p_c + 2.0 * rho / n + 2.0 * d / (n * p * k);
    let upper_a = 1.0 / p_c;
    let upper_b = (p - 1.0) * (q + d - 1.0) / (p * k);
    let lo = lower_a.max(lower_b);
    let hi = upper_a.min(upper_b);
    let threshold = (n - 2.0 * rho - n * d) / den_t;
    let e4_lhs = 1.0 / p_c
        + 2.0 * rho / n
        + ((p - 1.0) * (2.0 * n * q * p - n * q * d * (2.0 - d)) - n * d - 2.0 * p * q * d)
            / (n * p * (p - 1.0) * k);
    let e4_rhs = n * (p - 1.0) * (q + d - 1.0) / (n * p * k);
    Ok(RWindow {
        lo,
        hi,
        lower_a,
        lower_b,
        upper_a,
        upper_b,
        nonempty: lo < hi,
        e1: p >= threshold,
        e2: lower_a < upper_a,
        e3: lower_a < upper_b,
        e4: e4_lhs < e4_rhs,
        e4_lhs,
        e4_rhs,
    })
}

/// `β = (N/2)(1/p_c − 1/r)`; requires `r > p_c`.
pub fn beta(dim: usize, p_c: f64, r: f64) -> Result<f64> {
    if !(r > p_c) {
        return Err(domain(format!("beta needs r > p_c, got r={r}, p_c={p_c}")));
    }
    let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
    Ok(dim as f64 / 2.0 * (1.0 / p_c - inv_r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaCheck {
    pub r: f64,
    pub beta: f64,
    /// `1/(p+α)`.
    pub bound: f64,
    /// `0 < β < 1/(p+α)`.
    pub within_bound: bool,
}

pub fn beta_check(dim: usize, p_c: f64, r: f64, p: f64, alpha: f64) -> Result<BetaCheck> {
    let b = beta(dim, p_c, r)?;
    let bound = 1.0 / (p + alpha);
    Ok(BetaCheck { r, beta: b, bound, within_bound: b > 0.0 && b < bound })
}

/// The growth-rate exponent `θ = (N−2ϱ−2)/2 + (Nδ−2)/(2(p−1))`.
pub fn certificate_exponent(dim: usize, p: f64, q: f64, alpha: f64, rho: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(domain(format!("certificate exponent needs p > 1, got {p}")));
    }
    let d = delta(alpha, q)?;
    let n = dim as f64;
    Ok((n - 2.0 * rho - 2.0) / 2.0 + (n * d - 2.0) / (2.0 * (p - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Blowup,
    GlobalSmallData,
    Gap,
    Inadmissible,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Blowup => "blowup",
            Self::GlobalSmallData => "global_small_data",
            Self::Gap => "gap",
            Self::Inadmissible => "inadmissible",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether every hypothesis of the small-data global existence result holds.
fn gep_holds(spec: &ProblemSpec) -> bool {
    let Ok(g) = gep_exponents(spec.dim, spec.p, spec.q, spec.alpha, spec.rho) else {
        return false;
    };
    if !(g.preconditions_ok() && g.q_band_ok && spec.p >= g.threshold) {
        return false;
    }
    r_window(spec.dim, spec.p, spec.q, spec.alpha, spec.rho, g.p_c)
        .map(|w| w.nonempty)
        .unwrap_or(false)
}

pub fn classify(spec: &ProblemSpec) -> Regime {
    if !validate(spec).base_ok {
        return Regime::Inadmissible;
    }
    let blowup = blowup_criterion(spec.dim, spec.p, spec.q, spec.alpha, spec.rho)
        .map(|c| c.holds)
        .unwrap_or(false);
    if blowup && spec.w.integral(spec.dim) > 0.0 {
        Regime::Blowup
    } else if gep_holds(spec) {
        Regime::GlobalSmallData
    } else {
        Regime::Gap
    }
}

/// Every derived quantity for one parameter set. Fields are `None` where the
/// underlying formula is outside its domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub validation: ValidationReport,
    pub delta: Option<f64>,
    pub sigma: Option<Sigma>,
    pub fujita_scaling_p: Option<f64>,
    pub p_star: Option<ExtendedReal>,
    pub blowup: Option<BlowupCriterion>,
    pub blowup_holds: bool,
    pub w_integral: f64,
    pub gep: Option<GepExponents>,
    pub r_window: Option<RWindow>,
    /// `β` at the midpoint of the window for `1/r`.
    pub beta_of_r: Option<BetaCheck>,
    pub certificate_exponent: Option<f64>,
    pub regime: Regime,
}

pub fn exponent_report(spec: &ProblemSpec) -> ExponentReport {
    let (n, p, q, a, rho) = (spec.dim, spec.p, spec.q, spec.alpha, spec.rho);
    let validation = validate(spec);
    let gep = gep_exponents(n, p, q, a, rho).ok();
    let window = gep.and_then(|g| r_window(n, p, q, a, rho, g.p_c).ok());
    let beta_of_r = match (gep, window.and_then(|w| w.midpoint())) {
        (Some(g), Some(inv_r)) if inv_r > 0.0 => beta_check(n, g.p_c, 1.0 / inv_r, p, a).ok(),
        _ => None,
    };
    let blowup = blowup_criterion(n, p, q, a, rho).ok();
    ExponentReport {
        validation,
        delta: delta(a, q).ok(),
        sigma: sigma(n, p, q).ok(),
        fujita_scaling_p: fujita_scaling_p(n, q, a).ok(),
        p_star: p_star(n, rho).ok(),
        blowup,
        blowup_holds: blowup.is_some_and(|c| c.holds),
        w_integral: spec.w.integral(n),
        gep,
        r_window: window,
        beta_of_r,
        certificate_exponent: certificate_exponent(n, p, q, a, rho).ok(),
        regime: classify(spec),
    }
}

impl ExponentReport {
    /// Fixed-order `key: value` rows; absent values print as `n/a`.
    pub fn table(&self) -> Vec<(&'static str, String)> {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
        }
        let w = self.r_window;
        vec![
            ("base_ok", self.validation.base_ok.to_string()),
            ("lwp_ok", self.validation.lwp_ok.to_string()),
            ("uniq_ok", self.validation.uniq_ok.to_string()),
            ("delta", opt(self.delta)),
            ("sigma", opt(self.sigma.map(|s| s.sigma))),
            ("p_sigma", opt(self.sigma.map(|s| s.p_sigma))),
            ("fujita_scaling_p", opt(self.fujita_scaling_p)),
            ("p_star", opt(self.p_star)),
            ("blowup_preconditions", opt(self.blowup.map(|b| b.admissible))),
            ("blowup_holds", self.blowup_holds.to_string()),
            ("w_integral", self.w_integral.to_string()),
            ("gep_threshold", opt(self.gep.map(|g| g.threshold))),
            ("p_c", opt(self.gep.map(|g| g.p_c))),
            ("ell", opt(self.gep.map(|g| g.ell))),
            ("q_band_ok", opt(self.gep.map(|g| g.q_band_ok))),
            ("r_window_lo", opt(w.map(|w| w.lo))),
            ("r_window_hi", opt(w.map(|w| w.hi))),
            ("r_window_nonempty", opt(w.map(|w| w.nonempty))),
            ("e1", opt(w.map(|w| w.e1))),
            ("e2", opt(w.map(|w| w.e2))),
            ("e3", opt(w.map(|w| w.e3))),
            ("e4", opt(w.map(|w| w.e4))),
            ("beta_r", opt(self.beta_of_r.map(|b| b.r))),
            ("beta", opt(self.beta_of_r.map(|b| b.beta))),
            ("beta_bound_ok", opt(self.beta_of_r.map(|b| b.within_bound))),
            ("certificate_exponent", opt(self.certificate_exponent)),
            ("regime", self.regime.to_string()),
        ]
    }
}
