//! Runs the oracle suite with default parameters and reports one verdict
//! per lemma.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use statrs::function::erf::erfc;

use crate::error::Result;
use crate::oracles::certificate::SLOPE_TOL;
use crate::oracles::cutoff::CutoffTolerance;
use crate::oracles::wcond::w_condition_check_default;
use crate::oracles::{
    certificate_scaling_check, contraction_batch, cutoff_laplacian_check, gronwall_bound, mittag_leffler, young_batch,
    CutoffKind, CutoffSpec, Lemma, MLParams,
};
use crate::problem::ProfileSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaVerdict {
    pub lemma: Lemma,
    pub pass: bool,
    /// Tolerance the measured quantity was held to.
    pub tolerance: f64,
    pub detail: Value,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub verdicts: Vec<LemmaVerdict>,
    /// Names of the failing lemmas.
    pub failures: Vec<Lemma>,
}

/// Tolerance for `lemma`, or an unattainable one when `faulty`.
fn tolerance(lemma: Lemma, faulty: bool) -> f64 {
    if faulty {
        return -1.0;
    }
    match lemma {
        Lemma::Young => 0.0,
        Lemma::Contraction => 0.1,
        Lemma::Ml => 1e-8,
        Lemma::Gronwall => 0.0,
        Lemma::Cutoff => 0.05,
        Lemma::Wcond => 1e-12,
        Lemma::Certificate => SLOPE_TOL,
    }
}

fn young(tol: f64) -> Result<(bool, Value)> {
    let b = young_batch(100_000, 3.0, 1.5, 1)?;
    Ok((b.failures as f64 <= tol, json!(b)))
}

fn contraction(tol: f64) -> Result<(bool, Value)> {
    let small = contraction_batch(10_000, 2.0, 2.0, 11);
    let large = contraction_batch(100_000, 2.0, 2.0, 11);
    let drift = (large.max_ratio / small.max_ratio - 1.0).abs();
    let pass = large.max_ratio.is_finite() && drift <= tol;
    Ok((pass, json!({ "small": small, "large": large, "relative_drift": drift })))
}

fn ml(tol: f64) -> Result<(bool, Value)> {
    let mut exp_err: f64 = 0.0;
    for k in 0..=40 {
        let z = 0.5 * f64::from(k);
        let v = mittag_leffler(MLParams::new(1.0, z))?;
        exp_err = exp_err.max(((v.value - z.exp()) / z.exp()).abs());
    }
    let mut erfc_err: f64 = 0.0;
    for k in 0..=12 {
        let z = 0.25 * f64::from(k);
        let want = (z * z).exp() * erfc(-z);
        erfc_err = erfc_err.max(((mittag_leffler(MLParams::new(0.5, z))?.value - want) / want).abs());
    }
    let half = mittag_leffler(MLParams::new(0.5, 1.0))?.value;
    let pass = exp_err <= 1e-10 && erfc_err <= tol;
    Ok((pass, json!({ "exp_rel_error": exp_err, "erfc_rel_error": erfc_err, "e_half_at_one": half })))
}

fn gronwall(tol: f64) -> Result<(bool, Value)> {
    let mut worst: f64 = 0.0;
    for &(m, sigma, t) in &[(1.0, 0.0, 1.0), (3.0, 0.5, 10.0), (0.2, 0.9, 100.0)] {
        worst = worst.max(gronwall_bound(0.0, m, sigma, t)?.abs());
    }
    let e = gronwall_bound(1.0, 1.0, 0.0, 2.0)?;
    let exp_err = (e - 2f64.exp()).abs() / 2f64.exp();
    Ok((worst <= tol && exp_err < 1e-12, json!({ "max_abs_at_zero_amplitude": worst, "exp_rel_error": exp_err })))
}

fn cutoff(tol: f64) -> Result<(bool, Value)> {
    let t = CutoffTolerance { fd_rel: if tol < 0.0 { tol } else { 1e-3 }, richardson: 0.25, c_emp: tol };
    let cases = [(CutoffKind::Psi2, 4.0, 1, 2e-3), (CutoffKind::Psi1, 3.0, 2, 2.5e-4), (CutoffKind::Psi1, 3.0, 3, 2.5e-4)];
    let mut reports = Vec::new();
    for (kind, theta, dim, h_rel) in cases {
        let cut = CutoffSpec::new(kind, theta, 100.0)?;
        reports.push(cutoff_laplacian_check(&cut, dim, 400, h_rel, 1e4, t)?);
    }
    Ok((reports.iter().all(|r| r.pass), json!(reports)))
}

fn wcond(tol: f64) -> Result<(bool, Value)> {
    let w = ProfileSpec::two_scale_example(0.8, 1);
    let r = w_condition_check_default(&w, 1);
    let closed = std::f64::consts::PI.sqrt() * (0.8 - 0.5f64.sqrt());
    let err = ((r.integral - closed) / closed).abs();
    let g = w_condition_check_default(&ProfileSpec::centered(1.0, 1.0, 2), 2);
    let pass = err <= tol && !r.holds_ass_w && r.holds_ass_ww && g.holds_ass_w && g.holds_ass_ww;
    Ok((pass, json!({ "two_scale": r, "integral_rel_error": err, "gaussian": g })))
}

fn certificate(tol: f64) -> Result<(bool, Value)> {
    let w = ProfileSpec::centered(0.5, 1.0, 3);
    let r = certificate_scaling_check(3, 2.0, 2.0, 0.0, 0.0, &w, &[1e2, 1e3, 1e4], 16, tol)?;
    Ok((r.pass, json!(r)))
}

/// Runs one verifier. `faulty` swaps in an unattainable tolerance.
pub fn verify_lemma(lemma: Lemma, faulty: bool) -> LemmaVerdict {
    let tol = tolerance(lemma, faulty);
    let out = match lemma {
        Lemma::Young => young(tol),
        Lemma::Contraction => contraction(tol),
        Lemma::Ml => ml(tol),
        Lemma::Gronwall => gronwall(tol),
        Lemma::Cutoff => cutoff(tol),
        Lemma::Wcond => wcond(tol),
        Lemma::Certificate => certificate(tol),
    };
    match out {
        Ok((pass, detail)) => LemmaVerdict { lemma, pass, tolerance: tol, detail, error: None },
        Err(e) => LemmaVerdict { lemma, pass: false, tolerance: tol, detail: Value::Null, error: Some(e.to_string()) },
    }
}

/// Runs the listed verifiers in order; `fault` names one to sabotage.
pub fn verify(lemmas: &[Lemma], fault: Option<Lemma>) -> VerifyReport {
    let verdicts: Vec<LemmaVerdict> = lemmas.iter().map(|&l| verify_lemma(l, fault == Some(l))).collect();
    let failures: Vec<Lemma> = verdicts.iter().filter(|v| !v.pass).map(|v| v.lemma).collect();
    VerifyReport { pass: failures.is_empty(), verdicts, failures }
}

pub fn verify_all(fault: Option<Lemma>) -> VerifyReport {
    verify(&Lemma::ALL, fault)
}
