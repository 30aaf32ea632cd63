//! Standalone numerical verifiers for the auxiliary inequalities and the
//! test-function exponent arithmetic.

pub mod certificate;
pub mod contraction;
pub mod cutoff;
pub mod jet;
pub mod mittag_leffler;
pub mod wcond;
pub mod young;

use serde::{Deserialize, Serialize};

pub use certificate::{certificate_scaling_check, CertificateReport};
pub use contraction::{contraction_batch, contraction_bound_check, ContractionCheck};
pub use cutoff::{cutoff_laplacian_check, CutoffKind, CutoffReport, CutoffSpec};
pub use mittag_leffler::{gronwall_bound, mittag_leffler, MLParams, MLValue};
pub use wcond::{w_condition_check, WConditionReport};
pub use young::{young_batch, young_check, YoungCheck};

/// The verifiers reachable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    Young,
    Contraction,
    Ml,
    Gronwall,
    Cutoff,
    Wcond,
    Certificate,
}

impl Lemma {
    pub const ALL: [Lemma; 7] = [
        Lemma::Young,
        Lemma::Contraction,
        Lemma::Ml,
        Lemma::Gronwall,
        Lemma::Cutoff,
        Lemma::Wcond,
        Lemma::Certificate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Lemma::Young => "young",
            Lemma::Contraction => "contraction",
            Lemma::Ml => "ml",
            Lemma::Gronwall => "gronwall",
            Lemma::Cutoff => "cutoff",
            Lemma::Wcond => "wcond",
            Lemma::Certificate => "certificate",
        }
    }
}

impl std::fmt::Display for Lemma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Lemma {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| crate::error::invalid(format!("unknown lemma {s:?}")))
    }
}
