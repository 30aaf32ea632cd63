//! A numerical laboratory for the forced semilinear heat equation with a
//! nonlocal source,
//!
//! ```text
//! ∂ₜu − Δu = ‖u(t)‖_q^α |u|^p + t^ϱ w(x),   u(·,0) = u₀,   x ∈ ℝᴺ,
//! ```
//!
//! The crate is organised around the objects an analyst works with:
//!
//! * [`problem`]: parameter sets and Gaussian-sum profiles for `u₀` and `w`.
//! * [`exponents`]: every closed-form exponent and threshold (δ, σ, p*(ϱ),
//!   the blow-up criterion, the small-data global window) and the regime
//!   classifier.
//! * [`field`]: functions sampled on a periodic box, Lebesgue norms, the
//!   nonlocal source term and on-disk formats.
//! * [`semigroup`]: the heat semigroup `e^{tΔ}` applied spectrally, with a
//!   direct Gaussian-kernel oracle and the smoothing / comparison checks.
//! * [`solver`]: the Duhamel (mild) formulation, solved by an exponential
//!   Euler stepper with blow-up detection and by Picard iteration.
//! * [`oracles`]: standalone verifiers for the auxiliary inequalities.
//! * [`lab`]: command-line plumbing, parameter sweeps and the `verify` driver.

pub mod error;
pub mod exponents;
pub mod field;
pub mod lab;
pub mod oracles;
pub mod problem;
pub mod quadrature;
pub mod semigroup;
pub mod solver;

pub use error::{Error, Result};
pub use exponents::{ExponentReport, Regime};
pub use field::{GridField, GridGeometry};
pub use problem::{ProblemSpec, ProfileSpec};
pub use semigroup::HeatKernelPlan;
pub use solver::{SolverConfig, TrajectoryRecord, Verdict};
