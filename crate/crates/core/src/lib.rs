//! Exact numerical laboratory for the Rankin-Selberg error term
//!
//! `Δ(x) = Σ_{n≤x} c_n − Cx`, where `c_n` are the convolution coefficients built
//! from the squared Ramanujan τ-function, and its short-interval differences
//! `Δ(x+U) − Δ(x)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`coefficients`]: exact sieves for τ(n), c_n, b_n, μ(n), d(n) and the
//!   immutable [`CoefficientTable`].
//! - [`error_terms`]: partial sums, estimation of the mean constant `C`, Δ(x),
//!   the divisor-problem error term Δ₂(x) and the `Σ τ(n)²` law.
//! - [`voronoi`]: the truncated Voronoi-type expansion of Δ(x).
//! - [`short_interval`]: exact continuous and discrete mean squares of
//!   `Δ(x+U) − Δ(x)` and bound envelopes.
//! - [`bounds`]: closed-form exponent formulas, log-log fitting and the
//!   divisor-problem baseline.
//! - [`persist`] and [`export`]: the binary table cache, the text τ import and
//!   deterministic CSV/JSON output.

pub mod bounds;
pub mod coefficients;
pub mod compensated;
mod error;
pub mod error_terms;
pub mod export;
pub mod persist;
pub mod short_interval;
pub mod voronoi;

pub use coefficients::{CoefficientSource, CoefficientTable, SyntheticCoefficients};
pub use error::{Error, Result};

/// Weight of the cusp form Δ(z) = Σ τ(n) qⁿ.
pub const TAU_WEIGHT: u32 = 12;
