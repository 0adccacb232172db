//! Exact coefficient sieves and the immutable [`CoefficientTable`].
//!
//! τ(n) comes from the pentagonal sieve ([`sieve_tau`]) with an independent
//! Eisenstein-series oracle ([`oracle_tau_eisenstein`]) for cross-checking.
//! Everything else in a table (c_n, b_n, μ(n), d(n), prefix sums of c_n) is
//! derived from τ alone.

pub mod arith;
pub mod convolution;
pub mod oracle;
pub mod pentagonal;
pub mod tau;

pub use arith::{sieve_divisor, sieve_mobius};
pub use convolution::{c_exact, compute_b, compute_c, IdentityReport};
pub use oracle::{oracle_tau_eisenstein, oracle_tau_eisenstein_with_limit, DEFAULT_ORACLE_LIMIT};
pub use pentagonal::{pentagonal_euler_product, SparseSeries};
pub use tau::{sieve_tau, sieve_tau_bigint, sieve_tau_with_limit, DEFAULT_SIEVE_LIMIT};

use crate::bounds::{fit_running_max, ExponentFit};
use crate::compensated::PrefixSums;
use crate::{Error, Result, TAU_WEIGHT};

/// Read access to a coefficient sequence `c[1..=n_max]` and its prefix sums.
///
/// Implemented by [`CoefficientTable`] and by [`SyntheticCoefficients`], which
/// lets the analysis code run on hand-made sequences.
pub trait CoefficientSource: Sync {
    fn n_max(&self) -> usize;

    /// `c[0..=n_max]`, with `c[0] = 0`.
    fn coefficients(&self) -> &[f64];

    fn prefix(&self) -> &PrefixSums;

    /// `Σ_{k≤n} c_k`.
    fn partial_sum(&self, n: usize) -> f64 {
        self.prefix().get(n)
    }

    /// `Σ_{a<k≤b} c_k`.
    fn window_sum(&self, a: usize, b: usize) -> f64 {
        self.prefix().diff(a, b)
    }
}

/// An arbitrary real sequence standing in for `c_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCoefficients {
    c: Vec<f64>,
    prefix: PrefixSums,
}

impl SyntheticCoefficients {
    pub fn from_fn(n_max: usize, f: impl Fn(usize) -> f64) -> Self {
        let c: Vec<f64> = (0..=n_max)
            .map(|n| if n == 0 { 0.0 } else { f(n) })
            .collect();
        let prefix = PrefixSums::from_one_based(&c);
        Self { c, prefix }
    }
}

impl CoefficientSource for SyntheticCoefficients {
    fn n_max(&self) -> usize {
        self.c.len() - 1
    }

    fn coefficients(&self) -> &[f64] {
        &self.c
    }

    fn prefix(&self) -> &PrefixSums {
        &self.prefix
    }
}

impl CoefficientSource for CoefficientTable {
    fn n_max(&self) -> usize {
        self.tau.len() - 1
    }

    fn coefficients(&self) -> &[f64] {
        &self.c
    }

    fn prefix(&self) -> &PrefixSums {
        &self.prefix_c
    }
}

/// Exact τ(n) and everything derived from it, for `1 ≤ n ≤ n_max`.
///
/// All arrays are one-based with a zero (or empty-sum) entry at index 0. A
/// built table is never mutated.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    kappa: u32,
    tau: Vec<i128>,
    c: Vec<f64>,
    b: Vec<f64>,
    mobius: Vec<i8>,
    divisors: Vec<u32>,
    prefix_c: PrefixSums,
}

impl CoefficientTable {
    /// Sieve τ up to `n_max` and derive the rest.
    pub fn build(n_max: usize) -> Result<Self> {
        Self::from_tau(sieve_tau(n_max)?, TAU_WEIGHT)
    }

    /// Build from Hecke eigenvalues `a[1..]` (`a[0]` is ignored) of a form of
    /// weight `kappa`.
    pub fn from_tau(mut tau: Vec<i128>, kappa: u32) -> Result<Self> {
        if tau.len() < 2 {
            return Err(Error::invalid("coefficient table needs n_max >= 1"));
        }
        if tau[1] != 1 {
            return Err(Error::invalid(format!(
                "eigenvalues must be normalised with a(1) = 1, got {}",
                tau[1]
            )));
        }
        if kappa < 2 {
            return Err(Error::invalid(format!("weight {kappa} is not supported")));
        }
        tau[0] = 0;
        let n_max = tau.len() - 1;
        let c = compute_c(&tau, kappa);
        let mobius = sieve_mobius(n_max);
        let b = compute_b(&c, &mobius);
        let divisors = sieve_divisor(n_max);
        let prefix_c = PrefixSums::from_one_based(&c);
        Ok(Self {
            kappa,
            tau,
            c,
            b,
            mobius,
            divisors,
            prefix_c,
        })
    }

    pub fn n_max(&self) -> usize {
        self.tau.len() - 1
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn tau(&self) -> &[i128] {
        &self.tau
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn mobius(&self) -> &[i8] {
        &self.mobius
    }

    pub fn divisors(&self) -> &[u32] {
        &self.divisors
    }

    pub fn prefix_c(&self) -> &PrefixSums {
        &self.prefix_c
    }

    /// Largest relative deviation from `τ²n^{1−κ} = Σ_{d²|n} μ(d)c_{n/d²}` over the table.
    pub fn verify_mobius_square_inversion(&self) -> IdentityReport {
        convolution::square_inversion_float(
            &self.tau,
            &self.c,
            &self.mobius,
            self.kappa,
            self.n_max(),
        )
    }

    /// Exact-rational version of [`Self::verify_mobius_square_inversion`] for `n ≤ limit`.
    pub fn verify_mobius_square_inversion_exact(&self, limit: usize) -> IdentityReport {
        let limit = limit.min(self.n_max());
        convolution::square_inversion_exact(&self.tau, &self.mobius, self.kappa, limit)
    }

    pub fn check_multiplicativity(&self, limit: usize) -> IdentityReport {
        convolution::multiplicativity_float(&self.c, limit.min(self.n_max()))
    }

    pub fn check_multiplicativity_exact(&self, limit: usize) -> IdentityReport {
        convolution::multiplicativity_exact(&self.tau, self.kappa, limit.min(self.n_max()))
    }

    pub fn check_dirichlet_division(&self, limit: usize) -> IdentityReport {
        convolution::dirichlet_round_trip(&self.b, &self.c, limit.min(self.n_max()))
    }

    /// Log-log growth of the running maximum `max_{k≤n} c_k` over `n ∈ [from, n_max]`.
    pub fn running_max_growth(&self, from: usize) -> Result<ExponentFit> {
        let from = from.max(1);
        if from >= self.n_max() {
            return Err(Error::invalid(format!(
                "growth window starts at {from} but n_max = {}",
                self.n_max()
            )));
        }
        let mut running = self.c[1..from].iter().copied().fold(0.0f64, f64::max);
        let series = (from..=self.n_max()).map(|n| {
            running = running.max(self.c[n]);
            (n as f64, running)
        });
        fit_running_max(series)
    }
}
