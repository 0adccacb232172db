//! Partial sums and error terms.
//!
//! - `Δ(x) = Σ_{n≤x} c_n − Cx` with `C` estimated from the table.
//! - `Δ₂(x) = Σ_{n≤x} d(n) − x(ln x + 2γ − 1)`, the divisor-problem analogue.
//! - `Σ_{n≤x} τ(n)² ≈ D x^κ`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::bounds::{fit_running_max, ExponentFit};
use crate::coefficients::{sieve_divisor, CoefficientSource};
use crate::{CoefficientTable, Error, Result};

/// Euler's constant to 20 significant digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// Smallest table accepted by [`estimate_c`].
pub const MIN_TABLE_FOR_C: usize = 10_000;

/// Number of geometrically spaced sample points of the least-squares estimator.
pub const LSQ_SAMPLES: usize = 200;
const LSQ_BLOCKS: usize = 4;
const DIFFQUOT_OCTAVES: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    LeastSquares,
    DifferenceQuotient,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::LeastSquares => "least-squares",
            Method::DifferenceQuotient => "difference-quotient",
        })
    }
}

/// Estimate of the mean value `C` of `c_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanConstantEstimate {
    pub value: f64,
    pub method: Method,
    pub sample: String,
    /// Half-width of the spread of the estimate over disjoint subsamples.
    pub uncertainty: f64,
}

impl MeanConstantEstimate {
    /// Whether two estimates agree within the larger of their uncertainties.
    pub fn agrees_with(&self, other: &MeanConstantEstimate) -> bool {
        (self.value - other.value).abs() <= self.uncertainty.max(other.uncertainty)
    }
}

/// One evaluation of Δ(x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorTermSample {
    pub x: f64,
    pub delta: f64,
    /// `delta / x^{3/5}`.
    pub normalized: f64,
}

fn check_x(x: f64, n_max: usize) -> Result<usize> {
    if !(x >= 0.0 && x <= n_max as f64) {
        return Err(Error::OutOfRange {
            what: "x",
            value: x,
            n_max,
        });
    }
    Ok(x.floor() as usize)
}

/// `Σ_{n≤x} c_n`.
pub fn partial_sum_c(x: f64, table: &impl CoefficientSource) -> Result<f64> {
    let n = check_x(x, table.n_max())?;
    Ok(table.partial_sum(n))
}

/// `Δ(x) = Σ_{n≤x} c_n − Cx`.
pub fn delta(x: f64, c: f64, table: &impl CoefficientSource) -> Result<f64> {
    Ok(partial_sum_c(x, table)? - c * x)
}

pub fn error_term_sample(
    x: f64,
    c: f64,
    table: &impl CoefficientSource,
) -> Result<ErrorTermSample> {
    let d = delta(x, c, table)?;
    Ok(ErrorTermSample {
        x,
        delta: d,
        normalized: if x > 0.0 { d / x.powf(0.6) } else { 0.0 },
    })
}

/// Change of Δ(x) when `C` is replaced by `C + shift`.
pub fn delta_sensitivity(x: f64, shift: f64) -> f64 {
    -shift * x
}

pub fn estimate_c(table: &impl CoefficientSource, method: Method) -> Result<MeanConstantEstimate> {
    estimate_c_from_prefix(table.n_max(), |n| table.partial_sum(n), method)
}

/// Both estimators, least squares first.
pub fn estimate_c_both(
    table: &impl CoefficientSource,
) -> Result<(MeanConstantEstimate, MeanConstantEstimate)> {
    Ok((
        estimate_c(table, Method::LeastSquares)?,
        estimate_c(table, Method::DifferenceQuotient)?,
    ))
}

fn estimate_c_from_prefix(
    n_max: usize,
    prefix: impl Fn(usize) -> f64,
    method: Method,
) -> Result<MeanConstantEstimate> {
    if n_max < MIN_TABLE_FOR_C {
        return Err(Error::invalid(format!(
            "estimating C needs n_max >= {MIN_TABLE_FOR_C}, table has {n_max}"
        )));
    }
    match method {
        Method::LeastSquares => {
            let xs = geometric_integers(n_max / 100, n_max, LSQ_SAMPLES);
            let fit = |pts: &[usize]| {
                let (num, den) = pts.iter().fold((0.0, 0.0), |(num, den), &x| {
                    let xf = x as f64;
                    (num + prefix(x) * xf, den + xf * xf)
                });
                num / den
            };
            let value = fit(&xs);
            let block = xs.len().div_ceil(LSQ_BLOCKS);
            let blocks: Vec<f64> = xs.chunks(block).map(fit).collect();
            Ok(MeanConstantEstimate {
                value,
                method,
                sample: format!(
                    "{} geometric points in [{}, {}], {} blocks",
                    xs.len(),
                    xs[0],
                    n_max,
                    blocks.len()
                ),
                uncertainty: half_spread(&blocks),
            })
        }
        Method::DifferenceQuotient => {
            let quotients: Vec<f64> = (1..=DIFFQUOT_OCTAVES)
                .map(|j| {
                    let n = n_max >> j;
                    (prefix(2 * n) - prefix(n)) / n as f64
                })
                .collect();
            let value = quotients.iter().sum::<f64>() / quotients.len() as f64;
            Ok(MeanConstantEstimate {
                value,
                method,
                sample: format!("top {DIFFQUOT_OCTAVES} octaves below {n_max}"),
                uncertainty: half_spread(&quotients),
            })
        }
    }
}

fn half_spread(values: &[f64]) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / 2.0
}

/// Up to `count` distinct integers spaced geometrically in `[lo, hi]`.
fn geometric_integers(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let lo = lo.max(1);
    let ratio = (hi as f64 / lo as f64).ln();
    let mut xs: Vec<usize> = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            ((lo as f64) * (ratio * t).exp()).round() as usize
        })
        .map(|x| x.clamp(lo, hi))
        .collect();
    xs.dedup();
    xs
}

/// Result of scanning `|Δ(x)|/x^{3/5}` over a range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub from: usize,
    pub to: usize,
    pub max_ratio: f64,
    pub argmax: f64,
    /// Log-log slope of the running maximum of the ratio.
    pub growth: ExponentFit,
}

/// Scans `|Δ(x)|/x^{3/5}` over `x ∈ [from, n_max]`.
///
/// Δ is linear between integers, so extremes occur at an integer `n`, either
/// at `Δ(n)` or at the left limit `Δ(n⁻) = S(n−1) − Cn`; both are examined.
pub fn rankin_selberg_envelope(
    table: &impl CoefficientSource,
    c: f64,
    from: usize,
) -> Result<EnvelopeReport> {
    let n_max = table.n_max();
    if from < 2 || from >= n_max {
        return Err(Error::invalid(format!(
            "envelope scan needs 2 <= from < n_max, got from = {from}, n_max = {n_max}"
        )));
    }
    let mut running = 0.0f64;
    let mut argmax = from as f64;
    let mut series = Vec::with_capacity(n_max - from + 1);
    for n in from..=n_max {
        let x = n as f64;
        let scale = x.powf(0.6);
        let right = (table.partial_sum(n) - c * x).abs();
        let left = (table.partial_sum(n - 1) - c * x).abs();
        let r = right.max(left) / scale;
        if r > running {
            running = r;
            argmax = x;
        }
        series.push((x, running));
    }
    Ok(EnvelopeReport {
        from,
        to: n_max,
        max_ratio: running,
        argmax,
        growth: fit_running_max(series)?,
    })
}

/// `Σ_{n≤x} τ(n)²` (exact, reported as `f64`) and `D = value / x^κ`.
pub fn sum_a_squared(x: f64, table: &CoefficientTable) -> Result<(f64, f64)> {
    let n = check_x(x, table.n_max())?;
    let mut acc = BigInt::zero();
    for &t in &table.tau()[1..=n] {
        let t = BigInt::from(t);
        acc += &t * &t;
    }
    let value = acc.to_f64().unwrap_or(f64::INFINITY);
    let d = if x > 0.0 {
        value / x.powi(table.kappa() as i32)
    } else {
        0.0
    };
    Ok((value, d))
}

/// Prefix sums of the divisor function.
#[derive(Debug, Clone)]
pub struct DivisorSummatory {
    prefix: Vec<u64>,
}

impl DivisorSummatory {
    pub fn new(n_max: usize) -> Self {
        let d = sieve_divisor(n_max);
        let mut prefix = Vec::with_capacity(n_max + 1);
        let mut s = 0u64;
        for &v in &d {
            s += v as u64;
            prefix.push(s);
        }
        Self { prefix }
    }

    pub fn n_max(&self) -> usize {
        self.prefix.len() - 1
    }

    /// `Σ_{k≤n} d(k)`.
    pub fn sum_to(&self, n: usize) -> u64 {
        self.prefix[n]
    }

    /// `Δ₂(x) = Σ_{n≤x} d(n) − x(ln x + 2γ − 1)`.
    pub fn delta2(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0 && x <= self.n_max() as f64) {
            return Err(Error::OutOfRange {
                what: "x",
                value: x,
                n_max: self.n_max(),
            });
        }
        let n = x.floor() as usize;
        Ok(self.prefix[n] as f64 - x * (x.ln() + 2.0 * EULER_GAMMA - 1.0))
    }
}
