//! Closed-form exponents of the mean-square bounds, log-log exponent fitting
//! and the divisor-problem baseline.
//!
//! Every exponent is an exact rational function of `μ = μ(½)`, the value of the
//! Lindelöf function on the critical line. `μ` is an input: 0 under the
//! Lindelöf hypothesis, [`MU_HUXLEY`] for the best known bound.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::compensated::NeumaierSum;
use crate::error_terms::{DivisorSummatory, EULER_GAMMA};
use crate::{Error, Result};

/// Huxley's bound μ(½) ≤ 32/205.
pub const MU_HUXLEY: f64 = 32.0 / 205.0;

/// Leading constant `8/π²` of the divisor-problem short-interval mean square.
pub const DIVISOR_LEADING_TARGET: f64 = 8.0 / (std::f64::consts::PI * std::f64::consts::PI);

fn check_mu(mu: f64) -> Result<()> {
    if !(0.0..0.5).contains(&mu) {
        return Err(Error::invalid(format!("mu = {mu} must lie in [0, 1/2)")));
    }
    Ok(())
}

/// μ(½) together with the derived mean-square exponent β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LindelofParams {
    pub mu_half: f64,
    pub beta: f64,
}

impl LindelofParams {
    pub fn new(mu_half: f64) -> Result<Self> {
        Ok(Self {
            mu_half,
            beta: beta_of_mu(mu_half)?,
        })
    }

    /// μ(½) = 0.
    pub fn lindelof() -> Self {
        Self {
            mu_half: 0.0,
            beta: 0.4,
        }
    }
}

/// `β = 2 / (5 − 4μ)`, the exponent in `∫_0^X Δ² ≪ X^{1+2β+ε}`.
pub fn beta_of_mu(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok(2.0 / (5.0 - 4.0 * mu))
}

/// `(α, γ) = ((9 + 12μ)/(7 + 4μ), 8/(7 + 4μ))` of the bound `X^α U^γ`.
pub fn theorem1_exponents(mu: f64) -> Result<(f64, f64)> {
    check_mu(mu)?;
    let den = 7.0 + 4.0 * mu;
    Ok(((9.0 + 12.0 * mu) / den, 8.0 / den))
}

/// Range `X^{u_low} ≤ U ≤ X^{u_high}` where `X^α U^γ` beats the trivial bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImprovementRange {
    pub u_low: f64,
    pub u_high: f64,
    pub nonempty: bool,
}

pub fn improvement_range(mu: f64) -> Result<ImprovementRange> {
    check_mu(mu)?;
    let u_low = (1.0 + 4.0 * mu) / (3.0 + 4.0 * mu);
    let u_high = (16.0 * mu * mu - 8.0 * mu + 9.0) / (20.0 - 16.0 * mu);
    Ok(ImprovementRange {
        u_low,
        u_high,
        nonempty: u_low < u_high,
    })
}

/// The truncation height that balances the two terms of the mean-square
/// estimate, `T = X^{3/(7/2+2μ)} U^{−2/(7/2+2μ)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalT {
    pub t: f64,
    /// `1 ≤ T ≤ X`.
    pub admissible: bool,
}

pub fn optimal_t(x: f64, u: f64, mu: f64) -> Result<OptimalT> {
    check_mu(mu)?;
    if !(u >= 1.0 && u <= x) {
        return Err(Error::invalid(format!(
            "need 1 <= U <= X, got X = {x}, U = {u}"
        )));
    }
    let den = 3.5 + 2.0 * mu;
    let t = x.powf(3.0 / den) * u.powf(-2.0 / den);
    Ok(OptimalT {
        t,
        admissible: (1.0..=x).contains(&t),
    })
}

/// Ordinary least squares of `ln value` on `ln scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    /// Standard error of the slope; zero for an exact fit.
    pub slope_stderr: f64,
    pub points: usize,
}

impl ExponentFit {
    /// `exp(intercept) · scale^slope`.
    pub fn predict(&self, scale: f64) -> f64 {
        (self.intercept + self.slope * scale.ln()).exp()
    }
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "exponent fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(s, v)) = points.iter().find(|(s, v)| !(*s > 0.0 && *v > 0.0)) {
        return Err(Error::invalid(format!(
            "exponent fit needs positive data, got ({s}, {v})"
        )));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(s, v)| (s.ln(), v.ln())).collect();
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid(
            "exponent fit needs at least two distinct scales",
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual_rms: (ssr / n).sqrt(),
        slope_stderr: (ssr / (n - 2.0) / sxx).sqrt(),
        points: points.len(),
    })
}

/// Number of geometrically spaced samples used by [`fit_running_max`].
pub const GROWTH_SAMPLES: usize = 200;

/// Fits the log-log slope of a (running-maximum) series sampled at
/// [`GROWTH_SAMPLES`] geometrically spaced scales, so every scale weighs the same.
pub fn fit_running_max(series: impl IntoIterator<Item = (f64, f64)>) -> Result<ExponentFit> {
    let all: Vec<(f64, f64)> = series.into_iter().collect();
    fit_exponent(&geometric_subsample(&all, GROWTH_SAMPLES))
}

/// Picks up to `count` points whose scales are closest to a geometric grid
/// between the first and last scale. Input must be sorted by scale.
pub fn geometric_subsample(points: &[(f64, f64)], count: usize) -> Vec<(f64, f64)> {
    if points.len() <= count || count < 2 {
        return points.to_vec();
    }
    let lo = points[0].0.ln();
    let hi = points[points.len() - 1].0.ln();
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(count);
    let mut idx = 0usize;
    for i in 0..count {
        let target = lo + (hi - lo) * i as f64 / (count - 1) as f64;
        while idx + 1 < points.len() && points[idx + 1].0.ln() <= target {
            idx += 1;
        }
        if out.last().is_none_or(|p| p.0 < points[idx].0) {
            out.push(points[idx]);
        }
    }
    out
}

/// Cubic fit `M₂(X,U)/(XU) ≈ Σ_j c_j Lʲ`, `L = ln(√X/U)`, of the divisor-problem
/// short-interval mean square.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisorBaseline {
    pub x: u64,
    /// `(U, L, M₂/(XU))` per sample.
    pub samples: Vec<(u64, f64, f64)>,
    /// `c_0, c_1, c_2, c_3`.
    pub coefficients: [f64; 4],
    pub leading: f64,
    pub target: f64,
    pub relative_error: f64,
}

/// `Σ_{X≤m≤2X−1} (Δ₂(m+U) − Δ₂(m))²`.
pub fn divisor_window_mean_square(x: u64, u: u64, divisors: &DivisorSummatory) -> Result<f64> {
    let needed = 2 * x - 1 + u;
    if needed as usize > divisors.n_max() {
        return Err(Error::WindowOutOfRange {
            x,
            u: u as f64,
            needed,
            n_max: divisors.n_max(),
        });
    }
    let uf = u as f64;
    let shift = 2.0 * EULER_GAMMA - 1.0;
    let mut acc = NeumaierSum::new();
    for m in x..2 * x {
        let mf = m as f64;
        let count = (divisors.sum_to(m as usize + u as usize) - divisors.sum_to(m as usize)) as f64;
        // (m+U)(ln(m+U) + 2γ − 1) − m(ln m + 2γ − 1), without cancellation
        let main = uf * ((mf + uf).ln() + shift) + mf * (uf / mf).ln_1p();
        let w = count - main;
        acc.add(w * w);
    }
    Ok(acc.value())
}

pub fn divisor_leading_coefficient(
    x: u64,
    us: &[u64],
    divisors: &DivisorSummatory,
) -> Result<DivisorBaseline> {
    let mut distinct = us.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::invalid(format!(
            "cubic fit needs at least 4 distinct U values, got {}",
            distinct.len()
        )));
    }
    let half_root = (x as f64).sqrt() / 2.0;
    if let Some(&bad) = us.iter().find(|&&u| u == 0 || u as f64 > half_root) {
        return Err(Error::invalid(format!(
            "U = {bad} outside 1 <= U <= sqrt(X)/2 = {half_root}"
        )));
    }
    let mut samples = Vec::with_capacity(us.len());
    for &u in us {
        let m2 = divisor_window_mean_square(x, u, divisors)?;
        let l = ((x as f64).sqrt() / u as f64).ln();
        samples.push((u, l, m2 / (x as f64 * u as f64)));
    }
    let coefficients =
        cubic_least_squares(&samples.iter().map(|s| (s.1, s.2)).collect::<Vec<_>>())?;
    let leading = coefficients[3];
    Ok(DivisorBaseline {
        x,
        samples,
        coefficients,
        leading,
        target: DIVISOR_LEADING_TARGET,
        relative_error: (leading - DIVISOR_LEADING_TARGET).abs() / DIVISOR_LEADING_TARGET,
    })
}

fn cubic_least_squares(points: &[(f64, f64)]) -> Result<[f64; 4]> {
    let design = DMatrix::from_fn(points.len(), 4, |i, j| points[i].0.powi(j as i32));
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let svd = design.svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::invalid(format!("cubic fit failed: {e}")))?;
    Ok([sol[0], sol[1], sol[2], sol[3]])
}
