//! Truncated Voronoi-type expansion
//!
//! ```text
//! Δ(x) ≈ (x^{3/8} / 2π) Σ_{k≤K} c_k k^{−5/8} sin(8π(kx)^{1/4} + 3π/4)
//! ```
//!
//! and measurement of its truncation error against the exact Δ(x).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{fit_exponent, ExponentFit};
use crate::coefficients::CoefficientSource;
use crate::compensated::NeumaierSum;
use crate::error_terms::delta;
use crate::{Error, Result};

/// Jittered points averaged per grid point in [`truncation_scan`].
pub const JITTER_POINTS: usize = 100;
/// Relative width of the jitter window `[x, x(1 + width)]`.
pub const JITTER_WIDTH: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VoronoiEvaluation {
    pub x: f64,
    pub k: usize,
    pub value: f64,
    pub exact_delta: f64,
    pub abs_error: f64,
}

fn check_args(x: f64, k: usize, n_max: usize) -> Result<()> {
    if !x.is_finite() || x < 1.0 {
        return Err(Error::invalid(format!(
            "Voronoi expansion needs x >= 1, got {x}"
        )));
    }
    if k == 0 || k > n_max {
        return Err(Error::invalid(format!(
            "truncation K = {k} outside 1..={n_max} (coefficients unavailable)"
        )));
    }
    Ok(())
}

/// `x^{3/8} / 2π`.
pub fn prefactor(x: f64) -> f64 {
    x.powf(0.375) / (2.0 * PI)
}

/// The k-th term without the prefactor: `c_k k^{−5/8} sin(8π(kx)^{1/4} + 3π/4)`.
#[inline]
pub fn term(x: f64, k: usize, ck: f64) -> f64 {
    if ck == 0.0 {
        return 0.0;
    }
    let kf = k as f64;
    let root4 = (kf * x).sqrt().sqrt();
    // phase measured in turns: 8π r + 3π/4 = 2π (4r + 3/8)
    let turns = (4.0 * root4 + 0.375).fract();
    ck * kf.powf(-0.625) * (2.0 * PI * turns).sin()
}

/// Terms `1..=K` (without the prefactor) in summation order.
pub fn voronoi_terms(x: f64, k: usize, table: &impl CoefficientSource) -> Result<Vec<f64>> {
    check_args(x, k, table.n_max())?;
    let c = table.coefficients();
    Ok((1..=k).map(|j| term(x, j, c[j])).collect())
}

/// The truncated expansion with `K` terms, summed in ascending `k`.
pub fn voronoi_delta(x: f64, k: usize, table: &impl CoefficientSource) -> Result<f64> {
    check_args(x, k, table.n_max())?;
    voronoi_partial(x, 0, k, table)
}

/// Contribution of the terms `from < k ≤ to`, prefactor included.
pub fn voronoi_partial(
    x: f64,
    from: usize,
    to: usize,
    table: &impl CoefficientSource,
) -> Result<f64> {
    check_args(x, to.max(1), table.n_max())?;
    let c = table.coefficients();
    let sum: NeumaierSum = (from + 1..=to).map(|j| term(x, j, c[j])).collect();
    Ok(prefactor(x) * sum.value())
}

pub fn evaluate(
    x: f64,
    k: usize,
    c: f64,
    table: &impl CoefficientSource,
) -> Result<VoronoiEvaluation> {
    let value = voronoi_delta(x, k, table)?;
    let exact_delta = delta(x, c, table)?;
    Ok(VoronoiEvaluation {
        x,
        k,
        value,
        exact_delta,
        abs_error: (value - exact_delta).abs(),
    })
}

/// Jitter-averaged truncation error at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationFit {
    pub x: f64,
    pub ks: Vec<usize>,
    pub mean_abs_error: Vec<f64>,
    /// Slope and intercept of `ln(mean |error|)` against `ln K`.
    pub fit: ExponentFit,
}

/// Points `x(1 + width·(j + ½)/count)`, `j = 0..count`.
pub fn jitter_points(x: f64) -> Vec<f64> {
    (0..JITTER_POINTS)
        .map(|j| x * (1.0 + JITTER_WIDTH * (j as f64 + 0.5) / JITTER_POINTS as f64))
        .collect()
}

/// For every `x` in `x_grid`, averages `|voronoi_delta(x', K) − Δ(x')|` over the
/// jittered points near `x` and fits the decay in `K`.
pub fn truncation_scan(
    x_grid: &[f64],
    k_grid: &[usize],
    table: &impl CoefficientSource,
    c: f64,
) -> Result<Vec<TruncationFit>> {
    if x_grid.is_empty() || k_grid.is_empty() {
        return Err(Error::invalid("truncation scan needs nonempty grids"));
    }
    let mut ks = k_grid.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let k_max = *ks.last().expect("nonempty");
    for &x in x_grid {
        check_args(x, k_max, table.n_max())?;
        let top = x * (1.0 + JITTER_WIDTH);
        if top > table.n_max() as f64 {
            return Err(Error::OutOfRange {
                what: "jittered x",
                value: top,
                n_max: table.n_max(),
            });
        }
    }
    x_grid
        .par_iter()
        .map(|&x| scan_one(x, &ks, table, c))
        .collect()
}

fn scan_one(x: f64, ks: &[usize], table: &impl CoefficientSource, c: f64) -> Result<TruncationFit> {
    let coeffs = table.coefficients();
    let mut totals = vec![0.0f64; ks.len()];
    for xj in jitter_points(x) {
        let exact = delta(xj, c, table)?;
        let pre = prefactor(xj);
        let mut acc = NeumaierSum::new();
        let mut next = 0usize;
        for (k, &ck) in coeffs.iter().enumerate().take(ks[ks.len() - 1] + 1).skip(1) {
            acc.add(term(xj, k, ck));
            if k == ks[next] {
                totals[next] += (pre * acc.value() - exact).abs();
                next += 1;
            }
        }
    }
    let mean_abs_error: Vec<f64> = totals.iter().map(|t| t / JITTER_POINTS as f64).collect();
    let points: Vec<(f64, f64)> = ks
        .iter()
        .zip(&mean_abs_error)
        .map(|(&k, &e)| (k as f64, e))
        .collect();
    Ok(TruncationFit {
        x,
        ks: ks.to_vec(),
        mean_abs_error,
        fit: fit_exponent(&points)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::SyntheticCoefficients;
    use crate::CoefficientTable;
    use once_cell::sync::Lazy;

    static TABLE: Lazy<CoefficientTable> = Lazy::new(|| CoefficientTable::build(12_000).unwrap());

    #[test]
    fn single_term_at_one() {
        let v = voronoi_delta(1.0, 1, &*TABLE).unwrap();
        let want = 2f64.sqrt() / (4.0 * PI);
        assert!((v - want).abs() < 1e-15, "{v} vs {want}");
        assert!((v - 0.112_539_539_519_638_26).abs() < 1e-15);
    }

    #[test]
    fn zero_coefficients_give_zero() {
        let s = SyntheticCoefficients::from_fn(500, |_| 0.0);
        assert_eq!(voronoi_delta(123.4, 500, &s).unwrap(), 0.0);
    }

    #[test]
    fn argument_errors() {
        assert!(voronoi_delta(10.0, 0, &*TABLE).is_err());
        assert!(voronoi_delta(10.0, 12_001, &*TABLE).is_err());
        assert!(voronoi_delta(0.5, 3, &*TABLE).is_err());
    }

    #[test]
    fn terms_are_prefix_stable_and_additive() {
        let t = &*TABLE;
        let x = 5432.1;
        let short = voronoi_terms(x, 100, t).unwrap();
        let long = voronoi_terms(x, 900, t).unwrap();
        assert!(short
            .iter()
            .zip(&long)
            .all(|(a, b)| a.to_bits() == b.to_bits()));
        let diff = voronoi_delta(x, 900, t).unwrap() - voronoi_delta(x, 100, t).unwrap();
        let part = voronoi_partial(x, 100, 900, t).unwrap();
        let scale: f64 = prefactor(x) * long.iter().map(|v| v.abs()).sum::<f64>();
        assert!((diff - part).abs() <= 1e-14 * scale);
    }

    #[test]
    fn term_magnitude_envelope() {
        let t = &*TABLE;
        let x = 777.0;
        for (i, v) in voronoi_terms(x, 2000, t).unwrap().iter().enumerate() {
            let k = i + 1;
            assert!(v.abs() <= t.c()[k] * (k as f64).powf(-0.625) * (1.0 + 1e-15));
        }
    }

    #[test]
    fn single_coefficient_gives_flat_error() {
        let s = SyntheticCoefficients::from_fn(20_000, |n| if n == 1 { 1.0 } else { 0.0 });
        let scan = truncation_scan(&[1000.0], &[1, 4, 16, 64], &s, 0.0).unwrap();
        let errs = &scan[0].mean_abs_error;
        assert!(errs.iter().all(|e| (e - errs[0]).abs() <= 1e-12 * errs[0]));
        assert!(scan[0].fit.slope.abs() < 1e-12);
    }

    #[test]
    fn scan_rejects_bad_grids() {
        let t = &*TABLE;
        assert!(truncation_scan(&[], &[16], t, 0.5).is_err());
        assert!(truncation_scan(&[1000.0], &[], t, 0.5).is_err());
        assert!(truncation_scan(&[11_990.0], &[16, 32, 64], t, 0.5).is_err());
    }
}
