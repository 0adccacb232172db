//! Short-interval mean squares of `Δ(x+U) − Δ(x) = Σ_{x<n≤x+U} c_n − CU`.
//!
//! The window is piecewise constant in `x`: it only changes when `x` or `x+U`
//! crosses an integer. On a unit cell `[m, m+1)` with `g = ⌈U⌉ − U` this gives
//! two pieces, `[m, m+g)` where the window counts `m < n ≤ m + ⌊U⌋` and
//! `[m+g, m+1)` where it counts `m < n ≤ m + ⌈U⌉`. The continuous integral is
//! therefore an exact finite sum; for integer `U` the first piece vanishes and
//! the integral coincides with the shifted discrete sum over `X ≤ m ≤ 2X−1`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{beta_of_mu, theorem1_exponents};
use crate::coefficients::CoefficientSource;
use crate::compensated::NeumaierSum;
use crate::{Error, Result};

/// `Δ(m+U) − Δ(m)`.
pub fn window_diff(m: f64, u: f64, c: f64, table: &impl CoefficientSource) -> Result<f64> {
    if m.is_nan() || m < 0.0 || !u.is_finite() || u < 0.0 {
        return Err(Error::invalid(format!(
            "window needs m >= 0 and U >= 0, got m = {m}, U = {u}"
        )));
    }
    let top = m + u;
    if top > table.n_max() as f64 {
        return Err(Error::OutOfRange {
            what: "m + U",
            value: top,
            n_max: table.n_max(),
        });
    }
    Ok(table.window_sum(m.floor() as usize, top.floor() as usize) - c * u)
}

fn check_window(x: u64, u: f64, n_max: usize) -> Result<()> {
    if !u.is_finite() || u < 0.0 {
        return Err(Error::invalid(format!(
            "U must be finite and >= 0, got {u}"
        )));
    }
    if x == 0 {
        return Err(Error::invalid("X must be >= 1"));
    }
    let needed = (2 * x) as f64 + u;
    if needed.floor() > n_max as f64 {
        return Err(Error::WindowOutOfRange {
            x,
            u,
            needed: needed.floor() as u64,
            n_max,
        });
    }
    Ok(())
}

/// Continuous integral together with the number of breakpoints in `[X, 2X)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousMeanSquare {
    pub value: f64,
    pub breakpoints: u64,
}

/// `∫_X^{2X} (Δ(x+U) − Δ(x))² dx`, exactly (up to accumulation).
pub fn mean_square_continuous(
    x: u64,
    u: f64,
    c: f64,
    table: &impl CoefficientSource,
) -> Result<f64> {
    Ok(mean_square_continuous_detail(x, u, c, table)?.value)
}

pub fn mean_square_continuous_detail(
    x: u64,
    u: f64,
    c: f64,
    table: &impl CoefficientSource,
) -> Result<ContinuousMeanSquare> {
    check_window(x, u, table.n_max())?;
    if u == 0.0 {
        return Ok(ContinuousMeanSquare {
            value: 0.0,
            breakpoints: x,
        });
    }
    let lo = u.floor() as usize;
    let hi = u.ceil() as usize;
    // length of the piece [m, m+g) on which x+U has not yet crossed m + ⌈U⌉
    let g = hi as f64 - u;
    let cu = c * u;
    let mut acc = NeumaierSum::new();
    for m in x as usize..2 * x as usize {
        let w_hi = table.window_sum(m, m + hi) - cu;
        if g > 0.0 {
            let w_lo = table.window_sum(m, m + lo) - cu;
            acc.add(g * w_lo * w_lo);
            acc.add((1.0 - g) * w_hi * w_hi);
        } else {
            acc.add(w_hi * w_hi);
        }
    }
    Ok(ContinuousMeanSquare {
        value: acc.value(),
        breakpoints: if g > 0.0 { 2 * x } else { x },
    })
}

/// Discrete sums `(Σ_{X<n≤2X} w(n)², Σ_{X≤m≤2X−1} w(m)²)` with `w(n) = Δ(n+U) − Δ(n)`.
pub fn mean_square_discrete(
    x: u64,
    u: f64,
    c: f64,
    table: &impl CoefficientSource,
) -> Result<(f64, f64)> {
    check_window(x, u, table.n_max())?;
    if u == 0.0 {
        return Ok((0.0, 0.0));
    }
    let span = u.floor() as usize;
    let cu = c * u;
    let w = |n: usize| table.window_sum(n, n + span) - cu;
    let x = x as usize;
    let inner: NeumaierSum = (x + 1..2 * x).map(|n| w(n).powi(2)).collect();
    let first = w(x).powi(2);
    let last = w(2 * x).powi(2);
    let mut discrete = inner;
    discrete.add(last);
    let mut shifted = inner;
    shifted.add(first);
    Ok((discrete.value(), shifted.value()))
}

/// Largest `|Δ(m+U) − Δ(m)|` over integers `X ≤ m ≤ 2X`, on either piece of the cell.
pub fn max_window(x: u64, u: f64, c: f64, table: &impl CoefficientSource) -> Result<f64> {
    check_window(x, u, table.n_max())?;
    let lo = u.floor() as usize;
    let hi = u.ceil() as usize;
    let cu = c * u;
    let mut best = 0.0f64;
    for m in x as usize..=2 * x as usize {
        best = best.max((table.window_sum(m, m + lo) - cu).abs());
        if hi + m <= table.n_max() {
            best = best.max((table.window_sum(m, m + hi) - cu).abs());
        }
    }
    Ok(best)
}

/// `min(X^{1+2β}, X·U²)`, with the ε-powers left to the fitted constant.
pub fn trivial_envelope(x: f64, u: f64, beta: f64) -> f64 {
    x.powf(1.0 + 2.0 * beta).min(x * u * u)
}

/// `X^α U^γ` with `(α, γ)` the exponents of the mean-square bound at `μ`.
pub fn theorem1_envelope(x: f64, u: f64, mu: f64) -> Result<f64> {
    let (a, g) = theorem1_exponents(mu)?;
    Ok(x.powf(a) * u.powf(g))
}

/// `X·U^{4/3}`, the shape of the bound conditional on the Lindelöf hypothesis
/// for the Rankin-Selberg zeta-function.
pub fn lindelof_z_envelope(x: f64, u: f64) -> f64 {
    x * u.powf(4.0 / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum EnvelopeKind {
    Trivial,
    Theorem1,
    LindelofZ,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 3] = [
        EnvelopeKind::Trivial,
        EnvelopeKind::Theorem1,
        EnvelopeKind::LindelofZ,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EnvelopeKind::Trivial => "trivial",
            EnvelopeKind::Theorem1 => "theorem1",
            EnvelopeKind::LindelofZ => "lindelofZ",
        }
    }
}

/// Unscaled values of the three envelopes at one `(X, U)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeValues {
    pub trivial: f64,
    pub theorem1: f64,
    pub lindelof_z: f64,
}

impl EnvelopeValues {
    pub fn at(x: f64, u: f64, mu: f64) -> Result<Self> {
        Ok(Self {
            trivial: trivial_envelope(x, u, beta_of_mu(mu)?),
            theorem1: theorem1_envelope(x, u, mu)?,
            lindelof_z: lindelof_z_envelope(x, u),
        })
    }

    pub fn get(&self, kind: EnvelopeKind) -> f64 {
        match kind {
            EnvelopeKind::Trivial => self.trivial,
            EnvelopeKind::Theorem1 => self.theorem1,
            EnvelopeKind::LindelofZ => self.lindelof_z,
        }
    }
}

/// A bound shape `K₀·X^α·U^γ` (capped at `K₀·X^{cap}` for the trivial bound).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEnvelope {
    pub kind: EnvelopeKind,
    pub alpha: f64,
    pub gamma: f64,
    pub cap_exponent: Option<f64>,
    /// Largest measured/shape ratio among the fitted cells.
    pub k0: f64,
}

impl BoundEnvelope {
    pub fn shape(kind: EnvelopeKind, mu: f64) -> Result<Self> {
        let (alpha, gamma, cap_exponent) = match kind {
            EnvelopeKind::Trivial => (1.0, 2.0, Some(1.0 + 2.0 * beta_of_mu(mu)?)),
            EnvelopeKind::Theorem1 => {
                let (a, g) = theorem1_exponents(mu)?;
                (a, g, None)
            }
            EnvelopeKind::LindelofZ => (1.0, 4.0 / 3.0, None),
        };
        Ok(Self {
            kind,
            alpha,
            gamma,
            cap_exponent,
            k0: 1.0,
        })
    }

    pub fn shape_at(&self, x: f64, u: f64) -> f64 {
        let v = x.powf(self.alpha) * u.powf(self.gamma);
        match self.cap_exponent {
            Some(cap) => v.min(x.powf(cap)),
            None => v,
        }
    }

    pub fn evaluate(&self, x: f64, u: f64) -> f64 {
        self.k0 * self.shape_at(x, u)
    }

    /// `measured / shape ≤ K₀`, the comparison used when fitting `K₀`.
    pub fn covers(&self, cell: &IntervalMeanSquare) -> bool {
        cell.continuous / self.shape_at(cell.x as f64, cell.u) <= self.k0
    }

    /// Sets `K₀` to the largest `measured / shape` over the cells.
    pub fn fit(kind: EnvelopeKind, mu: f64, cells: &[IntervalMeanSquare]) -> Result<Self> {
        let mut env = Self::shape(kind, mu)?;
        env.k0 = cells
            .iter()
            .map(|cell| cell.continuous / env.shape_at(cell.x as f64, cell.u))
            .fold(0.0, f64::max);
        Ok(env)
    }
}

/// One `(X, U)` cell of the short-interval analysis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalMeanSquare {
    pub x: u64,
    /// `ln U / ln X`.
    pub u_exp: f64,
    pub u: f64,
    pub continuous: f64,
    pub discrete: f64,
    pub shifted_discrete: f64,
    pub breakpoints: u64,
    pub max_window: f64,
    /// `max |window| / √U`, an exploratory statistic with no asserted bound.
    pub jutila_ratio: f64,
    pub envelopes: EnvelopeValues,
}

impl IntervalMeanSquare {
    pub fn ratio(&self, kind: EnvelopeKind) -> f64 {
        self.continuous / self.envelopes.get(kind)
    }
}

pub fn interval_mean_square(
    x: u64,
    u: f64,
    c: f64,
    mu: f64,
    table: &impl CoefficientSource,
) -> Result<IntervalMeanSquare> {
    let cont = mean_square_continuous_detail(x, u, c, table)?;
    let (discrete, shifted_discrete) = mean_square_discrete(x, u, c, table)?;
    let max_w = max_window(x, u, c, table)?;
    let xf = x as f64;
    Ok(IntervalMeanSquare {
        x,
        u_exp: if x > 1 && u > 0.0 {
            u.ln() / xf.ln()
        } else {
            0.0
        },
        u,
        continuous: cont.value,
        discrete,
        shifted_discrete,
        breakpoints: cont.breakpoints,
        max_window: max_w,
        jutila_ratio: if u > 0.0 { max_w / u.sqrt() } else { 0.0 },
        envelopes: EnvelopeValues::at(xf, u.max(1.0), mu)?,
    })
}

/// A sweep cell that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedCell {
    pub x: u64,
    pub u_exp: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub mu: f64,
    pub cells: Vec<IntervalMeanSquare>,
    pub skipped: Vec<SkippedCell>,
    /// Envelopes with `K₀` fitted over all cells, in [`EnvelopeKind::ALL`] order.
    pub envelopes: Vec<BoundEnvelope>,
}

impl SweepReport {
    /// `K₀` fitted separately on each `X` row, in grid order.
    pub fn k0_by_x(&self, kind: EnvelopeKind) -> Result<Vec<(u64, f64)>> {
        let mut xs: Vec<u64> = Vec::new();
        for cell in &self.cells {
            if !xs.contains(&cell.x) {
                xs.push(cell.x);
            }
        }
        xs.into_iter()
            .map(|x| {
                let row: Vec<IntervalMeanSquare> =
                    self.cells.iter().filter(|c| c.x == x).cloned().collect();
                Ok((x, BoundEnvelope::fit(kind, self.mu, &row)?.k0))
            })
            .collect()
    }

    pub fn envelope(&self, kind: EnvelopeKind) -> &BoundEnvelope {
        self.envelopes
            .iter()
            .find(|e| e.kind == kind)
            .expect("all envelope kinds are fitted")
    }
}

/// Evaluates every `(X, U = X^u)` cell; rows are X-major in grid order.
/// Cells that do not fit in the table are skipped and reported.
pub fn sweep(
    x_grid: &[u64],
    u_grid: &[f64],
    c: f64,
    mu: f64,
    table: &impl CoefficientSource,
) -> Result<SweepReport> {
    if x_grid.is_empty() || u_grid.is_empty() {
        return Err(Error::invalid("sweep needs nonempty X and u grids"));
    }
    beta_of_mu(mu)?;
    let grid: Vec<(u64, f64)> = x_grid
        .iter()
        .flat_map(|&x| u_grid.iter().map(move |&u| (x, u)))
        .collect();
    let results: Vec<(u64, f64, Result<IntervalMeanSquare>)> = grid
        .par_iter()
        .map(|&(x, u_exp)| {
            let u = (x as f64).powf(u_exp);
            let cell = interval_mean_square(x, u, c, mu, table).map(|mut cell| {
                cell.u_exp = u_exp;
                cell
            });
            (x, u_exp, cell)
        })
        .collect();
    let mut cells = Vec::new();
    let mut skipped = Vec::new();
    for (x, u_exp, r) in results {
        match r {
            Ok(cell) => cells.push(cell),
            Err(e) => skipped.push(SkippedCell {
                x,
                u_exp,
                reason: e.to_string(),
            }),
        }
    }
    let envelopes = EnvelopeKind::ALL
        .iter()
        .map(|&k| BoundEnvelope::fit(k, mu, &cells))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        mu,
        cells,
        skipped,
        envelopes,
    })
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
