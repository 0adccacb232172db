use num_bigint::BigInt;
use num_traits::{One, Zero};

/// A truncated power series `Σ aₑ xᵉ` with only the nonzero terms stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseSeries {
    terms: Vec<(usize, BigInt)>,
    degree_bound: usize,
}

impl SparseSeries {
    /// Builds a series, dropping zero coefficients. Exponents must be strictly
    /// increasing and not exceed `degree_bound`.
    pub fn new(terms: Vec<(usize, BigInt)>, degree_bound: usize) -> Option<Self> {
        let increasing = terms.windows(2).all(|w| w[0].0 < w[1].0);
        let bounded = terms.last().is_none_or(|(e, _)| *e <= degree_bound);
        if !increasing || !bounded {
            return None;
        }
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Some(Self {
            terms,
            degree_bound,
        })
    }

    pub fn terms(&self) -> &[(usize, BigInt)] {
        &self.terms
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponent: usize) -> BigInt {
        self.terms
            .binary_search_by_key(&exponent, |(e, _)| *e)
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }
}

/// `∏_{k≥1} (1 − xᵏ)` truncated to degree `degree_bound`.
///
/// By Euler's pentagonal number theorem the nonzero terms sit at the generalised
/// pentagonal numbers `k(3k−1)/2`, `k = 0, ±1, ±2, …`, with coefficient `(−1)ᵏ`.
pub fn pentagonal_euler_product(degree_bound: usize) -> SparseSeries {
    let mut terms = vec![(0usize, BigInt::one())];
    for k in 1usize.. {
        let sign = if k % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        let lower = k * (3 * k - 1) / 2;
        if lower > degree_bound {
            break;
        }
        terms.push((lower, sign.clone()));
        let upper = k * (3 * k + 1) / 2;
        if upper <= degree_bound {
            terms.push((upper, sign));
        }
    }
    SparseSeries {
        terms,
        degree_bound,
    }
}

/// Pentagonal exponents (excluding the constant term) with a flag marking the
/// negative coefficients. This is the form the τ sieve consumes.
pub(crate) fn signed_offsets(series: &SparseSeries) -> Vec<(usize, bool)> {
    series
        .terms()
        .iter()
        .filter(|(e, _)| *e > 0)
        .map(|(e, c)| (*e, c.sign() == num_bigint::Sign::Minus))
        .collect()
}
