//! Independent τ(n) oracle: `Δ = (E₄³ − E₆²) / 1728`.
//!
//! Shares nothing with the pentagonal sieve. Divisor-power sums feed the two
//! Eisenstein series and the products are dense schoolbook multiplications in
//! arbitrary precision, so the cost is quadratic in `n`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::{Error, Result};

/// Default largest index the oracle accepts.
pub const DEFAULT_ORACLE_LIMIT: usize = 10_000;

pub fn oracle_tau_eisenstein(n: usize) -> Result<Vec<i128>> {
    oracle_tau_eisenstein_with_limit(n, DEFAULT_ORACLE_LIMIT)
}

/// τ(1..=n) with `tau[0] = 0`.
pub fn oracle_tau_eisenstein_with_limit(n: usize, limit: usize) -> Result<Vec<i128>> {
    if n == 0 {
        return Err(Error::invalid("oracle needs n >= 1"));
    }
    if n > limit {
        return Err(Error::invalid(format!(
            "oracle length {n} exceeds the oracle limit {limit}"
        )));
    }
    let sigma3 = divisor_power_sums(n, 3);
    let sigma5 = divisor_power_sums(n, 5);

    let e4: Vec<BigInt> = (0..=n)
        .map(|k| {
            if k == 0 {
                BigInt::from(1)
            } else {
                BigInt::from(240u32) * sigma3[k]
            }
        })
        .collect();
    let e6: Vec<BigInt> = (0..=n)
        .map(|k| {
            if k == 0 {
                BigInt::from(1)
            } else {
                BigInt::from(-504i32) * sigma5[k]
            }
        })
        .collect();

    let e4_sq = truncated_product(&e4, &e4);
    let e4_cube = truncated_product(&e4_sq, &e4);
    let e6_sq = truncated_product(&e6, &e6);

    let mut tau = Vec::with_capacity(n + 1);
    tau.push(0i128);
    for k in 1..=n {
        let diff = &e4_cube[k] - &e6_sq[k];
        let (q, r) = diff.div_rem(&BigInt::from(1728u32));
        if !r.is_zero() {
            return Err(Error::invalid(format!(
                "E4^3 - E6^2 not divisible by 1728 at index {k}"
            )));
        }
        tau.push(q.to_i128().ok_or(Error::UnsupportedRange { n: k })?);
    }
    Ok(tau)
}

/// σ_k(m) for m ≤ n, by adding d^k to every multiple of d.
fn divisor_power_sums(n: usize, k: u32) -> Vec<u128> {
    let mut sigma = vec![0u128; n + 1];
    for d in 1..=n {
        let p = (d as u128).pow(k);
        for m in (d..=n).step_by(d) {
            sigma[m] += p;
        }
    }
    sigma
}

fn truncated_product(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let len = a.len().min(b.len());
    (0..len)
        .into_par_iter()
        .map(|k| {
            let mut acc = BigInt::zero();
            for i in 0..=k {
                acc += &a[i] * &b[k - i];
            }
            acc
        })
        .collect()
}
