//! Ramanujan τ(n) from `x·∏(1 − xᵏ)²⁴`.
//!
//! The Euler product is multiplied into a dense coefficient array 24 times, one
//! sparse pentagonal factor at a time. Each pass runs in place from the top
//! degree downwards, so every read of `a[n − e]` still sees the previous pass.
//!
//! Coefficients are held in `i128` while a per-pass bound proves that no
//! intermediate sum can overflow; if the bound ever fails the remaining passes
//! continue in arbitrary precision. Either way the result is exact.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::pentagonal::{pentagonal_euler_product, signed_offsets};
use crate::{Error, Result};

/// Upper bound on the sieve length accepted by [`sieve_tau`].
pub const DEFAULT_SIEVE_LIMIT: usize = 20_000_000;

const ETA_POWER: usize = 24;

/// τ(1..=n) with `tau[0] = 0`, using [`DEFAULT_SIEVE_LIMIT`].
pub fn sieve_tau(n: usize) -> Result<Vec<i128>> {
    sieve_tau_with_limit(n, DEFAULT_SIEVE_LIMIT)
}

pub fn sieve_tau_with_limit(n: usize, limit: usize) -> Result<Vec<i128>> {
    if n == 0 {
        return Err(Error::invalid("sieve_tau needs n >= 1"));
    }
    if n > limit {
        return Err(Error::ResourceExhausted(format!(
            "tau sieve of length {n} exceeds the configured limit {limit}"
        )));
    }
    let degree = n - 1;
    let offsets = signed_offsets(&pentagonal_euler_product(degree));

    let mut coeffs: Vec<i128> = Vec::new();
    coeffs
        .try_reserve_exact(degree + 1)
        .map_err(|e| Error::ResourceExhausted(format!("tau sieve of length {n}: {e}")))?;
    coeffs.resize(degree + 1, 0);
    coeffs[0] = 1;

    let mut passes_done = 0;
    while passes_done < ETA_POWER {
        let max_abs = coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
        // every new coefficient is a signed sum of at most offsets.len() + 1 old ones
        let fanout = offsets.len() as u128 + 1;
        if max_abs
            .checked_mul(fanout)
            .is_none_or(|b| b > i128::MAX as u128)
        {
            break;
        }
        multiply_in_place_i128(&mut coeffs, &offsets);
        passes_done += 1;
    }

    let mut tau = Vec::with_capacity(n + 1);
    tau.push(0i128);
    if passes_done == ETA_POWER {
        tau.extend_from_slice(&coeffs);
        return Ok(tau);
    }

    let mut wide: Vec<BigInt> = coeffs.into_iter().map(BigInt::from).collect();
    for _ in passes_done..ETA_POWER {
        multiply_in_place_big(&mut wide, &offsets);
    }
    for (i, c) in wide.into_iter().enumerate() {
        tau.push(c.to_i128().ok_or(Error::UnsupportedRange { n: i + 1 })?);
    }
    Ok(tau)
}

/// Arbitrary-precision variant of the sieve, without the `i128` fast path.
pub fn sieve_tau_bigint(n: usize) -> Vec<BigInt> {
    if n == 0 {
        return vec![BigInt::zero()];
    }
    let degree = n - 1;
    let offsets = signed_offsets(&pentagonal_euler_product(degree));
    let mut coeffs = vec![BigInt::zero(); degree + 1];
    coeffs[0] = BigInt::from(1);
    for _ in 0..ETA_POWER {
        multiply_in_place_big(&mut coeffs, &offsets);
    }
    let mut tau = Vec::with_capacity(n + 1);
    tau.push(BigInt::zero());
    tau.extend(coeffs);
    tau
}

fn multiply_in_place_i128(a: &mut [i128], offsets: &[(usize, bool)]) {
    for n in (1..a.len()).rev() {
        let mut acc = a[n];
        for &(e, negative) in offsets {
            if e > n {
                break;
            }
            if negative {
                acc -= a[n - e];
            } else {
                acc += a[n - e];
            }
        }
        a[n] = acc;
    }
}

fn multiply_in_place_big(a: &mut [BigInt], offsets: &[(usize, bool)]) {
    for n in (1..a.len()).rev() {
        let mut acc = a[n].clone();
        for &(e, negative) in offsets {
            if e > n {
                break;
            }
            if negative {
                acc -= &a[n - e];
            } else {
                acc += &a[n - e];
            }
        }
        a[n] = acc;
    }
}
