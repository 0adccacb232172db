//! The convolution coefficients
//!
//! ```text
//! c_n = n^{1−κ} Σ_{m²|n} m^{2(κ−1)} a(n/m²)²
//! ```
//!
//! and their Dirichlet quotient `b = μ ∗ c` (so that `Σ c_n n^{−s} = ζ(s) Σ b_n n^{−s}`).
//!
//! Each `c_n` is formed as one exact rational `N / n^{κ−1}` with an integer
//! numerator and rounded to the nearest `f64` once.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// `c[1..=n_max]` from `a[1..=n_max]` (index 0 ignored), weight `kappa`.
pub fn compute_c(a: &[i128], kappa: u32) -> Vec<f64> {
    let n_max = a.len().saturating_sub(1);
    let mut numer = vec![BigUint::zero(); n_max + 1];
    let mut m = 1usize;
    while m * m <= n_max {
        let weight = BigUint::from(m).pow(2 * (kappa - 1));
        let sq = m * m;
        for q in 1..=n_max / sq {
            let aq = BigUint::from(a[q].unsigned_abs());
            numer[sq * q] += &weight * &aq * &aq;
        }
        m += 1;
    }
    let mut c = Vec::with_capacity(n_max + 1);
    c.push(0.0);
    for (n, num) in numer.into_iter().enumerate().skip(1) {
        let den = BigInt::from(n).pow(kappa - 1);
        let ratio = BigRational::new_raw(BigInt::from(num), den);
        c.push(ratio.to_f64().unwrap_or(f64::INFINITY));
    }
    c
}

/// Exact `c_n` as a reduced fraction.
pub fn c_exact(a: &[i128], n: usize, kappa: u32) -> BigRational {
    let mut num = BigInt::zero();
    let mut m = 1usize;
    while m * m <= n {
        if n.is_multiple_of(m * m) {
            let aq = BigInt::from(a[n / (m * m)]);
            num += BigInt::from(m).pow(2 * (kappa - 1)) * &aq * &aq;
        }
        m += 1;
    }
    BigRational::new(num, BigInt::from(n).pow(kappa - 1))
}

/// `b[n] = Σ_{d|n} μ(d) c[n/d]`.
pub fn compute_b(c: &[f64], mobius: &[i8]) -> Vec<f64> {
    let n_max = c.len().saturating_sub(1);
    let mut b = vec![0.0; n_max + 1];
    for d in 1..=n_max {
        let mu = mobius[d];
        if mu == 0 {
            continue;
        }
        let mu = mu as f64;
        for k in 1..=n_max / d {
            b[d * k] += mu * c[k];
        }
    }
    b
}

/// Worst discrepancy found by an identity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// Largest scaled discrepancy observed.
    pub max_discrepancy: f64,
    /// Index (or product index) where it occurred; 0 if none was checked.
    pub worst_index: usize,
    pub checked: usize,
}

impl IdentityReport {
    fn empty() -> Self {
        Self {
            max_discrepancy: 0.0,
            worst_index: 0,
            checked: 0,
        }
    }

    fn record(&mut self, index: usize, discrepancy: f64) {
        self.checked += 1;
        if self.checked == 1 || discrepancy > self.max_discrepancy {
            self.max_discrepancy = discrepancy;
            self.worst_index = index;
        }
    }
}

/// Checks `a(n)² n^{1−κ} = Σ_{d²|n} μ(d) c_{n/d²}` in floating point.
///
/// The discrepancy at `n` is scaled by `max(1, |lhs|)`.
pub fn square_inversion_float(
    a: &[i128],
    c: &[f64],
    mobius: &[i8],
    kappa: u32,
    limit: usize,
) -> IdentityReport {
    let mut report = IdentityReport::empty();
    for n in 1..=limit {
        let aa = BigInt::from(a[n]);
        let lhs = BigRational::new_raw(&aa * &aa, BigInt::from(n).pow(kappa - 1))
            .to_f64()
            .unwrap_or(f64::INFINITY);
        let mut rhs = 0.0;
        let mut d = 1usize;
        while d * d <= n {
            if n % (d * d) == 0 && mobius[d] != 0 {
                rhs += mobius[d] as f64 * c[n / (d * d)];
            }
            d += 1;
        }
        report.record(n, (lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    report
}

/// The same identity in exact rational arithmetic; every discrepancy should be 0.
pub fn square_inversion_exact(
    a: &[i128],
    mobius: &[i8],
    kappa: u32,
    limit: usize,
) -> IdentityReport {
    let exact: Vec<BigRational> = (0..=limit)
        .map(|n| {
            if n == 0 {
                BigRational::zero()
            } else {
                c_exact(a, n, kappa)
            }
        })
        .collect();
    let mut report = IdentityReport::empty();
    for n in 1..=limit {
        let aa = BigInt::from(a[n]);
        let lhs = BigRational::new(&aa * &aa, BigInt::from(n).pow(kappa - 1));
        let mut rhs = BigRational::zero();
        let mut d = 1usize;
        while d * d <= n {
            if n % (d * d) == 0 {
                match mobius[d] {
                    1 => rhs += &exact[n / (d * d)],
                    -1 => rhs -= &exact[n / (d * d)],
                    _ => {}
                }
            }
            d += 1;
        }
        let diff = (lhs - rhs).abs();
        report.record(n, diff.to_f64().unwrap_or(f64::INFINITY));
    }
    report
}

/// `|c[mn] − c[m]c[n]| / max(1, c[mn])` over coprime `m < n` with `mn ≤ limit`.
pub fn multiplicativity_float(c: &[f64], limit: usize) -> IdentityReport {
    let mut report = IdentityReport::empty();
    for m in 2..=limit {
        if m * (m + 1) > limit {
            break;
        }
        for n in m + 1..=limit / m {
            if m.gcd(&n) != 1 {
                continue;
            }
            let mn = m * n;
            report.record(mn, (c[mn] - c[m] * c[n]).abs() / c[mn].max(1.0));
        }
    }
    report
}

/// Exact multiplicativity `c_{mn} = c_m c_n` on coprime pairs with `mn ≤ limit`.
pub fn multiplicativity_exact(a: &[i128], kappa: u32, limit: usize) -> IdentityReport {
    let exact: Vec<BigRational> = (0..=limit)
        .map(|n| {
            if n == 0 {
                BigRational::zero()
            } else {
                c_exact(a, n, kappa)
            }
        })
        .collect();
    let mut report = IdentityReport::empty();
    for m in 2..=limit {
        if m * (m + 1) > limit {
            break;
        }
        for n in m + 1..=limit / m {
            if m.gcd(&n) != 1 {
                continue;
            }
            let diff = (&exact[m * n] - &exact[m] * &exact[n]).abs();
            report.record(m * n, diff.to_f64().unwrap_or(f64::INFINITY));
        }
    }
    report
}

/// `|Σ_{d|n} b[d] − c[n]| / max(1, c[n])` for n ≤ limit.
pub fn dirichlet_round_trip(b: &[f64], c: &[f64], limit: usize) -> IdentityReport {
    let mut forward = vec![0.0; limit + 1];
    for d in 1..=limit {
        for k in 1..=limit / d {
            forward[d * k] += b[d];
        }
    }
    let mut report = IdentityReport::empty();
    for n in 1..=limit {
        report.record(n, (forward[n] - c[n]).abs() / c[n].max(1.0));
    }
    report
}

/// `c_n` is nonnegative by construction; returns the first violation if any.
pub fn first_negative(c: &[f64]) -> Option<usize> {
    c.iter().skip(1).position(|&x| x < 0.0).map(|i| i + 1)
}
