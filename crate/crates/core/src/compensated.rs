//! Compensated floating-point accumulation.
//!
//! [`NeumaierSum`] is a running sum with an error term; [`PrefixSums`] stores
//! every partial sum of a sequence as an unevaluated pair `hi + lo`, so that
//! differences of far-apart prefixes keep the precision of the short window
//! between them.

/// Error-free transformation: `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Sum an iterator with compensation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// Prefix sums `P[0] = 0, P[n] = x₁ + … + xₙ` held in double-double form.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixSums {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl PrefixSums {
    /// Build from `values[1..]`; `values[0]` is ignored (index 0 is the empty sum).
    pub fn from_one_based(values: &[f64]) -> Self {
        let len = values.len().max(1);
        let mut hi = Vec::with_capacity(len);
        let mut lo = Vec::with_capacity(len);
        hi.push(0.0);
        lo.push(0.0);
        let (mut h, mut l) = (0.0f64, 0.0f64);
        for &x in values.iter().skip(1) {
            let (s, e) = two_sum(h, x);
            let t = l + e;
            // renormalise so that |l| ≤ ulp(h)/2
            let (nh, nl) = two_sum(s, t);
            h = nh;
            l = nl;
            hi.push(h);
            lo.push(l);
        }
        Self { hi, lo }
    }

    /// Largest valid index.
    pub fn len_index(&self) -> usize {
        self.hi.len() - 1
    }

    /// `P[n]` rounded to a single f64.
    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        self.hi[n] + self.lo[n]
    }

    /// `P[b] − P[a]` evaluated from the double-double parts.
    #[inline]
    pub fn diff(&self, a: usize, b: usize) -> f64 {
        (self.hi[b] - self.hi[a]) + (self.lo[b] - self.lo[a])
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }
}
