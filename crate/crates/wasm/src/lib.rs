//! Browser bindings for three interactive views:
//!
//! - the truncated Voronoi expansion against the exact Δ(x),
//! - the short-interval window `Δ(x+U) − Δ(x)` over `[X, 2X]` with its mean squares,
//! - the mean-square exponents as functions of μ(½).
//!
//! The `*_impl` methods hold the logic and are testable natively; the exported
//! wrappers only convert errors.

use wasm_bindgen::prelude::*;

use rankin_core::bounds::{beta_of_mu, improvement_range, theorem1_exponents};
use rankin_core::error_terms::{delta, estimate_c, Method};
use rankin_core::short_interval::{mean_square_continuous, mean_square_discrete, window_diff};
use rankin_core::voronoi::voronoi_delta;
use rankin_core::{CoefficientTable, Result};

/// Largest table the page may request.
pub const MAX_TABLE: usize = 200_000;
const MAX_POINTS: usize = 4000;

fn js(e: rankin_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn check_points(points: usize) -> Result<()> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(rankin_core::Error::InvalidArgument(format!(
            "points must be in 2..={MAX_POINTS}, got {points}"
        )));
    }
    Ok(())
}

#[wasm_bindgen]
pub struct Lab {
    table: CoefficientTable,
    c: f64,
}

impl Lab {
    pub fn new_impl(n_max: usize) -> Result<Lab> {
        if n_max > MAX_TABLE {
            return Err(rankin_core::Error::ResourceExhausted(format!(
                "tables above {MAX_TABLE} are not built in the browser"
            )));
        }
        let table = CoefficientTable::build(n_max)?;
        let c = estimate_c(&table, Method::LeastSquares)?.value;
        Ok(Lab { table, c })
    }

    /// `[x, Δ(x), voronoi(x, K)]` triples at `points` equally spaced `x`.
    pub fn voronoi_curve_impl(
        &self,
        x_from: f64,
        x_to: f64,
        points: usize,
        k: usize,
    ) -> Result<Vec<f64>> {
        check_points(points)?;
        let mut out = Vec::with_capacity(3 * points);
        for i in 0..points {
            let x = x_from + (x_to - x_from) * i as f64 / (points - 1) as f64;
            out.push(x);
            out.push(delta(x, self.c, &self.table)?);
            out.push(voronoi_delta(x, k, &self.table)?);
        }
        Ok(out)
    }

    /// `[t, Δ(t+U) − Δ(t)]` pairs at `points` equally spaced `t ∈ [X, 2X]`.
    pub fn window_profile_impl(&self, x: u64, u: f64, points: usize) -> Result<Vec<f64>> {
        check_points(points)?;
        let mut out = Vec::with_capacity(2 * points);
        for i in 0..points {
            let t = x as f64 * (1.0 + i as f64 / (points - 1) as f64);
            out.push(t);
            out.push(window_diff(t, u, self.c, &self.table)?);
        }
        Ok(out)
    }

    /// `[continuous, discrete, shifted discrete]` mean squares.
    pub fn mean_square_impl(&self, x: u64, u: f64) -> Result<Vec<f64>> {
        let cont = mean_square_continuous(x, u, self.c, &self.table)?;
        let (disc, shifted) = mean_square_discrete(x, u, self.c, &self.table)?;
        Ok(vec![cont, disc, shifted])
    }
}

#[wasm_bindgen]
impl Lab {
    #[wasm_bindgen(constructor)]
    pub fn new(n_max: usize) -> std::result::Result<Lab, JsError> {
        Lab::new_impl(n_max).map_err(js)
    }

    #[wasm_bindgen(getter)]
    pub fn n_max(&self) -> usize {
        self.table.n_max()
    }

    #[wasm_bindgen(getter)]
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn voronoi_curve(
        &self,
        x_from: f64,
        x_to: f64,
        points: usize,
        k: usize,
    ) -> std::result::Result<Vec<f64>, JsError> {
        self.voronoi_curve_impl(x_from, x_to, points, k).map_err(js)
    }

    pub fn window_profile(
        &self,
        x: u32,
        u: f64,
        points: usize,
    ) -> std::result::Result<Vec<f64>, JsError> {
        self.window_profile_impl(u64::from(x), u, points)
            .map_err(js)
    }

    pub fn mean_square(&self, x: u32, u: f64) -> std::result::Result<Vec<f64>, JsError> {
        self.mean_square_impl(u64::from(x), u).map_err(js)
    }
}

/// `[β, α, γ, u_low, u_high]` at μ(½) = `mu`.
pub fn exponents_impl(mu: f64) -> Result<Vec<f64>> {
    let (a, g) = theorem1_exponents(mu)?;
    let r = improvement_range(mu)?;
    Ok(vec![beta_of_mu(mu)?, a, g, r.u_low, r.u_high])
}

#[wasm_bindgen]
pub fn exponents(mu: f64) -> std::result::Result<Vec<f64>, JsError> {
    exponents_impl(mu).map_err(js)
}
