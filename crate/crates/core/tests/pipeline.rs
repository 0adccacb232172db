use once_cell::sync::Lazy;

use rankin_core::coefficients::{c_exact, oracle_tau_eisenstein, sieve_tau_bigint};
use rankin_core::error_terms::{
    delta, estimate_c_both, rankin_selberg_envelope, sum_a_squared, DivisorSummatory,
};
use rankin_core::export::{write_csv, CSV_HEADER};
use rankin_core::persist::{import_external_tau, load_table, save_table};
use rankin_core::short_interval::{interval_mean_square, spearman, sweep, EnvelopeKind};
use rankin_core::voronoi::{truncation_scan, voronoi_delta};
use rankin_core::{CoefficientTable, Error};

static TABLE: Lazy<CoefficientTable> = Lazy::new(|| CoefficientTable::build(40_000).unwrap());

#[test]
fn sieve_agrees_with_oracle_and_bigint_path() {
    let t = &*TABLE;
    let oracle = oracle_tau_eisenstein(2000).unwrap();
    let big = sieve_tau_bigint(2000);
    for n in 1..=2000 {
        assert_eq!(t.tau()[n], oracle[n]);
        assert_eq!(num_bigint::BigInt::from(t.tau()[n]), big[n]);
    }
}

#[test]
fn c_entries_are_correctly_rounded() {
    let t = &*TABLE;
    for n in [1, 2, 3, 4, 12, 36, 97, 1024, 39_999] {
        let exact = c_exact(t.tau(), n, t.kappa());
        assert_eq!(
            t.c()[n],
            num_traits::ToPrimitive::to_f64(&exact).unwrap(),
            "n = {n}"
        );
    }
}

#[test]
fn mean_constant_estimators_agree() {
    let (lsq, dq) = estimate_c_both(&*TABLE).unwrap();
    assert!(lsq.agrees_with(&dq), "{lsq:?} vs {dq:?}");
    assert!(lsq.value > 0.62 && lsq.value < 0.64);
}

#[test]
fn envelope_growth_is_small() {
    let t = &*TABLE;
    let (lsq, _) = estimate_c_both(t).unwrap();
    let r = rankin_selberg_envelope(t, lsq.value, 1000).unwrap();
    assert!(r.growth.slope < 0.1, "{r:?}");
    assert!(r.max_ratio < 1.0);
}

#[test]
fn sum_of_squares_normalisation_is_bounded() {
    let t = &*TABLE;
    let (_, d1) = sum_a_squared(10_000.0, t).unwrap();
    let (_, d2) = sum_a_squared(40_000.0, t).unwrap();
    // Σ_{n≤x} τ(n)²n^{−11} ~ Cx/ζ(2), hence D = 6C/(κπ²)
    let (lsq, _) = estimate_c_both(t).unwrap();
    let want = 6.0 * lsq.value / (12.0 * std::f64::consts::PI.powi(2));
    for d in [d1, d2] {
        assert!((d / want - 1.0).abs() < 0.02, "{d} vs {want}");
    }
}

#[test]
fn cache_and_import_reproduce_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let t = CoefficientTable::build(1000).unwrap();
    let cache = dir.path().join("t.rst");
    save_table(&cache, &t).unwrap();
    assert_eq!(std::fs::metadata(&cache).unwrap().len(), 24 + 16 * 1000);
    assert_eq!(load_table(&cache).unwrap(), t);

    let text: String = (1..=1000)
        .map(|n| format!("{n} {}\n", t.tau()[n]))
        .collect();
    let path = dir.path().join("tau.txt");
    std::fs::write(&path, &text).unwrap();
    assert_eq!(import_external_tau(&path).unwrap(), t);

    let bytes = std::fs::read(&cache).unwrap();
    std::fs::write(&cache, &bytes[..bytes.len() - 7]).unwrap();
    assert!(matches!(load_table(&cache), Err(Error::CorruptCache(_))));
}

#[test]
fn voronoi_is_of_the_right_size() {
    let t = &*TABLE;
    let (lsq, _) = estimate_c_both(t).unwrap();
    let scan = truncation_scan(&[5000.0, 20_000.0], &[16, 64, 256, 1024], t, lsq.value).unwrap();
    assert_eq!(scan.len(), 2);
    for s in &scan {
        let scale = s.x.powf(0.375);
        assert!(
            s.mean_abs_error.iter().all(|&e| e > 0.0 && e < scale),
            "{s:?}"
        );
    }
    let v = voronoi_delta(20_000.0, 1024, t).unwrap();
    let d = delta(20_000.0, lsq.value, t).unwrap();
    assert!(v.abs() < 3.0 * 20_000f64.powf(0.375) && d.abs() < 20_000f64.powf(0.6));
}

#[test]
fn sweep_exports_in_grid_order() {
    let t = &*TABLE;
    let (lsq, _) = estimate_c_both(t).unwrap();
    let xs = [4096, 1024, 16_384];
    let r = sweep(&xs, &[0.5, 0.25], lsq.value, 0.0, t).unwrap();
    let order: Vec<(u64, f64)> = r.cells.iter().map(|c| (c.x, c.u_exp)).collect();
    assert_eq!(
        order,
        [
            (4096, 0.5),
            (4096, 0.25),
            (1024, 0.5),
            (1024, 0.25),
            (16_384, 0.5),
            (16_384, 0.25)
        ]
    );
    for kind in EnvelopeKind::ALL {
        assert!(r.cells.iter().all(|c| r.envelope(kind).covers(c)));
        assert_eq!(r.k0_by_x(kind).unwrap().len(), 3);
    }
    let mut csv = Vec::new();
    write_csv(&mut csv, &r.cells).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn mean_square_rank_correlates_with_u() {
    let t = &*TABLE;
    let (lsq, _) = estimate_c_both(t).unwrap();
    let us = [0.2, 1.0 / 3.0, 0.4, 0.45, 0.5];
    let r = sweep(&[4096, 8192, 16_384], &us, lsq.value, 0.0, t).unwrap();
    for x in [4096, 8192, 16_384] {
        let row: Vec<f64> = r
            .cells
            .iter()
            .filter(|c| c.x == x)
            .map(|c| c.continuous)
            .collect();
        assert!(spearman(&us, &row) > 0.0, "X = {x}: {row:?}");
    }
}

#[test]
fn mean_square_grows_with_u() {
    let t = &*TABLE;
    let (lsq, _) = estimate_c_both(t).unwrap();
    let ms: Vec<f64> = [4.0, 16.0, 64.0]
        .iter()
        .map(|&u| {
            interval_mean_square(8192, u, lsq.value, 0.0, t)
                .unwrap()
                .continuous
        })
        .collect();
    assert!(ms[0] < ms[1] && ms[1] < ms[2], "{ms:?}");
}

#[test]
fn divisor_error_term_examples() {
    let d = DivisorSummatory::new(1000);
    assert_eq!(d.sum_to(100), 482);
    assert!((d.delta2(100.0).unwrap() - 6.039_848_420_884_291).abs() < 1e-10);
    assert!(d.delta2(1001.0).is_err());
}
