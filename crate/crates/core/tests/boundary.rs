use mellin_pricer::boundary::{critical_bracket, critical_residual};
use mellin_pricer::{
    boundary_curve, boundary_residual_cap, build_grid, critical_price_approx, critical_price_to_expiry, BasketSpec,
    BoundaryFormula, FftConfig, GridParams,
};
use proptest::prelude::*;

/// Plain bisection, independent of the library root finders.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn put_g1() -> BasketSpec {
    BasketSpec::single(100.0, 0.5, 0.07, 0.03, 0.2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn brent_agrees_with_bisection(
        r in 0.01f64..0.1, q in 0.01f64..0.1, sigma in 0.1f64..0.5, theta in 0.05f64..1.0,
    ) {
        let spec = BasketSpec::single(100.0, 1.0, r, q, sigma).unwrap();
        let f = BoundaryFormula::default();
        let brent = critical_price_to_expiry(theta, &spec, f).unwrap();
        let (lo, hi) = critical_bracket(theta, &spec, f).unwrap();
        let oracle = bisect(|x| critical_residual(x, theta, &spec, f).unwrap(), lo, hi);
        prop_assert!((brent - oracle).abs() < 1e-8, "brent {} bisection {}", brent, oracle);
    }

    #[test]
    fn below_strike_without_dividends(r in 0.01f64..0.1, sigma in 0.1f64..0.5, t in 0.0f64..0.99) {
        let spec = BasketSpec::single(100.0, 1.0, r, 0.0, sigma).unwrap();
        let s = critical_price_approx(t, &spec, BoundaryFormula::default()).unwrap();
        prop_assert!(s > 0.0 && s < 100.0);
    }

    #[test]
    fn continuous_in_time(t in 0.0f64..0.49) {
        let spec = put_g1();
        let f = BoundaryFormula::default();
        let a = critical_price_approx(t, &spec, f).unwrap();
        let b = critical_price_approx(t + 1e-6, &spec, f).unwrap();
        prop_assert!((a - b).abs() < 1e-2 * spec.strike());
    }
}

#[test]
fn curve_rises_toward_expiry() {
    let spec = put_g1();
    let f = BoundaryFormula::default();
    // dense bisection samples of the same equation
    let oracle: Vec<f64> = (0..100)
        .map(|l| {
            let theta = 0.5 - 0.005 * l as f64;
            let (lo, hi) = critical_bracket(theta, &spec, f).unwrap();
            bisect(|x| critical_residual(x, theta, &spec, f).unwrap(), lo, hi)
        })
        .collect();
    assert!(oracle.windows(2).all(|p| p[1] > p[0]));
    let curve = boundary_curve(&spec, 250, 0.5, f).unwrap();
    assert!(curve.values.windows(2).all(|p| p[1] > p[0]));
    for (l, s) in oracle.iter().enumerate() {
        assert!((curve.at(0.005 * l as f64) - s).abs() < 0.05);
    }
}

#[test]
fn cached_curves_are_identical() {
    let f = BoundaryFormula::default();
    let a = boundary_curve(&put_g1(), 250, 0.5, f).unwrap();
    let b = boundary_curve(&put_g1(), 250, 0.5, f).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.spec_hash, b.spec_hash);
}

/// Smooth-pasting residual with M = 250, N = 2^14, pinned from a measurement.
#[test]
fn pasting_residual_fixture() {
    let spec = put_g1();
    let curve = boundary_curve(&spec, 250, 0.5, BoundaryFormula::default()).unwrap();
    let grid = build_grid(&GridParams::default(), &[100.0], None).unwrap();
    let cfg = FftConfig::default();
    let fixture = [(0.0, -0.05036464055887535), (0.25, -0.03311719689556725), (0.5, -0.015543007067353138)];
    for (t, pinned) in fixture {
        let r = boundary_residual_cap(&curve, t, &spec, &grid, &cfg).unwrap();
        assert!((r - pinned).abs() < 1e-9, "t={t}: {r} vs {pinned}");
        assert!(r.abs() < 0.5);
        assert_eq!(r.to_bits(), boundary_residual_cap(&curve, t, &spec, &grid, &cfg).unwrap().to_bits());
    }
}
