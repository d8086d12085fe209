use mellin_pricer::oracles::{black_scholes_greeks, OptionKind};
use mellin_pricer::{
    build_grid, greek, greek_fd, BasketSpec, FftConfig, GreekKind, GridParams, MellinFftGrid, MultiplierMode,
    SurfaceStyle,
};

const SIGMAS: [f64; 3] = [0.15, 0.25, 0.4];
const TAUS: [f64; 3] = [0.25, 0.5, 1.0];

fn grid_at(spot: &[f64]) -> MellinFftGrid {
    build_grid(&GridParams::default(), spot, None).unwrap()
}

fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * b.abs() || (a - b).abs() <= abs
}

#[test]
fn european_greeks_match_finite_differences() {
    let cfg = FftConfig::default();
    let grid = grid_at(&[100.0]);
    for sigma in SIGMAS {
        for tau in TAUS {
            let spec = BasketSpec::single(100.0, tau, 0.05, 0.02, sigma).unwrap();
            for kind in GreekKind::single_asset() {
                let g = greek(kind, &[100.0], tau, &spec, &grid, SurfaceStyle::EuropeanPut, &cfg, MultiplierMode::Kernel)
                    .unwrap();
                let fd = greek_fd(kind, &[100.0], tau, &spec, &grid, SurfaceStyle::EuropeanPut, &cfg, 1e-4).unwrap();
                assert!(close(g, fd, 1e-4, 1e-7), "{} σ={sigma} τ={tau}: {g} vs {fd}", kind.name());
            }
        }
    }
}

#[test]
fn european_greeks_match_closed_form() {
    let cfg = FftConfig::default();
    let grid = grid_at(&[100.0]);
    for sigma in SIGMAS {
        for tau in TAUS {
            let spec = BasketSpec::single(100.0, tau, 0.05, 0.02, sigma).unwrap();
            let bs = black_scholes_greeks(100.0, 100.0, 0.05, 0.02, sigma, tau, OptionKind::Put);
            let expected = [bs.delta, bs.gamma, bs.theta, bs.rho, bs.vega, bs.dividend_rho];
            for (kind, want) in GreekKind::single_asset().into_iter().zip(expected) {
                let g = greek(kind, &[100.0], tau, &spec, &grid, SurfaceStyle::EuropeanPut, &cfg, MultiplierMode::Kernel)
                    .unwrap();
                assert!(close(g, want, 1e-8, 1e-10), "{} σ={sigma} τ={tau}: {g} vs {want}", kind.name());
            }
        }
    }
}

#[test]
fn american_delta_gamma_match_finite_differences() {
    let cfg = FftConfig::default();
    // put side of r=3%, q=7%; S*(0) ≈ 83.5, so these spots sit in the continuation region
    let spec = BasketSpec::single(100.0, 0.5, 0.07, 0.03, 0.2).unwrap();
    for s in [95.0, 110.0, 130.0] {
        let grid = grid_at(&[s]);
        for kind in [GreekKind::Delta1(0), GreekKind::Gamma(0)] {
            let g = greek(kind, &[s], 0.5, &spec, &grid, SurfaceStyle::AmericanPut, &cfg, MultiplierMode::Kernel).unwrap();
            let fd = greek_fd(kind, &[s], 0.5, &spec, &grid, SurfaceStyle::AmericanPut, &cfg, 1e-4).unwrap();
            assert!(close(g, fd, 1e-3, 0.0), "{} S={s}: {g} vs {fd}", kind.name());
        }
    }
}

#[test]
fn cross_delta_of_independent_assets() {
    let spec = BasketSpec::new(100.0, 0.5, 0.05, vec![0.02, 0.03], vec![0.2, 0.3], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    let spot = [50.0, 50.0];
    let grid = build_grid(&GridParams { points: 256, ..GridParams::default() }, &spot, None).unwrap();
    let cfg = FftConfig::default();
    let kind = GreekKind::Delta2(0, 1);
    let g = greek(kind, &spot, 0.5, &spec, &grid, SurfaceStyle::EuropeanPut, &cfg, MultiplierMode::Kernel).unwrap();
    let fd = greek_fd(kind, &spot, 0.5, &spec, &grid, SurfaceStyle::EuropeanPut, &cfg, 1e-4).unwrap();
    assert!(close(g, fd, 1e-3, 0.0), "{g} vs {fd}");
    assert!(g > 0.0, "a basket put is convex in the basket level");
}

/// Records which alternate multipliers disagree with finite differences.
#[test]
fn alternate_multipliers_fixture() {
    let cfg = FftConfig::default();
    let grid = grid_at(&[100.0]);
    let spec = BasketSpec::single(100.0, 0.5, 0.05, 0.02, 0.25).unwrap();
    let mut agrees = Vec::new();
    for kind in GreekKind::single_asset() {
        let p = greek(kind, &[100.0], 0.5, &spec, &grid, SurfaceStyle::EuropeanPut, &cfg, MultiplierMode::Alternate).unwrap();
        let fd = greek_fd(kind, &[100.0], 0.5, &spec, &grid, SurfaceStyle::EuropeanPut, &cfg, 1e-4).unwrap();
        agrees.push((kind.name(), close(p, fd, 1e-4, 1e-7)));
    }
    let expected =
        [("delta", true), ("gamma", false), ("theta", true), ("rho", false), ("nu", false), ("xi", false)];
    assert_eq!(agrees, expected);
}
