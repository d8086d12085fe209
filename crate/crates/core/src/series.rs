//! Sine–cosine series inversion of the Mellin transform for a single asset.

use crate::error::{PricingError, Result};
use crate::fft::{PutIntegrand, SurfaceStyle};
use crate::market::{BasketSpec, CovStruct};
use crate::mellin::StripPoint;
use crate::schedule::{PremiumConfig, PremiumNode};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwConfig {
    /// Number of series terms after the constant one.
    pub terms: usize,
    /// Log-price half-range L; queries need |ln S| ≤ L/2.
    pub half_range: f64,
    pub strip: f64,
    pub premium: PremiumConfig,
}

impl Default for DwConfig {
    fn default() -> Self {
        Self { terms: 250, half_range: 10.0, strip: 1.0, premium: PremiumConfig::default() }
    }
}

impl DwConfig {
    fn validate(&self) -> Result<()> {
        if self.terms == 0 || !(self.half_range > 0.0) {
            return Err(PricingError::InvalidGrid("series needs terms >= 1 and L > 0".into()));
        }
        if !(self.strip > 0.0) {
            return Err(PricingError::Pole(self.strip));
        }
        Ok(())
    }
}

fn strip_point(w: Complex64, spec: &BasketSpec) -> Result<StripPoint> {
    spec.require_single("the series pricer")?;
    StripPoint::new(vec![w], spec, &CovStruct::new(spec))
}

/// ĝ(w; τ) = e^{−rτ}θ̂(w)Φ(wi; τ).
pub fn dw_g_hat(w: Complex64, tau: f64, spec: &BasketSpec) -> Result<Complex64> {
    let p = strip_point(w, spec)?;
    Ok(p.payoff(spec.strike()) * p.discounted_cf(tau))
}

/// ĥ(w) = Σₗ wₗ e^{−rtₗ}f̂(w; S*ₗ)Φ(wi; tₗ) over the given premium nodes.
pub fn dw_h_hat(w: Complex64, spec: &BasketSpec, nodes: &[PremiumNode]) -> Result<Complex64> {
    let p = strip_point(w, spec)?;
    let (r, k) = (spec.rate(), spec.strike());
    Ok(nodes.iter().map(|n| n.weight * p.early_exercise(n.s_star, r, k) * p.discounted_cf(n.t)).sum())
}

fn series(x: f64, cfg: &DwConfig, g: impl Fn(Complex64) -> Result<Complex64>) -> Result<f64> {
    let l = cfg.half_range;
    let a = cfg.strip;
    let mut acc = 0.5 * g(Complex64::new(a, 0.0))?.re;
    for j in 1..=cfg.terms {
        let u = PI * j as f64 / l;
        let z = g(Complex64::new(a, u))?;
        acc += z.re * (u * x).cos() - z.im * (u * x).sin();
    }
    Ok((a * x).exp() / l * acc)
}

/// Put value at spot `s` with life τ.
///
/// The premium enters with the sign that makes it non-negative, so the
/// American value is the European value plus the premium.
pub fn dw_price(s: f64, tau: f64, spec: &BasketSpec, cfg: &DwConfig, style: SurfaceStyle) -> Result<f64> {
    spec.require_single("the series pricer")?;
    cfg.validate()?;
    let x = -s.ln();
    if !(x.abs() <= cfg.half_range / 2.0) {
        return Err(PricingError::RangeViolation { x_abs: x.abs(), limit: cfg.half_range / 2.0 });
    }
    let integrand = PutIntegrand::new(spec, tau, style, &cfg.premium)?;
    series(x, cfg, |w| Ok(integrand.eval(&integrand.point(vec![w])?)))
}

/// American call through V_C(S, K, r, q) = V_P(K, S, q, r).
pub fn dw_american_call(spot: f64, strike: f64, rate: f64, div: f64, vol: f64, tau: f64, cfg: &DwConfig) -> Result<f64> {
    let put = BasketSpec::single(spot, tau, div, rate, vol)?;
    dw_price(strike, tau, &put, cfg, SurfaceStyle::AmericanPut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::premium_schedule;

    #[test]
    fn g_hat_at_expiry_is_payoff_transform() {
        let spec = BasketSpec::single(100.0, 1.0, 0.05, 0.0, 0.2).unwrap();
        let v = dw_g_hat(Complex64::new(1.0, 0.0), 0.0, &spec).unwrap();
        assert!((v.re - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn h_hat_degenerate_cases() {
        let zero = BasketSpec::single(100.0, 1.0, 0.0, 0.0, 0.2).unwrap();
        let nodes = premium_schedule(&zero, 1.0, &PremiumConfig::default()).unwrap();
        assert_eq!(dw_h_hat(Complex64::new(1.0, 2.0), &zero, &nodes).unwrap(), Complex64::new(0.0, 0.0));
        let spec = BasketSpec::single(100.0, 1.0, 0.05, 0.02, 0.2).unwrap();
        let one = premium_schedule(&spec, 1.0, &PremiumConfig { time_steps: 1, ..Default::default() }).unwrap();
        assert_eq!(one.len(), 1);
        let w = Complex64::new(1.0, 2.0);
        let p = StripPoint::new(vec![w], &spec, &CovStruct::new(&spec)).unwrap();
        let expect = 1.0 * p.early_exercise(one[0].s_star, 0.05, 100.0);
        assert!((dw_h_hat(w, &spec, &one).unwrap() - expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn range_guard() {
        let spec = BasketSpec::single(100.0, 1.0, 0.05, 0.0, 0.2).unwrap();
        let cfg = DwConfig::default();
        assert!(matches!(
            dw_price(1e3, 1.0, &spec, &cfg, SurfaceStyle::EuropeanPut),
            Err(PricingError::RangeViolation { .. })
        ));
    }
}
