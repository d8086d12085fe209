//! American put critical price: implicit closed-form approximation, sampled
//! curves with a process-wide cache, and a residual diagnostic.

use crate::error::{PricingError, Result};
use crate::market::BasketSpec;
use crate::roots::brent;
use crate::special::{norm_cdf, norm_inv};
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::sync::{Arc, OnceLock, RwLock};

/// Form of the δ constant inside the approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum DeltaForm {
    /// δ = σ/2 + (q − r)/σ + 2r.
    Unsquared,
    /// δ = σ²/2 + (q − r)/σ + 2r.
    HalfVariance,
    /// δ = (σ/2 + (q − r)/σ)² + 2r; reproduces the perpetual put boundary.
    #[default]
    Squared,
}

/// Sign of the dividend factor multiplying the bracketed normal-CDF difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum DividendFactor {
    /// e^{+qθ}.
    Growing,
    /// e^{−qθ}.
    #[default]
    Decaying,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct BoundaryFormula {
    pub delta: DeltaForm,
    pub dividend: DividendFactor,
}

impl BoundaryFormula {
    pub fn delta(&self, r: f64, q: f64, sigma: f64) -> f64 {
        match self.delta {
            DeltaForm::Unsquared => sigma / 2.0 + (q - r) / sigma + 2.0 * r,
            DeltaForm::HalfVariance => sigma * sigma / 2.0 + (q - r) / sigma + 2.0 * r,
            DeltaForm::Squared => (sigma / 2.0 + (q - r) / sigma).powi(2) + 2.0 * r,
        }
    }
}

/// θ-dependent constants of G(S*) for one remaining life θ > 0.
#[derive(Debug, Clone, Copy)]
struct CriticalEq {
    strike: f64,
    sigma: f64,
    theta: f64,
    kappa_drift: f64,
    numerator: f64,
    factor: f64,
    shifted_cdf: f64,
    omega_half: f64,
}

impl CriticalEq {
    fn new(theta: f64, spec: &BasketSpec, formula: BoundaryFormula) -> Result<Self> {
        let (k, r, q, sigma) = (spec.strike(), spec.rate(), spec.dividends()[0], spec.vols()[0]);
        let delta = formula.delta(r, q, sigma);
        let shifted = delta - 2.0 * q;
        if delta < 0.0 || shifted < 0.0 {
            return Err(PricingError::NegativeRadicand { delta, shifted });
        }
        let a = 2.0 * norm_cdf((delta * theta).sqrt()) - 1.0;
        let omega = (2.0 * q + sigma * shifted.sqrt()) / (2.0 * sigma * delta.sqrt()) * a;
        let factor = match formula.dividend {
            DividendFactor::Growing => (q * theta).exp(),
            DividendFactor::Decaying => (-q * theta).exp(),
        };
        Ok(Self {
            strike: k,
            sigma,
            theta,
            kappa_drift: r - q + 0.5 * sigma * sigma,
            numerator: k * r / (sigma * delta.sqrt()) * a,
            factor,
            shifted_cdf: norm_cdf((shifted * theta).sqrt()),
            omega_half: omega + 0.5,
        })
    }

    fn denominator(&self, x: f64) -> f64 {
        let kappa = ((x / self.strike).ln() + self.kappa_drift * self.theta) / (self.sigma * self.theta.sqrt());
        self.factor * (norm_cdf(kappa) - self.shifted_cdf) + self.omega_half
    }

    fn g(&self, x: f64) -> f64 {
        x - self.numerator / self.denominator(x)
    }

    /// Smallest x at which the denominator is positive, or 0 if it always is.
    fn pole(&self) -> f64 {
        let target = self.shifted_cdf - self.omega_half / self.factor;
        if target <= 0.0 {
            return 0.0;
        }
        if target >= 1.0 {
            return f64::INFINITY;
        }
        let kappa = norm_inv(target);
        self.strike * (kappa * self.sigma * self.theta.sqrt() - self.kappa_drift * self.theta).exp()
    }
}

fn expiry_limit(spec: &BasketSpec) -> f64 {
    let (k, r, q) = (spec.strike(), spec.rate(), spec.dividends()[0]);
    if q > 0.0 {
        k * (r / q).min(1.0)
    } else {
        k
    }
}

/// G(x) for a single-asset spec with remaining life `theta` > 0.
pub fn critical_residual(x: f64, theta: f64, spec: &BasketSpec, formula: BoundaryFormula) -> Result<f64> {
    spec.require_single("the boundary approximation")?;
    Ok(CriticalEq::new(theta, spec, formula)?.g(x))
}

/// Bracket [lo, hi] on which G changes sign, or `NoBracket`.
pub fn critical_bracket(theta: f64, spec: &BasketSpec, formula: BoundaryFormula) -> Result<(f64, f64)> {
    let c = CriticalEq::new(theta, spec, formula)?;
    let k = spec.strike();
    let mut lo = (k * 1e-6).max(c.pole() * (1.0 + 1e-12));
    // without dividends the denominator vanishes as x → 0 and G underflows to −∞
    if !c.g(lo).is_finite() && c.g(k).is_finite() {
        let (mut bad, mut good) = (lo.ln(), k.ln());
        for _ in 0..100 {
            let mid = 0.5 * (bad + good);
            if c.g(mid.exp()).is_finite() {
                good = mid;
            } else {
                bad = mid;
            }
        }
        lo = good.exp();
    }
    for hi in [k, 2.0 * k] {
        if lo < hi && c.g(lo) < 0.0 && c.g(hi) > 0.0 {
            return Ok((lo, hi));
        }
    }
    Err(PricingError::NoBracket { lo, hi: 2.0 * k })
}

/// Critical price with `theta` years left to expiry.
///
/// θ = 0 returns the expiry limit K·min(1, r/q); r = 0 returns 0 since the
/// put is then never exercised early.
pub fn critical_price_to_expiry(theta: f64, spec: &BasketSpec, formula: BoundaryFormula) -> Result<f64> {
    spec.require_single("the boundary approximation")?;
    if !(theta >= 0.0) {
        return Err(PricingError::InvalidSpec(format!("remaining life must be non-negative, got {theta}")));
    }
    if spec.rate() == 0.0 {
        return Ok(0.0);
    }
    if theta == 0.0 {
        return Ok(expiry_limit(spec));
    }
    let c = CriticalEq::new(theta, spec, formula)?;
    let (lo, hi) = critical_bracket(theta, spec, formula)?;
    // tighter than the required |G| < 1e−10·K so independent solvers agree to ~1e−10
    brent(|x| c.g(x), lo, hi, 1e-12 * spec.strike(), 200)
}

/// Critical price at calendar time `t` ∈ [0, T].
pub fn critical_price_approx(t: f64, spec: &BasketSpec, formula: BoundaryFormula) -> Result<f64> {
    if !(0.0..=spec.maturity()).contains(&t) {
        return Err(PricingError::InvalidSpec(format!("time {t} outside [0, {}]", spec.maturity())));
    }
    critical_price_to_expiry(spec.maturity() - t, spec, formula)
}

/// Critical prices sampled at calendar times tₗ = lτ/(M−1) after valuation,
/// so `values[l]` has τ − tₗ left to expiry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub spec_hash: u64,
}

impl BoundaryCurve {
    /// Linear interpolation in calendar time, flat outside the samples.
    pub fn at(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let i = self.times.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let u = (t - t0) / (t1 - t0);
        self.values[i] * (1.0 - u) + self.values[i + 1] * u
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,s_star")?;
        for (t, s) in self.times.iter().zip(&self.values) {
            writeln!(out, "{t},{s}")?;
        }
        Ok(())
    }
}

type CacheKey = [i128; 8];

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<BoundaryCurve>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<BoundaryCurve>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cache_key(spec: &BasketSpec, m: usize, tau: f64, formula: BoundaryFormula) -> CacheKey {
    let r = |x: f64| (x * 1e12).round() as i128;
    let f = (formula.delta as i128) * 2 + formula.dividend as i128;
    [r(spec.strike()), r(spec.rate()), r(spec.dividends()[0]), r(spec.vols()[0]), r(tau), m as i128, f, 0]
}

fn spec_hash(key: &CacheKey) -> u64 {
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    h.finish()
}

/// Uncached sampling of the critical price on the pricer's time grid.
pub fn compute_boundary_curve(spec: &BasketSpec, m: usize, tau: f64, formula: BoundaryFormula) -> Result<BoundaryCurve> {
    spec.require_single("the boundary curve")?;
    if m < 2 {
        return Err(PricingError::InvalidGrid(format!("boundary curve needs M >= 2, got {m}")));
    }
    if !(tau > 0.0) {
        return Err(PricingError::InvalidSpec(format!("tau must be positive, got {tau}")));
    }
    let h = tau / (m - 1) as f64;
    let times: Vec<f64> = (0..m).map(|l| l as f64 * h).collect();
    let values = (0..m)
        .map(|l| {
            let theta = if l == m - 1 { 0.0 } else { tau - times[l] };
            critical_price_to_expiry(theta, spec, formula)
        })
        .collect::<Result<Vec<_>>>()?;
    let key = cache_key(spec, m, tau, formula);
    Ok(BoundaryCurve { times, values, spec_hash: spec_hash(&key) })
}

/// Cached [`compute_boundary_curve`], keyed by (K, r, q, σ, τ, M, formula) rounded to 1e−12.
pub fn boundary_curve(spec: &BasketSpec, m: usize, tau: f64, formula: BoundaryFormula) -> Result<Arc<BoundaryCurve>> {
    spec.require_single("the boundary curve")?;
    let key = cache_key(spec, m, tau, formula);
    if let Some(c) = cache().read().expect("boundary cache poisoned").get(&key) {
        return Ok(Arc::clone(c));
    }
    let curve = Arc::new(compute_boundary_curve(spec, m, tau, formula)?);
    let mut w = cache().write().expect("boundary cache poisoned");
    Ok(Arc::clone(w.entry(key).or_insert(curve)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::bisection;

    fn put_g1() -> BasketSpec {
        // put side of the first reference grouping under call/put symmetry
        BasketSpec::single(100.0, 0.5, 0.07, 0.03, 0.2).unwrap()
    }

    #[test]
    fn root_satisfies_residual() {
        let s = put_g1();
        let f = BoundaryFormula::default();
        let x = critical_price_to_expiry(0.5, &s, f).unwrap();
        assert!(x > 0.0 && x < 100.0);
        assert!(critical_residual(x, 0.5, &s, f).unwrap().abs() < 1e-10 * 100.0);
        let (lo, hi) = critical_bracket(0.5, &s, f).unwrap();
        let b = bisection(|y| critical_residual(y, 0.5, &s, f).unwrap(), lo, hi, 200).unwrap();
        assert!((x - b).abs() < 1e-8);
    }

    #[test]
    fn unsquared_delta_fails_loudly() {
        let s = put_g1();
        let f = BoundaryFormula { delta: DeltaForm::Unsquared, ..Default::default() };
        assert!(matches!(critical_price_to_expiry(0.5, &s, f), Err(PricingError::NegativeRadicand { .. })));
    }

    #[test]
    fn squared_delta_is_perpetual_exponent() {
        // long-dated boundary approaches K·γ/(γ+1) with γ the negative root exponent
        let s = BasketSpec::single(100.0, 1e6, 0.05, 0.0, 0.3).unwrap();
        let x = critical_price_to_expiry(1e6, &s, BoundaryFormula::default()).unwrap();
        let gamma = 2.0 * 0.05 / 0.09;
        assert!((x - 100.0 * gamma / (1.0 + gamma)).abs() < 1e-6, "{x}");
    }

    #[test]
    fn edge_cases() {
        let s = BasketSpec::single(100.0, 1.0, 0.03, 0.07, 0.2).unwrap();
        let f = BoundaryFormula::default();
        assert!((critical_price_to_expiry(0.0, &s, f).unwrap() - 300.0 / 7.0).abs() < 1e-12);
        let s0 = BasketSpec::single(100.0, 1.0, 0.0, 0.02, 0.2).unwrap();
        assert_eq!(critical_price_to_expiry(0.5, &s0, f).unwrap(), 0.0);
        assert!(critical_price_approx(1.5, &s, f).is_err());
    }

    #[test]
    fn curve_layout_and_cache() {
        let s = put_g1();
        let f = BoundaryFormula::default();
        let c = boundary_curve(&s, 2, 0.5, f).unwrap();
        assert_eq!(c.times, vec![0.0, 0.5]);
        assert_eq!(c.values[0], critical_price_to_expiry(0.5, &s, f).unwrap());
        assert_eq!(c.values[1], critical_price_to_expiry(0.0, &s, f).unwrap());
        let a = boundary_curve(&s, 50, 0.5, f).unwrap();
        let b = boundary_curve(&s, 50, 0.5, f).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(*a, compute_boundary_curve(&s, 50, 0.5, f).unwrap());
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,s_star\n0,"));
        assert_eq!(a.at(0.0), a.values[0]);
    }
}
