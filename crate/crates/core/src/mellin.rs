//! Characteristic exponent and closed-form Mellin transforms of the basket put.

use crate::error::{PricingError, Result};
use crate::market::{BasketSpec, CovStruct};
use crate::special::ln_gamma;
use num_complex::Complex64;

/// μᵢ = r − qᵢ − σᵢ²/2.
pub fn riskneutral_drift(spec: &BasketSpec) -> Vec<f64> {
    spec.dividends()
        .iter()
        .zip(spec.vols())
        .map(|(q, s)| spec.rate() - q - 0.5 * s * s)
        .collect()
}

fn check_dim(len: usize, n: usize) -> Result<()> {
    if len != n {
        return Err(PricingError::DimensionMismatch { expected: n, got: len });
    }
    Ok(())
}

fn check_strip(w: &[Complex64]) -> Result<()> {
    match w.iter().find(|z| !(z.re > 0.0)) {
        Some(z) => Err(PricingError::Pole(z.re)),
        None => Ok(()),
    }
}

/// Ψ(u) = ½uᵀΣu − iμᵀu, bilinear (no conjugation).
pub fn char_exponent(u: &[Complex64], cov: &CovStruct) -> Result<Complex64> {
    let n = cov.n();
    check_dim(u.len(), n)?;
    let mut quad = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            quad += u[i] * u[j] * cov.sigma_at(i, j);
        }
    }
    let lin: Complex64 = u.iter().zip(cov.drift()).map(|(z, m)| z * m).sum();
    Ok(0.5 * quad - Complex64::i() * lin)
}

/// Φ(u; t) = exp(−tΨ(u)).
pub fn char_function(u: &[Complex64], t: f64, cov: &CovStruct) -> Result<Complex64> {
    if t < 0.0 {
        return Err(PricingError::InvalidSpec(format!("negative time {t}")));
    }
    Ok((-t * char_exponent(u, cov)?).exp())
}

/// Ψ(wi) = −½wᵀΣw + μᵀw, the exponent along the strip without building u = wi.
pub fn exponent_on_strip(w: &[Complex64], cov: &CovStruct) -> Complex64 {
    let n = cov.n();
    let mut quad = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += w[j] * cov.sigma_at(i, j);
        }
        quad += w[i] * row;
    }
    let lin: Complex64 = w.iter().zip(cov.drift()).map(|(z, m)| z * m).sum();
    -0.5 * quad + lin
}

/// β_n(w) = ∏Γ(wⱼ)/Γ(Σw), evaluated in log space.
pub fn multinomial_beta(w: &[Complex64]) -> Result<Complex64> {
    check_strip(w)?;
    Ok(ln_beta(w).exp())
}

fn ln_beta(w: &[Complex64]) -> Complex64 {
    if w.len() == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let sum: Complex64 = w.iter().sum();
    w.iter().map(|&z| ln_gamma(z)).sum::<Complex64>() - ln_gamma(sum)
}

/// θ̂(w) = β_n(w)·K^{1+Σw}/((Σw)(Σw+1)).
pub fn payoff_mellin(w: &[Complex64], strike: f64) -> Result<Complex64> {
    check_strip(w)?;
    if !(strike > 0.0) {
        return Err(PricingError::InvalidSpec("strike must be positive".into()));
    }
    let s: Complex64 = w.iter().sum();
    Ok((ln_beta(w) + (1.0 + s) * strike.ln()).exp() / (s * (s + 1.0)))
}

/// f̂(w) = β_n(w)(S*)^{Σw}/(Σw)·[qᵀw·S*/(Σw+1) − rK].
pub fn early_exercise_mellin(w: &[Complex64], s_star: f64, spec: &BasketSpec) -> Result<Complex64> {
    check_dim(w.len(), spec.n())?;
    check_strip(w)?;
    if !(s_star > 0.0) {
        return Err(PricingError::InvalidSpec(format!("critical price must be positive, got {s_star}")));
    }
    let s: Complex64 = w.iter().sum();
    let qw: Complex64 = w.iter().zip(spec.dividends()).map(|(z, q)| z * q).sum();
    let bracket = qw * s_star / (s + 1.0) - spec.rate() * spec.strike();
    Ok((ln_beta(w) + s * s_star.ln()).exp() / s * bracket)
}

/// Strip point with the w-only quantities precomputed for repeated evaluation.
#[derive(Debug, Clone)]
pub struct StripPoint {
    pub w: Vec<Complex64>,
    pub sum: Complex64,
    pub ln_beta: Complex64,
    pub q_dot_w: Complex64,
    /// Ψ(wi) + r, the decay rate of the discounted characteristic function.
    pub decay: Complex64,
}

impl StripPoint {
    pub fn new(w: Vec<Complex64>, spec: &BasketSpec, cov: &CovStruct) -> Result<Self> {
        check_dim(w.len(), spec.n())?;
        check_strip(&w)?;
        let sum = w.iter().sum();
        let q_dot_w = w.iter().zip(spec.dividends()).map(|(z, q)| z * q).sum();
        let decay = exponent_on_strip(&w, cov) + spec.rate();
        Ok(Self { ln_beta: ln_beta(&w), w, sum, q_dot_w, decay })
    }

    pub fn payoff(&self, strike: f64) -> Complex64 {
        let s = self.sum;
        (self.ln_beta + (1.0 + s) * strike.ln()).exp() / (s * (s + 1.0))
    }

    /// f̂ at critical price `s_star`; zero when there is no exercise region.
    pub fn early_exercise(&self, s_star: f64, rate: f64, strike: f64) -> Complex64 {
        if s_star <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let s = self.sum;
        let bracket = self.q_dot_w * s_star / (s + 1.0) - rate * strike;
        (self.ln_beta + s * s_star.ln()).exp() / s * bracket
    }

    /// Φ(wi; t)·e^{−rt}.
    pub fn discounted_cf(&self, t: f64) -> Complex64 {
        (-t * self.decay).exp()
    }
}
