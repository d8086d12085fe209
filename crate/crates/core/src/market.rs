//! Contract and market data.

use crate::error::{PricingError, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const PSD_FLOOR: f64 = -1e-10;

/// Basket put contract together with its market parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasketSpec {
    strike: f64,
    maturity: f64,
    rate: f64,
    dividends: Vec<f64>,
    vols: Vec<f64>,
    /// Row-major n×n correlation matrix.
    corr: Vec<f64>,
}

impl BasketSpec {
    pub fn new(
        strike: f64,
        maturity: f64,
        rate: f64,
        dividends: Vec<f64>,
        vols: Vec<f64>,
        corr: Vec<f64>,
    ) -> Result<Self> {
        let n = vols.len();
        let bad = |m: &str| Err(PricingError::InvalidSpec(m.to_string()));
        if n == 0 {
            return bad("at least one asset is required");
        }
        if dividends.len() != n {
            return Err(PricingError::DimensionMismatch { expected: n, got: dividends.len() });
        }
        if corr.len() != n * n {
            return Err(PricingError::DimensionMismatch { expected: n * n, got: corr.len() });
        }
        if !(strike.is_finite() && strike > 0.0) {
            return bad("strike must be positive");
        }
        if !(maturity.is_finite() && maturity > 0.0) {
            return bad("maturity must be positive");
        }
        if !(rate.is_finite() && rate >= 0.0) {
            return bad("rate must be non-negative");
        }
        if dividends.iter().any(|q| !(q.is_finite() && *q >= 0.0)) {
            return bad("dividend yields must be non-negative");
        }
        if vols.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return bad("volatilities must be strictly positive");
        }
        for i in 0..n {
            if corr[i * n + i] != 1.0 {
                return bad("correlation diagonal must be 1");
            }
            for j in 0..n {
                let c = corr[i * n + j];
                if !(-1.0..=1.0).contains(&c) {
                    return bad("correlation entries must lie in [-1, 1]");
                }
                if (c - corr[j * n + i]).abs() > 1e-14 {
                    return bad("correlation matrix must be symmetric");
                }
            }
        }
        let corr = clip_psd(n, corr)?;
        Ok(Self { strike, maturity, rate, dividends, vols, corr })
    }

    /// Single-asset contract.
    pub fn single(strike: f64, maturity: f64, rate: f64, dividend: f64, vol: f64) -> Result<Self> {
        Self::new(strike, maturity, rate, vec![dividend], vec![vol], vec![1.0])
    }

    pub fn n(&self) -> usize {
        self.vols.len()
    }
    pub fn strike(&self) -> f64 {
        self.strike
    }
    pub fn maturity(&self) -> f64 {
        self.maturity
    }
    pub fn rate(&self) -> f64 {
        self.rate
    }
    pub fn dividends(&self) -> &[f64] {
        &self.dividends
    }
    pub fn vols(&self) -> &[f64] {
        &self.vols
    }
    pub fn corr(&self) -> &[f64] {
        &self.corr
    }
    pub fn corr_at(&self, i: usize, j: usize) -> f64 {
        self.corr[i * self.n() + j]
    }

    /// Copy with selected scalar parameters replaced; used for bumps and symmetry.
    pub fn with_params(&self, strike: f64, rate: f64, dividends: Vec<f64>, vols: Vec<f64>) -> Result<Self> {
        Self::new(strike, self.maturity, rate, dividends, vols, self.corr.clone())
    }

    pub fn with_maturity(&self, maturity: f64) -> Result<Self> {
        Self::new(self.strike, maturity, self.rate, self.dividends.clone(), self.vols.clone(), self.corr.clone())
    }

    pub(crate) fn require_single(&self, what: &str) -> Result<()> {
        if self.n() != 1 {
            return Err(PricingError::Unsupported(format!("{what} requires a single asset, got n = {}", self.n())));
        }
        Ok(())
    }
}

/// Accepts tiny negative eigenvalues from rounding and projects them to zero.
fn clip_psd(n: usize, corr: Vec<f64>) -> Result<Vec<f64>> {
    if n == 1 {
        return Ok(corr);
    }
    let m = DMatrix::from_row_slice(n, n, &corr);
    let eig = m.clone().symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min < PSD_FLOOR {
        return Err(PricingError::InvalidSpec(format!(
            "correlation matrix is not positive semidefinite (smallest eigenvalue {min:e})"
        )));
    }
    if min >= 0.0 {
        return Ok(corr);
    }
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let fixed = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = if i == j { 1.0 } else { 0.5 * (fixed[(i, j)] + fixed[(j, i)]) };
        }
    }
    Ok(out)
}

/// Covariance matrix and risk-neutral drift derived from a [`BasketSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct CovStruct {
    n: usize,
    sigma: Vec<f64>,
    mu: Vec<f64>,
}

impl CovStruct {
    pub fn new(spec: &BasketSpec) -> Self {
        let n = spec.n();
        let v = spec.vols();
        let mut sigma = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                sigma[i * n + j] = spec.corr_at(i, j) * v[i] * v[j];
            }
        }
        Self { n, sigma, mu: crate::mellin::riskneutral_drift(spec) }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    /// Row-major covariance Σᵢⱼ = ρᵢⱼσᵢσⱼ.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }
    pub fn sigma_at(&self, i: usize, j: usize) -> f64 {
        self.sigma[i * self.n + j]
    }
    pub fn drift(&self) -> &[f64] {
        &self.mu
    }
}

/// A point w = a + ib on the integration strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ComplexPoint {
    pub fn new(re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if re.len() != im.len() {
            return Err(PricingError::DimensionMismatch { expected: re.len(), got: im.len() });
        }
        if let Some(&a) = re.iter().find(|a| !(**a > 0.0)) {
            return Err(PricingError::Pole(a));
        }
        Ok(Self { re, im })
    }

    pub fn re(&self) -> &[f64] {
        &self.re
    }
    pub fn im(&self) -> &[f64] {
        &self.im
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.re.iter().zip(&self.im).map(|(&a, &b)| Complex64::new(a, b)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_inputs() {
        assert!(BasketSpec::single(100.0, 1.0, 0.05, 0.0, 0.0).is_err());
        assert!(BasketSpec::single(-1.0, 1.0, 0.05, 0.0, 0.2).is_err());
        assert!(BasketSpec::new(100.0, 1.0, 0.05, vec![0.0], vec![0.2, 0.3], vec![1.0; 4]).is_err());
        let asym = vec![1.0, 0.5, 0.4, 1.0];
        assert!(BasketSpec::new(100.0, 1.0, 0.05, vec![0.0; 2], vec![0.2; 2], asym).is_err());
        let not_psd = vec![1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0];
        assert!(BasketSpec::new(100.0, 1.0, 0.05, vec![0.0; 3], vec![0.2; 3], not_psd).is_err());
    }

    #[test]
    fn singular_correlation_accepted() {
        let s = BasketSpec::new(100.0, 1.0, 0.05, vec![0.0; 2], vec![0.2; 2], vec![1.0; 4]).unwrap();
        assert_eq!(s.corr_at(0, 1), 1.0);
    }

    #[test]
    fn covariance_entries() {
        let s = BasketSpec::new(100.0, 1.0, 0.05, vec![0.0, 0.02], vec![0.2, 0.3], vec![1.0, 0.5, 0.5, 1.0]).unwrap();
        let c = CovStruct::new(&s);
        assert!((c.sigma_at(0, 1) - 0.03).abs() < 1e-16);
        assert!((c.sigma_at(1, 1) - 0.09).abs() < 1e-16);
    }

    #[test]
    fn complex_point_strip() {
        assert!(ComplexPoint::new(vec![0.0], vec![1.0]).is_err());
        let p = ComplexPoint::new(vec![1.0, 2.0], vec![3.0, -1.0]).unwrap();
        assert_eq!(p.to_complex()[1], Complex64::new(2.0, -1.0));
    }
}
