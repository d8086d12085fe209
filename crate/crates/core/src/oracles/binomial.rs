use crate::error::{PricingError, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinomialStyle {
    EuroPut,
    EuroCall,
    AmerPut,
    AmerCall,
}

/// Cox–Ross–Rubinstein lattice with node prices kept in log space.
pub fn binomial_price(s: f64, k: f64, r: f64, q: f64, sigma: f64, tau: f64, steps: usize, style: BinomialStyle) -> Result<f64> {
    if steps == 0 {
        return Err(PricingError::InvalidGrid("binomial lattice needs at least one step".into()));
    }
    let dt = tau / steps as f64;
    let log_u = sigma * dt.sqrt();
    let (u, d) = (log_u.exp(), (-log_u).exp());
    let mut p = (((r - q) * dt).exp() - d) / (u - d);
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(PricingError::InvalidProbability(p));
    }
    p = p.clamp(0.0, 1.0);
    let disc = (-r * dt).exp();
    let (pu, pd) = (disc * p, disc * (1.0 - p));
    let log_s = s.ln();
    let put = matches!(style, BinomialStyle::EuroPut | BinomialStyle::AmerPut);
    let american = matches!(style, BinomialStyle::AmerPut | BinomialStyle::AmerCall);
    let payoff = |i: usize, j: usize| {
        let st = (log_s + (2.0 * j as f64 - i as f64) * log_u).exp();
        if put {
            (k - st).max(0.0)
        } else {
            (st - k).max(0.0)
        }
    };
    let mut v: Vec<f64> = (0..=steps).map(|j| payoff(steps, j)).collect();
    for i in (0..steps).rev() {
        for j in 0..=i {
            let cont = pu * v[j + 1] + pd * v[j];
            v[j] = if american { cont.max(payoff(i, j)) } else { cont };
        }
    }
    Ok(v[0])
}
