use crate::special::{norm_cdf, norm_pdf};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptionKind {
    Put,
    Call,
}

/// Closed-form value and sensitivities. `theta` is ∂V/∂τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsGreeks {
    pub price: f64,
    pub delta: f64,
    pub gamma: f64,
    pub theta: f64,
    pub rho: f64,
    pub vega: f64,
    pub dividend_rho: f64,
}

/// Black–Scholes value with continuous dividend yield.
pub fn black_scholes(s: f64, k: f64, r: f64, q: f64, sigma: f64, tau: f64, kind: OptionKind) -> f64 {
    black_scholes_greeks(s, k, r, q, sigma, tau, kind).price
}

pub fn black_scholes_greeks(s: f64, k: f64, r: f64, q: f64, sigma: f64, tau: f64, kind: OptionKind) -> BsGreeks {
    let sq = sigma * tau.sqrt();
    let d1 = ((s / k).ln() + (r - q + 0.5 * sigma * sigma) * tau) / sq;
    let d2 = d1 - sq;
    let (dq, dr) = ((-q * tau).exp(), (-r * tau).exp());
    let pdf = norm_pdf(d1);
    let gamma = dq * pdf / (s * sq);
    let vega = s * dq * pdf * tau.sqrt();
    let decay = s * dq * pdf * sigma / (2.0 * tau.sqrt());
    match kind {
        OptionKind::Put => {
            let (n1, n2) = (norm_cdf(-d1), norm_cdf(-d2));
            BsGreeks {
                price: k * dr * n2 - s * dq * n1,
                delta: -dq * n1,
                gamma,
                theta: q * s * dq * n1 - r * k * dr * n2 + decay,
                rho: -tau * k * dr * n2,
                vega,
                dividend_rho: tau * s * dq * n1,
            }
        }
        OptionKind::Call => {
            let (n1, n2) = (norm_cdf(d1), norm_cdf(d2));
            BsGreeks {
                price: s * dq * n1 - k * dr * n2,
                delta: dq * n1,
                gamma,
                theta: -q * s * dq * n1 + r * k * dr * n2 + decay,
                rho: tau * k * dr * n2,
                vega,
                dividend_rho: -tau * s * dq * n1,
            }
        }
    }
}
