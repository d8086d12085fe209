//! Independent pricing references used to validate the transform pricers.

mod binomial;
mod black_scholes;
mod monte_carlo;

pub use binomial::{binomial_price, BinomialStyle};
pub use black_scholes::{black_scholes, black_scholes_greeks, BsGreeks, OptionKind};
pub use monte_carlo::{cholesky_psd, mc_basket_euro_put, McConfig, McEstimate};

use crate::error::Result;
use crate::fft::{price_direct, FftConfig, MellinFftGrid, SurfaceStyle};
use crate::market::BasketSpec;

/// Trapezoid sum of the inversion integral at a single spot, without the FFT.
pub fn price_direct_trapezoid(
    spec: &BasketSpec,
    grid: &MellinFftGrid,
    tau: f64,
    spot: &[f64],
    style: SurfaceStyle,
    cfg: &FftConfig,
) -> Result<f64> {
    price_direct(spec, grid, tau, spot, style, cfg)
}
