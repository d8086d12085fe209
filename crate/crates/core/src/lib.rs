//! Mellin-transform pricing of European and American basket puts.
//!
//! Prices come from FFT inversion of closed-form Mellin transforms along a
//! vertical strip, with an early-exercise premium driven by an approximate
//! critical-price curve. A sine–cosine series inversion, Greeks, and
//! independent oracles (binomial, Black–Scholes, Monte Carlo, direct
//! quadrature) are provided alongside.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod boundary;
pub mod error;
pub mod fft;
pub mod market;
pub mod mellin;
pub mod roots;
pub mod schedule;
pub mod special;

pub use boundary::{boundary_curve, critical_price_approx, critical_price_to_expiry, BoundaryCurve, BoundaryFormula, DeltaForm, DividendFactor};
pub use error::{PricingError, Result};
pub use fft::{boundary_residual_cap, build_grid, price_surface, FftConfig, GridParams, MellinFftGrid, PriceSurface, Quote, QuadratureWeights, SurfaceStyle};
pub use market::{BasketSpec, ComplexPoint, CovStruct};
pub use schedule::{BoundaryAlignment, PremiumConfig, TimeRule};

pub mod greeks;
pub mod oracles;
pub mod reference;
pub mod series;

pub use greeks::{greek, greek_fd, greek_multiplier, GreekKind, MultiplierMode};
pub use series::{dw_price, DwConfig};
