//! FFT inversion of the Mellin pricing integrals on a centered lattice.

mod grid;
mod integrand;
mod lattice;
mod ndfft;
mod surface;

pub use grid::{build_grid, GridParams, MellinFftGrid};
pub use integrand::{integrand_european, integrand_premium, simpson_weight, PutIntegrand, QuadratureWeights, SurfaceStyle};
pub use surface::{
    boundary_residual_cap, in_central_half, price_american_call, price_direct, price_european_call, price_put, price_surface, FftConfig,
    PriceSurface, Quote,
};

pub(crate) use lattice::invert_on_lattice;
pub(crate) use surface::read_lattice;
