use super::grid::MellinFftGrid;
use super::integrand::QuadratureWeights;
use super::ndfft::fft_nd;
use crate::error::{PricingError, Result};
use crate::mellin::StripPoint;
use crate::market::{BasketSpec, CovStruct};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Real lattice values with the largest discarded imaginary part.
pub(crate) struct Inversion {
    pub values: Vec<f64>,
    pub imag_residual: f64,
}

fn point(grid: &MellinFftGrid, j: &[usize], spec: &BasketSpec, cov: &CovStruct) -> Result<StripPoint> {
    let w = j.iter().enumerate().map(|(d, &jd)| Complex64::new(grid.strip[d], grid.b(d, jd))).collect();
    StripPoint::new(w, spec, cov)
}

/// Integrand at lattice index j. Entries on the unpaired edge b = −(N/2)Δ
/// average with their reflection at +(N/2)Δ, which shares the same DFT kernel,
/// so the real output is unchanged and the imaginary part cancels.
fn lattice_entry<F>(grid: &MellinFftGrid, j: &[usize], spec: &BasketSpec, cov: &CovStruct, f: &F) -> Result<Complex64>
where
    F: Fn(&StripPoint) -> Result<Complex64>,
{
    let edges: Vec<usize> = (0..grid.dims).filter(|&d| j[d] == 0).collect();
    if edges.is_empty() {
        return f(&point(grid, j, spec, cov)?);
    }
    let mut acc = Complex64::default();
    let mut flipped = j.to_vec();
    let combos = 1usize << edges.len();
    for mask in 0..combos {
        for (bit, &d) in edges.iter().enumerate() {
            flipped[d] = if mask >> bit & 1 == 1 { grid.points } else { 0 };
        }
        acc += f(&point(grid, &flipped, spec, cov)?)?;
    }
    Ok(acc / combos as f64)
}

/// V(s_k) = (−1)^{Σk}Δ_b/(2π)ⁿ·e^{−aᵀs_k}·FFT{α(−1)^{Σj}f(w_j)} on the whole lattice.
/// The imaginary residual is the max-norm over the central half.
pub(crate) fn invert_on_lattice<F>(
    grid: &MellinFftGrid,
    spec: &BasketSpec,
    weights: QuadratureWeights,
    f: F,
) -> Result<Inversion>
where
    F: Fn(&StripPoint) -> Result<Complex64> + Sync,
{
    if grid.dims != spec.n() {
        return Err(PricingError::DimensionMismatch { expected: spec.n(), got: grid.dims });
    }
    let cov = CovStruct::new(spec);
    let mut data = (0..grid.len())
        .into_par_iter()
        .map_init(
            || vec![0usize; grid.dims],
            |j, flat| {
                grid.multi_index(flat, j);
                let sign = if j.iter().sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 };
                Ok(lattice_entry(grid, j, spec, &cov, &f)? * (sign * weights.weight(j)))
            },
        )
        .collect::<Result<Vec<Complex64>>>()?;
    fft_nd(&mut data, grid.dims, grid.points);
    let scale = grid.cell_volume() / (2.0 * PI).powi(grid.dims as i32);
    let mut j = vec![0usize; grid.dims];
    let mut values = Vec::with_capacity(data.len());
    let mut imag_residual = 0.0f64;
    for (flat, y) in data.iter().enumerate() {
        grid.multi_index(flat, &mut j);
        let sign = if j.iter().sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 };
        let a_dot_s: f64 = (0..grid.dims).map(|d| grid.strip[d] * grid.log_price(d, j[d])).sum();
        let v = y * (sign * scale * (-a_dot_s).exp());
        values.push(v.re);
        // e^{−aᵀs} amplifies roundoff toward the lattice corners; judge the central half only
        if super::surface::in_central_half(&j, grid.points) {
            imag_residual = imag_residual.max(v.im.abs());
        }
    }
    Ok(Inversion { values, imag_residual })
}

/// Σ_j α_j f(w_j)S^{−w_j}·Δ_b/(2π)ⁿ at one spot, no FFT.
pub(crate) fn direct_sum<F>(
    grid: &MellinFftGrid,
    spec: &BasketSpec,
    weights: QuadratureWeights,
    log_s: &[f64],
    f: F,
) -> Result<Complex64>
where
    F: Fn(&StripPoint) -> Result<Complex64> + Sync,
{
    if grid.dims != spec.n() || log_s.len() != spec.n() {
        return Err(PricingError::DimensionMismatch { expected: spec.n(), got: log_s.len().min(grid.dims) });
    }
    let cov = CovStruct::new(spec);
    let terms = (0..grid.len())
        .into_par_iter()
        .map_init(
            || vec![0usize; grid.dims],
            |j, flat| {
                grid.multi_index(flat, j);
                let p = point(grid, j, spec, &cov)?;
                let kernel: Complex64 = p.w.iter().zip(log_s).map(|(w, x)| -w * x).sum();
                Ok(f(&p)? * kernel.exp() * weights.weight(j))
            },
        )
        .collect::<Result<Vec<Complex64>>>()?;
    // fixed-order reduction keeps the result independent of thread count
    let sum: Complex64 = terms.iter().sum();
    Ok(sum * grid.cell_volume() / (2.0 * PI).powi(grid.dims as i32))
}
