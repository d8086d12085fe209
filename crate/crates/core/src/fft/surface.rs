use super::grid::{build_grid, GridParams, MellinFftGrid};
use super::integrand::{PutIntegrand, QuadratureWeights, SurfaceStyle};
use super::lattice::{direct_sum, invert_on_lattice};
use crate::error::{PricingError, Result};
use crate::market::BasketSpec;
use crate::boundary::BoundaryCurve;
use crate::schedule::{time_grid, BoundaryAlignment, PremiumConfig, PremiumNode};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Numerical settings of the FFT pricer beyond the grid itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FftConfig {
    pub weights: QuadratureWeights,
    pub premium: PremiumConfig,
    /// Imaginary residual bound as a fraction of K.
    pub imag_tolerance: f64,
    /// Negative values below −`negative_tolerance`·K count against the clamp budget.
    pub negative_tolerance: f64,
    /// Allowed fraction of such values on the central half of the lattice.
    pub clamp_budget: f64,
}

impl Default for FftConfig {
    fn default() -> Self {
        Self {
            weights: QuadratureWeights::Flat,
            premium: PremiumConfig::default(),
            imag_tolerance: 1e-6,
            negative_tolerance: 1e-6,
            clamp_budget: 0.01,
        }
    }
}

impl FftConfig {
    /// Premium settings with the step count taken from the grid.
    pub fn premium_for(&self, grid: &MellinFftGrid) -> PremiumConfig {
        PremiumConfig { time_steps: grid.time_steps, ..self.premium }
    }
}

/// Option values on the reciprocal log-price lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSurface {
    pub grid: MellinFftGrid,
    /// Row-major, N per dimension.
    pub values: Vec<f64>,
    pub style: SurfaceStyle,
    pub tau: f64,
    pub strike: f64,
    pub imag_residual: f64,
    /// Lattice points whose raw value was negative and was set to zero.
    pub clamped: usize,
}

/// A value read from a surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub value: f64,
    pub interpolated: bool,
}

/// Whether every coordinate of `idx` lies in the central half [N/4, 3N/4).
pub fn in_central_half(idx: &[usize], points: usize) -> bool {
    idx.iter().all(|&k| k >= points / 4 && k < 3 * points / 4)
}

/// FFT price surface of a basket put.
pub fn price_surface(spec: &BasketSpec, grid: &MellinFftGrid, tau: f64, style: SurfaceStyle, cfg: &FftConfig) -> Result<PriceSurface> {
    let integrand = PutIntegrand::new(spec, tau, style, &cfg.premium_for(grid))?;
    let inv = invert_on_lattice(grid, spec, cfg.weights, |p| Ok(integrand.eval(p)))?;
    let k = spec.strike();
    if !(inv.imag_residual < cfg.imag_tolerance * k) {
        return Err(PricingError::ImagResidualTooLarge { residual: inv.imag_residual, tolerance: cfg.imag_tolerance * k });
    }
    let mut values = inv.values;
    let (mut clamped, mut central, mut central_bad) = (0, 0, 0);
    let mut idx = vec![0; grid.dims];
    for (flat, v) in values.iter_mut().enumerate() {
        grid.multi_index(flat, &mut idx);
        let central_pt = in_central_half(&idx, grid.points);
        central += central_pt as usize;
        if *v < 0.0 {
            if central_pt && *v < -cfg.negative_tolerance * k {
                central_bad += 1;
            }
            clamped += 1;
            *v = 0.0;
        }
    }
    if central_bad as f64 > cfg.clamp_budget * central as f64 {
        return Err(PricingError::TooManyClamped { count: central_bad, total: central });
    }
    Ok(PriceSurface { grid: grid.clone(), values, style, tau, strike: k, imag_residual: inv.imag_residual, clamped })
}

/// Lattice-level value at one spot by direct summation (no FFT, no clamping).
pub fn price_direct(spec: &BasketSpec, grid: &MellinFftGrid, tau: f64, spot: &[f64], style: SurfaceStyle, cfg: &FftConfig) -> Result<f64> {
    let integrand = PutIntegrand::new(spec, tau, style, &cfg.premium_for(grid))?;
    let log_s: Vec<f64> = spot.iter().map(|s| s.ln()).collect();
    Ok(direct_sum(grid, spec, cfg.weights, &log_s, |p| Ok(integrand.eval(p)))?.re)
}

/// Multilinear interpolation in log price on a row-major lattice.
pub(crate) fn read_lattice(grid: &MellinFftGrid, values: &[f64], spot: &[f64]) -> Result<Quote> {
    if spot.len() != grid.dims {
        return Err(PricingError::DimensionMismatch { expected: grid.dims, got: spot.len() });
    }
    let half = grid.half() as f64;
    let mut base = vec![0usize; grid.dims];
    let mut frac = vec![0.0; grid.dims];
    let mut interpolated = false;
    for (d, &s) in spot.iter().enumerate() {
        let ls = s.ln();
        let (lo, hi) = grid.log_range(d);
        if !(ls >= lo - 1e-9 && ls <= hi + 1e-9) {
            return Err(PricingError::OutOfRange { log_s: ls, lo, hi });
        }
        let x = ls / grid.log_spacing[d] + half;
        let nearest = x.round().clamp(0.0, grid.points as f64 - 1.0);
        if (ls - grid.log_price(d, nearest as usize)).abs() <= 1e-9 {
            base[d] = nearest as usize;
            frac[d] = 0.0;
        } else {
            let k = (x.floor() as usize).min(grid.points - 2);
            base[d] = k;
            frac[d] = x - k as f64;
            interpolated = true;
        }
    }
    let mut value = 0.0;
    let mut idx = vec![0usize; grid.dims];
    for mask in 0..(1usize << grid.dims) {
        let mut wt = 1.0;
        for d in 0..grid.dims {
            let up = mask >> d & 1 == 1;
            if frac[d] == 0.0 && up {
                wt = 0.0;
                break;
            }
            idx[d] = base[d] + up as usize;
            wt *= if up { frac[d] } else { 1.0 - frac[d] };
        }
        if wt != 0.0 {
            value += wt * values[grid.flat_index(&idx)];
        }
    }
    Ok(Quote { value, interpolated })
}

impl PriceSurface {
    /// Value at `spot`: exact on lattice points, multilinear in log price otherwise.
    pub fn price_at(&self, spot: &[f64]) -> Result<Quote> {
        read_lattice(&self.grid, &self.values, spot)
    }

    /// Value at the grid's landing index.
    pub fn landing_value(&self) -> Option<f64> {
        self.grid.landing.as_ref().map(|k| self.values[self.grid.flat_index(k)])
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.grid.dims;
        let mut header: Vec<String> = (1..=n).map(|i| format!("index_{i}")).collect();
        header.extend((1..=n).map(|i| format!("logS_{i}")));
        header.extend((1..=n).map(|i| format!("S_{i}")));
        header.push("value".into());
        writeln!(out, "{}", header.join(","))?;
        let mut idx = vec![0usize; n];
        for (flat, v) in self.values.iter().enumerate() {
            self.grid.multi_index(flat, &mut idx);
            let logs: Vec<f64> = (0..n).map(|d| self.grid.log_price(d, idx[d])).collect();
            let mut row: Vec<String> = idx.iter().map(|k| k.to_string()).collect();
            row.extend(logs.iter().map(|l| l.to_string()));
            row.extend(logs.iter().map(|l| l.exp().to_string()));
            row.push(v.to_string());
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "grid": {
                "N": self.grid.points,
                "a": self.grid.strip,
                "delta": self.grid.spacing,
                "lambda": self.grid.log_spacing,
                "M": self.grid.time_steps,
            },
            "tau": self.tau,
            "style": self.style.name(),
            "values": self.values,
        })
    }
}

/// Put surface on a grid landing on `spot`, read at `spot`.
pub fn price_put(spec: &BasketSpec, spot: &[f64], tau: f64, style: SurfaceStyle, params: &GridParams, cfg: &FftConfig) -> Result<(Quote, PriceSurface)> {
    let grid = build_grid(params, spot, None)?;
    let surface = price_surface(spec, &grid, tau, style, cfg)?;
    Ok((surface.price_at(spot)?, surface))
}

/// American call via V_C(S, K, r, q) = V_P(K, S, q, r); the grid lands on ln K.
pub fn price_american_call(spot: f64, strike: f64, rate: f64, div: f64, vol: f64, tau: f64, params: &GridParams, cfg: &FftConfig) -> Result<(Quote, PriceSurface)> {
    let put = BasketSpec::single(spot, tau, div, rate, vol)?;
    price_put(&put, &[strike], tau, SurfaceStyle::AmericanPut, params, cfg)
}

/// European call by parity C = P + Se^{−qτ} − Ke^{−rτ}.
pub fn price_european_call(spot: f64, strike: f64, rate: f64, div: f64, vol: f64, tau: f64, params: &GridParams, cfg: &FftConfig) -> Result<(Quote, PriceSurface)> {
    let put = BasketSpec::single(strike, tau.max(f64::MIN_POSITIVE), rate, div, vol)?;
    let (q, s) = price_put(&put, &[spot], tau, SurfaceStyle::EuropeanPut, params, cfg)?;
    let value = q.value + spot * (-div * tau).exp() - strike * (-rate * tau).exp();
    Ok((Quote { value, ..q }, s))
}

/// Smooth-pasting diagnostic K − S*(t) − V_A(S*(t); T − t), with the premium
/// integrated over the remaining life against the interpolated `curve`.
/// Evaluated by a single-point trapezoid sum on `grid`.
pub fn boundary_residual_cap(curve: &BoundaryCurve, t: f64, spec: &BasketSpec, grid: &MellinFftGrid, cfg: &FftConfig) -> Result<f64> {
    spec.require_single("the boundary residual")?;
    let horizon = *curve.times.last().ok_or_else(|| PricingError::InvalidGrid("empty boundary curve".into()))?;
    let s_star = curve.at(t);
    let k = spec.strike();
    let theta = (horizon - t).max(0.0);
    let m = curve.values.len();
    let nodes = if theta > 0.0 {
        let (u, wt) = time_grid(theta, m, cfg.premium.rule)?;
        (0..m)
            .map(|l| {
                let at = match cfg.premium.alignment {
                    BoundaryAlignment::Aligned => u[l],
                    BoundaryAlignment::StepAhead => u[(l + 1).min(m - 1)],
                };
                PremiumNode { t: u[l], weight: wt[l], s_star: curve.at(t + at) }
            })
            .collect()
    } else {
        Vec::new()
    };
    let integrand = PutIntegrand::with_nodes(spec, theta, SurfaceStyle::AmericanPut, nodes);
    let value = direct_sum(grid, spec, cfg.weights, &[s_star.ln()], |p| Ok(integrand.eval(p)))?.re;
    Ok(k - s_star - value)
}
