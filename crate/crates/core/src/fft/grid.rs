use crate::error::{PricingError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// User-facing grid parameters before landing on a target price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    /// Points per dimension N.
    pub points: usize,
    /// Strip abscissa a, shared by all dimensions.
    pub strip: f64,
    /// Time steps M of the premium integral.
    pub time_steps: usize,
    /// Preferred imaginary-axis spacing; the landing rule picks the nearest admissible one.
    pub target_spacing: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self { points: 1 << 14, strip: 1.0, time_steps: 250, target_spacing: 0.25 }
    }
}

/// Lattice b_j = (j − N/2)Δ on the strip and its reciprocal s_k = (k − N/2)λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MellinFftGrid {
    pub dims: usize,
    pub points: usize,
    pub strip: Vec<f64>,
    pub spacing: Vec<f64>,
    pub log_spacing: Vec<f64>,
    pub time_steps: usize,
    pub target_log: Option<Vec<f64>>,
    pub landing: Option<Vec<usize>>,
}

fn check_points(points: usize, time_steps: usize) -> Result<()> {
    if points < 4 || !points.is_power_of_two() {
        return Err(PricingError::InvalidGrid(format!("N must be a power of two >= 4, got {points}")));
    }
    if time_steps < 2 {
        return Err(PricingError::InvalidGrid(format!("M must be >= 2, got {time_steps}")));
    }
    Ok(())
}

fn check_strip(strip: &[f64]) -> Result<()> {
    match strip.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        Some(&a) => Err(PricingError::Pole(a)),
        None => Ok(()),
    }
}

impl MellinFftGrid {
    /// Grid with explicit spacings Δᵢ and no landing target.
    pub fn with_spacing(points: usize, strip: Vec<f64>, spacing: Vec<f64>, time_steps: usize) -> Result<Self> {
        check_points(points, time_steps)?;
        check_strip(&strip)?;
        if strip.len() != spacing.len() || strip.is_empty() {
            return Err(PricingError::DimensionMismatch { expected: strip.len(), got: spacing.len() });
        }
        if spacing.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(PricingError::InvalidGrid("spacings must be positive".into()));
        }
        let log_spacing = spacing.iter().map(|d| 2.0 * PI / (points as f64 * d)).collect();
        Ok(Self { dims: strip.len(), points, strip, spacing, log_spacing, time_steps, target_log: None, landing: None })
    }

    /// Total number of lattice points Nⁿ.
    pub fn len(&self) -> usize {
        self.points.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Δ_b = ∏Δᵢ.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn half(&self) -> usize {
        self.points / 2
    }

    pub fn b(&self, dim: usize, j: usize) -> f64 {
        (j as f64 - self.half() as f64) * self.spacing[dim]
    }

    pub fn log_price(&self, dim: usize, k: usize) -> f64 {
        (k as f64 - self.half() as f64) * self.log_spacing[dim]
    }

    /// Row-major multi-index of a flat position.
    pub fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for d in (0..self.dims).rev() {
            out[d] = flat % self.points;
            flat /= self.points;
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Log-price bounds [−(N/2)λ, (N/2 − 1)λ] in one dimension.
    pub fn log_range(&self, dim: usize) -> (f64, f64) {
        let h = self.half() as f64;
        (-h * self.log_spacing[dim], (h - 1.0) * self.log_spacing[dim])
    }
}

fn landing_offset(log_s: f64, points: usize, lambda0: f64) -> Result<i64> {
    let half = (points / 2) as i64;
    let mut off = (log_s / lambda0).round() as i64;
    if off == 0 {
        off = if log_s > 0.0 { 1 } else { -1 };
    }
    if log_s < 0.0 {
        off = off.clamp(-half, -1);
    } else {
        off = off.clamp(1, half - 1);
    }
    let lambda = log_s / off as f64;
    if lambda > 1.0 {
        return Err(PricingError::GridTooCoarse(lambda));
    }
    if !(lambda > 0.0) {
        return Err(PricingError::NoAdmissibleK(log_s));
    }
    Ok(off)
}

/// Grid whose reciprocal lattice passes exactly through ln `target_s`.
///
/// Each dimension takes the landing offset k − N/2 nearest to
/// ln Sᵢ/λ₀ with λ₀ = 2π/(N·Δ₀); negative offsets serve S < 1 and
/// S = 1 lands at N/2 with λ₀ itself. `k_hint` overrides the choice.
pub fn build_grid(params: &GridParams, target_s: &[f64], k_hint: Option<&[usize]>) -> Result<MellinFftGrid> {
    let n = target_s.len();
    if n == 0 {
        return Err(PricingError::InvalidGrid("at least one dimension is required".into()));
    }
    check_points(params.points, params.time_steps)?;
    if target_s.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(PricingError::InvalidSpec("target prices must be positive".into()));
    }
    if let Some(h) = k_hint {
        if h.len() != n {
            return Err(PricingError::DimensionMismatch { expected: n, got: h.len() });
        }
    }
    let points = params.points;
    let half = points / 2;
    let lambda0 = 2.0 * PI / (points as f64 * params.target_spacing);
    let mut log_spacing = Vec::with_capacity(n);
    let mut landing = Vec::with_capacity(n);
    for (i, &s) in target_s.iter().enumerate() {
        let ls = s.ln();
        let (k, lambda) = match k_hint.map(|h| h[i]) {
            Some(k) => {
                let off = k as i64 - half as i64;
                if k >= points || (off == 0) != (ls == 0.0) || (off != 0 && ls / off as f64 <= 0.0) {
                    return Err(PricingError::NoAdmissibleK(ls));
                }
                let lambda = if off == 0 { lambda0 } else { ls / off as f64 };
                if lambda > 1.0 {
                    return Err(PricingError::GridTooCoarse(lambda));
                }
                (k, lambda)
            }
            None if ls == 0.0 => (half, lambda0),
            None => {
                let off = landing_offset(ls, points, lambda0)?;
                ((half as i64 + off) as usize, ls / off as f64)
            }
        };
        log_spacing.push(lambda);
        landing.push(k);
    }
    let spacing = log_spacing.iter().map(|l| 2.0 * PI / (points as f64 * l)).collect();
    check_strip(&[params.strip])?;
    Ok(MellinFftGrid {
        dims: n,
        points,
        strip: vec![params.strip; n],
        spacing,
        log_spacing,
        time_steps: params.time_steps,
        target_log: Some(target_s.iter().map(|s| s.ln()).collect()),
        landing: Some(landing),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_spacing() {
        let g = build_grid(&GridParams::default(), &[100.0], None).unwrap();
        let k = g.landing.as_ref().unwrap()[0];
        assert_eq!(k - g.half(), 3002);
        assert!((g.log_spacing[0] - 1.53403e-3).abs() < 1e-8);
        assert!((g.spacing[0] - 0.2499913).abs() < 5e-8);
        assert!((g.log_price(0, k) - 100f64.ln()).abs() < 1e-12);
        assert!((g.spacing[0] * g.log_spacing[0] - 2.0 * PI / 16384.0).abs() < 1e-18);
    }

    #[test]
    fn unit_and_small_prices() {
        let p = GridParams { points: 64, ..Default::default() };
        let g = build_grid(&p, &[1.0, 0.5], None).unwrap();
        let l = g.landing.clone().unwrap();
        assert_eq!(l[0], 32);
        assert!(l[1] < 32);
        assert!((g.log_price(1, l[1]) - 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn hint_and_errors() {
        let p = GridParams::default();
        let g = build_grid(&p, &[100.0], Some(&[8192 + 3002])).unwrap();
        assert!((g.spacing[0] - 0.2499913).abs() < 5e-8);
        assert!(build_grid(&GridParams { points: 12, ..p.clone() }, &[100.0], None).is_err());
        assert!(matches!(
            build_grid(&GridParams { points: 4, ..p.clone() }, &[1e6], None),
            Err(PricingError::GridTooCoarse(_))
        ));
        assert!(build_grid(&p, &[100.0], Some(&[100])).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = MellinFftGrid::with_spacing(8, vec![1.0; 3], vec![0.5; 3], 2).unwrap();
        let mut idx = [0; 3];
        for flat in [0, 7, 100, 511] {
            g.multi_index(flat, &mut idx);
            assert_eq!(g.flat_index(&idx), flat);
        }
    }
}
