//! Time grid and boundary sampling for the early-exercise premium, shared by
//! the FFT and series pricers.

use crate::boundary::{boundary_curve, critical_price_to_expiry, BoundaryCurve, BoundaryFormula};
use crate::error::{PricingError, Result};
use crate::market::BasketSpec;
use serde::{Deserialize, Serialize};

/// Quadrature weights of the premium time integral on tₗ = lτ/(M−1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum TimeRule {
    /// τ/(M−1) with half weights at both ends.
    #[default]
    Trapezoid,
    /// τ/M at every node.
    Flat,
}

/// Which boundary sample enters the premium term at node l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BoundaryAlignment {
    /// S*(tₗ).
    Aligned,
    /// S*(tₗ₊₁), the last node keeping the expiry value.
    #[default]
    StepAhead,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PremiumConfig {
    pub time_steps: usize,
    pub rule: TimeRule,
    pub alignment: BoundaryAlignment,
    pub formula: BoundaryFormula,
}

impl Default for PremiumConfig {
    fn default() -> Self {
        Self {
            time_steps: 250,
            rule: TimeRule::default(),
            alignment: BoundaryAlignment::default(),
            formula: BoundaryFormula::default(),
        }
    }
}

/// One node of the premium time sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PremiumNode {
    /// Elapsed time from valuation.
    pub t: f64,
    pub weight: f64,
    pub s_star: f64,
}

/// Nodes and weights; M = 1 collapses to a single node at 0 with weight τ.
pub fn time_grid(tau: f64, m: usize, rule: TimeRule) -> Result<(Vec<f64>, Vec<f64>)> {
    if m == 0 {
        return Err(PricingError::InvalidGrid("at least one time step is required".into()));
    }
    if m == 1 {
        return Ok((vec![0.0], vec![tau]));
    }
    let h = tau / (m - 1) as f64;
    let nodes = (0..m).map(|l| l as f64 * h).collect();
    let weights = match rule {
        TimeRule::Trapezoid => (0..m).map(|l| if l == 0 || l == m - 1 { 0.5 * h } else { h }).collect(),
        TimeRule::Flat => vec![tau / m as f64; m],
    };
    Ok((nodes, weights))
}

/// Attach boundary samples from `curve` to the time grid.
pub fn premium_nodes(curve: &BoundaryCurve, tau: f64, rule: TimeRule, alignment: BoundaryAlignment) -> Result<Vec<PremiumNode>> {
    let m = curve.values.len();
    let (nodes, weights) = time_grid(tau, m, rule)?;
    Ok((0..m)
        .map(|l| {
            let idx = match alignment {
                BoundaryAlignment::Aligned => l,
                BoundaryAlignment::StepAhead => (l + 1).min(m - 1),
            };
            PremiumNode { t: nodes[l], weight: weights[l], s_star: curve.values[idx] }
        })
        .collect())
}

/// Premium schedule for a single-asset put with life τ, using the cached boundary.
pub fn premium_schedule(spec: &BasketSpec, tau: f64, cfg: &PremiumConfig) -> Result<Vec<PremiumNode>> {
    spec.require_single("the early-exercise premium")?;
    if cfg.time_steps == 1 {
        let s_star = critical_price_to_expiry(tau, spec, cfg.formula)?;
        return Ok(vec![PremiumNode { t: 0.0, weight: tau, s_star }]);
    }
    let curve = boundary_curve(spec, cfg.time_steps, tau, cfg.formula)?;
    premium_nodes(&curve, tau, cfg.rule, cfg.alignment)
}
