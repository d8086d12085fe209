use super::grid::MellinFftGrid;
use crate::error::{PricingError, Result};
use crate::market::{BasketSpec, CovStruct};
use crate::mellin::StripPoint;
use crate::schedule::{premium_schedule, PremiumConfig, PremiumNode};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceStyle {
    EuropeanPut,
    AmericanPut,
    /// American minus European.
    EarlyExercisePremium,
}

impl SurfaceStyle {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceStyle::EuropeanPut => "european_put",
            SurfaceStyle::AmericanPut => "american_put",
            SurfaceStyle::EarlyExercisePremium => "early_exercise_premium",
        }
    }

    pub fn needs_premium(&self) -> bool {
        !matches!(self, SurfaceStyle::EuropeanPut)
    }
}

/// Weights applied over the b-lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum QuadratureWeights {
    /// Plain trapezoid, α ≡ 1.
    #[default]
    Flat,
    /// Alternating α(Σj) = (3 + (−1)^{1+Σj} − δ_{Σj})/3.
    Simpson,
}

/// α(Σj) = (3 + (−1)^{1+Σj} − δ_{Σj})/3.
pub fn simpson_weight(j: &[usize]) -> f64 {
    let s: usize = j.iter().sum();
    let sign = if s % 2 == 1 { 1.0 } else { -1.0 };
    let kron = if s == 0 { 1.0 } else { 0.0 };
    (3.0 + sign - kron) / 3.0
}

impl QuadratureWeights {
    pub fn weight(&self, j: &[usize]) -> f64 {
        match self {
            QuadratureWeights::Flat => 1.0,
            QuadratureWeights::Simpson => simpson_weight(j),
        }
    }
}

/// Discounted transform of the put value at one strip point, without the
/// lattice centering sign.
#[derive(Debug, Clone)]
pub struct PutIntegrand {
    pub spec: BasketSpec,
    pub cov: CovStruct,
    pub tau: f64,
    pub style: SurfaceStyle,
    pub nodes: Vec<PremiumNode>,
}

impl PutIntegrand {
    pub fn new(spec: &BasketSpec, tau: f64, style: SurfaceStyle, premium: &PremiumConfig) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(PricingError::InvalidSpec(format!("tau must be non-negative, got {tau}")));
        }
        let nodes = if style.needs_premium() {
            if spec.n() != 1 {
                return Err(PricingError::Unsupported("American pricing needs a single asset".into()));
            }
            if tau > 0.0 {
                premium_schedule(spec, tau, premium)?
            } else {
                Vec::new()
            }
        } else {
            Vec::new()
        };
        Ok(Self::with_nodes(spec, tau, style, nodes))
    }

    pub fn with_nodes(spec: &BasketSpec, tau: f64, style: SurfaceStyle, nodes: Vec<PremiumNode>) -> Self {
        Self { spec: spec.clone(), cov: CovStruct::new(spec), tau, style, nodes }
    }

    pub fn point(&self, w: Vec<Complex64>) -> Result<StripPoint> {
        StripPoint::new(w, &self.spec, &self.cov)
    }

    /// θ̂(w)Φ(wi; τ)e^{−rτ}.
    pub fn european(&self, p: &StripPoint) -> Complex64 {
        p.payoff(self.spec.strike()) * p.discounted_cf(self.tau)
    }

    /// Σₗ wₗ f̂(w; S*ₗ)Φ(wi; tₗ)e^{−rtₗ}.
    pub fn premium(&self, p: &StripPoint) -> Complex64 {
        let (r, k) = (self.spec.rate(), self.spec.strike());
        self.nodes.iter().map(|n| n.weight * p.early_exercise(n.s_star, r, k) * p.discounted_cf(n.t)).sum()
    }

    pub fn eval(&self, p: &StripPoint) -> Complex64 {
        match self.style {
            SurfaceStyle::EuropeanPut => self.european(p),
            SurfaceStyle::AmericanPut => self.european(p) - self.premium(p),
            SurfaceStyle::EarlyExercisePremium => -self.premium(p),
        }
    }
}

fn centering_sign(j: &[usize]) -> f64 {
    if j.iter().sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn strip_point_at(j: &[usize], grid: &MellinFftGrid) -> Vec<Complex64> {
    j.iter().enumerate().map(|(d, &jd)| Complex64::new(grid.strip[d], grid.b(d, jd))).collect()
}

/// ζ_E at lattice index j, including the centering sign (−1)^{Σj}.
pub fn integrand_european(j: &[usize], grid: &MellinFftGrid, spec: &BasketSpec, tau: f64) -> Result<Complex64> {
    let f = PutIntegrand::with_nodes(spec, tau, SurfaceStyle::EuropeanPut, Vec::new());
    let p = f.point(strip_point_at(j, grid))?;
    Ok(centering_sign(j) * f.european(&p))
}

/// ζ_EEP at lattice index j and premium node `node`, including the centering sign.
pub fn integrand_premium(j: &[usize], node: &PremiumNode, grid: &MellinFftGrid, spec: &BasketSpec) -> Result<Complex64> {
    let cov = CovStruct::new(spec);
    let p = StripPoint::new(strip_point_at(j, grid), spec, &cov)?;
    Ok(centering_sign(j) * p.early_exercise(node.s_star, spec.rate(), spec.strike()) * p.discounted_cf(node.t))
}
