//! Sensitivities from the inversion pipeline with multiplied integrands, and
//! finite-difference references.

use crate::error::{PricingError, Result};
use crate::fft::{invert_on_lattice, price_direct, read_lattice, FftConfig, MellinFftGrid, PutIntegrand, SurfaceStyle};
use crate::market::{BasketSpec, CovStruct};
use crate::mellin::StripPoint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Sensitivity selector; asset indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GreekKind {
    Delta1(usize),
    Delta2(usize, usize),
    Gamma(usize),
    /// ∂V/∂τ = −∂V/∂t.
    Theta,
    Rho,
    Nu(usize),
    Xi(usize),
}

impl GreekKind {
    pub fn name(&self) -> &'static str {
        match self {
            GreekKind::Delta1(_) => "delta",
            GreekKind::Delta2(..) => "cross_delta",
            GreekKind::Gamma(_) => "gamma",
            GreekKind::Theta => "theta",
            GreekKind::Rho => "rho",
            GreekKind::Nu(_) => "nu",
            GreekKind::Xi(_) => "xi",
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let ok = match *self {
            GreekKind::Delta1(i) | GreekKind::Gamma(i) | GreekKind::Nu(i) | GreekKind::Xi(i) => i < n,
            GreekKind::Delta2(i, j) => i < n && j < n && i != j,
            GreekKind::Theta | GreekKind::Rho => true,
        };
        if ok {
            Ok(())
        } else {
            Err(PricingError::InvalidSpec(format!("invalid greek indices {self:?} for n = {n}")))
        }
    }

    /// The six single-asset sensitivities.
    pub fn single_asset() -> [GreekKind; 6] {
        [
            GreekKind::Delta1(0),
            GreekKind::Gamma(0),
            GreekKind::Theta,
            GreekKind::Rho,
            GreekKind::Nu(0),
            GreekKind::Xi(0),
        ]
    }
}

/// Source of the multiplier factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum MultiplierMode {
    /// Differentiate S^{−w}, the discount and Φ directly.
    #[default]
    Kernel,
    /// Alternative closed-form factors; most disagree with finite differences.
    Alternate,
}

/// Factors (m_E, m_P) with V_greek = M⁻¹{m_E·E + Σₗ wₗ m_P(tₗ)·Pₗ} where
/// E = θ̂Φe^{−rτ} and Pₗ = f̂Φ(tₗ)e^{−rtₗ}, so that V = M⁻¹{E − Σₗ wₗPₗ}.
/// `s` is the elapsed time tₗ of the premium node.
pub fn greek_multiplier(
    kind: GreekKind,
    w: &[Complex64],
    spot: &[f64],
    tau: f64,
    s: f64,
    spec: &BasketSpec,
    mode: MultiplierMode,
) -> Result<(Complex64, Complex64)> {
    let n = spec.n();
    kind.validate(n)?;
    if w.len() != n || spot.len() != n {
        return Err(PricingError::DimensionMismatch { expected: n, got: w.len().min(spot.len()) });
    }
    let decay = crate::mellin::exponent_on_strip(w, &CovStruct::new(spec)) + spec.rate();
    Ok(multiplier(kind, w, spot, tau, s, spec, mode, decay))
}

/// [`greek_multiplier`] with Ψ(wi) + r supplied by the caller.
#[allow(clippy::too_many_arguments)]
fn multiplier(
    kind: GreekKind,
    w: &[Complex64],
    spot: &[f64],
    tau: f64,
    s: f64,
    spec: &BasketSpec,
    mode: MultiplierMode,
    d: Complex64,
) -> (Complex64, Complex64) {
    let n = spec.n();
    let sum: Complex64 = w.iter().sum();
    let one = Complex64::new(1.0, 0.0);
    let pair = |e: Complex64, p: Complex64| (e, p);
    match (kind, mode) {
        (GreekKind::Delta1(i), _) => {
            let m = w[i] / spot[i];
            pair(-m, m)
        }
        (GreekKind::Delta2(i, j), MultiplierMode::Kernel) => {
            let m = w[i] * w[j] / (spot[i] * spot[j]);
            pair(m, -m)
        }
        (GreekKind::Delta2(i, j), MultiplierMode::Alternate) => {
            let m = w[i] * w[j] / (spot[i] * spot[j]);
            pair(-m, m)
        }
        (GreekKind::Gamma(i), MultiplierMode::Kernel) => {
            let m = w[i] * (w[i] + 1.0) / (spot[i] * spot[i]);
            pair(m, -m)
        }
        (GreekKind::Gamma(i), MultiplierMode::Alternate) => {
            let m = -w[i] * (one - w[i]) / (spot[i] * spot[i]);
            pair(m, m)
        }
        (GreekKind::Theta, MultiplierMode::Kernel) => pair(-d, d),
        (GreekKind::Theta, MultiplierMode::Alternate) => pair(-d, d - 1.0),
        (GreekKind::Rho, MultiplierMode::Kernel) => pair(-tau * (sum + 1.0), s * (sum + 1.0)),
        (GreekKind::Rho, MultiplierMode::Alternate) => pair(-tau * tau * (sum - 1.0), -s * (sum - 1.0)),
        (GreekKind::Nu(i), MultiplierMode::Kernel) => {
            let v = spec.vols();
            let cross: Complex64 = (0..n).map(|j| w[j] * spec.corr_at(i, j) * v[j]).sum();
            let dd = -w[i] * cross - v[i] * w[i];
            pair(-tau * dd, s * dd)
        }
        (GreekKind::Nu(_), MultiplierMode::Alternate) => {
            let v = spec.vols();
            let mut m = Complex64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    if a != b {
                        m += 0.5 * spec.corr_at(a, b) * v[b] * w[a] * w[b];
                    }
                }
                m += v[a] * w[a] * (w[a] - 1.0);
            }
            pair(tau * m, -s * m)
        }
        (GreekKind::Xi(i), MultiplierMode::Kernel) => pair(tau * w[i], -s * w[i]),
        (GreekKind::Xi(i), MultiplierMode::Alternate) => pair(-tau * w[i], s * w[i]),
    }
}

/// Part of the multiplier that depends on spot only, divided out of the
/// lattice integrand and reapplied per lattice point.
fn spot_factor(kind: GreekKind, spot: &[f64]) -> f64 {
    match kind {
        GreekKind::Delta1(i) => 1.0 / spot[i],
        GreekKind::Delta2(i, j) => 1.0 / (spot[i] * spot[j]),
        GreekKind::Gamma(i) => 1.0 / (spot[i] * spot[i]),
        _ => 1.0,
    }
}

/// ∂f̂/∂r and ∂f̂/∂qᵢ at fixed critical price (n = 1 premium only).
fn early_exercise_partial(kind: GreekKind, p: &StripPoint, s_star: f64, spec: &BasketSpec) -> Complex64 {
    if s_star <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let base = (p.ln_beta + p.sum * s_star.ln()).exp() / p.sum;
    match kind {
        GreekKind::Rho => -spec.strike() * base,
        GreekKind::Xi(i) => base * p.w[i] * s_star / (p.sum + 1.0),
        _ => Complex64::new(0.0, 0.0),
    }
}

struct GreekIntegrand<'a> {
    kind: GreekKind,
    mode: MultiplierMode,
    base: &'a PutIntegrand,
    ones: Vec<f64>,
}

impl GreekIntegrand<'_> {
    fn eval(&self, p: &StripPoint) -> Result<Complex64> {
        let spec = &self.base.spec;
        let tau = self.base.tau;
        let (me, _) = multiplier(self.kind, &p.w, &self.ones, tau, 0.0, spec, self.mode, p.decay);
        let mut acc = match self.base.style {
            SurfaceStyle::EarlyExercisePremium => Complex64::new(0.0, 0.0),
            _ => me * self.base.european(p),
        };
        if self.base.style.needs_premium() {
            let (r, k) = (spec.rate(), spec.strike());
            for node in &self.base.nodes {
                let (_, mp) = multiplier(self.kind, &p.w, &self.ones, tau, node.t, spec, self.mode, p.decay);
                let cf = p.discounted_cf(node.t);
                let fhat = p.early_exercise(node.s_star, r, k);
                let direct = match self.mode {
                    MultiplierMode::Kernel => early_exercise_partial(self.kind, p, node.s_star, spec),
                    MultiplierMode::Alternate => Complex64::new(0.0, 0.0),
                };
                acc += node.weight * (mp * fhat - direct) * cf;
            }
        }
        Ok(acc)
    }
}

/// Sensitivity values on the full reciprocal lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreekSurface {
    pub grid: MellinFftGrid,
    pub kind: GreekKind,
    pub values: Vec<f64>,
    pub imag_residual: f64,
}

impl GreekSurface {
    pub fn value_at(&self, spot: &[f64]) -> Result<f64> {
        Ok(read_lattice(&self.grid, &self.values, spot)?.value)
    }
}

pub fn greek_surface(
    kind: GreekKind,
    tau: f64,
    spec: &BasketSpec,
    grid: &MellinFftGrid,
    style: SurfaceStyle,
    cfg: &FftConfig,
    mode: MultiplierMode,
) -> Result<GreekSurface> {
    kind.validate(spec.n())?;
    let base = PutIntegrand::new(spec, tau, style, &cfg.premium_for(grid))?;
    let gi = GreekIntegrand { kind, mode, base: &base, ones: vec![1.0; spec.n()] };
    let inv = invert_on_lattice(grid, spec, cfg.weights, |p| gi.eval(p))?;
    let tol = cfg.imag_tolerance * spec.strike();
    if !(inv.imag_residual < tol) {
        return Err(PricingError::ImagResidualTooLarge { residual: inv.imag_residual, tolerance: tol });
    }
    let mut values = inv.values;
    let mut idx = vec![0usize; grid.dims];
    let boundary_now = base.nodes.first().filter(|_| mode == MultiplierMode::Kernel).map(|_| crate::boundary::critical_price_to_expiry(tau, spec, cfg.premium.formula)).transpose()?;
    for (flat, v) in values.iter_mut().enumerate() {
        grid.multi_index(flat, &mut idx);
        let spot: Vec<f64> = (0..grid.dims).map(|d| grid.log_price(d, idx[d]).exp()).collect();
        *v *= spot_factor(kind, &spot);
        // Θ picks up −f(S) on the current exercise region from the moving upper limit
        if let (GreekKind::Theta, Some(s_star), SurfaceStyle::AmericanPut | SurfaceStyle::EarlyExercisePremium) =
            (kind, boundary_now, style)
        {
            if spot[0] < s_star {
                *v += spec.rate() * spec.strike() - spec.dividends()[0] * spot[0];
            }
        }
    }
    Ok(GreekSurface { grid: grid.clone(), kind, values, imag_residual: inv.imag_residual })
}

/// One sensitivity at `spot`, read from its surface.
pub fn greek(
    kind: GreekKind,
    spot: &[f64],
    tau: f64,
    spec: &BasketSpec,
    grid: &MellinFftGrid,
    style: SurfaceStyle,
    cfg: &FftConfig,
    mode: MultiplierMode,
) -> Result<f64> {
    greek_surface(kind, tau, spec, grid, style, cfg, mode)?.value_at(spot)
}

/// Central difference of the direct-sum price on the same grid, bump
/// h = h_rel·max(|x|, 1). Parameter bumps keep the lattice fixed.
pub fn greek_fd(
    kind: GreekKind,
    spot: &[f64],
    tau: f64,
    spec: &BasketSpec,
    grid: &MellinFftGrid,
    style: SurfaceStyle,
    cfg: &FftConfig,
    h_rel: f64,
) -> Result<f64> {
    if !(h_rel > 0.0 && h_rel <= 1e-2) {
        return Err(PricingError::InvalidSpec(format!("relative bump {h_rel} outside (0, 1e-2]")));
    }
    kind.validate(spec.n())?;
    let price = |sp: &BasketSpec, s: &[f64], t: f64| price_direct(sp, grid, t, s, style, cfg);
    let bump = |x: f64| h_rel * x.abs().max(1.0);
    fd_central(kind, spot, tau, spec, bump, &price)
}

/// Central differences of an arbitrary pricing function.
pub fn fd_central<P>(kind: GreekKind, spot: &[f64], tau: f64, spec: &BasketSpec, bump: impl Fn(f64) -> f64, price: &P) -> Result<f64>
where
    P: Fn(&BasketSpec, &[f64], f64) -> Result<f64>,
{
    let shifted = |i: usize, h: f64| {
        let mut s = spot.to_vec();
        s[i] += h;
        s
    };
    let diff = |up: Result<f64>, down: Result<f64>, h: f64| Ok((up? - down?) / (2.0 * h));
    match kind {
        GreekKind::Delta1(i) => {
            let h = bump(spot[i]);
            diff(price(spec, &shifted(i, h), tau), price(spec, &shifted(i, -h), tau), h)
        }
        GreekKind::Gamma(i) => {
            let h = bump(spot[i]);
            let mid = price(spec, spot, tau)?;
            Ok((price(spec, &shifted(i, h), tau)? - 2.0 * mid + price(spec, &shifted(i, -h), tau)?) / (h * h))
        }
        GreekKind::Delta2(i, j) => {
            let (hi, hj) = (bump(spot[i]), bump(spot[j]));
            let at = |a: f64, b: f64| {
                let mut s = spot.to_vec();
                s[i] += a;
                s[j] += b;
                price(spec, &s, tau)
            };
            Ok((at(hi, hj)? - at(hi, -hj)? - at(-hi, hj)? + at(-hi, -hj)?) / (4.0 * hi * hj))
        }
        GreekKind::Theta => {
            let h = bump(tau);
            diff(price(spec, spot, tau + h), price(spec, spot, tau - h), h)
        }
        GreekKind::Rho => {
            let r = spec.rate();
            let h = bump(r);
            let bumped = |x: f64| spec.with_params(spec.strike(), x, spec.dividends().to_vec(), spec.vols().to_vec());
            diff(price(&bumped(r + h)?, spot, tau), price(&bumped((r - h).max(0.0))?, spot, tau), 0.5 * (h + h.min(r)))
        }
        GreekKind::Nu(i) => {
            let v = spec.vols()[i];
            let h = bump(v);
            let bumped = |x: f64| {
                let mut vols = spec.vols().to_vec();
                vols[i] = x;
                spec.with_params(spec.strike(), spec.rate(), spec.dividends().to_vec(), vols)
            };
            diff(price(&bumped(v + h)?, spot, tau), price(&bumped(v - h)?, spot, tau), h)
        }
        GreekKind::Xi(i) => {
            let q = spec.dividends()[i];
            let h = bump(q);
            let lo = (q - h).max(0.0);
            let bumped = |x: f64| {
                let mut d = spec.dividends().to_vec();
                d[i] = x;
                spec.with_params(spec.strike(), spec.rate(), d, spec.vols().to_vec())
            };
            diff(price(&bumped(q + h)?, spot, tau), price(&bumped(lo)?, spot, tau), 0.5 * (h + (q - lo)))
        }
    }
}

/// Greeks of one spot as a JSON object keyed by sensitivity name.
pub fn greeks_json(values: &[(GreekKind, f64)]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    let mut cross = serde_json::Map::new();
    for (kind, v) in values {
        match kind {
            GreekKind::Delta2(i, j) => {
                cross.insert(format!("{i},{j}"), serde_json::json!(v));
            }
            k => {
                map.insert(k.name().to_string(), serde_json::json!(v));
            }
        }
    }
    if !cross.is_empty() {
        map.insert("cross_deltas".into(), serde_json::Value::Object(cross));
    }
    serde_json::Value::Object(map)
}
