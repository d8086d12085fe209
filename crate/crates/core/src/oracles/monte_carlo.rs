use crate::error::{PricingError, Result};
use crate::market::BasketSpec;
use crate::mellin::riskneutral_drift;
use crate::special::norm_inv;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const CHUNK: usize = 1 << 13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { paths: 1_000_000, steps: 1, seed: 20_240_601, antithetic: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub price: f64,
    pub std_error: f64,
}

/// Lower-triangular L with LLᵀ = ρ, tolerating semidefinite input.
pub fn cholesky_psd(n: usize, corr: &[f64]) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let d = corr[j * n + j] - (0..j).map(|k| l[j * n + k] * l[j * n + k]).sum::<f64>();
        if d < -1e-10 {
            return Err(PricingError::CholeskyFailure(d));
        }
        let djj = d.max(0.0).sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let s = corr[i * n + j] - (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>();
            l[i * n + j] = if djj > 1e-12 { s / djj } else { 0.0 };
        }
    }
    Ok(l)
}

fn uniform_open(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Discounted mean of (K − ΣSᵢ(τ))⁺ under correlated GBM.
///
/// Paths are split into fixed-size chunks, each drawing from its own ChaCha
/// stream, and chunk sums are reduced in order, so results do not depend on
/// the worker count. With antithetic sampling each mirrored pair is one sample.
pub fn mc_basket_euro_put(spec: &BasketSpec, s0: &[f64], tau: f64, cfg: &McConfig) -> Result<McEstimate> {
    let n = spec.n();
    if s0.len() != n {
        return Err(PricingError::DimensionMismatch { expected: n, got: s0.len() });
    }
    if cfg.paths < 2 || cfg.steps == 0 {
        return Err(PricingError::InvalidSpec("Monte Carlo needs paths >= 2 and steps >= 1".into()));
    }
    let l = cholesky_psd(n, spec.corr())?;
    let mu = riskneutral_drift(spec);
    let vols = spec.vols();
    let k = spec.strike();
    let dt = tau / cfg.steps as f64;
    let per_sample = if cfg.antithetic { 2 } else { 1 };
    let samples = cfg.paths / per_sample;
    let chunks = samples.div_ceil(CHUNK);

    let payoff = |z: &[f64], sign: f64| -> f64 {
        let basket: f64 = (0..n).map(|i| s0[i] * (mu[i] * tau + sign * vols[i] * z[i]).exp()).sum();
        (k - basket).max(0.0)
    };

    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut eps = vec![0.0; n];
            let mut z = vec![0.0; n];
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                z.iter_mut().for_each(|v| *v = 0.0);
                for _ in 0..cfg.steps {
                    eps.iter_mut().for_each(|e| *e = norm_inv(uniform_open(&mut rng)));
                    for i in 0..n {
                        z[i] += dt.sqrt() * (0..=i).map(|j| l[i * n + j] * eps[j]).sum::<f64>();
                    }
                }
                let x = if cfg.antithetic { 0.5 * (payoff(&z, 1.0) + payoff(&z, -1.0)) } else { payoff(&z, 1.0) };
                sum += x;
                sum_sq += x * x;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0) * m / (m - 1.0);
    let disc = (-spec.rate() * tau).exp();
    Ok(McEstimate { price: disc * mean, std_error: disc * (var / m).sqrt() })
}
