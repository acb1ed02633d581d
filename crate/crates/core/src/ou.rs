//! Ornstein-Uhlenbeck process used as the random policy of uncontrolled robots.
//!
//! Discrete update per call, one independent component per action dimension:
//!
//! ```text
//! x' = x + theta * (mu - x) * dt + sigma * sqrt(dt) * z,    z ~ N(0, 1)
//! ```
//!
//! The internal state stays unclamped; only the emitted action is clamped to
//! `[-1, 1]`, so the process statistics are not distorted by the action box.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuParams {
    pub mu: f64,
    pub theta: f64,
    pub sigma: f64,
    pub dt: f64,
}

impl Default for OuParams {
    fn default() -> Self {
        OuParams { mu: 0.0, theta: 0.15, sigma: 0.2, dt: 0.025 }
    }
}

impl OuParams {
    /// Exact stationary variance of the discrete update, `sigma² dt / (1 - (1 - theta dt)²)`.
    pub fn stationary_variance(&self) -> f64 {
        let a = 1.0 - self.theta * self.dt;
        self.sigma * self.sigma * self.dt / (1.0 - a * a)
    }

    pub fn lag1_autocorrelation(&self) -> f64 {
        1.0 - self.theta * self.dt
    }
}

#[derive(Debug, Clone)]
pub struct OuProcess {
    x: Vec<f64>,
    mu: Vec<f64>,
    params: OuParams,
    rng: ChaCha8Rng,
}

impl OuProcess {
    /// Starts at the mean.
    pub fn new(dims: usize, params: OuParams, seed: u64) -> Self {
        OuProcess {
            x: vec![params.mu; dims],
            mu: vec![params.mu; dims],
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn with_state(mut self, x: Vec<f64>) -> Self {
        assert_eq!(x.len(), self.mu.len(), "state length must match dimensions");
        self.x = x;
        self
    }

    pub fn dims(&self) -> usize {
        self.x.len()
    }

    pub fn params(&self) -> &OuParams {
        &self.params
    }

    /// Unclamped internal state.
    pub fn state(&self) -> &[f64] {
        &self.x
    }

    /// Advances one step and writes the clamped action into `out`.
    pub fn sample_into(&mut self, out: &mut [f64]) {
        let OuParams { theta, sigma, dt, .. } = self.params;
        let scale = sigma * dt.sqrt();
        for ((x, mu), o) in self.x.iter_mut().zip(&self.mu).zip(out.iter_mut()) {
            let z: f64 = StandardNormal.sample(&mut self.rng);
            *x += theta * (mu - *x) * dt + scale * z;
            *o = x.clamp(-1.0, 1.0);
        }
    }

    pub fn sample(&mut self) -> Vec<f64> {
        let mut out = vec![0.0; self.dims()];
        self.sample_into(&mut out);
        out
    }

    pub fn reset(&mut self) {
        self.x.clone_from(&self.mu);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deterministic(x0: f64, mu: f64) -> OuProcess {
        let params = OuParams { mu, theta: 0.15, sigma: 0.0, dt: 0.025 };
        OuProcess::new(1, params, 0).with_state(vec![x0])
    }

    #[test]
    fn zero_noise_decay() {
        let mut p = deterministic(1.0, 0.0);
        let a = p.sample();
        assert!((a[0] - 0.99625).abs() < 1e-15);
        assert!((p.state()[0] - 0.99625).abs() < 1e-15);
    }

    #[test]
    fn mean_is_a_fixed_point() {
        let mut p = deterministic(0.3, 0.3);
        for _ in 0..10 {
            assert_eq!(p.sample(), vec![0.3]);
        }
    }

    #[test]
    fn strictly_reverts_without_noise() {
        let mut p = deterministic(-3.0, 0.5);
        let mut gap = (p.state()[0] - 0.5).abs();
        for _ in 0..1000 {
            p.sample();
            let next = (p.state()[0] - 0.5).abs();
            assert!(next < gap);
            gap = next;
        }
    }

    #[test]
    fn actions_clamped_state_not() {
        let mut p = deterministic(5.0, 0.0);
        assert_eq!(p.sample(), vec![1.0]);
        assert!(p.state()[0] > 4.9);
    }

    #[test]
    fn same_seed_same_sequence() {
        let mut a = OuProcess::new(3, OuParams::default(), 99);
        let mut b = OuProcess::new(3, OuParams::default(), 99);
        let mut c = OuProcess::new(3, OuParams::default(), 100);
        let sa: Vec<_> = (0..100).map(|_| a.sample()).collect();
        let sb: Vec<_> = (0..100).map(|_| b.sample()).collect();
        let sc: Vec<_> = (0..100).map(|_| c.sample()).collect();
        assert_eq!(sa, sb);
        assert_ne!(sa, sc);
    }

    #[test]
    fn lag1_autocorrelation_over_1e5_iterates() {
        let params = OuParams::default();
        let mut p = OuProcess::new(1, params, 5);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| {
                p.sample();
                p.state()[0]
            })
            .collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        let cov: f64 = xs.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
        let rho = cov / var;
        assert!((rho - params.lag1_autocorrelation()).abs() < 0.02, "rho = {rho}");
    }

    #[test]
    fn stationary_variance_formula() {
        let v = OuParams::default().stationary_variance();
        // 0.04 * 0.025 / (1 - 0.99625^2)
        assert!((v - 0.001 / (1.0 - 0.99625f64.powi(2))).abs() < 1e-15);
        assert!((v - 0.1336).abs() < 1e-3);
    }
}
