//! Naive reference implementations used as oracles.
//!
//! Everything here is written from the update rules directly, with dense
//! storage and full histories, and shares no code with the library beyond
//! its public types.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use wrv_core::estimators::{OnlineEstimator, Predictor};
use wrv_core::{LossKind, Sample};

/// Multi-indices of length `p` ordered by product, then lexicographically.
pub fn brute_force_indices(p: usize, count: usize) -> Vec<Vec<u32>> {
    let mut bound = 1u64;
    loop {
        let mut all = Vec::new();
        enumerate(p, bound, &mut Vec::new(), &mut all);
        if all.len() >= count {
            all.sort_by(|a, b| product(a).cmp(&product(b)).then_with(|| a.cmp(b)));
            all.truncate(count);
            return all;
        }
        bound *= 2;
    }
}

fn enumerate(p: usize, bound: u64, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() == p {
        out.push(prefix.clone());
        return;
    }
    let used = product(prefix);
    let mut l = 1u32;
    while used * u64::from(l) <= bound {
        prefix.push(l);
        enumerate(p, bound, prefix, out);
        prefix.pop();
        l += 1;
    }
}

pub fn product(l: &[u32]) -> u64 {
    l.iter().map(|&v| u64::from(v)).product()
}

pub fn tensor_cosine(l: &[u32], x: &[f64]) -> f64 {
    l.iter()
        .zip(x)
        .map(|(&k, &xi)| (f64::from(k - 1) * PI * xi).cos())
        .product()
}

fn residual(loss: LossKind, fitted: f64, y: f64) -> f64 {
    match loss {
        LossKind::Squared => y - fitted,
        LossKind::Pinball { alpha } => {
            if y - fitted > 0.0 {
                alpha
            } else {
                alpha - 1.0
            }
        }
    }
}

/// Dense sieve-SGD keeping every trajectory iterate.
pub struct NaiveSieve {
    pub a: f64,
    pub b: f64,
    pub zeta: f64,
    pub omega: f64,
    pub product_shrinkage: bool,
    pub loss: LossKind,
    pub p: usize,
    /// `history[t]` is the trajectory after `t + 1` samples.
    pub history: Vec<Vec<f64>>,
}

impl NaiveSieve {
    pub fn new(p: usize, a: f64, b: f64, zeta: f64, omega: f64, loss: LossKind) -> Self {
        Self {
            a,
            b,
            zeta,
            omega,
            product_shrinkage: false,
            loss,
            p,
            history: Vec::new(),
        }
    }

    fn j(&self, i: u64) -> usize {
        ((self.b * (i as f64).powf(self.zeta) - 1e-9).ceil() as usize).max(1)
    }

    pub fn update(&mut self, s: &Sample) {
        let i = self.history.len() as u64 + 1;
        let mut beta = self.history.last().cloned().unwrap_or_default();
        let j = self.j(i).max(beta.len());
        beta.resize(j, 0.0);
        let idx = brute_force_indices(self.p, j);
        let fitted: f64 = (0..j).map(|k| beta[k] * tensor_cosine(&idx[k], &s.x)).sum();
        let gamma = self.a * (i as f64).powf(-self.zeta);
        let r = residual(self.loss, fitted, s.y);
        for k in 0..j {
            let weight = if self.product_shrinkage {
                product(&idx[k]) as f64
            } else {
                (k + 1) as f64
            };
            beta[k] += gamma * r * weight.powf(-2.0 * self.omega) * tensor_cosine(&idx[k], &s.x);
        }
        self.history.push(beta);
    }

    /// Mean of all trajectory iterates, padded to the longest.
    pub fn averaged(&self) -> Vec<f64> {
        let j = self.history.last().map_or(0, Vec::len);
        let mut avg = vec![0.0; j];
        for beta in &self.history {
            for (a, b) in avg.iter_mut().zip(beta) {
                *a += b;
            }
        }
        avg.iter().map(|a| a / self.history.len() as f64).collect()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let avg = self.averaged();
        let idx = brute_force_indices(self.p, avg.len());
        avg.iter()
            .zip(&idx)
            .map(|(c, l)| c * tensor_cosine(l, x))
            .sum()
    }
}

/// Kernel-SGD simulated in function space: each iterate is stored as its own
/// expansion and the average is taken pointwise.
pub struct NaiveKernel {
    pub a: f64,
    pub zeta: f64,
    pub bandwidth: f64,
    pub loss: LossKind,
    centers: Vec<Vec<f64>>,
    /// `iterates[t]` holds the expansion weights of `f_{t+1}` on `centers[..=t]`.
    iterates: Vec<Vec<f64>>,
}

impl NaiveKernel {
    pub fn new(a: f64, zeta: f64, bandwidth: f64, loss: LossKind) -> Self {
        Self {
            a,
            zeta,
            bandwidth,
            loss,
            centers: Vec::new(),
            iterates: Vec::new(),
        }
    }

    fn k(&self, u: &[f64], v: &[f64]) -> f64 {
        let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum();
        (-d2 / (2.0 * self.bandwidth * self.bandwidth)).exp()
    }

    fn eval(&self, weights: &[f64], x: &[f64]) -> f64 {
        weights
            .iter()
            .zip(&self.centers)
            .map(|(w, c)| w * self.k(c, x))
            .sum()
    }

    pub fn update(&mut self, s: &Sample) {
        let i = self.iterates.len() as u64 + 1;
        let prev = self.iterates.last().cloned().unwrap_or_default();
        let fitted = self.eval(&prev, &s.x);
        let gamma = self.a * (i as f64).powf(-self.zeta);
        let mut next = prev;
        next.push(gamma * residual(self.loss, fitted, s.y));
        self.centers.push(s.x.clone());
        self.iterates.push(next);
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        if self.iterates.is_empty() {
            return 0.0;
        }
        let total: f64 = self.iterates.iter().map(|w| self.eval(w, x)).sum();
        total / self.iterates.len() as f64
    }
}

/// Constant-rate linear SGD with the full iterate history.
pub struct NaiveLinear {
    pub gamma: f64,
    pub loss: LossKind,
    history: Vec<Vec<f64>>,
    p: usize,
}

impl NaiveLinear {
    pub fn new(p: usize, gamma: f64, loss: LossKind) -> Self {
        Self {
            gamma,
            loss,
            history: Vec::new(),
            p,
        }
    }

    pub fn update(&mut self, s: &Sample) {
        let mut beta = self.history.last().cloned().unwrap_or(vec![0.0; self.p]);
        let fitted: f64 = beta.iter().zip(&s.x).map(|(b, x)| b * x).sum();
        let r = residual(self.loss, fitted, s.y);
        for (b, x) in beta.iter_mut().zip(&s.x) {
            *b += self.gamma * r * x;
        }
        self.history.push(beta);
    }

    pub fn averaged(&self) -> Vec<f64> {
        let mut avg = vec![0.0; self.p];
        for beta in &self.history {
            for (a, b) in avg.iter_mut().zip(beta) {
                *a += b;
            }
        }
        avg.iter()
            .map(|a| a / self.history.len().max(1) as f64)
            .collect()
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Offline weighted RV from a logged prediction trace: `preds[t]` is the
/// pre-update prediction for `ys[t]`, made by the estimator trained on `t`
/// samples. The `t = 0` term is skipped.
pub fn replay_rv(preds: &[f64], ys: &[f64], xi: f64, loss: LossKind) -> f64 {
    (1..preds.len())
        .map(|l| {
            let w = if xi == 0.0 { 1.0 } else { (l as f64).powf(xi) };
            w * loss.eval(preds[l], ys[l]).unwrap()
        })
        .sum()
}

/// Pre-update predictions of `est` along `data`.
pub fn prediction_trace<E: OnlineEstimator>(est: &mut E, data: &[Sample]) -> Vec<f64> {
    data.iter()
        .map(|s| {
            let p = est.predict(&s.x).unwrap();
            est.update(s).unwrap();
            p
        })
        .collect()
}

/// Uniform covariates with a smooth noisy response.
pub fn random_samples<R: Rng>(rng: &mut R, p: usize, n: usize) -> Vec<Sample> {
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
            let y =
                x.iter().map(|v| (3.0 * v).sin()).sum::<f64>() + 0.3 * (rng.random::<f64>() - 0.5);
            Sample::new(x, y)
        })
        .collect()
}

pub fn predictor_at(p: &dyn Predictor, x: &[f64]) -> f64 {
    p.predict(x).unwrap()
}
