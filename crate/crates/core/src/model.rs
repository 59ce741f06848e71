//! Pattern-incidence features and the shallow two-matrix softmax model.
//!
//! A graph becomes a vector over the selected patterns: `1/m` for each of
//! the `m` patterns it contains, 0 elsewhere. The model maps it through an
//! embedding matrix `W` (features x dim) and an output matrix `W_out`
//! (dim x classes), then a softmax, and is trained by per-example gradient
//! descent on cross-entropy.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dfs::{self, DfsCode};
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub embedding_dim: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub schedule: LrSchedule,
}

/// Step size over the run: fixed, or decayed linearly from
/// `learning_rate` towards zero across all updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrSchedule {
    Constant,
    Linear,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            embedding_dim: 64,
            learning_rate: 1.0,
            epochs: 5,
            schedule: LrSchedule::Linear,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.embedding_dim == 0 {
            return Err(Error::config("model.embedding_dim", "must be at least 1"));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("model.learning_rate", "must be finite and non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub rows: Vec<Vec<f64>>,
    pub feature_codes: Vec<DfsCode>,
}

impl FeatureMatrix {
    pub fn zero_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.iter().all(|&x| x == 0.0)).count()
    }
}

/// Normalized incidence vectors of `graphs` over `features`, found by
/// subgraph search.
pub fn build_features(graphs: &[LabeledGraph], features: &[DfsCode]) -> FeatureMatrix {
    let rows = graphs
        .par_iter()
        .map(|g| {
            let hits: Vec<bool> = features.iter().map(|f| dfs::contains(g, f)).collect();
            let m = hits.iter().filter(|&&h| h).count();
            hits.iter()
                .map(|&h| if h { 1.0 / m as f64 } else { 0.0 })
                .collect()
        })
        .collect();
    FeatureMatrix {
        rows,
        feature_codes: features.to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedModel {
    pub features: usize,
    pub dim: usize,
    pub classes: usize,
    /// Row-major `features x dim`.
    pub w: Vec<f64>,
    /// Row-major `dim x classes`.
    pub w_out: Vec<f64>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub schedule: LrSchedule,
}

pub struct Gradients {
    pub w: Vec<f64>,
    pub w_out: Vec<f64>,
}

fn softmax(u: &[f64]) -> Vec<f64> {
    let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = u.iter().map(|&x| (x - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

impl EmbedModel {
    pub fn zeros(features: usize, classes: usize, config: &ModelConfig) -> Self {
        let dim = config.embedding_dim;
        EmbedModel {
            features,
            dim,
            classes,
            w: vec![0.0; features * dim],
            w_out: vec![0.0; dim * classes],
            learning_rate: config.learning_rate,
            epochs: config.epochs,
            schedule: config.schedule,
        }
    }

    /// Both matrices uniform in `[-0.5/dim, 0.5/dim]`.
    pub fn new(features: usize, classes: usize, config: &ModelConfig, rng: &mut impl Rng) -> Self {
        let mut m = Self::zeros(features, classes, config);
        let bound = 0.5 / m.dim as f64;
        for x in m.w.iter_mut().chain(m.w_out.iter_mut()) {
            *x = rng.random_range(-bound..=bound);
        }
        m
    }

    pub fn hidden(&self, x: &[f64]) -> Vec<f64> {
        let mut h = vec![0.0; self.dim];
        for (k, &xk) in x.iter().enumerate() {
            if xk != 0.0 {
                let row = &self.w[k * self.dim..(k + 1) * self.dim];
                for (hj, wj) in h.iter_mut().zip(row) {
                    *hj += xk * wj;
                }
            }
        }
        h
    }

    fn logits(&self, h: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.classes];
        for (j, &hj) in h.iter().enumerate() {
            let row = &self.w_out[j * self.classes..(j + 1) * self.classes];
            for (uc, wc) in u.iter_mut().zip(row) {
                *uc += hj * wc;
            }
        }
        u
    }

    /// Class distribution `softmax(W_out^T W^T x)`.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        softmax(&self.logits(&self.hidden(x)))
    }

    /// Most probable class; the lowest id wins ties.
    pub fn predict(&self, x: &[f64]) -> usize {
        let p = self.forward(x);
        let mut best = 0;
        for c in 1..p.len() {
            if p[c] > p[best] {
                best = c;
            }
        }
        best
    }

    /// Summed cross-entropy (natural log) over the examples.
    pub fn loss(&self, xs: &[Vec<f64>], ys: &[usize]) -> f64 {
        xs.iter().zip(ys).map(|(x, &y)| -self.forward(x)[y].ln()).sum()
    }

    /// Analytic gradient of [`EmbedModel::loss`] with respect to both
    /// matrices.
    pub fn gradients(&self, xs: &[Vec<f64>], ys: &[usize]) -> Gradients {
        let mut g = Gradients {
            w: vec![0.0; self.w.len()],
            w_out: vec![0.0; self.w_out.len()],
        };
        for (x, &y) in xs.iter().zip(ys) {
            let h = self.hidden(x);
            let mut du = softmax(&self.logits(&h));
            du[y] -= 1.0;
            let dh = self.back_hidden(&du);
            for (row, &hj) in g.w_out.chunks_mut(self.classes).zip(&h) {
                for (w, d) in row.iter_mut().zip(&du) {
                    *w += hj * d;
                }
            }
            for (row, &xk) in g.w.chunks_mut(self.dim).zip(x) {
                if xk != 0.0 {
                    for (w, d) in row.iter_mut().zip(&dh) {
                        *w += xk * d;
                    }
                }
            }
        }
        g
    }

    fn back_hidden(&self, du: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|j| {
                let row = &self.w_out[j * self.classes..(j + 1) * self.classes];
                row.iter().zip(du).map(|(w, d)| w * d).sum()
            })
            .collect()
    }

    /// Per-example gradient descent over shuffled rows for `epochs` passes.
    /// Returns the mean loss of each epoch, measured before each update.
    pub fn train(&mut self, xs: &[Vec<f64>], ys: &[usize], seed: u64) -> Result<Vec<f64>> {
        if xs.len() != ys.len() {
            return Err(Error::LabelMismatch {
                labels: ys.len(),
                graphs: xs.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let mut trace = Vec::with_capacity(self.epochs);
        let total_steps = (self.epochs * xs.len()).max(1) as f64;
        let mut step = 0usize;
        for epoch in 0..self.epochs {
            order.shuffle(&mut rng);
            let mut total = 0.0;
            for &i in &order {
                let lr = match self.schedule {
                    LrSchedule::Constant => self.learning_rate,
                    LrSchedule::Linear => self.learning_rate * (1.0 - step as f64 / total_steps),
                };
                step += 1;
                let (x, y) = (&xs[i], ys[i]);
                let h = self.hidden(x);
                let mut du = softmax(&self.logits(&h));
                let loss = -du[y].ln();
                if !loss.is_finite() || du.iter().any(|p| !p.is_finite()) {
                    return Err(Error::NonFinite { epoch, example: i });
                }
                total += loss;
                du[y] -= 1.0;
                let dh = self.back_hidden(&du);
                for (row, &hj) in self.w_out.chunks_mut(self.classes).zip(&h) {
                    for (w, d) in row.iter_mut().zip(&du) {
                        *w -= lr * hj * d;
                    }
                }
                for (k, &xk) in x.iter().enumerate() {
                    if xk != 0.0 {
                        let row = &mut self.w[k * self.dim..(k + 1) * self.dim];
                        for (w, d) in row.iter_mut().zip(&dh) {
                            *w -= lr * xk * d;
                        }
                    }
                }
            }
            let mean = if xs.is_empty() { 0.0 } else { total / xs.len() as f64 };
            if !mean.is_finite() || self.w.iter().chain(&self.w_out).any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { epoch, example: xs.len() });
            }
            trace.push(mean);
        }
        Ok(trace)
    }
}
