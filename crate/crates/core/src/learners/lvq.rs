//! LVQ1 prototype classifier.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LvqParams {
    pub prototypes_per_class: usize,
    /// Initial learning rate; decays linearly to 0 over training.
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for LvqParams {
    fn default() -> Self {
        Self {
            prototypes_per_class: 4,
            learning_rate: 0.3,
            epochs: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LvqModel {
    pub prototypes: Vec<Vec<f64>>,
    pub prototype_class: Vec<usize>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Prototypes are seeded from a per-class shuffle of the training samples
/// (cycling when a class has fewer members than prototypes). Each step moves
/// the nearest prototype toward the sample when their classes agree and away
/// otherwise.
pub(crate) fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: &LvqParams, seed: u64) -> LvqModel {
    let mut prototypes = Vec::new();
    let mut prototype_class = Vec::new();
    for c in 0..n_classes {
        let mut members: Vec<usize> = (0..x.len()).filter(|&s| y[s] == c).collect();
        members.shuffle(&mut rng::stream(seed, c as u64));
        for p in 0..params.prototypes_per_class {
            prototypes.push(x[members[p % members.len()]].clone());
            prototype_class.push(c);
        }
    }

    let total_steps = (params.epochs * x.len()) as f64;
    if params.learning_rate > 0.0 && total_steps > 0.0 {
        let mut order: Vec<usize> = (0..x.len()).collect();
        let mut order_rng = rng::stream(seed, u64::MAX);
        let mut step = 0usize;
        for _ in 0..params.epochs {
            order.shuffle(&mut order_rng);
            for &s in &order {
                let lr = params.learning_rate * (1.0 - step as f64 / total_steps);
                step += 1;
                let winner = nearest(&prototypes, &x[s]);
                let sign = if prototype_class[winner] == y[s] { 1.0 } else { -1.0 };
                for (w, v) in prototypes[winner].iter_mut().zip(&x[s]) {
                    *w += sign * lr * (v - *w);
                }
            }
        }
    }
    LvqModel {
        prototypes,
        prototype_class,
    }
}

fn nearest(prototypes: &[Vec<f64>], x: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, p) in prototypes.iter().enumerate() {
        let d = sq_dist(p, x);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

impl LvqModel {
    /// Weights proportional to the inverse distance to each class's nearest
    /// prototype; an exact prototype hit takes all the mass.
    pub(crate) fn predict_proba(&self, x: &[f64], n_classes: usize) -> Vec<f64> {
        let mut nearest = vec![f64::INFINITY; n_classes];
        for (p, &c) in self.prototypes.iter().zip(&self.prototype_class) {
            nearest[c] = nearest[c].min(sq_dist(p, x).sqrt());
        }
        let zero_hits = nearest.iter().filter(|d| **d == 0.0).count();
        let weights: Vec<f64> = if zero_hits > 0 {
            nearest.iter().map(|d| if *d == 0.0 { 1.0 } else { 0.0 }).collect()
        } else {
            nearest.iter().map(|d| 1.0 / d).collect()
        };
        let total: f64 = weights.iter().sum();
        weights.into_iter().map(|w| w / total).collect()
    }
}
