use serde::{Deserialize, Serialize};

use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesParams {
    pub variance_floor: f64,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        Self { variance_floor: 1e-6 }
    }
}

/// Gaussian naive Bayes: per-class, per-feature mean and variance plus
/// class-frequency priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

pub(crate) fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: &NaiveBayesParams) -> NaiveBayesModel {
    let d = x[0].len();
    let n = x.len() as f64;
    let mut priors = Vec::with_capacity(n_classes);
    let mut means = Vec::with_capacity(n_classes);
    let mut variances = Vec::with_capacity(n_classes);
    let mut column = Vec::new();
    for c in 0..n_classes {
        let members: Vec<&Vec<f64>> = x.iter().zip(y).filter(|(_, l)| **l == c).map(|(r, _)| r).collect();
        priors.push(members.len() as f64 / n);
        let mut mu = Vec::with_capacity(d);
        let mut var = Vec::with_capacity(d);
        for f in 0..d {
            column.clear();
            column.extend(members.iter().map(|r| r[f]));
            mu.push(stats::mean(&column));
            var.push(stats::sample_variance(&column).max(params.variance_floor));
        }
        means.push(mu);
        variances.push(var);
    }
    NaiveBayesModel {
        priors,
        means,
        variances,
    }
}

impl NaiveBayesModel {
    pub(crate) fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let log_post: Vec<f64> = (0..self.priors.len())
            .map(|c| {
                let mut lp = self.priors[c].ln();
                for ((v, mu), var) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                    lp -= 0.5 * (2.0 * std::f64::consts::PI * var).ln() + (v - mu) * (v - mu) / (2.0 * var);
                }
                lp
            })
            .collect();
        softmax(&log_post)
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}
