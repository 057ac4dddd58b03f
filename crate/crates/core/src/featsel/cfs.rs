use std::sync::OnceLock;

use crate::corpus::LabeledDataset;
use crate::error::{Error, Result};

use super::{EvaluatorKind, SubsetEvaluator};

/// Correlation ratio of a feature with the class: sqrt(SS_between / SS_total).
/// Zero for a constant feature.
pub fn correlation_ratio(values: &[f64], labels: &[usize], n_classes: usize) -> f64 {
    let n = values.len() as f64;
    let grand = values.iter().sum::<f64>() / n;
    let mut sums = vec![0.0; n_classes];
    let mut counts = vec![0usize; n_classes];
    for (v, &l) in values.iter().zip(labels) {
        sums[l] += v;
        counts[l] += 1;
    }
    let total: f64 = values.iter().map(|v| (v - grand) * (v - grand)).sum();
    if total == 0.0 {
        return 0.0;
    }
    let between: f64 = sums
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c > 0)
        .map(|(s, &c)| {
            let m = s / c as f64;
            c as f64 * (m - grand) * (m - grand)
        })
        .sum();
    (between / total).min(1.0).sqrt()
}

/// Merit `k·mean(r_cf) / sqrt(k + k(k-1)·mean(r_ff))` from the per-feature
/// class correlations and the k(k-1)/2 pairwise feature correlations.
pub fn merit_from_correlations(class_corr: &[f64], pair_corr: &[f64]) -> f64 {
    let k = class_corr.len() as f64;
    let sum_cf: f64 = class_corr.iter().sum();
    let sum_ff: f64 = pair_corr.iter().sum();
    sum_cf / (k + 2.0 * sum_ff).sqrt()
}

/// Rounds away the last-bit error of identical (or exactly proportional) rows.
fn snap(r: f64) -> f64 {
    if r > 1.0 - 1e-12 {
        1.0
    } else {
        r
    }
}

/// CFS merit of `subset` (probeset indices) on `dataset`.
pub fn cfs_merit(dataset: &LabeledDataset, subset: &[usize]) -> Result<f64> {
    CfsEvaluator::new(dataset).evaluate(subset)
}

/// Correlation-based subset evaluator. Feature–feature correlations are
/// computed one full row at a time and only for features that appear as
/// earlier members of an evaluated subset.
pub struct CfsEvaluator {
    ids: Vec<String>,
    n_samples: usize,
    /// Centred rows scaled to unit norm (all zeros for constant rows).
    unit_rows: Vec<f64>,
    class_corr: Vec<f64>,
    pair_rows: Vec<OnceLock<Vec<f64>>>,
}

impl CfsEvaluator {
    pub fn new(dataset: &LabeledDataset) -> Self {
        let m = dataset.matrix();
        let n = m.n_samples();
        let mut unit_rows = Vec::with_capacity(m.values().len());
        let mut class_corr = Vec::with_capacity(m.n_probesets());
        for row in m.rows() {
            class_corr.push(correlation_ratio(row, dataset.labels(), dataset.n_classes()));
            let mean = row.iter().sum::<f64>() / n as f64;
            let norm = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>().sqrt();
            if norm > 0.0 {
                unit_rows.extend(row.iter().map(|v| (v - mean) / norm));
            } else {
                unit_rows.extend(std::iter::repeat_n(0.0, n));
            }
        }
        Self {
            ids: m.probeset_ids().to_vec(),
            n_samples: n,
            pair_rows: (0..m.n_probesets()).map(|_| OnceLock::new()).collect(),
            unit_rows,
            class_corr,
        }
    }

    pub fn class_correlation(&self, feature: usize) -> f64 {
        self.class_corr[feature]
    }

    fn unit(&self, f: usize) -> &[f64] {
        &self.unit_rows[f * self.n_samples..(f + 1) * self.n_samples]
    }

    /// Absolute Pearson correlation between two features.
    pub fn feature_correlation(&self, a: usize, b: usize) -> f64 {
        if let Some(row) = self.pair_rows[a].get() {
            return row[b];
        }
        if let Some(row) = self.pair_rows[b].get() {
            return row[a];
        }
        self.pair_rows[a].get_or_init(|| {
            let ua = self.unit(a);
            (0..self.ids.len())
                .map(|j| snap(ua.iter().zip(self.unit(j)).map(|(x, y)| x * y).sum::<f64>().abs()))
                .collect()
        })[b]
    }
}

impl SubsetEvaluator for CfsEvaluator {
    fn kind(&self) -> EvaluatorKind {
        EvaluatorKind::Cfs
    }

    fn feature_ids(&self) -> &[String] {
        &self.ids
    }

    fn evaluate(&self, subset: &[usize]) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::InvalidParameter("CFS merit of an empty subset".into()));
        }
        if let Some(&bad) = subset.iter().find(|&&f| f >= self.ids.len()) {
            return Err(Error::DimensionMismatch {
                expected: format!("feature index < {}", self.ids.len()),
                found: bad.to_string(),
            });
        }
        let class_corr: Vec<f64> = subset.iter().map(|&f| self.class_corr[f]).collect();
        let mut pairs = Vec::with_capacity(subset.len() * subset.len().saturating_sub(1) / 2);
        for (i, &a) in subset.iter().enumerate() {
            for &b in &subset[..i] {
                pairs.push(self.feature_correlation(b, a));
            }
        }
        Ok(merit_from_correlations(&class_corr, &pairs))
    }
}
