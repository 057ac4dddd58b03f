use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::statistics::{ClassSums, StatisticKind};
use crate::corpus::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationPlan {
    pub permutation_count: usize,
    pub seed: u64,
}

impl PermutationPlan {
    pub fn new(permutation_count: usize, seed: u64) -> Self {
        Self {
            permutation_count,
            seed,
        }
    }
}

impl Default for PermutationPlan {
    fn default() -> Self {
        Self::new(1000, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermutationResult {
    /// Observed statistic per probeset (0 for degenerate rows).
    pub observed: Vec<f64>,
    pub raw_p: Vec<f64>,
    /// Probesets whose statistic is undefined; they get p = 1.
    pub degenerate: Vec<bool>,
}

/// Label-permutation p-values, one per probeset.
///
/// Each round shuffles the class labels once and applies the same shuffle to
/// every probeset, preserving gene–gene correlation. Round `b` draws its
/// shuffle from its own stream of `plan.seed`, so the result does not depend
/// on how rounds are scheduled across threads. The estimator is
/// `(1 + #{b : |S_b| ≥ |S_obs|}) / (1 + B)`.
pub fn permutation_pvalues(
    dataset: &LabeledDataset,
    kind: StatisticKind,
    plan: &PermutationPlan,
) -> Result<PermutationResult> {
    if plan.permutation_count == 0 {
        return Err(Error::InvalidParameter("permutation count must be at least 1".into()));
    }
    dataset.require_classes(2)?;
    let counts = dataset.class_counts();
    if let Some(c) = counts.iter().position(|&n| n < 2) {
        return Err(Error::InsufficientData(format!(
            "class `{}` has {} samples; at least 2 are needed",
            dataset.class_set()[c],
            counts[c]
        )));
    }
    let k = dataset.n_classes();
    let labels = dataset.labels();
    let matrix = dataset.matrix();

    // mean-centring keeps the running sums of squares well conditioned
    let centred: Vec<(Vec<f64>, f64)> = matrix
        .rows()
        .map(|row| {
            let m = stats::mean(row);
            let c: Vec<f64> = row.iter().map(|v| v - m).collect();
            let var = stats::sample_variance(&c);
            (c, var)
        })
        .collect();

    let mut observed = Vec::with_capacity(centred.len());
    let mut degenerate = Vec::with_capacity(centred.len());
    let mut sums = ClassSums::new(k);
    for (row, var) in &centred {
        let scale = row.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        let stat = if *var <= 1e-24 * scale * scale {
            None
        } else {
            sums.accumulate(row, labels);
            sums.statistic(kind, *var)
        };
        observed.push(stat.unwrap_or(0.0));
        degenerate.push(stat.is_none());
    }

    let genes = centred.len();
    let exceed = (0..plan.permutation_count as u64)
        .into_par_iter()
        .fold(
            || (vec![0u32; genes], ClassSums::new(k), labels.to_vec()),
            |(mut acc, mut sums, mut shuffled), round| {
                shuffled.copy_from_slice(labels);
                shuffled.shuffle(&mut rng::stream(plan.seed, round));
                for (g, (row, var)) in centred.iter().enumerate() {
                    if degenerate[g] {
                        continue;
                    }
                    sums.accumulate(row, &shuffled);
                    let hit = match sums.statistic(kind, *var) {
                        // relative slack absorbs summation-order rounding on
                        // permutations equivalent to the observed labelling
                        Some(s) => s.abs() >= observed[g].abs() * (1.0 - 1e-12),
                        None => true,
                    };
                    if hit {
                        acc[g] += 1;
                    }
                }
                (acc, sums, shuffled)
            },
        )
        .map(|(acc, _, _)| acc)
        .reduce(
            || vec![0u32; genes],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let b = plan.permutation_count as f64;
    let raw_p = exceed
        .iter()
        .zip(&degenerate)
        .map(|(&e, &d)| if d { 1.0 } else { (1.0 + e as f64) / (1.0 + b) })
        .collect();
    Ok(PermutationResult {
        observed,
        raw_p,
        degenerate,
    })
}
