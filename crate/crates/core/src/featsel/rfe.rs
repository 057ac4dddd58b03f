use serde::{Deserialize, Serialize};

use crate::corpus::LabeledDataset;
use crate::error::{Error, Result};
use crate::learners::{linear_gram, train_pairs, SvmParams};

/// Features from most to least important.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub feature_ids: Vec<String>,
    pub indices: Vec<usize>,
    /// Elimination criterion of each feature in the last training it took part in.
    pub criteria: Vec<f64>,
    /// Number of multiclass SVM trainings performed.
    pub trainings: usize,
}

/// Recursive feature elimination with a linear one-vs-one SVM. Each round
/// trains on the surviving features, scores every feature by the sum of its
/// squared weights over all pairwise machines and drops the
/// `eliminate_per_iteration` lowest (the later ID first among equal
/// scores). Values are used as given, without rescaling.
pub fn svm_rfe(dataset: &LabeledDataset, eliminate_per_iteration: usize, c: f64) -> Result<FeatureRanking> {
    svm_rfe_with(dataset, eliminate_per_iteration, &SvmParams { c, ..SvmParams::default() })
}

pub fn svm_rfe_with(dataset: &LabeledDataset, eliminate_per_iteration: usize, params: &SvmParams) -> Result<FeatureRanking> {
    let matrix = dataset.matrix();
    let d = matrix.n_probesets();
    let n = matrix.n_samples();
    if eliminate_per_iteration == 0 {
        return Err(Error::InvalidParameter("eliminate_per_iteration must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::InsufficientData(format!("RFE needs at least 2 features, got {}", d)));
    }
    dataset.require_classes(2)?;
    let ids = matrix.probeset_ids();
    let k = dataset.n_classes();

    let mut survivors: Vec<usize> = (0..d).collect();
    let mut criteria = vec![0.0; d];
    let mut eliminated: Vec<usize> = Vec::with_capacity(d);
    let mut trainings = 0;
    let rebuild = |survivors: &[usize]| linear_gram(&matrix.sample_major(survivors, &(0..n).collect::<Vec<_>>()));
    let mut gram = rebuild(&survivors);
    let mut built_at = d;

    while survivors.len() > 1 {
        let pairs = train_pairs(&gram, dataset.labels(), k, params)?;
        trainings += 1;
        let mut score = vec![0.0; survivors.len()];
        for pair in &pairs {
            let support: Vec<(usize, f64)> = pair
                .members
                .iter()
                .zip(&pair.coef)
                .filter(|(_, c)| **c != 0.0)
                .map(|(&s, &c)| (s, c))
                .collect();
            for (slot, &f) in survivors.iter().enumerate() {
                let row = matrix.row(f);
                let w: f64 = support.iter().map(|&(s, c)| c * row[s]).sum();
                score[slot] += w * w;
            }
        }
        for (slot, &f) in survivors.iter().enumerate() {
            criteria[f] = score[slot];
        }

        let mut order: Vec<usize> = (0..survivors.len()).collect();
        order.sort_by(|&a, &b| {
            score[a]
                .total_cmp(&score[b])
                .then_with(|| ids[survivors[b]].cmp(&ids[survivors[a]]))
        });
        let drop = eliminate_per_iteration.min(survivors.len());
        let removed: Vec<usize> = order[..drop].iter().map(|&slot| survivors[slot]).collect();
        eliminated.extend(&removed);
        let gone: std::collections::HashSet<usize> = removed.iter().copied().collect();
        survivors.retain(|f| !gone.contains(f));

        if survivors.is_empty() {
            break;
        }
        if 2 * survivors.len() <= built_at {
            gram = rebuild(&survivors);
            built_at = survivors.len();
        } else {
            for &f in &removed {
                let row = matrix.row(f);
                for i in 0..n {
                    let xi = row[i];
                    if xi == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        gram[i * n + j] -= xi * row[j];
                    }
                }
            }
        }
    }
    eliminated.extend(&survivors);
    eliminated.reverse();
    Ok(FeatureRanking {
        feature_ids: eliminated.iter().map(|&f| ids[f].clone()).collect(),
        criteria: eliminated.iter().map(|&f| criteria[f]).collect(),
        indices: eliminated,
        trainings,
    })
}
