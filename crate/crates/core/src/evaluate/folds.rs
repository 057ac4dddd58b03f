use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Assignment of every sample to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&s| self.assignment[s] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&s| self.assignment[s] != fold).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        self.assignment.iter().for_each(|&f| sizes[f] += 1);
        sizes
    }
}

/// Shuffles each class with its own stream of `seed` and deals the members
/// round-robin, continuing the deal where the previous class stopped.
pub fn stratified_folds(labels: &[usize], n_classes: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("fold count must be at least 2, got {}", k)));
    }
    if k > labels.len() {
        return Err(Error::InsufficientData(format!(
            "{} folds requested for {} samples",
            k,
            labels.len()
        )));
    }
    let mut members = vec![Vec::new(); n_classes];
    for (s, &l) in labels.iter().enumerate() {
        if l >= n_classes {
            return Err(Error::UnknownLabel(format!("class index {}", l)));
        }
        members[l].push(s);
    }
    if let Some(c) = members.iter().position(Vec::is_empty) {
        return Err(Error::InsufficientData(format!("class {} has no samples", c)));
    }

    let mut assignment = vec![0; labels.len()];
    let mut offset = 0;
    for (c, class_members) in members.iter_mut().enumerate() {
        class_members.shuffle(&mut rng::stream(seed, c as u64));
        for (j, &s) in class_members.iter().enumerate() {
            assignment[s] = (offset + j) % k;
        }
        offset = (offset + class_members.len()) % k;
    }
    Ok(FoldPlan { k, assignment, seed })
}
