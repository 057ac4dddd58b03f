use crate::corpus::LabeledDataset;
use crate::error::{Error, Result};
use crate::evaluate::{stratified_folds, FoldPlan};
use crate::learners::ClassifierConfig;

use super::{EvaluatorKind, SubsetEvaluator};

/// Scores a subset by the mean held-out accuracy of a classifier over a
/// fixed set of stratified internal folds.
pub struct WrapperEvaluator {
    ids: Vec<String>,
    /// Feature-major copy of the data.
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
    class_set: Vec<String>,
    learner: ClassifierConfig,
    /// (training, held-out) sample indices per internal fold.
    folds: Vec<(Vec<usize>, Vec<usize>)>,
}

impl WrapperEvaluator {
    pub fn new(dataset: &LabeledDataset, learner: ClassifierConfig, internal_folds: usize, seed: u64) -> Result<Self> {
        let counts = dataset.class_counts();
        if let Some(c) = counts.iter().position(|&n| n < internal_folds) {
            return Err(Error::InsufficientData(format!(
                "class `{}` has {} samples, fewer than {} internal folds",
                dataset.class_set()[c],
                counts[c],
                internal_folds
            )));
        }
        let plan: FoldPlan = stratified_folds(dataset.labels(), dataset.n_classes(), internal_folds, seed)?;
        Ok(Self {
            ids: dataset.matrix().probeset_ids().to_vec(),
            rows: dataset.matrix().rows().map(<[f64]>::to_vec).collect(),
            labels: dataset.labels().to_vec(),
            class_set: dataset.class_set().to_vec(),
            learner,
            folds: (0..plan.k).map(|f| (plan.train_indices(f), plan.test_indices(f))).collect(),
        })
    }

    fn columns(&self, subset: &[usize], samples: &[usize]) -> Vec<Vec<f64>> {
        samples
            .iter()
            .map(|&s| subset.iter().map(|&f| self.rows[f][s]).collect())
            .collect()
    }
}

impl SubsetEvaluator for WrapperEvaluator {
    fn kind(&self) -> EvaluatorKind {
        EvaluatorKind::Wrapper
    }

    fn feature_ids(&self) -> &[String] {
        &self.ids
    }

    fn evaluate(&self, subset: &[usize]) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::InvalidParameter("wrapper evaluation of an empty subset".into()));
        }
        let mut total = 0.0;
        for (train, test) in &self.folds {
            let y: Vec<usize> = train.iter().map(|&s| self.labels[s]).collect();
            let model = self.learner.fit(&self.columns(subset, train), &y, &self.class_set)?;
            let x_test = self.columns(subset, test);
            let mut correct = 0usize;
            for (row, &s) in x_test.iter().zip(test) {
                if model.predict(row)? == self.labels[s] {
                    correct += 1;
                }
            }
            total += correct as f64 / test.len() as f64;
        }
        Ok(total / self.folds.len() as f64)
    }
}

/// Mean internal-fold accuracy of `learner` restricted to `subset`.
pub fn wrapper_eval(
    dataset: &LabeledDataset,
    subset: &[usize],
    learner: &ClassifierConfig,
    internal_folds: usize,
    seed: u64,
) -> Result<f64> {
    WrapperEvaluator::new(dataset, learner.clone(), internal_folds, seed)?.evaluate(subset)
}
