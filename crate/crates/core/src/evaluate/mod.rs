//! Stratified cross-validation with in-fold feature selection, and the
//! confusion-matrix and probability-error metrics reported for each model.

mod folds;
mod metrics;

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use folds::{stratified_folds, FoldPlan};
pub use metrics::{confusion, kappa, prob_errors, prob_errors_with_baselines, ConfusionMatrix, ProbErrors};

use crate::corpus::{LabeledDataset, TsvWrite};
use crate::error::{Error, Result};
use crate::featsel::{run_selector, SelectorConfig};
use crate::learners::ClassifierConfig;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedCvOptions {
    /// Record failing folds and keep going instead of aborting.
    pub continue_on_failure: bool,
}

/// Everything needed to reproduce a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub selector: SelectorConfig,
    pub classifier: ClassifierConfig,
    pub folds: usize,
    pub fold_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldFailure {
    pub fold: usize,
    pub code: String,
    pub message: String,
}

/// Pooled held-out performance over all folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub kappa: f64,
    pub mae: f64,
    pub rmse: f64,
    pub rae: f64,
    pub rrse: f64,
    pub n_instances: u64,
    pub complete: bool,
    pub failed_folds: Vec<FoldFailure>,
    /// Features chosen inside each successful fold, in fold order.
    pub fold_subsets: Vec<Vec<String>>,
    pub config: ReportConfig,
}

impl EvalReport {
    /// Human-readable summary followed by the confusion matrix.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let n = self.n_instances;
        let correct = self.confusion.correct();
        let pct = |v: u64| if n == 0 { 0.0 } else { 100.0 * v as f64 / n as f64 };
        let _ = writeln!(s, "=== Stratified cross-validation ===");
        let _ = writeln!(s, "=== Summary ===");
        let _ = writeln!(s);
        let _ = writeln!(s, "Correctly Classified Instances     {:>8} {:>14.4} %", correct, pct(correct));
        let _ = writeln!(s, "Incorrectly Classified Instances   {:>8} {:>14.4} %", n - correct, pct(n - correct));
        let _ = writeln!(s, "Kappa statistic                    {:>8.4}", self.kappa);
        let _ = writeln!(s, "Mean absolute error                {:>8.4}", self.mae);
        let _ = writeln!(s, "Root mean squared error            {:>8.4}", self.rmse);
        let _ = writeln!(s, "Relative absolute error            {:>8.4} %", self.rae);
        let _ = writeln!(s, "Root relative squared error        {:>8.4} %", self.rrse);
        let _ = writeln!(s, "Total Number of Instances          {:>8}", n);
        if !self.complete {
            let folds: Vec<String> = self.failed_folds.iter().map(|f| f.fold.to_string()).collect();
            let _ = writeln!(s, "INCOMPLETE: failed folds {}", folds.join(", "));
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "=== Confusion Matrix ===");
        let _ = writeln!(s);
        let k = self.confusion.class_set.len();
        let width = self
            .confusion
            .counts
            .iter()
            .flatten()
            .map(|c| c.to_string().len())
            .max()
            .unwrap_or(1)
            .max(2);
        let letter = |i: usize| column_letter(i);
        for i in 0..k {
            let _ = write!(s, " {:>width$}", letter(i));
        }
        let _ = writeln!(s, "   <-- classified as");
        for (i, row) in self.confusion.counts.iter().enumerate() {
            for c in row {
                let _ = write!(s, " {:>width$}", c);
            }
            let _ = writeln!(s, " |   {} = {}", letter(i), self.confusion.class_set[i]);
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn column_letter(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

impl TsvWrite for EvalReport {
    fn write_tsv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "metric\tvalue")?;
        for (name, value) in [
            ("accuracy", self.accuracy),
            ("kappa", self.kappa),
            ("mae", self.mae),
            ("rmse", self.rmse),
            ("rae", self.rae),
            ("rrse", self.rrse),
        ] {
            writeln!(out, "{}\t{}", name, value)?;
        }
        writeln!(out, "n_instances\t{}", self.n_instances)?;
        writeln!(out, "complete\t{}", self.complete)?;
        Ok(())
    }
}

struct FoldOutcome {
    test: Vec<usize>,
    predictions: Vec<Vec<f64>>,
    prior: Vec<f64>,
    features: Vec<String>,
}

fn run_fold(
    dataset: &LabeledDataset,
    selector: &SelectorConfig,
    classifier: &ClassifierConfig,
    plan: &FoldPlan,
    fold: usize,
) -> Result<FoldOutcome> {
    let train_idx = plan.train_indices(fold);
    let test = plan.test_indices(fold);
    let train = dataset.select_samples(&train_idx);

    let mut fold_selector = selector.clone();
    fold_selector.seed = selector.seed.wrapping_add(fold as u64);
    let subset = run_selector(&train, &fold_selector)?;

    let all_train: Vec<usize> = (0..train.matrix().n_samples()).collect();
    let x_train = train.matrix().sample_major(&subset.indices, &all_train);
    let mut fold_classifier = classifier.clone();
    fold_classifier.seed = classifier.seed.wrapping_add(fold as u64);
    let model = fold_classifier.fit(&x_train, train.labels(), train.class_set())?;

    let x_test = dataset.matrix().sample_major(&subset.indices, &test);
    let predictions = x_test
        .iter()
        .map(|row| model.predict_proba(row))
        .collect::<Result<Vec<_>>>()?;
    let counts = train.class_counts();
    let total = train_idx.len() as f64;
    Ok(FoldOutcome {
        test,
        predictions,
        prior: counts.iter().map(|&c| c as f64 / total).collect(),
        features: subset.feature_ids,
    })
}

/// Cross-validates selector + classifier: each fold selects features and
/// trains on its training rows only, then predicts its held-out rows.
/// Predictions from all folds are pooled in fold order into one report.
pub fn nested_cv(
    dataset: &LabeledDataset,
    selector: &SelectorConfig,
    classifier: &ClassifierConfig,
    plan: &FoldPlan,
    options: &NestedCvOptions,
) -> Result<EvalReport> {
    let n = dataset.matrix().n_samples();
    if plan.assignment.len() != n || plan.assignment.iter().any(|&f| f >= plan.k) {
        return Err(Error::DimensionMismatch {
            expected: format!("fold plan over {} samples", n),
            found: format!("{} assignments", plan.assignment.len()),
        });
    }
    dataset.require_classes(2)?;

    let outcomes: Vec<Result<FoldOutcome>> = (0..plan.k)
        .into_par_iter()
        .map(|fold| run_fold(dataset, selector, classifier, plan, fold))
        .collect();

    let mut cm = ConfusionMatrix::zeros(dataset.class_set());
    let mut predictions = Vec::new();
    let mut truths = Vec::new();
    let mut baselines = Vec::new();
    let mut failed = Vec::new();
    let mut fold_subsets = Vec::new();
    for (fold, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(o) => {
                for (&s, p) in o.test.iter().zip(o.predictions) {
                    let truth = dataset.labels()[s];
                    cm.add(truth, crate::stats::argmax(&p));
                    predictions.push(p);
                    truths.push(truth);
                    baselines.push(o.prior.clone());
                }
                fold_subsets.push(o.features);
            }
            Err(e) if options.continue_on_failure => {
                log::warn!("fold {} failed: {}", fold, e);
                failed.push(FoldFailure {
                    fold,
                    code: e.code().to_string(),
                    message: e.to_string(),
                });
            }
            Err(e) => {
                return Err(Error::FoldFailed {
                    fold,
                    source: Box::new(e),
                })
            }
        }
    }
    if predictions.is_empty() {
        return Err(Error::InsufficientData("every fold failed".into()));
    }
    let errors = prob_errors_with_baselines(&predictions, &truths, &baselines)?;
    Ok(EvalReport {
        accuracy: cm.accuracy(),
        kappa: kappa(&cm)?,
        mae: errors.mae,
        rmse: errors.rmse,
        rae: errors.rae,
        rrse: errors.rrse,
        n_instances: cm.n_instances(),
        complete: failed.is_empty(),
        failed_folds: failed,
        fold_subsets,
        confusion: cm,
        config: ReportConfig {
            selector: selector.clone(),
            classifier: classifier.clone(),
            folds: plan.k,
            fold_seed: plan.seed,
        },
    })
}
