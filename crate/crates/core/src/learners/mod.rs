//! Classifiers used for subset evaluation and for final model assessment.

mod decision_table;
mod lvq;
mod naive_bayes;
mod svm;

use serde::{Deserialize, Serialize};

pub use decision_table::{DecisionCell, DecisionTableModel, DecisionTableParams};
pub use lvq::{LvqModel, LvqParams};
pub use naive_bayes::{NaiveBayesModel, NaiveBayesParams};
pub use svm::{dual_objective, kkt_violations, smo_solve, PairwiseMachine, SmoOutcome, SvmModel, SvmParams};

pub(crate) use svm::{linear_gram, train_pairs};

use crate::error::{Error, Result};
use crate::stats;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    NaiveBayes,
    LinearSvm,
    Lvq,
    DecisionTable,
}

impl ClassifierKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "nb",
            ClassifierKind::LinearSvm => "svm",
            ClassifierKind::Lvq => "lvq",
            ClassifierKind::DecisionTable => "dtable",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "nb" | "naive_bayes" => Some(ClassifierKind::NaiveBayes),
            "svm" | "linear_svm" => Some(ClassifierKind::LinearSvm),
            "lvq" => Some(ClassifierKind::Lvq),
            "dtable" | "decision_table" => Some(ClassifierKind::DecisionTable),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub naive_bayes: NaiveBayesParams,
    pub svm: SvmParams,
    pub lvq: LvqParams,
    pub decision_table: DecisionTableParams,
}

/// A classifier kind with its hyperparameters and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    pub params: Hyperparameters,
    pub seed: u64,
}

impl ClassifierConfig {
    pub fn new(kind: ClassifierKind) -> Self {
        Self {
            kind,
            params: Hyperparameters::default(),
            seed: 0,
        }
    }

    pub fn fit(&self, x: &[Vec<f64>], y: &[usize], class_set: &[String]) -> Result<ClassifierModel> {
        fit(self.kind, x, y, class_set, &self.params, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    NaiveBayes(NaiveBayesModel),
    LinearSvm(SvmModel),
    Lvq(LvqModel),
    DecisionTable(DecisionTableModel),
}

/// A trained classifier; serializes to a versioned JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub version: u32,
    pub class_set: Vec<String>,
    pub n_features: usize,
    pub model: ModelParams,
}

/// Trains a classifier on a samples × features matrix with class indices
/// into `class_set`. Every class must have at least one sample.
pub fn fit(
    kind: ClassifierKind,
    x: &[Vec<f64>],
    y: &[usize],
    class_set: &[String],
    params: &Hyperparameters,
    seed: u64,
) -> Result<ClassifierModel> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} labels for a non-empty training set", x.len()),
            found: format!("{} labels", y.len()),
        });
    }
    let d = x[0].len();
    if d == 0 {
        return Err(Error::InsufficientData("at least one feature is required".into()));
    }
    if let Some(r) = x.iter().position(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: format!("{} features", d),
            found: format!("{} features in training row {}", x[r].len(), r),
        });
    }
    if x.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("training features contain NaN".into()));
    }
    let k = class_set.len();
    if let Some(bad) = y.iter().find(|&&l| l >= k) {
        return Err(Error::UnknownLabel(format!("class index {}", bad)));
    }
    let mut counts = vec![0usize; k];
    y.iter().for_each(|&l| counts[l] += 1);
    if let Some(c) = counts.iter().position(|&n| n == 0) {
        return Err(Error::InsufficientData(format!("class `{}` has no training samples", class_set[c])));
    }
    if k < 2 {
        return Err(Error::InsufficientData("at least 2 classes are required".into()));
    }

    validate_params(kind, params)?;
    let model = match kind {
        ClassifierKind::NaiveBayes => ModelParams::NaiveBayes(naive_bayes::fit(x, y, k, &params.naive_bayes)),
        ClassifierKind::LinearSvm => ModelParams::LinearSvm(svm::fit(x, y, k, &params.svm)?),
        ClassifierKind::Lvq => ModelParams::Lvq(lvq::fit(x, y, k, &params.lvq, seed)),
        ClassifierKind::DecisionTable => {
            ModelParams::DecisionTable(decision_table::fit(x, y, k, &params.decision_table))
        }
    };
    Ok(ClassifierModel {
        version: MODEL_FORMAT_VERSION,
        class_set: class_set.to_vec(),
        n_features: d,
        model,
    })
}

fn validate_params(kind: ClassifierKind, params: &Hyperparameters) -> Result<()> {
    let ok = match kind {
        ClassifierKind::NaiveBayes => params.naive_bayes.variance_floor > 0.0,
        ClassifierKind::LinearSvm => params.svm.c > 0.0 && params.svm.tolerance > 0.0,
        ClassifierKind::Lvq => {
            params.lvq.prototypes_per_class >= 1
                && params.lvq.epochs >= 1
                && params.lvq.learning_rate >= 0.0
        }
        ClassifierKind::DecisionTable => params.decision_table.bins >= 1,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{} hyperparameters out of range", kind.name())))
    }
}

impl ClassifierModel {
    pub fn kind(&self) -> ClassifierKind {
        match self.model {
            ModelParams::NaiveBayes(_) => ClassifierKind::NaiveBayes,
            ModelParams::LinearSvm(_) => ClassifierKind::LinearSvm,
            ModelParams::Lvq(_) => ClassifierKind::Lvq,
            ModelParams::DecisionTable(_) => ClassifierKind::DecisionTable,
        }
    }

    pub fn class_set(&self) -> &[String] {
        &self.class_set
    }

    /// Distribution over the class set for one sample.
    pub fn predict_proba(&self, sample: &[f64]) -> Result<Vec<f64>> {
        if sample.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: format!("{} features", self.n_features),
                found: format!("{} features", sample.len()),
            });
        }
        let k = self.class_set.len();
        Ok(match &self.model {
            ModelParams::NaiveBayes(m) => m.predict_proba(sample),
            ModelParams::LinearSvm(m) => m.predict_proba(sample, k),
            ModelParams::Lvq(m) => m.predict_proba(sample, k),
            ModelParams::DecisionTable(m) => m.predict_proba(sample),
        })
    }

    /// Index of the most probable class; ties go to the earlier class.
    pub fn predict(&self, sample: &[f64]) -> Result<usize> {
        Ok(stats::argmax(&self.predict_proba(sample)?))
    }

    pub fn predict_label(&self, sample: &[f64]) -> Result<&str> {
        let i = self.predict(sample)?;
        Ok(&self.class_set[i])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        if model.version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported model format version {}",
                model.version
            )));
        }
        Ok(model)
    }
}

/// Pairwise machines of a linear SVM.
pub fn svm_weights(model: &ClassifierModel) -> Result<&[PairwiseMachine]> {
    match &model.model {
        ModelParams::LinearSvm(m) => Ok(&m.machines),
        _ => Err(Error::InvalidParameter(format!(
            "weights requested from a {} model",
            model.kind().name()
        ))),
    }
}

/// Argmax of a distribution; ties go to the earlier class.
pub fn argmax(distribution: &[f64]) -> usize {
    stats::argmax(distribution)
}
