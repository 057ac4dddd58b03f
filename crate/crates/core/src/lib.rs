//! Biomarker discovery for microarray expression data.
//!
//! The crate covers the whole analysis chain for a probesets × samples
//! expression matrix with class-labelled samples:
//!
//! * [`corpus`]: data model and tab-separated file I/O
//! * [`preprocess`]: present-call and noise filtering, log transform,
//!   z-scoring, within-class outlier detection and imputation
//! * [`diffexpr`]: t / SNR / ANOVA F statistics, permutation p-values and
//!   FDR / FWER adjustment
//! * [`learners`]: Gaussian naive Bayes, linear SVM (SMO), LVQ1 and a
//!   decision table
//! * [`featsel`]: CFS and wrapper subset search (greedy stepwise, best
//!   first) and SVM recursive feature elimination
//! * [`evaluate`]: stratified folds, nested cross-validation and the
//!   confusion-matrix / probability-error metrics
//! * [`synthgen`]: synthetic MAS5-like data with planted markers
//!
//! ```ignore
//! use biomarker::prelude::*;
//!
//! let sim = generate(&SynthSpec::planted(2000, vec![22, 33, 50], 10, 2.0, 7))?;
//! let pre = preprocess::run(&sim.dataset, Some(&sim.calls), &PreprocessConfig::default())?;
//! let scores = rank_genes(&pre.dataset, StatisticKind::AnovaF, &PermutationPlan::new(1000, 7))?;
//! ```

pub mod corpus;
pub mod diffexpr;
pub mod error;
pub mod evaluate;
pub mod featsel;
pub mod learners;
pub mod preprocess;
pub mod synthgen;

mod rng;
mod stats;

pub use error::{Error, ErrorClass, Result};

pub mod prelude {
    pub use crate::corpus::{
        infer_labels, parse_call_table, parse_expression_table, write_table, Call, CallMatrix,
        ExpressionMatrix, LabeledDataset, Stage, TsvWrite,
    };
    pub use crate::diffexpr::{
        adjust_bh, adjust_bonferroni, adjust_hochberg, anova_f, heatmap_export,
        permutation_pvalues, rank_genes, snr, welch_t, GeneScore, PermutationPlan, StatisticKind,
    };
    pub use crate::error::{Error, Result};
    pub use crate::evaluate::{
        confusion, kappa, nested_cv, prob_errors, stratified_folds, ConfusionMatrix, EvalReport,
        FoldPlan, NestedCvOptions,
    };
    pub use crate::featsel::{
        best_first, cfs_merit, greedy_stepwise, run_selector, select_top_k, svm_rfe,
        wrapper_eval, FeatureRanking, FeatureSubset, SearchStrategy, SelectorConfig,
    };
    pub use crate::learners::{
        fit, ClassifierConfig, ClassifierKind, ClassifierModel, Hyperparameters,
    };
    pub use crate::preprocess::{self, PreprocessConfig};
    pub use crate::synthgen::{generate, SynthSpec, TruthRecord};
}
