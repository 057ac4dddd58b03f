//! Multivariate feature selection: correlation-based (CFS) and wrapper
//! subset evaluation under greedy or best-first search, and SVM recursive
//! feature elimination with top-k selection.

mod cfs;
mod rfe;
mod search;
mod wrapper;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use cfs::{cfs_merit, correlation_ratio, merit_from_correlations, CfsEvaluator};
pub use rfe::{svm_rfe, svm_rfe_with, FeatureRanking};
pub use search::{best_first, greedy_stepwise};
pub use wrapper::{wrapper_eval, WrapperEvaluator};

use crate::corpus::{LabeledDataset, TsvWrite};
use crate::error::{Error, Result};
use crate::learners::{ClassifierConfig, ClassifierKind, SvmParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluatorKind {
    Cfs,
    Wrapper,
    Ranker,
}

/// Scores feature subsets given as indices into [`SubsetEvaluator::feature_ids`].
pub trait SubsetEvaluator: Sync {
    fn kind(&self) -> EvaluatorKind;
    fn feature_ids(&self) -> &[String];
    fn evaluate(&self, subset: &[usize]) -> Result<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub feature_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSubset {
    /// In order of selection.
    pub feature_ids: Vec<String>,
    pub indices: Vec<usize>,
    /// Merit, accuracy, or for a ranker the criterion of the last kept feature.
    pub score: f64,
    pub evaluator: EvaluatorKind,
    pub trace: Vec<TraceStep>,
}

/// The first `k` features of a ranking.
pub fn select_top_k(ranking: &FeatureRanking, k: usize) -> Result<FeatureSubset> {
    if k == 0 || k > ranking.indices.len() {
        return Err(Error::InvalidParameter(format!(
            "top-k of {} must be between 1 and {}",
            k,
            ranking.indices.len()
        )));
    }
    Ok(FeatureSubset {
        feature_ids: ranking.feature_ids[..k].to_vec(),
        indices: ranking.indices[..k].to_vec(),
        score: ranking.criteria[k - 1],
        evaluator: EvaluatorKind::Ranker,
        trace: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    Cfs,
    Wrapper,
    Rsvm,
}

impl SelectorKind {
    pub fn name(self) -> &'static str {
        match self {
            SelectorKind::Cfs => "cfs",
            SelectorKind::Wrapper => "wse",
            SelectorKind::Rsvm => "rsvm",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "cfs" => Some(SelectorKind::Cfs),
            "wse" | "wrapper" => Some(SelectorKind::Wrapper),
            "rsvm" | "svm" => Some(SelectorKind::Rsvm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    Greedy,
    BestFirst,
    Ranker,
}

impl SearchStrategy {
    pub fn name(self) -> &'static str {
        match self {
            SearchStrategy::Greedy => "greedy",
            SearchStrategy::BestFirst => "bestfirst",
            SearchStrategy::Ranker => "ranker",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "greedy" => Some(SearchStrategy::Greedy),
            "bestfirst" | "best_first" => Some(SearchStrategy::BestFirst),
            "ranker" => Some(SearchStrategy::Ranker),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    pub selector: SelectorKind,
    pub search: SearchStrategy,
    pub stale_limit: usize,
    pub top_k: usize,
    pub internal_folds: usize,
    pub wrapper_learner: ClassifierKind,
    pub eliminate_per_iteration: usize,
    pub svm_c: f64,
    pub seed: u64,
}

impl SelectorConfig {
    /// Wrapper over a decision table, 5 internal folds, greedy search.
    pub fn wse() -> Self {
        Self {
            selector: SelectorKind::Wrapper,
            search: SearchStrategy::Greedy,
            ..Self::cfs()
        }
    }

    /// CFS with greedy search.
    pub fn cfs() -> Self {
        Self {
            selector: SelectorKind::Cfs,
            search: SearchStrategy::Greedy,
            stale_limit: 5,
            top_k: 20,
            internal_folds: 5,
            wrapper_learner: ClassifierKind::DecisionTable,
            eliminate_per_iteration: 1,
            svm_c: 1.0,
            seed: 0,
        }
    }

    /// SVM-RFE eliminating one feature per round, top 20 kept.
    pub fn rsvm() -> Self {
        Self {
            selector: SelectorKind::Rsvm,
            search: SearchStrategy::Ranker,
            ..Self::cfs()
        }
    }

    pub fn for_selector(kind: SelectorKind) -> Self {
        match kind {
            SelectorKind::Cfs => Self::cfs(),
            SelectorKind::Wrapper => Self::wse(),
            SelectorKind::Rsvm => Self::rsvm(),
        }
    }
}

impl Default for SelectorConfig {
    fn default() -> Self {
        Self::cfs()
    }
}

fn run_search(evaluator: &dyn SubsetEvaluator, config: &SelectorConfig) -> Result<FeatureSubset> {
    match config.search {
        SearchStrategy::Greedy => greedy_stepwise(evaluator),
        SearchStrategy::BestFirst => best_first(evaluator, config.stale_limit),
        SearchStrategy::Ranker => Err(Error::InvalidParameter(format!(
            "the ranker search needs the rsvm selector, not {}",
            config.selector.name()
        ))),
    }
}

/// Runs the configured selector on `dataset`.
pub fn run_selector(dataset: &LabeledDataset, config: &SelectorConfig) -> Result<FeatureSubset> {
    match config.selector {
        SelectorKind::Cfs => run_search(&CfsEvaluator::new(dataset), config),
        SelectorKind::Wrapper => {
            let learner = ClassifierConfig {
                seed: config.seed,
                ..ClassifierConfig::new(config.wrapper_learner)
            };
            let evaluator = WrapperEvaluator::new(dataset, learner, config.internal_folds, config.seed)?;
            run_search(&evaluator, config)
        }
        SelectorKind::Rsvm => {
            if config.search != SearchStrategy::Ranker {
                return Err(Error::InvalidParameter(format!(
                    "rsvm produces a ranking; use the ranker search, not {}",
                    config.search.name()
                )));
            }
            let params = SvmParams {
                c: config.svm_c,
                ..SvmParams::default()
            };
            let ranking = svm_rfe_with(dataset, config.eliminate_per_iteration, &params)?;
            select_top_k(&ranking, config.top_k)
        }
    }
}

impl TsvWrite for FeatureSubset {
    fn write_tsv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "feature_id\trank\tscore")?;
        for (i, id) in self.feature_ids.iter().enumerate() {
            let score = if self.trace.len() == self.feature_ids.len() {
                self.trace[i].score
            } else {
                self.score
            };
            writeln!(out, "{}\t{}\t{}", id, i + 1, score)?;
        }
        Ok(())
    }
}

impl TsvWrite for FeatureRanking {
    fn write_tsv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "feature_id\trank\tcriterion")?;
        for (i, (id, c)) in self.feature_ids.iter().zip(&self.criteria).enumerate() {
            writeln!(out, "{}\t{}\t{}", id, i + 1, c)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ExpressionMatrix, Stage};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dataset(rows: Vec<Vec<f64>>, labels: &[usize]) -> LabeledDataset {
        let m = ExpressionMatrix::from_rows(
            (0..rows.len()).map(|i| format!("f{}", i)).collect(),
            (0..labels.len()).map(|i| format!("s{:02}", i)).collect(),
            rows,
            Stage::Log,
        )
        .unwrap();
        let l: Vec<String> = labels.iter().map(|&c| ["A", "B", "C"][c].to_string()).collect();
        LabeledDataset::new(m, &l).unwrap()
    }

    fn noise(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.random::<f64>() - 0.5).collect()
    }

    #[test]
    fn single_informative_feature_is_chosen_alone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let labels: Vec<usize> = (0..30).map(|s| s % 2).collect();
        let signal: Vec<f64> = labels.iter().map(|&l| l as f64 + 0.01 * rng.random::<f64>()).collect();
        let mut rows = vec![signal];
        let constant_rows = 4;
        rows.extend((0..constant_rows).map(|_| vec![1.0; 30]));
        let s = greedy_stepwise(&CfsEvaluator::new(&dataset(rows, &labels))).unwrap();
        assert_eq!(s.feature_ids, vec!["f0"]);
        assert_eq!(s.trace.len(), 1);
    }

    #[test]
    fn duplicate_copy_enters_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let labels: Vec<usize> = (0..40).map(|s| s % 2).collect();
        let best: Vec<f64> = labels.iter().map(|&l| l as f64 + rng.random::<f64>()).collect();
        let rows = vec![noise(&mut rng, 40), best.clone(), noise(&mut rng, 40), best];
        let s = greedy_stepwise(&CfsEvaluator::new(&dataset(rows, &labels))).unwrap();
        assert_eq!(s.feature_ids[0], "f1");
        assert!(!s.feature_ids.contains(&"f3".to_string()));
    }

    #[test]
    fn greedy_trace_strictly_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let labels: Vec<usize> = (0..45).map(|s| s % 3).collect();
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|g| labels.iter().map(|&l| (l == g % 3) as u8 as f64 * 0.3 + rng.random::<f64>()).collect())
            .collect();
        let s = greedy_stepwise(&CfsEvaluator::new(&dataset(rows, &labels))).unwrap();
        assert_eq!(s.trace.len(), s.feature_ids.len());
        for w in s.trace.windows(2) {
            assert!(w[1].score > w[0].score);
        }
        assert_eq!(s.trace.last().unwrap().score, s.score);
    }

    fn exhaustive_best(ev: &CfsEvaluator, d: usize) -> f64 {
        (1u32..(1 << d))
            .map(|mask| {
                let subset: Vec<usize> = (0..d).filter(|&f| mask >> f & 1 == 1).collect();
                ev.evaluate(&subset).unwrap()
            })
            .fold(f64::MIN, f64::max)
    }

    #[test]
    fn best_first_reaches_exhaustive_optimum() {
        let trials = 100;
        let mut hits = 0;
        for t in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + t);
            let n = 24;
            let labels: Vec<usize> = (0..n).map(|s| s % 2).collect();
            let base = noise(&mut rng, n);
            let rows: Vec<Vec<f64>> = (0..5)
                .map(|_| {
                    let shift = rng.random::<f64>();
                    let mix = rng.random::<f64>();
                    (0..n)
                        .map(|s| labels[s] as f64 * shift + mix * base[s] + rng.random::<f64>() - 0.5)
                        .collect()
                })
                .collect();
            let ev = CfsEvaluator::new(&dataset(rows, &labels));
            let Ok(found) = best_first(&ev, 5) else { continue };
            let greedy = greedy_stepwise(&ev).unwrap();
            assert!(found.score >= greedy.score);
            if (found.score - exhaustive_best(&ev, 5)).abs() < 1e-12 {
                hits += 1;
            }
        }
        assert!(hits * 10 >= trials * 9, "{} of {}", hits, trials);
    }

    #[test]
    fn top_k_bounds() {
        let ranking = FeatureRanking {
            feature_ids: vec!["x".into(), "y".into(), "z".into()],
            indices: vec![2, 0, 1],
            criteria: vec![3.0, 2.0, 1.0],
            trainings: 2,
        };
        assert_eq!(select_top_k(&ranking, 1).unwrap().feature_ids, vec!["x"]);
        assert_eq!(select_top_k(&ranking, 3).unwrap().indices, vec![2, 0, 1]);
        assert!(select_top_k(&ranking, 0).is_err());
        assert!(select_top_k(&ranking, 4).is_err());
        assert_eq!(
            ranking.to_tsv_string(),
            "feature_id\trank\tcriterion\nx\t1\t3\ny\t2\t2\nz\t3\t1\n"
        );
    }

    #[test]
    fn selector_dispatch() {
        let labels: Vec<usize> = (0..20).map(|s| s % 2).collect();
        let rows = vec![
            labels.iter().map(|&l| l as f64).collect(),
            (0..20).map(|s| (s as f64).sin()).collect(),
            (0..20).map(|s| (s as f64 * 0.3).cos()).collect(),
        ];
        let ds = dataset(rows, &labels);
        for config in [SelectorConfig::cfs(), SelectorConfig::wse()] {
            let s = run_selector(&ds, &config).unwrap();
            assert_eq!(s.feature_ids[0], "f0");
        }
        let mut rsvm = SelectorConfig::rsvm();
        rsvm.top_k = 2;
        let s = run_selector(&ds, &rsvm).unwrap();
        assert_eq!(s.feature_ids.len(), 2);
        assert_eq!(s.feature_ids[0], "f0");
        let mut bad = SelectorConfig::cfs();
        bad.search = SearchStrategy::Ranker;
        assert!(matches!(run_selector(&ds, &bad), Err(Error::InvalidParameter(_))));
        rsvm.search = SearchStrategy::Greedy;
        assert!(matches!(run_selector(&ds, &rsvm), Err(Error::InvalidParameter(_))));
    }
}
