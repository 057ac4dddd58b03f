//! Run configuration: defaults, then a `key=value` file, then flags.
//!
//! Every key can appear in the file and as a `--kebab-case` flag. The echo
//! written with each run lists every key with its effective value, so it
//! can be passed back through `--config` to repeat the run.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use biomarker::corpus::Stage;
use biomarker::diffexpr::StatisticKind;
use biomarker::featsel::{SearchStrategy, SelectorConfig, SelectorKind};
use biomarker::learners::{ClassifierConfig, ClassifierKind};
use biomarker::preprocess::PreprocessConfig;
use biomarker::synthgen::SynthSpec;

#[derive(Debug)]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub calls: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub workers: usize,
    pub class_prefixes: Vec<String>,
    pub input_stage: Stage,

    pub preprocess: PreprocessConfig,

    pub statistic: StatisticKind,
    pub permutations: usize,
    pub permutation_seed: u64,
    pub fdr_cutoff: f64,
    pub heatmap_top: usize,

    pub selector: SelectorConfig,

    pub classifier: ClassifierConfig,
    pub folds: usize,
    pub fold_seed: u64,
    pub continue_on_failure: bool,

    pub simulate: SynthSpec,
    pub markers: usize,
    pub shift: f64,
}

/// Every recognised key, in echo order.
pub const KEYS: &[&str] = &[
    "input",
    "calls",
    "out_dir",
    "seed",
    "workers",
    "class_prefixes",
    "input_stage",
    "present_fraction",
    "noise_floor",
    "z_threshold",
    "log_base",
    "log_epsilon",
    "surrogate_floor",
    "statistic",
    "permutations",
    "permutation_seed",
    "fdr_cutoff",
    "heatmap_top",
    "selector",
    "search",
    "top_k",
    "internal_folds",
    "stale_limit",
    "eliminate_per_iteration",
    "svm_c",
    "wrapper_learner",
    "selector_seed",
    "classifier",
    "classifier_seed",
    "nb_variance_floor",
    "lvq_prototypes",
    "lvq_learning_rate",
    "lvq_epochs",
    "dtable_bins",
    "folds",
    "fold_seed",
    "continue_on_failure",
    "genes",
    "class_sizes",
    "markers",
    "shift",
    "present_rate",
    "outlier_rate",
    "outlier_magnitude",
    "log_mean_range",
    "log_std_range",
    "simulate_seed",
];

/// Seeds that fall back to `seed` when not given.
const DERIVED_SEEDS: &[&str] = &[
    "permutation_seed",
    "selector_seed",
    "classifier_seed",
    "fold_seed",
    "simulate_seed",
];

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("config line {}: expected key=value", i + 1)))?;
        map.insert(key.trim().replace('-', "_"), value.trim().to_string());
    }
    Ok(map)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| ConfigError(format!("invalid value `{}` for {}: {}", value, key, e)))
}

fn parse_pair(key: &str, value: &str) -> Result<(f64, f64), ConfigError> {
    let (a, b) = value
        .split_once(',')
        .ok_or_else(|| ConfigError(format!("{} expects `low,high`", key)))?;
    Ok((parse(key, a.trim())?, parse(key, b.trim())?))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: Display,
{
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

fn stage_name(stage: Stage) -> &'static str {
    match stage {
        Stage::Raw => "raw",
        Stage::Log => "log",
        Stage::Zscore => "zscore",
    }
}

fn join<T: Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            calls: None,
            out_dir: PathBuf::from("."),
            seed: 0,
            workers: 0,
            class_prefixes: biomarker::corpus::DEFAULT_CLASS_PREFIXES.iter().map(|s| s.to_string()).collect(),
            input_stage: Stage::Zscore,
            preprocess: PreprocessConfig::default(),
            statistic: StatisticKind::AnovaF,
            permutations: 1000,
            permutation_seed: 0,
            fdr_cutoff: 0.01,
            heatmap_top: 60,
            selector: SelectorConfig::rsvm(),
            classifier: ClassifierConfig::new(ClassifierKind::LinearSvm),
            folds: 10,
            fold_seed: 0,
            continue_on_failure: false,
            simulate: SynthSpec::default(),
            markers: 10,
            shift: 2.0,
        }
    }
}

impl RunConfig {
    /// Applies `values` over the defaults. Seeds not given take `seed`.
    pub fn from_map(values: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let mut c = RunConfig::default();
        if let Some(unknown) = values.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(ConfigError(format!("unknown configuration key `{}`", unknown)));
        }
        let seed: u64 = match values.get("seed") {
            Some(v) => parse("seed", v)?,
            None => 0,
        };
        for key in DERIVED_SEEDS {
            if !values.contains_key(*key) {
                c.set(key, &seed.to_string())?;
            }
        }
        // selector-specific defaults first, so explicit keys override them
        if let Some(v) = values.get("selector") {
            c.set("selector", v)?;
        }
        for (k, v) in values {
            c.set(k, v)?;
        }
        Ok(c)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let hp = &mut self.classifier.params;
        match key {
            "input" => self.input = (!v.is_empty()).then(|| PathBuf::from(v)),
            "calls" => self.calls = (!v.is_empty()).then(|| PathBuf::from(v)),
            "out_dir" => self.out_dir = PathBuf::from(v),
            "seed" => self.seed = parse(key, v)?,
            "workers" => self.workers = parse(key, v)?,
            "class_prefixes" => self.class_prefixes = parse_list(key, v)?,
            "input_stage" => {
                self.input_stage = match v {
                    "raw" => Stage::Raw,
                    "log" => Stage::Log,
                    "zscore" => Stage::Zscore,
                    _ => return Err(ConfigError(format!("input_stage must be raw, log or zscore, not `{}`", v))),
                }
            }
            "present_fraction" => self.preprocess.present_fraction = parse(key, v)?,
            "noise_floor" => self.preprocess.noise_floor = parse(key, v)?,
            "z_threshold" => self.preprocess.z_threshold = parse(key, v)?,
            "log_base" => self.preprocess.log_base = parse(key, v)?,
            "log_epsilon" => self.preprocess.log_epsilon = parse(key, v)?,
            "surrogate_floor" => self.preprocess.surrogate_floor = parse(key, v)?,
            "statistic" => {
                self.statistic = match v {
                    "f" | "anova" => StatisticKind::AnovaF,
                    "t" => StatisticKind::WelchT,
                    "snr" => StatisticKind::Snr,
                    _ => return Err(ConfigError(format!("statistic must be f, t or snr, not `{}`", v))),
                }
            }
            "permutations" => self.permutations = parse(key, v)?,
            "permutation_seed" => self.permutation_seed = parse(key, v)?,
            "fdr_cutoff" => self.fdr_cutoff = parse(key, v)?,
            "heatmap_top" => self.heatmap_top = parse(key, v)?,
            "selector" => {
                let kind = SelectorKind::from_name(v)
                    .ok_or_else(|| ConfigError(format!("selector must be wse, cfs or rsvm, not `{}`", v)))?;
                if kind != self.selector.selector {
                    let seed = self.selector.seed;
                    self.selector = SelectorConfig {
                        seed,
                        ..SelectorConfig::for_selector(kind)
                    };
                }
            }
            "search" => {
                self.selector.search = SearchStrategy::from_name(v)
                    .ok_or_else(|| ConfigError(format!("search must be greedy, bestfirst or ranker, not `{}`", v)))?
            }
            "top_k" => self.selector.top_k = parse(key, v)?,
            "internal_folds" => self.selector.internal_folds = parse(key, v)?,
            "stale_limit" => self.selector.stale_limit = parse(key, v)?,
            "eliminate_per_iteration" => self.selector.eliminate_per_iteration = parse(key, v)?,
            "svm_c" => {
                let c: f64 = parse(key, v)?;
                self.selector.svm_c = c;
                hp.svm.c = c;
            }
            "wrapper_learner" => {
                self.selector.wrapper_learner = ClassifierKind::from_name(v)
                    .ok_or_else(|| ConfigError(format!("unknown wrapper learner `{}`", v)))?
            }
            "selector_seed" => self.selector.seed = parse(key, v)?,
            "classifier" => {
                self.classifier.kind = ClassifierKind::from_name(v)
                    .ok_or_else(|| ConfigError(format!("classifier must be nb, svm, lvq or dtable, not `{}`", v)))?
            }
            "classifier_seed" => self.classifier.seed = parse(key, v)?,
            "nb_variance_floor" => hp.naive_bayes.variance_floor = parse(key, v)?,
            "lvq_prototypes" => hp.lvq.prototypes_per_class = parse(key, v)?,
            "lvq_learning_rate" => hp.lvq.learning_rate = parse(key, v)?,
            "lvq_epochs" => hp.lvq.epochs = parse(key, v)?,
            "dtable_bins" => hp.decision_table.bins = parse(key, v)?,
            "folds" => self.folds = parse(key, v)?,
            "fold_seed" => self.fold_seed = parse(key, v)?,
            "continue_on_failure" => self.continue_on_failure = parse(key, v)?,
            "genes" => self.simulate.genes = parse(key, v)?,
            "class_sizes" => self.simulate.class_sizes = parse_list(key, v)?,
            "markers" => self.markers = parse(key, v)?,
            "shift" => self.shift = parse(key, v)?,
            "present_rate" => self.simulate.present_rate = parse(key, v)?,
            "outlier_rate" => self.simulate.outlier_rate = parse(key, v)?,
            "outlier_magnitude" => self.simulate.outlier_magnitude = parse(key, v)?,
            "log_mean_range" => self.simulate.log_mean_range = parse_pair(key, v)?,
            "log_std_range" => self.simulate.log_std_range = parse_pair(key, v)?,
            "simulate_seed" => self.simulate.seed = parse(key, v)?,
            _ => return Err(ConfigError(format!("unknown configuration key `{}`", key))),
        }
        Ok(())
    }

    fn get(&self, key: &str) -> String {
        let hp = &self.classifier.params;
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        match key {
            "input" => path(&self.input),
            "calls" => path(&self.calls),
            "out_dir" => self.out_dir.display().to_string(),
            "seed" => self.seed.to_string(),
            "workers" => self.workers.to_string(),
            "class_prefixes" => self.class_prefixes.join(","),
            "input_stage" => stage_name(self.input_stage).to_string(),
            "present_fraction" => self.preprocess.present_fraction.to_string(),
            "noise_floor" => self.preprocess.noise_floor.to_string(),
            "z_threshold" => self.preprocess.z_threshold.to_string(),
            "log_base" => self.preprocess.log_base.to_string(),
            "log_epsilon" => self.preprocess.log_epsilon.to_string(),
            "surrogate_floor" => self.preprocess.surrogate_floor.to_string(),
            "statistic" => self.statistic.name().to_string(),
            "permutations" => self.permutations.to_string(),
            "permutation_seed" => self.permutation_seed.to_string(),
            "fdr_cutoff" => self.fdr_cutoff.to_string(),
            "heatmap_top" => self.heatmap_top.to_string(),
            "selector" => self.selector.selector.name().to_string(),
            "search" => self.selector.search.name().to_string(),
            "top_k" => self.selector.top_k.to_string(),
            "internal_folds" => self.selector.internal_folds.to_string(),
            "stale_limit" => self.selector.stale_limit.to_string(),
            "eliminate_per_iteration" => self.selector.eliminate_per_iteration.to_string(),
            "svm_c" => self.selector.svm_c.to_string(),
            "wrapper_learner" => self.selector.wrapper_learner.name().to_string(),
            "selector_seed" => self.selector.seed.to_string(),
            "classifier" => self.classifier.kind.name().to_string(),
            "classifier_seed" => self.classifier.seed.to_string(),
            "nb_variance_floor" => hp.naive_bayes.variance_floor.to_string(),
            "lvq_prototypes" => hp.lvq.prototypes_per_class.to_string(),
            "lvq_learning_rate" => hp.lvq.learning_rate.to_string(),
            "lvq_epochs" => hp.lvq.epochs.to_string(),
            "dtable_bins" => hp.decision_table.bins.to_string(),
            "folds" => self.folds.to_string(),
            "fold_seed" => self.fold_seed.to_string(),
            "continue_on_failure" => self.continue_on_failure.to_string(),
            "genes" => self.simulate.genes.to_string(),
            "class_sizes" => join(&self.simulate.class_sizes),
            "markers" => self.markers.to_string(),
            "shift" => self.shift.to_string(),
            "present_rate" => self.simulate.present_rate.to_string(),
            "outlier_rate" => self.simulate.outlier_rate.to_string(),
            "outlier_magnitude" => self.simulate.outlier_magnitude.to_string(),
            "log_mean_range" => format!("{},{}", self.simulate.log_mean_range.0, self.simulate.log_mean_range.1),
            "log_std_range" => format!("{},{}", self.simulate.log_std_range.0, self.simulate.log_std_range.1),
            "simulate_seed" => self.simulate.seed.to_string(),
            _ => unreachable!("unknown key {}", key),
        }
    }

    /// `key=value` lines for every key, headed by the subcommand.
    pub fn echo(&self, subcommand: &str) -> String {
        let mut out = format!("# biomarker {}\n", subcommand);
        for key in KEYS {
            out.push_str(&format!("{}={}\n", key, self.get(key)));
        }
        out
    }

    /// Simulation spec with the planted markers applied.
    pub fn synth_spec(&self) -> SynthSpec {
        let planted = SynthSpec::planted(
            self.simulate.genes,
            self.simulate.class_sizes.clone(),
            self.markers,
            self.shift,
            self.simulate.seed,
        );
        SynthSpec {
            informative: planted.informative,
            ..self.simulate.clone()
        }
    }
}
