//! `biomarker` command-line front end.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 algorithm failure.
//! On failure one line `error: <code>` goes to stdout and the detail to stderr.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use biomarker::ErrorClass;
use clap::{Args, Parser, Subcommand};

use config::{parse_file, RunConfig};

#[derive(Parser)]
#[command(name = "biomarker", version, about = "Microarray biomarker discovery pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    options: Options,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Filter, log-transform, impute outliers and z-score a raw matrix.
    Preprocess,
    /// Permutation-tested differential expression and heatmap export.
    Rank,
    /// Feature subset selection or SVM-RFE ranking.
    Select,
    /// Nested cross-validation of a selector and classifier.
    Evaluate,
    /// Generate a synthetic dataset with planted markers.
    Simulate,
    /// Preprocess, rank, select and evaluate in one run.
    Pipeline,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Preprocess => "preprocess",
            Command::Rank => "rank",
            Command::Select => "select",
            Command::Evaluate => "evaluate",
            Command::Simulate => "simulate",
            Command::Pipeline => "pipeline",
        }
    }
}

/// Flags mirror the configuration keys; unset flags leave the file or
/// default value in place.
#[derive(Args, Default)]
struct Options {
    /// key=value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Expression matrix (tab-separated).
    #[arg(long, global = true)]
    input: Option<String>,
    /// MAS5 detection-call table aligned with the input.
    #[arg(long, global = true)]
    calls: Option<String>,
    #[arg(long, global = true)]
    out_dir: Option<String>,
    /// Base seed for every random step without its own seed.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<String>,
    #[arg(long, global = true)]
    class_prefixes: Option<String>,
    /// Stage of the input for rank/select/evaluate: raw, log or zscore.
    #[arg(long, global = true)]
    input_stage: Option<String>,
    #[arg(long, global = true)]
    present_fraction: Option<String>,
    #[arg(long, global = true)]
    noise_floor: Option<String>,
    #[arg(long, global = true)]
    z_threshold: Option<String>,
    #[arg(long, global = true)]
    log_base: Option<String>,
    #[arg(long, global = true)]
    log_epsilon: Option<String>,
    #[arg(long, global = true)]
    surrogate_floor: Option<String>,
    /// f, t or snr.
    #[arg(long, global = true)]
    statistic: Option<String>,
    #[arg(long, global = true)]
    permutations: Option<String>,
    #[arg(long, global = true)]
    permutation_seed: Option<String>,
    #[arg(long, global = true)]
    fdr_cutoff: Option<String>,
    #[arg(long, global = true)]
    heatmap_top: Option<String>,
    /// wse, cfs or rsvm.
    #[arg(long, global = true)]
    selector: Option<String>,
    /// greedy, bestfirst or ranker.
    #[arg(long, global = true)]
    search: Option<String>,
    #[arg(long, global = true)]
    top_k: Option<String>,
    #[arg(long, global = true)]
    internal_folds: Option<String>,
    #[arg(long, global = true)]
    stale_limit: Option<String>,
    #[arg(long, global = true)]
    eliminate_per_iteration: Option<String>,
    #[arg(long, global = true)]
    svm_c: Option<String>,
    #[arg(long, global = true)]
    wrapper_learner: Option<String>,
    #[arg(long, global = true)]
    selector_seed: Option<String>,
    /// nb, svm, lvq or dtable.
    #[arg(long, global = true)]
    classifier: Option<String>,
    #[arg(long, global = true)]
    classifier_seed: Option<String>,
    #[arg(long, global = true)]
    nb_variance_floor: Option<String>,
    #[arg(long, global = true)]
    lvq_prototypes: Option<String>,
    #[arg(long, global = true)]
    lvq_learning_rate: Option<String>,
    #[arg(long, global = true)]
    lvq_epochs: Option<String>,
    #[arg(long, global = true)]
    dtable_bins: Option<String>,
    #[arg(long, global = true)]
    folds: Option<String>,
    #[arg(long, global = true)]
    fold_seed: Option<String>,
    #[arg(long, global = true)]
    continue_on_failure: Option<String>,
    #[arg(long, global = true)]
    genes: Option<String>,
    /// Comma-separated class sizes, e.g. 22,33,50.
    #[arg(long, global = true)]
    class_sizes: Option<String>,
    #[arg(long, global = true)]
    markers: Option<String>,
    /// Marker effect in within-gene standard deviations.
    #[arg(long, global = true)]
    shift: Option<String>,
    #[arg(long, global = true)]
    present_rate: Option<String>,
    #[arg(long, global = true)]
    outlier_rate: Option<String>,
    #[arg(long, global = true)]
    outlier_magnitude: Option<String>,
    #[arg(long, global = true)]
    log_mean_range: Option<String>,
    #[arg(long, global = true)]
    log_std_range: Option<String>,
    #[arg(long, global = true)]
    simulate_seed: Option<String>,
}

impl Options {
    fn overrides(&self) -> BTreeMap<String, String> {
        let pairs: [(&str, &Option<String>); 47] = [
            ("input", &self.input),
            ("calls", &self.calls),
            ("out_dir", &self.out_dir),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("class_prefixes", &self.class_prefixes),
            ("input_stage", &self.input_stage),
            ("present_fraction", &self.present_fraction),
            ("noise_floor", &self.noise_floor),
            ("z_threshold", &self.z_threshold),
            ("log_base", &self.log_base),
            ("log_epsilon", &self.log_epsilon),
            ("surrogate_floor", &self.surrogate_floor),
            ("statistic", &self.statistic),
            ("permutations", &self.permutations),
            ("permutation_seed", &self.permutation_seed),
            ("fdr_cutoff", &self.fdr_cutoff),
            ("heatmap_top", &self.heatmap_top),
            ("selector", &self.selector),
            ("search", &self.search),
            ("top_k", &self.top_k),
            ("internal_folds", &self.internal_folds),
            ("stale_limit", &self.stale_limit),
            ("eliminate_per_iteration", &self.eliminate_per_iteration),
            ("svm_c", &self.svm_c),
            ("wrapper_learner", &self.wrapper_learner),
            ("selector_seed", &self.selector_seed),
            ("classifier", &self.classifier),
            ("classifier_seed", &self.classifier_seed),
            ("nb_variance_floor", &self.nb_variance_floor),
            ("lvq_prototypes", &self.lvq_prototypes),
            ("lvq_learning_rate", &self.lvq_learning_rate),
            ("lvq_epochs", &self.lvq_epochs),
            ("dtable_bins", &self.dtable_bins),
            ("folds", &self.folds),
            ("fold_seed", &self.fold_seed),
            ("continue_on_failure", &self.continue_on_failure),
            ("genes", &self.genes),
            ("class_sizes", &self.class_sizes),
            ("markers", &self.markers),
            ("shift", &self.shift),
            ("present_rate", &self.present_rate),
            ("outlier_rate", &self.outlier_rate),
            ("outlier_magnitude", &self.outlier_magnitude),
            ("log_mean_range", &self.log_mean_range),
            ("log_std_range", &self.log_std_range),
            ("simulate_seed", &self.simulate_seed),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

enum Failure {
    Usage(String),
    Run(biomarker::Error),
}

fn fail(code: &str, status: u8, detail: &str) -> ExitCode {
    println!("error: {}", code);
    eprintln!("{}", detail);
    ExitCode::from(status)
}

fn resolve(options: &Options) -> Result<RunConfig, Failure> {
    let mut values = match &options.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {}", path.display(), e)))?;
            parse_file(&text).map_err(|e| Failure::Usage(e.0))?
        }
        None => BTreeMap::new(),
    };
    values.extend(options.overrides());
    RunConfig::from_map(&values).map_err(|e| Failure::Usage(e.0))
}

fn run(command: Command, options: &Options) -> Result<(), Failure> {
    let config = resolve(options)?;
    if config.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {} workers: {}", config.workers, e)))?;
    }
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Failure::Run(e.into()))?;
    commands::write_echo(&config, command.name()).map_err(Failure::Run)?;
    log::info!("running {} into {}", command.name(), config.out_dir.display());
    let result = match command {
        Command::Preprocess => commands::preprocess_cmd(&config),
        Command::Rank => commands::rank_cmd(&config),
        Command::Select => commands::select_cmd(&config),
        Command::Evaluate => commands::evaluate_cmd(&config),
        Command::Simulate => commands::simulate_cmd(&config),
        Command::Pipeline => commands::pipeline_cmd(&config),
    };
    result.map_err(Failure::Run)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{}", e);
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", 1, e.to_string().trim_end()),
    };
    match run(cli.command, &cli.options) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(detail)) => fail("usage", 1, &detail),
        Err(Failure::Run(e)) => {
            let status = match e.class() {
                ErrorClass::Usage => 1,
                ErrorClass::Data => 2,
                ErrorClass::Algorithm => 3,
            };
            fail(e.code(), status, &e.to_string())
        }
    }
}
