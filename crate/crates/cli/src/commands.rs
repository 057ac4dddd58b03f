use std::fs;
use std::path::{Path, PathBuf};

use biomarker::corpus::{
    infer_labels_with, parse_call_table, parse_expression_table, parse_matrix_with_stage, write_table, CallMatrix,
    LabeledDataset, Stage,
};
use biomarker::diffexpr::{count_significant, heatmap_export, rank_genes, GeneScore, PermutationPlan};
use biomarker::evaluate::{nested_cv, stratified_folds, EvalReport, NestedCvOptions};
use biomarker::featsel::{run_selector, svm_rfe_with, FeatureSubset, SelectorKind};
use biomarker::learners::SvmParams;
use biomarker::preprocess::{self, Preprocessed};
use biomarker::synthgen::generate;
use biomarker::{Error, Result};

use crate::config::RunConfig;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {}", path.display(), e)))
    })
}

fn input_path(config: &RunConfig) -> Result<&PathBuf> {
    config
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("--input is required for this subcommand".into()))
}

fn out(config: &RunConfig, name: &str) -> PathBuf {
    config.out_dir.join(name)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

/// Loads the input matrix and labels samples by their ID prefixes; the
/// class set follows the configured prefix order.
fn load_dataset(config: &RunConfig, stage: Stage) -> Result<LabeledDataset> {
    let text = read(input_path(config)?)?;
    let matrix = if stage == Stage::Raw {
        parse_expression_table(&text)?
    } else {
        parse_matrix_with_stage(&text, stage)?
    };
    let (labels, present) = infer_labels_with(matrix.sample_ids(), &config.class_prefixes)?;
    let class_set = config
        .class_prefixes
        .iter()
        .filter(|p| present.contains(p))
        .cloned()
        .collect();
    LabeledDataset::with_class_set(matrix, &labels, class_set)
}

fn load_calls(config: &RunConfig, dataset: &LabeledDataset) -> Result<Option<CallMatrix>> {
    match &config.calls {
        Some(path) => Ok(Some(parse_call_table(&read(path)?, Some(dataset.matrix()))?)),
        None => Ok(None),
    }
}

fn do_preprocess(config: &RunConfig) -> Result<Preprocessed> {
    let raw = load_dataset(config, Stage::Raw)?;
    let calls = load_calls(config, &raw)?;
    let pre = preprocess::run(&raw, calls.as_ref(), &config.preprocess)?;
    let r = &pre.filter_report;
    println!(
        "probesets: {} in, {} removed by present calls, {} removed by noise floor, {} kept",
        r.input_count, r.removed_by_calls, r.removed_by_noise, r.output_count
    );
    if pre.used_surrogate_calls {
        println!("no call table given; calls derived from the surrogate floor {}", config.preprocess.surrogate_floor);
    }
    println!("outliers flagged and imputed: {}", pre.outliers.len());
    if !pre.degenerate_rows.is_empty() {
        println!("constant probesets emitted as zeros: {}", pre.degenerate_rows.len());
    }
    Ok(pre)
}

fn do_rank(config: &RunConfig, dataset: &LabeledDataset) -> Result<Vec<GeneScore>> {
    let plan = PermutationPlan::new(config.permutations, config.permutation_seed);
    let scores = rank_genes(dataset, config.statistic, &plan)?;
    println!(
        "{} genes with BH FDR < {}",
        count_significant(&scores, config.fdr_cutoff),
        config.fdr_cutoff
    );
    Ok(scores)
}

fn do_select(config: &RunConfig, dataset: &LabeledDataset) -> Result<FeatureSubset> {
    let subset = run_selector(dataset, &config.selector)?;
    println!(
        "{} selected {} features (score {})",
        config.selector.selector.name(),
        subset.feature_ids.len(),
        subset.score
    );
    Ok(subset)
}

fn do_evaluate(config: &RunConfig, dataset: &LabeledDataset) -> Result<EvalReport> {
    let plan = stratified_folds(dataset.labels(), dataset.n_classes(), config.folds, config.fold_seed)?;
    let options = NestedCvOptions {
        continue_on_failure: config.continue_on_failure,
    };
    let report = nested_cv(dataset, &config.selector, &config.classifier, &plan, &options)?;
    println!(
        "nested {}-fold CV: accuracy {:.4}, kappa {:.4} over {} instances{}",
        config.folds,
        report.accuracy,
        report.kappa,
        report.n_instances,
        if report.complete { "" } else { " (INCOMPLETE)" }
    );
    Ok(report)
}

pub fn preprocess_cmd(config: &RunConfig) -> Result<()> {
    let pre = do_preprocess(config)?;
    write_table(pre.dataset.matrix(), &out(config, "preprocessed.tsv"))?;
    write_table(&pre.filter_report, &out(config, "filter_report.tsv"))?;
    write_table(pre.outliers.as_slice(), &out(config, "outliers.tsv"))
}

pub fn rank_cmd(config: &RunConfig) -> Result<()> {
    let dataset = load_dataset(config, config.input_stage)?;
    let scores = do_rank(config, &dataset)?;
    write_table(scores.as_slice(), &out(config, "scores.tsv"))?;
    let heat = heatmap_export(&dataset, &scores, config.heatmap_top.min(scores.len()))?;
    write_table(&heat, &out(config, "heatmap.tsv"))
}

pub fn select_cmd(config: &RunConfig) -> Result<()> {
    let dataset = load_dataset(config, config.input_stage)?;
    if config.selector.selector == SelectorKind::Rsvm {
        let params = SvmParams {
            c: config.selector.svm_c,
            ..SvmParams::default()
        };
        let ranking = svm_rfe_with(&dataset, config.selector.eliminate_per_iteration, &params)?;
        write_table(&ranking, &out(config, "ranking.tsv"))?;
    }
    let subset = do_select(config, &dataset)?;
    write_table(&subset, &out(config, "subset.tsv"))
}

pub fn evaluate_cmd(config: &RunConfig) -> Result<()> {
    let dataset = load_dataset(config, config.input_stage)?;
    let report = do_evaluate(config, &dataset)?;
    write_text(&out(config, "report.txt"), &report.to_text())?;
    write_text(&out(config, "report.json"), &report.to_json()?)
}

pub fn simulate_cmd(config: &RunConfig) -> Result<()> {
    let sim = generate(&config.synth_spec())?;
    write_table(sim.dataset.matrix(), &out(config, "expression.tsv"))?;
    write_table(&sim.calls, &out(config, "calls.tsv"))?;
    write_text(&out(config, "truth.json"), &sim.truth.to_json()?)?;
    println!(
        "simulated {} probesets x {} samples, {} planted markers, {} injected outliers",
        sim.dataset.matrix().n_probesets(),
        sim.dataset.matrix().n_samples(),
        sim.truth.markers.len(),
        sim.truth.outliers.len()
    );
    Ok(())
}

/// Preprocess, rank, select on all samples, then nested cross-validation.
pub fn pipeline_cmd(config: &RunConfig) -> Result<()> {
    let pre = do_preprocess(config)?;
    write_table(pre.dataset.matrix(), &out(config, "preprocessed.tsv"))?;
    write_table(pre.outliers.as_slice(), &out(config, "outliers.tsv"))?;
    let scores = do_rank(config, &pre.dataset)?;
    write_table(scores.as_slice(), &out(config, "scores.tsv"))?;
    let subset = do_select(config, &pre.dataset)?;
    write_table(&subset, &out(config, "subset.tsv"))?;
    let report = do_evaluate(config, &pre.dataset)?;
    write_text(&out(config, "report.txt"), &report.to_text())
}

pub fn write_echo(config: &RunConfig, subcommand: &str) -> Result<()> {
    write_text(&out(config, "run_config.txt"), &config.echo(subcommand))
}

