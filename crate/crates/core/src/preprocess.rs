//! Reliability filtering, transforms and within-class outlier handling.
//!
//! The canonical chain applied by [`run`] is:
//!
//! 1. present-call filter (raw)
//! 2. noise-floor filter (raw)
//! 3. log transform
//! 4. within-class outlier detection and class-mean imputation (log scale)
//! 5. per-probeset z-score
//!
//! Each step is also exposed on its own.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Call, CallMatrix, ExpressionMatrix, LabeledDataset, Stage, TsvWrite};
use crate::error::{Error, Result};
use crate::stats;

/// Why a probeset was dropped by a filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalReason {
    PresentCalls,
    NoiseFloor,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input_count: usize,
    pub removed_by_calls: usize,
    pub removed_by_noise: usize,
    pub output_count: usize,
    pub removed_ids: Vec<(String, RemovalReason)>,
}

impl FilterReport {
    /// Combines a call-filter report with the noise-filter report of the
    /// call filter's output.
    pub fn chain(calls: &FilterReport, noise: &FilterReport) -> FilterReport {
        let mut removed_ids = calls.removed_ids.clone();
        removed_ids.extend(noise.removed_ids.iter().cloned());
        FilterReport {
            input_count: calls.input_count,
            removed_by_calls: calls.removed_by_calls,
            removed_by_noise: noise.removed_by_noise,
            output_count: noise.output_count,
            removed_ids,
        }
    }
}

impl TsvWrite for FilterReport {
    fn write_tsv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "metric\tvalue")?;
        writeln!(out, "input_count\t{}", self.input_count)?;
        writeln!(out, "removed_by_calls\t{}", self.removed_by_calls)?;
        writeln!(out, "removed_by_noise\t{}", self.removed_by_noise)?;
        writeln!(out, "output_count\t{}", self.output_count)?;
        writeln!(out)?;
        writeln!(out, "removed_probeset\treason")?;
        for (id, reason) in &self.removed_ids {
            let reason = match reason {
                RemovalReason::PresentCalls => "present_calls",
                RemovalReason::NoiseFloor => "noise_floor",
            };
            writeln!(out, "{}\t{}", id, reason)?;
        }
        Ok(())
    }
}

/// One anomalous cell found by [`detect_outliers`].
///
/// `class_mean` and `class_std` describe the other samples of the same class
/// for this probeset; `z` is infinite when those others are all equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierRecord {
    pub probeset_id: String,
    pub sample_id: String,
    pub class_label: String,
    pub observed_value: f64,
    pub class_mean: f64,
    pub class_std: f64,
    pub z: f64,
}

impl TsvWrite for [OutlierRecord] {
    fn write_tsv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "probeset\tsample\tclass\tobserved\tclass_mean\tclass_std\tz")?;
        for r in self {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.probeset_id, r.sample_id, r.class_label, r.observed_value, r.class_mean, r.class_std, r.z
            )?;
        }
        Ok(())
    }
}

/// Calls derived from expression level alone, for data shipped without
/// MAS5 detection calls: Present iff value ≥ floor.
pub fn surrogate_calls(matrix: &ExpressionMatrix, floor: f64) -> CallMatrix {
    let calls = matrix
        .values()
        .iter()
        .map(|&v| if v >= floor { Call::Present } else { Call::Absent })
        .collect();
    CallMatrix::new(
        matrix.probeset_ids().to_vec(),
        matrix.sample_ids().to_vec(),
        calls,
    )
    .expect("identifiers come from a valid matrix")
}

/// Keeps probesets whose fraction of Present calls is at least `fraction`.
/// Marginal calls do not count as Present.
pub fn filter_by_present_calls(
    matrix: &ExpressionMatrix,
    calls: &CallMatrix,
    fraction: f64,
) -> Result<(ExpressionMatrix, FilterReport)> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "present fraction must lie in (0, 1], got {}",
            fraction
        )));
    }
    calls.check_aligned(matrix)?;
    let n = matrix.n_samples() as f64;
    let mut keep = Vec::new();
    let mut removed = Vec::new();
    for p in 0..matrix.n_probesets() {
        let present = calls.row(p).iter().filter(|c| **c == Call::Present).count();
        if present as f64 / n >= fraction {
            keep.push(p);
        } else {
            removed.push((matrix.probeset_ids()[p].clone(), RemovalReason::PresentCalls));
        }
    }
    let report = FilterReport {
        input_count: matrix.n_probesets(),
        removed_by_calls: removed.len(),
        removed_by_noise: 0,
        output_count: keep.len(),
        removed_ids: removed,
    };
    Ok((matrix.select_rows(&keep), report))
}

/// Removes probesets whose maximum value lies below `floor`, i.e. that sit
/// in the noise for every sample.
pub fn filter_noise_floor(matrix: &ExpressionMatrix, floor: f64) -> Result<(ExpressionMatrix, FilterReport)> {
    if matrix.stage() != Stage::Raw {
        return Err(Error::InvalidParameter(
            "noise-floor filtering applies to raw-scale data".into(),
        ));
    }
    let mut keep = Vec::new();
    let mut removed = Vec::new();
    for (p, row) in matrix.rows().enumerate() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max < floor {
            removed.push((matrix.probeset_ids()[p].clone(), RemovalReason::NoiseFloor));
        } else {
            keep.push(p);
        }
    }
    let report = FilterReport {
        input_count: matrix.n_probesets(),
        removed_by_calls: 0,
        removed_by_noise: removed.len(),
        output_count: keep.len(),
        removed_ids: removed,
    };
    Ok((matrix.select_rows(&keep), report))
}

/// `v ↦ log_base(max(v, epsilon))`.
pub fn log_transform(matrix: &ExpressionMatrix, base: f64, epsilon: f64) -> Result<ExpressionMatrix> {
    if matrix.stage() != Stage::Raw {
        return Err(Error::InvalidParameter("log transform expects raw-scale data".into()));
    }
    if !(base > 0.0 && base != 1.0 && base.is_finite()) {
        return Err(Error::InvalidParameter(format!("invalid log base {}", base)));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("log clamp must be positive, got {}", epsilon)));
    }
    let values = if base == 2.0 {
        matrix.values().iter().map(|v| v.max(epsilon).log2()).collect()
    } else {
        matrix.values().iter().map(|v| v.max(epsilon).log(base)).collect()
    };
    Ok(matrix.with_values(values, Stage::Log))
}

#[derive(Debug, Clone)]
pub struct Zscored {
    pub matrix: ExpressionMatrix,
    /// Rows with zero variance; they are emitted as all zeros.
    pub degenerate_rows: Vec<usize>,
}

/// Standardizes each probeset by its own mean and sample standard deviation.
pub fn zscore(matrix: &ExpressionMatrix) -> Result<Zscored> {
    if matrix.n_samples() < 2 {
        return Err(Error::InsufficientData("z-scoring needs at least 2 samples".into()));
    }
    let rows: Vec<(Vec<f64>, bool)> = matrix
        .rows()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|row| {
            let m = stats::mean(row);
            let sd = stats::sample_std(row);
            if sd <= 1e-12 * m.abs().max(1.0) {
                (vec![0.0; row.len()], true)
            } else {
                (row.iter().map(|v| (v - m) / sd).collect(), false)
            }
        })
        .collect();
    let degenerate_rows = rows
        .iter()
        .enumerate()
        .filter(|(_, (_, d))| *d)
        .map(|(i, _)| i)
        .collect();
    let values = rows.into_iter().flat_map(|(r, _)| r).collect();
    Ok(Zscored {
        matrix: matrix.with_values(values, Stage::Zscore),
        degenerate_rows,
    })
}

/// Flags cells that are inconsistent with the rest of their class.
///
/// For each probeset, class and sample, the sample's value is compared with
/// the mean and sample standard deviation of the *other* members of its
/// class; a record is emitted when `|z| > threshold`. Leaving the tested
/// value out matters: a single point's z against statistics that include it
/// is bounded by (n−1)/√n, which is below 5 for classes of 26 or fewer.
/// When the other members are all equal the class is skipped for values
/// equal to them and flagged with an infinite z otherwise.
pub fn detect_outliers(dataset: &LabeledDataset, threshold: f64) -> Result<Vec<OutlierRecord>> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter(format!("z threshold must be positive, got {}", threshold)));
    }
    let counts = dataset.class_counts();
    if let Some(c) = counts.iter().position(|&n| n < 3) {
        return Err(Error::InsufficientData(format!(
            "class `{}` has {} samples; outlier detection needs at least 3",
            dataset.class_set()[c],
            counts[c]
        )));
    }
    let members: Vec<Vec<usize>> = (0..dataset.n_classes())
        .map(|c| (0..dataset.labels().len()).filter(|&s| dataset.labels()[s] == c).collect())
        .collect();
    let matrix = dataset.matrix();
    let per_row: Vec<Vec<OutlierRecord>> = (0..matrix.n_probesets())
        .into_par_iter()
        .map(|p| {
            let row = matrix.row(p);
            let mut found = Vec::new();
            let mut others = Vec::new();
            for (c, idx) in members.iter().enumerate() {
                for &s in idx {
                    others.clear();
                    others.extend(idx.iter().filter(|&&o| o != s).map(|&o| row[o]));
                    let m = stats::mean(&others);
                    let sd = stats::sample_std(&others);
                    let x = row[s];
                    let scale = m.abs().max(1.0);
                    let z = if sd <= 1e-12 * scale {
                        if (x - m).abs() <= 1e-9 * scale {
                            continue;
                        }
                        f64::INFINITY.copysign(x - m)
                    } else {
                        (x - m) / sd
                    };
                    if z.abs() > threshold {
                        found.push(OutlierRecord {
                            probeset_id: matrix.probeset_ids()[p].clone(),
                            sample_id: matrix.sample_ids()[s].clone(),
                            class_label: dataset.class_set()[c].clone(),
                            observed_value: x,
                            class_mean: m,
                            class_std: sd,
                            z,
                        });
                    }
                }
            }
            found
        })
        .collect();
    Ok(per_row.into_iter().flatten().collect())
}

/// Replaces every flagged cell with the mean of the unflagged values of the
/// same probeset within the same class.
pub fn impute_outliers(dataset: &LabeledDataset, records: &[OutlierRecord]) -> Result<ExpressionMatrix> {
    let matrix = dataset.matrix();
    let n = matrix.n_samples();
    let mut flagged = vec![false; matrix.values().len()];
    for r in records {
        let p = matrix
            .probeset_index(&r.probeset_id)
            .ok_or_else(|| Error::UnknownLabel(r.probeset_id.clone()))?;
        let s = matrix
            .sample_index(&r.sample_id)
            .ok_or_else(|| Error::UnknownLabel(r.sample_id.clone()))?;
        flagged[p * n + s] = true;
    }
    let mut values = matrix.values().to_vec();
    let mut touched: Vec<usize> = (0..flagged.len()).filter(|&i| flagged[i]).collect();
    touched.sort_unstable();
    for cell in touched {
        let (p, s) = (cell / n, cell % n);
        let class = dataset.labels()[s];
        let mut sum = 0.0;
        let mut count = 0usize;
        for o in 0..n {
            if dataset.labels()[o] == class && !flagged[p * n + o] {
                sum += matrix.get(p, o);
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::Degenerate(format!(
                "every `{}` value of probeset `{}` is flagged; nothing to average",
                dataset.class_set()[class],
                matrix.probeset_ids()[p]
            )));
        }
        values[cell] = sum / count as f64;
    }
    Ok(matrix.with_values(values, matrix.stage()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub present_fraction: f64,
    pub noise_floor: f64,
    pub z_threshold: f64,
    pub log_base: f64,
    /// Clamp applied before the log so near-zero values map to a finite level.
    pub log_epsilon: f64,
    /// Floor for surrogate calls when no call matrix is supplied.
    pub surrogate_floor: f64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            present_fraction: 0.25,
            noise_floor: 100.0,
            z_threshold: 5.0,
            log_base: 2.0,
            log_epsilon: 1.0,
            surrogate_floor: 100.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Preprocessed {
    /// Filtered, imputed, log-transformed and z-scored dataset.
    pub dataset: LabeledDataset,
    pub filter_report: FilterReport,
    /// Outliers, with values on the log scale.
    pub outliers: Vec<OutlierRecord>,
    pub degenerate_rows: Vec<String>,
    pub used_surrogate_calls: bool,
}

/// Runs the full preprocessing chain on a raw dataset.
pub fn run(dataset: &LabeledDataset, calls: Option<&CallMatrix>, config: &PreprocessConfig) -> Result<Preprocessed> {
    let raw = dataset.matrix();
    if raw.stage() != Stage::Raw {
        return Err(Error::InvalidParameter("preprocessing expects raw-scale input".into()));
    }
    let used_surrogate_calls = calls.is_none();
    let surrogate;
    let calls = match calls {
        Some(c) => c,
        None => {
            surrogate = surrogate_calls(raw, config.surrogate_floor);
            &surrogate
        }
    };
    let (after_calls, call_report) = filter_by_present_calls(raw, calls, config.present_fraction)?;
    let (after_noise, noise_report) = filter_noise_floor(&after_calls, config.noise_floor)?;
    let filter_report = FilterReport::chain(&call_report, &noise_report);

    let logged = log_transform(&after_noise, config.log_base, config.log_epsilon)?;
    let logged = dataset.with_matrix(logged)?;
    let outliers = detect_outliers(&logged, config.z_threshold)?;
    let imputed = impute_outliers(&logged, &outliers)?;
    let z = zscore(&imputed)?;
    let degenerate_rows = z
        .degenerate_rows
        .iter()
        .map(|&r| z.matrix.probeset_ids()[r].clone())
        .collect();
    Ok(Preprocessed {
        dataset: dataset.with_matrix(z.matrix)?,
        filter_report,
        outliers,
        degenerate_rows,
        used_surrogate_calls,
    })
}
