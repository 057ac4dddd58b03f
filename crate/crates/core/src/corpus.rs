//! Expression matrices, detection calls, class labels and their
//! tab-separated file formats.
//!
//! Matrix files carry a header row whose first cell names the identifier
//! column and whose remaining cells are sample IDs; each following row starts
//! with a probeset ID. Column order defines sample order everywhere and is
//! never changed implicitly.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class prefixes of the Parkinson's cohort naming scheme
/// (healthy control, neurodegenerative control, Parkinson's disease).
pub const DEFAULT_CLASS_PREFIXES: [&str; 3] = ["HC", "ND", "PD"];

/// Transforms already applied to a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Raw,
    Log,
    Zscore,
}

/// Probesets × samples matrix of expression values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionMatrix {
    probeset_ids: Vec<String>,
    sample_ids: Vec<String>,
    // row-major, one row per probeset
    values: Vec<f64>,
    stage: Stage,
}

impl ExpressionMatrix {
    pub fn new(
        probeset_ids: Vec<String>,
        sample_ids: Vec<String>,
        values: Vec<f64>,
        stage: Stage,
    ) -> Result<Self> {
        let expected = probeset_ids.len() * sample_ids.len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected: format!(
                    "{} values ({} x {})",
                    expected,
                    probeset_ids.len(),
                    sample_ids.len()
                ),
                found: format!("{} values", values.len()),
            });
        }
        check_unique("probeset", &probeset_ids, 2)?;
        check_unique("sample", &sample_ids, 1)?;
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite value at probeset `{}`, sample `{}`",
                probeset_ids[pos / sample_ids.len()],
                sample_ids[pos % sample_ids.len()]
            )));
        }
        if stage == Stage::Raw {
            if let Some(pos) = values.iter().position(|v| *v < 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "negative raw value {} at probeset `{}`, sample `{}`",
                    values[pos],
                    probeset_ids[pos / sample_ids.len()],
                    sample_ids[pos % sample_ids.len()]
                )));
            }
        }
        Ok(Self {
            probeset_ids,
            sample_ids,
            values,
            stage,
        })
    }

    /// Builds a matrix from per-probeset rows.
    pub fn from_rows(
        probeset_ids: Vec<String>,
        sample_ids: Vec<String>,
        rows: Vec<Vec<f64>>,
        stage: Stage,
    ) -> Result<Self> {
        if let Some(bad) = rows.iter().position(|r| r.len() != sample_ids.len()) {
            return Err(Error::DimensionMismatch {
                expected: format!("{} values per row", sample_ids.len()),
                found: format!("{} values in row {}", rows[bad].len(), bad),
            });
        }
        Self::new(probeset_ids, sample_ids, rows.concat(), stage)
    }

    pub fn n_probesets(&self) -> usize {
        self.probeset_ids.len()
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn probeset_ids(&self) -> &[String] {
        &self.probeset_ids
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, probeset: usize) -> &[f64] {
        let n = self.n_samples();
        &self.values[probeset * n..(probeset + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on a zero chunk size
        let n = self.n_samples().max(1);
        self.values.chunks_exact(n).take(self.n_probesets())
    }

    pub fn get(&self, probeset: usize, sample: usize) -> f64 {
        self.values[probeset * self.n_samples() + sample]
    }

    pub fn probeset_index(&self, id: &str) -> Option<usize> {
        self.probeset_ids.iter().position(|p| p == id)
    }

    pub fn sample_index(&self, id: &str) -> Option<usize> {
        self.sample_ids.iter().position(|s| s == id)
    }

    /// Keeps the given probeset rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut values = Vec::with_capacity(rows.len() * self.n_samples());
        for &r in rows {
            values.extend_from_slice(self.row(r));
        }
        Self {
            probeset_ids: rows.iter().map(|&r| self.probeset_ids[r].clone()).collect(),
            sample_ids: self.sample_ids.clone(),
            values,
            stage: self.stage,
        }
    }

    /// Keeps the given sample columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Self {
        let mut values = Vec::with_capacity(columns.len() * self.n_probesets());
        for row in self.rows() {
            values.extend(columns.iter().map(|&c| row[c]));
        }
        Self {
            probeset_ids: self.probeset_ids.clone(),
            sample_ids: columns.iter().map(|&c| self.sample_ids[c].clone()).collect(),
            values,
            stage: self.stage,
        }
    }

    /// Same identifiers, new values and stage. Values must be finite and
    /// sized like the current matrix.
    pub(crate) fn with_values(&self, values: Vec<f64>, stage: Stage) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            probeset_ids: self.probeset_ids.clone(),
            sample_ids: self.sample_ids.clone(),
            values,
            stage,
        }
    }

    /// Samples × features view of the selected probesets and samples.
    pub fn sample_major(&self, probesets: &[usize], samples: &[usize]) -> Vec<Vec<f64>> {
        samples
            .iter()
            .map(|&s| probesets.iter().map(|&p| self.get(p, s)).collect())
            .collect()
    }
}

fn check_unique(kind: &'static str, ids: &[String], first_line: usize) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId {
                kind,
                id: id.clone(),
                line: if kind == "probeset" { first_line + i } else { 1 },
            });
        }
    }
    Ok(())
}

/// MAS5 detection call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Call {
    Present,
    Marginal,
    Absent,
}

impl Call {
    pub fn from_symbol(symbol: &str) -> Option<Self> {
        match symbol {
            "P" => Some(Call::Present),
            "M" => Some(Call::Marginal),
            "A" => Some(Call::Absent),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Call::Present => "P",
            Call::Marginal => "M",
            Call::Absent => "A",
        }
    }
}

/// Detection calls aligned with an expression matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CallMatrix {
    probeset_ids: Vec<String>,
    sample_ids: Vec<String>,
    calls: Vec<Call>,
}

impl CallMatrix {
    pub fn new(probeset_ids: Vec<String>, sample_ids: Vec<String>, calls: Vec<Call>) -> Result<Self> {
        if calls.len() != probeset_ids.len() * sample_ids.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} x {} calls", probeset_ids.len(), sample_ids.len()),
                found: format!("{} calls", calls.len()),
            });
        }
        check_unique("probeset", &probeset_ids, 2)?;
        check_unique("sample", &sample_ids, 1)?;
        Ok(Self {
            probeset_ids,
            sample_ids,
            calls,
        })
    }

    pub fn probeset_ids(&self) -> &[String] {
        &self.probeset_ids
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn n_probesets(&self) -> usize {
        self.probeset_ids.len()
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn row(&self, probeset: usize) -> &[Call] {
        let n = self.n_samples();
        &self.calls[probeset * n..(probeset + 1) * n]
    }

    pub fn get(&self, probeset: usize, sample: usize) -> Call {
        self.calls[probeset * self.n_samples() + sample]
    }

    /// Errors unless this call matrix has the companion's shape and identifiers.
    pub fn check_aligned(&self, matrix: &ExpressionMatrix) -> Result<()> {
        if self.n_probesets() != matrix.n_probesets() || self.n_samples() != matrix.n_samples() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} x {}", matrix.n_probesets(), matrix.n_samples()),
                found: format!("{} x {}", self.n_probesets(), self.n_samples()),
            });
        }
        if self.probeset_ids != matrix.probeset_ids() || self.sample_ids != matrix.sample_ids() {
            return Err(Error::DimensionMismatch {
                expected: "identifiers matching the expression matrix".into(),
                found: "different probeset or sample identifiers".into(),
            });
        }
        Ok(())
    }
}

/// Expression matrix with one class label per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    matrix: ExpressionMatrix,
    // index into class_set, one per sample
    labels: Vec<usize>,
    class_set: Vec<String>,
}

impl LabeledDataset {
    /// Class set is taken in first-appearance order.
    pub fn new(matrix: ExpressionMatrix, labels: &[String]) -> Result<Self> {
        let mut class_set: Vec<String> = Vec::new();
        for l in labels {
            if !class_set.contains(l) {
                class_set.push(l.clone());
            }
        }
        Self::with_class_set(matrix, labels, class_set)
    }

    pub fn with_class_set(
        matrix: ExpressionMatrix,
        labels: &[String],
        class_set: Vec<String>,
    ) -> Result<Self> {
        if labels.len() != matrix.n_samples() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} labels", matrix.n_samples()),
                found: format!("{} labels", labels.len()),
            });
        }
        let labels = labels
            .iter()
            .map(|l| {
                class_set
                    .iter()
                    .position(|c| c == l)
                    .ok_or_else(|| Error::UnknownLabel(l.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            matrix,
            labels,
            class_set,
        })
    }

    pub(crate) fn from_parts(matrix: ExpressionMatrix, labels: Vec<usize>, class_set: Vec<String>) -> Self {
        debug_assert_eq!(labels.len(), matrix.n_samples());
        Self {
            matrix,
            labels,
            class_set,
        }
    }

    /// Labels inferred from the default HC/ND/PD sample-name prefixes.
    pub fn from_sample_prefixes(matrix: ExpressionMatrix) -> Result<Self> {
        let (labels, class_set) = infer_labels(matrix.sample_ids())?;
        Self::with_class_set(matrix, &labels, class_set)
    }

    pub fn matrix(&self) -> &ExpressionMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ExpressionMatrix {
        self.matrix
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, sample: usize) -> &str {
        &self.class_set[self.labels[sample]]
    }

    pub fn class_set(&self) -> &[String] {
        &self.class_set
    }

    pub fn n_classes(&self) -> usize {
        self.class_set.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Replaces the matrix, keeping labels. Sample IDs must match.
    pub fn with_matrix(&self, matrix: ExpressionMatrix) -> Result<Self> {
        if matrix.sample_ids() != self.matrix.sample_ids() {
            return Err(Error::DimensionMismatch {
                expected: "the dataset's sample identifiers".into(),
                found: "different sample identifiers".into(),
            });
        }
        Ok(Self {
            matrix,
            labels: self.labels.clone(),
            class_set: self.class_set.clone(),
        })
    }

    /// Subset of samples, keeping the full class set.
    pub fn select_samples(&self, samples: &[usize]) -> Self {
        Self {
            matrix: self.matrix.select_columns(samples),
            labels: samples.iter().map(|&s| self.labels[s]).collect(),
            class_set: self.class_set.clone(),
        }
    }

    pub fn select_probesets(&self, rows: &[usize]) -> Self {
        Self {
            matrix: self.matrix.select_rows(rows),
            labels: self.labels.clone(),
            class_set: self.class_set.clone(),
        }
    }

    pub(crate) fn require_classes(&self, min: usize) -> Result<()> {
        if self.n_classes() < min {
            return Err(Error::InsufficientData(format!(
                "at least {} classes required, found {}",
                min,
                self.n_classes()
            )));
        }
        Ok(())
    }
}

/// Infers class labels from sample IDs of the form `<PREFIX>_...` using the
/// HC/ND/PD convention. Returns per-sample labels and the class set in
/// first-appearance order.
pub fn infer_labels(sample_ids: &[String]) -> Result<(Vec<String>, Vec<String>)> {
    infer_labels_with(sample_ids, &DEFAULT_CLASS_PREFIXES)
}

pub fn infer_labels_with<S: AsRef<str>>(
    sample_ids: &[String],
    prefixes: &[S],
) -> Result<(Vec<String>, Vec<String>)> {
    let mut labels = Vec::with_capacity(sample_ids.len());
    let mut class_set: Vec<String> = Vec::new();
    let mut offending = Vec::new();
    for id in sample_ids {
        let found = prefixes.iter().map(AsRef::as_ref).find(|p| {
            id.strip_prefix(p)
                .is_some_and(|rest| rest.starts_with('_'))
        });
        match found {
            Some(p) => {
                if !class_set.iter().any(|c| c == p) {
                    class_set.push(p.to_string());
                }
                labels.push(p.to_string());
            }
            None => offending.push(id.clone()),
        }
    }
    if !offending.is_empty() {
        return Err(Error::UnprefixedSamples(offending));
    }
    Ok((labels, class_set))
}

struct TableLines<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
}

fn split_table(text: &str) -> TableLines<'_> {
    let lines = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| (n, l.split('\t').collect()))
        .collect();
    TableLines { lines }
}

/// Header sample IDs and data lines of a tab-separated matrix file.
fn table_body<'a>(
    table: &'a TableLines<'a>,
) -> Result<(Vec<String>, &'a [(usize, Vec<&'a str>)])> {
    let (header_line, header) = table.lines.first().ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty table".into(),
    })?;
    if header.len() < 2 {
        return Err(Error::Parse {
            line: *header_line,
            column: 1,
            message: "header needs an identifier column and at least one sample".into(),
        });
    }
    let samples: Vec<String> = header[1..].iter().map(|s| s.trim().to_string()).collect();
    if let Some(pos) = samples.iter().position(|s| s.is_empty()) {
        return Err(Error::Parse {
            line: *header_line,
            column: pos + 2,
            message: "empty sample id".into(),
        });
    }
    check_unique("sample", &samples, *header_line)?;
    Ok((samples, &table.lines[1..]))
}

fn check_ids(rows: &[(usize, Vec<&str>)], width: usize) -> Result<Vec<String>> {
    let mut seen = HashSet::new();
    let mut ids = Vec::with_capacity(rows.len());
    for (line, cells) in rows {
        if cells.len() != width + 1 {
            return Err(Error::Parse {
                line: *line,
                column: cells.len().min(width + 1) + 1,
                message: format!("ragged row: expected {} cells, found {}", width + 1, cells.len()),
            });
        }
        let id = cells[0].trim();
        if id.is_empty() {
            return Err(Error::Parse {
                line: *line,
                column: 1,
                message: "empty probeset id".into(),
            });
        }
        if !seen.insert(id) {
            return Err(Error::DuplicateId {
                kind: "probeset",
                id: id.to_string(),
                line: *line,
            });
        }
        ids.push(id.to_string());
    }
    Ok(ids)
}

/// Parses a tab-separated raw expression table.
pub fn parse_expression_table(text: &str) -> Result<ExpressionMatrix> {
    parse_matrix_with_stage(text, Stage::Raw)
}

/// Parses a tab-separated matrix that has already been transformed
/// (negative values allowed unless `stage` is raw).
pub fn parse_matrix_with_stage(text: &str, stage: Stage) -> Result<ExpressionMatrix> {
    let table = split_table(text);
    let (samples, rows) = table_body(&table)?;
    let ids = check_ids(rows, samples.len())?;
    let mut values = Vec::with_capacity(ids.len() * samples.len());
    for (line, cells) in rows {
        for (c, cell) in cells[1..].iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line: *line,
                column: c + 2,
                message: format!("non-numeric cell `{}`", cell),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: *line,
                    column: c + 2,
                    message: format!("non-finite cell `{}`", cell),
                });
            }
            if stage == Stage::Raw && v < 0.0 {
                return Err(Error::Parse {
                    line: *line,
                    column: c + 2,
                    message: format!("negative expression value {}", v),
                });
            }
            values.push(v);
        }
    }
    ExpressionMatrix::new(ids, samples, values, stage)
}

/// Parses a P/M/A call table, optionally checking it against the
/// expression matrix it accompanies.
pub fn parse_call_table(text: &str, companion: Option<&ExpressionMatrix>) -> Result<CallMatrix> {
    let table = split_table(text);
    let (samples, rows) = table_body(&table)?;
    if let Some(m) = companion {
        if rows.len() != m.n_probesets() || samples.len() != m.n_samples() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} x {} (companion matrix)", m.n_probesets(), m.n_samples()),
                found: format!("{} x {}", rows.len(), samples.len()),
            });
        }
    }
    let ids = check_ids(rows, samples.len())?;
    let mut calls = Vec::with_capacity(ids.len() * samples.len());
    for (line, cells) in rows {
        for (c, cell) in cells[1..].iter().enumerate() {
            let call = Call::from_symbol(cell.trim()).ok_or_else(|| Error::Parse {
                line: *line,
                column: c + 2,
                message: format!("unknown call symbol `{}`", cell.trim()),
            })?;
            calls.push(call);
        }
    }
    let calls = CallMatrix::new(ids, samples, calls)?;
    if let Some(m) = companion {
        calls.check_aligned(m)?;
    }
    Ok(calls)
}

/// Anything with a tab-separated file representation.
pub trait TsvWrite {
    fn write_tsv(&self, out: &mut dyn Write) -> Result<()>;

    fn to_tsv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("tables are UTF-8")
    }
}

/// Writes `item` as a tab-separated file at `path`.
pub fn write_table<T: TsvWrite + ?Sized>(item: &T, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    item.write_tsv(&mut out)?;
    out.flush()?;
    Ok(())
}

impl TsvWrite for ExpressionMatrix {
    /// Values use Rust's shortest round-trip float formatting, so a
    /// write/parse cycle reproduces every value exactly.
    fn write_tsv(&self, out: &mut dyn Write) -> Result<()> {
        write!(out, "ID")?;
        for s in &self.sample_ids {
            write!(out, "\t{}", s)?;
        }
        writeln!(out)?;
        for (id, row) in self.probeset_ids.iter().zip(self.rows()) {
            write!(out, "{}", id)?;
            for v in row {
                write!(out, "\t{}", v)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

impl TsvWrite for CallMatrix {
    fn write_tsv(&self, out: &mut dyn Write) -> Result<()> {
        write!(out, "ID")?;
        for s in &self.sample_ids {
            write!(out, "\t{}", s)?;
        }
        writeln!(out)?;
        for (p, id) in self.probeset_ids.iter().enumerate() {
            write!(out, "{}", id)?;
            for c in self.row(p) {
                write!(out, "\t{}", c.symbol())?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
