//! Decision table over equal-frequency discretized features.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTableParams {
    pub bins: usize,
}

impl Default for DecisionTableParams {
    fn default() -> Self {
        Self { bins: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionCell {
    pub key: Vec<u32>,
    pub distribution: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTableModel {
    /// Ascending cut points per feature; a value's bin is the number of cuts ≤ it.
    pub cuts: Vec<Vec<f64>>,
    /// Occupied cells sorted by key.
    pub cells: Vec<DecisionCell>,
    /// Class distribution of the whole training set, used for unseen cells.
    pub fallback: Vec<f64>,
}

/// Cut points at the midpoints between consecutive distinct values closest
/// to each `i/bins` quantile.
fn equal_frequency_cuts(values: &mut [f64], bins: usize) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let mut cuts: Vec<f64> = Vec::new();
    for b in 1..bins {
        let pos = b * n / bins;
        if pos == 0 || pos >= n || values[pos - 1] == values[pos] {
            continue;
        }
        let cut = 0.5 * (values[pos - 1] + values[pos]);
        if cuts.last().is_none_or(|last| cut > *last) {
            cuts.push(cut);
        }
    }
    cuts
}

fn normalize(counts: &[f64]) -> Vec<f64> {
    let total: f64 = counts.iter().sum();
    counts.iter().map(|c| c / total).collect()
}

pub(crate) fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: &DecisionTableParams) -> DecisionTableModel {
    let d = x[0].len();
    let cuts: Vec<Vec<f64>> = (0..d)
        .map(|f| {
            let mut col: Vec<f64> = x.iter().map(|r| r[f]).collect();
            equal_frequency_cuts(&mut col, params.bins.max(1))
        })
        .collect();
    let mut table: BTreeMap<Vec<u32>, Vec<f64>> = BTreeMap::new();
    let mut global = vec![0.0; n_classes];
    for (row, &label) in x.iter().zip(y) {
        let key = cell_key(&cuts, row);
        table.entry(key).or_insert_with(|| vec![0.0; n_classes])[label] += 1.0;
        global[label] += 1.0;
    }
    DecisionTableModel {
        cuts,
        cells: table
            .into_iter()
            .map(|(key, counts)| DecisionCell {
                key,
                distribution: normalize(&counts),
            })
            .collect(),
        fallback: normalize(&global),
    }
}

fn cell_key(cuts: &[Vec<f64>], row: &[f64]) -> Vec<u32> {
    cuts.iter()
        .zip(row)
        .map(|(c, v)| c.partition_point(|cut| cut <= v) as u32)
        .collect()
}

impl DecisionTableModel {
    pub(crate) fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let key = cell_key(&self.cuts, x);
        match self.cells.binary_search_by(|c| c.key.cmp(&key)) {
            Ok(i) => self.cells[i].distribution.clone(),
            Err(_) => self.fallback.clone(),
        }
    }
}
