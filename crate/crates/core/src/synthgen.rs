//! Synthetic MAS5-like expression data with known ground truth.
//!
//! Each gene draws a log2-scale mean and spread, then every sample's value
//! is log-normal around them. Informative genes shift chosen classes by a
//! multiple of the gene's spread. Outliers are optional: a chosen cell is
//! replaced, on the log2 scale, by the mean of its other class members plus
//! or minus a multiple of their standard deviation.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::corpus::{Call, CallMatrix, ExpressionMatrix, LabeledDataset, Stage};
use crate::error::{Error, Result};
use crate::rng;
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InformativeGene {
    pub gene: usize,
    /// Mean shift per class, in units of the gene's log2 standard deviation.
    pub shifts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub genes: usize,
    pub class_sizes: Vec<usize>,
    pub informative: Vec<InformativeGene>,
    pub log_mean_range: (f64, f64),
    pub log_std_range: (f64, f64),
    pub present_rate: f64,
    pub outlier_rate: f64,
    pub outlier_magnitude: f64,
    /// Smallest raw value emitted.
    pub clamp: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            genes: 2000,
            class_sizes: vec![22, 33, 50],
            informative: Vec::new(),
            log_mean_range: (5.0, 10.0),
            log_std_range: (0.5, 1.5),
            present_rate: 0.95,
            outlier_rate: 0.0,
            outlier_magnitude: 6.0,
            clamp: 0.01,
            seed: 0,
        }
    }
}

impl SynthSpec {
    /// No informative genes.
    pub fn null(genes: usize, class_sizes: Vec<usize>, seed: u64) -> Self {
        Self {
            genes,
            class_sizes,
            seed,
            ..Self::default()
        }
    }

    /// `count` markers spread evenly over the genes; marker `i` raises
    /// class `i mod C` by `shift` standard deviations.
    pub fn planted(genes: usize, class_sizes: Vec<usize>, count: usize, shift: f64, seed: u64) -> Self {
        let c = class_sizes.len().max(1);
        let informative = (0..count)
            .map(|i| {
                let mut shifts = vec![0.0; c];
                shifts[i % c] = shift;
                InformativeGene {
                    gene: i * genes / count.max(1),
                    shifts,
                }
            })
            .collect();
        Self {
            informative,
            ..Self::null(genes, class_sizes, seed)
        }
    }

    pub fn class_names(&self) -> Vec<String> {
        if self.class_sizes.len() == 3 {
            return ["HC", "ND", "PD"].iter().map(|s| s.to_string()).collect();
        }
        (1..=self.class_sizes.len()).map(|i| format!("C{}", i)).collect()
    }

    pub fn probeset_id(&self, gene: usize) -> String {
        let width = digits(self.genes.saturating_sub(1)).max(4);
        format!("g{:0width$}", gene)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.genes == 0 {
            return bad("genes must be positive".into());
        }
        if self.class_sizes.len() < 2 || self.class_sizes.iter().any(|&n| n < 2) {
            return bad("at least 2 classes of at least 2 samples are required".into());
        }
        if self.outlier_rate > 0.0 && self.class_sizes.iter().any(|&n| n < 3) {
            return bad("outlier injection needs classes of at least 3 samples".into());
        }
        for rate in [self.present_rate, self.outlier_rate] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(format!("rate {} outside [0, 1]", rate));
            }
        }
        let (lo, hi) = self.log_mean_range;
        let (slo, shi) = self.log_std_range;
        if !(lo <= hi) || !(0.0 < slo && slo <= shi) || !lo.is_finite() || !hi.is_finite() || !shi.is_finite() {
            return bad("log-mean and log-std ranges must be finite with lo <= hi and std > 0".into());
        }
        if !(self.clamp > 0.0) || !(self.outlier_magnitude >= 0.0) {
            return bad("clamp must be positive and outlier magnitude nonnegative".into());
        }
        let mut seen = vec![false; self.genes];
        for inf in &self.informative {
            if inf.gene >= self.genes {
                return bad(format!("informative gene {} >= {}", inf.gene, self.genes));
            }
            if std::mem::replace(&mut seen[inf.gene], true) {
                return bad(format!("informative gene {} listed twice", inf.gene));
            }
            if inf.shifts.len() != self.class_sizes.len() || inf.shifts.iter().any(|s| !s.is_finite()) {
                return bad(format!("gene {} needs one finite shift per class", inf.gene));
            }
        }
        Ok(())
    }
}

fn digits(mut v: usize) -> usize {
    let mut d = 1;
    while v >= 10 {
        v /= 10;
        d += 1;
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedMarker {
    pub probeset_id: String,
    pub gene: usize,
    pub shifts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectedOutlier {
    pub probeset_id: String,
    pub sample_id: String,
    pub gene: usize,
    pub sample: usize,
    /// +1 above the class, -1 below.
    pub direction: i8,
    pub clean_value: f64,
    pub injected_value: f64,
}

/// What the generator planted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub spec: SynthSpec,
    pub class_set: Vec<String>,
    pub markers: Vec<PlantedMarker>,
    pub outliers: Vec<InjectedOutlier>,
}

impl TruthRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn marker_ids(&self) -> Vec<String> {
        self.markers.iter().map(|m| m.probeset_id.clone()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub dataset: LabeledDataset,
    pub calls: CallMatrix,
    pub truth: TruthRecord,
}

/// Generates a raw-scale dataset, its detection calls and the truth record.
/// Genes are drawn independently from their own random streams.
pub fn generate(spec: &SynthSpec) -> Result<Simulation> {
    spec.validate()?;
    let names = spec.class_names();
    let width = digits(*spec.class_sizes.iter().max().expect("validated")).max(2);
    let mut sample_ids = Vec::new();
    let mut labels = Vec::new();
    for (c, &size) in spec.class_sizes.iter().enumerate() {
        for i in 1..=size {
            sample_ids.push(format!("{}_{:0width$}", names[c], i));
            labels.push(c);
        }
    }
    let n = labels.len();
    let mut shifts: Vec<Option<&[f64]>> = vec![None; spec.genes];
    for inf in &spec.informative {
        shifts[inf.gene] = Some(&inf.shifts);
    }
    let members: Vec<Vec<usize>> = (0..spec.class_sizes.len())
        .map(|c| (0..n).filter(|&s| labels[s] == c).collect())
        .collect();

    let probeset_ids: Vec<String> = (0..spec.genes).map(|g| spec.probeset_id(g)).collect();
    let mut values = Vec::with_capacity(spec.genes * n);
    let mut calls = Vec::with_capacity(spec.genes * n);
    let mut outliers = Vec::new();
    let to_raw = |log: f64| 2f64.powf(log).max(spec.clamp);

    for g in 0..spec.genes {
        let mut rng = rng::stream(spec.seed, g as u64);
        let mu = rng.random_range(spec.log_mean_range.0..=spec.log_mean_range.1);
        let sigma = rng.random_range(spec.log_std_range.0..=spec.log_std_range.1);
        let clean: Vec<f64> = labels
            .iter()
            .map(|&c| {
                let z: f64 = rng.sample(StandardNormal);
                let shift = shifts[g].map_or(0.0, |s| s[c]);
                mu + sigma * (z + shift)
            })
            .collect();
        let mut row: Vec<f64> = clean.iter().map(|&v| to_raw(v)).collect();

        for _ in 0..n {
            calls.push(if rng.random::<f64>() < spec.present_rate {
                Call::Present
            } else {
                Call::Absent
            });
        }
        if spec.outlier_rate > 0.0 {
            for s in 0..n {
                if rng.random::<f64>() >= spec.outlier_rate {
                    continue;
                }
                let up = rng.random::<bool>();
                let others: Vec<f64> = members[labels[s]].iter().filter(|&&o| o != s).map(|&o| clean[o]).collect();
                let spread = spec.outlier_magnitude * stats::sample_std(&others);
                let centre = stats::mean(&others);
                let log = if up { centre + spread } else { centre - spread };
                row[s] = to_raw(log);
                outliers.push(InjectedOutlier {
                    probeset_id: probeset_ids[g].clone(),
                    sample_id: sample_ids[s].clone(),
                    gene: g,
                    sample: s,
                    direction: if up { 1 } else { -1 },
                    clean_value: to_raw(clean[s]),
                    injected_value: row[s],
                });
            }
        }
        values.extend(row);
    }

    let matrix = ExpressionMatrix::new(probeset_ids.clone(), sample_ids.clone(), values, Stage::Raw)?;
    let call_matrix = CallMatrix::new(probeset_ids.clone(), sample_ids, calls)?;
    let dataset = LabeledDataset::from_parts(matrix, labels, names.clone());
    let markers = spec
        .informative
        .iter()
        .map(|inf| PlantedMarker {
            probeset_id: probeset_ids[inf.gene].clone(),
            gene: inf.gene,
            shifts: inf.shifts.clone(),
        })
        .collect();
    Ok(Simulation {
        dataset,
        calls: call_matrix,
        truth: TruthRecord {
            spec: spec.clone(),
            class_set: names,
            markers,
            outliers,
        },
    })
}
