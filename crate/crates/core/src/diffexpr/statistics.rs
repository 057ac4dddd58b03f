//! Two-group and multi-group test statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// Statistic used to score a probeset's class separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    /// Welch t; with more than two classes the largest-magnitude pairwise value.
    WelchT,
    /// Signal-to-noise ratio; multiclass handled as for t.
    Snr,
    /// One-way ANOVA F.
    AnovaF,
}

impl StatisticKind {
    pub fn name(self) -> &'static str {
        match self {
            StatisticKind::WelchT => "t",
            StatisticKind::Snr => "snr",
            StatisticKind::AnovaF => "f",
        }
    }
}

fn require_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "each group needs at least 2 values (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

fn welch_from_parts(mean_a: f64, var_a: f64, n_a: f64, mean_b: f64, var_b: f64, n_b: f64) -> Result<f64> {
    let se2 = var_a / n_a + var_b / n_b;
    let diff = mean_a - mean_b;
    if se2 == 0.0 {
        if diff == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Degenerate(
            "both groups are constant with different means; t is unbounded".into(),
        ));
    }
    Ok(diff / se2.sqrt())
}

fn snr_from_parts(mean_a: f64, sd_a: f64, mean_b: f64, sd_b: f64) -> Result<f64> {
    let denom = sd_a + sd_b;
    if denom == 0.0 {
        return Err(Error::Degenerate("both groups are constant; SNR denominator is zero".into()));
    }
    Ok((mean_a - mean_b) / denom)
}

/// `(μ_A − μ_B) / sqrt(σ²_A/n_A + σ²_B/n_B)` with sample variances.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<f64> {
    require_pair(a, b)?;
    welch_from_parts(
        stats::mean(a),
        stats::sample_variance(a),
        a.len() as f64,
        stats::mean(b),
        stats::sample_variance(b),
        b.len() as f64,
    )
}

/// `(μ_A − μ_B) / (σ_A + σ_B)` with sample standard deviations.
pub fn snr(a: &[f64], b: &[f64]) -> Result<f64> {
    require_pair(a, b)?;
    snr_from_parts(stats::mean(a), stats::sample_std(a), stats::mean(b), stats::sample_std(b))
}

/// One-way ANOVA F: between-group over within-group mean square.
pub fn anova_f(groups: &[&[f64]]) -> Result<f64> {
    if groups.len() < 2 {
        return Err(Error::InsufficientData("ANOVA needs at least 2 groups".into()));
    }
    if let Some(g) = groups.iter().find(|g| g.len() < 2) {
        return Err(Error::InsufficientData(format!(
            "each ANOVA group needs at least 2 values (got {})",
            g.len()
        )));
    }
    let total: usize = groups.iter().map(|g| g.len()).sum();
    let grand = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / total as f64;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for g in groups {
        let m = stats::mean(g);
        ssb += g.len() as f64 * (m - grand) * (m - grand);
        ssw += g.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    }
    if ssw == 0.0 {
        return Err(Error::Degenerate("zero within-group variance".into()));
    }
    let k = groups.len() as f64;
    Ok((ssb / (k - 1.0)) / (ssw / (total as f64 - k)))
}

/// Per-class sums of one (mean-centred) probeset row; the engine behind the
/// permutation test, where only the label assignment changes between rounds.
pub(crate) struct ClassSums {
    count: Vec<f64>,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
}

impl ClassSums {
    pub(crate) fn new(n_classes: usize) -> Self {
        Self {
            count: vec![0.0; n_classes],
            sum: vec![0.0; n_classes],
            sumsq: vec![0.0; n_classes],
        }
    }

    pub(crate) fn accumulate(&mut self, row: &[f64], labels: &[usize]) {
        self.count.iter_mut().for_each(|v| *v = 0.0);
        self.sum.iter_mut().for_each(|v| *v = 0.0);
        self.sumsq.iter_mut().for_each(|v| *v = 0.0);
        for (&x, &c) in row.iter().zip(labels) {
            self.count[c] += 1.0;
            self.sum[c] += x;
            self.sumsq[c] += x * x;
        }
    }

    fn mean(&self, c: usize) -> f64 {
        self.sum[c] / self.count[c]
    }

    /// Sample variance; values below `floor` are treated as exact zeros so
    /// constant groups are recognised despite rounding.
    fn var(&self, c: usize, floor: f64) -> f64 {
        let v = (self.sumsq[c] - self.sum[c] * self.mean(c)) / (self.count[c] - 1.0);
        if v < floor {
            0.0
        } else {
            v
        }
    }

    /// Statistic for the current assignment; `None` when undefined.
    /// `row_var` is the variance of the whole row, used to scale the zero test.
    pub(crate) fn statistic(&self, kind: StatisticKind, row_var: f64) -> Option<f64> {
        let floor = row_var * 1e-12;
        let k = self.count.len();
        match kind {
            StatisticKind::AnovaF => {
                let n: f64 = self.count.iter().sum();
                let total: f64 = self.sum.iter().sum();
                let mut ssw = 0.0;
                let mut between = 0.0;
                for c in 0..k {
                    ssw += self.sumsq[c] - self.sum[c] * self.sum[c] / self.count[c];
                    between += self.sum[c] * self.sum[c] / self.count[c];
                }
                let ssb = between - total * total / n;
                if ssw <= floor * (n - 1.0) {
                    return None;
                }
                Some((ssb.max(0.0) / (k as f64 - 1.0)) / (ssw / (n - k as f64)))
            }
            StatisticKind::WelchT | StatisticKind::Snr => {
                let mut best: Option<f64> = None;
                for a in 0..k {
                    for b in a + 1..k {
                        let (va, vb) = (self.var(a, floor), self.var(b, floor));
                        let s = if kind == StatisticKind::WelchT {
                            welch_from_parts(self.mean(a), va, self.count[a], self.mean(b), vb, self.count[b])
                        } else {
                            snr_from_parts(self.mean(a), va.sqrt(), self.mean(b), vb.sqrt())
                        };
                        let s = s.ok()?;
                        if best.is_none_or(|cur| s.abs() > cur.abs()) {
                            best = Some(s);
                        }
                    }
                }
                best
            }
        }
    }
}
