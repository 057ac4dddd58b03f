//! Univariate differential expression: per-probeset statistics,
//! permutation p-values, multiplicity adjustment and ranking.

mod adjust;
mod permutation;
mod statistics;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use adjust::{adjust_bh, adjust_bonferroni, adjust_hochberg};
pub use permutation::{permutation_pvalues, PermutationPlan, PermutationResult};
pub use statistics::{anova_f, snr, welch_t, StatisticKind};

use crate::corpus::{ExpressionMatrix, LabeledDataset, Stage, TsvWrite};
use crate::error::Result;
use crate::preprocess;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneScore {
    pub probeset_id: String,
    pub statistic: f64,
    pub raw_p: f64,
    pub fdr_bh: f64,
    pub fwer_bonferroni: f64,
    pub fwer_hochberg: f64,
    /// 1 = smallest raw p; ties broken by probeset id.
    pub rank: usize,
    pub degenerate: bool,
}

/// Scores every probeset and returns them sorted by rank.
pub fn rank_genes(dataset: &LabeledDataset, kind: StatisticKind, plan: &PermutationPlan) -> Result<Vec<GeneScore>> {
    let perm = permutation_pvalues(dataset, kind, plan)?;
    let fdr = adjust_bh(&perm.raw_p)?;
    let bonferroni = adjust_bonferroni(&perm.raw_p)?;
    let hochberg = adjust_hochberg(&perm.raw_p)?;
    let ids = dataset.matrix().probeset_ids();

    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| perm.raw_p[a].total_cmp(&perm.raw_p[b]).then_with(|| ids[a].cmp(&ids[b])));
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(pos, g)| GeneScore {
            probeset_id: ids[g].clone(),
            statistic: perm.observed[g],
            raw_p: perm.raw_p[g],
            fdr_bh: fdr[g],
            fwer_bonferroni: bonferroni[g],
            fwer_hochberg: hochberg[g],
            rank: pos + 1,
            degenerate: perm.degenerate[g],
        })
        .collect())
}

/// Number of genes with BH-adjusted FDR strictly below `cutoff`.
pub fn count_significant(scores: &[GeneScore], cutoff: f64) -> usize {
    scores.iter().filter(|s| s.fdr_bh < cutoff).count()
}

/// Z-scored expression of the `top_n` best-ranked genes, rows in rank order
/// and columns grouped by class in class-set order (stable within a class).
pub fn heatmap_export(dataset: &LabeledDataset, scores: &[GeneScore], top_n: usize) -> Result<ExpressionMatrix> {
    let mut ranked: Vec<&GeneScore> = scores.iter().collect();
    ranked.sort_by_key(|s| s.rank);
    if top_n > ranked.len() {
        log::warn!(
            "heatmap requested {} genes but only {} are scored; clipping",
            top_n,
            ranked.len()
        );
    }
    let matrix = dataset.matrix();
    let rows = ranked
        .iter()
        .take(top_n)
        .map(|s| {
            matrix
                .probeset_index(&s.probeset_id)
                .ok_or_else(|| crate::Error::UnknownLabel(s.probeset_id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = Vec::with_capacity(matrix.n_samples());
    for c in 0..dataset.n_classes() {
        columns.extend((0..matrix.n_samples()).filter(|&s| dataset.labels()[s] == c));
    }
    let sub = matrix.select_rows(&rows).select_columns(&columns);
    if sub.stage() == Stage::Zscore || sub.n_probesets() == 0 {
        return Ok(sub);
    }
    Ok(preprocess::zscore(&sub)?.matrix)
}

impl TsvWrite for [GeneScore] {
    fn write_tsv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "probeset\tstatistic\traw_p\tfdr\tbonferroni\thochberg\trank")?;
        for s in self {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                s.probeset_id, s.statistic, s.raw_p, s.fdr_bh, s.fwer_bonferroni, s.fwer_hochberg, s.rank
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(rows: Vec<Vec<f64>>, labels: &[&str]) -> LabeledDataset {
        let n = rows[0].len();
        let m = ExpressionMatrix::from_rows(
            (0..rows.len()).map(|i| format!("g{}", i)).collect(),
            (0..n).map(|i| format!("s{}", i)).collect(),
            rows,
            Stage::Zscore,
        )
        .unwrap();
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        LabeledDataset::new(m, &labels).unwrap()
    }

    fn two_class() -> LabeledDataset {
        dataset(
            vec![
                vec![5.0, 5.2, 4.9, 5.1, 0.1, -0.2, 0.0, 0.2],
                vec![0.3, -0.1, 0.2, 0.0, 0.1, 0.25, -0.15, 0.05],
                vec![1.0; 8],
            ],
            &["A", "A", "A", "A", "B", "B", "B", "B"],
        )
    }

    #[test]
    fn minimum_p_and_constant_rows() {
        let ds = two_class();
        let res = permutation_pvalues(&ds, StatisticKind::WelchT, &PermutationPlan::new(1000, 3)).unwrap();
        // 2 of the 70 labelings reach the observed |t| exactly (identity and swap)
        assert!(res.raw_p[0] >= 1.0 / 1001.0);
        assert!(res.raw_p[0] < 0.1);
        assert_eq!(res.raw_p[2], 1.0);
        assert!(res.degenerate[2]);
        assert!(!res.degenerate[0]);
    }

    #[test]
    fn same_seed_same_pvalues() {
        let ds = two_class();
        let plan = PermutationPlan::new(200, 11);
        let a = permutation_pvalues(&ds, StatisticKind::Snr, &plan).unwrap();
        let b = permutation_pvalues(&ds, StatisticKind::Snr, &plan).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ranking_covers_every_gene_once() {
        let ds = two_class();
        let scores = rank_genes(&ds, StatisticKind::AnovaF, &PermutationPlan::new(300, 5)).unwrap();
        let mut ranks: Vec<usize> = scores.iter().map(|s| s.rank).collect();
        ranks.sort();
        assert_eq!(ranks, vec![1, 2, 3]);
        assert_eq!(scores[0].probeset_id, "g0");
        for s in &scores {
            assert!(s.fwer_bonferroni >= s.fwer_hochberg);
            assert!(s.fwer_hochberg >= s.fdr_bh);
            assert!(s.fdr_bh >= s.raw_p);
        }
        let table = scores.to_tsv_string();
        assert!(table.starts_with("probeset\tstatistic\traw_p\tfdr\tbonferroni\thochberg\trank\n"));
    }

    #[test]
    fn heatmap_layout() {
        let ds = dataset(
            vec![
                vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
                vec![6.0, 1.0, 5.0, 2.0, 4.0, 3.0],
            ],
            &["A", "B", "A", "B", "A", "B"],
        );
        let scores = rank_genes(&ds, StatisticKind::WelchT, &PermutationPlan::new(50, 1)).unwrap();
        let h = heatmap_export(&ds, &scores, 40).unwrap();
        assert_eq!(h.n_probesets(), 2);
        assert_eq!(h.sample_ids(), ["s0", "s2", "s4", "s1", "s3", "s5"]);
        assert_eq!(h.probeset_ids()[0], scores[0].probeset_id);
        let empty = heatmap_export(&ds, &scores, 0).unwrap();
        assert_eq!(empty.n_probesets(), 0);
        assert_eq!(empty.n_samples(), 6);
    }
}
