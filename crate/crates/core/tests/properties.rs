use biomarker::corpus::{ExpressionMatrix, LabeledDataset, Stage};
use biomarker::diffexpr::{adjust_bh, adjust_bonferroni, adjust_hochberg, permutation_pvalues, PermutationPlan, StatisticKind};
use biomarker::evaluate::{kappa, stratified_folds, ConfusionMatrix};
use biomarker::featsel::{merit_from_correlations, svm_rfe};
use biomarker::preprocess::zscore;
use proptest::prelude::*;

fn matrix(rows: Vec<Vec<f64>>, stage: Stage) -> ExpressionMatrix {
    let n = rows[0].len();
    ExpressionMatrix::from_rows(
        (0..rows.len()).map(|i| format!("p{:03}", i)).collect(),
        (0..n).map(|i| format!("s{:03}", i)).collect(),
        rows,
        stage,
    )
    .unwrap()
}

fn dataset(rows: Vec<Vec<f64>>, labels: &[usize]) -> LabeledDataset {
    let names: Vec<String> = (0..=*labels.iter().max().unwrap()).map(|c| format!("K{}", c)).collect();
    let l: Vec<String> = labels.iter().map(|&c| names[c].clone()).collect();
    LabeledDataset::with_class_set(matrix(rows, Stage::Log), &l, names).unwrap()
}

fn pvalues() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![(1u32..=20).prop_map(|k| k as f64 / 20.0), 1e-6f64..=1.0], 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn adjustments_dominate_and_preserve_order(p in pvalues()) {
        let bh = adjust_bh(&p).unwrap();
        let hoch = adjust_hochberg(&p).unwrap();
        let bonf = adjust_bonferroni(&p).unwrap();
        for i in 0..p.len() {
            prop_assert!(bonf[i] >= hoch[i] && hoch[i] >= bh[i] && bh[i] >= p[i]);
            prop_assert!(bonf[i] <= 1.0);
            for j in 0..p.len() {
                if p[i] <= p[j] {
                    prop_assert!(bh[i] <= bh[j] && hoch[i] <= hoch[j]);
                }
            }
        }
    }

    #[test]
    fn folds_are_balanced(
        counts in prop::collection::vec(1usize..15, 2..5),
        k in 2usize..8,
        seed in any::<u64>(),
    ) {
        let labels: Vec<usize> = counts.iter().enumerate().flat_map(|(c, &n)| std::iter::repeat_n(c, n)).collect();
        prop_assume!(k <= labels.len());
        let plan = stratified_folds(&labels, counts.len(), k, seed).unwrap();
        let sizes = plan.fold_sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for c in 0..counts.len() {
            let per: Vec<usize> = (0..k)
                .map(|f| plan.test_indices(f).iter().filter(|&&s| labels[s] == c).count())
                .collect();
            prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
        }
        prop_assert_eq!(&plan, &stratified_folds(&labels, counts.len(), k, seed).unwrap());
    }

    #[test]
    fn zscored_rows_are_standardized(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 6), 1..10)) {
        let z = zscore(&matrix(rows, Stage::Log)).unwrap();
        for (i, row) in z.matrix.rows().enumerate() {
            if z.degenerate_rows.contains(&i) {
                prop_assert!(row.iter().all(|v| *v == 0.0));
                continue;
            }
            let m = row.iter().sum::<f64>() / row.len() as f64;
            let sd = (row.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (row.len() - 1) as f64).sqrt();
            prop_assert!(m.abs() < 1e-12 && (sd - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_recomputes_from_counts(counts in prop::collection::vec(prop::collection::vec(0u64..30, 3), 3)) {
        let classes: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let cm = ConfusionMatrix::from_counts(&classes, counts.clone()).unwrap();
        let n: u64 = counts.iter().flatten().sum();
        prop_assume!(n > 0);
        let trace: u64 = (0..3).map(|i| counts[i][i]).sum();
        prop_assert!((cm.accuracy() - trace as f64 / n as f64).abs() < 1e-12);
        let pe: f64 = (0..3)
            .map(|c| counts[c].iter().sum::<u64>() as f64 * counts.iter().map(|r| r[c]).sum::<u64>() as f64)
            .sum::<f64>() / (n * n) as f64;
        if pe < 1.0 {
            let po = trace as f64 / n as f64;
            prop_assert!((kappa(&cm).unwrap() - (po - pe) / (1.0 - pe)).abs() < 1e-9);
        } else {
            prop_assert!(kappa(&cm).is_err());
        }
    }

    /// Adding a perfect copy of a member with no larger class correlation
    /// does not raise the merit of a subset whose members share one class
    /// correlation and one pairwise correlation.
    #[test]
    fn copy_never_helps_exchangeable_subset(
        k in 1usize..12,
        r in 0.0f64..1.0,
        rho in 0.0f64..1.0,
        shrink in 0.0f64..=1.0,
    ) {
        let pairs = vec![rho; k * (k - 1) / 2];
        let before = merit_from_correlations(&vec![r; k], &pairs);
        let mut class_corr = vec![r; k];
        class_corr.push(r * shrink);
        let mut with_copy = pairs;
        with_copy.push(1.0);
        with_copy.extend(std::iter::repeat_n(rho, k - 1));
        let after = merit_from_correlations(&class_corr, &with_copy);
        prop_assert!(after <= before * (1.0 + 1e-12));
    }

    #[test]
    fn rfe_returns_a_permutation(
        values in prop::collection::vec(-3.0f64..3.0, 12 * 5),
        shifts in prop::collection::vec(0.0f64..2.0, 5),
    ) {
        let labels: Vec<usize> = (0..12).map(|s| s % 3).collect();
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|f| (0..12).map(|s| values[f * 12 + s] + shifts[f] * labels[s] as f64).collect())
            .collect();
        let r = svm_rfe(&dataset(rows, &labels), 1, 1.0).unwrap();
        let mut idx = r.indices.clone();
        idx.sort();
        prop_assert_eq!(idx, vec![0, 1, 2, 3, 4]);
        prop_assert_eq!(r.trainings, 4);
    }
}

#[test]
fn copy_can_raise_merit_of_a_mixed_subset() {
    // A strong and a weak feature, uncorrelated; copying the strong one pays.
    let before = merit_from_correlations(&[0.9, 0.1], &[0.0]);
    let after = merit_from_correlations(&[0.9, 0.1, 0.9], &[0.0, 1.0, 0.0]);
    assert!(after > before);
}

#[test]
fn permutation_results_ignore_thread_count() {
    let labels: Vec<usize> = (0..18).map(|s| s % 3).collect();
    let rows: Vec<Vec<f64>> = (0..40)
        .map(|g| (0..18).map(|s| ((g * 31 + s * 17) % 23) as f64 + (g % 4 == 0) as u8 as f64 * labels[s] as f64).collect())
        .collect();
    let ds = dataset(rows, &labels);
    let plan = PermutationPlan::new(300, 5);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| permutation_pvalues(&ds, StatisticKind::AnovaF, &plan).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one.raw_p, four.raw_p);
    assert!(one.raw_p.iter().all(|p| *p > 0.0 && *p <= 1.0));
}
