use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts indexed `[true class][predicted class]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub class_set: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn zeros(class_set: &[String]) -> Self {
        let k = class_set.len();
        Self {
            class_set: class_set.to_vec(),
            counts: vec![vec![0; k]; k],
        }
    }

    pub fn from_counts(class_set: &[String], counts: Vec<Vec<u64>>) -> Result<Self> {
        let k = class_set.len();
        if counts.len() != k || counts.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch {
                expected: format!("{k} x {k} counts"),
                found: format!("{} rows", counts.len()),
            });
        }
        Ok(Self {
            class_set: class_set.to_vec(),
            counts,
        })
    }

    pub(crate) fn add(&mut self, truth: usize, predicted: usize) {
        self.counts[truth][predicted] += 1;
    }

    pub fn n_instances(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Proportion on the diagonal; zero for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        let n = self.n_instances();
        if n == 0 {
            return 0.0;
        }
        self.correct() as f64 / n as f64
    }
}

/// Tallies label pairs against `class_set`.
pub fn confusion<S: AsRef<str>>(predictions: &[S], truths: &[S], class_set: &[String]) -> Result<ConfusionMatrix> {
    if predictions.len() != truths.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} predictions", truths.len()),
            found: format!("{}", predictions.len()),
        });
    }
    let index = |label: &str| {
        class_set
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    };
    let mut cm = ConfusionMatrix::zeros(class_set);
    for (p, t) in predictions.iter().zip(truths) {
        cm.add(index(t.as_ref())?, index(p.as_ref())?);
    }
    Ok(cm)
}

/// Cohen's kappa of a confusion matrix.
pub fn kappa(cm: &ConfusionMatrix) -> Result<f64> {
    let n = cm.n_instances() as f64;
    if n == 0.0 {
        return Err(Error::InsufficientData("kappa of an empty confusion matrix".into()));
    }
    let k = cm.counts.len();
    let p_o = cm.correct() as f64 / n;
    let p_e: f64 = (0..k)
        .map(|c| {
            let row: u64 = cm.counts[c].iter().sum();
            let col: u64 = cm.counts.iter().map(|r| r[c]).sum();
            row as f64 * col as f64
        })
        .sum::<f64>()
        / (n * n);
    if p_e >= 1.0 {
        return Err(Error::Degenerate("chance agreement is 1; kappa undefined".into()));
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbErrors {
    pub mae: f64,
    pub rmse: f64,
    /// Percent of the baseline's mean absolute error.
    pub rae: f64,
    /// Percent of the baseline's root mean squared error.
    pub rrse: f64,
}

fn check_distribution(p: &[f64], k: usize) -> Result<()> {
    let sum: f64 = p.iter().sum();
    if p.len() != k || p.iter().any(|v| !(*v >= -1e-9)) || (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "prediction {:?} is not a distribution over {} classes",
            p, k
        )));
    }
    Ok(())
}

/// Probability errors against one-hot truth, relative to predicting `prior`
/// for every instance.
pub fn prob_errors(predictions: &[Vec<f64>], truths: &[usize], prior: &[f64]) -> Result<ProbErrors> {
    let baselines = vec![prior.to_vec(); predictions.len()];
    prob_errors_with_baselines(predictions, truths, &baselines)
}

/// As [`prob_errors`] with a separate baseline distribution per instance.
pub fn prob_errors_with_baselines(
    predictions: &[Vec<f64>],
    truths: &[usize],
    baselines: &[Vec<f64>],
) -> Result<ProbErrors> {
    let n = predictions.len();
    if n == 0 || truths.len() != n || baselines.len() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{} truths and baselines (non-empty)", n),
            found: format!("{} truths, {} baselines", truths.len(), baselines.len()),
        });
    }
    let k = predictions[0].len();
    let (mut abs, mut sq, mut abs0, mut sq0) = (0.0, 0.0, 0.0, 0.0);
    for ((p, &t), b) in predictions.iter().zip(truths).zip(baselines) {
        check_distribution(p, k)?;
        check_distribution(b, k)?;
        if t >= k {
            return Err(Error::UnknownLabel(format!("class index {}", t)));
        }
        for c in 0..k {
            let y = if c == t { 1.0 } else { 0.0 };
            abs += (p[c] - y).abs();
            sq += (p[c] - y).powi(2);
            abs0 += (b[c] - y).abs();
            sq0 += (b[c] - y).powi(2);
        }
    }
    let cells = (n * k) as f64;
    let mae = abs / cells;
    let rmse = (sq / cells).sqrt();
    let mae0 = abs0 / cells;
    let rmse0 = (sq0 / cells).sqrt();
    if mae0 == 0.0 {
        return Err(Error::Degenerate("baseline predictor is perfect; relative errors undefined".into()));
    }
    Ok(ProbErrors {
        mae,
        rmse,
        rae: 100.0 * mae / mae0,
        rrse: 100.0 * rmse / rmse0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Vec<String> {
        vec!["HC".into(), "ND".into(), "PD".into()]
    }

    #[test]
    fn published_matrices() {
        let rsvm = ConfusionMatrix::from_counts(&abc(), vec![vec![16, 0, 6], vec![2, 26, 5], vec![1, 4, 45]]).unwrap();
        assert_eq!(rsvm.n_instances(), 105);
        assert_eq!(rsvm.correct(), 87);
        let p_e = 4208.0 / 11025.0;
        let expected = (87.0 / 105.0 - p_e) / (1.0 - p_e);
        assert!((kappa(&rsvm).unwrap() - expected).abs() < 1e-12);
        assert!((kappa(&rsvm).unwrap() - 0.7228).abs() < 5e-4);

        let wse = ConfusionMatrix::from_counts(&abc(), vec![vec![4, 6, 12], vec![0, 17, 16], vec![0, 2, 48]]).unwrap();
        assert!((wse.accuracy() - 0.657143).abs() < 5e-4);
        assert!((kappa(&wse).unwrap() - 0.4011).abs() < 5e-4);
    }

    #[test]
    fn confusion_from_labels() {
        let cm = confusion(&["HC", "PD", "PD"], &["HC", "PD", "ND"], &abc()).unwrap();
        assert_eq!(cm.counts, vec![vec![1, 0, 0], vec![0, 0, 1], vec![0, 0, 1]]);
        let empty: [&str; 0] = [];
        let z = confusion(&empty, &empty, &abc()).unwrap();
        assert_eq!(z.n_instances(), 0);
        assert!(kappa(&z).is_err());
        assert!(matches!(confusion(&["XX"], &["HC"], &abc()), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn perfect_and_degenerate_kappa() {
        let diag = ConfusionMatrix::from_counts(&abc(), vec![vec![3, 0, 0], vec![0, 4, 0], vec![0, 0, 5]]).unwrap();
        assert_eq!(kappa(&diag).unwrap(), 1.0);
        let one = ConfusionMatrix::from_counts(&abc(), vec![vec![7, 0, 0], vec![0, 0, 0], vec![0, 0, 0]]).unwrap();
        assert!(matches!(kappa(&one), Err(Error::Degenerate(_))));
    }

    #[test]
    fn probability_errors() {
        // |0.8 - 0| + |0.2 - 1| = 1.6 over 2 cells
        let e = prob_errors(&[vec![0.8, 0.2]], &[1], &[0.5, 0.5]).unwrap();
        assert!((e.mae - 0.8).abs() < 1e-12);
        let perfect = prob_errors(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0, 1], &[0.5, 0.5]).unwrap();
        assert_eq!((perfect.mae, perfect.rmse), (0.0, 0.0));
        let prior = vec![0.25, 0.75];
        let base = prob_errors(&[prior.clone(), prior.clone()], &[0, 1], &prior).unwrap();
        assert!((base.rae - 100.0).abs() < 1e-12 && (base.rrse - 100.0).abs() < 1e-12);
        assert!(prob_errors(&[vec![0.7, 0.7]], &[0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn single_instance_worked_example() {
        // truth is the first class: each cell misses by 0.2
        let e = prob_errors(&[vec![0.8, 0.2]], &[0], &[0.5, 0.5]).unwrap();
        assert!((e.mae - 0.2).abs() < 1e-12);
        assert!((e.rmse - 0.2).abs() < 1e-12);
    }
}
