//! Multiple-testing adjustment of raw p-values.
//!
//! All three procedures return adjusted values in the input order, capped
//! at 1, and preserve the ordering of the raw values.

use crate::error::{Error, Result};

fn check(p: &[f64]) -> Result<()> {
    if let Some(bad) = p.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
        return Err(Error::InvalidParameter(format!("p-value {} outside (0, 1]", bad)));
    }
    Ok(())
}

fn ascending(p: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    order
}

/// Step-up adjustment: `adj_(i) = min_{j ≥ i} factor(j) · p_(j)` over the
/// ascending order, with 1-based rank `j`.
fn step_up(p: &[f64], factor: impl Fn(usize) -> f64) -> Vec<f64> {
    let order = ascending(p);
    let mut adjusted = vec![0.0; p.len()];
    let mut running = f64::INFINITY;
    for (pos, &i) in order.iter().enumerate().rev() {
        running = running.min(factor(pos + 1) * p[i]);
        adjusted[i] = running.min(1.0);
    }
    adjusted
}

/// Benjamini–Hochberg false discovery rate.
pub fn adjust_bh(p: &[f64]) -> Result<Vec<f64>> {
    check(p)?;
    let m = p.len() as f64;
    Ok(step_up(p, |j| m / j as f64))
}

/// Bonferroni family-wise error rate.
pub fn adjust_bonferroni(p: &[f64]) -> Result<Vec<f64>> {
    check(p)?;
    let m = p.len() as f64;
    Ok(p.iter().map(|v| (m * v).min(1.0)).collect())
}

/// Hochberg step-up family-wise error rate.
pub fn adjust_hochberg(p: &[f64]) -> Result<Vec<f64>> {
    check(p)?;
    let m = p.len();
    Ok(step_up(p, |j| (m - j + 1) as f64))
}
