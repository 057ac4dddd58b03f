//! Linear soft-margin SVM trained by sequential minimal optimization, with
//! one-vs-one voting for more than two classes.
//!
//! The binary solver works on a precomputed kernel (Gram) matrix and follows
//! the classic two-multiplier decomposition: pick the maximal violating pair
//! under the equality constraint, solve the two-variable subproblem in closed
//! form, clip to the box, update the gradient. Each step cannot decrease the
//! dual objective.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Box constraint.
    pub c: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tolerance: 1e-3,
            max_iterations: 10_000_000,
        }
    }
}

/// Result of one binary SMO run.
#[derive(Debug, Clone)]
pub struct SmoOutcome {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Dual objective after each iteration (starting at α = 0), when requested.
    pub objective_trace: Vec<f64>,
    /// Largest per-instance KKT violation at the returned solution.
    pub max_kkt_violation: f64,
}

const TAU: f64 = 1e-12;

/// Dual objective `Σα − ½ ΣΣ α_i α_j y_i y_j K_ij`.
pub fn dual_objective(gram: &[f64], y: &[f64], alpha: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram[i * n + j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Per-instance KKT violation of `(alpha, bias)` for the soft-margin problem:
/// margin `m_i = y_i f(x_i)` must be ≥ 1 at α = 0, ≤ 1 at α = C and = 1 in between.
pub fn kkt_violations(gram: &[f64], y: &[f64], alpha: &[f64], bias: f64, c: f64) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            let f: f64 = (0..n).map(|j| alpha[j] * y[j] * gram[i * n + j]).sum::<f64>() + bias;
            violation(y[i] * f, alpha[i], c)
        })
        .collect()
}

fn violation(margin: f64, alpha: f64, c: f64) -> f64 {
    if alpha <= 0.0 {
        (1.0 - margin).max(0.0)
    } else if alpha >= c {
        (margin - 1.0).max(0.0)
    } else {
        (margin - 1.0).abs()
    }
}

/// Solves the binary soft-margin dual on an `n × n` row-major Gram matrix
/// with labels `y ∈ {−1, +1}`.
pub fn smo_solve(gram: &[f64], y: &[f64], params: &SvmParams, record_objective: bool) -> SmoOutcome {
    let n = y.len();
    debug_assert_eq!(gram.len(), n * n);
    let c = params.c;
    let k = |i: usize, j: usize| gram[i * n + j];
    let mut alpha = vec![0.0; n];
    // gradient of ½αᵀQα − eᵀα, Q_ij = y_i y_j K_ij
    let mut grad = vec![-1.0; n];
    let mut trace = Vec::new();
    if record_objective {
        trace.push(0.0);
    }
    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let mut iterations = 0;
    let mut converged = false;
    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let (mut i, mut j) = (usize::MAX, usize::MAX);
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if in_low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < params.tolerance {
            converged = true;
            break;
        }
        if iterations >= params.max_iterations {
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (ai, aj) = two_variable_step(i, j, &alpha, &grad, y, &k, c);
        alpha[i] = ai;
        alpha[j] = aj;
        let (di, dj) = (ai - old_i, aj - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k(t, i) * di + y[j] * k(t, j) * dj);
        }
        if record_objective {
            let f: f64 = alpha.iter().zip(&grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>() * 0.5;
            trace.push(-f);
        }
    }
    if !converged {
        log::warn!("SMO stopped after {} iterations without reaching tolerance", iterations);
    }

    let bias = -rho(&alpha, &grad, y, c);
    let max_kkt_violation = (0..n)
        .map(|t| violation(grad[t] + 1.0 + y[t] * bias, alpha[t], c))
        .fold(0.0, f64::max);
    SmoOutcome {
        alpha,
        bias,
        iterations,
        converged,
        objective_trace: trace,
        max_kkt_violation,
    }
}

/// Closed-form update of the pair (i, j), clipped to the box.
fn two_variable_step(
    i: usize,
    j: usize,
    alpha: &[f64],
    grad: &[f64],
    y: &[f64],
    k: &impl Fn(usize, usize) -> f64,
    c: f64,
) -> (f64, f64) {
    let (mut ai, mut aj) = (alpha[i], alpha[j]);
    let mut quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
    if quad <= 0.0 {
        quad = TAU;
    }
    if y[i] != y[j] {
        let delta = (-grad[i] - grad[j]) / quad;
        let diff = ai - aj;
        ai += delta;
        aj += delta;
        if diff > 0.0 {
            if aj < 0.0 {
                aj = 0.0;
                ai = diff;
            }
        } else if ai < 0.0 {
            ai = 0.0;
            aj = -diff;
        }
        if diff > 0.0 {
            if ai > c {
                ai = c;
                aj = c - diff;
            }
        } else if aj > c {
            aj = c;
            ai = c + diff;
        }
    } else {
        let delta = (grad[i] - grad[j]) / quad;
        let sum = ai + aj;
        ai -= delta;
        aj += delta;
        if sum > c {
            if ai > c {
                ai = c;
                aj = sum - c;
            }
        } else if aj < 0.0 {
            aj = 0.0;
            ai = sum;
        }
        if sum > c {
            if aj > c {
                aj = c;
                ai = sum - c;
            }
        } else if ai < 0.0 {
            ai = 0.0;
            aj = sum;
        }
    }
    (ai, aj)
}

/// Offset `ρ` (decision value is `Σ α y K − ρ`): mean of `y_i G_i` over free
/// multipliers, or the midpoint of the feasible interval when none are free.
fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free = 0usize;
    let mut free_sum = 0.0;
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else {
        (upper + lower) / 2.0
    }
}

/// One one-vs-one machine. A positive decision value votes for `positive`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseMachine {
    pub positive: usize,
    pub negative: usize,
    /// Primal weights `w = Σ α_i y_i x_i`.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub support_vectors: usize,
    pub iterations: usize,
    pub max_kkt_violation: f64,
}

impl PairwiseMachine {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub c: f64,
    pub machines: Vec<PairwiseMachine>,
}

/// Dual solution of one class pair, before weights are formed.
pub(crate) struct PairSolution {
    pub positive: usize,
    pub negative: usize,
    /// Sample indices (into the full training set) of the pair's members.
    pub members: Vec<usize>,
    /// `α_i y_i` per member.
    pub coef: Vec<f64>,
    pub outcome: SmoOutcome,
}

/// Trains every class pair on a shared `n × n` Gram matrix.
pub(crate) fn train_pairs(
    gram: &[f64],
    labels: &[usize],
    n_classes: usize,
    params: &SvmParams,
) -> Result<Vec<PairSolution>> {
    if !(params.c > 0.0) || !(params.tolerance > 0.0) {
        return Err(Error::InvalidParameter("SVM needs C > 0 and tolerance > 0".into()));
    }
    let n = labels.len();
    let mut out = Vec::with_capacity(n_classes * (n_classes - 1) / 2);
    for a in 0..n_classes {
        for b in a + 1..n_classes {
            let members: Vec<usize> = (0..n).filter(|&s| labels[s] == a || labels[s] == b).collect();
            let y: Vec<f64> = members
                .iter()
                .map(|&s| if labels[s] == a { 1.0 } else { -1.0 })
                .collect();
            if !y.iter().any(|v| *v > 0.0) || !y.iter().any(|v| *v < 0.0) {
                return Err(Error::InsufficientData(format!(
                    "class pair ({}, {}) lacks samples of one class",
                    a, b
                )));
            }
            let m = members.len();
            let mut sub = vec![0.0; m * m];
            for (r, &i) in members.iter().enumerate() {
                for (c, &j) in members.iter().enumerate() {
                    sub[r * m + c] = gram[i * n + j];
                }
            }
            let outcome = smo_solve(&sub, &y, params, false);
            let coef = outcome.alpha.iter().zip(&y).map(|(a, y)| a * y).collect();
            out.push(PairSolution {
                positive: a,
                negative: b,
                members,
                coef,
                outcome,
            });
        }
    }
    Ok(out)
}

pub(crate) fn linear_gram(x: &[Vec<f64>]) -> Vec<f64> {
    let n = x.len();
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = x[i].iter().zip(&x[j]).map(|(a, b)| a * b).sum();
            gram[i * n + j] = v;
            gram[j * n + i] = v;
        }
    }
    gram
}

pub(crate) fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: &SvmParams) -> Result<SvmModel> {
    let gram = linear_gram(x);
    let d = x[0].len();
    let machines = train_pairs(&gram, y, n_classes, params)?
        .into_iter()
        .map(|p| {
            let mut weights = vec![0.0; d];
            for (&s, &coef) in p.members.iter().zip(&p.coef) {
                if coef != 0.0 {
                    for (w, v) in weights.iter_mut().zip(&x[s]) {
                        *w += coef * v;
                    }
                }
            }
            PairwiseMachine {
                positive: p.positive,
                negative: p.negative,
                weights,
                bias: p.outcome.bias,
                support_vectors: p.coef.iter().filter(|c| **c != 0.0).count(),
                iterations: p.outcome.iterations,
                max_kkt_violation: p.outcome.max_kkt_violation,
            }
        })
        .collect();
    Ok(SvmModel {
        c: params.c,
        machines,
    })
}

impl SvmModel {
    /// One-vs-one vote shares.
    pub(crate) fn predict_proba(&self, x: &[f64], n_classes: usize) -> Vec<f64> {
        let mut votes = vec![0.0; n_classes];
        for m in &self.machines {
            if m.decision(x) > 0.0 {
                votes[m.positive] += 1.0;
            } else {
                votes[m.negative] += 1.0;
            }
        }
        let total = self.machines.len() as f64;
        votes.iter_mut().for_each(|v| *v /= total);
        votes
    }
}
