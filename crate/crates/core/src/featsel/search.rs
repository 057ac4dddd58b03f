use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::{FeatureSubset, SubsetEvaluator, TraceStep};

/// Feature indices in ascending ID order, the tie-break order for all searches.
fn id_order(evaluator: &dyn SubsetEvaluator) -> Vec<usize> {
    let ids = evaluator.feature_ids();
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
    order
}

/// Scores `base ∪ {c}` for every candidate not in `base`, in candidate order.
fn score_children(
    evaluator: &dyn SubsetEvaluator,
    base: &[usize],
    order: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let members: HashSet<usize> = base.iter().copied().collect();
    order
        .par_iter()
        .filter(|c| !members.contains(c))
        .map(|&c| {
            let mut subset = base.to_vec();
            subset.push(c);
            evaluator.evaluate(&subset).map(|score| (c, score))
        })
        .collect()
}

/// First child with the maximal score.
fn best_child(children: &[(usize, f64)]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for &(c, s) in children {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((c, s));
        }
    }
    best
}

fn finish(evaluator: &dyn SubsetEvaluator, indices: Vec<usize>, score: f64, trace: Vec<TraceStep>) -> FeatureSubset {
    let ids = evaluator.feature_ids();
    FeatureSubset {
        feature_ids: indices.iter().map(|&i| ids[i].clone()).collect(),
        indices,
        score,
        evaluator: evaluator.kind(),
        trace,
    }
}

/// Forward selection from the empty set, adding the candidate with the
/// largest strict improvement until none improves. Ties go to the smaller
/// feature ID.
pub fn greedy_stepwise(evaluator: &dyn SubsetEvaluator) -> Result<FeatureSubset> {
    if evaluator.feature_ids().is_empty() {
        return Err(Error::InsufficientData("no features to select from".into()));
    }
    let order = id_order(evaluator);
    let mut selected = Vec::new();
    let mut score = 0.0;
    let mut trace = Vec::new();
    loop {
        let children = score_children(evaluator, &selected, &order)?;
        match best_child(&children) {
            Some((c, s)) if s > score => {
                selected.push(c);
                score = s;
                trace.push(TraceStep {
                    feature_id: evaluator.feature_ids()[c].clone(),
                    score: s,
                });
            }
            _ => break,
        }
    }
    if selected.is_empty() {
        return Err(Error::NoInformativeStart);
    }
    Ok(finish(evaluator, selected, score, trace))
}

struct OpenNode {
    score: f64,
    seq: usize,
    members: Vec<usize>,
}

impl PartialEq for OpenNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenNode {}

impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenNode {
    /// Higher score first, then earlier insertion.
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Best-first forward search. The open node with the highest score is
/// expanded by every single-feature addition; the search stops once more
/// than `stale_limit` consecutive expansions fail to improve the best
/// subset seen. With `stale_limit = 0` it follows the greedy path.
pub fn best_first(evaluator: &dyn SubsetEvaluator, stale_limit: usize) -> Result<FeatureSubset> {
    if evaluator.feature_ids().is_empty() {
        return Err(Error::InsufficientData("no features to select from".into()));
    }
    let order = id_order(evaluator);
    let mut open = BinaryHeap::new();
    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    let mut seq = 0;
    open.push(OpenNode {
        score: 0.0,
        seq,
        members: Vec::new(),
    });
    let mut best: (Vec<usize>, f64) = (Vec::new(), 0.0);
    let mut trace = Vec::new();
    let mut stale = 0;

    while let Some(node) = open.pop() {
        let children = score_children(evaluator, &node.members, &order)?;
        let mut improved = false;
        for (c, s) in children {
            let mut members = node.members.clone();
            members.push(c);
            let mut key = members.clone();
            key.sort_unstable();
            if !visited.insert(key) {
                continue;
            }
            if s > best.1 {
                best = (members.clone(), s);
                improved = true;
            }
            seq += 1;
            open.push(OpenNode { score: s, seq, members });
        }
        if improved {
            let added = *best.0.last().expect("improved subsets are nonempty");
            trace.push(TraceStep {
                feature_id: evaluator.feature_ids()[added].clone(),
                score: best.1,
            });
            stale = 0;
        } else {
            stale += 1;
            if stale > stale_limit {
                break;
            }
        }
    }
    if best.0.is_empty() {
        return Err(Error::NoInformativeStart);
    }
    Ok(finish(evaluator, best.0, best.1, trace))
}
