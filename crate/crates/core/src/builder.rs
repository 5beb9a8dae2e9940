//! Staged construction of a tree family with a prescribed square degree.
//!
//! Every node `x` carries an approximation `(u_x, f_x)`, a target value
//! `alpha_x` and a history in the decreasing sequences. A node owes one child
//! per pair `(beta, rho)` with `-1 <= beta < alpha_x` and `rho` in `u_x`; the
//! child splits `rho`, keeps `f_x` elsewhere and labels the two new cross
//! pairs with fresh tree indices. Demands are served first in, first out, one
//! per stage, and every old node is pushed one stage deeper along zeros.
//! Trees are read off the final approximations.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{BinStr, TreeFamily, MAX_BITS};

pub const DEFAULT_BUDGET: usize = 10_000;

/// One node of the construction, as it stands after the last stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BuildNode {
    /// Strings at the final level, in lexicographic order.
    pub strings: Vec<BinStr>,
    /// `labels[i][j]` is the tree index of `(strings[i], strings[j])`.
    pub labels: Vec<Vec<usize>>,
    pub alpha: i64,
    pub history: Vec<i64>,
    /// Stage at which the node appeared.
    pub stage: usize,
    pub parent: Option<usize>,
    /// Fresh labels given to the split pair, in both orders.
    pub fresh: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct BuildReport {
    pub family: TreeFamily,
    pub nodes: Vec<BuildNode>,
    /// Level reached after each stage.
    pub levels: Vec<usize>,
}

impl BuildReport {
    pub fn stages(&self) -> usize {
        self.levels.len()
    }
}

struct Demand {
    node: usize,
    beta: i64,
    rho: usize,
    history: Vec<i64>,
}

fn demands_of(node: usize, n: &BuildNode) -> Vec<Demand> {
    let mut out = Vec::new();
    for beta in -1..n.alpha {
        for rho in 0..n.strings.len() {
            let mut history = n.history.clone();
            history.push(beta);
            out.push(Demand {
                node,
                beta,
                rho,
                history,
            });
        }
    }
    out
}

/// Builds a family whose truncated square degree is `alpha`. `budget` bounds
/// the number of stages, counting the initial one.
pub fn build_family(alpha: usize, budget: usize) -> Result<BuildReport> {
    if budget == 0 {
        return Err(Error::InsufficientBudget { residual: 1 });
    }
    let root = BuildNode {
        strings: vec![BinStr::EMPTY],
        labels: vec![vec![0]],
        alpha: alpha as i64 - 1,
        history: Vec::new(),
        stage: 0,
        parent: None,
        fresh: None,
    };
    let mut queue: VecDeque<Demand> = demands_of(0, &root).into();
    let mut nodes = vec![root];
    let mut levels = vec![0];
    let mut level = 0;
    let mut next_label = 1;
    while let Some(d) = queue.pop_front() {
        if levels.len() == budget {
            return Err(Error::InsufficientBudget {
                residual: queue.len() + 1,
            });
        }
        let x = &nodes[d.node];
        let rho = x.strings[d.rho];
        let step = if rho.is_zero() { 1 } else { 2 };
        if level + step > MAX_BITS {
            return Err(Error::TooLarge(format!("construction needs more than {MAX_BITS} levels")));
        }
        let suffix = |s: &str| BinStr::parse(s).expect("literal");
        // (string, origin, second copy)
        let mut items: Vec<(BinStr, usize, bool)> = Vec::new();
        for (i, &s) in x.strings.iter().enumerate() {
            if i == d.rho {
                let (a, b) = if step == 1 { ("0", "1") } else { ("01", "10") };
                items.push((s.concat(suffix(a)), i, false));
                items.push((s.concat(suffix(b)), i, true));
            } else if step == 2 && s.is_zero() {
                items.push((s.concat(suffix("00")), i, false));
            } else {
                items.push((s.concat(suffix(if step == 1 { "1" } else { "11" })), i, false));
            }
        }
        items.sort();
        let fresh = (next_label, next_label + 1);
        next_label += 2;
        let labels = items
            .iter()
            .map(|&(_, i, ci)| {
                items
                    .iter()
                    .map(|&(_, j, cj)| match (i == j && ci != cj, ci) {
                        (true, false) => fresh.0,
                        (true, true) => fresh.1,
                        _ => x.labels[i][j],
                    })
                    .collect()
            })
            .collect();
        for n in nodes.iter_mut() {
            for s in n.strings.iter_mut() {
                *s = s.concat(BinStr::zeros(step));
            }
        }
        level += step;
        let child = BuildNode {
            strings: items.iter().map(|t| t.0).collect(),
            labels,
            alpha: d.beta,
            history: d.history,
            stage: levels.len(),
            parent: Some(d.node),
            fresh: Some(fresh),
        };
        levels.push(level);
        queue.extend(demands_of(nodes.len(), &child));
        nodes.push(child);
    }
    let depth = level.max(1);
    if level == 0 {
        for n in nodes.iter_mut() {
            n.strings = vec![BinStr::zeros(1)];
        }
    }
    let mut trees: Vec<BTreeSet<(BinStr, BinStr)>> = vec![BTreeSet::new(); next_label];
    for n in &nodes {
        for (i, &a) in n.strings.iter().enumerate() {
            for (j, &b) in n.strings.iter().enumerate() {
                trees[n.labels[i][j]].insert((a, b));
            }
        }
    }
    let family = TreeFamily::from_leaves(depth, trees.into_iter().map(|t| t.into_iter().collect()).collect())?;
    Ok(BuildReport { family, nodes, levels })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CannedKind {
    Diagonal,
    Full,
}

/// Test fixtures: the diagonal as the first of `count` trees (the rest
/// empty), or every pair in each of `count` trees.
pub fn canned_family(kind: CannedKind, depth: usize, count: usize) -> Result<TreeFamily> {
    match kind {
        CannedKind::Full => TreeFamily::full(depth, count),
        CannedKind::Diagonal => {
            let diag = TreeFamily::diagonal(depth)?;
            let mut trees: Vec<Vec<(BinStr, BinStr)>> = Vec::new();
            if count > 0 {
                trees.push(diag.tree(0).sorted());
                trees.resize(count, Vec::new());
            }
            TreeFamily::new(depth, trees)
        }
    }
}
