//! Point sets in tree families turned into relational models.
//!
//! Prefix data is recorded only at levels strictly below the family depth.
//! An entry at the last level can no longer split, so its truncated degree is
//! -1 and would bound nothing useful.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coloring::PairColoring;
use crate::error::{Error, Result};
use crate::rectrank::TwoSortedModel;
use crate::structure::{FiniteModel, ModelLimits};
use crate::tree::{parse_word, word_string, BinStr, RectTree, SouslinFamily, TreeFamily, Word};

/// Distinct full-depth points with a tree index for every ordered pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareWitness {
    points: Vec<BinStr>,
    pairing: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SquareFile {
    points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairing: Option<Vec<Vec<usize>>>,
}

fn check_points(points: &[BinStr], depth: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::input("witness needs at least one point"));
    }
    if let Some(p) = points.iter().find(|p| p.len() != depth) {
        return Err(Error::input(format!("point {p} does not have length {depth}")));
    }
    for (i, p) in points.iter().enumerate() {
        if points[..i].contains(p) {
            return Err(Error::input(format!("point {p} is repeated")));
        }
    }
    Ok(())
}

impl SquareWitness {
    pub fn new(family: &TreeFamily, points: Vec<BinStr>, pairing: Vec<Vec<usize>>) -> Result<Self> {
        check_points(&points, family.depth())?;
        let k = points.len();
        if pairing.len() != k || pairing.iter().any(|r| r.len() != k) {
            return Err(Error::input(format!("pairing must be a {k}x{k} matrix")));
        }
        for i in 0..k {
            for j in 0..k {
                if !family.contains(pairing[i][j], points[i], points[j]) {
                    return Err(Error::invalid(format!(
                        "pair ({}, {}) is not in tree {}",
                        points[i], points[j], pairing[i][j]
                    )));
                }
            }
        }
        Ok(SquareWitness { points, pairing })
    }

    /// Pairs each ordered pair with the least tree containing it.
    pub fn minimal(family: &TreeFamily, points: Vec<BinStr>) -> Result<Self> {
        check_points(&points, family.depth())?;
        let mut pairing = vec![vec![0; points.len()]; points.len()];
        for (i, &a) in points.iter().enumerate() {
            for (j, &b) in points.iter().enumerate() {
                pairing[i][j] = (0..family.num_trees())
                    .find(|&t| family.contains(t, a, b))
                    .ok_or_else(|| Error::invalid(format!("pair ({a}, {b}) is in no tree")))?;
            }
        }
        Ok(SquareWitness { points, pairing })
    }

    pub fn points(&self) -> &[BinStr] {
        &self.points
    }

    pub fn pairing(&self) -> &[Vec<usize>] {
        &self.pairing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `{"points": [...], "pairing": [[...]]}`; without a pairing the least
    /// covering tree is used.
    pub fn from_json(family: &TreeFamily, value: serde_json::Value) -> Result<Self> {
        let file: SquareFile =
            serde_json::from_value(value).map_err(|e| Error::input(format!("witness: {e}")))?;
        let points = file.points.iter().map(|s| BinStr::parse(s)).collect::<Result<Vec<_>>>()?;
        match file.pairing {
            Some(p) => Self::new(family, points, p),
            None => Self::minimal(family, points),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SquareFile {
            points: self.points.iter().map(|p| p.to_string()).collect(),
            pairing: Some(self.pairing.clone()),
        })
        .expect("witness serializes")
    }
}

/// Name of the relation for the entry `(u, f)`, with `u` in lexicographic
/// order and `f` read row by row.
pub fn entry_relation_name(u: &[BinStr], f: &[Vec<usize>]) -> String {
    let us: Vec<String> = u.iter().map(|s| format!("{s:?}")).collect();
    let fs: Vec<String> = f.iter().flatten().map(|c| c.to_string()).collect();
    format!("R[{}|{}]", us.concat(), fs.join(","))
}

/// Nonempty subsets of `0..n` with at most `cap` elements, in increasing
/// order of bitmask.
fn small_subsets(n: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(i: usize, n: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        go(i + 1, n, cap, cur, out);
        if cur.len() < cap {
            cur.push(i);
            go(i + 1, n, cap, cur, out);
            cur.pop();
        }
    }
    go(0, n, cap, &mut cur, &mut out);
    out
}

type RelMap = BTreeMap<String, (usize, Vec<Vec<usize>>)>;

fn build(universe: usize, limits: ModelLimits, rels: RelMap) -> Result<FiniteModel> {
    let mut m = FiniteModel::with_limits(universe, limits)?;
    for (name, (arity, mut tuples)) in rels {
        tuples.sort();
        tuples.dedup();
        m.add_relation(name, arity, tuples)?;
    }
    Ok(m)
}

/// One relation per entry `(u, f)` realized by the witness below full depth.
/// A tuple of point indices belongs to it when the points extend `u` in
/// lexicographic order and the pairing agrees with `f`. Entries wider than
/// `limits.max_arity` are left out: each is the conjunction of its one- and
/// two-point subentries, so it never changes an atomic type.
pub fn induced_model_from_square(
    family: &TreeFamily,
    witness: &SquareWitness,
    limits: ModelLimits,
) -> Result<FiniteModel> {
    let pts = &witness.points;
    let mut rels: RelMap = BTreeMap::new();
    for n in 0..family.depth() {
        for s in small_subsets(pts.len(), limits.max_arity) {
            let mut s = s;
            s.sort_by_key(|&i| pts[i].prefix(n));
            let u: Vec<BinStr> = s.iter().map(|&i| pts[i].prefix(n)).collect();
            if u.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let f: Vec<Vec<usize>> =
                s.iter().map(|&i| s.iter().map(|&j| witness.pairing[i][j]).collect()).collect();
            rels.entry(entry_relation_name(&u, &f))
                .or_insert_with(|| (s.len(), Vec::new()))
                .1
                .push(s);
        }
    }
    build(pts.len(), limits, rels)
}

/// Full-depth points with a label for every ordered pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SouslinWitness {
    points: Vec<BinStr>,
    labels: Vec<Vec<Word>>,
}

impl SouslinWitness {
    pub fn new(family: &SouslinFamily, points: Vec<BinStr>, labels: Vec<Vec<Word>>) -> Result<Self> {
        check_points(&points, family.depth())?;
        let k = points.len();
        if labels.len() != k || labels.iter().any(|r| r.len() != k) {
            return Err(Error::input(format!("labels must be a {k}x{k} matrix")));
        }
        for i in 0..k {
            for j in 0..k {
                if !family.contains(points[i], points[j], &labels[i][j]) {
                    return Err(Error::invalid(format!(
                        "triple ({}, {}, {}) is not in the tree",
                        points[i],
                        points[j],
                        word_string(&labels[i][j])
                    )));
                }
            }
        }
        Ok(SouslinWitness { points, labels })
    }

    pub fn points(&self) -> &[BinStr] {
        &self.points
    }

    pub fn labels(&self) -> &[Vec<Word>] {
        &self.labels
    }

    pub fn from_json(family: &SouslinFamily, value: serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct File {
            points: Vec<String>,
            labels: Vec<Vec<String>>,
        }
        let file: File = serde_json::from_value(value).map_err(|e| Error::input(format!("witness: {e}")))?;
        let points = file.points.iter().map(|s| BinStr::parse(s)).collect::<Result<Vec<_>>>()?;
        let labels = file
            .labels
            .iter()
            .map(|r| r.iter().map(|s| parse_word(s, family.kappa())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(family, points, labels)
    }
}

/// Unary `Q[a|l]` for points extending `a` whose own label extends `l`, and
/// binary `R[a|b|l]` for pairs extending `(a, b)` with label extending `l`,
/// for every prefix length below full depth.
pub fn induced_model_souslin(family: &SouslinFamily, witness: &SouslinWitness) -> Result<FiniteModel> {
    let pts = &witness.points;
    let mut rels: RelMap = BTreeMap::new();
    for l in 0..family.depth() {
        for (i, p) in pts.iter().enumerate() {
            let name = format!("Q[{:?}|{}]", p.prefix(l), word_string(&witness.labels[i][i][..l]));
            rels.entry(name).or_insert_with(|| (1, Vec::new())).1.push(vec![i]);
            for (j, q) in pts.iter().enumerate() {
                let name = format!(
                    "R[{:?}|{:?}|{}]",
                    p.prefix(l),
                    q.prefix(l),
                    word_string(&witness.labels[i][j][..l])
                );
                rels.entry(name).or_insert_with(|| (2, Vec::new())).1.push(vec![i, j]);
            }
        }
    }
    build(pts.len(), ModelLimits::default(), rels)
}

/// Left points become `0..left.len()`, right points follow. The color of a
/// cross pair is the least tree containing it; each side gets a prefix
/// predicate per realized prefix below full depth.
pub fn induced_twosorted_from_rectangle(
    trees: &[RectTree],
    left: &[Word],
    right: &[Word],
) -> Result<TwoSortedModel> {
    let Some(first) = trees.first() else {
        return Err(Error::input("at least one tree is required"));
    };
    let depth = first.depth();
    if trees.iter().any(|t| t.depth() != depth) {
        return Err(Error::input("trees must share one depth"));
    }
    for (name, side) in [("left", left), ("right", right)] {
        if side.is_empty() {
            return Err(Error::input(format!("{name} side is empty")));
        }
        for (i, w) in side.iter().enumerate() {
            if w.len() != depth {
                return Err(Error::input(format!("{name} point {} does not have length {depth}", word_string(w))));
            }
            if side[..i].contains(w) {
                return Err(Error::input(format!("{name} point {} is repeated", word_string(w))));
            }
        }
    }
    let n1 = left.len();
    let mut colors = vec![vec![0; right.len()]; n1];
    for (i, a) in left.iter().enumerate() {
        for (j, b) in right.iter().enumerate() {
            colors[i][j] = trees.iter().position(|t| t.contains(a, b)).ok_or_else(|| {
                Error::invalid(format!("pair ({}, {}) is in no tree", word_string(a), word_string(b)))
            })?;
        }
    }
    let mut rels: RelMap = BTreeMap::new();
    for l in 0..depth {
        for (i, a) in left.iter().enumerate() {
            let name = format!("L[{}]", word_string(&a[..l]));
            rels.entry(name).or_insert_with(|| (1, Vec::new())).1.push(vec![i]);
        }
        for (j, b) in right.iter().enumerate() {
            let name = format!("R[{}]", word_string(&b[..l]));
            rels.entry(name).or_insert_with(|| (1, Vec::new())).1.push(vec![n1 + j]);
        }
    }
    let base = build(n1 + right.len(), ModelLimits::default(), rels)?;
    TwoSortedModel::new(
        base,
        (0..n1).collect(),
        (n1..n1 + right.len()).collect(),
        colors,
        Some(trees.len()),
        None,
    )
}

/// One symmetric binary relation `F{c}` per used color, on distinct pairs.
pub fn coloring_to_model(coloring: &PairColoring) -> FiniteModel {
    let n = coloring.size();
    let mut rels: RelMap = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let c = coloring.color(a, b);
                rels.entry(format!("F{c}")).or_insert_with(|| (2, Vec::new())).1.push(vec![a, b]);
            }
        }
    }
    build(n, ModelLimits::default(), rels).expect("coloring relations are well formed")
}
