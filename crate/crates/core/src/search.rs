//! Exhaustive searches over truncated families: largest squares and
//! rectangles, staged extraction of a splitting square from a witness, the
//! closed-set boost, and free sets for finite functions.
//!
//! Every search walks its candidates in lexicographic order and keeps the
//! first optimum it meets, so results do not depend on anything but the
//! input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::encode::{induced_model_from_square, SquareWitness};
use crate::error::{Error, Result};
use crate::rank::{rank_table, RankParams, RankTable};
use crate::structure::ModelLimits;
use crate::tree::{all_words, BinStr, RectTree, TreeFamily, Word};

/// Searches over leaves refuse instances with more leaves than this.
pub const MAX_SEARCH_LEAVES: usize = 4096;

/// Combinations examined by one refinement step of the extraction before it
/// gives up.
pub const MAX_REFINEMENTS: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(i * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }
}

fn check_leaf_count(count: usize) -> Result<()> {
    if count > MAX_SEARCH_LEAVES {
        return Err(Error::TooLarge(format!(
            "{count} leaves; exhaustive search is limited to {MAX_SEARCH_LEAVES}"
        )));
    }
    Ok(())
}

fn leaf_strings(depth: usize) -> Result<Vec<BinStr>> {
    if depth >= usize::BITS as usize || (1usize << depth) > MAX_SEARCH_LEAVES {
        return Err(Error::TooLarge(format!(
            "depth {depth} has more than {MAX_SEARCH_LEAVES} leaves"
        )));
    }
    let mut leaves = BinStr::all(depth);
    leaves.sort();
    Ok(leaves)
}

/// Ordered leaf pairs lying in at least one tree of the family, as rows of a
/// bit matrix over the sorted leaves.
fn family_rows(family: &TreeFamily, leaves: &[BinStr]) -> Vec<Bits> {
    let mut rows = vec![Bits::new(leaves.len()); leaves.len()];
    let depth = family.depth();
    for tree in family.trees() {
        for &(a, b) in tree.iter() {
            if a.len() == depth {
                let i = leaves.binary_search(&a).expect("leaf");
                let j = leaves.binary_search(&b).expect("leaf");
                rows[i].set(j);
            }
        }
    }
    rows
}

/// A largest square found in a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareSearch {
    /// `None` when no tree holds a diagonal leaf pair.
    pub witness: Option<SquareWitness>,
    /// The search stopped at the size cap, so larger squares may exist.
    pub partial: bool,
}

impl SquareSearch {
    pub fn size(&self) -> usize {
        self.witness.as_ref().map_or(0, |w| w.len())
    }
}

fn clique(adj: &[Bits], cur: &mut Vec<usize>, cand: Bits, best: &mut Vec<usize>, cap: usize, stop: &mut bool) {
    if cur.len() > best.len() {
        *best = cur.clone();
        if best.len() >= cap {
            *stop = true;
            return;
        }
    }
    let mut cand = cand;
    while let Some(v) = cand.first() {
        if *stop || cur.len() + cand.count() <= best.len() {
            return;
        }
        cand.clear(v);
        let next = cand.and(&adj[v]);
        cur.push(v);
        clique(adj, cur, next, best, cap, stop);
        cur.pop();
    }
}

/// Largest set `A` of full-depth strings with every pair of `A x A` in some
/// tree; among those of the largest size, the lexicographically least. Pairs
/// are assigned their least tree. With `size_cap` the search stops at the
/// first square of that size and flags the result as partial.
pub fn find_max_square(family: &TreeFamily, size_cap: Option<usize>) -> Result<SquareSearch> {
    let leaves = leaf_strings(family.depth())?;
    let rows = family_rows(family, &leaves);
    let n = leaves.len();
    let mut cand = Bits::new(n);
    for (i, row) in rows.iter().enumerate() {
        if row.get(i) {
            cand.set(i);
        }
    }
    let adj: Vec<Bits> = (0..n)
        .map(|i| {
            let mut b = Bits::new(n);
            for j in rows[i].ones() {
                if j != i && rows[j].get(i) && cand.get(j) {
                    b.set(j);
                }
            }
            b
        })
        .collect();
    let cap = size_cap.unwrap_or(usize::MAX);
    let mut best = Vec::new();
    let mut stop = false;
    if cap > 0 {
        clique(&adj, &mut Vec::new(), cand, &mut best, cap, &mut stop);
    } else {
        stop = true;
    }
    let witness = if best.is_empty() {
        None
    } else {
        Some(SquareWitness::minimal(family, best.iter().map(|&i| leaves[i]).collect())?)
    };
    Ok(SquareSearch { witness, partial: stop })
}

/// A largest rectangle: every pair of `left x right` is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RectangleSearch {
    pub left: Vec<Word>,
    pub right: Vec<Word>,
    /// The search stopped once both sides reached the cap.
    pub partial: bool,
}

impl RectangleSearch {
    pub fn sizes(&self) -> (usize, usize) {
        (self.left.len(), self.right.len())
    }
}

type Score = (usize, usize);

struct Biclique<'a> {
    rows: &'a [Bits],
    cands: Vec<usize>,
    cap: usize,
    best: (Score, Vec<usize>, Bits),
    stop: bool,
}

impl Biclique<'_> {
    fn go(&mut self, pos: usize, a: &mut Vec<usize>, b: &Bits) {
        if !a.is_empty() {
            let bc = b.count();
            let score = (a.len().min(bc), a.len() + bc);
            if score > self.best.0 {
                self.best = (score, a.clone(), b.clone());
                if score.0 >= self.cap {
                    self.stop = true;
                    return;
                }
            }
        }
        let bc = b.count();
        for i in pos..self.cands.len() {
            if self.stop {
                return;
            }
            let r = self.cands.len() - i;
            let bound = ((a.len() + r).min(bc), a.len() + r + bc);
            if bound <= self.best.0 {
                return;
            }
            let nb = b.and(&self.rows[self.cands[i]]);
            if nb.count() == 0 {
                continue;
            }
            a.push(self.cands[i]);
            self.go(i + 1, a, &nb);
            a.pop();
        }
    }
}

/// `rows[i]` lists the right leaves allowed with left leaf `i`. Maximizes
/// the smaller side, then the total, then takes the least left side.
fn max_biclique(right_count: usize, rows: &[Bits], cap: Option<usize>) -> (Vec<usize>, Vec<usize>, bool) {
    let cands: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].count() > 0).collect();
    let mut all = Bits::new(right_count);
    for i in 0..right_count {
        all.set(i);
    }
    let mut s = Biclique {
        rows,
        cands,
        cap: cap.unwrap_or(usize::MAX),
        best: ((0, 0), Vec::new(), Bits::new(right_count)),
        stop: false,
    };
    if s.cap == 0 {
        return (Vec::new(), Vec::new(), true);
    }
    s.go(0, &mut Vec::new(), &all);
    let (_, left, right) = s.best;
    (left, right.ones(), s.stop)
}

/// Largest rectangle inside the leaf pairs of a tree. `cap` stops the search
/// once both sides have that many points.
pub fn find_max_rectangle(tree: &RectTree, cap: Option<usize>) -> Result<RectangleSearch> {
    let depth = tree.depth();
    let count = (tree.branching() as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
    check_leaf_count(count.min(usize::MAX as u128) as usize)?;
    let words = all_words(depth, tree.branching());
    let mut rows = vec![Bits::new(words.len()); words.len()];
    for (a, b) in tree.pairs() {
        if a.len() == depth {
            let i = words.binary_search(a).expect("leaf");
            let j = words.binary_search(b).expect("leaf");
            rows[i].set(j);
        }
    }
    let (l, r, partial) = max_biclique(words.len(), &rows, cap);
    Ok(RectangleSearch {
        left: l.into_iter().map(|i| words[i].clone()).collect(),
        right: r.into_iter().map(|i| words[i].clone()).collect(),
        partial,
    })
}

/// Largest rectangle inside the union of the trees of a family. Strings are
/// reported as words over `{0, 1}`.
pub fn find_max_rectangle_family(family: &TreeFamily, cap: Option<usize>) -> Result<RectangleSearch> {
    let leaves = leaf_strings(family.depth())?;
    let rows = family_rows(family, &leaves);
    let (l, r, partial) = max_biclique(leaves.len(), &rows, cap);
    let word = |s: BinStr| -> Word { (0..s.len()).map(|i| s.bit(i) as u8).collect() };
    Ok(RectangleSearch {
        left: l.into_iter().map(|i| word(leaves[i])).collect(),
        right: r.into_iter().map(|i| word(leaves[i])).collect(),
        partial,
    })
}

/// One approximation of the extraction: distinct strings of one level and a
/// tree index for every ordered pair. The index is `None` only at the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Approximation {
    pub level: usize,
    pub nodes: Vec<BinStr>,
    pub index: Vec<Vec<Option<usize>>>,
    /// Witness points realizing the approximation, one per node.
    pub realizer: Vec<usize>,
    /// Distinct witness subsets that realize it.
    pub certifications: usize,
}

/// Approximations where each refines the previous one by splitting every
/// node in two. Nodes `2l` and `2l + 1` of a step extend node `l` of the
/// step before.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApproxChain {
    pub steps: Vec<Approximation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainMode {
    /// A refinement counts the witness subsets that realize it.
    Witness,
    /// Only subsets of rank at least 0 in the induced model count.
    Rank(RankParams),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainFailure {
    /// Index of the approximation that could not be refined.
    pub stage: usize,
    /// The first node whose split cannot be certified together with the
    /// nodes before it.
    pub node: BinStr,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ChainOutcome {
    Chain(ApproxChain),
    Failure(ChainFailure),
}

type Key = (Vec<BinStr>, Vec<Vec<usize>>);

struct Refiner<'a> {
    witness: &'a SquareWitness,
    ranks: Option<RankTable>,
    combos: usize,
}

impl Refiner<'_> {
    fn g(&self, p: usize, q: usize) -> usize {
        self.witness.pairing()[p][q]
    }

    /// Realizing subsets of the split of the first `parents` nodes of `prev`
    /// at level `m`, tallied by the resulting approximation.
    fn tally(&mut self, prev: &Approximation, parents: usize, m: usize) -> Result<BTreeMap<Key, (usize, Vec<usize>)>> {
        let pts = self.witness.points();
        let mut options: Vec<Vec<(usize, usize)>> = Vec::new();
        for l in 0..parents {
            let node = prev.nodes[l];
            let mut below: Vec<usize> = (0..pts.len()).filter(|&p| node.is_prefix_of(pts[p])).collect();
            below.sort_by_key(|&p| pts[p]);
            let diag = prev.index[l][l];
            let mut opts = Vec::new();
            for (x, &p) in below.iter().enumerate() {
                for &q in &below[x + 1..] {
                    if pts[p].prefix(m) == pts[q].prefix(m) {
                        continue;
                    }
                    if let Some(t) = diag {
                        if self.g(p, p) != t || self.g(q, q) != t {
                            continue;
                        }
                    }
                    opts.push((p, q));
                }
            }
            options.push(opts);
        }
        let mut out = BTreeMap::new();
        self.combine(prev, &options, m, &mut Vec::new(), &mut out)?;
        Ok(out)
    }

    fn combine(
        &mut self,
        prev: &Approximation,
        options: &[Vec<(usize, usize)>],
        m: usize,
        chosen: &mut Vec<(usize, usize)>,
        out: &mut BTreeMap<Key, (usize, Vec<usize>)>,
    ) -> Result<()> {
        let l = chosen.len();
        if l == options.len() {
            self.combos += 1;
            if self.combos > MAX_REFINEMENTS {
                return Err(Error::TooLarge(format!(
                    "a refinement step examined more than {MAX_REFINEMENTS} point combinations"
                )));
            }
            let realizer: Vec<usize> = chosen.iter().flat_map(|&(p, q)| [p, q]).collect();
            if let Some(table) = &self.ranks {
                if table.value(&realizer)? < 0 {
                    return Ok(());
                }
            }
            let pts = self.witness.points();
            let nodes = realizer.iter().map(|&p| pts[p].prefix(m)).collect();
            let index = realizer.iter().map(|&p| realizer.iter().map(|&q| self.g(p, q)).collect()).collect();
            let e = out.entry((nodes, index)).or_insert((0, realizer));
            e.0 += 1;
            return Ok(());
        }
        for &(p, q) in &options[l] {
            let coherent = chosen.iter().enumerate().all(|(j, &(a, b))| {
                [p, q].iter().all(|&x| {
                    [a, b].iter().all(|&y| {
                        prev.index[l][j] == Some(self.g(x, y)) && prev.index[j][l] == Some(self.g(y, x))
                    })
                })
            });
            if coherent {
                chosen.push((p, q));
                self.combine(prev, options, m, chosen, out)?;
                chosen.pop();
            }
        }
        Ok(())
    }

    /// The least refinement at the least level with at least `quota`
    /// certifications.
    fn refine(&mut self, prev: &Approximation, parents: usize, depth: usize, quota: usize) -> Result<Option<Approximation>> {
        for m in prev.level + 1..=depth {
            self.combos = 0;
            let tally = self.tally(prev, parents, m)?;
            if let Some(((nodes, index), (count, realizer))) = tally.into_iter().find(|(_, v)| v.0 >= quota) {
                return Ok(Some(Approximation {
                    level: m,
                    nodes,
                    index: index.into_iter().map(|r| r.into_iter().map(Some).collect()).collect(),
                    realizer,
                    certifications: count,
                }));
            }
        }
        Ok(None)
    }
}

/// Builds `target_depth + 1` approximations from the root `({<>}, <> -> none)`,
/// doubling the node set at each step. A refinement is accepted when at least
/// `quota` distinct witness subsets realize it: their points split the nodes
/// two by two at the new level, pairs of points under different nodes keep
/// the index of their nodes, and points under a node keep its diagonal index.
/// Among acceptable refinements the least level is used, then the least
/// `(nodes, index)`.
pub fn extract_square_chain(
    family: &TreeFamily,
    witness: &SquareWitness,
    target_depth: usize,
    quota: usize,
    mode: ChainMode,
) -> Result<ChainOutcome> {
    let depth = family.depth();
    if target_depth > depth {
        return Err(Error::input(format!(
            "{target_depth} refinements need at least that many levels; the family has {depth}"
        )));
    }
    if quota == 0 {
        return Err(Error::input("quota must be at least 1"));
    }
    if witness.points().iter().any(|p| p.len() != depth) {
        return Err(Error::input(format!("witness points must have length {depth}")));
    }
    let ranks = match mode {
        ChainMode::Witness => None,
        ChainMode::Rank(params) => {
            let limits = ModelLimits { max_arity: 2 };
            Some(rank_table(&induced_model_from_square(family, witness, limits)?, &params)?)
        }
    };
    let mut refiner = Refiner {
        witness,
        ranks,
        combos: 0,
    };
    let first = (0..witness.len())
        .find(|&p| refiner.ranks.as_ref().is_none_or(|t| t.value(&[p]).is_ok_and(|v| v >= 0)));
    let root = Approximation {
        level: 0,
        nodes: vec![BinStr::EMPTY],
        index: vec![vec![None]],
        realizer: first.into_iter().collect(),
        certifications: match &refiner.ranks {
            None => witness.len(),
            Some(t) => (0..witness.len()).filter(|&p| t.value(&[p]).is_ok_and(|v| v >= 0)).count(),
        },
    };
    if root.certifications < quota {
        return Ok(ChainOutcome::Failure(ChainFailure {
            stage: 0,
            node: BinStr::EMPTY,
            reason: format!("only {} of the required {quota} points certify the root", root.certifications),
        }));
    }
    let mut steps = vec![root];
    for stage in 0..target_depth {
        let prev = steps.last().expect("root");
        let k = prev.nodes.len();
        if let Some(next) = refiner.refine(prev, k, depth, quota)? {
            steps.push(next);
            continue;
        }
        let mut bottleneck = k;
        for parents in 1..k {
            if refiner.refine(prev, parents, depth, quota)?.is_none() {
                bottleneck = parents;
                break;
            }
        }
        return Ok(ChainOutcome::Failure(ChainFailure {
            stage,
            node: prev.nodes[bottleneck - 1],
            reason: format!(
                "no split of the first {bottleneck} node(s) at levels {}..={depth} has {quota} certifications",
                prev.level + 1
            ),
        }));
    }
    Ok(ChainOutcome::Chain(ApproxChain { steps }))
}

/// A full binary splitting pattern of depth `depth`: leaf `a` (an address in
/// `{0,1}^depth` read as a binary number, first bit most significant) sits at
/// `leaves[a]`, and the pair of leaves `a`, `b` lies in tree `index[a][b]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquarePattern {
    pub depth: usize,
    pub leaves: Vec<Word>,
    /// Level after each round at which the leaves so far are pairwise
    /// distinct, the least possible one.
    pub levels: Vec<usize>,
    pub index: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoostFailure {
    pub round: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BoostOutcome {
    Pattern(SquarePattern),
    Failure(BoostFailure),
}

fn split_position(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).position(|(x, y)| x != y).unwrap_or(a.len())
}

/// Grows a splitting square inside `points x points`, where the points lie in
/// the closed set of `tree`. Only rich points are used: the largest subset in
/// which every point shares each of its proper prefixes with at least
/// `threshold` members (itself included). Each round pairs every current
/// point with the rich companion that agrees with it up to the current level
/// and splits off as early as possible, least first.
pub fn closed_set_boost(tree: &RectTree, points: &[Word], rounds: usize, threshold: usize) -> Result<BoostOutcome> {
    let depth = tree.depth();
    if points.is_empty() {
        return Err(Error::input("boost needs at least one point"));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != depth || p.iter().any(|&d| d as usize >= tree.branching()) {
            return Err(Error::input(format!(
                "point {} is not a word of length {depth} over {} letters",
                crate::tree::word_string(p),
                tree.branching()
            )));
        }
        if points[..i].contains(p) {
            return Err(Error::input(format!("point {} is repeated", crate::tree::word_string(p))));
        }
    }
    for a in points {
        for b in points {
            if !tree.contains(a, b) {
                return Err(Error::invalid(format!(
                    "pair ({}, {}) is not in the tree",
                    crate::tree::word_string(a),
                    crate::tree::word_string(b)
                )));
            }
        }
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    let finish = |leaves: Vec<Word>, levels: Vec<usize>| {
        let n = leaves.len();
        BoostOutcome::Pattern(SquarePattern {
            depth: levels.len(),
            leaves,
            levels,
            index: vec![vec![0; n]; n],
        })
    };
    if rounds == 0 {
        return Ok(finish(vec![sorted[0].clone()], Vec::new()));
    }
    let mut rich = sorted;
    loop {
        let keep: Vec<Word> = rich
            .iter()
            .filter(|p| (0..depth).all(|n| rich.iter().filter(|q| q[..n] == p[..n]).count() >= threshold))
            .cloned()
            .collect();
        if keep.len() == rich.len() {
            break;
        }
        rich = keep;
    }
    if rich.is_empty() {
        return Ok(BoostOutcome::Failure(BoostFailure {
            round: 0,
            reason: format!("no point shares every prefix with {threshold} rich points"),
        }));
    }
    let mut leaves = vec![rich[0].clone()];
    let mut levels = Vec::new();
    let mut level = 0;
    for round in 0..rounds {
        if level >= depth {
            return Ok(BoostOutcome::Failure(BoostFailure {
                round,
                reason: format!("points are already split at the last level {depth}"),
            }));
        }
        let mut next = Vec::with_capacity(2 * leaves.len());
        let mut reach = level + 1;
        for p in &leaves {
            let companion = rich
                .iter()
                .filter(|q| *q != p && q[..level] == p[..level])
                .min_by_key(|q| (split_position(p, q), (*q).clone()));
            let Some(q) = companion else {
                return Ok(BoostOutcome::Failure(BoostFailure {
                    round,
                    reason: format!(
                        "{} has no rich companion agreeing up to level {level}",
                        crate::tree::word_string(p)
                    ),
                }));
            };
            reach = reach.max(split_position(p, q) + 1);
            next.push(p.clone());
            next.push(q.clone());
        }
        leaves = next;
        level = reach;
        levels.push(level);
    }
    Ok(finish(leaves, levels))
}

/// A function on `0..universe` of the given arity. `table` is indexed by the
/// arguments read as a number in base `universe`, first argument most
/// significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteFunction {
    pub arity: usize,
    pub table: Vec<usize>,
}

impl FiniteFunction {
    pub fn new(universe: usize, arity: usize, table: Vec<usize>) -> Result<Self> {
        let f = FiniteFunction { arity, table };
        f.check(universe)?;
        Ok(f)
    }

    pub fn check(&self, universe: usize) -> Result<()> {
        let want = u32::try_from(self.arity)
            .ok()
            .and_then(|a| universe.checked_pow(a))
            .ok_or_else(|| Error::TooLarge(format!("arity {} over {universe} elements", self.arity)))?;
        if self.table.len() != want {
            return Err(Error::input(format!(
                "a function of arity {} on {universe} elements needs {want} values, got {}",
                self.arity,
                self.table.len()
            )));
        }
        if let Some(v) = self.table.iter().find(|&&v| v >= universe) {
            return Err(Error::input(format!("value {v} outside 0..{universe}")));
        }
        Ok(())
    }

    pub fn apply(&self, universe: usize, args: &[usize]) -> usize {
        self.table[args.iter().fold(0, |acc, &a| acc * universe + a)]
    }
}

/// Whether adding `x` to `set` creates distinct `a_0, .., a_n` with
/// `a_n = F(a_0, .., a_{n-1})` for some function.
fn breaks(universe: usize, functions: &[FiniteFunction], set: &[usize], x: usize) -> bool {
    let mut pool = set.to_vec();
    pool.push(x);
    fn go(
        universe: usize,
        f: &FiniteFunction,
        pool: &[usize],
        x: usize,
        tuple: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if tuple.len() == f.arity + 1 {
            let last = tuple[f.arity];
            return tuple.contains(&x) && f.apply(universe, &tuple[..f.arity]) == last;
        }
        for i in 0..pool.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            tuple.push(pool[i]);
            let hit = go(universe, f, pool, x, tuple, used);
            tuple.pop();
            used[i] = false;
            if hit {
                return true;
            }
        }
        false
    }
    functions.iter().any(|f| {
        f.arity < pool.len() && go(universe, f, &pool, x, &mut Vec::new(), &mut vec![false; pool.len()])
    })
}

/// The lexicographically least `target`-element subset of `0..universe` free
/// for every function: no distinct `a_0, .., a_n` in it have
/// `a_n = F(a_0, .., a_{n-1})`. `None` when there is no such set.
pub fn find_free_set(universe: usize, functions: &[FiniteFunction], target: usize) -> Result<Option<Vec<usize>>> {
    for f in functions {
        f.check(universe)?;
    }
    if target > universe {
        return Ok(None);
    }
    fn go(universe: usize, fs: &[FiniteFunction], target: usize, start: usize, cur: &mut Vec<usize>) -> bool {
        if cur.len() == target {
            return true;
        }
        for x in start..universe {
            if cur.len() + (universe - x) < target {
                return false;
            }
            if breaks(universe, fs, cur, x) {
                continue;
            }
            cur.push(x);
            if go(universe, fs, target, x + 1, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::new();
    Ok(go(universe, functions, target, 0, &mut cur).then_some(cur))
}
