//! The rank `rk^l(w, M; <k)` of finite element sets, the model rank, and the
//! witness expansion of a model.
//!
//! `φ` in the successor step is the complete atomic type of the increasing
//! enumeration of `w`. Over a finite relational model this is the strongest
//! quantifier-free formula true of the tuple, and every witness condition is
//! monotone in `φ` (a stronger formula admits fewer witnesses, a weaker one
//! more), so the strongest choice is the one that decides the rank.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::structure::{ClosureThreshold, FiniteModel};

/// Largest universe for which full rank tables are built.
pub const MAX_RANK_UNIVERSE: usize = 16;

/// Parameters of the rank.
///
/// `variant` is `l`. Variants 0 and 1 ignore `witnesses`. Variants 2 and 3
/// ask for `witnesses` (`t`) copies that are pairwise of high rank. The
/// experimental variants 4 and 5 relax this: with `classes = s`, every way of
/// splitting the `t` copies into fewer than `s` classes must put some high
/// rank pair inside one class. Variant 4 pins copy 0 to the tuple itself, as
/// variant 2 does; variant 5 does not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankParams {
    pub variant: u8,
    pub closure: ClosureThreshold,
    pub witnesses: usize,
    pub classes: usize,
}

impl RankParams {
    pub fn new(variant: u8, closure: ClosureThreshold) -> Result<Self> {
        let p = RankParams {
            variant,
            closure,
            witnesses: 2,
            classes: 2,
        };
        if variant > 3 {
            return Err(Error::input(
                "variants 4 and 5 are experimental; build them with RankParams::partition",
            ));
        }
        p.validate()?;
        Ok(p)
    }

    pub fn with_witnesses(mut self, t: usize) -> Result<Self> {
        self.witnesses = t;
        self.validate()?;
        Ok(self)
    }

    /// The experimental partition variants 4 and 5.
    pub fn partition(variant: u8, closure: ClosureThreshold, t: usize, s: usize) -> Result<Self> {
        if variant != 4 && variant != 5 {
            return Err(Error::input("partition variants are 4 and 5"));
        }
        let p = RankParams {
            variant,
            closure,
            witnesses: t,
            classes: s,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.variant > 5 {
            return Err(Error::input(format!("unknown variant {}", self.variant)));
        }
        if self.witnesses < 2 {
            return Err(Error::input("witness count must be at least 2"));
        }
        if self.variant >= 4 && self.classes < 2 {
            return Err(Error::input("class bound must be at least 2"));
        }
        ClosureThreshold::new(self.closure.k())?;
        Ok(())
    }
}

/// Rank of every nonempty subset of the universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTable {
    universe: usize,
    values: Vec<i8>,
    model_rank: i32,
}

const UNSET: i8 = i8::MIN;

impl RankTable {
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn model_rank(&self) -> i32 {
        self.model_rank
    }

    /// Rank of the set whose bitmask is `mask`.
    pub fn value_mask(&self, mask: u64) -> i32 {
        assert!(mask != 0 && (mask as usize) < self.values.len(), "mask out of range");
        self.values[mask as usize] as i32
    }

    pub fn value(&self, w: &[usize]) -> Result<i32> {
        Ok(self.value_mask(set_mask(self.universe, w)?))
    }

    /// `(set, value)` for every nonempty set, ordered by bitmask.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, i32)> + '_ {
        (1..self.values.len() as u64).map(|m| (members(m), self.values[m as usize] as i32))
    }
}

pub(crate) fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

pub(crate) fn set_mask(universe: usize, w: &[usize]) -> Result<u64> {
    if w.is_empty() {
        return Err(Error::input("set must be nonempty"));
    }
    let mut m = 0u64;
    for &a in w {
        if a >= universe {
            return Err(Error::input(format!("element {a} outside universe of size {universe}")));
        }
        m |= 1 << a;
    }
    Ok(m)
}

fn check_size(model: &FiniteModel) -> Result<()> {
    if model.universe() > MAX_RANK_UNIVERSE {
        return Err(Error::TooLarge(format!(
            "rank tables are limited to universes of at most {MAX_RANK_UNIVERSE} elements"
        )));
    }
    Ok(())
}

pub fn rank_table(model: &FiniteModel, params: &RankParams) -> Result<RankTable> {
    params.validate()?;
    check_size(model)?;
    let values = compute(model, params, 0);
    let model_rank = values[1..].iter().map(|&v| v as i32 + 1).max().unwrap_or(0).max(0);
    Ok(RankTable {
        universe: model.universe(),
        values,
        model_rank,
    })
}

/// Rank of one set. Variant 0 witnesses only enlarge `w`, so for it just the
/// supersets of `w` are evaluated; the other variants replace an element and
/// need the whole table.
pub fn rank_of_set(model: &FiniteModel, w: &[usize], params: &RankParams) -> Result<i32> {
    params.validate()?;
    check_size(model)?;
    let mask = set_mask(model.universe(), w)?;
    let floor = if params.variant == 0 { mask } else { 0 };
    Ok(compute(model, params, floor)[mask as usize] as i32)
}

pub fn model_rank(model: &FiniteModel, params: &RankParams) -> Result<i32> {
    Ok(rank_table(model, params)?.model_rank)
}

/// Whether the model rank is at least `alpha`.
pub fn pr_check(model: &FiniteModel, params: &RankParams, alpha: i32) -> Result<bool> {
    Ok(model_rank(model, params)? >= alpha)
}

/// Fills the table for every nonempty superset of `floor`, largest sets first.
fn compute(model: &FiniteModel, params: &RankParams, floor: u64) -> Vec<i8> {
    let n = model.universe();
    let full = (1u64 << n) - 1;
    let mut values = vec![UNSET; 1 << n];
    let mut layers: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    for mask in 1..=full {
        if mask & floor == floor {
            layers[mask.count_ones() as usize].push(mask);
        }
    }
    for layer in layers.iter().rev() {
        let computed: Vec<i8> = layer
            .par_iter()
            .map(|&mask| eval(model, params, &values, mask))
            .collect();
        for (&mask, v) in layer.iter().zip(computed) {
            values[mask as usize] = v;
        }
    }
    values
}

fn eval(model: &FiniteModel, params: &RankParams, vals: &[i8], mask: u64) -> i8 {
    let elems = members(mask);
    let k = params.closure.k();
    let mut rest = Vec::with_capacity(elems.len());
    for (i, &a) in elems.iter().enumerate() {
        rest.clear();
        rest.extend(elems.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
        if model.orbit_unchecked(a, &rest) < k {
            return -1;
        }
    }
    let ty = model.type_of(&elems);
    let val = |m: u64| vals[m as usize] as i32;
    let realizations = match params.variant {
        1 | 3 | 5 => Some(realizations(model, &elems)),
        _ => None,
    };
    let mut least = i32::MAX;
    for pos in 0..elems.len() {
        let ak = elems[pos];
        let best = match params.variant {
            0 | 2 | 4 => {
                let mut tuple = elems.clone();
                let subs: Vec<usize> = (0..model.universe())
                    .filter(|&x| mask >> x & 1 == 0)
                    .filter(|&x| {
                        tuple[pos] = x;
                        model.type_of(&tuple) == ty
                    })
                    .collect();
                if params.variant == 0 {
                    subs.iter().map(|&x| val(mask | 1 << x)).max()
                } else {
                    let base = mask & !(1 << ak);
                    let mut values = vec![ak];
                    values.extend(subs);
                    best_family(&values, Some(ak), params, |y, z| val(base | 1 << y | 1 << z))
                }
            }
            _ => {
                let groups = group_at(realizations.as_ref().expect("computed above"), pos);
                let mut best: Option<i32> = None;
                for (common, values) in &groups {
                    let base: u64 = common.iter().map(|&x| 1u64 << x).fold(0, |a, b| a | b);
                    let score = if params.variant == 1 {
                        pairs(values).map(|(y, z)| val(base | 1 << y | 1 << z)).max()
                    } else {
                        best_family(values, None, params, |y, z| val(base | 1 << y | 1 << z))
                    };
                    best = best.max(score);
                }
                best
            }
        };
        match best {
            Some(b) if b >= 0 => least = least.min(b),
            _ => return 0,
        }
    }
    (least + 1) as i8
}

fn pairs(values: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    values
        .iter()
        .enumerate()
        .flat_map(move |(i, &y)| values[i + 1..].iter().map(move |&z| (y, z)))
}

/// All injective tuples with the same atomic type as `elems`.
pub(crate) fn realizations(model: &FiniteModel, elems: &[usize]) -> Vec<Vec<usize>> {
    let prefix_types: Vec<_> = (0..=elems.len()).map(|j| model.type_of(&elems[..j])).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(elems.len());
    fn go(
        model: &FiniteModel,
        prefix_types: &[crate::structure::AtomicType],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() + 1 == prefix_types.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..model.universe() {
            if cur.contains(&x) {
                continue;
            }
            cur.push(x);
            if model.type_of(cur) == prefix_types[cur.len()] {
                go(model, prefix_types, cur, out);
            }
            cur.pop();
        }
    }
    go(model, &prefix_types, &mut cur, &mut out);
    out
}

/// Groups realizations by everything except position `pos`. Each group lists
/// the values seen at `pos`.
pub(crate) fn group_at(reals: &[Vec<usize>], pos: usize) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for r in reals {
        let mut key = r.clone();
        let y = key.remove(pos);
        groups.entry(key).or_default().push(y);
    }
    groups.retain(|_, v| v.len() >= 2);
    groups
}

/// Best score over `t`-subsets of `values` (containing `pinned` if given).
///
/// For variants 2 and 3 the score of a subset is its weakest pair. For the
/// partition variants it is the largest `β` such that the graph of pairs with
/// value at least `β` needs `s` or more colors.
fn best_family(
    values: &[usize],
    pinned: Option<usize>,
    params: &RankParams,
    pair_val: impl Fn(usize, usize) -> i32,
) -> Option<i32> {
    let t = params.witnesses;
    if values.len() < t {
        return None;
    }
    let mut best = None;
    for_each_subset(values.len(), t, &mut |idx| {
        let chosen: Vec<usize> = idx.iter().map(|&i| values[i]).collect();
        if let Some(p) = pinned {
            if !chosen.contains(&p) {
                return;
            }
        }
        let mut pv = vec![vec![0i32; t]; t];
        for i in 0..t {
            for j in i + 1..t {
                let v = pair_val(chosen[i], chosen[j]);
                pv[i][j] = v;
                pv[j][i] = v;
            }
        }
        let score = if params.variant >= 4 {
            partition_score(&pv, params.classes)
        } else {
            (0..t)
                .flat_map(|i| (i + 1..t).map(move |j| (i, j)))
                .map(|(i, j)| pv[i][j])
                .min()
        };
        best = best.max(score);
    });
    best
}

fn partition_score(pv: &[Vec<i32>], s: usize) -> Option<i32> {
    let t = pv.len();
    let mut levels: Vec<i32> = pv
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row[i + 1..].iter().copied())
        .collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    for beta in levels {
        let adj: Vec<Vec<bool>> = (0..t)
            .map(|i| (0..t).map(|j| i != j && pv[i][j] >= beta).collect())
            .collect();
        if !colorable(&adj, s - 1) {
            return Some(beta);
        }
    }
    None
}

/// Whether the graph has a proper coloring with `colors` colors.
pub(crate) fn colorable(adj: &[Vec<bool>], colors: usize) -> bool {
    fn go(adj: &[Vec<bool>], colors: usize, assign: &mut Vec<usize>) -> bool {
        let v = assign.len();
        if v == adj.len() {
            return true;
        }
        // symmetry: a new vertex never needs a color index beyond the ones in use plus one
        let used = assign.iter().map(|&c| c + 1).max().unwrap_or(0);
        for c in 0..colors.min(used + 1) {
            if (0..v).all(|u| !adj[v][u] || assign[u] != c) {
                assign.push(c);
                if go(adj, colors, assign) {
                    return true;
                }
                assign.pop();
            }
        }
        false
    }
    go(adj, colors, &mut Vec::new())
}

pub(crate) fn for_each_subset(n: usize, t: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, t: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == t {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < t - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, t, cur, f);
            cur.pop();
        }
    }
    go(0, n, t, &mut Vec::new(), f);
}

/// Expands `model` by the rank relations that pin down its variant-0 ranks.
///
/// For every rank `β ≥ 0` that occurs, `rk[n=.., b=β]` holds of the injective
/// `n`-tuples whose set has rank `β`. For every realized atomic type `p` of
/// an injective `n`-tuple and position `k`, `rk[n=.., k=.., b=β, p=..]` holds
/// of the tuples of type `p` and rank `β` that admit no replacement at `k`
/// by an outside element keeping `p` with rank at least `β`. In the expansion
/// no set gets a higher variant-1 rank than its variant-0 rank in `model`.
///
/// Only nonempty relations are added. Relations of arity above the model's
/// configured maximum are an error.
pub fn expand_witness_model(model: &FiniteModel, params: &RankParams) -> Result<FiniteModel> {
    if params.variant != 0 {
        return Err(Error::input("the witness expansion is defined for variant 0"));
    }
    let table = rank_table(model, params)?;
    let n = model.universe();
    let max = model.limits().max_arity;

    let mut tuples_by_len: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n + 1];
    let mut cur = Vec::new();
    injective_tuples(n, &mut cur, &mut tuples_by_len);

    let mut out = model.clone();
    for (len, tuples) in tuples_by_len.iter().enumerate().skip(1) {
        let mut by_rank: BTreeMap<i32, Vec<Vec<usize>>> = BTreeMap::new();
        let mut type_ids: BTreeMap<crate::structure::AtomicType, usize> = BTreeMap::new();
        let mut blocked: BTreeMap<(usize, i32, usize), Vec<Vec<usize>>> = BTreeMap::new();
        for tuple in tuples {
            let mask = tuple.iter().fold(0u64, |m, &x| m | 1 << x);
            let beta = table.value_mask(mask);
            if beta < 0 {
                continue;
            }
            by_rank.entry(beta).or_default().push(tuple.clone());
            let ty = model.type_of(tuple);
            let next = type_ids.len();
            let pid = *type_ids.entry(ty.clone()).or_insert(next);
            let mut probe = tuple.clone();
            for k in 0..len {
                let escapes = (0..n).filter(|&x| mask >> x & 1 == 0).any(|x| {
                    probe[k] = x;
                    model.type_of(&probe) == ty && table.value_mask(mask | 1 << x) >= beta
                });
                probe[k] = tuple[k];
                if !escapes {
                    blocked.entry((k, beta, pid)).or_default().push(tuple.clone());
                }
            }
        }
        if len > max && (!by_rank.is_empty() || !blocked.is_empty()) {
            return Err(Error::ArityOverflow { needed: len, max });
        }
        for (beta, ts) in by_rank {
            out.add_relation(format!("rk[n={len},b={beta}]"), len, ts)?;
        }
        for ((k, beta, pid), ts) in blocked {
            out.add_relation(format!("rk[n={len},k={k},b={beta},p={pid}]"), len, ts)?;
        }
    }
    Ok(out)
}

fn injective_tuples(n: usize, cur: &mut Vec<usize>, out: &mut [Vec<Vec<usize>>]) {
    if !cur.is_empty() {
        out[cur.len()].push(cur.clone());
    }
    if cur.len() == n {
        return;
    }
    for x in 0..n {
        if !cur.contains(&x) {
            cur.push(x);
            injective_tuples(n, cur, out);
            cur.pop();
        }
    }
}
