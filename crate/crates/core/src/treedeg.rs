//! Truncated square and rectangle degrees of tree families.
//!
//! All three degrees are splitting games on finite approximations and are
//! computed by memoized recursion over levels. Two facts keep the search
//! small, each provable by induction on the value:
//!
//! * restricting an approximation to a subset never lowers its value;
//! * pushing every node of an approximation deeper (keeping its data)
//!   never raises its value.
//!
//! So among the extensions that split a node it suffices to consider those
//! where the two copies first differ at their last position: cutting any
//! extension back to that level gives one whose value is at least as large.
//! For the same reason the family degree is decided by the root entries.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{BinStr, RectTree, SouslinFamily, TreeFamily, Word};

/// A truncated degree: `Bottom` marks entries outside the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DegValue {
    Bottom,
    Fin(i64),
}

impl fmt::Display for DegValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegValue::Bottom => f.write_str("bottom"),
            DegValue::Fin(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for DegValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DegValue::Bottom => s.serialize_str("bottom"),
            DegValue::Fin(v) => s.serialize_i64(*v),
        }
    }
}

/// An approximation `(u, g)`: equal-length strings and a tree index for each
/// ordered pair. Stored with `u` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PfapEntry {
    u: Vec<BinStr>,
    g: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    u: Vec<String>,
    g: Vec<Vec<usize>>,
}

impl PfapEntry {
    /// `g[i][j]` is the index for `(u[i], u[j])`.
    pub fn new(u: Vec<BinStr>, g: Vec<Vec<usize>>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::input("entry needs at least one string"));
        }
        let n = u[0].len();
        if u.iter().any(|s| s.len() != n) {
            return Err(Error::input("entry strings must have equal length"));
        }
        if g.len() != u.len() || g.iter().any(|row| row.len() != u.len()) {
            return Err(Error::input("entry map must be total on u x u"));
        }
        let mut order: Vec<usize> = (0..u.len()).collect();
        order.sort_by_key(|&i| u[i]);
        if order.windows(2).any(|w| u[w[0]] == u[w[1]]) {
            return Err(Error::input("entry strings must be distinct"));
        }
        Ok(PfapEntry {
            u: order.iter().map(|&i| u[i]).collect(),
            g: order.iter().map(|&i| order.iter().map(|&j| g[i][j]).collect()).collect(),
        })
    }

    /// `({<>}, g = c)`.
    pub fn root(c: usize) -> Self {
        PfapEntry {
            u: vec![BinStr::EMPTY],
            g: vec![vec![c]],
        }
    }

    pub fn u(&self) -> &[BinStr] {
        &self.u
    }

    pub fn g(&self) -> &[Vec<usize>] {
        &self.g
    }

    pub fn level(&self) -> usize {
        self.u[0].len()
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let file: EntryFile =
            serde_json::from_value(value).map_err(|e| Error::input(format!("entry: {e}")))?;
        let u = file.u.iter().map(|s| BinStr::parse(s)).collect::<Result<Vec<_>>>()?;
        Self::new(u, file.g)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(EntryFile {
            u: self.u.iter().map(|s| s.to_string()).collect(),
            g: self.g.clone(),
        })
        .expect("entry serializes")
    }

    /// The image under a tree automorphism.
    pub fn map(&self, f: &crate::tree::TreeAutomorphism) -> Self {
        Self::new(self.u.iter().map(|&s| f.apply(s)).collect(), self.g.clone())
            .expect("automorphisms keep entries well formed")
    }
}

/// Sorted strings of one level with a prefix lookup.
fn prefix_range(sorted: &[BinStr], prefix: BinStr, level: usize) -> &[BinStr] {
    let lo = prefix.concat(BinStr::zeros(level - prefix.len()));
    let start = sorted.partition_point(|s| *s < lo);
    let end = start + sorted[start..].partition_point(|s| prefix.is_prefix_of(*s));
    &sorted[start..end]
}

/// Memoized square degree of one family.
pub struct SquareSolver<'a> {
    fam: &'a TreeFamily,
    diag: Vec<Vec<Vec<BinStr>>>,
    memo: HashMap<(Vec<BinStr>, Vec<u16>), i64>,
}

impl<'a> SquareSolver<'a> {
    pub fn new(fam: &'a TreeFamily) -> Self {
        let diag = fam
            .trees()
            .iter()
            .map(|t| {
                let mut levels = vec![Vec::new(); fam.depth() + 1];
                for &(a, b) in t.iter() {
                    if a == b {
                        levels[a.len()].push(a);
                    }
                }
                for l in &mut levels {
                    l.sort();
                }
                levels
            })
            .collect();
        SquareSolver {
            fam,
            diag,
            memo: HashMap::new(),
        }
    }

    fn has(&self, t: u16, a: BinStr, b: BinStr) -> bool {
        self.fam.contains(t as usize, a, b)
    }

    pub fn degree(&mut self, entry: &PfapEntry) -> Result<DegValue> {
        if entry.level() > self.fam.depth() {
            return Err(Error::input("entry is deeper than the family"));
        }
        let k = entry.u.len();
        let mut g = Vec::with_capacity(k * k);
        for row in &entry.g {
            for &c in row {
                if c >= self.fam.num_trees() {
                    return Ok(DegValue::Bottom);
                }
                g.push(c as u16);
            }
        }
        for i in 0..k {
            for j in 0..k {
                if !self.has(g[i * k + j], entry.u[i], entry.u[j]) {
                    return Ok(DegValue::Bottom);
                }
            }
        }
        Ok(DegValue::Fin(self.value(&entry.u, &g)))
    }

    fn value(&mut self, u: &[BinStr], g: &[u16]) -> i64 {
        let depth = self.fam.depth();
        let n = u[0].len();
        if n >= depth {
            return -1;
        }
        let key = (u.to_vec(), g.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        // a child sits at level n+1 or deeper
        let upper = depth as i64 - n as i64 - 2;
        let mut least = upper;
        for r in 0..u.len() {
            let best = self.best_split(u, g, r, least);
            least = least.min(best);
            if least < -1 {
                break;
            }
        }
        let v = 1 + least.max(-2);
        self.memo.insert(key, v);
        v
    }

    /// Largest child value when splitting `u[r]`, or -2 if no split fits.
    /// Stops as soon as `cap` is reached.
    fn best_split(&mut self, u: &[BinStr], g: &[u16], r: usize, cap: i64) -> i64 {
        let depth = self.fam.depth();
        let k = u.len();
        let n = u[0].len();
        let rho = u[r];
        let grr = g[r * k + r];
        let trees = self.fam.num_trees() as u16;
        let mut best = -2;
        for p in n..depth {
            let m = p + 1;
            let diag_r = prefix_range(&self.diag[grr as usize][m], rho, m).to_vec();
            for &x0 in &diag_r {
                if x0.bit(p) {
                    continue;
                }
                let x1 = x0.prefix(p).child(true);
                if diag_r.binary_search(&x1).is_err() {
                    continue;
                }
                let c01: Vec<u16> = (0..trees).filter(|&t| self.has(t, x0, x1)).collect();
                let c10: Vec<u16> = (0..trees).filter(|&t| self.has(t, x1, x0)).collect();
                if c01.is_empty() || c10.is_empty() {
                    continue;
                }
                let mut assignments = Vec::new();
                let mut chosen = vec![BinStr::EMPTY; k];
                self.place_others(u, g, r, (x0, x1), m, 0, &mut chosen, &mut assignments);
                for ys in assignments {
                    let (child_u, slots) = child_order(&ys, r, x0, x1);
                    for &a in &c01 {
                        for &b in &c10 {
                            let child_g = child_map(g, k, &slots, a, b);
                            best = best.max(self.value(&child_u, &child_g));
                            if best >= cap {
                                return best;
                            }
                        }
                    }
                }
            }
        }
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn place_others(
        &self,
        u: &[BinStr],
        g: &[u16],
        r: usize,
        copies: (BinStr, BinStr),
        m: usize,
        i: usize,
        chosen: &mut Vec<BinStr>,
        out: &mut Vec<Vec<BinStr>>,
    ) {
        let k = u.len();
        if i == k {
            out.push(chosen.clone());
            return;
        }
        if i == r {
            return self.place_others(u, g, r, copies, m, i + 1, chosen, out);
        }
        let gii = g[i * k + i] as usize;
        for &y in prefix_range(&self.diag[gii][m], u[i], m) {
            let ok = [copies.0, copies.1]
                .iter()
                .all(|&x| self.has(g[r * k + i], x, y) && self.has(g[i * k + r], y, x))
                && (0..i)
                    .filter(|&j| j != r)
                    .all(|j| self.has(g[j * k + i], chosen[j], y) && self.has(g[i * k + j], y, chosen[j]));
            if ok {
                chosen[i] = y;
                self.place_others(u, g, r, copies, m, i + 1, chosen, out);
            }
        }
    }
}

/// Where each child string comes from: `(origin index, is the second copy)`.
type Slots = Vec<(usize, bool)>;

fn child_order(ys: &[BinStr], r: usize, x0: BinStr, x1: BinStr) -> (Vec<BinStr>, Slots) {
    let mut items: Vec<(BinStr, usize, bool)> = ys
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != r)
        .map(|(i, &y)| (y, i, false))
        .collect();
    items.push((x0, r, false));
    items.push((x1, r, true));
    items.sort();
    (
        items.iter().map(|t| t.0).collect(),
        items.iter().map(|t| (t.1, t.2)).collect(),
    )
}

fn child_map(g: &[u16], k: usize, slots: &Slots, c01: u16, c10: u16) -> Vec<u16> {
    let k2 = slots.len();
    let mut out = Vec::with_capacity(k2 * k2);
    for &(i, ci) in slots {
        for &(j, cj) in slots {
            out.push(if i == j && ci != cj {
                if ci {
                    c10
                } else {
                    c01
                }
            } else {
                g[i * k + j]
            });
        }
    }
    out
}

/// Truncated degree of one approximation.
pub fn degsq_pair(family: &TreeFamily, entry: &PfapEntry) -> Result<DegValue> {
    SquareSolver::new(family).degree(entry)
}

/// Truncated degree of the family: one more than the best root entry, and 0
/// when no tree contains the root pair.
pub fn degsq_family(family: &TreeFamily) -> DegValue {
    let mut solver = SquareSolver::new(family);
    let best = (0..family.num_trees())
        .filter_map(|c| match solver.degree(&PfapEntry::root(c)).expect("root is well formed") {
            DegValue::Fin(v) => Some(v + 1),
            DegValue::Bottom => None,
        })
        .max()
        .unwrap_or(0);
    DegValue::Fin(best.max(0))
}

/// Degrees of the truncations of a family to depths `1..=max_depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    pub values: Vec<(usize, DegValue)>,
    /// Set when the degree at `max_depth` is at least `max_depth - 1`.
    pub infinite_candidate: bool,
}

pub fn classify_growth(family: &TreeFamily, max_depth: usize) -> Result<GrowthReport> {
    if max_depth == 0 || max_depth > family.depth() {
        return Err(Error::input(format!(
            "max_depth must be in 1..={}",
            family.depth()
        )));
    }
    let values: Vec<(usize, DegValue)> = (1..=max_depth)
        .map(|d| Ok((d, degsq_family(&family.truncate(d)?))))
        .collect::<Result<_>>()?;
    let last = values.last().expect("nonempty").1;
    Ok(GrowthReport {
        infinite_candidate: last >= DegValue::Fin(max_depth as i64 - 1),
        values,
    })
}

/// An approximation `(u, f)` for a labelled tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SouslinEntry {
    u: Vec<BinStr>,
    f: Vec<Vec<Word>>,
}

impl SouslinEntry {
    pub fn new(u: Vec<BinStr>, f: Vec<Vec<Word>>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::input("entry needs at least one string"));
        }
        let n = u[0].len();
        if u.iter().any(|s| s.len() != n) {
            return Err(Error::input("entry strings must have equal length"));
        }
        if f.len() != u.len() || f.iter().any(|row| row.len() != u.len()) {
            return Err(Error::input("entry labels must be total on u x u"));
        }
        let mut order: Vec<usize> = (0..u.len()).collect();
        order.sort_by_key(|&i| u[i]);
        if order.windows(2).any(|w| u[w[0]] == u[w[1]]) {
            return Err(Error::input("entry strings must be distinct"));
        }
        Ok(SouslinEntry {
            u: order.iter().map(|&i| u[i]).collect(),
            f: order
                .iter()
                .map(|&i| order.iter().map(|&j| f[i][j].clone()).collect())
                .collect(),
        })
    }

    pub fn root() -> Self {
        SouslinEntry {
            u: vec![BinStr::EMPTY],
            f: vec![vec![Vec::new()]],
        }
    }

    pub fn u(&self) -> &[BinStr] {
        &self.u
    }

    pub fn f(&self) -> &[Vec<Word>] {
        &self.f
    }

    pub fn from_json(value: serde_json::Value, kappa: usize) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct File {
            u: Vec<String>,
            f: Vec<Vec<String>>,
        }
        let file: File = serde_json::from_value(value).map_err(|e| Error::input(format!("entry: {e}")))?;
        let u = file.u.iter().map(|s| BinStr::parse(s)).collect::<Result<Vec<_>>>()?;
        let f = file
            .f
            .iter()
            .map(|row| row.iter().map(|s| crate::tree::parse_word(s, kappa)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(u, f)
    }
}

type SouslinKey = (Vec<BinStr>, Vec<Word>);

/// Memoized degree for a labelled tree.
pub struct SouslinSolver<'a> {
    fam: &'a SouslinFamily,
    labels: HashMap<(BinStr, BinStr), Vec<Word>>,
    diag: Vec<Vec<BinStr>>,
    memo: HashMap<SouslinKey, i64>,
}

impl<'a> SouslinSolver<'a> {
    pub fn new(fam: &'a SouslinFamily) -> Self {
        let mut labels: HashMap<(BinStr, BinStr), Vec<Word>> = HashMap::new();
        let mut diag = vec![Vec::new(); fam.depth() + 1];
        for (a, b, r) in fam.triples() {
            labels.entry((*a, *b)).or_default().push(r.clone());
        }
        for (&(a, b), ls) in labels.iter_mut() {
            ls.sort();
            if a == b {
                diag[a.len()].push(a);
            }
        }
        for l in &mut diag {
            l.sort();
        }
        SouslinSolver {
            fam,
            labels,
            diag,
            memo: HashMap::new(),
        }
    }

    fn labels_over(&self, a: BinStr, b: BinStr, old: Option<&[u8]>) -> Vec<&Word> {
        match self.labels.get(&(a, b)) {
            Some(ls) => ls.iter().filter(|l| old.is_none_or(|o| l.starts_with(o))).collect(),
            None => Vec::new(),
        }
    }

    pub fn degree(&mut self, entry: &SouslinEntry) -> Result<DegValue> {
        if entry.u[0].len() > self.fam.depth() {
            return Err(Error::input("entry is deeper than the family"));
        }
        let k = entry.u.len();
        for i in 0..k {
            for j in 0..k {
                if !self.fam.contains(entry.u[i], entry.u[j], &entry.f[i][j]) {
                    return Ok(DegValue::Bottom);
                }
            }
        }
        let flat: Vec<Word> = entry.f.iter().flatten().cloned().collect();
        Ok(DegValue::Fin(self.value(&entry.u, &flat)))
    }

    fn value(&mut self, u: &[BinStr], f: &[Word]) -> i64 {
        let depth = self.fam.depth();
        let n = u[0].len();
        if n >= depth {
            return -1;
        }
        let key = (u.to_vec(), f.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let upper = depth as i64 - n as i64 - 2;
        let mut least = upper;
        for r in 0..u.len() {
            let best = self.best_split(u, f, r, least);
            least = least.min(best);
            if least < -1 {
                break;
            }
        }
        let v = 1 + least.max(-2);
        self.memo.insert(key, v);
        v
    }

    fn best_split(&mut self, u: &[BinStr], f: &[Word], r: usize, cap: i64) -> i64 {
        let depth = self.fam.depth();
        let k = u.len();
        let n = u[0].len();
        let mut best = -2;
        for p in n..depth {
            let m = p + 1;
            let diag_r = prefix_range(&self.diag[m], u[r], m).to_vec();
            for &x0 in &diag_r {
                if x0.bit(p) {
                    continue;
                }
                let x1 = x0.prefix(p).child(true);
                if diag_r.binary_search(&x1).is_err() {
                    continue;
                }
                let mut assignments = Vec::new();
                let mut chosen = vec![BinStr::EMPTY; k];
                chosen[r] = x0;
                self.place_others(u, f, r, (x0, x1), m, 0, &mut chosen, &mut assignments);
                for ys in assignments {
                    let (child_u, slots) = child_order(&ys, r, x0, x1);
                    // candidate labels per ordered pair of the child
                    let options: Vec<Vec<&Word>> = slots
                        .iter()
                        .enumerate()
                        .flat_map(|(a, &(i, ci))| {
                            let child_u = &child_u;
                            slots.iter().enumerate().map(move |(b, &(j, cj))| {
                                let copy_cross = i == j && ci != cj;
                                let old = (!copy_cross).then(|| f[i * k + j].as_slice());
                                (child_u[a], child_u[b], old)
                            })
                        })
                        .map(|(a, b, old)| self.labels_over(a, b, old))
                        .collect();
                    if options.iter().any(|o| o.is_empty()) {
                        continue;
                    }
                    let options: Vec<Vec<Word>> =
                        options.into_iter().map(|o| o.into_iter().cloned().collect()).collect();
                    let mut idx = vec![0usize; options.len()];
                    loop {
                        let child_f: Vec<Word> = idx.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
                        best = best.max(self.value(&child_u, &child_f));
                        if best >= cap {
                            return best;
                        }
                        // odometer over the label choices
                        let mut pos = 0;
                        while pos < idx.len() {
                            idx[pos] += 1;
                            if idx[pos] < options[pos].len() {
                                break;
                            }
                            idx[pos] = 0;
                            pos += 1;
                        }
                        if pos == idx.len() {
                            break;
                        }
                    }
                }
            }
        }
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn place_others(
        &self,
        u: &[BinStr],
        f: &[Word],
        r: usize,
        copies: (BinStr, BinStr),
        m: usize,
        i: usize,
        chosen: &mut Vec<BinStr>,
        out: &mut Vec<Vec<BinStr>>,
    ) {
        let k = u.len();
        if i == k {
            out.push(chosen.clone());
            return;
        }
        if i == r {
            return self.place_others(u, f, r, copies, m, i + 1, chosen, out);
        }
        for &y in prefix_range(&self.diag[m], u[i], m) {
            if self.labels_over(y, y, Some(&f[i * k + i])).is_empty() {
                continue;
            }
            let fits = |x: BinStr, j: usize| {
                !self.labels_over(x, y, Some(&f[j * k + i])).is_empty()
                    && !self.labels_over(y, x, Some(&f[i * k + j])).is_empty()
            };
            let ok = fits(copies.0, r)
                && fits(copies.1, r)
                && (0..i).filter(|&j| j != r).all(|j| fits(chosen[j], j));
            if ok {
                chosen[i] = y;
                self.place_others(u, f, r, copies, m, i + 1, chosen, out);
            }
        }
    }
}

pub fn degsq_souslin(family: &SouslinFamily, entry: &SouslinEntry) -> Result<DegValue> {
    SouslinSolver::new(family).degree(entry)
}

/// Memoized rectangle degree of one tree.
pub struct RectSolver<'a> {
    tree: &'a RectTree,
    left: Vec<Vec<Word>>,
    right: Vec<Vec<Word>>,
    permissive: bool,
    memo: HashMap<(Vec<Word>, Vec<Word>), i64>,
}

fn word_range<'a>(sorted: &'a [Word], prefix: &[u8]) -> &'a [Word] {
    let start = sorted.partition_point(|w| w.as_slice() < prefix);
    let end = start + sorted[start..].partition_point(|w| w.starts_with(prefix));
    &sorted[start..end]
}

impl<'a> RectSolver<'a> {
    /// In permissive mode the companions of the split node on its own side
    /// may split as well.
    pub fn new(tree: &'a RectTree, permissive: bool) -> Self {
        let mut left = vec![Vec::new(); tree.depth() + 1];
        let mut right = vec![Vec::new(); tree.depth() + 1];
        for (a, b) in tree.pairs() {
            left[a.len()].push(a.clone());
            right[b.len()].push(b.clone());
        }
        for l in left.iter_mut().chain(right.iter_mut()) {
            l.sort();
            l.dedup();
        }
        RectSolver {
            tree,
            left,
            right,
            permissive,
            memo: HashMap::new(),
        }
    }

    pub fn degree(&mut self, u1: &[Word], u2: &[Word]) -> Result<DegValue> {
        if u1.is_empty() || u2.is_empty() {
            return Err(Error::input("both sides must be nonempty"));
        }
        let n = u1[0].len();
        if u1.iter().chain(u2).any(|w| w.len() != n) {
            return Err(Error::input("all strings must have the same length"));
        }
        if n > self.tree.depth() {
            return Err(Error::input("strings are deeper than the tree"));
        }
        let mut s1 = u1.to_vec();
        s1.sort();
        s1.dedup();
        let mut s2 = u2.to_vec();
        s2.sort();
        s2.dedup();
        if s1.len() != u1.len() || s2.len() != u2.len() {
            return Err(Error::input("strings on one side must be distinct"));
        }
        if s1.iter().any(|a| s2.iter().any(|b| !self.tree.contains(a, b))) {
            return Ok(DegValue::Bottom);
        }
        Ok(DegValue::Fin(self.value(&s1, &s2)))
    }

    fn value(&mut self, u1: &[Word], u2: &[Word]) -> i64 {
        let depth = self.tree.depth();
        let n = u1[0].len();
        if n >= depth {
            return -1;
        }
        let key = (u1.to_vec(), u2.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let upper = depth as i64 - n as i64 - 2;
        let mut least = upper;
        'sides: for side in 0..2 {
            let len = if side == 0 { u1.len() } else { u2.len() };
            for r in 0..len {
                let best = self.best_split(u1, u2, side, r, least);
                least = least.min(best);
                if least < -1 {
                    break 'sides;
                }
            }
        }
        let v = 1 + least.max(-2);
        self.memo.insert(key, v);
        v
    }

    fn best_split(&mut self, u1: &[Word], u2: &[Word], side: usize, r: usize, cap: i64) -> i64 {
        let depth = self.tree.depth();
        let b = self.tree.branching() as u8;
        let n = u1[0].len();
        let (own, other) = if side == 0 { (u1, u2) } else { (u2, u1) };
        let mut best = -2;
        for p in n..depth {
            let m = p + 1;
            let own_nodes = if side == 0 { &self.left[m] } else { &self.right[m] };
            let other_nodes = if side == 0 { &self.right[m] } else { &self.left[m] };
            let stems = word_range(own_nodes, &own[r]);
            let mut children: Vec<(Vec<Word>, Vec<Word>)> = Vec::new();
            for x0 in stems {
                for a2 in x0[p] + 1..b {
                    let mut x1 = x0[..p].to_vec();
                    x1.push(a2);
                    if word_range(own_nodes, &x1).is_empty() {
                        continue;
                    }
                    // x1 of full length m is x0 with symbol p raised
                    let x1: Word = x1;
                    if x0.len() != m || x1.len() != m {
                        continue;
                    }
                    // choices for every other node on each side
                    let own_choices: Vec<Vec<Vec<Word>>> = own
                        .iter()
                        .enumerate()
                        .map(|(i, eta)| {
                            if i == r {
                                vec![vec![x0.clone(), x1.clone()]]
                            } else {
                                let ext = word_range(own_nodes, eta);
                                let mut opts: Vec<Vec<Word>> = ext.iter().map(|y| vec![y.clone()]).collect();
                                if self.permissive {
                                    for (i1, y1) in ext.iter().enumerate() {
                                        for y2 in &ext[i1 + 1..] {
                                            opts.push(vec![y1.clone(), y2.clone()]);
                                        }
                                    }
                                }
                                opts
                            }
                        })
                        .collect();
                    let other_choices: Vec<Vec<Vec<Word>>> = other
                        .iter()
                        .map(|eta| word_range(other_nodes, eta).iter().map(|y| vec![y.clone()]).collect())
                        .collect();
                    let mut picked_own: Vec<Word> = Vec::new();
                    let mut picked_other: Vec<Word> = Vec::new();
                    self.combine(
                        side,
                        &own_choices,
                        &other_choices,
                        0,
                        &mut picked_own,
                        &mut picked_other,
                        &mut children,
                    );
                }
            }
            for (c1, c2) in children {
                best = best.max(self.value(&c1, &c2));
                if best >= cap {
                    return best;
                }
            }
        }
        best
    }

    fn cross_ok(&self, side: usize, own: &Word, other: &Word) -> bool {
        if side == 0 {
            self.tree.contains(own, other)
        } else {
            self.tree.contains(other, own)
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn combine(
        &self,
        side: usize,
        own_choices: &[Vec<Vec<Word>>],
        other_choices: &[Vec<Vec<Word>>],
        i: usize,
        own: &mut Vec<Word>,
        other: &mut Vec<Word>,
        out: &mut Vec<(Vec<Word>, Vec<Word>)>,
    ) {
        let total = own_choices.len() + other_choices.len();
        if i == total {
            let mut a = own.clone();
            a.sort();
            let mut b = other.clone();
            b.sort();
            out.push(if side == 0 { (a, b) } else { (b, a) });
            return;
        }
        if i < own_choices.len() {
            for opt in &own_choices[i] {
                if opt.iter().all(|y| other.iter().all(|z| self.cross_ok(side, y, z))) {
                    let before = own.len();
                    own.extend(opt.iter().cloned());
                    self.combine(side, own_choices, other_choices, i + 1, own, other, out);
                    own.truncate(before);
                }
            }
        } else {
            for opt in &other_choices[i - own_choices.len()] {
                let z = &opt[0];
                if own.iter().all(|y| self.cross_ok(side, y, z)) {
                    other.push(z.clone());
                    self.combine(side, own_choices, other_choices, i + 1, own, other, out);
                    other.pop();
                }
            }
        }
    }
}

/// Truncated rectangle degree of `(u1, u2)` in `tree`.
pub fn degrc(tree: &RectTree, u1: &[Word], u2: &[Word], permissive: bool) -> Result<DegValue> {
    RectSolver::new(tree, permissive).degree(u1, u2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canned_families() {
        for d in 1..=4 {
            assert_eq!(degsq_family(&TreeFamily::diagonal(d).unwrap()), DegValue::Fin(0));
            assert_eq!(degsq_family(&TreeFamily::full(d, 1).unwrap()), DegValue::Fin(d as i64));
            assert_eq!(degsq_family(&TreeFamily::full(d, 2).unwrap()), DegValue::Fin(d as i64));
        }
        assert_eq!(degsq_family(&TreeFamily::full(3, 0).unwrap()), DegValue::Fin(0));
        let diag = TreeFamily::diagonal(3).unwrap();
        assert_eq!(degsq_pair(&diag, &PfapEntry::root(0)).unwrap(), DegValue::Fin(-1));
    }

    #[test]
    fn bottom_entries() {
        let diag = TreeFamily::diagonal(2).unwrap();
        let u = vec![BinStr::parse("0").unwrap(), BinStr::parse("1").unwrap()];
        let e = PfapEntry::new(u, vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(degsq_pair(&diag, &e).unwrap(), DegValue::Bottom);
        assert_eq!(degsq_pair(&diag, &PfapEntry::root(3)).unwrap(), DegValue::Bottom);
        assert!(PfapEntry::new(vec![BinStr::EMPTY, BinStr::EMPTY], vec![vec![0; 2]; 2]).is_err());
    }

    #[test]
    fn degree_order() {
        assert!(DegValue::Bottom < DegValue::Fin(-1));
        assert!(DegValue::Fin(-1) < DegValue::Fin(0));
    }

    #[test]
    fn souslin_examples() {
        let full = SouslinFamily::full(3, 1).unwrap();
        assert_eq!(degsq_souslin(&full, &SouslinEntry::root()).unwrap(), DegValue::Fin(2));
        let leaves = BinStr::all(3).into_iter().map(|s| (s, s, vec![0; 3])).collect();
        let diag = SouslinFamily::from_leaves(3, 2, leaves).unwrap();
        assert_eq!(degsq_souslin(&diag, &SouslinEntry::root()).unwrap(), DegValue::Fin(-1));
    }

    #[test]
    fn rectangle_examples() {
        let full = RectTree::full(3, 2).unwrap();
        assert_eq!(degrc(&full, &[vec![]], &[vec![]], false).unwrap(), DegValue::Fin(2));
        let spine = RectTree::from_leaves(3, 2, vec![(vec![0; 3], vec![0; 3])]).unwrap();
        assert_eq!(degrc(&spine, &[vec![]], &[vec![]], false).unwrap(), DegValue::Fin(-1));
        assert_eq!(degrc(&spine, &[vec![1]], &[vec![0]], false).unwrap(), DegValue::Bottom);
        assert!(degrc(&full, &[vec![0]], &[vec![]], false).is_err());
    }

    #[test]
    fn growth_flags() {
        let full = TreeFamily::full(4, 1).unwrap();
        assert!(classify_growth(&full, 4).unwrap().infinite_candidate);
        let diag = TreeFamily::diagonal(4).unwrap();
        let rep = classify_growth(&diag, 4).unwrap();
        assert!(!rep.infinite_candidate);
        assert!(rep.values.iter().all(|v| v.1 == DegValue::Fin(0)));
    }
}
