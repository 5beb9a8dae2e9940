//! Strings, truncated trees and the families built from them.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest supported binary string.
pub const MAX_BITS: usize = 63;

/// A binary string of length at most [`MAX_BITS`]; bit `i` is stored at
/// position `i` of `bits`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BinStr {
    len: u8,
    bits: u64,
}

impl BinStr {
    pub const EMPTY: BinStr = BinStr { len: 0, bits: 0 };

    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS, "string too long");
        BinStr { len: len as u8, bits: 0 }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = Self::EMPTY;
        for &b in bits {
            s = s.child(b);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        if text.len() > MAX_BITS {
            return Err(Error::input(format!("string longer than {MAX_BITS}: {text}")));
        }
        let mut s = Self::EMPTY;
        for c in text.chars() {
            s = match c {
                '0' => s.child(false),
                '1' => s.child(true),
                _ => return Err(Error::input(format!("not a binary string: {text:?}"))),
            };
        }
        Ok(s)
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn bit(self, i: usize) -> bool {
        debug_assert!(i < self.len());
        self.bits >> i & 1 == 1
    }

    pub fn child(self, b: bool) -> Self {
        assert!(self.len() < MAX_BITS, "string too long");
        BinStr {
            len: self.len + 1,
            bits: self.bits | (b as u64) << self.len,
        }
    }

    /// `self` followed by `other`.
    pub fn concat(self, other: BinStr) -> Self {
        assert!(self.len() + other.len() <= MAX_BITS, "string too long");
        BinStr {
            len: self.len + other.len,
            bits: self.bits | other.bits << self.len,
        }
    }

    /// Initial segment of length `k`.
    pub fn prefix(self, k: usize) -> Self {
        debug_assert!(k <= self.len());
        let mask = if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
        BinStr {
            len: k as u8,
            bits: self.bits & mask,
        }
    }

    pub fn is_prefix_of(self, other: BinStr) -> bool {
        self.len <= other.len && other.prefix(self.len()) == self
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Every string of length `len`, in lexicographic order.
    pub fn all(len: usize) -> Vec<BinStr> {
        assert!(len <= 20, "too many strings");
        let mut out: Vec<BinStr> = (0..1u64 << len).map(|b| BinStr { len: len as u8, bits: b }).collect();
        out.sort();
        out
    }
}

impl Ord for BinStr {
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.len.min(other.len) as usize;
        let mask = if common >= 64 { u64::MAX } else { (1u64 << common) - 1 };
        let diff = (self.bits ^ other.bits) & mask;
        if diff != 0 {
            let i = diff.trailing_zeros();
            return if self.bits >> i & 1 == 1 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BinStr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BinStr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for BinStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{self}>")
    }
}

/// A string over `0..b` for a small branching `b`.
pub type Word = Vec<u8>;

pub fn parse_word(text: &str, bound: usize) -> Result<Word> {
    text.chars()
        .map(|c| match c.to_digit(10) {
            Some(d) if (d as usize) < bound => Ok(d as u8),
            _ => Err(Error::input(format!("{text:?} is not a string over 0..{bound}"))),
        })
        .collect()
}

pub fn word_string(w: &[u8]) -> String {
    w.iter().map(|d| char::from(b'0' + d)).collect()
}

fn check_closed<T: Clone + Eq + std::hash::Hash + fmt::Debug>(
    set: &HashSet<T>,
    len: impl Fn(&T) -> usize,
    cut: impl Fn(&T, usize) -> T,
) -> Result<()> {
    for x in set {
        let l = len(x);
        if l > 0 && !set.contains(&cut(x, l - 1)) {
            return Err(Error::invalid(format!(
                "not closed under initial segments: {x:?} lacks its parent"
            )));
        }
    }
    Ok(())
}

/// One truncated (2,2)-tree: pairs of equal-length binary strings.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PairTree {
    pairs: HashSet<(BinStr, BinStr)>,
}

impl PairTree {
    pub fn contains(&self, a: BinStr, b: BinStr) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs in lexicographic order.
    pub fn sorted(&self) -> Vec<(BinStr, BinStr)> {
        let mut v: Vec<_> = self.pairs.iter().copied().collect();
        v.sort();
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = &(BinStr, BinStr)> {
        self.pairs.iter()
    }
}

/// A finite sequence of truncated (2,2)-trees of common depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeFamily {
    depth: usize,
    trees: Vec<PairTree>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    depth: usize,
    trees: Vec<Vec<(String, String)>>,
}

impl TreeFamily {
    /// Validates lengths and closure under initial segments.
    pub fn new(depth: usize, trees: Vec<Vec<(BinStr, BinStr)>>) -> Result<Self> {
        if depth == 0 || depth > MAX_BITS {
            return Err(Error::input(format!("depth must be in 1..={MAX_BITS}")));
        }
        let mut out = Vec::with_capacity(trees.len());
        for (i, pairs) in trees.into_iter().enumerate() {
            let mut set = HashSet::with_capacity(pairs.len());
            for (a, b) in pairs {
                if a.len() != b.len() || a.len() > depth {
                    return Err(Error::invalid(format!(
                        "tree {i}: pair ({a},{b}) has unequal lengths or exceeds depth {depth}"
                    )));
                }
                set.insert((a, b));
            }
            check_closed(&set, |p| p.0.len(), |p, k| (p.0.prefix(k), p.1.prefix(k)))
                .map_err(|e| Error::invalid(format!("tree {i}: {e}")))?;
            out.push(PairTree { pairs: set });
        }
        Ok(TreeFamily { depth, trees: out })
    }

    /// Closes the given pairs under initial segments.
    pub fn from_leaves(depth: usize, trees: Vec<Vec<(BinStr, BinStr)>>) -> Result<Self> {
        let closed = trees
            .into_iter()
            .map(|pairs| {
                let mut set = BTreeSet::new();
                for (a, b) in pairs {
                    if a.len() == b.len() {
                        for k in 0..=a.len() {
                            set.insert((a.prefix(k), b.prefix(k)));
                        }
                    } else {
                        set.insert((a, b));
                    }
                }
                set.into_iter().collect()
            })
            .collect();
        Self::new(depth, closed)
    }

    /// `T_0` is the diagonal; no other trees.
    pub fn diagonal(depth: usize) -> Result<Self> {
        let pairs = (0..=depth.min(20))
            .flat_map(BinStr::all)
            .map(|s| (s, s))
            .collect();
        Self::check_canned(depth)?;
        Self::new(depth, vec![pairs])
    }

    /// Every pair of equal-length strings, in each of `count` trees.
    pub fn full(depth: usize, count: usize) -> Result<Self> {
        Self::check_canned(depth)?;
        let mut pairs = Vec::new();
        for l in 0..=depth {
            let all = BinStr::all(l);
            for &a in &all {
                for &b in &all {
                    pairs.push((a, b));
                }
            }
        }
        Self::new(depth, vec![pairs; count])
    }

    fn check_canned(depth: usize) -> Result<()> {
        if depth == 0 {
            return Err(Error::input("depth must be at least 1"));
        }
        if depth > 10 {
            return Err(Error::TooLarge("canned families are limited to depth 10".into()));
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn num_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn tree(&self, i: usize) -> &PairTree {
        &self.trees[i]
    }

    pub fn trees(&self) -> &[PairTree] {
        &self.trees
    }

    pub fn contains(&self, tree: usize, a: BinStr, b: BinStr) -> bool {
        self.trees.get(tree).is_some_and(|t| t.contains(a, b))
    }

    /// The restriction to strings of length at most `depth`.
    pub fn truncate(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.depth {
            return Err(Error::input(format!("cannot truncate depth {} to {depth}", self.depth)));
        }
        Ok(TreeFamily {
            depth,
            trees: self
                .trees
                .iter()
                .map(|t| PairTree {
                    pairs: t.pairs.iter().filter(|p| p.0.len() <= depth).copied().collect(),
                })
                .collect(),
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::input(format!("family: {e}")))?;
        Self::from_json(v)
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let file: FamilyFile =
            serde_json::from_value(value).map_err(|e| Error::input(format!("family: {e}")))?;
        let trees = file
            .trees
            .iter()
            .map(|t| {
                t.iter()
                    .map(|(a, b)| Ok((BinStr::parse(a)?, BinStr::parse(b)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.depth, trees)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = FamilyFile {
            depth: self.depth,
            trees: self
                .trees
                .iter()
                .map(|t| t.sorted().iter().map(|(a, b)| (a.to_string(), b.to_string())).collect())
                .collect(),
        };
        serde_json::to_value(file).expect("family serializes")
    }

    /// The image of the family under a tree automorphism.
    pub fn map(&self, f: &TreeAutomorphism) -> Self {
        TreeFamily {
            depth: self.depth,
            trees: self
                .trees
                .iter()
                .map(|t| PairTree {
                    pairs: t.pairs.iter().map(|&(a, b)| (f.apply(a), f.apply(b))).collect(),
                })
                .collect(),
        }
    }
}

/// A level-preserving automorphism of the binary tree: the children of every
/// node in `swaps` are exchanged.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeAutomorphism {
    swaps: HashSet<BinStr>,
}

impl TreeAutomorphism {
    pub fn new(swaps: impl IntoIterator<Item = BinStr>) -> Self {
        TreeAutomorphism {
            swaps: swaps.into_iter().collect(),
        }
    }

    pub fn apply(&self, s: BinStr) -> BinStr {
        let mut out = BinStr::EMPTY;
        for i in 0..s.len() {
            out = out.child(s.bit(i) ^ self.swaps.contains(&s.prefix(i)));
        }
        out
    }
}

/// A truncated (2,2,κ)-tree: triples of equal-length strings, the third a
/// label over `0..kappa`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SouslinFamily {
    depth: usize,
    kappa: usize,
    triples: HashSet<(BinStr, BinStr, Word)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SouslinFile {
    depth: usize,
    kappa: usize,
    tree: Vec<(String, String, String)>,
}

impl SouslinFamily {
    pub fn new(depth: usize, kappa: usize, triples: Vec<(BinStr, BinStr, Word)>) -> Result<Self> {
        if depth == 0 || depth > MAX_BITS {
            return Err(Error::input(format!("depth must be in 1..={MAX_BITS}")));
        }
        if kappa == 0 || kappa > 10 {
            return Err(Error::input("label bound must be in 1..=10"));
        }
        let mut set = HashSet::new();
        for (a, b, r) in triples {
            if a.len() != b.len() || a.len() != r.len() || a.len() > depth {
                return Err(Error::invalid(format!(
                    "triple ({a},{b},{}) has unequal lengths or exceeds depth",
                    word_string(&r)
                )));
            }
            if r.iter().any(|&d| d as usize >= kappa) {
                return Err(Error::invalid(format!("label {} outside 0..{kappa}", word_string(&r))));
            }
            set.insert((a, b, r));
        }
        check_closed(&set, |t| t.0.len(), |t, k| (t.0.prefix(k), t.1.prefix(k), t.2[..k].to_vec()))?;
        Ok(SouslinFamily {
            depth,
            kappa,
            triples: set,
        })
    }

    pub fn from_leaves(depth: usize, kappa: usize, leaves: Vec<(BinStr, BinStr, Word)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b, r) in leaves {
            if a.len() == b.len() && a.len() == r.len() {
                for k in 0..=a.len() {
                    set.insert((a.prefix(k), b.prefix(k), r[..k].to_vec()));
                }
            } else {
                set.insert((a, b, r));
            }
        }
        Self::new(depth, kappa, set.into_iter().collect())
    }

    /// Every triple over labels `0..kappa`.
    pub fn full(depth: usize, kappa: usize) -> Result<Self> {
        if depth > 4 {
            return Err(Error::TooLarge("full Souslin trees are limited to depth 4".into()));
        }
        let mut leaves = Vec::new();
        for a in BinStr::all(depth) {
            for b in BinStr::all(depth) {
                for r in all_words(depth, kappa) {
                    leaves.push((a, b, r));
                }
            }
        }
        Self::from_leaves(depth, kappa, leaves)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn contains(&self, a: BinStr, b: BinStr, label: &[u8]) -> bool {
        self.triples.contains(&(a, b, label.to_vec()))
    }

    pub fn triples(&self) -> impl Iterator<Item = &(BinStr, BinStr, Word)> {
        self.triples.iter()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::input(format!("souslin family: {e}")))?;
        Self::from_json(v)
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let file: SouslinFile =
            serde_json::from_value(value).map_err(|e| Error::input(format!("souslin family: {e}")))?;
        if file.kappa == 0 || file.kappa > 10 {
            return Err(Error::input("label bound must be in 1..=10"));
        }
        let triples = file
            .tree
            .iter()
            .map(|(a, b, r)| Ok((BinStr::parse(a)?, BinStr::parse(b)?, parse_word(r, file.kappa)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.depth, file.kappa, triples)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut tree: Vec<_> = self.triples.iter().cloned().collect();
        tree.sort();
        serde_json::to_value(SouslinFile {
            depth: self.depth,
            kappa: self.kappa,
            tree: tree
                .iter()
                .map(|(a, b, r)| (a.to_string(), b.to_string(), word_string(r)))
                .collect(),
        })
        .expect("family serializes")
    }
}

/// All words of length `len` over `0..bound`, lexicographically.
pub fn all_words(len: usize, bound: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..bound as u8).map(move |d| {
                    let mut w = w.clone();
                    w.push(d);
                    w
                })
            })
            .collect();
    }
    out
}

/// A truncated tree of pairs of words over `0..branching`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectTree {
    depth: usize,
    branching: usize,
    pairs: HashSet<(Word, Word)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RectFile {
    depth: usize,
    branching: usize,
    tree: Vec<(String, String)>,
}

impl RectTree {
    pub fn new(depth: usize, branching: usize, pairs: Vec<(Word, Word)>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::input("depth must be at least 1"));
        }
        if branching == 0 || branching > 10 {
            return Err(Error::input("branching must be in 1..=10"));
        }
        let mut set = HashSet::new();
        for (a, b) in pairs {
            if a.len() != b.len() || a.len() > depth {
                return Err(Error::invalid(format!(
                    "pair ({},{}) has unequal lengths or exceeds depth",
                    word_string(&a),
                    word_string(&b)
                )));
            }
            if a.iter().chain(&b).any(|&d| d as usize >= branching) {
                return Err(Error::invalid(format!(
                    "pair ({},{}) uses a symbol outside 0..{branching}",
                    word_string(&a),
                    word_string(&b)
                )));
            }
            set.insert((a, b));
        }
        if !set.is_empty() && !set.contains(&(Vec::new(), Vec::new())) {
            return Err(Error::invalid("nonempty tree lacks the root pair"));
        }
        check_closed(&set, |p| p.0.len(), |p, k| (p.0[..k].to_vec(), p.1[..k].to_vec()))?;
        Ok(RectTree {
            depth,
            branching,
            pairs: set,
        })
    }

    pub fn from_leaves(depth: usize, branching: usize, leaves: Vec<(Word, Word)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in leaves {
            if a.len() == b.len() {
                for k in 0..=a.len() {
                    set.insert((a[..k].to_vec(), b[..k].to_vec()));
                }
            } else {
                set.insert((a, b));
            }
        }
        Self::new(depth, branching, set.into_iter().collect())
    }

    /// Every pair of equal-length words.
    pub fn full(depth: usize, branching: usize) -> Result<Self> {
        if branching.pow(depth as u32) > 4096 {
            return Err(Error::TooLarge("full tree too large".into()));
        }
        let leaves = all_words(depth, branching);
        let mut pairs = Vec::new();
        for a in &leaves {
            for b in &leaves {
                pairs.push((a.clone(), b.clone()));
            }
        }
        Self::from_leaves(depth, branching, pairs)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn branching(&self) -> usize {
        self.branching
    }

    pub fn contains(&self, a: &[u8], b: &[u8]) -> bool {
        self.pairs.contains(&(a.to_vec(), b.to_vec()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Word, Word)> {
        self.pairs.iter()
    }

    /// Swaps the coordinates of every pair.
    pub fn transpose(&self) -> Self {
        RectTree {
            depth: self.depth,
            branching: self.branching,
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    /// The binary family `[self]` viewed as a single-tree family.
    pub fn as_family(&self) -> Result<TreeFamily> {
        if self.branching > 2 {
            return Err(Error::input("only binary trees convert to families"));
        }
        let pairs = self
            .pairs
            .iter()
            .map(|(a, b)| {
                (
                    BinStr::from_bits(&a.iter().map(|&d| d == 1).collect::<Vec<_>>()),
                    BinStr::from_bits(&b.iter().map(|&d| d == 1).collect::<Vec<_>>()),
                )
            })
            .collect();
        TreeFamily::new(self.depth, vec![pairs])
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::input(format!("tree: {e}")))?;
        Self::from_json(v)
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let file: RectFile =
            serde_json::from_value(value).map_err(|e| Error::input(format!("tree: {e}")))?;
        if file.branching == 0 || file.branching > 10 {
            return Err(Error::input("branching must be in 1..=10"));
        }
        let pairs = file
            .tree
            .iter()
            .map(|(a, b)| Ok((parse_word(a, file.branching)?, parse_word(b, file.branching)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.depth, file.branching, pairs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut tree: Vec<_> = self.pairs.iter().cloned().collect();
        tree.sort();
        serde_json::to_value(RectFile {
            depth: self.depth,
            branching: self.branching,
            tree: tree.iter().map(|(a, b)| (word_string(a), word_string(b))).collect(),
        })
        .expect("tree serializes")
    }
}
