//! Symmetric colorings of pairs and the pattern-embedding relation between
//! them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::encode::coloring_to_model;
use crate::error::{Error, Result};
use crate::rank::{model_rank, RankParams};

/// Colors of the unordered pairs of `0..size`. The diagonal reads as 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairColoring {
    size: usize,
    colors: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ColoringFile {
    size: usize,
    colors: Vec<u32>,
}

fn pair_index(size: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    // rows 0..a hold size-1, size-2, ... entries
    a * (2 * size - a - 1) / 2 + (b - a - 1)
}

impl PairColoring {
    /// `colors` lists the pairs `(0,1), (0,2), .., (1,2), ..` in order.
    pub fn new(size: usize, colors: Vec<u32>) -> Result<Self> {
        let want = size * size.saturating_sub(1) / 2;
        if colors.len() != want {
            return Err(Error::input(format!(
                "a coloring of {size} points needs {want} pair colors, got {}",
                colors.len()
            )));
        }
        Ok(PairColoring { size, colors })
    }

    pub fn constant(size: usize, c: u32) -> Self {
        PairColoring {
            size,
            colors: vec![c; size * size.saturating_sub(1) / 2],
        }
    }

    /// Every pair gets its own color.
    pub fn rainbow(size: usize) -> Self {
        let k = size * size.saturating_sub(1) / 2;
        PairColoring {
            size,
            colors: (0..k as u32).collect(),
        }
    }

    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> u32) -> Self {
        let mut colors = Vec::new();
        for a in 0..size {
            for b in a + 1..size {
                colors.push(f(a, b));
            }
        }
        PairColoring { size, colors }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn color(&self, a: usize, b: usize) -> u32 {
        if a == b {
            0
        } else {
            self.colors[pair_index(self.size, a, b)]
        }
    }

    /// The pair colors in storage order.
    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ColoringFile =
            serde_json::from_str(text).map_err(|e| Error::input(format!("coloring: {e}")))?;
        Self::new(file.size, file.colors)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ColoringFile {
            size: self.size,
            colors: self.colors.clone(),
        })
        .expect("coloring serializes")
    }

    /// The coloring induced on `subset`, renumbered in the given order.
    pub fn restrict(&self, subset: &[usize]) -> Result<Self> {
        for (i, &a) in subset.iter().enumerate() {
            if a >= self.size {
                return Err(Error::input(format!("point {a} outside 0..{}", self.size)));
            }
            if subset[..i].contains(&a) {
                return Err(Error::input(format!("point {a} repeated")));
            }
        }
        Ok(Self::from_fn(subset.len(), |i, j| self.color(subset[i], subset[j])))
    }

    /// Least relabeling of the points, as a color vector.
    pub fn canonical(&self) -> Vec<u32> {
        let mut perm: Vec<usize> = (0..self.size).collect();
        let mut best = self.colors.clone();
        while next_permutation(&mut perm) {
            let c = self.restrict(&perm).expect("permutation").colors;
            if c < best {
                best = c;
            }
        }
        best
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Outcome of an embedding check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbedReport {
    pub embeds: bool,
    /// Distinct source patterns (up to relabeling) checked, by size `1..`.
    pub patterns_checked: Vec<usize>,
    /// Source points spanning the first pattern the target misses.
    pub failing_pattern: Option<Vec<usize>>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Whether distinct target points realize `pattern` in its given order.
fn realizes(target: &PairColoring, pattern: &PairColoring) -> bool {
    fn go(t: &PairColoring, p: &PairColoring, chosen: &mut Vec<usize>) -> bool {
        let i = chosen.len();
        if i == p.size() {
            return true;
        }
        for a in 0..t.size() {
            if chosen.contains(&a) {
                continue;
            }
            if chosen.iter().enumerate().all(|(j, &b)| t.color(b, a) == p.color(j, i)) {
                chosen.push(a);
                if go(t, p, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    go(target, pattern, &mut Vec::new())
}

/// True when every pattern on at most `max_pattern` distinct source points
/// is realized by distinct target points with the same pair colors.
/// Patterns larger than the source do not exist, so `max_pattern` is
/// effectively capped at the source size.
pub fn embeds_patterns(target: &PairColoring, source: &PairColoring, max_pattern: usize) -> EmbedReport {
    let mut checked = Vec::new();
    for s in 1..=max_pattern.min(source.size()) {
        let mut seen = BTreeSet::new();
        for subset in combinations(source.size(), s) {
            let pattern = source.restrict(&subset).expect("subset in range");
            if !seen.insert(pattern.canonical()) {
                continue;
            }
            if !realizes(target, &pattern) {
                checked.push(seen.len());
                return EmbedReport {
                    embeds: false,
                    patterns_checked: checked,
                    failing_pattern: Some(subset),
                };
            }
        }
        checked.push(seen.len());
    }
    EmbedReport {
        embeds: true,
        patterns_checked: checked,
        failing_pattern: None,
    }
}

/// Model rank of the coloring viewed as one binary relation per color.
pub fn rank_of_coloring(coloring: &PairColoring, params: &RankParams) -> Result<i32> {
    model_rank(&coloring_to_model(coloring), params)
}

/// All colorings of `size` points with colors `0..colors`, one per
/// relabeling class.
pub fn coloring_classes(size: usize, colors: u32) -> Vec<PairColoring> {
    let pairs = size * size.saturating_sub(1) / 2;
    let total = (colors as usize).pow(pairs as u32);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let v: Vec<u32> = (0..pairs)
            .map(|_| {
                let d = (c % colors as usize) as u32;
                c /= colors as usize;
                d
            })
            .collect();
        let col = PairColoring { size, colors: v };
        let canon = col.canonical();
        if seen.insert(canon.clone()) {
            out.push(PairColoring { size, colors: canon });
        }
    }
    out
}

/// One row of the rank comparison over embedding pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferRow {
    pub target_size: usize,
    pub source_size: usize,
    pub pairs: usize,
    pub source_not_higher: usize,
    pub source_higher: usize,
}

/// For every pair of coloring classes with `size <= max_size` where the
/// source fully embeds into the target, compares their ranks under `params`.
/// Results are tallied by sizes; nothing is asserted.
pub fn rank_transfer_experiment(max_size: usize, colors: u32, params: &RankParams) -> Result<Vec<TransferRow>> {
    let classes: Vec<Vec<(PairColoring, i32)>> = (1..=max_size)
        .map(|n| {
            coloring_classes(n, colors)
                .into_iter()
                .map(|c| rank_of_coloring(&c, params).map(|r| (c, r)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (ti, targets) in classes.iter().enumerate() {
        for (si, sources) in classes.iter().enumerate() {
            let mut row = TransferRow {
                target_size: ti + 1,
                source_size: si + 1,
                pairs: 0,
                source_not_higher: 0,
                source_higher: 0,
            };
            for (t, rt) in targets {
                for (s, rs) in sources {
                    if embeds_patterns(t, s, s.size()).embeds {
                        row.pairs += 1;
                        if rs <= rt {
                            row.source_not_higher += 1;
                        } else {
                            row.source_higher += 1;
                        }
                    }
                }
            }
            rows.push(row);
        }
    }
    Ok(rows)
}
