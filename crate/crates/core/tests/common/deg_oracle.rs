//! Degrees straight from the splitting-game definition: every extension
//! level, every pair of maps `h_0, h_1` and every free entry is tried.

use std::collections::HashMap;

use sqrank::tree::{BinStr, RectTree, SouslinFamily, TreeFamily, Word};

/// Strings of length `m` extending `s`.
pub fn extensions(s: BinStr, m: usize) -> Vec<BinStr> {
    BinStr::all(m - s.len()).into_iter().map(|t| s.concat(t)).collect()
}

pub fn word_extensions(s: &[u8], m: usize, b: usize) -> Vec<Word> {
    let mut out = vec![s.to_vec()];
    for _ in s.len()..m {
        out = out
            .into_iter()
            .flat_map(|w| (0..b as u8).map(move |d| [w.clone(), vec![d]].concat()))
            .collect();
    }
    out
}

/// All maps that send each entry of `u` to one of its extensions at level
/// `m`, splitting entry `r` into an ordered pair of distinct extensions.
/// Each result lists `(h_0(u[i]), h_1(u[i]))`.
fn split_maps(u: &[BinStr], r: usize, m: usize) -> Vec<Vec<(BinStr, BinStr)>> {
    let mut out: Vec<Vec<(BinStr, BinStr)>> = vec![vec![]];
    for (i, &eta) in u.iter().enumerate() {
        let ext = extensions(eta, m);
        let mut next = Vec::new();
        for partial in &out {
            for &a in &ext {
                if i == r {
                    for &b in &ext {
                        if a != b {
                            let mut p = partial.clone();
                            p.push((a, b));
                            next.push(p);
                        }
                    }
                } else {
                    let mut p = partial.clone();
                    p.push((a, a));
                    next.push(p);
                }
            }
        }
        out = next;
    }
    out
}

pub struct SquareOracle<'a> {
    fam: &'a TreeFamily,
    memo: HashMap<Vec<(BinStr, BinStr, usize)>, i64>,
}

impl<'a> SquareOracle<'a> {
    pub fn new(fam: &'a TreeFamily) -> Self {
        SquareOracle {
            fam,
            memo: HashMap::new(),
        }
    }

    pub fn case1(&self, u: &[BinStr], g: &dyn Fn(usize, usize) -> usize) -> bool {
        (0..u.len()).all(|i| (0..u.len()).all(|j| self.fam.contains(g(i, j), u[i], u[j])))
    }

    /// `None` for entries failing Case 1.
    pub fn value(&mut self, u: &[BinStr], g: &[Vec<usize>]) -> Option<i64> {
        if !self.case1(u, &|i, j| g[i][j]) {
            return None;
        }
        Some(self.rec(u, g))
    }

    fn rec(&mut self, u: &[BinStr], g: &[Vec<usize>]) -> i64 {
        let mut key: Vec<(BinStr, BinStr, usize)> = Vec::new();
        for i in 0..u.len() {
            for j in 0..u.len() {
                key.push((u[i], u[j], g[i][j]));
            }
        }
        key.sort();
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let n = u[0].len();
        let trees = self.fam.num_trees();
        let mut least: Option<i64> = None;
        let mut all_split = true;
        for r in 0..u.len() {
            let mut best: Option<i64> = None;
            for m in n + 1..=self.fam.depth() {
                for h in split_maps(u, r, m) {
                    // u* lists h_0 images then the second copy of u[r]
                    let mut ustar: Vec<BinStr> = h.iter().map(|p| p.0).collect();
                    ustar.push(h[r].1);
                    let origin: Vec<usize> = (0..u.len()).chain([r]).collect();
                    let k = ustar.len();
                    for c01 in 0..trees {
                        for c10 in 0..trees {
                            let gstar: Vec<Vec<usize>> = (0..k)
                                .map(|a| {
                                    (0..k)
                                        .map(|b| {
                                            if a == r && b == k - 1 {
                                                c01
                                            } else if a == k - 1 && b == r {
                                                c10
                                            } else {
                                                g[origin[a]][origin[b]]
                                            }
                                        })
                                        .collect()
                                })
                                .collect();
                            if self.case1(&ustar, &|a, b| gstar[a][b]) {
                                let v = self.rec(&ustar, &gstar);
                                best = Some(best.map_or(v, |b: i64| b.max(v)));
                            }
                        }
                    }
                }
            }
            match best {
                Some(b) => least = Some(least.map_or(b, |l: i64| l.min(b))),
                None => all_split = false,
            }
        }
        let v = if all_split { 1 + least.unwrap() } else { -1 };
        self.memo.insert(key, v);
        v
    }

    /// Maximum of `value + 1` over every rankable entry with at most
    /// `max_size` strings, at every level.
    pub fn family(&mut self, max_size: usize) -> i64 {
        let trees = self.fam.num_trees();
        let mut best = 0;
        for n in 0..=self.fam.depth() {
            let strings = BinStr::all(n);
            for mask in 1u32..1 << strings.len() {
                if mask.count_ones() as usize > max_size {
                    continue;
                }
                let u: Vec<BinStr> = (0..strings.len()).filter(|i| mask >> i & 1 == 1).map(|i| strings[i]).collect();
                let k = u.len();
                let cells = k * k;
                let total = trees.pow(cells as u32);
                for code in 0..total {
                    let mut c = code;
                    let mut g = vec![vec![0; k]; k];
                    for row in g.iter_mut() {
                        for x in row.iter_mut() {
                            *x = c % trees;
                            c /= trees;
                        }
                    }
                    if let Some(v) = self.value(&u, &g) {
                        best = best.max(v + 1);
                    }
                }
            }
        }
        best
    }
}

pub struct SouslinOracle<'a> {
    fam: &'a SouslinFamily,
    memo: HashMap<Vec<(BinStr, BinStr, Word)>, i64>,
}

impl<'a> SouslinOracle<'a> {
    pub fn new(fam: &'a SouslinFamily) -> Self {
        SouslinOracle {
            fam,
            memo: HashMap::new(),
        }
    }

    pub fn value(&mut self, u: &[BinStr], f: &[Vec<Word>]) -> Option<i64> {
        let ok = (0..u.len()).all(|i| (0..u.len()).all(|j| self.fam.contains(u[i], u[j], &f[i][j])));
        ok.then(|| self.rec(u, f))
    }

    fn rec(&mut self, u: &[BinStr], f: &[Vec<Word>]) -> i64 {
        let mut key = Vec::new();
        for i in 0..u.len() {
            for j in 0..u.len() {
                key.push((u[i], u[j], f[i][j].clone()));
            }
        }
        key.sort();
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let n = u[0].len();
        let kappa = self.fam.kappa();
        let mut least: Option<i64> = None;
        let mut all_split = true;
        for r in 0..u.len() {
            let mut best: Option<i64> = None;
            for m in n + 1..=self.fam.depth() {
                for h in split_maps(u, r, m) {
                    let mut ustar: Vec<BinStr> = h.iter().map(|p| p.0).collect();
                    ustar.push(h[r].1);
                    let origin: Vec<usize> = (0..u.len()).chain([r]).collect();
                    let k = ustar.len();
                    // per pair: labels in T obeying (v) and (vi); the cross
                    // pair of the two copies is unconstrained
                    let mut options: Vec<Vec<Word>> = Vec::new();
                    for a in 0..k {
                        for b in 0..k {
                            let free = origin[a] == origin[b] && a != b;
                            let opts: Vec<Word> = word_extensions(&[], m, kappa)
                                .into_iter()
                                .filter(|l| self.fam.contains(ustar[a], ustar[b], l))
                                .filter(|l| free || l.starts_with(&f[origin[a]][origin[b]]))
                                .collect();
                            options.push(opts);
                        }
                    }
                    if options.iter().any(|o| o.is_empty()) {
                        continue;
                    }
                    let mut idx = vec![0; options.len()];
                    'labels: loop {
                        let fstar: Vec<Vec<Word>> =
                            (0..k).map(|a| (0..k).map(|b| options[a * k + b][idx[a * k + b]].clone()).collect()).collect();
                        let v = self.rec(&ustar, &fstar);
                        best = Some(best.map_or(v, |b: i64| b.max(v)));
                        for p in 0..idx.len() {
                            idx[p] += 1;
                            if idx[p] < options[p].len() {
                                continue 'labels;
                            }
                            idx[p] = 0;
                        }
                        break;
                    }
                }
            }
            match best {
                Some(b) => least = Some(least.map_or(b, |l: i64| l.min(b))),
                None => all_split = false,
            }
        }
        let v = if all_split { 1 + least.unwrap() } else { -1 };
        self.memo.insert(key, v);
        v
    }
}

pub struct RectDegOracle<'a> {
    tree: &'a RectTree,
    permissive: bool,
    memo: HashMap<(Vec<Word>, Vec<Word>), i64>,
}

impl<'a> RectDegOracle<'a> {
    pub fn new(tree: &'a RectTree, permissive: bool) -> Self {
        RectDegOracle {
            tree,
            permissive,
            memo: HashMap::new(),
        }
    }

    pub fn value(&mut self, u1: &[Word], u2: &[Word]) -> Option<i64> {
        let ok = u1.iter().all(|a| u2.iter().all(|b| self.tree.contains(a, b)));
        ok.then(|| self.rec(u1, u2))
    }

    /// Images of one side: each node maps to one extension, or to one or two
    /// when `split_all`; node `r` (if any) maps to two distinct ones.
    fn side_images(&self, u: &[Word], r: Option<usize>, m: usize, split_all: bool) -> Vec<Vec<Word>> {
        let b = self.tree.branching();
        let mut out: Vec<Vec<Word>> = vec![vec![]];
        for (i, eta) in u.iter().enumerate() {
            let ext = word_extensions(eta, m, b);
            let mut choices: Vec<Vec<Word>> = Vec::new();
            for (x, a) in ext.iter().enumerate() {
                if Some(i) != r {
                    choices.push(vec![a.clone()]);
                }
                if Some(i) == r || split_all {
                    for c in &ext[x + 1..] {
                        choices.push(vec![a.clone(), c.clone()]);
                    }
                }
            }
            out = out
                .iter()
                .flat_map(|p| choices.iter().map(move |c| [p.clone(), c.clone()].concat()))
                .collect();
        }
        out
    }

    fn rec(&mut self, u1: &[Word], u2: &[Word]) -> i64 {
        let mut key = (u1.to_vec(), u2.to_vec());
        key.0.sort();
        key.1.sort();
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let n = u1[0].len();
        let mut least: Option<i64> = None;
        let mut all_split = true;
        for side in 0..2 {
            let own = if side == 0 { u1 } else { u2 };
            for r in 0..own.len() {
                let mut best: Option<i64> = None;
                for m in n + 1..=self.tree.depth() {
                    let (r1, r2) = if side == 0 { (Some(r), None) } else { (None, Some(r)) };
                    let a1 = self.side_images(u1, r1, m, self.permissive && side == 0);
                    let a2 = self.side_images(u2, r2, m, self.permissive && side == 1);
                    for x in &a1 {
                        for y in &a2 {
                            if let Some(v) = self.value(x, y) {
                                best = Some(best.map_or(v, |b: i64| b.max(v)));
                            }
                        }
                    }
                }
                match best {
                    Some(b) => least = Some(least.map_or(b, |l: i64| l.min(b))),
                    None => all_split = false,
                }
            }
        }
        let v = if all_split { 1 + least.unwrap() } else { -1 };
        self.memo.insert(key, v);
        v
    }
}
