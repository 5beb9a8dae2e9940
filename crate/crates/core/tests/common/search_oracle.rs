//! Subset enumeration and certificate checks for the searches. Nothing here
//! calls into the search code.

use sqrank::encode::SquareWitness;
use sqrank::search::{ApproxChain, FiniteFunction, SquarePattern};
use sqrank::tree::{BinStr, RectTree, TreeFamily, Word};

fn allowed(fam: &TreeFamily, a: BinStr, b: BinStr) -> bool {
    (0..fam.num_trees()).any(|t| fam.contains(t, a, b))
}

/// Largest square by trying every subset of leaves; ties go to the least
/// sorted point list.
pub fn max_square(fam: &TreeFamily) -> Vec<BinStr> {
    let mut leaves = BinStr::all(fam.depth());
    leaves.sort();
    let n = leaves.len();
    assert!(n <= 16);
    let mut best: Vec<BinStr> = Vec::new();
    for mask in 1u32..1 << n {
        let set: Vec<BinStr> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| leaves[i]).collect();
        if set.len() < best.len() {
            continue;
        }
        if set.iter().all(|&a| set.iter().all(|&b| allowed(fam, a, b)))
            && (set.len() > best.len() || set < best)
        {
            best = set;
        }
    }
    best
}

/// Largest rectangle by trying every left subset with its full common
/// neighbourhood; the score is (smaller side, total), ties go to the least
/// left side.
pub fn max_rectangle(left: &[Word], right: &[Word], ok: impl Fn(&Word, &Word) -> bool) -> (Vec<Word>, Vec<Word>) {
    assert!(left.len() <= 16);
    let mut best: ((usize, usize), Vec<Word>, Vec<Word>) = ((0, 0), vec![], vec![]);
    for mask in 1u32..1 << left.len() {
        let a: Vec<Word> = (0..left.len()).filter(|i| mask >> i & 1 == 1).map(|i| left[i].clone()).collect();
        let b: Vec<Word> = right.iter().filter(|y| a.iter().all(|x| ok(x, y))).cloned().collect();
        if b.is_empty() {
            continue;
        }
        let score = (a.len().min(b.len()), a.len() + b.len());
        if score > best.0 || (score == best.0 && a < best.1) {
            best = (score, a, b);
        }
    }
    (best.1, best.2)
}

/// Checks a chain against its definition: doubling, strictly rising levels,
/// children extending their parent, tree membership of every indexed pair,
/// coherent indices, and realizers taken from the witness.
pub fn check_chain(fam: &TreeFamily, w: &SquareWitness, chain: &ApproxChain, quota: usize) -> Result<(), String> {
    let s0 = &chain.steps[0];
    if s0.level != 0 || s0.nodes != vec![BinStr::EMPTY] || s0.index != vec![vec![None]] {
        return Err("chain does not start at the root".into());
    }
    for (i, step) in chain.steps.iter().enumerate() {
        let k = step.nodes.len();
        if k != 1 << i {
            return Err(format!("step {i} has {k} nodes"));
        }
        for a in 0..k {
            if step.nodes[a].len() != step.level {
                return Err(format!("step {i}: node {a} has the wrong length"));
            }
            for b in 0..k {
                if a != b && step.nodes[a] == step.nodes[b] {
                    return Err(format!("step {i}: repeated node"));
                }
                if let Some(t) = step.index[a][b] {
                    if !fam.contains(t, step.nodes[a], step.nodes[b]) {
                        return Err(format!("step {i}: pair ({a},{b}) not in tree {t}"));
                    }
                } else if i > 0 {
                    return Err(format!("step {i}: missing index"));
                }
            }
        }
        if i > 0 {
            if step.certifications < quota {
                return Err(format!("step {i}: {} certifications", step.certifications));
            }
            if step.realizer.len() != k {
                return Err(format!("step {i}: realizer size"));
            }
            for (a, &p) in step.realizer.iter().enumerate() {
                if w.points()[p].prefix(step.level) != step.nodes[a] {
                    return Err(format!("step {i}: realizer point {p} is not below node {a}"));
                }
                for (b, &q) in step.realizer.iter().enumerate() {
                    if step.index[a][b] != Some(w.pairing()[p][q]) {
                        return Err(format!("step {i}: realizer pairing differs at ({a},{b})"));
                    }
                }
            }
        }
    }
    for pair in chain.steps.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.level <= prev.level {
            return Err("levels do not rise".into());
        }
        for (a, &node) in next.nodes.iter().enumerate() {
            if node.prefix(prev.level) != prev.nodes[a / 2] {
                return Err(format!("node {a} does not extend its parent"));
            }
            for b in 0..next.nodes.len() {
                let (pa, pb) = (a / 2, b / 2);
                let inherited = if pa != pb {
                    prev.index[pa][pb]
                } else if a == b {
                    prev.index[pa][pa]
                } else {
                    None
                };
                if let Some(t) = inherited {
                    if next.index[a][b] != Some(t) {
                        return Err(format!("index of ({a},{b}) not inherited"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Checks a boost pattern: `2^depth` distinct points from `points`, every
/// pair in the tree, and a splitting structure matching the reported levels.
pub fn check_pattern(tree: &RectTree, points: &[Word], p: &SquarePattern) -> Result<(), String> {
    let n = p.leaves.len();
    if n != 1 << p.depth || p.levels.len() != p.depth {
        return Err("pattern size does not match its depth".into());
    }
    for (a, x) in p.leaves.iter().enumerate() {
        if !points.contains(x) {
            return Err(format!("leaf {a} is not a given point"));
        }
        for (b, y) in p.leaves.iter().enumerate() {
            if a != b && x == y {
                return Err("repeated leaf".into());
            }
            if p.index[a][b] != 0 || !tree.contains(x, y) {
                return Err(format!("pair ({a},{b}) not certified"));
            }
        }
    }
    for j in 0..p.depth {
        let before = if j == 0 { 0 } else { p.levels[j - 1] };
        let at = p.levels[j];
        if at <= before {
            return Err("levels do not rise".into());
        }
        let shift = p.depth - j;
        for a in 0..n {
            for b in 0..n {
                let same_j = a >> shift == b >> shift;
                let same_next = a >> (shift - 1) == b >> (shift - 1);
                if same_j && p.leaves[a][..before] != p.leaves[b][..before] {
                    return Err(format!("round {j}: siblings disagree below level {before}"));
                }
                if !same_next && p.leaves[a][..at] == p.leaves[b][..at] {
                    return Err(format!("round {j}: leaves {a},{b} not split by level {at}"));
                }
            }
        }
    }
    Ok(())
}

fn table_value(n: usize, f: &FiniteFunction, args: &[usize]) -> usize {
    let mut idx = 0;
    for &a in args {
        idx = idx * n + a;
    }
    f.table[idx]
}

/// Free means no tuple of pairwise distinct members `a_0 .. a_k` has
/// `a_k = F(a_0 .. a_{k-1})`.
pub fn is_free(n: usize, fs: &[FiniteFunction], set: &[usize]) -> bool {
    fn tuples(set: &[usize], len: usize) -> Vec<Vec<usize>> {
        if len == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for t in tuples(set, len - 1) {
            for &x in set {
                if !t.contains(&x) {
                    let mut t2 = t.clone();
                    t2.push(x);
                    out.push(t2);
                }
            }
        }
        out
    }
    fs.iter().all(|f| {
        tuples(set, f.arity + 1)
            .iter()
            .all(|t| table_value(n, f, &t[..f.arity]) != t[f.arity])
    })
}

/// Least free set of size `m` among all `m`-subsets in increasing order.
pub fn free_set(n: usize, fs: &[FiniteFunction], m: usize) -> Option<Vec<usize>> {
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != m {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if is_free(n, fs, &set) && best.as_ref().is_none_or(|b| set < *b) {
            best = Some(set);
        }
    }
    best
}

pub fn max_free(n: usize, fs: &[FiniteFunction]) -> usize {
    (0..=n).rev().find(|&m| free_set(n, fs, m).is_some()).unwrap_or(0)
}
