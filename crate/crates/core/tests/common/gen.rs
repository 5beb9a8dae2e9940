//! Seeded random instances shared by the integration tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqrank::structure::{FiniteModel, ModelLimits};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const WIDE: ModelLimits = ModelLimits { max_arity: 8 };

/// Random model on at most 5 elements with up to two binary and two unary
/// relations.
pub fn random_model(rng: &mut ChaCha8Rng) -> FiniteModel {
    let n = rng.random_range(1..=5);
    let mut m = FiniteModel::with_limits(n, WIDE).unwrap();
    let binaries = rng.random_range(0..=2);
    let unaries = rng.random_range(0..=2);
    for b in 0..binaries {
        let density = rng.random_range(0.1..0.6);
        let mut tuples = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if rng.random_bool(density) {
                    tuples.push(vec![x, y]);
                }
            }
        }
        m.add_relation(format!("E{b}"), 2, tuples).unwrap();
    }
    for u in 0..unaries {
        let tuples = (0..n).filter(|_| rng.random_bool(0.4)).map(|x| vec![x]).collect();
        m.add_relation(format!("P{u}"), 1, tuples).unwrap();
    }
    m
}

/// Every model on `n` elements whose vocabulary is `unaries` unary relations.
pub fn unary_models(n: usize, unaries: usize) -> Vec<FiniteModel> {
    let total = 1usize << (n * unaries);
    (0..total)
        .map(|code| {
            let mut m = FiniteModel::with_limits(n, WIDE).unwrap();
            for u in 0..unaries {
                let bits = code >> (u * n);
                let tuples = (0..n).filter(|x| bits >> x & 1 == 1).map(|x| vec![x]).collect();
                m.add_relation(format!("P{u}"), 1, tuples).unwrap();
            }
            m
        })
        .collect()
}

/// Random two-sorted model with sorts of the given sizes: an optional random
/// binary base relation and colors from a palette of one or two.
pub fn random_two_sorted(rng: &mut ChaCha8Rng, n1: usize, n2: usize) -> sqrank::rectrank::TwoSortedModel {
    let n = n1 + n2;
    let mut base = FiniteModel::with_limits(n, WIDE).unwrap();
    if rng.random_bool(0.5) {
        let mut tuples = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if rng.random_bool(0.3) {
                    tuples.push(vec![x, y]);
                }
            }
        }
        base.add_relation("E", 2, tuples).unwrap();
    }
    let palette = rng.random_range(1..=2);
    let bias = rng.random_range(0.6..1.0);
    let colors = (0..n1)
        .map(|_| (0..n2).map(|_| if palette == 1 || rng.random_bool(bias) { 0 } else { 1 }).collect())
        .collect();
    let aux = rng.random_bool(0.3).then(|| (0..n).filter(|_| rng.random_bool(0.5)).collect());
    sqrank::rectrank::TwoSortedModel::new(base, (0..n1).collect(), (n1..n).collect(), colors, Some(palette), aux)
        .unwrap()
}

/// Random family of `1..=max_trees` trees, each the downward closure of a
/// random set of leaf pairs at full depth.
pub fn random_family(rng: &mut ChaCha8Rng, depth: usize, max_trees: usize) -> sqrank::tree::TreeFamily {
    use sqrank::tree::{BinStr, TreeFamily};
    let count = rng.random_range(1..=max_trees);
    let leaves = BinStr::all(depth);
    let trees = (0..count)
        .map(|_| {
            let density = rng.random_range(0.05..0.5);
            let mut pairs = Vec::new();
            for &a in &leaves {
                for &b in &leaves {
                    if a == b && rng.random_bool(0.7) || rng.random_bool(density) {
                        pairs.push((a, b));
                    }
                }
            }
            pairs
        })
        .collect();
    TreeFamily::from_leaves(depth, trees).unwrap()
}

pub fn random_souslin(rng: &mut ChaCha8Rng, depth: usize, kappa: usize) -> sqrank::tree::SouslinFamily {
    use sqrank::tree::{all_words, BinStr, SouslinFamily};
    let density = rng.random_range(0.1..0.6);
    let strings = BinStr::all(depth);
    let mut leaves = Vec::new();
    for &a in &strings {
        for &b in &strings {
            for r in all_words(depth, kappa) {
                if rng.random_bool(if a == b { 0.6 } else { density / kappa as f64 }) {
                    leaves.push((a, b, r));
                }
            }
        }
    }
    SouslinFamily::from_leaves(depth, kappa, leaves).unwrap()
}

pub fn random_rect_tree(rng: &mut ChaCha8Rng, depth: usize, branching: usize) -> sqrank::tree::RectTree {
    use sqrank::tree::{all_words, RectTree};
    let density = rng.random_range(0.1..0.7);
    let words = all_words(depth, branching);
    let mut leaves = vec![(vec![0; depth], vec![0; depth])];
    for a in &words {
        for b in &words {
            if rng.random_bool(density) {
                leaves.push((a.clone(), b.clone()));
            }
        }
    }
    RectTree::from_leaves(depth, branching, leaves).unwrap()
}
