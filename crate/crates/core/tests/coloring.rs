mod common;

use std::collections::BTreeSet;

use common::gen::rng;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use sqrank::coloring::{coloring_classes, embeds_patterns, rank_transfer_experiment, PairColoring};
use sqrank::rank::RankParams;
use sqrank::structure::ClosureThreshold;

fn random_coloring(r: &mut impl Rng, n: usize, colors: u32) -> PairColoring {
    let v = (0..n * n.saturating_sub(1) / 2).map(|_| r.random_range(0..colors)).collect();
    PairColoring::new(n, v).unwrap()
}

fn all_colorings(n: usize, colors: u32) -> Vec<PairColoring> {
    let pairs = n * n.saturating_sub(1) / 2;
    (0..colors.pow(pairs as u32))
        .map(|mut code| {
            let v = (0..pairs)
                .map(|_| {
                    let d = code % colors;
                    code /= colors;
                    d
                })
                .collect();
            PairColoring::new(n, v).unwrap()
        })
        .collect()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Every set of at most `m` source points maps injectively into the target
/// with matching colors, tried over all ordered choices of target points.
fn embeds_naive(t: &PairColoring, s: &PairColoring, m: usize) -> bool {
    (1u32..1 << s.size()).all(|mask| {
        let a: Vec<usize> = (0..s.size()).filter(|i| mask >> i & 1 == 1).collect();
        if a.len() > m {
            return true;
        }
        (1u32..1 << t.size()).filter(|b| b.count_ones() as usize == a.len()).any(|b| {
            let img: Vec<usize> = (0..t.size()).filter(|i| b >> i & 1 == 1).collect();
            permutations(&img).iter().any(|f| {
                (0..a.len()).all(|i| (0..a.len()).all(|j| i == j || t.color(f[i], f[j]) == s.color(a[i], a[j])))
            })
        })
    })
}

fn classes_up_to(n: usize, colors: u32) -> Vec<PairColoring> {
    (1..=n).flat_map(|k| coloring_classes(k, colors)).collect()
}

#[test]
fn embedding_matches_naive_check() {
    let mut r = rng(31);
    for _ in 0..300 {
        let (n, m) = (r.random_range(1..=4), r.random_range(1..=4));
        let colors = r.random_range(1..=3);
        let t = random_coloring(&mut r, n, colors);
        let s = random_coloring(&mut r, m, colors);
        let k = r.random_range(1..=4);
        assert_eq!(embeds_patterns(&t, &s, k).embeds, embeds_naive(&t, &s, k), "{t:?} {s:?} {k}");
    }
}

#[test]
fn reflexive_on_every_coloring() {
    for n in 1..=4 {
        for c in all_colorings(n, 3) {
            assert!(embeds_patterns(&c, &c, n).embeds, "{c:?}");
        }
    }
}

#[test]
fn relabeling_does_not_matter() {
    // so the laws below may be checked on one coloring per class
    let mut r = rng(32);
    for _ in 0..100 {
        let n = r.random_range(1..=4);
        let c = random_coloring(&mut r, n, 3);
        let m = r.random_range(1..=4);
        let d = random_coloring(&mut r, m, 3);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let c2 = c.restrict(&perm).unwrap();
        assert_eq!(embeds_patterns(&c, &d, 4).embeds, embeds_patterns(&c2, &d, 4).embeds);
        assert_eq!(embeds_patterns(&d, &c, 4).embeds, embeds_patterns(&d, &c2, 4).embeds);
        assert_eq!(c.canonical(), c2.canonical());
    }
}

#[test]
fn transitive_over_classes() {
    let cls = classes_up_to(4, 3);
    let e: Vec<Vec<bool>> = cls
        .iter()
        .map(|t| cls.iter().map(|s| embeds_patterns(t, s, s.size()).embeds).collect())
        .collect();
    for a in 0..cls.len() {
        for b in 0..cls.len() {
            if !e[a][b] {
                continue;
            }
            for c in 0..cls.len() {
                if e[b][c] {
                    assert!(e[a][c], "{:?} {:?} {:?}", cls[a], cls[b], cls[c]);
                }
            }
        }
    }
}

#[test]
fn restriction_and_pattern_size_are_monotone() {
    let cls = classes_up_to(4, 3);
    for t in &cls {
        for s in &cls {
            let full = embeds_patterns(t, s, s.size()).embeds;
            for k in 1..=s.size() {
                if full {
                    assert!(embeds_patterns(t, s, k).embeds);
                }
            }
            if !full {
                continue;
            }
            for mask in 1u32..1 << s.size() {
                let sub: Vec<usize> = (0..s.size()).filter(|i| mask >> i & 1 == 1).collect();
                let part = s.restrict(&sub).unwrap();
                assert!(embeds_patterns(t, &part, part.size()).embeds);
            }
        }
    }
}

#[test]
fn class_representatives_are_canonical_and_complete() {
    for (n, colors) in [(3, 2), (3, 3), (4, 2)] {
        let expect: BTreeSet<Vec<u32>> = all_colorings(n, colors).iter().map(|c| c.canonical()).collect();
        let got: BTreeSet<Vec<u32>> = coloring_classes(n, colors).iter().map(|c| c.colors().to_vec()).collect();
        assert_eq!(got, expect);
    }
}

#[test]
fn failing_pattern_is_reported() {
    let t = PairColoring::constant(4, 0);
    let s = PairColoring::from_fn(3, |a, _| a as u32);
    let r = embeds_patterns(&t, &s, 3);
    assert!(!r.embeds);
    let bad = r.failing_pattern.unwrap();
    let pattern = s.restrict(&bad).unwrap();
    assert!(!embeds_naive(&t, &pattern, pattern.size()));
}

#[test]
fn transfer_experiment_runs() {
    let p = RankParams::new(0, ClosureThreshold::default()).unwrap();
    let rows = rank_transfer_experiment(3, 2, &p).unwrap();
    assert_eq!(rows.len(), 9);
    for row in rows {
        assert_eq!(row.pairs, row.source_not_higher + row.source_higher);
        if row.source_size > row.target_size {
            assert_eq!(row.pairs, 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(n in 0usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_coloring(&mut r, n, 4);
        let back = PairColoring::from_json_str(&c.to_json().to_string()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn restriction_embeds_in_the_whole(n in 1usize..=5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_coloring(&mut r, n, 3);
        let sub: Vec<usize> = (0..n).filter(|_| r.random_bool(0.6)).collect();
        prop_assume!(!sub.is_empty());
        let part = c.restrict(&sub).unwrap();
        prop_assert!(embeds_patterns(&c, &part, part.size()).embeds);
    }
}
