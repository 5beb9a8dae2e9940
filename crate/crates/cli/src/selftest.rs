//! Invariant checks on seeded samples, small enough to run in seconds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sqrank::builder::{build_family, DEFAULT_BUDGET};
use sqrank::coloring::{embeds_patterns, PairColoring};
use sqrank::encode::SquareWitness;
use sqrank::rank::{expand_witness_model, model_rank, rank_table, RankParams};
use sqrank::search::{extract_square_chain, find_free_set, find_max_square, ChainMode, ChainOutcome, FiniteFunction};
use sqrank::structure::{ClosureThreshold, FiniteModel, ModelLimits};
use sqrank::tree::{BinStr, TreeAutomorphism, TreeFamily};
use sqrank::treedeg::{degsq_family, degsq_pair, DegValue, PfapEntry};

use crate::report::{Failure, Outcome};

type Check = Result<usize, String>;

fn params(l: u8) -> RankParams {
    RankParams::new(l, ClosureThreshold::default()).expect("variants 0..=3 are valid")
}

fn random_model(r: &mut ChaCha8Rng) -> FiniteModel {
    let n = r.random_range(1..=5);
    let mut m = FiniteModel::with_limits(n, ModelLimits { max_arity: 8 }).unwrap();
    for b in 0..r.random_range(0..=2) {
        let tuples = (0..n * n).filter(|_| r.random_bool(0.35)).map(|i| vec![i / n, i % n]).collect();
        m.add_relation(format!("E{b}"), 2, tuples).unwrap();
    }
    for u in 0..r.random_range(0..=1) {
        let tuples = (0..n).filter(|_| r.random_bool(0.4)).map(|x| vec![x]).collect();
        m.add_relation(format!("P{u}"), 1, tuples).unwrap();
    }
    m
}

fn random_family(r: &mut ChaCha8Rng, depth: usize, max_trees: usize) -> TreeFamily {
    let leaves = BinStr::all(depth);
    let trees = (0..r.random_range(1..=max_trees))
        .map(|_| {
            let density = r.random_range(0.2..0.7);
            leaves
                .iter()
                .flat_map(|&a| leaves.iter().map(move |&b| (a, b)))
                .filter(|_| r.random_bool(density))
                .collect()
        })
        .collect();
    TreeFamily::from_leaves(depth, trees).unwrap()
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..1 << n).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

fn fail<T>(msg: String) -> Result<T, String> {
    Err(msg)
}

fn closed_forms() -> Check {
    for n in 1..=6 {
        let m = FiniteModel::all_constants(n).unwrap();
        let r = model_rank(&m, &params(0)).map_err(|e| e.to_string())?;
        if r != 0 {
            return fail(format!("all-constants model on {n} elements has rank {r}"));
        }
    }
    for n in 2..=6 {
        let r = model_rank(&FiniteModel::new(n).unwrap(), &params(0)).map_err(|e| e.to_string())?;
        if r != n as i32 - 1 {
            return fail(format!("empty vocabulary on {n} elements has rank {r}"));
        }
    }
    Ok(11)
}

fn rank_monotonicity(r: &mut ChaCha8Rng, cases: usize) -> Check {
    for _ in 0..cases {
        let m = random_model(r);
        let tabs: Vec<_> = (0..4).map(|l| rank_table(&m, &params(l)).unwrap()).collect();
        let sets = subsets(m.universe());
        for w in &sets {
            let v: Vec<i32> = tabs.iter().map(|t| t.value(w).unwrap()).collect();
            if !(v[2] <= v[0] && v[0] <= v[1] && v[3] <= v[1]) {
                return fail(format!("variants out of order at {w:?}: {v:?}"));
            }
            for x in 0..m.universe() {
                if w.contains(&x) {
                    continue;
                }
                let mut bigger = w.clone();
                bigger.push(x);
                bigger.sort();
                if tabs[0].value(&bigger).unwrap() > v[0] {
                    return fail(format!("adding {x} to {w:?} raised the rank"));
                }
            }
        }
    }
    Ok(cases)
}

fn expansion_bound(r: &mut ChaCha8Rng, cases: usize) -> Check {
    for _ in 0..cases {
        let m = random_model(r);
        let plus = expand_witness_model(&m, &params(0)).map_err(|e| e.to_string())?;
        let (a, b) = (rank_table(&m, &params(0)).unwrap(), rank_table(&plus, &params(1)).unwrap());
        for w in subsets(m.universe()) {
            if b.value(&w).unwrap() > a.value(&w).unwrap() {
                return fail(format!("expansion raised {w:?}"));
            }
        }
    }
    Ok(cases)
}

fn builder_degrees() -> Check {
    for alpha in 0..=3 {
        let fam = build_family(alpha, DEFAULT_BUDGET).map_err(|e| e.to_string())?.family;
        let d = degsq_family(&fam);
        if d != DegValue::Fin(alpha as i64) {
            return fail(format!("family built for {alpha} measures {d}"));
        }
    }
    Ok(4)
}

fn degree_symmetries(r: &mut ChaCha8Rng, cases: usize) -> Check {
    for _ in 0..cases {
        let depth = r.random_range(2..=4);
        let fam = random_family(r, depth, 2);
        let vals: Vec<DegValue> = (1..=depth).map(|k| degsq_family(&fam.truncate(k).unwrap())).collect();
        if vals.windows(2).any(|w| w[0] > w[1]) {
            return fail(format!("truncations decrease: {vals:?}"));
        }
        let swaps: Vec<BinStr> = (0..depth).flat_map(BinStr::all).filter(|_| r.random_bool(0.5)).collect();
        let moved = fam.map(&TreeAutomorphism::new(swaps));
        for c in 0..fam.num_trees() {
            let (a, b) = (degsq_pair(&fam, &PfapEntry::root(c)), degsq_pair(&moved, &PfapEntry::root(c)));
            if a != b {
                return fail(format!("automorphism moved the degree of tree {c}"));
            }
        }
    }
    Ok(cases)
}

fn extraction_coherence(r: &mut ChaCha8Rng, cases: usize) -> Check {
    for _ in 0..cases {
        let depth = r.random_range(2..=4);
        let fam = random_family(r, depth, 2);
        let best = find_max_square(&fam, None).map_err(|e| e.to_string())?;
        let Some(w) = best.witness.clone() else { continue };
        let pts: Vec<BinStr> = w.points().iter().copied().filter(|_| r.random_bool(0.8)).collect();
        if pts.is_empty() {
            continue;
        }
        let w = SquareWitness::minimal(&fam, pts).map_err(|e| e.to_string())?;
        let d = r.random_range(1..=2);
        let out = extract_square_chain(&fam, &w, d, 1, ChainMode::Witness).map_err(|e| e.to_string())?;
        if matches!(out, ChainOutcome::Chain(_)) && best.size() < 1 << d {
            return fail(format!("chain of depth {d} but the largest square has {}", best.size()));
        }
    }
    let diag = TreeFamily::diagonal(3).unwrap();
    let w = SquareWitness::minimal(&diag, vec![BinStr::zeros(3)]).unwrap();
    if let ChainOutcome::Chain(_) = extract_square_chain(&diag, &w, 1, 1, ChainMode::Witness).unwrap() {
        return fail("the diagonal yielded a chain".into());
    }
    Ok(cases + 1)
}

fn free_sets(r: &mut ChaCha8Rng, cases: usize) -> Check {
    for _ in 0..cases {
        let n: usize = r.random_range(1..=6);
        let fs: Vec<FiniteFunction> = (0..r.random_range(0..=2))
            .map(|_| {
                let arity = r.random_range(0..=2);
                let table = (0..n.pow(arity as u32)).map(|_| r.random_range(0..n)).collect();
                FiniteFunction::new(n, arity, table).unwrap()
            })
            .collect();
        let m = r.random_range(0..=n);
        let Some(s) = find_free_set(n, &fs, m).map_err(|e| e.to_string())? else { continue };
        if s.len() != m || s.windows(2).any(|w| w[0] >= w[1]) {
            return fail(format!("{s:?} is not an increasing set of size {m}"));
        }
        // pairs and triples of distinct members
        for f in &fs {
            for &a in &s {
                for &b in &s {
                    let hit = match f.arity {
                        0 => f.apply(n, &[]) == a,
                        1 => a != b && f.apply(n, &[a]) == b,
                        _ => s.iter().any(|&c| a != b && c != a && c != b && f.apply(n, &[a, b]) == c),
                    };
                    if hit {
                        return fail(format!("{s:?} is not free"));
                    }
                }
            }
        }
    }
    Ok(cases)
}

fn embedding_reflexive(r: &mut ChaCha8Rng, cases: usize) -> Check {
    for _ in 0..cases {
        let n = r.random_range(1..=5);
        let colors = (0..n * (n - 1) / 2).map(|_| r.random_range(0..3)).collect();
        let c = PairColoring::new(n, colors).unwrap();
        if !embeds_patterns(&c, &c, n).embeds {
            return fail(format!("{:?} does not embed in itself", c.colors()));
        }
    }
    Ok(cases)
}

pub fn run(seed: u64, cases: usize) -> Result<Outcome, Failure> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let results: Vec<(&str, Check)> = vec![
        ("closed_form_ranks", closed_forms()),
        ("rank_monotonicity", rank_monotonicity(&mut r, cases)),
        ("expansion_bound", expansion_bound(&mut r, cases)),
        ("builder_degrees", builder_degrees()),
        ("degree_symmetries", degree_symmetries(&mut r, cases)),
        ("extraction_coherence", extraction_coherence(&mut r, cases)),
        ("free_sets", free_sets(&mut r, cases)),
        ("embedding_reflexive", embedding_reflexive(&mut r, cases)),
    ];
    let ok = results.iter().all(|(_, c)| c.is_ok());
    let checks: Vec<Value> = results
        .into_iter()
        .map(|(name, c)| match c {
            Ok(n) => json!({ "name": name, "passed": true, "cases": n }),
            Err(why) => json!({ "name": name, "passed": false, "detail": why }),
        })
        .collect();
    Ok(Outcome { ok, result: json!({ "seed": seed, "checks": checks }), certificate: Value::Null })
}
