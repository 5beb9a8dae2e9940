//! Rank-versus-degree comparisons on induced models.

use sqrank::encode::{induced_model_from_square, induced_twosorted_from_rectangle, SquareWitness};
use sqrank::rank::{rank_table, RankParams};
use sqrank::rectrank::rkrc_table;
use sqrank::structure::{ClosureThreshold, ModelLimits};
use sqrank::tree::{BinStr, RectTree, TreeFamily, Word};
use sqrank::treedeg::{DegValue, PfapEntry, RectSolver, SquareSolver};

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << n).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

/// Every square of at most `max_points` full-depth strings, as a witness
/// with least-tree pairing.
pub fn square_witnesses(fam: &TreeFamily, max_points: usize) -> Vec<SquareWitness> {
    let mut leaves = BinStr::all(fam.depth());
    leaves.sort();
    let ok = |a: BinStr, b: BinStr| (0..fam.num_trees()).any(|t| fam.contains(t, a, b));
    subsets(leaves.len())
        .filter(|s| s.len() <= max_points)
        .map(|s| s.into_iter().map(|i| leaves[i]).collect::<Vec<_>>())
        .filter(|pts| pts.iter().all(|&a| pts.iter().all(|&b| ok(a, b))))
        .map(|pts| SquareWitness::minimal(fam, pts).unwrap())
        .collect()
}

/// For each subset `w` of the witness and each level below full depth at
/// which `w` has distinct prefixes, `rk^0(w)` in the induced model is at most
/// the degree of the entry read off `w` at that level. Returns the number of
/// comparisons made.
pub fn square_transfer(
    fam: &TreeFamily,
    solver: &mut SquareSolver,
    w: &SquareWitness,
) -> Result<usize, String> {
    let limits = ModelLimits { max_arity: w.len().max(1) };
    let model = induced_model_from_square(fam, w, limits).map_err(|e| e.to_string())?;
    let params = RankParams::new(0, ClosureThreshold::default()).unwrap();
    let table = rank_table(&model, &params).map_err(|e| e.to_string())?;
    let mut checks = 0;
    for s in subsets(w.len()) {
        let rank = table.value(&s).unwrap();
        for n in 0..fam.depth() {
            let u: Vec<BinStr> = s.iter().map(|&i| w.points()[i].prefix(n)).collect();
            if (0..u.len()).any(|i| u[..i].contains(&u[i])) {
                continue;
            }
            let g = s.iter().map(|&i| s.iter().map(|&j| w.pairing()[i][j]).collect()).collect();
            let entry = PfapEntry::new(u.clone(), g).unwrap();
            let deg = solver.degree(&entry).unwrap();
            checks += 1;
            if DegValue::Fin(rank as i64) > deg {
                return Err(format!(
                    "points {:?} of witness {:?}: rank {rank} exceeds degree {deg} at level {n}",
                    s,
                    w.points()
                ));
            }
        }
    }
    Ok(checks)
}

/// For each pair `(w1, w2)` of constant color `c` in the induced two-sorted
/// model, `rkrc(w1, w2)` is at most every `degrc` in tree `c` of prefixes of
/// nonempty `u1` in `w1`, `u2` in `w2` at a level below full depth where
/// both sides have distinct prefixes. Returns the number of pairs compared.
pub fn rect_transfer(trees: &[RectTree], left: &[Word], right: &[Word]) -> Result<usize, String> {
    let model = induced_twosorted_from_rectangle(trees, left, right).map_err(|e| e.to_string())?;
    let table = rkrc_table(&model, 0, ClosureThreshold::default()).map_err(|e| e.to_string())?;
    let mut solvers: Vec<RectSolver> = trees.iter().map(|t| RectSolver::new(t, false)).collect();
    let depth = trees[0].depth();
    let n1 = left.len();
    let mut checks = 0;
    for (w1, w2, color, value) in table.entries() {
        let Some(c) = color else { continue };
        let mut bound: Option<DegValue> = None;
        for u1 in subsets(w1.len()) {
            for u2 in subsets(w2.len()) {
                for k in 0..depth {
                    let p1: Vec<Word> = u1.iter().map(|&i| left[w1[i]][..k].to_vec()).collect();
                    let p2: Vec<Word> = u2.iter().map(|&j| right[w2[j] - n1][..k].to_vec()).collect();
                    let repeats = |p: &[Word]| (0..p.len()).any(|i| p[..i].contains(&p[i]));
                    if repeats(&p1) || repeats(&p2) {
                        continue;
                    }
                    let d = solvers[c].degree(&p1, &p2).map_err(|e| e.to_string())?;
                    bound = Some(bound.map_or(d, |b| b.min(d)));
                }
            }
        }
        let bound = bound.expect("single points at the root always qualify");
        checks += 1;
        if DegValue::Fin(value as i64) > bound {
            return Err(format!(
                "pair {w1:?} x {w2:?} of color {c}: rkrc {value} exceeds {bound}"
            ));
        }
    }
    Ok(checks)
}
