//! Direct top-down evaluation of the rank definition.
//!
//! Types are compared as explicit truth tables over every position map, and
//! `rk(w) >= β` is decided recursively with memoization on `(w, β)`.

use std::collections::HashMap;

use sqrank::structure::FiniteModel;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NaiveType(pub Vec<bool>);

pub fn naive_type(m: &FiniteModel, tuple: &[usize]) -> NaiveType {
    let n = tuple.len();
    let mut bits = Vec::new();
    for i in 0..n {
        for j in 0..n {
            bits.push(tuple[i] == tuple[j]);
        }
    }
    for rel in m.relations() {
        let r = rel.arity();
        let total = n.pow(r as u32);
        for code in 0..total {
            let mut c = code;
            let mut args = Vec::with_capacity(r);
            for _ in 0..r {
                args.push(tuple[c % n]);
                c /= n;
            }
            bits.push(rel.contains(&args));
        }
    }
    NaiveType(bits)
}

pub fn naive_orbit(m: &FiniteModel, a: usize, params: &[usize]) -> usize {
    let mut t = vec![a];
    t.extend_from_slice(params);
    let target = naive_type(m, &t);
    (0..m.universe())
        .filter(|&x| {
            t[0] = x;
            naive_type(m, &t) == target
        })
        .count()
}

pub struct RankOracle<'a> {
    m: &'a FiniteModel,
    variant: u8,
    k: usize,
    t: usize,
    memo: HashMap<(Vec<usize>, i32), bool>,
}

impl<'a> RankOracle<'a> {
    pub fn new(m: &'a FiniteModel, variant: u8, k: usize, t: usize) -> Self {
        RankOracle {
            m,
            variant,
            k,
            t,
            memo: HashMap::new(),
        }
    }

    pub fn rank(&mut self, w: &[usize]) -> i32 {
        let mut w = w.to_vec();
        w.sort();
        if !self.ge(&w, 0) {
            return -1;
        }
        let mut beta = 0;
        while self.ge(&w, beta + 1) {
            beta += 1;
        }
        beta
    }

    fn ge(&mut self, w: &[usize], beta: i32) -> bool {
        if let Some(&v) = self.memo.get(&(w.to_vec(), beta)) {
            return v;
        }
        let v = if beta == 0 {
            (0..w.len()).all(|i| {
                let rest: Vec<usize> = w.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
                naive_orbit(self.m, w[i], &rest) >= self.k
            })
        } else {
            self.ge(w, beta - 1) && (0..w.len()).all(|k| self.witness(w, k, beta - 1))
        };
        self.memo.insert((w.to_vec(), beta), v);
        v
    }

    fn set_ge(&mut self, elems: impl IntoIterator<Item = usize>, beta: i32) -> bool {
        let mut s: Vec<usize> = elems.into_iter().collect();
        s.sort();
        s.dedup();
        self.ge(&s, beta)
    }

    /// Whether position `k` of the increasing enumeration of `w` admits a
    /// witness configuration whose sets all have rank at least `beta`.
    fn witness(&mut self, w: &[usize], k: usize, beta: i32) -> bool {
        let m = self.m;
        let n = m.universe();
        let phi = naive_type(m, w);
        let realizes = |t: &[usize]| naive_type(m, t) == phi;
        match self.variant {
            0 => (0..n).filter(|x| !w.contains(x)).any(|x| {
                let mut b = w.to_vec();
                b[k] = x;
                realizes(&b) && self.set_ge(w.iter().copied().chain([x]), beta)
            }),
            1 => {
                let tuples = injective(n, w.len());
                for b in &tuples {
                    if !realizes(b) {
                        continue;
                    }
                    for y in 0..n {
                        if b.contains(&y) {
                            continue;
                        }
                        let mut c = b.clone();
                        c[k] = y;
                        if realizes(&c) && self.set_ge(b.iter().copied().chain([y]), beta) {
                            return true;
                        }
                    }
                }
                false
            }
            2 | 3 => {
                let starts: Vec<Vec<usize>> = if self.variant == 2 {
                    vec![w.to_vec()]
                } else {
                    injective(n, w.len()).into_iter().filter(|b| realizes(b)).collect()
                };
                for b in starts {
                    let ys: Vec<usize> = (0..n)
                        .filter(|y| !b.contains(y))
                        .filter(|&y| {
                            let mut c = b.clone();
                            c[k] = y;
                            realizes(&c)
                        })
                        .collect();
                    // copy 0 is b itself; pick t-1 further values at k
                    for others in combinations(&ys, self.t - 1) {
                        let mut vals = vec![b[k]];
                        vals.extend(others);
                        let rest: Vec<usize> =
                            b.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &x)| x).collect();
                        let mut ok = true;
                        'pairs: for i in 0..vals.len() {
                            for j in i + 1..vals.len() {
                                if !self.set_ge(rest.iter().copied().chain([vals[i], vals[j]]), beta) {
                                    ok = false;
                                    break 'pairs;
                                }
                            }
                        }
                        if ok {
                            return true;
                        }
                    }
                }
                false
            }
            v => panic!("oracle has no variant {v}"),
        }
    }
}

pub fn injective(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in 0..n {
            if !cur.contains(&x) {
                cur.push(x);
                go(n, len, cur, out);
                cur.pop();
            }
        }
    }
    go(n, len, &mut Vec::new(), &mut out);
    out
}

pub fn combinations(items: &[usize], r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        for mut rest in combinations(&items[i + 1..], r - 1) {
            rest.insert(0, items[i]);
            out.push(rest);
        }
    }
    out
}

/// All nonempty subsets of `0..n`, as sorted vectors.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..1 << n)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}
