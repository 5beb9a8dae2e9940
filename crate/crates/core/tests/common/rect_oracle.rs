//! Direct recursion for the rectangle rank, with its own notion of type.

use std::collections::HashMap;

use sqrank::rectrank::TwoSortedModel;

use super::rank_oracle::{injective, naive_type};

/// Truth table of the base relations, sort membership and every color fact
/// `F(t_i, t_j) = c` on the tuple.
fn full_type(m: &TwoSortedModel, t: &[usize]) -> Vec<bool> {
    let mut out = naive_type(m.base(), t).0;
    for &x in t {
        out.push(m.sort1().contains(&x));
        out.push(m.sort2().contains(&x));
        out.push(m.aux().is_some_and(|p| p.contains(&x)));
    }
    for &x in t {
        for &y in t {
            for c in 0..m.num_colors() {
                out.push(m.color(x, y) == Some(c));
            }
        }
    }
    out
}

fn orbit(m: &TwoSortedModel, a: usize, rest: &[usize]) -> usize {
    let mut t = vec![a];
    t.extend_from_slice(rest);
    let target = full_type(m, &t);
    (0..m.base().universe())
        .filter(|&x| {
            t[0] = x;
            full_type(m, &t) == target
        })
        .count()
}

pub struct RectOracle<'a> {
    m: &'a TwoSortedModel,
    variant: u8,
    k: usize,
    memo: HashMap<(Vec<usize>, i32), bool>,
}

impl<'a> RectOracle<'a> {
    pub fn new(m: &'a TwoSortedModel, variant: u8, k: usize) -> Self {
        RectOracle { m, variant, k, memo: HashMap::new() }
    }

    fn constant(&self, w: &[usize]) -> bool {
        let mut seen = None;
        for &a in w.iter().filter(|a| self.m.sort1().contains(a)) {
            for &b in w.iter().filter(|b| self.m.sort2().contains(b)) {
                let c = self.m.color(a, b);
                if seen.is_some() && seen != Some(c) {
                    return false;
                }
                seen = Some(c);
            }
        }
        true
    }

    pub fn rank(&mut self, w1: &[usize], w2: &[usize]) -> i32 {
        let mut w: Vec<usize> = w1.iter().chain(w2).copied().collect();
        w.sort();
        if !self.constant(&w) {
            return -2;
        }
        if !self.ge(&w, 0) {
            return -1;
        }
        let mut b = 0;
        while self.ge(&w, b + 1) {
            b += 1;
        }
        b
    }

    fn same_sort(&self, x: usize, y: usize) -> bool {
        self.m.sort1().contains(&x) == self.m.sort1().contains(&y)
    }

    fn pair_type(&self, x: usize, y: usize) -> Vec<bool> {
        if self.m.sort1().contains(&x) {
            full_type(self.m, &[x, y])
        } else {
            full_type(self.m, &[y, x])
        }
    }

    /// b realizes the cross part of the type of w.
    fn realizes(&self, w: &[usize], b: &[usize]) -> bool {
        (0..w.len()).all(|i| self.same_sort(w[i], b[i]))
            && (0..w.len()).all(|i| {
                (0..w.len()).all(|j| self.same_sort(w[i], w[j]) || self.pair_type(w[i], w[j]) == self.pair_type(b[i], b[j]))
            })
    }

    fn ge(&mut self, w: &[usize], beta: i32) -> bool {
        if let Some(&v) = self.memo.get(&(w.to_vec(), beta)) {
            return v;
        }
        let v = if beta == 0 {
            self.constant(w)
                && (0..w.len()).all(|i| {
                    let rest: Vec<usize> = w.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
                    orbit(self.m, w[i], &rest) >= self.k
                })
        } else {
            self.ge(w, beta - 1) && (0..w.len()).all(|k| self.witness(w, k, beta - 1))
        };
        self.memo.insert((w.to_vec(), beta), v);
        v
    }

    fn witness(&mut self, w: &[usize], k: usize, beta: i32) -> bool {
        let n = self.m.base().universe();
        let starts: Vec<Vec<usize>> = if self.variant == 0 {
            vec![w.to_vec()]
        } else {
            injective(n, w.len()).into_iter().filter(|b| self.realizes(w, b)).collect()
        };
        for b in starts {
            for y in 0..n {
                if b.contains(&y) {
                    continue;
                }
                let mut c = b.clone();
                c[k] = y;
                if !self.realizes(w, &c) {
                    continue;
                }
                let mut s: Vec<usize> = b.iter().copied().chain([y]).collect();
                s.sort();
                if self.ge(&s, beta) {
                    return true;
                }
            }
        }
        false
    }
}
