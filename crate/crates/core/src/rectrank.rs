//! The rectangle rank `rkrc` over finite two-sorted models.
//!
//! Sorts, colors and the optional designated predicate are folded into a
//! single relational view: unary `@sort1`, `@sort2`, `@aux` and one binary
//! `@F{c}` per color on cross pairs. Closure is computed in that view and the
//! witness formula is the conjunction of the complete 2-types of the cross
//! pairs, which carries sort membership and colors along.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank::{members, MAX_RANK_UNIVERSE};
use crate::structure::{ClosureThreshold, FiniteModel, ModelLimits};

/// Value of a pair on which the coloring is not constant.
pub const NOT_MONOCHROMATIC: i32 = -2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSortedModel {
    base: FiniteModel,
    sort1: Vec<usize>,
    sort2: Vec<usize>,
    colors: Vec<Vec<usize>>,
    num_colors: usize,
    aux: Option<Vec<usize>>,
    view: FiniteModel,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoSortedFile {
    universe: usize,
    relations: serde_json::Value,
    sort1: Vec<usize>,
    sort2: Vec<usize>,
    colors: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    num_colors: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aux: Option<Vec<usize>>,
}

impl TwoSortedModel {
    /// `colors[i][j]` is the color of `(sort1[i], sort2[j])`. Sorts are
    /// normalized to increasing order. The palette is `0..num_colors`, by
    /// default one past the largest color used.
    pub fn new(
        base: FiniteModel,
        sort1: Vec<usize>,
        sort2: Vec<usize>,
        colors: Vec<Vec<usize>>,
        num_colors: Option<usize>,
        aux: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = base.universe();
        for (name, s) in [("sort1", &sort1), ("sort2", &sort2)] {
            if s.is_empty() {
                return Err(Error::input(format!("{name} must be nonempty")));
            }
            let mut sorted = s.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != s.len() {
                return Err(Error::input(format!("{name} repeats an element")));
            }
            if let Some(x) = s.iter().find(|&&x| x >= n) {
                return Err(Error::input(format!("{name}: element {x} outside universe")));
            }
        }
        if let Some(x) = sort1.iter().find(|x| sort2.contains(x)) {
            return Err(Error::input(format!("element {x} is in both sorts")));
        }
        if colors.len() != sort1.len() || colors.iter().any(|row| row.len() != sort2.len()) {
            return Err(Error::input(format!(
                "colors must be a {}x{} matrix",
                sort1.len(),
                sort2.len()
            )));
        }
        let used = colors.iter().flatten().map(|&c| c + 1).max().unwrap_or(0);
        let num_colors = num_colors.unwrap_or(used);
        if used > num_colors {
            return Err(Error::input(format!("color {} outside palette of {num_colors}", used - 1)));
        }
        if let Some(p) = &aux {
            if let Some(x) = p.iter().find(|&&x| x >= n) {
                return Err(Error::input(format!("aux: element {x} outside universe")));
            }
        }
        // reorder the matrix along with the sorts
        let mut order1: Vec<usize> = (0..sort1.len()).collect();
        order1.sort_by_key(|&i| sort1[i]);
        let mut order2: Vec<usize> = (0..sort2.len()).collect();
        order2.sort_by_key(|&j| sort2[j]);
        let colors: Vec<Vec<usize>> = order1
            .iter()
            .map(|&i| order2.iter().map(|&j| colors[i][j]).collect())
            .collect();
        let sort1: Vec<usize> = order1.iter().map(|&i| sort1[i]).collect();
        let sort2: Vec<usize> = order2.iter().map(|&j| sort2[j]).collect();

        let limits = ModelLimits {
            max_arity: base.limits().max_arity.max(2),
        };
        let mut view = FiniteModel::with_limits(n, limits)?;
        for r in base.relations() {
            view.add_relation(r.name(), r.arity(), r.tuples().to_vec())?;
        }
        view.add_relation("@sort1", 1, sort1.iter().map(|&a| vec![a]).collect())?;
        view.add_relation("@sort2", 1, sort2.iter().map(|&b| vec![b]).collect())?;
        if let Some(p) = &aux {
            let mut p = p.clone();
            p.sort();
            p.dedup();
            view.add_relation("@aux", 1, p.into_iter().map(|a| vec![a]).collect())?;
        }
        for c in 0..num_colors {
            let mut tuples = Vec::new();
            for (i, &a) in sort1.iter().enumerate() {
                for (j, &b) in sort2.iter().enumerate() {
                    if colors[i][j] == c {
                        tuples.push(vec![a, b]);
                    }
                }
            }
            if !tuples.is_empty() {
                view.add_relation(format!("@F{c}"), 2, tuples)?;
            }
        }
        Ok(TwoSortedModel {
            base,
            sort1,
            sort2,
            colors,
            num_colors,
            aux,
            view,
        })
    }

    pub fn base(&self) -> &FiniteModel {
        &self.base
    }

    pub fn sort1(&self) -> &[usize] {
        &self.sort1
    }

    pub fn sort2(&self) -> &[usize] {
        &self.sort2
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn aux(&self) -> Option<&[usize]> {
        self.aux.as_deref()
    }

    /// The single-sorted structure in which types and closure are computed.
    pub fn view(&self) -> &FiniteModel {
        &self.view
    }

    pub fn color(&self, a: usize, b: usize) -> Option<usize> {
        let i = self.sort1.iter().position(|&x| x == a)?;
        let j = self.sort2.iter().position(|&x| x == b)?;
        Some(self.colors[i][j])
    }

    /// The color matrix in sort order.
    pub fn colors(&self) -> &[Vec<usize>] {
        &self.colors
    }

    pub fn from_json_str(text: &str, limits: ModelLimits) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::input(format!("two-sorted model: {e}")))?;
        Self::from_json(value, limits)
    }

    pub fn from_json(value: serde_json::Value, limits: ModelLimits) -> Result<Self> {
        let file: TwoSortedFile = serde_json::from_value(value)
            .map_err(|e| Error::input(format!("two-sorted model: {e}")))?;
        let base = FiniteModel::from_json(
            serde_json::json!({"universe": file.universe, "relations": file.relations}),
            limits,
        )?;
        Self::new(base, file.sort1, file.sort2, file.colors, file.num_colors, file.aux)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let base = self.base.to_json();
        serde_json::to_value(TwoSortedFile {
            universe: self.base.universe(),
            relations: base["relations"].clone(),
            sort1: self.sort1.clone(),
            sort2: self.sort2.clone(),
            colors: self.colors.clone(),
            num_colors: Some(self.num_colors),
            aux: self.aux.clone(),
        })
        .expect("model serializes")
    }

    fn sort_masks(&self) -> (u64, u64) {
        let m1 = self.sort1.iter().fold(0u64, |m, &a| m | 1 << a);
        let m2 = self.sort2.iter().fold(0u64, |m, &b| m | 1 << b);
        (m1, m2)
    }

    fn constant_color_mask(&self, mask: u64) -> Option<usize> {
        let mut c = None;
        for (i, &a) in self.sort1.iter().enumerate() {
            if mask >> a & 1 == 0 {
                continue;
            }
            for (j, &b) in self.sort2.iter().enumerate() {
                if mask >> b & 1 == 0 {
                    continue;
                }
                match c {
                    None => c = Some(self.colors[i][j]),
                    Some(prev) if prev != self.colors[i][j] => return None,
                    _ => {}
                }
            }
        }
        c
    }
}

/// A pair of nonempty sets, one in each sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectPair {
    w1: Vec<usize>,
    w2: Vec<usize>,
    constant_color: Option<usize>,
}

impl RectPair {
    pub fn new(model: &TwoSortedModel, w1: &[usize], w2: &[usize]) -> Result<Self> {
        if w1.is_empty() || w2.is_empty() {
            return Err(Error::input("both sides of a pair must be nonempty"));
        }
        if let Some(a) = w1.iter().find(|a| !model.sort1.contains(a)) {
            return Err(Error::input(format!("{a} is not in sort1")));
        }
        if let Some(b) = w2.iter().find(|b| !model.sort2.contains(b)) {
            return Err(Error::input(format!("{b} is not in sort2")));
        }
        let mut w1 = w1.to_vec();
        w1.sort();
        w1.dedup();
        let mut w2 = w2.to_vec();
        w2.sort();
        w2.dedup();
        let mask = w1.iter().chain(&w2).fold(0u64, |m, &x| m | 1 << x);
        Ok(RectPair {
            constant_color: model.constant_color_mask(mask),
            w1,
            w2,
        })
    }

    pub fn w1(&self) -> &[usize] {
        &self.w1
    }

    pub fn w2(&self) -> &[usize] {
        &self.w2
    }

    pub fn constant_color(&self) -> Option<usize> {
        self.constant_color
    }

    fn mask(&self) -> u64 {
        self.w1.iter().chain(&self.w2).fold(0u64, |m, &x| m | 1 << x)
    }
}

/// `rkrc` of every pair of the model, indexed by the union bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectTable {
    values: Vec<i8>,
    colors: Vec<Option<usize>>,
    sort_masks: (u64, u64),
}

const UNSET: i8 = i8::MIN;

impl RectTable {
    pub fn value(&self, pair: &RectPair) -> i32 {
        self.values[pair.mask() as usize] as i32
    }

    /// All pairs with their constant color (if any) and value, by bitmask.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, Vec<usize>, Option<usize>, i32)> + '_ {
        let (s1, s2) = self.sort_masks;
        (1..self.values.len() as u64)
            .filter(move |m| m & s1 != 0 && m & s2 != 0 && m & !(s1 | s2) == 0)
            .map(move |m| {
                (
                    members(m & s1),
                    members(m & s2),
                    self.colors[m as usize],
                    self.values[m as usize] as i32,
                )
            })
    }

    /// Sup of `value + 1` over the pairs of constant color `c`.
    pub fn model_at(&self, c: usize) -> i32 {
        self.entries()
            .filter(|e| e.2 == Some(c))
            .map(|e| e.3 + 1)
            .max()
            .unwrap_or(0)
            .max(0)
    }
}

fn check(model: &TwoSortedModel, variant: u8) -> Result<()> {
    if variant > 1 {
        return Err(Error::input("rectangle ranks are implemented for variants 0 and 1"));
    }
    if model.base.universe() > MAX_RANK_UNIVERSE {
        return Err(Error::TooLarge(format!(
            "rank tables are limited to universes of at most {MAX_RANK_UNIVERSE} elements"
        )));
    }
    Ok(())
}

pub fn rkrc_table(model: &TwoSortedModel, variant: u8, closure: ClosureThreshold) -> Result<RectTable> {
    check(model, variant)?;
    Ok(compute(model, variant, closure, 0))
}

pub fn rkrc_of_pair(
    model: &TwoSortedModel,
    pair: &RectPair,
    variant: u8,
    closure: ClosureThreshold,
) -> Result<i32> {
    check(model, variant)?;
    let mask = pair.mask();
    // variant 0 witnesses only add elements
    let floor = if variant == 0 { mask } else { 0 };
    Ok(compute(model, variant, closure, floor).values[mask as usize] as i32)
}

pub fn rkrc_model_at(
    model: &TwoSortedModel,
    c: usize,
    variant: u8,
    closure: ClosureThreshold,
) -> Result<i32> {
    if c >= model.num_colors {
        return Err(Error::input(format!("unknown color {c}")));
    }
    Ok(rkrc_table(model, variant, closure)?.model_at(c))
}

pub fn prrd_check(model: &TwoSortedModel, alpha: i32, variant: u8, closure: ClosureThreshold) -> Result<bool> {
    let table = rkrc_table(model, variant, closure)?;
    Ok((0..model.num_colors).any(|c| table.model_at(c) >= alpha))
}

fn compute(model: &TwoSortedModel, variant: u8, closure: ClosureThreshold, floor: u64) -> RectTable {
    let n = model.base.universe();
    let (s1, s2) = model.sort_masks();
    let mut values = vec![UNSET; 1 << n];
    let mut colors = vec![None; 1 << n];
    let mut layers: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    for mask in 1..(1u64 << n) {
        if mask & s1 != 0 && mask & s2 != 0 && mask & !(s1 | s2) == 0 && mask & floor == floor {
            layers[mask.count_ones() as usize].push(mask);
            colors[mask as usize] = model.constant_color_mask(mask);
        }
    }
    for layer in layers.iter().rev() {
        let computed: Vec<i8> = layer
            .par_iter()
            .map(|&mask| eval(model, variant, closure, &values, mask, colors[mask as usize]))
            .collect();
        for (&mask, v) in layer.iter().zip(computed) {
            values[mask as usize] = v;
        }
    }
    RectTable {
        values,
        colors,
        sort_masks: (s1, s2),
    }
}

fn eval(
    model: &TwoSortedModel,
    variant: u8,
    closure: ClosureThreshold,
    vals: &[i8],
    mask: u64,
    color: Option<usize>,
) -> i8 {
    if color.is_none() {
        return NOT_MONOCHROMATIC as i8;
    }
    let view = &model.view;
    let elems = members(mask);
    let mut rest = Vec::with_capacity(elems.len());
    for (i, &a) in elems.iter().enumerate() {
        rest.clear();
        rest.extend(elems.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
        if view.orbit_unchecked(a, &rest) < closure.k() {
            return -1;
        }
    }
    let (s1, _) = model.sort_masks();
    let in1 = |x: usize| s1 >> x & 1 == 1;
    let cross_type = |x: usize, y: usize| {
        if in1(x) {
            view.type_of(&[x, y])
        } else {
            view.type_of(&[y, x])
        }
    };
    // cross pairs of the enumeration and their types
    let cross: Vec<Vec<Option<crate::structure::AtomicType>>> = elems
        .iter()
        .map(|&x| {
            elems
                .iter()
                .map(|&y| (in1(x) != in1(y)).then(|| cross_type(x, y)))
                .collect()
        })
        .collect();
    let sort_pool = |x: usize| -> Vec<usize> {
        if in1(x) {
            model.sort1.clone()
        } else {
            model.sort2.clone()
        }
    };
    let val = |m: u64| vals[m as usize] as i32;

    let reals = (variant == 1).then(|| {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        realize(&elems, &cross, &sort_pool, &cross_type, &mut cur, &mut out);
        out
    });

    let mut least = i32::MAX;
    for pos in 0..elems.len() {
        let fits = |b: &[usize], y: usize| {
            (0..elems.len()).all(|j| match &cross[pos][j] {
                Some(t) => j == pos || cross_type(y, b[j]) == *t,
                None => true,
            })
        };
        let best = if variant == 0 {
            sort_pool(elems[pos])
                .into_iter()
                .filter(|&x| mask >> x & 1 == 0 && fits(&elems, x))
                .map(|x| val(mask | 1 << x))
                .max()
        } else {
            let mut best: Option<i32> = None;
            for b in reals.as_ref().expect("computed above") {
                let bm = b.iter().fold(0u64, |m, &x| m | 1 << x);
                for y in sort_pool(elems[pos]) {
                    if bm >> y & 1 == 0 && fits(b, y) {
                        best = best.max(Some(val(bm | 1 << y)));
                    }
                }
            }
            best
        };
        match best {
            Some(b) if b >= 0 => least = least.min(b),
            _ => return 0,
        }
    }
    (least + 1) as i8
}

type CrossTypes = Vec<Vec<Option<crate::structure::AtomicType>>>;

/// Injective, sort-respecting tuples with the same cross types as `elems`.
fn realize(
    elems: &[usize],
    cross: &CrossTypes,
    pool: &dyn Fn(usize) -> Vec<usize>,
    cross_type: &dyn Fn(usize, usize) -> crate::structure::AtomicType,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let i = cur.len();
    if i == elems.len() {
        out.push(cur.clone());
        return;
    }
    for x in pool(elems[i]) {
        if cur.contains(&x) {
            continue;
        }
        let ok = (0..i).all(|j| match &cross[i][j] {
            Some(t) => cross_type(x, cur[j]) == *t,
            None => true,
        });
        if ok {
            cur.push(x);
            realize(elems, cross, pool, cross_type, cur, out);
            cur.pop();
        }
    }
}
