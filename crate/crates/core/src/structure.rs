//! Finite relational structures, canonical atomic types and the
//! quantifier-free closure operator.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Limits applied when a model is constructed or expanded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelLimits {
    pub max_arity: usize,
}

impl Default for ModelLimits {
    fn default() -> Self {
        ModelLimits { max_arity: 4 }
    }
}

/// A named relation. Tuples are kept sorted and duplicate free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    name: String,
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

impl Relation {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }
}

/// A finite relational structure with universe `0..universe`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModel {
    universe: usize,
    relations: Vec<Relation>,
    limits: ModelLimits,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationFile {
    name: String,
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    universe: usize,
    relations: Vec<RelationFile>,
}

impl FiniteModel {
    /// Model with no relations.
    pub fn new(universe: usize) -> Result<Self> {
        Self::with_limits(universe, ModelLimits::default())
    }

    pub fn with_limits(universe: usize, limits: ModelLimits) -> Result<Self> {
        if universe == 0 {
            return Err(Error::input("universe must be nonempty"));
        }
        Ok(FiniteModel {
            universe,
            relations: Vec::new(),
            limits,
        })
    }

    /// Every element named by its own singleton unary relation.
    pub fn all_constants(universe: usize) -> Result<Self> {
        let mut m = Self::new(universe)?;
        for a in 0..universe {
            m.add_relation(format!("c{a}"), 1, vec![vec![a]])?;
        }
        Ok(m)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn limits(&self) -> ModelLimits {
        self.limits
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    /// Adds a relation after validating names, arity and tuples.
    pub fn add_relation(
        &mut self,
        name: impl Into<String>,
        arity: usize,
        tuples: Vec<Vec<usize>>,
    ) -> Result<()> {
        let name = name.into();
        if arity == 0 {
            return Err(Error::input(format!("relation {name}: arity must be at least 1")));
        }
        if arity > self.limits.max_arity {
            return Err(Error::ArityOverflow {
                needed: arity,
                max: self.limits.max_arity,
            });
        }
        if self.relation(&name).is_some() {
            return Err(Error::input(format!("duplicate relation name {name}")));
        }
        let mut seen = BTreeSet::new();
        for t in &tuples {
            if t.len() != arity {
                return Err(Error::input(format!(
                    "relation {name}: tuple {t:?} does not have arity {arity}"
                )));
            }
            if let Some(x) = t.iter().find(|&&x| x >= self.universe) {
                return Err(Error::input(format!(
                    "relation {name}: element {x} outside universe of size {}",
                    self.universe
                )));
            }
            if !seen.insert(t.clone()) {
                return Err(Error::input(format!("relation {name}: duplicate tuple {t:?}")));
            }
        }
        self.relations.push(Relation {
            name,
            arity,
            tuples: seen.into_iter().collect(),
        });
        Ok(())
    }

    pub fn with_relation(
        mut self,
        name: impl Into<String>,
        arity: usize,
        tuples: Vec<Vec<usize>>,
    ) -> Result<Self> {
        self.add_relation(name, arity, tuples)?;
        Ok(self)
    }

    pub fn from_json_str(text: &str, limits: ModelLimits) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::input(format!("model: {e}")))?;
        Self::from_json(value, limits)
    }

    pub fn from_json(value: serde_json::Value, limits: ModelLimits) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_value(value).map_err(|e| Error::input(format!("model: {e}")))?;
        let mut m = Self::with_limits(file.universe, limits)?;
        for r in file.relations {
            m.add_relation(r.name, r.arity, r.tuples)?;
        }
        Ok(m)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = ModelFile {
            universe: self.universe,
            relations: self
                .relations
                .iter()
                .map(|r| RelationFile {
                    name: r.name.clone(),
                    arity: r.arity,
                    tuples: r.tuples.clone(),
                })
                .collect(),
        };
        serde_json::to_value(file).expect("model serializes")
    }

    fn check_elements(&self, elems: &[usize]) -> Result<()> {
        match elems.iter().find(|&&x| x >= self.universe) {
            Some(x) => Err(Error::input(format!(
                "element {x} outside universe of size {}",
                self.universe
            ))),
            None => Ok(()),
        }
    }

    pub fn atomic_type(&self, tuple: &[usize]) -> Result<AtomicType> {
        self.check_elements(tuple)?;
        Ok(self.type_of(tuple))
    }

    /// Complete quantifier-free type; entries must already be in range.
    ///
    /// Cost is linear in the total number of stored tuples: only tuples whose
    /// entries all occur in `tuple` can contribute a positive fact.
    pub(crate) fn type_of(&self, tuple: &[usize]) -> AtomicType {
        let mut distinct: Vec<usize> = Vec::with_capacity(tuple.len());
        let mut pattern = Vec::with_capacity(tuple.len());
        for &x in tuple {
            let class = match distinct.iter().position(|&d| d == x) {
                Some(c) => c,
                None => {
                    distinct.push(x);
                    distinct.len() - 1
                }
            };
            pattern.push(class as u8);
        }
        let mut facts = Vec::new();
        let mut buf: Vec<Vec<u8>> = Vec::new();
        for rel in &self.relations {
            buf.clear();
            'tuples: for t in &rel.tuples {
                let mut mapped = Vec::with_capacity(t.len());
                for x in t {
                    match distinct.iter().position(|d| d == x) {
                        Some(c) => mapped.push(c as u8),
                        None => continue 'tuples,
                    }
                }
                buf.push(mapped);
            }
            buf.sort_unstable();
            facts.push(buf.len() as u32);
            facts.push(rel.arity as u32);
            for m in &buf {
                facts.extend(m.iter().map(|&c| c as u32));
            }
        }
        AtomicType { pattern, facts }
    }

    /// Number of elements `x` with the same type as `a` over the increasing
    /// enumeration of `b`.
    pub fn orbit_size(&self, a: usize, b: &[usize]) -> Result<usize> {
        self.check_elements(&[a])?;
        self.check_elements(b)?;
        let params: Vec<usize> = b.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        Ok(self.orbit_unchecked(a, &params))
    }

    pub(crate) fn orbit_unchecked(&self, a: usize, params: &[usize]) -> usize {
        let mut tuple = Vec::with_capacity(params.len() + 1);
        tuple.push(a);
        tuple.extend_from_slice(params);
        let target = self.type_of(&tuple);
        (0..self.universe)
            .filter(|&x| {
                tuple[0] = x;
                self.type_of(&tuple) == target
            })
            .count()
    }

    pub fn in_closure(&self, a: usize, b: &[usize], thr: ClosureThreshold) -> Result<bool> {
        Ok(self.orbit_size(a, b)? < thr.k())
    }
}

/// Canonical complete quantifier-free type of a tuple.
///
/// Positions are grouped into equality classes numbered by first occurrence;
/// for each relation the type stores the sorted list of class tuples on which
/// the relation holds. Two tuples get equal values exactly when they satisfy
/// the same atomic formulas.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicType {
    pattern: Vec<u8>,
    facts: Vec<u32>,
}

impl AtomicType {
    pub fn tuple_len(&self) -> usize {
        self.pattern.len()
    }

    /// Partition of positions into equality classes.
    pub fn equality_pattern(&self) -> Vec<Vec<usize>> {
        let classes = self.pattern.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut out = vec![Vec::new(); classes];
        for (pos, &c) in self.pattern.iter().enumerate() {
            out[c as usize].push(pos);
        }
        out
    }

    /// Whether relation number `rel` holds at the given positions.
    pub fn holds(&self, rel: usize, positions: &[usize]) -> bool {
        let want: Vec<u32> = positions.iter().map(|&p| self.pattern[p] as u32).collect();
        let mut i = 0;
        for r in 0.. {
            if i >= self.facts.len() {
                return false;
            }
            let (count, arity) = (self.facts[i] as usize, self.facts[i + 1] as usize);
            i += 2;
            if r == rel {
                return arity == want.len()
                    && self.facts[i..i + count * arity]
                        .chunks(arity)
                        .any(|c| c == want.as_slice());
            }
            i += count * arity;
        }
        unreachable!()
    }
}

/// The closure threshold `k`: an element is closed over `B` when fewer than
/// `k` elements share its type over `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct ClosureThreshold(usize);

impl ClosureThreshold {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::input("closure threshold must be at least 2"));
        }
        Ok(ClosureThreshold(k))
    }

    pub fn k(self) -> usize {
        self.0
    }
}

impl Default for ClosureThreshold {
    fn default() -> Self {
        ClosureThreshold(2)
    }
}

impl TryFrom<usize> for ClosureThreshold {
    type Error = Error;
    fn try_from(k: usize) -> Result<Self> {
        Self::new(k)
    }
}

impl From<ClosureThreshold> for usize {
    fn from(t: ClosureThreshold) -> usize {
        t.0
    }
}
