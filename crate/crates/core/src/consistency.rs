//! The (k,l)-local-consistency procedure.
//!
//! For every set `S` of at most `k` variables the engine keeps the set of
//! local configurations still considered possible on `S`. Looking at `l`
//! variables at a time, a configuration on `S` survives only if it extends
//! to a configuration on every `l`-set `L ⊇ S` that satisfies the
//! constraints inside `L` and agrees with every stored set inside `L`.
//!
//! "Local configuration" is abstracted by [`LocalTemplate`]: a partial
//! assignment for a finite template, a weak order for a temporal template,
//! a labeled type for a tournament or graph template. Over the infinite
//! templates this is the usual orbit-based reading of the algorithm.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::relstruct::{FiniteStructure, Instance, Relation, Tuple};

/// A template seen through its local configurations.
pub trait LocalTemplate {
    type Local: Clone + Eq + Hash + Ord + Debug;

    fn relation_arity(&self, name: &str) -> Option<usize>;

    /// Every configuration on `m` variables (positions `0..m`).
    fn locals(&self, m: usize) -> Result<Vec<Self::Local>>;

    /// The configuration induced on the listed positions; repeated
    /// positions denote equal variables.
    fn restrict(&self, local: &Self::Local, positions: &[usize]) -> Self::Local;

    /// Whether a configuration of the relation's arity belongs to it.
    fn admits(&self, relation: &str, local: &Self::Local) -> bool;
}

impl LocalTemplate for FiniteStructure {
    type Local = Tuple;

    fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relation(name).map(Relation::arity)
    }

    fn locals(&self, m: usize) -> Result<Vec<Tuple>> {
        let d = self.domain_size();
        let total = d
            .checked_pow(m as u32)
            .filter(|&t| t <= 1 << 22)
            .ok_or_else(|| Error::BudgetExceeded(format!("{d}^{m} local assignments")))?;
        Ok((0..total)
            .map(|code| crate::relstruct::decode_tuple(code, m, d))
            .collect())
    }

    fn restrict(&self, local: &Tuple, positions: &[usize]) -> Tuple {
        positions.iter().map(|&p| local[p]).collect()
    }

    fn admits(&self, relation: &str, local: &Tuple) -> bool {
        self.relation(relation).is_some_and(|r| r.contains(local))
    }
}

/// Surviving configurations per variable set (sorted variable indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyState<L> {
    pub k: usize,
    pub l: usize,
    pub sets: BTreeMap<Vec<usize>, BTreeSet<L>>,
}

impl<L> ConsistencyState<L> {
    pub fn total_configurations(&self) -> usize {
        self.sets.values().map(BTreeSet::len).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Consistency<L> {
    Consistent(ConsistencyState<L>),
    /// Some variable set lost all its configurations.
    EmptyDerived { subset: Vec<usize> },
}

impl<L> Consistency<L> {
    pub fn is_empty_derived(&self) -> bool {
        matches!(self, Consistency::EmptyDerived { .. })
    }
}

/// Establishes (k,l)-consistency.
///
/// When the instance has fewer than `l` variables the engine looks at all
/// of them at once (and likewise caps `k`), so `(3,9)` on a six-variable
/// instance runs as `(3,6)`.
pub fn establish_kl<T: LocalTemplate>(
    instance: &Instance,
    template: &T,
    k: usize,
    l: usize,
) -> Result<Consistency<T::Local>> {
    if k == 0 || k > l {
        return Err(Error::Parameter(format!(
            "need 1 <= k <= l, got k={k}, l={l}"
        )));
    }
    instance.check_signature(|name| template.relation_arity(name))?;
    let n = instance.variables().len();
    if n == 0 {
        return Ok(Consistency::Consistent(ConsistencyState {
            k,
            l,
            sets: BTreeMap::new(),
        }));
    }
    let l_eff = l.min(n);
    let k_eff = k.min(l_eff);

    let mut by_size: Vec<Vec<T::Local>> = vec![Vec::new(); l_eff + 1];
    for (m, slot) in by_size.iter_mut().enumerate().skip(1) {
        if m <= k_eff || m == l_eff {
            *slot = template.locals(m)?;
        }
    }

    let inside = |set: &[usize]| -> Vec<(&str, Vec<usize>)> {
        instance
            .constraints()
            .iter()
            .filter_map(|c| {
                let pos: Option<Vec<usize>> = c
                    .scope
                    .iter()
                    .map(|v| set.iter().position(|x| x == v))
                    .collect();
                pos.map(|p| (c.relation.as_str(), p))
            })
            .collect()
    };

    let small_sets: Vec<Vec<usize>> = (1..=k_eff).flat_map(|m| combinations(n, m)).collect();
    let mut store: BTreeMap<Vec<usize>, HashSet<T::Local>> = BTreeMap::new();
    for s in &small_sets {
        let cons = inside(s);
        let allowed: HashSet<T::Local> = by_size[s.len()]
            .iter()
            .filter(|loc| {
                cons.iter()
                    .all(|(r, p)| template.admits(r, &template.restrict(loc, p)))
            })
            .cloned()
            .collect();
        if allowed.is_empty() {
            return Ok(Consistency::EmptyDerived { subset: s.clone() });
        }
        store.insert(s.clone(), allowed);
    }

    struct Window {
        constraints: Vec<(String, Vec<usize>)>,
        subsets: Vec<(Vec<usize>, Vec<usize>)>,
    }
    let windows: Vec<Window> = combinations(n, l_eff)
        .into_iter()
        .map(|big| {
            let constraints = inside(&big)
                .into_iter()
                .map(|(r, p)| (r.to_string(), p))
                .collect();
            let subsets = small_sets
                .iter()
                .filter(|s| s.iter().all(|v| big.contains(v)))
                .map(|s| {
                    let pos = s
                        .iter()
                        .map(|v| big.iter().position(|x| x == v).unwrap())
                        .collect();
                    (s.clone(), pos)
                })
                .collect();
            Window {
                constraints,
                subsets,
            }
        })
        .collect();

    let mut changed = true;
    while changed {
        changed = false;
        for w in &windows {
            let survivors: Vec<&T::Local> = by_size[l_eff]
                .iter()
                .filter(|loc| {
                    w.constraints
                        .iter()
                        .all(|(r, p)| template.admits(r, &template.restrict(loc, p)))
                })
                .filter(|loc| {
                    w.subsets
                        .iter()
                        .all(|(s, p)| store[s].contains(&template.restrict(loc, p)))
                })
                .collect();
            for (s, p) in &w.subsets {
                let supported: HashSet<T::Local> = survivors
                    .iter()
                    .map(|loc| template.restrict(loc, p))
                    .collect();
                let entry = store.get_mut(s).expect("all small sets stored");
                let before = entry.len();
                entry.retain(|loc| supported.contains(loc));
                if entry.is_empty() {
                    return Ok(Consistency::EmptyDerived { subset: s.clone() });
                }
                if entry.len() != before {
                    changed = true;
                }
            }
        }
    }

    Ok(Consistency::Consistent(ConsistencyState {
        k,
        l,
        sets: store
            .into_iter()
            .map(|(s, set)| (s, set.into_iter().collect()))
            .collect(),
    }))
}

/// All `m`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..m).collect();
    loop {
        out.push(cur.clone());
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - m + i {
                cur[i] += 1;
                for j in i + 1..m {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}
