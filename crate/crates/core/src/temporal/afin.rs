//! The two-element template `A^fin` and the free-set oracle built on it.
//!
//! Domain element 0 (`Z`) stands for the class `{0}`, 1 (`P`) for the
//! positive rationals.

use std::cell::OnceCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::polyengine::{boolean_classify, schaefer_solve, BooleanClass};
use crate::relstruct::{hom_search, FiniteStructure, Instance, Tuple};

use super::relation::{TemporalRelation, TemporalTemplate};
use super::weak_order::WeakOrderType;

pub const Z: usize = 0;
pub const P: usize = 1;
/// Names of the unary relations `{Z}` and `{P}`.
pub const NAME_Z: &str = "$Z";
pub const NAME_P: &str = "$P";

/// `R^fin`: the zero patterns of nonnegative tuples in `R`. A nonnegative
/// tuple of a given type is either all positive or has its zeros exactly on
/// the minimal block.
pub fn fin_relation(rel: &TemporalRelation) -> BTreeSet<Tuple> {
    let mut out = BTreeSet::new();
    for t in rel.types() {
        out.insert(vec![P; t.arity()]);
        out.insert(
            t.levels()
                .iter()
                .map(|&l| if l == 0 { Z } else { P })
                .collect(),
        );
    }
    out
}

pub fn build_afin(template: &TemporalTemplate) -> FiniteStructure {
    let mut s = FiniteStructure::new(2).expect("two elements");
    s.add_relation(NAME_Z, 1, vec![vec![Z]]).expect("fresh");
    s.add_relation(NAME_P, 1, vec![vec![P]]).expect("fresh");
    for (name, rel) in template.relations() {
        s.add_relation(name, rel.arity(), fin_relation(rel))
            .expect("template names are distinct");
    }
    s
}

/// An instance with every constraint carrying its own type set over
/// pairwise distinct variables.
#[derive(Clone, Debug)]
pub(crate) struct Work {
    /// Original variables behind each local variable; more than one after
    /// equalities have been merged.
    pub vars: Vec<Vec<usize>>,
    pub constraints: Vec<(Vec<usize>, Rc<TemporalRelation>)>,
    fin: OnceCell<Fin>,
}

/// `A^fin` restricted to the relations of one `Work`, with the constraint
/// relation names and the chosen Schaefer class.
#[derive(Clone, Debug)]
struct Fin {
    structure: FiniteStructure,
    names: Vec<String>,
    class: Option<BooleanClass>,
}

/// Folds repeated variables of a scope into the type set: `R(x,x,y)` becomes
/// `R'(x,y)` with the types of `R` that are equal on positions 1 and 2,
/// restricted to positions 1 and 3.
fn fold(scope: &[usize], rel: &TemporalRelation) -> (Vec<usize>, TemporalRelation) {
    let mut distinct: Vec<usize> = Vec::new();
    let mut firsts: Vec<usize> = Vec::new();
    let mut pattern: Vec<usize> = Vec::new();
    for (i, &v) in scope.iter().enumerate() {
        match distinct.iter().position(|&w| w == v) {
            Some(j) => pattern.push(j),
            None => {
                pattern.push(distinct.len());
                distinct.push(v);
                firsts.push(i);
            }
        }
    }
    if distinct.len() == scope.len() {
        return (distinct, rel.clone());
    }
    let types = rel
        .types()
        .iter()
        .filter(|t| t.respects_repeats(&pattern))
        .map(|t| t.restrict(&firsts));
    let folded = TemporalRelation::new(firsts.len(), types).expect("uniform arity");
    (distinct, folded)
}

impl Work {
    pub fn new(vars: Vec<Vec<usize>>, constraints: Vec<(Vec<usize>, Rc<TemporalRelation>)>) -> Work {
        Work { vars, constraints, fin: OnceCell::new() }
    }

    pub fn from_instance(instance: &Instance, template: &TemporalTemplate) -> Result<Work> {
        instance.check_signature(|name| template.relation(name).map(TemporalRelation::arity))?;
        let mut shared: HashMap<&str, Rc<TemporalRelation>> = HashMap::new();
        let mut constraints = Vec::new();
        for c in instance.constraints() {
            let base = template.relation(&c.relation).expect("signature checked");
            let (scope, rel) = fold(&c.scope, base);
            let rel = if scope.len() == c.scope.len() {
                shared
                    .entry(c.relation.as_str())
                    .or_insert_with(|| Rc::new(base.clone()))
                    .clone()
            } else {
                Rc::new(rel)
            };
            constraints.push((scope, rel));
        }
        Ok(Work::new(
            (0..instance.variables().len()).map(|v| vec![v]).collect(),
            constraints,
        ))
    }

    /// Identifies variables: `rep[v]` is the new index of `v`, and the new
    /// indices run over `0..count`.
    pub fn merge(&self, rep: &[usize], count: usize) -> Work {
        let mut vars = vec![Vec::new(); count];
        for (v, &r) in rep.iter().enumerate() {
            vars[r].extend(self.vars[v].iter().copied());
        }
        let constraints = self
            .constraints
            .iter()
            .map(|(scope, rel)| {
                let mapped: Vec<usize> = scope.iter().map(|&v| rep[v]).collect();
                let (s, r) = fold(&mapped, rel);
                if s.len() == scope.len() {
                    (s, rel.clone())
                } else {
                    (s, Rc::new(r))
                }
            })
            .collect();
        Work::new(vars, constraints)
    }

    /// Pairs of variables that every type of some constraint puts on the
    /// same level.
    pub fn locally_forced_equalities(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (scope, rel) in &self.constraints {
            if rel.is_empty() {
                continue;
            }
            for i in 0..scope.len() {
                for j in i + 1..scope.len() {
                    if rel.types().iter().all(|t| t.level(i) == t.level(j)) {
                        out.push((scope[i], scope[j]));
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn reversed(&self) -> Work {
        Work::new(
            self.vars.clone(),
            self.constraints
                .iter()
                .map(|(s, r)| (s.clone(), Rc::new(r.reversed())))
                .collect(),
        )
    }

    /// Solves the instance over `A^fin` with the given pins and returns the
    /// `Z`-set. When `∧` is available the least solution is taken, which puts
    /// as many variables as possible into `Z`.
    fn fin(&self) -> Result<&Fin> {
        if let Some(fin) = self.fin.get() {
            return Ok(fin);
        }
        let mut structure = FiniteStructure::new(2)?;
        structure.add_relation(NAME_Z, 1, vec![vec![Z]])?;
        structure.add_relation(NAME_P, 1, vec![vec![P]])?;
        let mut seen: HashMap<*const TemporalRelation, String> = HashMap::new();
        let mut names = Vec::with_capacity(self.constraints.len());
        for (_, rel) in &self.constraints {
            let key = Rc::as_ptr(rel);
            if let Some(n) = seen.get(&key) {
                names.push(n.clone());
                continue;
            }
            let n = format!("c{}", seen.len());
            // a constraint disjoint from the free set imposes nothing,
            // even when its own relation is empty
            let mut tuples = fin_relation(rel);
            tuples.insert(vec![P; rel.arity()]);
            structure.add_relation(&n, rel.arity(), tuples)?;
            seen.insert(key, n.clone());
            names.push(n);
        }
        let class = BooleanClass::preferred(&boolean_classify(&structure)?);
        Ok(self.fin.get_or_init(|| Fin { structure, names, class }))
    }

    /// Solves the instance over `A^fin` with the given pins and returns the
    /// `Z`-set. When `∧` is available the least solution is taken, which puts
    /// as many variables as possible into `Z`.
    pub fn solve_fin(&self, pins: &[(usize, usize)]) -> Result<Option<BTreeSet<usize>>> {
        let fin = self.fin()?;
        let mut inst = Instance::with_anonymous_variables(self.len());
        for ((scope, _), name) in self.constraints.iter().zip(&fin.names) {
            inst.add_constraint_indices(name, scope.clone())?;
        }
        for &(v, value) in pins {
            inst.add_constraint_indices(if value == Z { NAME_Z } else { NAME_P }, vec![v])?;
        }
        let solution = match fin.class {
            Some(class) => schaefer_solve(&inst, &fin.structure, class)?,
            None => hom_search(&inst, &fin.structure)?,
        };
        Ok(solution.map(|a| {
            (0..self.len())
                .filter(|&v| a.value(v) == Z)
                .collect()
        }))
    }

    /// Direct check of the free-set definition.
    pub fn is_free(&self, set: &BTreeSet<usize>) -> bool {
        !set.is_empty()
            && self.constraints.iter().all(|(scope, rel)| {
                let inside: Vec<usize> = (0..scope.len())
                    .filter(|&i| set.contains(&scope[i]))
                    .collect();
                inside.is_empty() || rel.types().iter().any(|t| t.min_block() == inside)
            })
    }

    pub fn free_set_containing(&self, x: usize) -> Result<Option<BTreeSet<usize>>> {
        self.solve_fin(&[(x, Z)])
    }

    /// Shrinks a free set until no proper subset is free.
    pub fn minimal_free_set(&self, set: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        if !self.is_free(set) {
            return Err(Error::NotFree);
        }
        let mut current = set.clone();
        'shrink: loop {
            for &x in &current {
                for &y in &current {
                    if x == y {
                        continue;
                    }
                    let mut pins = vec![(x, Z), (y, P)];
                    pins.extend((0..self.len()).filter(|v| !current.contains(v)).map(|v| (v, P)));
                    if let Some(smaller) = self.solve_fin(&pins)? {
                        current = smaller;
                        continue 'shrink;
                    }
                }
            }
            return Ok(current);
        }
    }

    /// The smallest free set containing `x`; unique because free sets of an
    /// instance over an `LL`-closed template are closed under intersection.
    /// Elsewhere it is one inclusion-minimal choice.
    pub fn minimal_free_set_containing(&self, x: usize) -> Result<Option<BTreeSet<usize>>> {
        let Some(mut current) = self.free_set_containing(x)? else {
            return Ok(None);
        };
        'shrink: loop {
            for &y in &current {
                if y == x {
                    continue;
                }
                let mut pins = vec![(x, Z), (y, P)];
                pins.extend((0..self.len()).filter(|v| !current.contains(v)).map(|v| (v, P)));
                if let Some(smaller) = self.solve_fin(&pins)? {
                    current = smaller;
                    continue 'shrink;
                }
            }
            return Ok(Some(current));
        }
    }

    /// Commits `set` as the lowest level and projects the constraints onto
    /// the remaining variables. `None` if some constraint cannot put exactly
    /// its `set` variables at its minimum.
    pub fn project_out(&self, set: &BTreeSet<usize>) -> Option<Work> {
        let keep: Vec<usize> = (0..self.len()).filter(|v| !set.contains(v)).collect();
        let new_index: HashMap<usize, usize> =
            keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut constraints = Vec::new();
        for (scope, rel) in &self.constraints {
            let inside: Vec<usize> = (0..scope.len())
                .filter(|&i| set.contains(&scope[i]))
                .collect();
            if inside.is_empty() {
                let s = scope.iter().map(|v| new_index[v]).collect();
                constraints.push((s, rel.clone()));
                continue;
            }
            let outside: Vec<usize> = (0..scope.len())
                .filter(|&i| !set.contains(&scope[i]))
                .collect();
            let types: Vec<WeakOrderType> = rel
                .types()
                .iter()
                .filter(|t| t.min_block() == inside)
                .map(|t| t.restrict(&outside))
                .collect();
            if types.is_empty() {
                return None;
            }
            if outside.is_empty() {
                continue;
            }
            let s = outside.iter().map(|&i| new_index[&scope[i]]).collect();
            let r = TemporalRelation::new(outside.len(), types).expect("uniform arity");
            constraints.push((s, Rc::new(r)));
        }
        Some(Work::new(
            keep.iter().map(|&v| self.vars[v].clone()).collect(),
            constraints,
        ))
    }
}

fn var_index(instance: &Instance, name: &str) -> Result<usize> {
    instance
        .var_index(name)
        .ok_or_else(|| Error::UnknownVariable(name.to_string()))
}

fn names(instance: &Instance, set: &BTreeSet<usize>) -> BTreeSet<String> {
    set.iter().map(|&v| instance.variables()[v].clone()).collect()
}

/// A free set containing `x`, or `None`. When `A^fin` is `∧`-closed this is
/// the largest one.
pub fn free_set_containing(
    instance: &Instance,
    template: &TemporalTemplate,
    x: &str,
) -> Result<Option<BTreeSet<String>>> {
    let x = var_index(instance, x)?;
    let work = Work::from_instance(instance, template)?;
    Ok(work.free_set_containing(x)?.map(|s| names(instance, &s)))
}

/// Shrinks a free set to one with no proper free subset.
pub fn minimal_free_set(
    instance: &Instance,
    template: &TemporalTemplate,
    set: &BTreeSet<String>,
) -> Result<BTreeSet<String>> {
    let indices = set
        .iter()
        .map(|n| var_index(instance, n))
        .collect::<Result<BTreeSet<usize>>>()?;
    let work = Work::from_instance(instance, template)?;
    Ok(names(instance, &work.minimal_free_set(&indices)?))
}

/// Whether the named variables form a free set.
pub fn is_free_set(
    instance: &Instance,
    template: &TemporalTemplate,
    set: &BTreeSet<String>,
) -> Result<bool> {
    let indices = set
        .iter()
        .map(|n| var_index(instance, n))
        .collect::<Result<BTreeSet<usize>>>()?;
    Ok(Work::from_instance(instance, template)?.is_free(&indices))
}
