//! Finite relational structures, constraint instances and exhaustive
//! homomorphism search.
//!
//! A [`FiniteStructure`] is a template over the domain `0..domain_size`. An
//! [`Instance`] names its variables and lists constraints by relation name;
//! the same instance type is reused by the temporal and homogeneous-base
//! solvers, which interpret relation names against their own templates.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};

pub type Tuple = Vec<usize>;

/// Largest power domain [`power_structure`] builds by default.
pub const DEFAULT_POWER_LIMIT: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Tuple>,
}

impl Relation {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.tuples
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// A finite relational template over `0..domain_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    domain_size: usize,
    relations: BTreeMap<String, Relation>,
}

impl FiniteStructure {
    pub fn new(domain_size: usize) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::Parameter("domain must be non-empty".into()));
        }
        Ok(FiniteStructure {
            domain_size,
            relations: BTreeMap::new(),
        })
    }

    /// Adds a relation, validating arity and range of every tuple.
    pub fn add_relation<I>(&mut self, name: &str, arity: usize, tuples: I) -> Result<()>
    where
        I: IntoIterator<Item = Tuple>,
    {
        if arity == 0 {
            return Err(Error::MalformedTuple {
                relation: name.into(),
                reason: "relations must have positive arity".into(),
            });
        }
        if self.relations.contains_key(name) {
            return Err(Error::Duplicate(name.into()));
        }
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::MalformedTuple {
                    relation: name.into(),
                    reason: format!("tuple {t:?} has length {}, expected {arity}", t.len()),
                });
            }
            if let Some(&bad) = t.iter().find(|&&v| v >= self.domain_size) {
                return Err(Error::MalformedTuple {
                    relation: name.into(),
                    reason: format!("entry {bad} outside domain 0..{}", self.domain_size),
                });
            }
            set.insert(t);
        }
        self.relations
            .insert(name.to_string(), Relation { arity, tuples: set });
        Ok(())
    }

    pub fn with_relation<I>(mut self, name: &str, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Tuple>,
    {
        self.add_relation(name, arity, tuples)?;
        Ok(self)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub relation: String,
    /// Indices into the instance's variable list; repeats are allowed.
    pub scope: Vec<usize>,
}

/// Variables plus constraints naming template relations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    variables: Vec<String>,
    constraints: Vec<Constraint>,
}

impl Instance {
    pub fn new<I, S>(variables: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vars: Vec<String> = Vec::new();
        for v in variables {
            let v = v.into();
            if vars.contains(&v) {
                return Err(Error::Duplicate(v));
            }
            vars.push(v);
        }
        Ok(Instance {
            variables: vars,
            constraints: Vec::new(),
        })
    }

    /// Instance with variables `v0, v1, …`.
    pub fn with_anonymous_variables(count: usize) -> Self {
        Instance {
            variables: (0..count).map(|i| format!("v{i}")).collect(),
            constraints: Vec::new(),
        }
    }

    pub fn add_constraint(&mut self, relation: &str, args: &[&str]) -> Result<()> {
        let scope = args
            .iter()
            .map(|a| {
                self.var_index(a)
                    .ok_or_else(|| Error::UnknownVariable((*a).to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        self.constraints.push(Constraint {
            relation: relation.to_string(),
            scope,
        });
        Ok(())
    }

    pub fn add_constraint_indices(&mut self, relation: &str, scope: Vec<usize>) -> Result<()> {
        if let Some(&bad) = scope.iter().find(|&&i| i >= self.variables.len()) {
            return Err(Error::UnknownVariable(format!("#{bad}")));
        }
        self.constraints.push(Constraint {
            relation: relation.to_string(),
            scope,
        });
        Ok(())
    }

    pub fn constrain(mut self, relation: &str, args: &[&str]) -> Result<Self> {
        self.add_constraint(relation, args)?;
        Ok(self)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Checks every constraint against a signature given as `name -> arity`.
    pub fn check_signature<F>(&self, arity_of: F) -> Result<()>
    where
        F: Fn(&str) -> Option<usize>,
    {
        for c in &self.constraints {
            let expected =
                arity_of(&c.relation).ok_or_else(|| Error::UnknownRelation(c.relation.clone()))?;
            if expected != c.scope.len() {
                return Err(Error::SignatureMismatch {
                    relation: c.relation.clone(),
                    expected,
                    found: c.scope.len(),
                });
            }
        }
        Ok(())
    }
}

/// A total map from the instance's variables (by position) to domain elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<usize>,
}

impl Assignment {
    pub fn new(values: Vec<usize>) -> Self {
        Assignment { values }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, var: usize) -> usize {
        self.values[var]
    }

    pub fn value_of(&self, instance: &Instance, name: &str) -> Option<usize> {
        instance.var_index(name).map(|i| self.values[i])
    }

    /// True iff every constraint's image lies in its relation.
    pub fn satisfies(&self, instance: &Instance, template: &FiniteStructure) -> bool {
        instance.constraints().iter().all(|c| {
            let image: Tuple = c.scope.iter().map(|&v| self.values[v]).collect();
            template
                .relation(&c.relation)
                .is_some_and(|r| r.contains(&image))
        })
    }

    /// `name=value` pairs in declaration order.
    pub fn display<'a>(&'a self, instance: &'a Instance) -> impl fmt::Display + 'a {
        DisplayAssignment {
            assignment: self,
            instance,
        }
    }
}

struct DisplayAssignment<'a> {
    assignment: &'a Assignment,
    instance: &'a Instance,
}

impl fmt::Display for DisplayAssignment<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, v)) in self
            .instance
            .variables()
            .iter()
            .zip(&self.assignment.values)
            .enumerate()
        {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{name}={v}")?;
        }
        Ok(())
    }
}

/// Backtracking search with forward checking.
///
/// Variables are tried in index order and values in ascending order, so the
/// first solution found is deterministic.
#[derive(Clone, Debug)]
pub(crate) struct SearchProblem {
    domain_size: usize,
    domains: Vec<Vec<bool>>,
    relations: Vec<HashSet<Tuple>>,
    constraints: Vec<(usize, Vec<usize>)>,
}

impl SearchProblem {
    pub(crate) fn new(variables: usize, domain_size: usize) -> Self {
        SearchProblem {
            domain_size,
            domains: vec![vec![true; domain_size]; variables],
            relations: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub(crate) fn from_instance(instance: &Instance, template: &FiniteStructure) -> Result<Self> {
        instance.check_signature(|name| template.relation(name).map(Relation::arity))?;
        let mut problem = SearchProblem::new(instance.variables().len(), template.domain_size());
        let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
        for c in instance.constraints() {
            let id = match ids.get(c.relation.as_str()) {
                Some(&id) => id,
                None => {
                    let rel = template.relation(&c.relation).expect("checked above");
                    let id = problem.add_relation(rel.tuples().iter().cloned().collect());
                    ids.insert(&c.relation, id);
                    id
                }
            };
            problem.add_constraint(id, c.scope.clone());
        }
        Ok(problem)
    }

    pub(crate) fn add_relation(&mut self, tuples: HashSet<Tuple>) -> usize {
        self.relations.push(tuples);
        self.relations.len() - 1
    }

    pub(crate) fn add_constraint(&mut self, relation: usize, scope: Vec<usize>) {
        self.constraints.push((relation, scope));
    }

    /// Restricts a variable to the given values.
    pub(crate) fn restrict(&mut self, var: usize, allowed: &[usize]) {
        let dom = &mut self.domains[var];
        for (v, slot) in dom.iter_mut().enumerate() {
            if !allowed.contains(&v) {
                *slot = false;
            }
        }
    }

    pub(crate) fn first_solution(&self) -> Option<Vec<usize>> {
        let mut found = None;
        self.for_each_solution(|s| {
            found = Some(s.to_vec());
            false
        });
        found
    }

    /// Calls `visit` on every solution until it returns `false`.
    pub(crate) fn for_each_solution<F>(&self, mut visit: F)
    where
        F: FnMut(&[usize]) -> bool,
    {
        let n = self.domains.len();
        let mut watches: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ci, (_, scope)) in self.constraints.iter().enumerate() {
            let mut seen: Vec<usize> = Vec::new();
            for &v in scope {
                if !seen.contains(&v) {
                    seen.push(v);
                    watches[v].push(ci);
                }
            }
        }
        let mut state = SearchState {
            problem: self,
            watches,
            values: vec![usize::MAX; n],
        };
        let mut domains = self.domains.clone();
        // Constraints over a single variable (or none) act on the initial domains.
        for ci in 0..self.constraints.len() {
            if !state.propagate(ci, &mut domains) {
                return;
            }
        }
        state.descend(0, domains, &mut visit);
    }
}

struct SearchState<'a> {
    problem: &'a SearchProblem,
    watches: Vec<Vec<usize>>,
    values: Vec<usize>,
}

impl SearchState<'_> {
    /// Returns false once the visitor asks to stop.
    fn descend<F>(&mut self, var: usize, domains: Vec<Vec<bool>>, visit: &mut F) -> bool
    where
        F: FnMut(&[usize]) -> bool,
    {
        if var == self.values.len() {
            return visit(&self.values);
        }
        for value in 0..self.problem.domain_size {
            if !domains[var][value] {
                continue;
            }
            self.values[var] = value;
            let mut next = domains.clone();
            next[var] = vec![false; self.problem.domain_size];
            next[var][value] = true;
            let ok = self.watches[var]
                .iter()
                .all(|&ci| self.propagate(ci, &mut next));
            if ok && !self.descend(var + 1, next, visit) {
                self.values[var] = usize::MAX;
                return false;
            }
        }
        self.values[var] = usize::MAX;
        true
    }

    /// Checks a constraint once all its variables are assigned, and prunes
    /// the last free variable once all others are. Returns false on a wipe-out.
    fn propagate(&self, ci: usize, domains: &mut [Vec<bool>]) -> bool {
        let (rel, scope) = &self.problem.constraints[ci];
        let tuples = &self.problem.relations[*rel];
        let mut free: Option<usize> = None;
        for &v in scope {
            if self.values[v] == usize::MAX {
                match free {
                    None => free = Some(v),
                    Some(f) if f == v => {}
                    Some(_) => return true,
                }
            }
        }
        let mut probe: Tuple = scope
            .iter()
            .map(|&v| self.values[v])
            .collect();
        match free {
            None => tuples.contains(&probe),
            Some(w) => {
                let mut any = false;
                for value in 0..self.problem.domain_size {
                    if !domains[w][value] {
                        continue;
                    }
                    for (slot, &v) in probe.iter_mut().zip(scope) {
                        if v == w {
                            *slot = value;
                        }
                    }
                    if tuples.contains(&probe) {
                        any = true;
                    } else {
                        domains[w][value] = false;
                    }
                }
                any
            }
        }
    }
}

/// Searches for a homomorphism from the instance to the template.
///
/// Returns `Ok(None)` when the instance is unsatisfiable.
pub fn hom_search(instance: &Instance, template: &FiniteStructure) -> Result<Option<Assignment>> {
    let problem = SearchProblem::from_instance(instance, template)?;
    Ok(problem.first_solution().map(Assignment::new))
}

/// Plain enumeration of all `|D|^|V|` assignments in lexicographic order.
pub fn exhaustive_search(
    instance: &Instance,
    template: &FiniteStructure,
) -> Result<Option<Assignment>> {
    instance.check_signature(|name| template.relation(name).map(Relation::arity))?;
    let n = instance.variables().len();
    let d = template.domain_size();
    let total = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > 1 << 24 {
        return Err(Error::BudgetExceeded(format!(
            "{d}^{n} assignments exceed exhaustive enumeration limit"
        )));
    }
    let mut values = vec![0usize; n];
    loop {
        let candidate = Assignment::new(values.clone());
        if candidate.satisfies(instance, template) {
            return Ok(Some(candidate));
        }
        // odometer, last variable fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            values[i] += 1;
            if values[i] < d {
                break;
            }
            values[i] = 0;
        }
    }
}

/// Row-major mixed-radix encoding of an `n`-tuple over `0..domain_size`.
pub fn encode_tuple(tuple: &[usize], domain_size: usize) -> usize {
    tuple.iter().fold(0, |acc, &c| acc * domain_size + c)
}

/// Inverse of [`encode_tuple`].
pub fn decode_tuple(mut code: usize, n: usize, domain_size: usize) -> Tuple {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = code % domain_size;
        code /= domain_size;
    }
    out
}

/// The `n`-th categorical power, with [`DEFAULT_POWER_LIMIT`] as budget.
pub fn power_structure(template: &FiniteStructure, n: usize) -> Result<FiniteStructure> {
    power_structure_with_limit(template, n, DEFAULT_POWER_LIMIT)
}

pub fn power_structure_with_limit(
    template: &FiniteStructure,
    n: usize,
    max_domain: usize,
) -> Result<FiniteStructure> {
    if n == 0 {
        return Err(Error::Parameter("power exponent must be at least 1".into()));
    }
    let d = template.domain_size();
    let size = d
        .checked_pow(n as u32)
        .filter(|&s| s <= max_domain)
        .ok_or_else(|| Error::BudgetExceeded(format!("{d}^{n} exceeds {max_domain}")))?;
    let mut power = FiniteStructure::new(size)?;
    for (name, rel) in template.relations() {
        let rows: Vec<&Tuple> = rel.tuples().iter().collect();
        let count = rows.len().checked_pow(n as u32).filter(|&c| c <= 1 << 22);
        let Some(count) = count else {
            return Err(Error::BudgetExceeded(format!(
                "|{name}|^{n} product tuples exceed limit"
            )));
        };
        let mut tuples = Vec::with_capacity(count);
        let mut choice = vec![0usize; n];
        for _ in 0..count {
            let tuple: Tuple = (0..rel.arity())
                .map(|j| {
                    let coords: Vec<usize> = choice.iter().map(|&c| rows[c][j]).collect();
                    encode_tuple(&coords, d)
                })
                .collect();
            tuples.push(tuple);
            for slot in choice.iter_mut().rev() {
                *slot += 1;
                if *slot < rows.len() {
                    break;
                }
                *slot = 0;
            }
        }
        power.add_relation(name, rel.arity(), tuples)?;
    }
    Ok(power)
}

/// Views a structure as an instance: one variable per element, one
/// constraint per tuple.
pub fn structure_as_instance(structure: &FiniteStructure) -> Instance {
    let mut instance = Instance::with_anonymous_variables(structure.domain_size());
    for (name, rel) in structure.relations() {
        for t in rel.tuples() {
            instance
                .add_constraint_indices(name, t.clone())
                .expect("tuple entries are in range");
        }
    }
    instance
}
