use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::consistency::LocalTemplate;
use crate::error::{Error, Result};
use crate::relstruct::Instance;

use super::types::{enumerate_types, Alphabet, Base, LabeledType, E, EQ, FWD, N};

/// A relation first-order definable in the base, as a set of complete types.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeSetRelation {
    arity: usize,
    base: Base,
    types: BTreeSet<LabeledType>,
}

impl TypeSetRelation {
    pub fn new<I>(base: Base, arity: usize, types: I) -> Result<Self>
    where
        I: IntoIterator<Item = LabeledType>,
    {
        if arity == 0 {
            return Err(Error::Parameter("relation arity must be positive".into()));
        }
        let types: BTreeSet<LabeledType> = types.into_iter().collect();
        for t in &types {
            if t.arity() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: t.arity(),
                });
            }
            if !base.admits(t) {
                return Err(Error::Parameter(format!("type `{t}` is not realized in {base}")));
            }
        }
        Ok(TypeSetRelation { arity, base, types })
    }

    /// Parses `;`-separated type literals.
    pub fn parse(base: Base, arity: usize, literal: &str) -> Result<Self> {
        let types = literal
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| LabeledType::parse_literal(base.alphabet(), arity, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, arity, types)
    }

    /// All types of the base satisfying a predicate.
    pub fn from_predicate<F>(base: Base, arity: usize, pred: F) -> Result<Self>
    where
        F: Fn(&LabeledType) -> bool,
    {
        let types = enumerate_types(arity, base)?.into_iter().filter(|t| pred(t));
        Self::new(base, arity, types)
    }

    /// The arc relation `{1->2}` or the edge relation `{E(1,2)}`.
    pub fn arc(base: Base) -> Self {
        Self::from_predicate(base, 2, |t| t.pair(0, 1) == FWD).expect("binary")
    }

    /// The non-edge relation `{N(1,2)}` of a graph base.
    pub fn non_edge(base: Base) -> Self {
        Self::from_predicate(base, 2, |t| t.pair(0, 1) == N).expect("binary")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn types(&self) -> &BTreeSet<LabeledType> {
        &self.types
    }

    pub fn contains(&self, t: &LabeledType) -> bool {
        self.types.contains(t)
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }
}

impl fmt::Display for TypeSetRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.types.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

/// A reduct of a base structure: named type-set relations over one base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomTemplate {
    base: Base,
    relations: BTreeMap<String, TypeSetRelation>,
}

impl HomTemplate {
    pub fn new<I, S>(base: Base, relations: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, TypeSetRelation)>,
        S: Into<String>,
    {
        let mut t = HomTemplate {
            base,
            relations: BTreeMap::new(),
        };
        for (name, rel) in relations {
            t = t.with(&name.into(), rel)?;
        }
        Ok(t)
    }

    /// `(T; ARC)` for a tournament base, `(G; E)` otherwise.
    pub fn standard(base: Base) -> Self {
        let name = if base == Base::Tournament { "ARC" } else { "E" };
        Self::new(base, [(name, TypeSetRelation::arc(base))]).expect("one relation")
    }

    pub fn with(mut self, name: &str, rel: TypeSetRelation) -> Result<Self> {
        if rel.base() != self.base {
            return Err(Error::Parameter(format!(
                "relation `{name}` is over {}, template over {}",
                rel.base(),
                self.base
            )));
        }
        if self.relations.insert(name.to_string(), rel).is_some() {
            return Err(Error::Duplicate(name.to_string()));
        }
        Ok(self)
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn relation(&self, name: &str) -> Option<&TypeSetRelation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &TypeSetRelation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl LocalTemplate for HomTemplate {
    type Local = LabeledType;

    fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relation(name).map(TypeSetRelation::arity)
    }

    fn locals(&self, m: usize) -> Result<Vec<LabeledType>> {
        enumerate_types(m, self.base)
    }

    fn restrict(&self, local: &LabeledType, positions: &[usize]) -> LabeledType {
        local.restrict(positions)
    }

    fn admits(&self, relation: &str, local: &LabeledType) -> bool {
        self.relation(relation).is_some_and(|r| r.contains(local))
    }
}

pub const MAX_BRUTE_VARIABLES: usize = 6;

/// Decides an instance by trying every complete type of the variable tuple.
/// A type found this way is the type of an actual solution, since every
/// type admitted by the base is realized in it.
pub fn solve_instance_brute(instance: &Instance, template: &HomTemplate) -> Result<Option<LabeledType>> {
    let n = instance.variables().len();
    if n > MAX_BRUTE_VARIABLES {
        return Err(Error::BudgetExceeded(format!(
            "{n} variables (limit {MAX_BRUTE_VARIABLES})"
        )));
    }
    instance.check_signature(|name| template.relation_arity(name))?;
    Ok(enumerate_types(n, template.base())?.into_iter().find(|t| {
        instance
            .constraints()
            .iter()
            .all(|c| template.admits(&c.relation, &t.restrict(&c.scope)))
    }))
}

/// The solution type written over variable names, for reports.
pub fn format_solution(instance: &Instance, t: &LabeledType) -> String {
    let vars = instance.variables();
    let n = vars.len();
    let mut items: Vec<String> = Vec::new();
    for j in 0..n {
        if let Some(i) = (0..j).find(|&i| t.pair(i, j) == EQ) {
            items.push(format!("{}={}", vars[i], vars[j]));
        }
    }
    let reps: Vec<usize> = (0..n)
        .filter(|&j| (0..j).all(|i| t.pair(i, j) != EQ))
        .collect();
    for (x, &i) in reps.iter().enumerate() {
        for &j in &reps[x + 1..] {
            match (t.alphabet(), t.pair(i, j)) {
                (Alphabet::Oriented, FWD) => items.push(format!("{}->{}", vars[i], vars[j])),
                (Alphabet::Oriented, _) => items.push(format!("{}->{}", vars[j], vars[i])),
                (_, E) => items.push(format!("E({},{})", vars[i], vars[j])),
                _ => {}
            }
        }
    }
    items.join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(vars: &[&str], cons: &[(&str, &[&str])]) -> Instance {
        let mut i = Instance::new(vars.iter().copied()).unwrap();
        for (r, args) in cons {
            i.add_constraint(r, args).unwrap();
        }
        i
    }

    #[test]
    fn brute_examples() {
        let t = HomTemplate::standard(Base::Tournament);
        let anti = inst(&["x", "y"], &[("ARC", &["x", "y"]), ("ARC", &["y", "x"])]);
        assert_eq!(solve_instance_brute(&anti, &t).unwrap(), None);
        let cyc = inst(
            &["x", "y", "z"],
            &[("ARC", &["x", "y"]), ("ARC", &["y", "z"]), ("ARC", &["z", "x"])],
        );
        let sol = solve_instance_brute(&cyc, &t).unwrap().unwrap();
        assert_eq!(format_solution(&cyc, &sol), "x->y, z->x, y->z");
        let k3 = HomTemplate::standard(Base::KFree(3));
        let tri = inst(
            &["x", "y", "z"],
            &[("E", &["x", "y"]), ("E", &["y", "z"]), ("E", &["x", "z"])],
        );
        assert_eq!(solve_instance_brute(&tri, &k3).unwrap(), None);
        assert!(solve_instance_brute(&tri, &HomTemplate::standard(Base::Graph)).unwrap().is_some());
        assert!(matches!(
            solve_instance_brute(&Instance::with_anonymous_variables(7), &t),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn relation_validation() {
        assert!(TypeSetRelation::parse(Base::KFree(3), 3, "E(1,2), E(2,3), E(1,3)").is_err());
        assert!(TypeSetRelation::parse(Base::Graph, 3, "E(1,2), E(2,3), E(1,3)").is_ok());
        let r = TypeSetRelation::parse(Base::Tournament, 2, "1->2; 2->1; 1=2").unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.to_string(), "1=2; 1->2; 2->1");
        let g = HomTemplate::standard(Base::Graph);
        assert!(matches!(
            g.with("ARC", TypeSetRelation::arc(Base::Tournament)),
            Err(Error::Parameter(_))
        ));
    }
}
