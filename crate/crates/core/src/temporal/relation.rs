use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::consistency::LocalTemplate;
use crate::error::{Error, Result};

use super::weak_order::{enumerate_weak_orders, WeakOrderType};

/// A relation first-order definable in `(Q;<)`, as a set of order types.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TemporalRelation {
    arity: usize,
    types: BTreeSet<WeakOrderType>,
}

impl TemporalRelation {
    pub fn new<I>(arity: usize, types: I) -> Result<Self>
    where
        I: IntoIterator<Item = WeakOrderType>,
    {
        if arity == 0 {
            return Err(Error::Parameter("relation arity must be positive".into()));
        }
        let types: BTreeSet<WeakOrderType> = types.into_iter().collect();
        if let Some(t) = types.iter().find(|t| t.arity() != arity) {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: t.arity(),
            });
        }
        Ok(TemporalRelation { arity, types })
    }

    /// Parses `1<2; 2<1` style literals.
    pub fn parse(arity: usize, literal: &str) -> Result<Self> {
        let types = literal
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| WeakOrderType::parse_literal(s, arity))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arity, types)
    }

    /// All types satisfying a predicate on concrete representatives.
    pub fn from_predicate<F>(arity: usize, pred: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> bool,
    {
        let types = enumerate_weak_orders(arity)?
            .into_iter()
            .filter(|t| pred(t.levels()));
        Self::new(arity, types)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn types(&self) -> &BTreeSet<WeakOrderType> {
        &self.types
    }

    pub fn contains(&self, t: &WeakOrderType) -> bool {
        self.types.contains(t)
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// The relation of negated tuples.
    pub fn reversed(&self) -> Self {
        TemporalRelation {
            arity: self.arity,
            types: self.types.iter().map(WeakOrderType::reverse).collect(),
        }
    }

    /// The relation `{1<2}`.
    pub fn less_than() -> Self {
        Self::parse(2, "1<2").expect("literal")
    }
}

impl fmt::Display for TemporalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.types.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

/// A first-order expansion of `(Q;<)`: named relations, one of which is `<`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalTemplate {
    relations: BTreeMap<String, TemporalRelation>,
}

impl TemporalTemplate {
    /// Fails with [`Error::NotAnExpansion`] unless some relation is `{1<2}`.
    pub fn new<I, S>(relations: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, TemporalRelation)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (name, rel) in relations {
            let name = name.into();
            if map.insert(name.clone(), rel).is_some() {
                return Err(Error::Duplicate(name));
            }
        }
        let lt = TemporalRelation::less_than();
        if !map.values().any(|r| *r == lt) {
            return Err(Error::NotAnExpansion);
        }
        Ok(TemporalTemplate { relations: map })
    }

    /// `(Q;<)` with the order named `LT`.
    pub fn order() -> Self {
        Self::new([("LT", TemporalRelation::less_than())]).expect("contains <")
    }

    /// Adds a relation to the template.
    pub fn with(mut self, name: &str, rel: TemporalRelation) -> Result<Self> {
        if self.relations.insert(name.to_string(), rel).is_some() {
            return Err(Error::Duplicate(name.to_string()));
        }
        Ok(self)
    }

    pub fn relation(&self, name: &str) -> Option<&TemporalRelation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &TemporalRelation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// The template of negated relations.
    pub fn reversed(&self) -> Self {
        TemporalTemplate {
            relations: self
                .relations
                .iter()
                .map(|(k, v)| (k.clone(), v.reversed()))
                .collect(),
        }
    }
}

impl LocalTemplate for TemporalTemplate {
    type Local = WeakOrderType;

    fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relation(name).map(TemporalRelation::arity)
    }

    fn locals(&self, m: usize) -> Result<Vec<WeakOrderType>> {
        enumerate_weak_orders(m)
    }

    fn restrict(&self, local: &WeakOrderType, positions: &[usize]) -> WeakOrderType {
        local.restrict(positions)
    }

    fn admits(&self, relation: &str, local: &WeakOrderType) -> bool {
        self.relation(relation).is_some_and(|r| r.contains(local))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_requires_order() {
        let betw = TemporalRelation::parse(3, "1<2<3; 3<2<1").unwrap();
        assert_eq!(
            TemporalTemplate::new([("B", betw.clone())]),
            Err(Error::NotAnExpansion)
        );
        assert!(TemporalTemplate::order().with("B", betw).is_ok());
    }

    #[test]
    fn predicate_constructor() {
        // y<x or z<x
        let rmin = TemporalRelation::from_predicate(3, |v| v[1] < v[0] || v[2] < v[0]).unwrap();
        let all = enumerate_weak_orders(3).unwrap().len();
        // excluded: x is a minimum (strict or shared)
        let excluded = enumerate_weak_orders(3)
            .unwrap()
            .iter()
            .filter(|t| t.level(0) == 0)
            .count();
        assert_eq!(rmin.types().len(), all - excluded);
        assert!(TemporalRelation::parse(2, "1<2; 1<2=3").is_err());
    }
}
