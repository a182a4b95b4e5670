use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

use super::behavior::{search_behavior_report, PairBehavior, SearchReport, Shape};
use super::relation::{HomTemplate, TypeSetRelation};
use super::types::{Base, LabeledType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    NpComplete,
    PBoundedWidth,
    PNotBoundedWidth,
    /// Every relation contains its constant tuples.
    PConstant,
    /// The relations only see equalities, and the template is tractable.
    EqualityP,
    EqualityNpc,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::NpComplete => "NP_COMPLETE",
            VerdictKind::PBoundedWidth => "P_BOUNDED_WIDTH",
            VerdictKind::PNotBoundedWidth => "P_NOT_BOUNDED_WIDTH",
            VerdictKind::PConstant => "P_CONSTANT",
            VerdictKind::EqualityP => "EQUALITY_P",
            VerdictKind::EqualityNpc => "EQUALITY_NPC",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// The behavior behind a tractability verdict.
    pub witness: Option<(Shape, PairBehavior)>,
    /// Every shape search that ran, in order.
    pub searches: Vec<SearchReport>,
}

impl Verdict {
    fn plain(kind: VerdictKind) -> Self {
        Verdict {
            kind,
            witness: None,
            searches: Vec::new(),
        }
    }

    /// Bounded width as far as the verdict decides it.
    pub fn bounded_width(&self) -> Option<bool> {
        match self.kind {
            VerdictKind::PBoundedWidth | VerdictKind::PConstant => Some(true),
            VerdictKind::PNotBoundedWidth | VerdictKind::NpComplete | VerdictKind::EqualityNpc => {
                Some(false)
            }
            VerdictKind::EqualityP => None,
        }
    }
}

/// Whether the relation only depends on which positions are equal.
fn equality_definable(r: &TypeSetRelation) -> bool {
    let mut per_partition: BTreeMap<&[u8], usize> = BTreeMap::new();
    for t in r.types() {
        *per_partition.entry(t.partition()).or_default() += 1;
    }
    per_partition.iter().all(|(p, &count)| {
        let blocks = p.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
        count == 1 << (blocks * blocks.saturating_sub(1) / 2)
    })
}

/// The common refinement of two partitions in first-occurrence form.
fn meet(p: &[u8], q: &[u8]) -> Vec<u8> {
    let mut seen: Vec<(u8, u8)> = Vec::new();
    p.iter()
        .zip(q)
        .map(|(&a, &b)| match seen.iter().position(|&x| x == (a, b)) {
            Some(i) => i as u8,
            None => {
                seen.push((a, b));
                (seen.len() - 1) as u8
            }
        })
        .collect()
}

fn closed_under_meet(r: &TypeSetRelation) -> bool {
    let parts: BTreeSet<&[u8]> = r.types().iter().map(LabeledType::partition).collect();
    parts
        .iter()
        .all(|p| parts.iter().all(|q| parts.contains(meet(p, q).as_slice())))
}

/// Classifies a reduct of the random tournament or the random graph.
///
/// The template is taken to be a model-complete core. Searches run in the
/// order majority, minority for tournaments and `E`-semilattice,
/// `N`-semilattice, majority, minority for graphs; the first hit decides.
pub fn classify_reduct(template: &HomTemplate) -> Result<Verdict> {
    let base = template.base();
    if let Base::KFree(_) = base {
        return Err(Error::UnsupportedBase(base.to_string()));
    }
    let relations: Vec<TypeSetRelation> = template.relations().map(|(_, r)| r.clone()).collect();
    if relations.is_empty() {
        return Err(Error::Parameter("template has no relations".into()));
    }
    let alphabet = base.alphabet();
    let has_constant = |r: &TypeSetRelation| r.contains(&LabeledType::all_equal(alphabet, r.arity()));
    if relations.iter().all(has_constant) {
        return Ok(Verdict::plain(VerdictKind::PConstant));
    }
    if relations.iter().all(equality_definable) {
        let tractable = relations.iter().all(has_constant) || relations.iter().all(closed_under_meet);
        return Ok(Verdict::plain(if tractable {
            VerdictKind::EqualityP
        } else {
            VerdictKind::EqualityNpc
        }));
    }
    let plan: &[(Shape, VerdictKind)] = match base {
        Base::Tournament => &[
            (Shape::TernaryMajority, VerdictKind::PBoundedWidth),
            (Shape::TernaryMinority, VerdictKind::PNotBoundedWidth),
        ],
        _ => &[
            (Shape::BinarySlE, VerdictKind::PBoundedWidth),
            (Shape::BinarySlN, VerdictKind::PBoundedWidth),
            (Shape::TernaryMajority, VerdictKind::PBoundedWidth),
            (Shape::TernaryMinority, VerdictKind::PNotBoundedWidth),
        ],
    };
    let mut searches = Vec::new();
    for &(shape, kind) in plan {
        let report = search_behavior_report(&relations, base, shape)?;
        let found = report.behavior.clone();
        searches.push(report);
        if let Some(b) = found {
            return Ok(Verdict {
                kind,
                witness: Some((shape, b)),
                searches,
            });
        }
    }
    Ok(Verdict {
        kind: VerdictKind::NpComplete,
        witness: None,
        searches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homog::types::FWD;

    #[test]
    fn escapes() {
        let all = TypeSetRelation::from_predicate(Base::Tournament, 2, |_| true).unwrap();
        let t = HomTemplate::new(Base::Tournament, [("R", all)]).unwrap();
        assert_eq!(classify_reduct(&t).unwrap().kind, VerdictKind::PConstant);
        let neq = TypeSetRelation::from_predicate(Base::Tournament, 2, |t| t.is_injective()).unwrap();
        let t = HomTemplate::new(Base::Tournament, [("NEQ", neq)]).unwrap();
        assert_eq!(classify_reduct(&t).unwrap().kind, VerdictKind::EqualityP);
        // x=y≠z or x≠y=z: refinement of the two partitions is all distinct
        let r = TypeSetRelation::from_predicate(Base::Graph, 3, |t| {
            let p = t.partition();
            p == [0, 0, 1] || p == [0, 1, 1]
        })
        .unwrap();
        let g = HomTemplate::new(Base::Graph, [("R", r)]).unwrap();
        assert_eq!(classify_reduct(&g).unwrap().kind, VerdictKind::EqualityNpc);
        assert!(matches!(
            classify_reduct(&HomTemplate::standard(Base::KFree(3))),
            Err(Error::UnsupportedBase(_))
        ));
    }

    #[test]
    fn standard_templates() {
        let v = classify_reduct(&HomTemplate::standard(Base::Tournament)).unwrap();
        assert_eq!(v.kind, VerdictKind::PBoundedWidth);
        assert_eq!(v.witness.as_ref().unwrap().0, Shape::TernaryMajority);
        let v = classify_reduct(&HomTemplate::standard(Base::Graph)).unwrap();
        assert_eq!(v.kind, VerdictKind::PBoundedWidth);
        let both = HomTemplate::standard(Base::Graph)
            .with("N", TypeSetRelation::non_edge(Base::Graph))
            .unwrap();
        let v = classify_reduct(&both).unwrap();
        assert_eq!(v.witness.unwrap().0, Shape::BinarySlE);
    }

    #[test]
    fn betweenness_like_tournament_relation_is_hard() {
        // exactly one of the three pairs points forward
        let r = TypeSetRelation::from_predicate(Base::Tournament, 3, |t| {
            t.is_injective() && [(0, 1), (0, 2), (1, 2)].iter().filter(|&&(i, j)| t.pair(i, j) == FWD).count() == 1
        })
        .unwrap();
        let t = HomTemplate::standard(Base::Tournament).with("ONE", r).unwrap();
        let v = classify_reduct(&t).unwrap();
        assert_eq!(v.kind, VerdictKind::NpComplete, "{v:?}");
        assert!(v.searches.iter().all(|s| s.rechecked));
    }
}
