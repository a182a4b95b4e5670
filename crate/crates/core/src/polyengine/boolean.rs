//! Two-element templates: classification by the six probe operations and
//! the matching polynomial-time solvers.

use std::collections::BTreeSet;
use std::fmt;

use crate::consistency::{establish_kl, Consistency};
use crate::error::{Error, Result};
use crate::relstruct::{Assignment, FiniteStructure, Instance, Relation, Tuple};

use super::gf2;
use super::optable::{boolean, preserves_op};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BooleanClass {
    /// Preserved by `∧`.
    HornAnd,
    /// Preserved by `∨`.
    DualHornOr,
    /// Preserved by the median.
    Majority2Sat,
    /// Preserved by `x ⊕ y ⊕ z`.
    MinorityAffine,
    Constant0,
    Constant1,
    /// None of the six probes applies.
    Trivial,
}

impl BooleanClass {
    pub const PROBES: [BooleanClass; 6] = [
        BooleanClass::HornAnd,
        BooleanClass::DualHornOr,
        BooleanClass::Majority2Sat,
        BooleanClass::MinorityAffine,
        BooleanClass::Constant0,
        BooleanClass::Constant1,
    ];

    pub fn probe(self) -> Option<super::OpTable> {
        Some(match self {
            BooleanClass::HornAnd => boolean::and(),
            BooleanClass::DualHornOr => boolean::or(),
            BooleanClass::Majority2Sat => boolean::majority(),
            BooleanClass::MinorityAffine => boolean::minority(),
            BooleanClass::Constant0 => boolean::constant(0),
            BooleanClass::Constant1 => boolean::constant(1),
            BooleanClass::Trivial => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            BooleanClass::HornAnd => "HORN_AND",
            BooleanClass::DualHornOr => "DUAL_HORN_OR",
            BooleanClass::Majority2Sat => "MAJORITY_2SAT",
            BooleanClass::MinorityAffine => "MINORITY_AFFINE",
            BooleanClass::Constant0 => "CONSTANT0",
            BooleanClass::Constant1 => "CONSTANT1",
            BooleanClass::Trivial => "TRIVIAL",
        }
    }

    /// The class a solver should dispatch on, in order of preference.
    pub fn preferred(classes: &BTreeSet<BooleanClass>) -> Option<BooleanClass> {
        [
            BooleanClass::HornAnd,
            BooleanClass::DualHornOr,
            BooleanClass::MinorityAffine,
            BooleanClass::Majority2Sat,
            BooleanClass::Constant0,
            BooleanClass::Constant1,
        ]
        .into_iter()
        .find(|c| classes.contains(c))
    }
}

impl fmt::Display for BooleanClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The probe operations preserving the template; `{Trivial}` if none does.
///
/// On an idempotent template (both constants named) the result is
/// `{Trivial}` exactly when its polymorphism clone is equationally trivial.
pub fn boolean_classify(template: &FiniteStructure) -> Result<BTreeSet<BooleanClass>> {
    if template.domain_size() != 2 {
        return Err(Error::DomainMismatch {
            op: 2,
            template: template.domain_size(),
        });
    }
    let mut out = BTreeSet::new();
    for class in BooleanClass::PROBES {
        if preserves_op(&class.probe().expect("probe class"), template)? {
            out.insert(class);
        }
    }
    if out.is_empty() {
        out.insert(BooleanClass::Trivial);
    }
    Ok(out)
}

/// Whether the preserved probes make the idempotent clone affine, i.e.
/// non-trivial with the minority as the only witness.
pub fn is_equationally_affine(classes: &BTreeSet<BooleanClass>) -> bool {
    classes.contains(&BooleanClass::MinorityAffine)
        && ![
            BooleanClass::HornAnd,
            BooleanClass::DualHornOr,
            BooleanClass::Majority2Sat,
        ]
        .iter()
        .any(|c| classes.contains(c))
}

/// Polynomial-time solving of a two-element template by class dispatch.
pub fn schaefer_solve(
    instance: &Instance,
    template: &FiniteStructure,
    class: BooleanClass,
) -> Result<Option<Assignment>> {
    let classes = boolean_classify(template)?;
    if class == BooleanClass::Trivial || !classes.contains(&class) {
        return Err(Error::ClassMismatch(class.name().into()));
    }
    instance.check_signature(|name| template.relation(name).map(Relation::arity))?;
    let solution = match class {
        BooleanClass::HornAnd => monotone_fixpoint(instance, template, false),
        BooleanClass::DualHornOr => monotone_fixpoint(instance, template, true),
        BooleanClass::Majority2Sat => greedy_after_consistency(instance, template)?,
        BooleanClass::MinorityAffine => affine(instance, template),
        BooleanClass::Constant0 | BooleanClass::Constant1 => {
            let c = usize::from(class == BooleanClass::Constant1);
            Some(vec![c; instance.variables().len()])
        }
        BooleanClass::Trivial => unreachable!(),
    };
    match solution.map(Assignment::new) {
        Some(a) if a.satisfies(instance, template) => Ok(Some(a)),
        Some(_) if matches!(class, BooleanClass::Constant0 | BooleanClass::Constant1) => Ok(None),
        Some(a) => Err(Error::WitnessCheckFailed(format!(
            "{class} solver produced {:?}",
            a.values()
        ))),
        None => Ok(None),
    }
}

/// Least solution for `∧`-closed templates (greatest for `∨`-closed ones,
/// with `from_top`): start at the bottom and repair violated constraints by
/// jumping to the meet of all tuples above the current image.
fn monotone_fixpoint(
    instance: &Instance,
    template: &FiniteStructure,
    from_top: bool,
) -> Option<Vec<usize>> {
    let start = usize::from(from_top);
    let mut values = vec![start; instance.variables().len()];
    loop {
        let mut changed = false;
        for c in instance.constraints() {
            let rel = template.relation(&c.relation).expect("signature checked");
            let current: Tuple = c.scope.iter().map(|&v| values[v]).collect();
            if rel.contains(&current) {
                continue;
            }
            let above = rel.tuples().iter().filter(|t| {
                respects_repeats(t, &c.scope)
                    && t.iter().zip(&current).all(|(&a, &b)| {
                        if from_top {
                            a <= b
                        } else {
                            a >= b
                        }
                    })
            });
            let meet = above.fold(None, |acc: Option<Tuple>, t| {
                Some(match acc {
                    None => t.clone(),
                    Some(m) => m
                        .iter()
                        .zip(t)
                        .map(|(&a, &b)| if from_top { a | b } else { a & b })
                        .collect(),
                })
            })?;
            for (&v, &x) in c.scope.iter().zip(&meet) {
                values[v] = x;
            }
            changed = true;
        }
        if !changed {
            return Some(values);
        }
    }
}

fn respects_repeats(tuple: &[usize], scope: &[usize]) -> bool {
    scope.iter().enumerate().all(|(i, v)| {
        scope[..i]
            .iter()
            .position(|w| w == v)
            .is_none_or(|j| tuple[j] == tuple[i])
    })
}

const PIN: [&str; 2] = ["$pin0", "$pin1"];

/// (2,3)-consistency, then fix variables one at a time, re-establishing
/// consistency after each choice. Majority-closed templates never need to
/// undo a choice.
fn greedy_after_consistency(
    instance: &Instance,
    template: &FiniteStructure,
) -> Result<Option<Vec<usize>>> {
    let mut pinned = template.clone();
    pinned.add_relation(PIN[0], 1, vec![vec![0]])?;
    pinned.add_relation(PIN[1], 1, vec![vec![1]])?;
    let mut working = instance.clone();
    if establish_kl(&working, &pinned, 2, 3)?.is_empty_derived() {
        return Ok(None);
    }
    let mut values = Vec::with_capacity(instance.variables().len());
    for var in 0..instance.variables().len() {
        let mut chosen = None;
        for value in 0..2 {
            let mut trial = working.clone();
            trial.add_constraint_indices(PIN[value], vec![var])?;
            if let Consistency::Consistent(_) = establish_kl(&trial, &pinned, 2, 3)? {
                working = trial;
                chosen = Some(value);
                break;
            }
        }
        match chosen {
            Some(v) => values.push(v),
            None => return Ok(None),
        }
    }
    Ok(Some(values))
}

/// Each relation is an affine subspace of `GF(2)^k`; collect its defining
/// equations for every constraint and eliminate.
fn affine(instance: &Instance, template: &FiniteStructure) -> Option<Vec<usize>> {
    let n = instance.variables().len();
    let mut rows = Vec::new();
    for c in instance.constraints() {
        let rel = template.relation(&c.relation).expect("signature checked");
        let base = rel.tuples().iter().next()?;
        let directions: Vec<Vec<bool>> = rel
            .tuples()
            .iter()
            .map(|t| t.iter().zip(base).map(|(a, b)| a != b).collect())
            .collect();
        for eq in gf2::orthogonal_complement(&directions, rel.arity()) {
            let mut row = gf2::Row::zero(n);
            let mut rhs = false;
            for (i, &on) in eq.iter().enumerate() {
                if on {
                    row.flip(c.scope[i]);
                    rhs ^= base[i] == 1;
                }
            }
            row.set_rhs(rhs);
            rows.push(row);
        }
    }
    gf2::solve(rows, n).map(|x| x.into_iter().map(usize::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relstruct::hom_search;

    fn xor_template() -> FiniteStructure {
        FiniteStructure::new(2)
            .unwrap()
            .with_relation(
                "X",
                3,
                vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
            )
            .unwrap()
            .with_relation("ONE", 1, vec![vec![1]])
            .unwrap()
    }

    #[test]
    fn xor_is_affine_only() {
        let classes = boolean_classify(&xor_template()).unwrap();
        assert!(classes.contains(&BooleanClass::MinorityAffine));
        assert!(!classes.contains(&BooleanClass::Majority2Sat));
        assert!(is_equationally_affine(&classes));
    }

    #[test]
    fn affine_elimination_by_hand() {
        let inst = Instance::new(["x", "y", "z"])
            .unwrap()
            .constrain("X", &["x", "y", "z"])
            .unwrap()
            .constrain("ONE", &["x"])
            .unwrap()
            .constrain("ONE", &["y"])
            .unwrap();
        let sol = schaefer_solve(&inst, &xor_template(), BooleanClass::MinorityAffine)
            .unwrap()
            .unwrap();
        assert_eq!(sol.values(), &[1, 1, 0]);
    }

    #[test]
    fn one_in_three_with_constants_is_trivial() {
        let t = FiniteStructure::new(2)
            .unwrap()
            .with_relation("R", 3, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]])
            .unwrap()
            .with_relation("C0", 1, vec![vec![0]])
            .unwrap()
            .with_relation("C1", 1, vec![vec![1]])
            .unwrap();
        assert_eq!(
            boolean_classify(&t).unwrap(),
            BTreeSet::from([BooleanClass::Trivial])
        );
        let inst = Instance::new(["a"]).unwrap();
        assert_eq!(
            schaefer_solve(&inst, &t, BooleanClass::Trivial),
            Err(Error::ClassMismatch("TRIVIAL".into()))
        );
    }

    #[test]
    fn median_closed_binary_relations() {
        // every binary boolean relation is median-closed
        let all: Vec<Tuple> = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        let mut t = FiniteStructure::new(2).unwrap();
        for mask in 1u32..16 {
            let rel: Vec<Tuple> = (0..4)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| all[i].clone())
                .collect();
            t.add_relation(&format!("R{mask}"), 2, rel).unwrap();
        }
        assert!(boolean_classify(&t)
            .unwrap()
            .contains(&BooleanClass::Majority2Sat));
    }

    #[test]
    fn two_coloring_triangle_unsat() {
        let neq = FiniteStructure::new(2)
            .unwrap()
            .with_relation("NE", 2, vec![vec![0, 1], vec![1, 0]])
            .unwrap();
        let inst = Instance::new(["x", "y", "z"])
            .unwrap()
            .constrain("NE", &["x", "y"])
            .unwrap()
            .constrain("NE", &["y", "z"])
            .unwrap()
            .constrain("NE", &["x", "z"])
            .unwrap();
        assert_eq!(
            schaefer_solve(&inst, &neq, BooleanClass::Majority2Sat).unwrap(),
            None
        );
        assert_eq!(
            schaefer_solve(&inst, &neq, BooleanClass::MinorityAffine).unwrap(),
            None
        );
        assert_eq!(hom_search(&inst, &neq).unwrap(), None);
    }

    #[test]
    fn horn_least_and_dual_greatest() {
        let horn = FiniteStructure::new(2)
            .unwrap()
            .with_relation("IMP", 2, vec![vec![0, 0], vec![0, 1], vec![1, 1]])
            .unwrap()
            .with_relation("T", 1, vec![vec![1]])
            .unwrap();
        let empty = Instance::new(["a", "b"]).unwrap();
        assert_eq!(
            schaefer_solve(&empty, &horn, BooleanClass::HornAnd)
                .unwrap()
                .unwrap()
                .values(),
            &[0, 0]
        );
        let chain = Instance::new(["a", "b", "c"])
            .unwrap()
            .constrain("T", &["a"])
            .unwrap()
            .constrain("IMP", &["b", "c"])
            .unwrap()
            .constrain("IMP", &["a", "b"])
            .unwrap();
        let least = schaefer_solve(&chain, &horn, BooleanClass::HornAnd)
            .unwrap()
            .unwrap();
        assert_eq!(least.values(), &[1, 1, 1]);
        let greatest = schaefer_solve(&empty, &horn, BooleanClass::DualHornOr)
            .unwrap()
            .unwrap();
        assert_eq!(greatest.values(), &[1, 1]);
    }

    #[test]
    fn repeated_variables_in_horn_scope() {
        // R = {(0,1),(1,1)}; R(x,x) forces x = 1
        let t = FiniteStructure::new(2)
            .unwrap()
            .with_relation("R", 2, vec![vec![0, 1], vec![1, 1]])
            .unwrap();
        let inst = Instance::new(["x"]).unwrap().constrain("R", &["x", "x"]).unwrap();
        let sol = schaefer_solve(&inst, &t, BooleanClass::HornAnd)
            .unwrap()
            .unwrap();
        assert_eq!(sol.values(), &[1]);
    }
}
