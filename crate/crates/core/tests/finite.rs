use std::collections::BTreeSet;

use csplab::consistency::establish_kl;
use csplab::polyengine::*;
use csplab::relstruct::{decode_tuple, exhaustive_search, hom_search, FiniteStructure, Instance};
use proptest::prelude::*;

/// A template over `0..d` with one relation per `(arity, mask)` pair,
/// the mask selecting tuples in mixed-radix order.
fn structure(d: usize, rels: &[(usize, u64)]) -> FiniteStructure {
    let mut s = FiniteStructure::new(d).unwrap();
    for (i, &(arity, mask)) in rels.iter().enumerate() {
        let all = d.pow(arity as u32);
        let tuples: Vec<Vec<usize>> = (0..all)
            .filter(|c| mask >> c & 1 == 1)
            .map(|c| decode_tuple(c, arity, d))
            .collect();
        s.add_relation(&format!("R{i}"), arity, tuples).unwrap();
    }
    s
}

fn instance(vars: usize, rels: &[(usize, u64)], cons: &[(usize, Vec<usize>)]) -> Instance {
    let mut inst = Instance::with_anonymous_variables(vars);
    for (r, scope) in cons {
        let r = r % rels.len();
        let s: Vec<usize> = scope.iter().take(rels[r].0).map(|v| v % vars).collect();
        inst.add_constraint_indices(&format!("R{r}"), s).unwrap();
    }
    inst
}

fn relations(d: usize) -> impl Strategy<Value = Vec<(usize, u64)>> {
    let rel = (1usize..=3).prop_flat_map(move |a| {
        let bits = d.pow(a as u32) as u32;
        (Just(a), 0u64..(1u64 << bits))
    });
    prop::collection::vec(rel, 1..=3)
}

fn constraints() -> impl Strategy<Value = Vec<(usize, Vec<usize>)>> {
    prop::collection::vec((0usize..3, prop::collection::vec(0usize..6, 3)), 1..=7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn search_matches_enumeration(d in 2usize..=3, rels in relations(3), vars in 1usize..=5, cons in constraints()) {
        let rels: Vec<(usize, u64)> = rels.into_iter().map(|(a, m)| (a, m & ((1 << d.pow(a as u32)) - 1))).collect();
        let t = structure(d, &rels);
        let inst = instance(vars, &rels, &cons);
        let fast = hom_search(&inst, &t).unwrap();
        let slow = exhaustive_search(&inst, &t).unwrap();
        prop_assert_eq!(fast.is_some(), slow.is_some());
        if let Some(a) = fast {
            prop_assert!(a.satisfies(&inst, &t));
        }
    }

    #[test]
    fn consistency_never_refutes_a_solvable_instance(d in 2usize..=3, rels in relations(3), vars in 1usize..=5, cons in constraints(), k in 1usize..=3) {
        let rels: Vec<(usize, u64)> = rels.into_iter().map(|(a, m)| (a, m & ((1 << d.pow(a as u32)) - 1))).collect();
        let t = structure(d, &rels);
        let inst = instance(vars, &rels, &cons);
        let sat = exhaustive_search(&inst, &t).unwrap().is_some();
        let refuted = establish_kl(&inst, &t, k, k + 1).unwrap().is_empty_derived();
        prop_assert!(!(sat && refuted));
        // with the window covering every variable, consistency is exact
        let exact = establish_kl(&inst, &t, vars, vars).unwrap().is_empty_derived();
        prop_assert_eq!(exact, !sat);
    }

    #[test]
    fn schaefer_agrees_with_search(rels in relations(2), vars in 1usize..=6, cons in constraints()) {
        let t = structure(2, &rels);
        let inst = instance(vars, &rels, &cons);
        let want = hom_search(&inst, &t).unwrap().is_some();
        for class in boolean_classify(&t).unwrap() {
            if class == BooleanClass::Trivial {
                continue;
            }
            let got = schaefer_solve(&inst, &t, class).unwrap();
            prop_assert_eq!(got.is_some(), want, "{}", class);
            if let Some(a) = got {
                prop_assert!(a.satisfies(&inst, &t));
            }
        }
    }

    /// A found polymorphism preserves the template and satisfies the
    /// identities; on two elements NONE for Siggers means no probe applies.
    #[test]
    fn polymorphism_search_is_sound(rels in relations(2)) {
        let t = structure(2, &rels);
        for identity in [IdentitySystem::Majority, IdentitySystem::Minority, IdentitySystem::Semilattice, IdentitySystem::Siggers] {
            let arity = identity.fixed_arity().unwrap();
            match find_polymorphism(&t, identity, arity).unwrap() {
                Some(op) => {
                    prop_assert!(identity.satisfied_by(&op));
                    prop_assert!(preserves_op(&op, &t).unwrap());
                }
                None if identity == IdentitySystem::Siggers => {
                    prop_assert_eq!(boolean_classify(&t).unwrap(), BTreeSet::from([BooleanClass::Trivial]));
                }
                None => {}
            }
        }
    }
}

#[test]
fn three_coloring_has_no_taylor_term() {
    let k3 = structure(3, &[(2, 0b011_101_110)]);
    assert!(find_polymorphism(&k3, IdentitySystem::Cyclic(5), 5).unwrap().is_none());
    assert!(find_polymorphism(&k3, IdentitySystem::Majority, 3).unwrap().is_none());
    // a Siggers table over three elements is beyond the cell budget
    assert!(matches!(
        find_polymorphism(&k3, IdentitySystem::Siggers, 6),
        Err(csplab::Error::BudgetExceeded(_))
    ));
    let path = structure(3, &[(2, 0b000_001_010)]);
    assert!(find_polymorphism(&path, IdentitySystem::Majority, 3).unwrap().is_some());
}
