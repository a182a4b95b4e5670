use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::relstruct::{encode_tuple, FiniteStructure, SearchProblem, Tuple};
use crate::unionfind::UnionFind;

use super::identities::{is_associative, IdentitySystem};
use super::optable::preserves_op;
use super::OpTable;

/// Largest table searched cell by cell.
pub const MAX_SEARCH_CELLS: usize = 256;
const MAX_POWER_CONSTRAINTS: usize = 1 << 21;

/// Looks for a polymorphism of the template of the given arity satisfying
/// the identities.
///
/// Two-element templates only try a short list of symmetric and
/// near-symmetric candidates built from the probe operations: by the
/// lattice of two-element clones, every clone with such a term contains
/// one of them. Larger domains search the table itself as a CSP over the
/// power instance.
pub fn find_polymorphism(
    template: &FiniteStructure,
    identity: IdentitySystem,
    arity: usize,
) -> Result<Option<OpTable>> {
    identity.validate(arity)?;
    let d = template.domain_size();
    if identity == IdentitySystem::Idempotent {
        // a projection is idempotent and preserves everything
        return Ok(Some(OpTable::projection(arity, d, 0)));
    }
    if d == 2 {
        for candidate in boolean_candidates(identity, arity) {
            if identity.satisfied_by(&candidate) && preserves_op(&candidate, template)? {
                return Ok(Some(candidate));
            }
        }
        return Ok(None);
    }
    let cells = d.checked_pow(arity as u32).filter(|&c| c <= MAX_SEARCH_CELLS);
    match cells {
        Some(_) => search_table(template, identity, arity),
        None => Err(Error::BudgetExceeded(format!(
            "{d}^{arity} table cells exceed {MAX_SEARCH_CELLS}"
        ))),
    }
}

fn boolean_candidates(identity: IdentitySystem, n: usize) -> Vec<OpTable> {
    let ones = |a: &[usize]| a.iter().sum::<usize>();
    let mut out = vec![OpTable::constant(n, 2, 0), OpTable::constant(n, 2, 1)];
    match identity {
        IdentitySystem::Siggers => {
            let inner = |f: fn(usize, usize, usize) -> usize| {
                OpTable::from_fn(6, 2, move |a| f(a[0], a[3], a[4]))
            };
            out.push(inner(|x, y, z| x & y & z));
            out.push(inner(|x, y, z| x | y | z));
            out.push(inner(|x, y, z| usize::from(x + y + z >= 2)));
            out.push(inner(|x, y, z| x ^ y ^ z));
        }
        _ => {
            out.push(OpTable::from_fn(n, 2, |a| usize::from(ones(a) == a.len())));
            out.push(OpTable::from_fn(n, 2, |a| usize::from(ones(a) > 0)));
            if n % 2 == 1 {
                out.push(OpTable::from_fn(n, 2, |a| usize::from(2 * ones(a) > a.len())));
                out.push(OpTable::from_fn(n, 2, |a| ones(a) % 2));
            }
            if matches!(identity, IdentitySystem::Wnu(_)) && n > 3 {
                out.push(OpTable::from_fn(n, 2, |a| {
                    usize::from(a[0] + a[1] + a[2] >= 2)
                }));
            }
        }
    }
    out
}

/// The power instance with one variable per class of table cells forced
/// equal by the identities.
fn search_table(
    template: &FiniteStructure,
    identity: IdentitySystem,
    arity: usize,
) -> Result<Option<OpTable>> {
    let d = template.domain_size();
    let cells = d.pow(arity as u32);
    let cc = identity.cell_constraints(arity, d);
    let mut uf = UnionFind::new(cells);
    for &(a, b) in &cc.equal {
        uf.union(a, b);
    }
    let (var_of, class_count) = uf.classes();

    let mut problem = SearchProblem::new(class_count, d);
    for &(cell, value) in &cc.pins {
        problem.restrict(var_of[cell], &[value]);
    }
    let mut budget = MAX_POWER_CONSTRAINTS;
    for (name, rel) in template.relations() {
        let rows: Vec<&Tuple> = rel.tuples().iter().collect();
        if rows.is_empty() {
            continue;
        }
        let count = rows
            .len()
            .checked_pow(arity as u32)
            .filter(|&c| c <= budget)
            .ok_or_else(|| {
                Error::BudgetExceeded(format!("|{name}|^{arity} power constraints"))
            })?;
        budget -= count;
        let id = problem.add_relation(rel.tuples().iter().cloned().collect());
        let mut scopes: HashSet<Vec<usize>> = HashSet::new();
        let mut choice = vec![0usize; arity];
        let mut column = vec![0usize; arity];
        for _ in 0..count {
            let scope: Vec<usize> = (0..rel.arity())
                .map(|j| {
                    for (slot, &c) in column.iter_mut().zip(&choice) {
                        *slot = rows[c][j];
                    }
                    var_of[encode_tuple(&column, d)]
                })
                .collect();
            scopes.insert(scope);
            for slot in choice.iter_mut().rev() {
                *slot += 1;
                if *slot < rows.len() {
                    break;
                }
                *slot = 0;
            }
        }
        let mut scopes: Vec<_> = scopes.into_iter().collect();
        scopes.sort();
        for scope in scopes {
            problem.add_constraint(id, scope);
        }
    }

    let mut found = None;
    problem.for_each_solution(|values| {
        let op = OpTable::from_table(arity, d, var_of.iter().map(|&v| values[v]).collect())
            .expect("values in domain");
        if identity == IdentitySystem::Semilattice && !is_associative(&op) {
            return true;
        }
        found = Some(op);
        false
    });
    if let Some(op) = &found {
        if !identity.satisfied_by(op) || !preserves_op(op, template)? {
            return Err(Error::WitnessCheckFailed(format!(
                "{identity} table {op} fails the direct check"
            )));
        }
    }
    Ok(found)
}
