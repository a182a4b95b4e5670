use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::relstruct::Instance;

use crate::unionfind::UnionFind;

use super::afin::Work;
use super::ops::{preserves_temporal, Counterexample, Preservation, TemporalOp};
use super::relation::{TemporalRelation, TemporalTemplate};
use super::weak_order::{insertions_pruned, WeakOrderType};

/// Most variables [`brute_oracle`] accepts.
pub const MAX_ORACLE_VARIABLES: usize = 7;

/// The tractable modes, in the order the classifier tries them.
pub const MASTER_MODES: [TemporalOp; 4] = [
    TemporalOp::Pp,
    TemporalOp::DualPp,
    TemporalOp::Ll,
    TemporalOp::DualLl,
];

/// Whether a weak order of the variables satisfies every constraint.
pub fn satisfies(instance: &Instance, template: &TemporalTemplate, solution: &WeakOrderType) -> bool {
    solution.arity() == instance.variables().len()
        && instance.constraints().iter().all(|c| {
            template
                .relation(&c.relation)
                .is_some_and(|r| r.contains(&solution.restrict(&c.scope)))
        })
}

/// Whether the operation preserves every relation of the template; the
/// first violation otherwise.
pub fn template_preserved(
    op: TemporalOp,
    template: &TemporalTemplate,
) -> Result<Option<(String, Counterexample)>> {
    for (name, rel) in template.relations() {
        if let Preservation::Violated(cx) = preserves_temporal(op, rel)? {
            return Ok(Some((name.to_string(), *cx)));
        }
    }
    Ok(None)
}

/// Solves an instance of a template preserved by `mode` (one of
/// [`MASTER_MODES`]) by building the solution level by level from the
/// bottom, each level a free set. Returns the levels as a weak order on the
/// variables.
///
/// Under `PP` the largest free set containing the first possible variable
/// becomes the lowest level. Under `LL` forced equalities are merged first
/// and the candidate levels are the smallest free sets containing each
/// variable, tried in turn.
pub fn solve_master(
    instance: &Instance,
    template: &TemporalTemplate,
    mode: TemporalOp,
) -> Result<Option<WeakOrderType>> {
    if !MASTER_MODES.contains(&mode) {
        return Err(Error::Parameter(format!("{mode} is not a master mode")));
    }
    if let Some((name, cx)) = template_preserved(mode, template)? {
        return Err(Error::PreconditionFailed(format!(
            "{mode} does not preserve {name}: {cx}"
        )));
    }
    let work = Work::from_instance(instance, template)?;
    let (work, reverse) = if mode.is_dual() {
        (work.reversed(), true)
    } else {
        (work, false)
    };
    let blocks = match mode.base() {
        TemporalOp::Pp => peel_pp(work)?,
        _ => peel_ll(work)?,
    };
    let solution = blocks.map(|mut blocks| {
        if reverse {
            blocks.reverse();
        }
        let mut levels = vec![0usize; instance.variables().len()];
        for (level, block) in blocks.iter().enumerate() {
            for &v in block {
                levels[v] = level;
            }
        }
        WeakOrderType::from_values(&levels)
    });
    if let Some(s) = &solution {
        if !satisfies(instance, template, s) {
            return Err(Error::WitnessCheckFailed(format!(
                "{mode} produced {s}, which violates the instance"
            )));
        }
    }
    Ok(solution)
}

/// Original variables of a set of local ones.
fn block(work: &Work, set: &BTreeSet<usize>) -> Vec<usize> {
    set.iter().flat_map(|&v| work.vars[v].iter().copied()).collect()
}

fn peel_pp(mut work: Work) -> Result<Option<Vec<Vec<usize>>>> {
    let mut blocks = Vec::new();
    while work.len() > 0 {
        let mut chosen = None;
        for x in 0..work.len() {
            if let Some(s) = work.free_set_containing(x)? {
                chosen = Some(s);
                break;
            }
        }
        let Some(set) = chosen else {
            return Ok(None);
        };
        blocks.push(block(&work, &set));
        match work.project_out(&set) {
            Some(next) => work = next,
            None => return Ok(None),
        }
    }
    Ok(Some(blocks))
}

/// Merges variables that are equal in every solution, as far as two sound
/// rules detect it: a constraint whose types all tie two positions, and a
/// free set with no free proper subset. Returns the merged
/// instance with the smallest free set of each variable, or `None` when
/// some constraint became empty.
/// The smallest free set containing each variable, where one exists.
type SmallestFree = Vec<Option<BTreeSet<usize>>>;

fn merge_equalities(mut work: Work) -> Result<Option<(Work, SmallestFree)>> {
    loop {
        if work.constraints.iter().any(|(_, r)| r.is_empty()) {
            return Ok(None);
        }
        let mut uf = UnionFind::new(work.len());
        let mut changed = false;
        for (a, b) in work.locally_forced_equalities() {
            changed |= uf.union(a, b);
        }
        let mut smallest = Vec::with_capacity(work.len());
        if !changed {
            for x in 0..work.len() {
                smallest.push(work.minimal_free_set_containing(x)?);
            }
            // a free set without free proper subsets; it is the smallest free
            // set of each of its members
            for set in smallest.iter().flatten() {
                if set.len() > 1 && set.iter().all(|&y| smallest[y].as_ref() == Some(set)) {
                    let first = *set.first().expect("nonempty");
                    for &y in set {
                        changed |= uf.union(first, y);
                    }
                }
            }
        }
        if !changed {
            return Ok(Some((work, smallest)));
        }
        let (rep, count) = uf.classes();
        work = work.merge(&rep, count);
    }
}

fn peel_ll(work: Work) -> Result<Option<Vec<Vec<usize>>>> {
    let Some((work, smallest)) = merge_equalities(work)? else {
        return Ok(None);
    };
    if work.len() == 0 {
        return Ok(Some(Vec::new()));
    }
    let mut tried: Vec<&BTreeSet<usize>> = Vec::new();
    for set in smallest.iter().flatten() {
        if tried.contains(&set) {
            continue;
        }
        tried.push(set);
        let Some(rest) = work.project_out(set) else {
            continue;
        };
        if let Some(mut blocks) = peel_ll(rest)? {
            blocks.insert(0, block(&work, set));
            return Ok(Some(blocks));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TemporalVerdict {
    /// Solvable in polynomial time by the master algorithm for this mode.
    Tractable(TemporalOp),
    /// None of the four operations is a polymorphism; one violation each.
    NpComplete(Vec<(String, Counterexample)>),
}

impl fmt::Display for TemporalVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemporalVerdict::Tractable(op) => write!(f, "P({op})"),
            TemporalVerdict::NpComplete(_) => f.write_str("NP_COMPLETE"),
        }
    }
}

pub fn classify_temporal(template: &TemporalTemplate) -> Result<TemporalVerdict> {
    let mut witnesses = Vec::new();
    for mode in MASTER_MODES {
        match template_preserved(mode, template)? {
            None => return Ok(TemporalVerdict::Tractable(mode)),
            Some(w) => witnesses.push(w),
        }
    }
    Ok(TemporalVerdict::NpComplete(witnesses))
}

/// Exhaustive search over weak orders of the variables, pruning as soon as
/// a constraint's variables are all placed.
pub fn brute_oracle(instance: &Instance, template: &TemporalTemplate) -> Result<Option<WeakOrderType>> {
    let n = instance.variables().len();
    if n > MAX_ORACLE_VARIABLES {
        return Err(Error::BudgetExceeded(format!(
            "{n} variables (limit {MAX_ORACLE_VARIABLES})"
        )));
    }
    instance.check_signature(|name| template.relation(name).map(TemporalRelation::arity))?;
    // constraints to check once the prefix has length `i + 1`
    let mut due: Vec<Vec<(&TemporalRelation, &[usize])>> = vec![Vec::new(); n.max(1)];
    for c in instance.constraints() {
        let last = c.scope.iter().copied().max().unwrap_or(0);
        due[last].push((template.relation(&c.relation).expect("checked"), &c.scope));
    }
    let mut found = None;
    let mut levels = Vec::with_capacity(n);
    let mut prefix_ok = |prefix: &[usize]| {
        due[prefix.len() - 1].iter().all(|(rel, scope)| {
            let values: Vec<usize> = scope.iter().map(|&v| prefix[v]).collect();
            rel.contains(&WeakOrderType::from_values(&values))
        })
    };
    if n == 0 {
        return Ok(instance
            .constraints()
            .is_empty()
            .then(|| WeakOrderType::from_values::<usize>(&[])));
    }
    insertions_pruned(n, &mut levels, 0, &mut prefix_ok, &mut |l| {
        found = Some(WeakOrderType::from_values(l));
        false
    });
    Ok(found)
}

/// `[x][y,z]` style rendering of a weak order on named variables.
pub fn format_levels(instance: &Instance, solution: &WeakOrderType) -> String {
    solution
        .blocks()
        .iter()
        .map(|b| {
            let names: Vec<&str> = b.iter().map(|&v| instance.variables()[v].as_str()).collect();
            format!("[{}]", names.join(","))
        })
        .collect()
}
