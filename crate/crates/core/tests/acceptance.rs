//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion outside `KNOWN_DEVIATIONS` fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use csplab::consistency::{establish_kl, LocalTemplate};
use csplab::homog::*;
use csplab::polyengine::{
    boolean_classify, find_polymorphism, preserves_op, probes, schaefer_solve, BooleanClass,
    IdentitySystem, OpTable,
};
use csplab::relstruct::{exhaustive_search, hom_search, FiniteStructure, Instance};
use csplab::temporal::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria expected to fail, each analysed in the project notes.
/// Criterion 4 asks for `∧` on every ll-closed template's two-element
/// shadow, but ll induces `∨` there.
const KNOWN_DEVIATIONS: &[usize] = &[4];

const INSTANCES_MASTER: usize = 200;
const MASTER_MAX_VARS: usize = 7;
const MASTER_MAX_CONSTRAINTS: usize = 8;
const DISCOVERED_LL: usize = 5;
const INSTANCES_WIDTH: usize = 200;
const WIDTH_MAX_VARS: usize = 6;
const INSTANCES_SOUNDNESS: usize = 500;
const BULATOV_TEMPLATES: usize = 20;
const INSTANCES_SCHAEFER: usize = 200;
const TIME_LIMIT: Duration = Duration::from_secs(300);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------- helpers

fn scope(rng: &mut ChaCha8Rng, arity: usize, vars: usize) -> Vec<usize> {
    (0..arity).map(|_| rng.gen_range(0..vars)).collect()
}

fn random_instance(
    rng: &mut ChaCha8Rng,
    rels: &[(String, usize)],
    vars: usize,
    constraints: usize,
) -> Instance {
    let mut inst = Instance::with_anonymous_variables(vars);
    for _ in 0..constraints {
        let (name, arity) = &rels[rng.gen_range(0..rels.len())];
        let s = scope(rng, *arity, vars);
        inst.add_constraint_indices(name, s).unwrap();
    }
    inst
}

fn temporal_signature(t: &TemporalTemplate) -> Vec<(String, usize)> {
    t.relations().map(|(n, r)| (n.to_string(), r.arity())).collect()
}

fn hom_signature(t: &HomTemplate) -> Vec<(String, usize)> {
    t.relations().map(|(n, r)| (n.to_string(), r.arity())).collect()
}

fn rmin() -> TemporalTemplate {
    TemporalTemplate::order()
        .with(
            "RMIN",
            TemporalRelation::from_predicate(3, |v| v[1] < v[0] || v[2] < v[0]).unwrap(),
        )
        .unwrap()
}

fn order_and_leq() -> TemporalTemplate {
    TemporalTemplate::order()
        .with("LEQ", TemporalRelation::from_predicate(2, |v| v[0] <= v[1]).unwrap())
        .unwrap()
}

/// Templates of two random relations (arity 2 or 3, at most 4 types each)
/// preserved by ll but by neither pp nor its dual.
fn discover_ll_templates(count: usize, seed: u64) -> Vec<TemporalTemplate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orders: Vec<Vec<WeakOrderType>> = (0..=3)
        .map(|k| {
            if k < 2 {
                Vec::new()
            } else {
                enumerate_weak_orders(k).unwrap()
            }
        })
        .collect();
    let random_ll_relation = |rng: &mut ChaCha8Rng| loop {
        let arity = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=4);
        let types: Vec<WeakOrderType> = orders[arity].choose_multiple(rng, n).cloned().collect();
        let rel = TemporalRelation::new(arity, types).unwrap();
        if preserves_temporal(TemporalOp::Ll, &rel).unwrap().is_preserved() {
            return rel;
        }
    };
    let mut found = Vec::new();
    while found.len() < count {
        let t = TemporalTemplate::order()
            .with("A", random_ll_relation(&mut rng))
            .unwrap()
            .with("B", random_ll_relation(&mut rng))
            .unwrap();
        let pp_free = template_preserved(TemporalOp::Pp, &t).unwrap().is_some()
            && template_preserved(TemporalOp::DualPp, &t).unwrap().is_some();
        if pp_free && classify_temporal(&t).unwrap() == TemporalVerdict::Tractable(TemporalOp::Ll) {
            found.push(t);
        }
    }
    found
}

// ---------------------------------------------------------------- 1

fn criterion_1(discovered: &[TemporalTemplate]) -> Outcome {
    let start = Instant::now();
    let mut templates = vec![
        ("(Q;<)".to_string(), TemporalTemplate::order()),
        ("(Q;<,RMIN)".to_string(), rmin()),
        ("(Q;<,<=)".to_string(), order_and_leq()),
    ];
    for (i, t) in discovered.iter().enumerate() {
        templates.push((format!("ll#{i}"), t.clone()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut disagreements, mut sat, mut total) = (0, 0, 0);
    for (name, t) in &templates {
        let mode = match classify_temporal(t).unwrap() {
            TemporalVerdict::Tractable(m) => m,
            v => return outcome(false, format!("{name} classified {v}")),
        };
        let sig = temporal_signature(t);
        for _ in 0..INSTANCES_MASTER {
            let v = rng.gen_range(1..=MASTER_MAX_VARS);
            let c = rng.gen_range(1..=MASTER_MAX_CONSTRAINTS);
            let inst = random_instance(&mut rng, &sig, v, c);
            let got = solve_master(&inst, t, mode).unwrap();
            let want = brute_oracle(&inst, t).unwrap();
            let ok = match &got {
                Some(sol) => want.is_some() && satisfies(&inst, t, sol),
                None => want.is_none(),
            };
            if !ok {
                disagreements += 1;
                eprintln!("  criterion 1: {name} mode {mode}: {inst:?}");
            }
            sat += usize::from(want.is_some());
            total += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        disagreements == 0 && elapsed < TIME_LIMIT,
        format!(
            "{} templates, {total} instances ({sat} SAT), {disagreements} disagreements, {:.1}s",
            templates.len(),
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- 2

/// Concrete operations on integers. `eps(y) = y + C` is strictly increasing
/// and positive on the value range in use; the `ll` encoding orders the
/// `x <= 0` half lexicographically by `(x, y)` around `ll(0,0) = 0` and
/// puts the `x > 0` half above it, ordered by `(y, x)`.
fn concrete(op: TemporalOp, x: i64, y: i64) -> i64 {
    const M: i64 = 1_000;
    match op {
        TemporalOp::Pp => {
            if x <= 0 {
                x
            } else {
                y + M
            }
        }
        TemporalOp::Ll => {
            if x <= 0 {
                x * M + y
            } else {
                M * M * M + y * M + x
            }
        }
        TemporalOp::Lex => x * M + y,
        dual => -concrete(dual.base(), -x, -y),
    }
}

fn criterion_2() -> Outcome {
    let betw = TemporalTemplate::order()
        .with("BETW", TemporalRelation::parse(3, "1<2<3; 3<2<1").unwrap())
        .unwrap();
    let witnesses = match classify_temporal(&betw).unwrap() {
        TemporalVerdict::NpComplete(w) => w,
        v => return outcome(false, format!("verdict {v}")),
    };
    if concrete(TemporalOp::Ll, 0, 0) != 0 || concrete(TemporalOp::Pp, -2, 5) != -2 {
        return outcome(false, "concrete operations misdefined");
    }
    let rel = betw.relation("BETW").unwrap();
    let mut ops = BTreeSet::new();
    for (name, cx) in &witnesses {
        let values = cx.joint.realize();
        let k = cx.first.arity();
        let (a, b) = values.split_at(k);
        let image: Vec<i64> = a.iter().zip(b).map(|(&x, &y)| concrete(cx.op, x, y)).collect();
        let valid = name == "BETW"
            && rel.contains(&WeakOrderType::from_values(a))
            && rel.contains(&WeakOrderType::from_values(b))
            && WeakOrderType::from_values(a) == cx.first
            && WeakOrderType::from_values(b) == cx.second
            && WeakOrderType::from_values(&image) == cx.image
            && !rel.contains(&cx.image);
        if !valid {
            return outcome(false, format!("counterexample does not validate: {cx}"));
        }
        ops.insert(cx.op.name());
    }
    outcome(
        ops.len() == 4,
        format!("NP_COMPLETE, {} counterexamples validated ({})", ops.len(), {
            let v: Vec<&str> = ops.into_iter().collect();
            v.join(" ")
        }),
    )
}

// ---------------------------------------------------------------- 3

/// Free-set definition, checked over the types of each constraint.
fn free_by_definition(inst: &Instance, t: &TemporalTemplate, set: &BTreeSet<usize>) -> bool {
    !set.is_empty()
        && inst.constraints().iter().all(|c| {
            let touched: Vec<usize> = (0..c.scope.len())
                .filter(|&i| set.contains(&c.scope[i]))
                .collect();
            touched.is_empty()
                || t.relation(&c.relation).unwrap().types().iter().any(|ty| {
                    let consistent = (0..c.scope.len()).all(|i| {
                        (0..c.scope.len())
                            .all(|j| c.scope[i] != c.scope[j] || ty.level(i) == ty.level(j))
                    });
                    consistent && ty.min_block() == touched
                })
        })
}

fn criterion_3() -> Outcome {
    let t = TemporalTemplate::order();
    let afin = build_afin(&t);
    let (lt_name, _) = t.relations().next().unwrap();
    let lt: BTreeSet<Vec<usize>> = afin.relation(lt_name).unwrap().tuples().clone();
    let z: BTreeSet<Vec<usize>> = afin.relation(NAME_Z).unwrap().tuples().clone();
    let p: BTreeSet<Vec<usize>> = afin.relation(NAME_P).unwrap().tuples().clone();
    let structure_ok = afin.domain_size() == 2
        && afin.relation_count() == 3
        && lt == BTreeSet::from([vec![Z, P], vec![P, P]])
        && z == BTreeSet::from([vec![Z]])
        && p == BTreeSet::from([vec![P]]);

    let inst = Instance::new(["x", "y"]).unwrap().constrain(lt_name, &["x", "y"]).unwrap();
    let fx = free_set_containing(&inst, &t, "x").unwrap();
    let fy = free_set_containing(&inst, &t, "y").unwrap();
    let by_def: Vec<BTreeSet<usize>> = [vec![0], vec![1], vec![0, 1]]
        .into_iter()
        .map(BTreeSet::from_iter)
        .filter(|s| free_by_definition(&inst, &t, s))
        .collect();
    let free_ok = fx == Some(BTreeSet::from(["x".to_string()]))
        && fy.is_none()
        && by_def == vec![BTreeSet::from([0])];
    outcome(
        structure_ok && free_ok,
        format!("{lt_name}^fin = {lt:?}, free(x) = {fx:?}, free(y) = {fy:?}"),
    )
}

// ---------------------------------------------------------------- 4

fn criterion_4(discovered: &[TemporalTemplate]) -> Outcome {
    let mut candidates = vec![TemporalTemplate::order(), rmin(), order_and_leq()];
    candidates.extend(discovered.iter().cloned());
    candidates.push(
        TemporalTemplate::order()
            .with("NEQ", TemporalRelation::parse(2, "1<2; 2<1").unwrap())
            .unwrap(),
    );
    let (mut ll_closed, mut and_ok, mut or_ok) = (0, 0, 0);
    let mut first_failure = None;
    for t in &candidates {
        if template_preserved(TemporalOp::Ll, t).unwrap().is_some() {
            continue;
        }
        ll_closed += 1;
        let afin = build_afin(t);
        if preserves_op(&probes::and(), &afin).unwrap() {
            and_ok += 1;
        } else if first_failure.is_none() {
            let names: Vec<&str> = t.relations().map(|(n, _)| n).collect();
            first_failure = Some(names.join(","));
        }
        or_ok += usize::from(preserves_op(&probes::or(), &afin).unwrap());
    }
    outcome(
        ll_closed > 0 && and_ok == ll_closed,
        format!(
            "{ll_closed} ll-closed templates: AND preserves {and_ok}, OR preserves {or_ok}{}",
            first_failure.map(|n| format!(", AND fails first on {{{n}}}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- 5, 6

fn count_pairs(t: &LabeledType, label: u8) -> usize {
    let k = t.arity();
    (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .filter(|&(i, j)| t.pair(i, j) == label)
        .count()
}

/// Ternary relations "injective, and the number of pairs labeled `label`
/// lies in `counts`", for every nonempty proper subset of counts, with the
/// first whose template gets the wanted verdict.
fn generate(base: Base, label: u8, extra: &HomTemplate, want: VerdictKind) -> Option<(String, HomTemplate, Verdict)> {
    for mask in 1u32..15 {
        let counts: Vec<usize> = (0..4).filter(|c| mask >> c & 1 == 1).collect();
        let r = TypeSetRelation::from_predicate(base, 3, |t| {
            t.is_injective() && counts.contains(&count_pairs(t, label))
        })
        .unwrap();
        let t = extra.clone().with("R", r).unwrap();
        let v = classify_reduct(&t).unwrap();
        if v.kind == want {
            return Some((format!("R = injective with count in {counts:?}"), t, v));
        }
    }
    None
}

fn all_none_rechecked(v: &Verdict) -> bool {
    v.searches
        .iter()
        .all(|s| s.behavior.is_some() || s.rechecked)
}

fn witness_valid(t: &HomTemplate, v: &Verdict) -> bool {
    match &v.witness {
        Some((shape, b)) => {
            b.arity() == shape.arity() && t.relations().all(|(_, r)| behavior_preserves(b, r).unwrap())
        }
        None => true,
    }
}

fn criterion_5(bounded: &mut Vec<(String, HomTemplate)>) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let arc = HomTemplate::standard(Base::Tournament);
    let v = classify_reduct(&arc).unwrap();
    let ok = v.kind == VerdictKind::PBoundedWidth
        && v.witness.as_ref().map(|w| w.0) == Some(Shape::TernaryMajority)
        && witness_valid(&arc, &v);
    pass &= ok;
    notes.push(format!("(T;->) {}", v.kind));
    bounded.push(("(T;->)".into(), arc));

    let parity = TypeSetRelation::from_predicate(Base::Tournament, 4, |t| {
        t.is_injective() && count_pairs(t, FWD).is_multiple_of(2)
    })
    .unwrap();
    let t = HomTemplate::new(Base::Tournament, [("EVEN4", parity)]).unwrap();
    let v = classify_reduct(&t).unwrap();
    let majority_none = v
        .searches
        .iter()
        .any(|s| s.shape == Shape::TernaryMajority && s.behavior.is_none() && s.rechecked);
    let ok = v.kind == VerdictKind::PNotBoundedWidth
        && v.witness.as_ref().map(|w| w.0) == Some(Shape::TernaryMinority)
        && majority_none
        && witness_valid(&t, &v);
    pass &= ok;
    notes.push(format!("even parity {}", v.kind));

    match generate(Base::Tournament, FWD, &HomTemplate::standard(Base::Tournament), VerdictKind::NpComplete) {
        Some((desc, _, v)) => {
            let shapes: BTreeSet<Shape> = v.searches.iter().map(|s| s.shape).collect();
            let ok = all_none_rechecked(&v) && shapes.len() == 2;
            pass &= ok;
            notes.push(format!("{desc} {} (both NONE rechecked: {ok})", v.kind));
        }
        None => {
            pass = false;
            notes.push("no NP_COMPLETE template generated".into());
        }
    }
    outcome(pass, notes.join("; "))
}

fn criterion_6(bounded: &mut Vec<(String, HomTemplate)>) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let e = HomTemplate::standard(Base::Graph);
    let en = e.clone().with("N", TypeSetRelation::non_edge(Base::Graph)).unwrap();
    for (name, t) in [("(G;E)", e), ("(G;E,N)", en)] {
        let v = classify_reduct(&t).unwrap();
        pass &= v.kind == VerdictKind::PBoundedWidth && witness_valid(&t, &v);
        notes.push(format!("{name} {}", v.kind));
        bounded.push((name.into(), t));
    }
    let empty = HomTemplate::new(Base::Graph, Vec::<(String, TypeSetRelation)>::new()).unwrap();
    for want in [VerdictKind::PNotBoundedWidth, VerdictKind::NpComplete] {
        match generate(Base::Graph, E, &empty, want) {
            Some((desc, t, v)) => {
                let ok = all_none_rechecked(&v) && witness_valid(&t, &v);
                pass &= ok;
                notes.push(format!("{desc} {} (certificates: {ok})", v.kind));
            }
            None => {
                pass = false;
                notes.push(format!("no {want} template generated"));
            }
        }
    }
    outcome(pass, notes.join("; "))
}

// ---------------------------------------------------------------- 7

fn criterion_7(bounded: &[(String, HomTemplate)]) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut bad, mut escalated, mut unsat) = (0, 0, 0);
    for (name, t) in bounded {
        let sig = hom_signature(t);
        for _ in 0..INSTANCES_WIDTH {
            let v = rng.gen_range(2..=WIDTH_MAX_VARS);
            let c = rng.gen_range(1..=2 * v);
            let inst = random_instance(&mut rng, &sig, v, c);
            let brute_sat = solve_instance_brute(&inst, t).unwrap().is_some();
            let mut rejects = establish_kl(&inst, t, 2, 3).unwrap().is_empty_derived();
            if !rejects {
                escalated += 1;
                rejects = establish_kl(&inst, t, 3, 9).unwrap().is_empty_derived();
            }
            if rejects == brute_sat {
                bad += 1;
                eprintln!("  criterion 7: {name}: rejects={rejects} brute_sat={brute_sat} {inst:?}");
            }
            unsat += usize::from(!brute_sat);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad == 0 && elapsed < TIME_LIMIT,
        format!(
            "{} templates x {INSTANCES_WIDTH} instances ({unsat} UNSAT), {escalated} escalated to (3,9), {bad} mismatches, {:.1}s",
            bounded.len(),
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- 8

fn random_finite(rng: &mut ChaCha8Rng, d: usize) -> FiniteStructure {
    let mut s = FiniteStructure::new(d).unwrap();
    for (name, arity) in [("R", 2), ("S", 3)] {
        let all = (d as u32).pow(arity as u32) as usize;
        let tuples: Vec<Vec<usize>> = (0..all)
            .filter(|_| rng.gen_bool(0.5))
            .map(|code| csplab::relstruct::decode_tuple(code, arity, d))
            .collect();
        s.add_relation(name, arity, tuples).unwrap();
    }
    s
}

fn finite_signature(s: &FiniteStructure) -> Vec<(String, usize)> {
    s.relations().map(|(n, r)| (n.to_string(), r.arity())).collect()
}

fn check_sound<T: LocalTemplate>(inst: &Instance, t: &T, brute_sat: bool, kl: (usize, usize)) -> bool {
    !(brute_sat && establish_kl(inst, t, kl.0, kl.1).unwrap().is_empty_derived())
}

fn criterion_8(discovered: &[TemporalTemplate]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let levels = [(1, 2), (2, 3), (3, 4)];
    let mut violations = 0;
    let mut derived = 0;
    let hom = [
        HomTemplate::standard(Base::Tournament)
            .with(
                "ONE",
                TypeSetRelation::from_predicate(Base::Tournament, 3, |t| {
                    t.is_injective() && count_pairs(t, FWD) == 1
                })
                .unwrap(),
            )
            .unwrap(),
        HomTemplate::standard(Base::Graph)
            .with("N", TypeSetRelation::non_edge(Base::Graph))
            .unwrap(),
        HomTemplate::standard(Base::KFree(3)),
    ];
    let mut temporal = vec![TemporalTemplate::order(), rmin()];
    temporal.extend(discovered.iter().cloned());
    temporal.push(
        TemporalTemplate::order()
            .with("BETW", TemporalRelation::parse(3, "1<2<3; 3<2<1").unwrap())
            .unwrap(),
    );
    for i in 0..INSTANCES_SOUNDNESS {
        let kl = levels[i % levels.len()];
        let v = rng.gen_range(2..=5);
        let c = rng.gen_range(1..=7);
        let ok = match i % 3 {
            0 => {
                let d = rng.gen_range(2..=3);
                let s = random_finite(&mut rng, d);
                let inst = random_instance(&mut rng, &finite_signature(&s), v, c);
                let sat = exhaustive_search(&inst, &s).unwrap().is_some();
                derived += usize::from(!sat);
                check_sound(&inst, &s, sat, kl)
            }
            1 => {
                let t = &temporal[rng.gen_range(0..temporal.len())];
                let inst = random_instance(&mut rng, &temporal_signature(t), v, c);
                let sat = brute_oracle(&inst, t).unwrap().is_some();
                derived += usize::from(!sat);
                check_sound(&inst, t, sat, kl)
            }
            _ => {
                let t = &hom[rng.gen_range(0..hom.len())];
                let inst = random_instance(&mut rng, &hom_signature(t), v, c);
                let sat = solve_instance_brute(&inst, t).unwrap().is_some();
                derived += usize::from(!sat);
                check_sound(&inst, t, sat, kl)
            }
        };
        violations += usize::from(!ok);
    }
    outcome(
        violations == 0,
        format!(
            "{INSTANCES_SOUNDNESS} instances over finite, temporal, tournament, graph and K3-free bases ({derived} UNSAT), {violations} violations"
        ),
    )
}

// ---------------------------------------------------------------- 9

/// A loopless symmetric relation on `{0,1}^k`, as a `2k`-ary relation,
/// containing an odd cycle, plus both constants.
fn bulatov_template(rng: &mut ChaCha8Rng) -> FiniteStructure {
    let k = rng.gen_range(2..=3);
    let points: Vec<usize> = (0..1 << k).collect();
    let len = if k == 2 { 3 } else { *[3, 5, 7].choose(rng).unwrap() };
    let cycle: Vec<usize> = points.choose_multiple(rng, len).copied().collect();
    let mut edges = BTreeSet::new();
    for i in 0..len {
        let (a, b) = (cycle[i], cycle[(i + 1) % len]);
        edges.insert((a, b));
        edges.insert((b, a));
    }
    for _ in 0..rng.gen_range(0..4) {
        let (a, b) = (*points.choose(rng).unwrap(), *points.choose(rng).unwrap());
        if a != b {
            edges.insert((a, b));
            edges.insert((b, a));
        }
    }
    let bits = |v: usize| (0..k).map(move |i| v >> i & 1);
    let tuples: Vec<Vec<usize>> = edges.iter().map(|&(a, b)| bits(a).chain(bits(b)).collect()).collect();
    FiniteStructure::new(2)
        .unwrap()
        .with_relation("C0", 1, [vec![0]])
        .unwrap()
        .with_relation("C1", 1, [vec![1]])
        .unwrap()
        .with_relation("G", 2 * k, tuples)
        .unwrap()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut trivial = 0;
    for _ in 0..BULATOV_TEMPLATES {
        let t = bulatov_template(&mut rng);
        let classes = boolean_classify(&t).unwrap();
        let idempotent = OpTable::projection(1, 2, 0);
        let no_siggers = find_polymorphism(&t, IdentitySystem::Siggers, 6).unwrap().is_none();
        if classes == BTreeSet::from([BooleanClass::Trivial])
            && no_siggers
            && preserves_op(&idempotent, &t).unwrap()
        {
            trivial += 1;
        }
    }
    outcome(
        trivial == BULATOV_TEMPLATES,
        format!("{trivial}/{BULATOV_TEMPLATES} templates TRIVIAL with no Siggers term"),
    )
}

// ---------------------------------------------------------------- 10

fn close_under(op: &OpTable, mut tuples: BTreeSet<Vec<usize>>) -> BTreeSet<Vec<usize>> {
    loop {
        let list: Vec<Vec<usize>> = tuples.iter().cloned().collect();
        let before = tuples.len();
        let arity = list[0].len();
        let n = op.arity();
        let mut idx = vec![0usize; n];
        loop {
            let image: Vec<usize> = (0..arity)
                .map(|p| op.apply(&idx.iter().map(|&i| list[i][p]).collect::<Vec<_>>()))
                .collect();
            tuples.insert(image);
            let mut j = n;
            loop {
                if j == 0 {
                    break;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < list.len() {
                    break;
                }
                idx[j] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
        if tuples.len() == before {
            return tuples;
        }
    }
}

fn schaefer_template(rng: &mut ChaCha8Rng, op: &OpTable) -> FiniteStructure {
    let mut s = FiniteStructure::new(2)
        .unwrap()
        .with_relation("C0", 1, [vec![0]])
        .unwrap()
        .with_relation("C1", 1, [vec![1]])
        .unwrap();
    for (name, arity) in [("R", 2), ("S", 3), ("U", 3)] {
        let seed: BTreeSet<Vec<usize>> = (0..rng.gen_range(1..=3))
            .map(|_| (0..arity).map(|_| rng.gen_range(0..2)).collect())
            .collect();
        s.add_relation(name, arity, close_under(op, seed)).unwrap();
    }
    s
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let classes = [
        (BooleanClass::HornAnd, probes::and()),
        (BooleanClass::Majority2Sat, probes::majority()),
        (BooleanClass::MinorityAffine, probes::minority()),
    ];
    let mut notes = Vec::new();
    let mut pass = true;
    for (class, op) in classes {
        let (mut agree, mut sat) = (0, 0);
        let mut template = schaefer_template(&mut rng, &op);
        for i in 0..INSTANCES_SCHAEFER {
            if i % 20 == 0 {
                template = schaefer_template(&mut rng, &op);
            }
            let v = rng.gen_range(2..=10);
            let c = rng.gen_range(1..=12);
            let inst = random_instance(&mut rng, &finite_signature(&template), v, c);
            let fast = schaefer_solve(&inst, &template, class).unwrap();
            let slow = hom_search(&inst, &template).unwrap();
            let ok = match &fast {
                Some(a) => slow.is_some() && a.satisfies(&inst, &template),
                None => slow.is_none(),
            };
            agree += usize::from(ok);
            sat += usize::from(slow.is_some());
        }
        pass &= agree == INSTANCES_SCHAEFER;
        notes.push(format!("{class} {agree}/{INSTANCES_SCHAEFER} ({sat} SAT)"));
    }
    outcome(pass, notes.join("; "))
}

fn main() -> ExitCode {
    let discovered = discover_ll_templates(DISCOVERED_LL, 2024);
    let mut bounded = Vec::new();
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "temporal master vs oracle", criterion_1(&discovered)),
        (2, "NP-complete temporal verdicts", criterion_2()),
        (3, "A^fin correctness", criterion_3()),
        (4, "semilattice inheritance (AND)", criterion_4(&discovered)),
        (5, "tournament classifier", criterion_5(&mut bounded)),
        (6, "random-graph classifier", criterion_6(&mut bounded)),
        (7, "width coherence", criterion_7(&bounded)),
        (8, "consistency soundness", criterion_8(&discovered)),
        (9, "Bulatov invariant", criterion_9()),
        (10, "Schaefer dispatch", criterion_10()),
    ];
    let mut unexpected = false;
    for (n, title, o) in &results {
        let known = KNOWN_DEVIATIONS.contains(n);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as a known deviation)",
            (false, true) => "FAIL (known deviation)",
            (false, false) => "FAIL",
        };
        unexpected |= o.pass == known;
        println!("criterion {n:>2} {tag}: {title}: {}", o.detail);
    }
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
