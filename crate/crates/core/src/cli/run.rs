use std::fmt::Write as _;
use std::str::FromStr;

use crate::consistency::{establish_kl, Consistency};
use crate::error::{Error, Result};
use crate::homog::{classify_reduct, format_solution, solve_instance_brute, VerdictKind};
use crate::polyengine::{
    boolean_classify, find_polymorphism, schaefer_solve, BooleanClass, IdentitySystem,
    MAX_SEARCH_CELLS,
};
use crate::relstruct::{exhaustive_search, hom_search, Assignment, FiniteStructure, Instance};
use crate::temporal::{
    brute_oracle, build_afin, classify_temporal, format_levels, free_set_containing, solve_master,
    TemporalOp, TemporalTemplate, TemporalVerdict, WeakOrderType, P, Z,
};

use super::parse::{parse_instance, parse_template, Template};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Classify,
    Solve,
    Freesets,
    Afin,
    Polysearch,
    Consistency,
    Oracle,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Classify,
        Command::Solve,
        Command::Freesets,
        Command::Afin,
        Command::Polysearch,
        Command::Consistency,
        Command::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Solve => "solve",
            Command::Freesets => "freesets",
            Command::Afin => "afin",
            Command::Polysearch => "polysearch",
            Command::Consistency => "consistency",
            Command::Oracle => "oracle",
        }
    }

    pub fn needs_instance(self) -> bool {
        matches!(
            self,
            Command::Solve | Command::Freesets | Command::Consistency | Command::Oracle
        )
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown command `{s}`")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    /// `(k, l)` for `consistency`; `(2, 3)` when absent.
    pub kl: Option<(usize, usize)>,
    /// Forces a temporal master algorithm.
    pub mode: Option<TemporalOp>,
    /// Cross-checks `solve` with the brute-force oracle.
    pub oracle: bool,
    /// Identity system for `polysearch`; Siggers when absent.
    pub identity: Option<IdentitySystem>,
    pub arity: Option<usize>,
}

/// Parses `K,L`.
pub fn parse_kl(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parameter(format!("expected K,L, got `{s}`"));
    let (k, l) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        k.trim().parse().map_err(|_| bad())?,
        l.trim().parse().map_err(|_| bad())?,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    /// 0 completed, 1 negative outcome (UNSAT, NP-complete, NONE), 2 input
    /// or internal error.
    pub exit_code: i32,
}

struct Out {
    text: String,
    negative: bool,
}

impl Out {
    fn new() -> Self {
        Out {
            text: String::new(),
            negative: false,
        }
    }

    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key}: {value}");
    }
}

/// Runs a command on template and instance text.
pub fn run(command: Command, template: &str, instance: Option<&str>, flags: &Flags) -> Report {
    match execute(command, template, instance, flags) {
        Ok(out) => Report {
            text: out.text,
            exit_code: i32::from(out.negative),
        },
        Err(e) => Report {
            text: format!("error: {e}\n"),
            exit_code: 2,
        },
    }
}

fn execute(command: Command, template: &str, instance: Option<&str>, flags: &Flags) -> Result<Out> {
    let template = parse_template(template)?;
    let instance = match (command.needs_instance(), instance) {
        (true, Some(text)) => Some(parse_instance(text, &template)?),
        (true, None) => {
            return Err(Error::Parameter(format!(
                "`{}` needs an instance file",
                command.name()
            )))
        }
        (false, _) => None,
    };
    let mut out = Out::new();
    out.line("command", command.name());
    out.line("base", template.base_name());
    match command {
        Command::Classify => classify(&template, &mut out)?,
        Command::Solve => solve(&template, instance.as_ref().expect("checked"), flags, &mut out)?,
        Command::Freesets => freesets(&template, instance.as_ref().expect("checked"), &mut out)?,
        Command::Afin => afin(&template, &mut out)?,
        Command::Polysearch => polysearch(&template, flags, &mut out)?,
        Command::Consistency => consistency(&template, instance.as_ref().expect("checked"), flags, &mut out)?,
        Command::Oracle => {
            let found = oracle(&template, instance.as_ref().expect("checked"))?;
            report_solution(&mut out, found);
        }
    }
    Ok(out)
}

fn temporal_only<'a>(template: &'a Template, command: &str) -> Result<&'a TemporalTemplate> {
    match template {
        Template::Temporal(t) => Ok(t),
        _ => Err(Error::Parameter(format!("`{command}` needs a temporal template"))),
    }
}

fn classify(template: &Template, out: &mut Out) -> Result<()> {
    match template {
        Template::Temporal(t) => match classify_temporal(t)? {
            TemporalVerdict::Tractable(op) => {
                out.line("verdict", "P");
                out.line("mode", op);
            }
            TemporalVerdict::NpComplete(witnesses) => {
                out.line("verdict", "NP_COMPLETE");
                out.negative = true;
                for (name, cx) in witnesses {
                    out.line("violated", format!("{name} {cx}"));
                }
            }
        },
        Template::Hom(h) => {
            let v = classify_reduct(h)?;
            out.line("verdict", v.kind);
            out.line(
                "width",
                match v.bounded_width() {
                    Some(true) => "BOUNDED",
                    Some(false) => "UNBOUNDED",
                    None => "UNDETERMINED",
                },
            );
            for s in &v.searches {
                out.line(
                    "search",
                    format!(
                        "{} {} free_cells={} variables={} nodes={} rechecked={}",
                        s.shape,
                        if s.behavior.is_some() { "FOUND" } else { "NONE" },
                        s.free_cells,
                        s.variables,
                        s.nodes,
                        if s.rechecked { "yes" } else { "no" }
                    ),
                );
            }
            if let Some((shape, b)) = &v.witness {
                out.line("witness", shape);
                for row in b.to_string().lines() {
                    out.line("behavior", row);
                }
            }
            out.negative = matches!(v.kind, VerdictKind::NpComplete | VerdictKind::EqualityNpc);
        }
        Template::Finite(s) if s.domain_size() == 2 => {
            let classes = boolean_classify(s)?;
            let names: Vec<&str> = classes.iter().map(|c| c.name()).collect();
            out.line("classes", names.join(" "));
            let hard = classes.contains(&BooleanClass::Trivial);
            out.line("verdict", if hard { "NP_COMPLETE" } else { "P" });
            out.negative = hard;
        }
        Template::Finite(s) => {
            // a core is tractable iff it has a Siggers term, iff it has a
            // cyclic term of some (any) prime arity above the domain size;
            // the cyclic table is the smaller one from three elements on
            let d = s.domain_size();
            let p = (d + 1..).find(|&p| (2..p).all(|q| p % q != 0)).expect("primes");
            let identity = if d.pow(6) <= MAX_SEARCH_CELLS {
                IdentitySystem::Siggers
            } else {
                IdentitySystem::Cyclic(p)
            };
            let op = find_polymorphism(s, identity, identity.fixed_arity().expect("fixed"))?;
            out.line("assumes", "core");
            out.line("identity", identity);
            match op {
                Some(op) => {
                    out.line("verdict", "P");
                    out.line("term", op);
                }
                None => {
                    out.line("verdict", "NP_COMPLETE");
                    out.negative = true;
                }
            }
        }
    }
    Ok(())
}

enum Found {
    Levels(Instance, WeakOrderType),
    Labeled(Instance, crate::homog::LabeledType),
    Values(Instance, Assignment),
    None,
}

impl Found {
    fn is_sat(&self) -> bool {
        !matches!(self, Found::None)
    }
}

fn report_solution(out: &mut Out, found: Found) {
    out.line("result", if found.is_sat() { "SAT" } else { "UNSAT" });
    match found {
        Found::Levels(i, s) => out.line("levels", format_levels(&i, &s)),
        Found::Labeled(i, t) => out.line("solution", format_solution(&i, &t)),
        Found::Values(i, a) => out.line("assignment", a.display(&i)),
        Found::None => out.negative = true,
    }
}

fn oracle(template: &Template, instance: &Instance) -> Result<Found> {
    let i = instance.clone();
    Ok(match template {
        Template::Temporal(t) => brute_oracle(instance, t)?.map_or(Found::None, |s| Found::Levels(i, s)),
        Template::Hom(h) => solve_instance_brute(instance, h)?.map_or(Found::None, |s| Found::Labeled(i, s)),
        Template::Finite(s) => exhaustive_search(instance, s)?.map_or(Found::None, |a| Found::Values(i, a)),
    })
}

fn solve_finite(s: &FiniteStructure, instance: &Instance, out: &mut Out) -> Result<Option<Assignment>> {
    if s.domain_size() == 2 {
        if let Some(class) = BooleanClass::preferred(&boolean_classify(s)?) {
            out.line("method", format!("schaefer {class}"));
            return schaefer_solve(instance, s, class);
        }
    }
    out.line("method", "search");
    hom_search(instance, s)
}

fn solve(template: &Template, instance: &Instance, flags: &Flags, out: &mut Out) -> Result<()> {
    let i = instance.clone();
    let found = match template {
        Template::Temporal(t) => {
            let mode = match flags.mode {
                Some(m) => Some(m),
                None => match classify_temporal(t)? {
                    TemporalVerdict::Tractable(op) => Some(op),
                    TemporalVerdict::NpComplete(_) => None,
                },
            };
            let sol = match mode {
                Some(m) => {
                    out.line("method", format!("master {m}"));
                    solve_master(instance, t, m)?
                }
                None => {
                    out.line("method", "oracle");
                    brute_oracle(instance, t)?
                }
            };
            sol.map_or(Found::None, |s| Found::Levels(i, s))
        }
        Template::Hom(h) => {
            out.line("method", "brute");
            solve_instance_brute(instance, h)?.map_or(Found::None, |s| Found::Labeled(i, s))
        }
        Template::Finite(s) => solve_finite(s, instance, out)?.map_or(Found::None, |a| Found::Values(i, a)),
    };
    let sat = found.is_sat();
    report_solution(out, found);
    if flags.oracle {
        let check = oracle(template, instance)?.is_sat();
        out.line("oracle", if check { "SAT" } else { "UNSAT" });
        out.line("agree", if check == sat { "yes" } else { "no" });
        if check != sat {
            return Err(Error::WitnessCheckFailed("solver and oracle disagree".into()));
        }
    }
    Ok(())
}

fn freesets(template: &Template, instance: &Instance, out: &mut Out) -> Result<()> {
    let t = temporal_only(template, "freesets")?;
    for x in instance.variables() {
        let value = match free_set_containing(instance, t, x)? {
            Some(set) => set.into_iter().collect::<Vec<_>>().join(" "),
            None => "NONE".into(),
        };
        out.line(&format!("free({x})"), value);
    }
    Ok(())
}

fn afin_symbol(v: usize) -> &'static str {
    if v == Z {
        "Z"
    } else {
        debug_assert_eq!(v, P);
        "P"
    }
}

fn afin(template: &Template, out: &mut Out) -> Result<()> {
    let s = build_afin(temporal_only(template, "afin")?);
    out.line("domain", "Z P");
    for (name, r) in s.relations() {
        let tuples: Vec<String> = r
            .tuples()
            .iter()
            .map(|t| format!("({})", t.iter().map(|&v| afin_symbol(v)).collect::<Vec<_>>().join(",")))
            .collect();
        out.line(name, tuples.join(" "));
    }
    Ok(())
}

fn polysearch(template: &Template, flags: &Flags, out: &mut Out) -> Result<()> {
    let structure = match template {
        Template::Finite(s) => s.clone(),
        Template::Temporal(t) => {
            out.line("on", "afin");
            build_afin(t)
        }
        Template::Hom(_) => {
            return Err(Error::Parameter(
                "`polysearch` needs a finite or temporal template; use `classify` for behaviors".into(),
            ))
        }
    };
    let identity = flags.identity.unwrap_or(IdentitySystem::Siggers);
    let arity = match (flags.arity, identity.fixed_arity()) {
        (Some(a), _) => a,
        (None, Some(a)) => a,
        (None, None) => return Err(Error::Parameter(format!("`{identity}` needs --arity"))),
    };
    out.line("identity", identity);
    out.line("arity", arity);
    match find_polymorphism(&structure, identity, arity)? {
        Some(op) => out.line("operation", op),
        None => {
            out.line("operation", "NONE");
            out.negative = true;
        }
    }
    Ok(())
}

fn consistency(template: &Template, instance: &Instance, flags: &Flags, out: &mut Out) -> Result<()> {
    let (k, l) = flags.kl.unwrap_or((2, 3));
    out.line("kl", format!("{k},{l}"));
    let summary = match template {
        Template::Finite(s) => summarize(establish_kl(instance, s, k, l)?),
        Template::Temporal(t) => summarize(establish_kl(instance, t, k, l)?),
        Template::Hom(h) => summarize(establish_kl(instance, h, k, l)?),
    };
    match summary {
        Ok((sets, configs)) => {
            out.line("result", "CONSISTENT");
            out.line("sets", sets);
            out.line("configurations", configs);
        }
        Err(subset) => {
            out.line("result", "EMPTY_DERIVED");
            let names: Vec<&str> = subset.iter().map(|&v| instance.variables()[v].as_str()).collect();
            out.line("subset", names.join(" "));
            out.negative = true;
        }
    }
    Ok(())
}

fn summarize<L>(c: Consistency<L>) -> std::result::Result<(usize, usize), Vec<usize>> {
    match c {
        Consistency::Consistent(state) => Ok((state.sets.len(), state.total_configurations())),
        Consistency::EmptyDerived { subset } => Err(subset),
    }
}
