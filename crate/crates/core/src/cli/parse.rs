//! Template and instance files.
//!
//! ```text
//! # template
//! base: temporal | tournament | graph | kfree(n) | finite(n)
//! rel NAME/ARITY: <type>; <type>; ...
//!
//! # instance
//! vars a b c
//! NAME(a,c,b)
//! ```
//!
//! A `finite(n)` relation lists tuples of values in `0..n`, written as
//! space-separated numbers.

use std::fmt::Write as _;

use crate::consistency::LocalTemplate;
use crate::error::{Error, Result};
use crate::homog::{Base, HomTemplate, LabeledType, TypeSetRelation};
use crate::relstruct::{FiniteStructure, Instance, Tuple};
use crate::temporal::{TemporalRelation, TemporalTemplate, WeakOrderType};

/// A parsed template of any supported kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Template {
    Finite(FiniteStructure),
    Temporal(TemporalTemplate),
    Hom(HomTemplate),
}

impl Template {
    pub fn base_name(&self) -> String {
        match self {
            Template::Finite(s) => format!("finite({})", s.domain_size()),
            Template::Temporal(_) => "temporal".into(),
            Template::Hom(h) => h.base().to_string(),
        }
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        match self {
            Template::Finite(s) => s.relation_arity(name),
            Template::Temporal(t) => t.relation_arity(name),
            Template::Hom(h) => h.relation_arity(name),
        }
    }
}

enum Header {
    Finite(usize),
    Temporal,
    Hom(Base),
}

/// Lines with comments removed, as `(line number, column offset, text)`.
fn lines(text: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let code = raw.split('#').next().unwrap_or("");
        let trimmed = code.trim_start();
        let offset = code.len() - trimmed.len();
        let trimmed = trimmed.trim_end();
        (!trimmed.is_empty()).then_some((i + 1, offset, trimmed))
    })
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_header(line: usize, col: usize, s: &str) -> Result<Header> {
    let Some(rest) = s.strip_prefix("base:") else {
        return Err(Error::parse(line, col + 1, "expected `base: <kind>`"));
    };
    let value = rest.trim();
    let vcol = col + s.len() - rest.trim_start().len() + 1;
    if value == "temporal" {
        return Ok(Header::Temporal);
    }
    if let Some(n) = value.strip_prefix("finite(").and_then(|r| r.strip_suffix(')')) {
        return match n.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Header::Finite(n)),
            _ => Err(Error::parse(line, vcol, format!("bad domain size `{n}`"))),
        };
    }
    value
        .parse::<Base>()
        .map(Header::Hom)
        .map_err(|e| Error::parse(line, vcol, e.to_string()))
}

/// `rel NAME/ARITY: body` split into its parts, with the body's column.
fn parse_rel_line(line: usize, col: usize, s: &str) -> Result<(String, usize, usize, String)> {
    let Some(rest) = s.strip_prefix("rel ") else {
        return Err(Error::parse(line, col + 1, "expected `rel NAME/ARITY: ...`"));
    };
    let Some((head, body)) = rest.split_once(':') else {
        return Err(Error::parse(line, col + 1, "missing `:` after the relation name"));
    };
    let head_col = col + 5 + (rest.len() - rest.trim_start().len());
    let Some((name, arity)) = head.trim().split_once('/') else {
        return Err(Error::parse(line, head_col, "expected NAME/ARITY"));
    };
    let name = name.trim();
    if !is_name(name) {
        return Err(Error::parse(line, head_col, format!("bad relation name `{name}`")));
    }
    let arity: usize = match arity.trim().parse() {
        Ok(a) if a > 0 => a,
        _ => {
            return Err(Error::parse(
                line,
                head_col + name.len() + 1,
                format!("bad arity `{}`", arity.trim()),
            ))
        }
    };
    let body_col = col + 4 + head.len() + 2;
    Ok((name.to_string(), arity, body_col, body.to_string()))
}

/// `;`-separated items of a relation body with their 1-based columns.
fn items(body: &str, body_col: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in body.split(';') {
        let lead = part.len() - part.trim_start().len();
        let item = part.trim();
        if !item.is_empty() {
            out.push((body_col + offset + lead, item));
        }
        offset += part.len() + 1;
    }
    out
}

pub fn parse_template(text: &str) -> Result<Template> {
    let mut it = lines(text);
    let Some((hl, hc, h)) = it.next() else {
        return Err(Error::parse(1, 1, "empty template"));
    };
    let header = parse_header(hl, hc, h)?;
    let mut finite = match header {
        Header::Finite(n) => Some(FiniteStructure::new(n)?),
        _ => None,
    };
    let mut temporal: Vec<(String, TemporalRelation)> = Vec::new();
    let mut hom = match header {
        Header::Hom(b) => Some(HomTemplate::new(b, Vec::<(String, TypeSetRelation)>::new())?),
        _ => None,
    };
    let mut names: Vec<String> = Vec::new();
    for (line, col, s) in it {
        let (name, arity, body_col, body) = parse_rel_line(line, col, s)?;
        if names.contains(&name) {
            return Err(Error::parse(line, col + 1, format!("duplicate relation `{name}`")));
        }
        names.push(name.clone());
        let at = |c: usize| move |e: Error| Error::parse(line, c, e.to_string());
        match &header {
            Header::Finite(n) => {
                let mut tuples: Vec<Tuple> = Vec::new();
                for (c, item) in items(&body, body_col) {
                    let t = item
                        .split(|ch: char| ch.is_whitespace() || ch == ',')
                        .filter(|x| !x.is_empty())
                        .map(|x| {
                            x.parse::<usize>()
                                .ok()
                                .filter(|v| v < n)
                                .ok_or_else(|| Error::parse(line, c, format!("bad value `{x}` for domain 0..{n}")))
                        })
                        .collect::<Result<Tuple>>()?;
                    if t.len() != arity {
                        return Err(Error::parse(line, c, format!("tuple `{item}` has length {}, expected {arity}", t.len())));
                    }
                    tuples.push(t);
                }
                finite
                    .as_mut()
                    .expect("finite header")
                    .add_relation(&name, arity, tuples)
                    .map_err(at(body_col))?;
            }
            Header::Temporal => {
                let types = items(&body, body_col)
                    .into_iter()
                    .map(|(c, item)| WeakOrderType::parse_literal(item, arity).map_err(at(c)))
                    .collect::<Result<Vec<_>>>()?;
                temporal.push((name, TemporalRelation::new(arity, types).map_err(at(body_col))?));
            }
            Header::Hom(base) => {
                let types = items(&body, body_col)
                    .into_iter()
                    .map(|(c, item)| {
                        LabeledType::parse_literal(base.alphabet(), arity, item).map_err(at(c))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let rel = TypeSetRelation::new(*base, arity, types).map_err(at(body_col))?;
                hom = Some(hom.take().expect("hom header").with(&name, rel)?);
            }
        }
    }
    Ok(match header {
        Header::Finite(_) => Template::Finite(finite.expect("finite header")),
        Header::Temporal => Template::Temporal(TemporalTemplate::new(temporal)?),
        Header::Hom(_) => Template::Hom(hom.expect("hom header")),
    })
}

/// The canonical text of a template.
pub fn format_template(template: &Template) -> String {
    let mut out = format!("base: {}\n", template.base_name());
    match template {
        Template::Finite(s) => {
            for (name, r) in s.relations() {
                let tuples: Vec<String> = r
                    .tuples()
                    .iter()
                    .map(|t| t.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
                    .collect();
                let _ = writeln!(out, "rel {name}/{}: {}", r.arity(), tuples.join("; "));
            }
        }
        Template::Temporal(t) => {
            for (name, r) in t.relations() {
                let _ = writeln!(out, "rel {name}/{}: {r}", r.arity());
            }
        }
        Template::Hom(h) => {
            for (name, r) in h.relations() {
                let _ = writeln!(out, "rel {name}/{}: {r}", r.arity());
            }
        }
    }
    out
}

pub fn parse_instance(text: &str, template: &Template) -> Result<Instance> {
    let mut it = lines(text);
    let Some((vl, vc, v)) = it.next() else {
        return Err(Error::parse(1, 1, "empty instance"));
    };
    let Some(rest) = v.strip_prefix("vars") else {
        return Err(Error::parse(vl, vc + 1, "expected `vars ...`"));
    };
    let names: Vec<&str> = rest.split_whitespace().collect();
    if let Some(bad) = names.iter().find(|n| !is_name(n)) {
        let c = vc + 1 + v.find(bad).unwrap_or(0);
        return Err(Error::parse(vl, c, format!("bad variable name `{bad}`")));
    }
    let mut instance = Instance::new(names.iter().copied()).map_err(|e| Error::parse(vl, vc + 1, e.to_string()))?;
    for (line, col, s) in it {
        let mut rest = s;
        while !rest.is_empty() {
            let c = col + 1 + (s.len() - rest.len());
            let Some(open) = rest.find('(') else {
                return Err(Error::parse(line, c, "expected `NAME(args)`"));
            };
            let Some(close) = rest.find(')') else {
                return Err(Error::parse(line, c, "missing `)`"));
            };
            let name = rest[..open].trim();
            if close < open || !is_name(name) {
                return Err(Error::parse(line, c, format!("bad constraint `{}`", &rest[..=close.max(open)])));
            }
            let args: Vec<&str> = rest[open + 1..close].split(',').map(str::trim).collect();
            let Some(arity) = template.relation_arity(name) else {
                return Err(Error::parse(line, c, format!("unknown relation `{name}`")));
            };
            if let Some(bad) = args.iter().find(|a| instance.var_index(a).is_none()) {
                return Err(Error::parse(line, c, format!("unknown variable `{bad}`")));
            }
            if args.len() != arity {
                return Err(Error::SignatureMismatch {
                    relation: name.to_string(),
                    expected: arity,
                    found: args.len(),
                });
            }
            instance.add_constraint(name, &args)?;
            rest = rest[close + 1..].trim_start_matches([' ', '\t', ';', ',']);
        }
    }
    Ok(instance)
}

pub fn format_instance(instance: &Instance) -> String {
    let mut out = format!("vars {}\n", instance.variables().join(" "));
    for c in instance.constraints() {
        let args: Vec<&str> = c.scope.iter().map(|&v| instance.variables()[v].as_str()).collect();
        let _ = writeln!(out, "{}({})", c.relation, args.join(","));
    }
    out
}
