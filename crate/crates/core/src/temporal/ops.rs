use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::relation::TemporalRelation;
use super::weak_order::{SignedWeakOrderType, WeakOrderType};

/// Largest relation arity [`preserves_temporal`] will check.
pub const MAX_PRESERVATION_ARITY: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemporalOp {
    Pp,
    DualPp,
    Ll,
    DualLl,
    Lex,
    DualLex,
}

impl TemporalOp {
    pub const ALL: [TemporalOp; 6] = [
        TemporalOp::Pp,
        TemporalOp::DualPp,
        TemporalOp::Ll,
        TemporalOp::DualLl,
        TemporalOp::Lex,
        TemporalOp::DualLex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TemporalOp::Pp => "PP",
            TemporalOp::DualPp => "DUAL_PP",
            TemporalOp::Ll => "LL",
            TemporalOp::DualLl => "DUAL_LL",
            TemporalOp::Lex => "LEX",
            TemporalOp::DualLex => "DUAL_LEX",
        }
    }

    pub fn is_dual(self) -> bool {
        matches!(
            self,
            TemporalOp::DualPp | TemporalOp::DualLl | TemporalOp::DualLex
        )
    }

    /// The operation this one is the dual of, or itself.
    pub fn base(self) -> TemporalOp {
        match self {
            TemporalOp::DualPp => TemporalOp::Pp,
            TemporalOp::DualLl => TemporalOp::Ll,
            TemporalOp::DualLex => TemporalOp::Lex,
            op => op,
        }
    }

    pub fn dual(self) -> TemporalOp {
        match self {
            TemporalOp::Pp => TemporalOp::DualPp,
            TemporalOp::DualPp => TemporalOp::Pp,
            TemporalOp::Ll => TemporalOp::DualLl,
            TemporalOp::DualLl => TemporalOp::Ll,
            TemporalOp::Lex => TemporalOp::DualLex,
            TemporalOp::DualLex => TemporalOp::Lex,
        }
    }
}

impl fmt::Display for TemporalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TemporalOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        TemporalOp::ALL
            .into_iter()
            .find(|op| op.name() == up)
            .ok_or_else(|| Error::Parameter(format!("unknown temporal operation `{s}`")))
    }
}

/// Sort key of `op(a, b)` among all values of the operation. Keys of
/// different points compare like the operation's values, and `op(0,0)` has
/// the key of `(0, 0)`.
fn key(op: TemporalOp, a: i64, b: i64) -> (i64, i64, i64) {
    match op {
        TemporalOp::Pp if a <= 0 => (0, a, 0),
        TemporalOp::Pp => (1, b, 0),
        TemporalOp::Ll if a <= 0 => (0, a, b),
        TemporalOp::Ll => (1, b, a),
        _ => (a, b, 0),
    }
}

/// Applies a binary operation coordinatewise to two `k`-tuples given by
/// their joint signed type: positions `0..k` hold the first argument,
/// `k..2k` the second. The output sign is relative to `op(0,0)`.
pub fn apply_temporal_op(op: TemporalOp, joint: &SignedWeakOrderType) -> Result<SignedWeakOrderType> {
    if !joint.arity().is_multiple_of(2) {
        return Err(Error::MalformedPattern(format!(
            "joint pattern needs even arity, got {}",
            joint.arity()
        )));
    }
    if op.is_dual() {
        let out = apply_temporal_op(op.base(), &joint.negate())?;
        return Ok(out.negate());
    }
    let values = joint.realize();
    let k = values.len() / 2;
    let keys: Vec<_> = (0..k).map(|i| key(op, values[i], values[k + i])).collect();
    let origin = key(op, 0, 0);
    let mut with_origin = keys.clone();
    with_origin.push(origin);
    let full = WeakOrderType::from_values(&with_origin);
    let zero_level = full.level(k) as i64;
    let ints: Vec<i64> = full.levels()[..k]
        .iter()
        .map(|&l| l as i64 - zero_level)
        .collect();
    Ok(SignedWeakOrderType::from_integers(&ints))
}

/// A pair of tuples from a relation whose image leaves it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub op: TemporalOp,
    /// Type of the first argument tuple.
    pub first: WeakOrderType,
    /// Type of the second argument tuple.
    pub second: WeakOrderType,
    /// Joint signed type of both argument tuples.
    pub joint: SignedWeakOrderType,
    /// Type of the image, not in the relation.
    pub image: WeakOrderType,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.first.arity();
        let values = self.joint.realize();
        write!(
            f,
            "{}: a={:?} ({}) b={:?} ({}) -> {}",
            self.op,
            &values[..k],
            self.first,
            &values[k..],
            self.second,
            self.image
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preservation {
    Preserved,
    Violated(Box<Counterexample>),
}

impl Preservation {
    pub fn is_preserved(&self) -> bool {
        matches!(self, Preservation::Preserved)
    }
}

/// Whether the operation maps every pair of tuples of the relation, in every
/// relative position and every position relative to 0, into the relation.
pub fn preserves_temporal(op: TemporalOp, rel: &TemporalRelation) -> Result<Preservation> {
    let k = rel.arity();
    if k > MAX_PRESERVATION_ARITY {
        return Err(Error::BudgetExceeded(format!(
            "preservation check at arity {k} (limit {MAX_PRESERVATION_ARITY})"
        )));
    }
    let signs_matter = op.base() != TemporalOp::Lex;
    for first in rel.types() {
        for second in rel.types() {
            let mut found = None;
            for_each_interleaving(first, second, &mut |joint| {
                let blocks = joint.block_count();
                let cuts: Vec<(usize, bool)> = if signs_matter {
                    (0..=blocks)
                        .map(|g| (g, false))
                        .chain((0..blocks).map(|b| (b, true)))
                        .collect()
                } else {
                    vec![(0, false)]
                };
                for (neg, zero) in cuts {
                    let signed = SignedWeakOrderType::new(joint.clone(), neg, zero)
                        .expect("cut in range");
                    let image = apply_temporal_op(op, &signed)
                        .expect("even arity")
                        .order()
                        .clone();
                    if !rel.contains(&image) {
                        found = Some(Counterexample {
                            op,
                            first: first.clone(),
                            second: second.clone(),
                            joint: signed,
                            image,
                        });
                        return false;
                    }
                }
                true
            });
            if let Some(cx) = found {
                return Ok(Preservation::Violated(Box::new(cx)));
            }
        }
    }
    Ok(Preservation::Preserved)
}

/// Every weak order on `2k` positions restricting to `a` on the first `k`
/// and to `b` on the last `k`: merges of the two block sequences.
pub fn for_each_interleaving<F>(a: &WeakOrderType, b: &WeakOrderType, visit: &mut F)
where
    F: FnMut(&WeakOrderType) -> bool,
{
    let k = a.arity();
    let ab = a.blocks();
    let bb: Vec<Vec<usize>> = b
        .blocks()
        .into_iter()
        .map(|blk| blk.into_iter().map(|p| p + k).collect())
        .collect();
    let mut merged: Vec<Vec<usize>> = Vec::new();
    merge(&ab, &bb, 0, 0, &mut merged, visit);
}

fn merge<F>(
    ab: &[Vec<usize>],
    bb: &[Vec<usize>],
    i: usize,
    j: usize,
    merged: &mut Vec<Vec<usize>>,
    visit: &mut F,
) -> bool
where
    F: FnMut(&WeakOrderType) -> bool,
{
    if i == ab.len() && j == bb.len() {
        let t = WeakOrderType::from_blocks(merged).expect("partition");
        return visit(&t);
    }
    let mut step = |block: Vec<usize>, ni: usize, nj: usize, merged: &mut Vec<Vec<usize>>| {
        merged.push(block);
        let go = merge(ab, bb, ni, nj, merged, visit);
        merged.pop();
        go
    };
    if i < ab.len() && !step(ab[i].clone(), i + 1, j, merged) {
        return false;
    }
    if j < bb.len() && !step(bb[j].clone(), i, j + 1, merged) {
        return false;
    }
    if i < ab.len() && j < bb.len() {
        let both = ab[i].iter().chain(&bb[j]).copied().collect();
        if !step(both, i + 1, j + 1, merged) {
            return false;
        }
    }
    true
}
