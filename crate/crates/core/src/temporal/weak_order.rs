use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest arity [`enumerate_weak_orders`] will list.
pub const MAX_ENUMERATION_ARITY: usize = 8;

/// The order type of a rational tuple: an ordered partition of its
/// positions. Stored as one level per position, levels `0..blocks` all used,
/// level 0 holding the smallest value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeakOrderType {
    levels: Vec<usize>,
}

impl WeakOrderType {
    /// The type of any sequence of comparable values.
    pub fn from_values<T: Ord>(values: &[T]) -> Self {
        let mut sorted: Vec<&T> = values.iter().collect();
        sorted.sort();
        sorted.dedup();
        let levels = values
            .iter()
            .map(|v| sorted.binary_search(&v).expect("value present"))
            .collect();
        WeakOrderType { levels }
    }

    /// Validating constructor: levels must use exactly `0..b` for some `b`.
    pub fn from_levels(levels: Vec<usize>) -> Result<Self> {
        let t = Self::from_values(&levels);
        if t.levels != levels {
            return Err(Error::MalformedPattern(format!(
                "levels {levels:?} skip a value"
            )));
        }
        Ok(t)
    }

    /// Builds a type from blocks of 0-based positions, smallest first.
    pub fn from_blocks(blocks: &[Vec<usize>]) -> Result<Self> {
        let arity: usize = blocks.iter().map(Vec::len).sum();
        let mut levels = vec![usize::MAX; arity];
        for (level, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::MalformedPattern("empty block".into()));
            }
            for &p in block {
                match levels.get_mut(p) {
                    Some(slot) if *slot == usize::MAX => *slot = level,
                    _ => {
                        return Err(Error::MalformedPattern(format!(
                            "position {} repeated or out of range",
                            p + 1
                        )))
                    }
                }
            }
        }
        Ok(WeakOrderType { levels })
    }

    pub fn arity(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn level(&self, position: usize) -> usize {
        self.levels[position]
    }

    pub fn block_count(&self) -> usize {
        self.levels.iter().max().map_or(0, |m| m + 1)
    }

    /// Blocks of 0-based positions, smallest first, positions ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (p, &l) in self.levels.iter().enumerate() {
            blocks[l].push(p);
        }
        blocks
    }

    /// Positions holding the minimum.
    pub fn min_block(&self) -> Vec<usize> {
        (0..self.arity()).filter(|&p| self.levels[p] == 0).collect()
    }

    /// The type induced on the listed positions (repeats allowed).
    pub fn restrict(&self, positions: &[usize]) -> Self {
        let values: Vec<usize> = positions.iter().map(|&p| self.levels[p]).collect();
        Self::from_values(&values)
    }

    /// The type of the negated tuple.
    pub fn reverse(&self) -> Self {
        let top = self.block_count().saturating_sub(1);
        WeakOrderType {
            levels: self.levels.iter().map(|&l| top - l).collect(),
        }
    }

    /// Whether a tuple of this type satisfies `x_i = x_j` wherever the
    /// scope repeats a variable.
    pub fn respects_repeats(&self, scope: &[usize]) -> bool {
        scope.iter().enumerate().all(|(i, v)| {
            scope[..i]
                .iter()
                .position(|w| w == v)
                .is_none_or(|j| self.levels[i] == self.levels[j])
        })
    }

    /// Parses the literal syntax `1<2=3` for a given arity.
    pub fn parse_literal(s: &str, arity: usize) -> Result<Self> {
        let t: WeakOrderType = s.parse()?;
        if t.arity() != arity {
            return Err(Error::MalformedPattern(format!(
                "`{s}` has arity {}, expected {arity}",
                t.arity()
            )));
        }
        Ok(t)
    }

    fn sort_key(&self) -> (usize, Vec<Vec<usize>>) {
        (self.block_count(), self.blocks())
    }
}

impl Ord for WeakOrderType {
    /// Arity, then number of blocks, then blocks lexicographically.
    fn cmp(&self, other: &Self) -> Ordering {
        self.arity()
            .cmp(&other.arity())
            .then_with(|| self.sort_key().cmp(&other.sort_key()))
    }
}

impl PartialOrd for WeakOrderType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for WeakOrderType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks().iter().enumerate() {
            if i > 0 {
                f.write_str("<")?;
            }
            for (j, p) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str("=")?;
                }
                write!(f, "{}", p + 1)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for WeakOrderType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeakOrderType({self})")
    }
}

impl FromStr for WeakOrderType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::MalformedPattern(format!("`{s}`: {msg}"));
        let mut blocks = Vec::new();
        for block in s.split('<') {
            let mut positions = Vec::new();
            for item in block.split('=') {
                let item = item.trim();
                let p: usize = item
                    .parse()
                    .map_err(|_| bad(format!("`{item}` is not a position")))?;
                if p == 0 {
                    return Err(bad("positions start at 1".into()));
                }
                positions.push(p - 1);
            }
            blocks.push(positions);
        }
        WeakOrderType::from_blocks(&blocks).map_err(|e| bad(e.to_string()))
    }
}

/// A weak order type together with the position of 0: the first `neg`
/// blocks are negative, block `neg` is zero if `zero` is set, the rest are
/// positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedWeakOrderType {
    order: WeakOrderType,
    neg: usize,
    zero: bool,
}

impl SignedWeakOrderType {
    pub fn new(order: WeakOrderType, neg: usize, zero: bool) -> Result<Self> {
        if neg + usize::from(zero) > order.block_count() {
            return Err(Error::MalformedPattern(format!(
                "sign cut {neg} (zero: {zero}) outside {} blocks",
                order.block_count()
            )));
        }
        Ok(SignedWeakOrderType { order, neg, zero })
    }

    /// The signed type of a sequence of integers.
    pub fn from_integers(values: &[i64]) -> Self {
        let order = WeakOrderType::from_values(values);
        let mut neg_levels: Vec<usize> = values
            .iter()
            .zip(order.levels())
            .filter(|(v, _)| **v < 0)
            .map(|(_, &l)| l)
            .collect();
        neg_levels.sort_unstable();
        neg_levels.dedup();
        let zero = values.contains(&0);
        SignedWeakOrderType {
            neg: neg_levels.len(),
            order,
            zero,
        }
    }

    pub fn order(&self) -> &WeakOrderType {
        &self.order
    }

    pub fn negative_blocks(&self) -> usize {
        self.neg
    }

    pub fn has_zero(&self) -> bool {
        self.zero
    }

    pub fn arity(&self) -> usize {
        self.order.arity()
    }

    /// `-1`, `0` or `1` for each position.
    pub fn sign(&self, position: usize) -> i8 {
        let l = self.order.level(position);
        match l.cmp(&self.neg) {
            Ordering::Less => -1,
            Ordering::Equal if self.zero => 0,
            _ => 1,
        }
    }

    /// A concrete integer tuple of this signed type.
    pub fn realize(&self) -> Vec<i64> {
        let shift = if self.zero { 0 } else { 1 };
        self.order
            .levels()
            .iter()
            .map(|&l| {
                let rel = l as i64 - self.neg as i64;
                if rel >= 0 {
                    rel + shift
                } else {
                    rel
                }
            })
            .collect()
    }

    /// The signed type of the negated tuple.
    pub fn negate(&self) -> Self {
        let pos = self.order.block_count() - self.neg - usize::from(self.zero);
        SignedWeakOrderType {
            order: self.order.reverse(),
            neg: pos,
            zero: self.zero,
        }
    }

    pub fn restrict(&self, positions: &[usize]) -> Self {
        let values = self.realize();
        let picked: Vec<i64> = positions.iter().map(|&p| values[p]).collect();
        Self::from_integers(&picked)
    }
}

impl fmt::Display for SignedWeakOrderType {
    /// Blocks as in the literal syntax with `0` marking the zero point,
    /// e.g. `2<0=1<3` or `1<0<2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks = self.order.blocks();
        let mut parts: Vec<String> = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|p| (p + 1).to_string())
                    .collect::<Vec<_>>()
                    .join("=")
            })
            .collect();
        if self.zero {
            parts[self.neg] = format!("0={}", parts[self.neg]);
        } else {
            parts.insert(self.neg, "0".into());
        }
        f.write_str(&parts.join("<"))
    }
}

/// All weak orders on `k` positions, in canonical order.
pub fn enumerate_weak_orders(k: usize) -> Result<Vec<WeakOrderType>> {
    if k > MAX_ENUMERATION_ARITY {
        return Err(Error::BudgetExceeded(format!(
            "weak orders of arity {k} (limit {MAX_ENUMERATION_ARITY})"
        )));
    }
    let mut out = Vec::new();
    let mut levels = Vec::with_capacity(k);
    insertions(k, &mut levels, 0, &mut |l| {
        out.push(WeakOrderType { levels: l.to_vec() });
        true
    });
    out.sort();
    Ok(out)
}

/// Visits every weak order on `k` positions by inserting positions one at a
/// time, either into an existing block or as a new block in a gap. `visit`
/// receives normalized levels and returns false to stop; `prefix_ok` style
/// pruning is done by callers through [`insertions_pruned`].
pub(crate) fn insertions<F>(k: usize, levels: &mut Vec<usize>, blocks: usize, visit: &mut F) -> bool
where
    F: FnMut(&[usize]) -> bool,
{
    insertions_pruned(k, levels, blocks, &mut |_| true, visit)
}

pub(crate) fn insertions_pruned<P, F>(
    k: usize,
    levels: &mut Vec<usize>,
    blocks: usize,
    prefix_ok: &mut P,
    visit: &mut F,
) -> bool
where
    P: FnMut(&[usize]) -> bool,
    F: FnMut(&[usize]) -> bool,
{
    if levels.len() == k {
        return visit(levels);
    }
    // join block b
    for b in 0..blocks {
        levels.push(b);
        if prefix_ok(levels) && !insertions_pruned(k, levels, blocks, prefix_ok, visit) {
            levels.pop();
            return false;
        }
        levels.pop();
    }
    // new block in gap g (below the current block g)
    for g in 0..=blocks {
        for l in levels.iter_mut() {
            if *l >= g {
                *l += 1;
            }
        }
        levels.push(g);
        let go_on = !prefix_ok(levels) || insertions_pruned(k, levels, blocks + 1, prefix_ok, visit);
        levels.pop();
        for l in levels.iter_mut() {
            if *l > g {
                *l -= 1;
            }
        }
        if !go_on {
            return false;
        }
    }
    true
}
