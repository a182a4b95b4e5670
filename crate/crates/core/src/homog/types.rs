//! Complete types over the random tournament and the random graph.

use std::fmt;
use std::str::FromStr;

use crate::consistency::combinations;
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// Pair symbol for two equal elements.
pub const EQ: u8 = 0;
/// Arc from the first to the second element of the pair.
pub const FWD: u8 = 1;
/// Arc from the second to the first element of the pair.
pub const BWD: u8 = 2;
/// Edge between the two elements.
pub const E: u8 = 1;
/// Non-edge between the two distinct elements.
pub const N: u8 = 2;

/// Largest arity [`enumerate_types`] accepts; a six-variable instance needs
/// all 6-types for the brute-force oracle and for `(k,l)`-consistency with
/// `l` capped at six.
pub const MAX_TYPE_ARITY: usize = 6;

/// The three-letter pair alphabet of a base structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alphabet {
    /// `EQ`, `FWD`, `BWD`: reversing a pair swaps the two arcs.
    Oriented,
    /// `EQ`, `E`, `N`: pair labels are symmetric.
    Symmetric,
}

impl Alphabet {
    /// The label of the reversed pair.
    pub fn flip(self, s: u8) -> u8 {
        match (self, s) {
            (Alphabet::Oriented, FWD) => BWD,
            (Alphabet::Oriented, BWD) => FWD,
            _ => s,
        }
    }

    pub fn symbol_name(self, s: u8) -> &'static str {
        match (self, s) {
            (_, EQ) => "EQ",
            (Alphabet::Oriented, FWD) => "FWD",
            (Alphabet::Oriented, _) => "BWD",
            (Alphabet::Symmetric, E) => "E",
            (Alphabet::Symmetric, _) => "N",
        }
    }
}

/// The structure whose reducts are studied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Tournament,
    Graph,
    /// The universal homogeneous `K_n`-free graph.
    KFree(usize),
}

impl Base {
    pub fn alphabet(self) -> Alphabet {
        match self {
            Base::Tournament => Alphabet::Oriented,
            Base::Graph | Base::KFree(_) => Alphabet::Symmetric,
        }
    }

    /// Whether a type describes a finite substructure of the base.
    pub fn admits(self, t: &LabeledType) -> bool {
        t.alphabet == self.alphabet()
            && match self {
                Base::KFree(n) => !t.has_clique(n),
                _ => true,
            }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Tournament => f.write_str("tournament"),
            Base::Graph => f.write_str("graph"),
            Base::KFree(n) => write!(f, "kfree({n})"),
        }
    }
}

impl FromStr for Base {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tournament" => Ok(Base::Tournament),
            "graph" => Ok(Base::Graph),
            other => {
                let n = other
                    .strip_prefix("kfree(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|n| n.trim().parse::<usize>().ok())
                    .ok_or_else(|| Error::MalformedPattern(format!("unknown base `{other}`")))?;
                if n < 2 {
                    return Err(Error::Parameter(format!("kfree({n}) needs n >= 2")));
                }
                Ok(Base::KFree(n))
            }
        }
    }
}

/// The complete type of a tuple: which positions are equal, and the label of
/// every pair of distinct blocks.
///
/// Blocks are numbered by their least position. The label of blocks `a < b`
/// is read from the representative of `a` to the representative of `b`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledType {
    alphabet: Alphabet,
    blocks: Vec<u8>,
    labels: Vec<u8>,
}

fn pair_index(a: usize, b: usize, count: usize) -> usize {
    debug_assert!(a < b && b < count);
    a * (2 * count - a - 1) / 2 + (b - a - 1)
}

impl LabeledType {
    /// Builds a type from the label of every pair `i < j`. The labels must
    /// come from an actual tuple (`EQ` transitive and compatible with the
    /// other labels); [`LabeledType::try_from_pairs`] checks this.
    pub fn from_pairs<F>(alphabet: Alphabet, arity: usize, pair: F) -> Self
    where
        F: Fn(usize, usize) -> u8,
    {
        let mut blocks: Vec<u8> = Vec::with_capacity(arity);
        let mut reps: Vec<usize> = Vec::new();
        for j in 0..arity {
            match (0..j).find(|&i| pair(i, j) == EQ) {
                Some(i) => blocks.push(blocks[i]),
                None => {
                    blocks.push(reps.len() as u8);
                    reps.push(j);
                }
            }
        }
        let mut labels = Vec::with_capacity(reps.len() * reps.len().saturating_sub(1) / 2);
        for a in 0..reps.len() {
            for b in a + 1..reps.len() {
                labels.push(pair(reps[a], reps[b]));
            }
        }
        LabeledType {
            alphabet,
            blocks,
            labels,
        }
    }

    pub fn try_from_pairs<F>(alphabet: Alphabet, arity: usize, pair: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> u8,
    {
        let t = Self::from_pairs(alphabet, arity, &pair);
        for i in 0..arity {
            for j in i + 1..arity {
                let s = pair(i, j);
                if s > 2 {
                    return Err(Error::MalformedPattern(format!("pair symbol {s} out of range")));
                }
                if t.pair(i, j) != s {
                    return Err(Error::MalformedPattern(format!(
                        "labels of positions {} and {} contradict the equalities",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(t)
    }

    /// The type with every position in one block.
    pub fn all_equal(alphabet: Alphabet, arity: usize) -> Self {
        Self::from_pairs(alphabet, arity, |_, _| EQ)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn arity(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.iter().map(|&b| b as usize + 1).max().unwrap_or(0)
    }

    /// Block of each position, numbered by first occurrence.
    pub fn partition(&self) -> &[u8] {
        &self.blocks
    }

    pub fn is_injective(&self) -> bool {
        self.block_count() == self.arity()
    }

    /// The label of the ordered pair `(i, j)`.
    pub fn pair(&self, i: usize, j: usize) -> u8 {
        let (a, b) = (self.blocks[i] as usize, self.blocks[j] as usize);
        let count = self.block_count();
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => EQ,
            std::cmp::Ordering::Less => self.labels[pair_index(a, b, count)],
            std::cmp::Ordering::Greater => self.alphabet.flip(self.labels[pair_index(b, a, count)]),
        }
    }

    /// The type induced on the listed positions; repeats give equal
    /// positions, and a permutation reorders the tuple.
    pub fn restrict(&self, positions: &[usize]) -> Self {
        Self::from_pairs(self.alphabet, positions.len(), |x, y| {
            self.pair(positions[x], positions[y])
        })
    }

    /// Whether some `n` blocks are pairwise joined by edges.
    pub fn has_clique(&self, n: usize) -> bool {
        let count = self.block_count();
        if self.alphabet != Alphabet::Symmetric || n > count {
            return false;
        }
        if n <= 1 {
            return true;
        }
        combinations(count, n).iter().any(|c| {
            c.iter().enumerate().all(|(x, &a)| {
                c[x + 1..]
                    .iter()
                    .all(|&b| self.labels[pair_index(a, b, count)] == E)
            })
        })
    }

    /// Parses the literal syntax of the alphabet.
    ///
    /// Items are separated by commas: `i->j` (oriented), `E(i,j)` and
    /// `N(i,j)` (symmetric), `i=j=…` merges, or a bare position. Positions
    /// are 1-based. Every pair of distinct blocks needs an arc in the
    /// oriented case; unlisted pairs are non-edges in the symmetric case.
    pub fn parse_literal(alphabet: Alphabet, arity: usize, s: &str) -> Result<Self> {
        let bad = |msg: String| Error::MalformedPattern(format!("`{}`: {msg}", s.trim()));
        let position = |p: &str| -> Result<usize> {
            let v: usize = p
                .trim()
                .parse()
                .map_err(|_| bad(format!("`{}` is not a position", p.trim())))?;
            if v == 0 || v > arity {
                return Err(bad(format!("position {v} outside 1..={arity}")));
            }
            Ok(v - 1)
        };
        let mut merges = UnionFind::new(arity);
        let mut given: Vec<(usize, usize, u8)> = Vec::new();
        for item in split_items(s) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            if let Some((a, b)) = item.split_once("->") {
                if alphabet != Alphabet::Oriented {
                    return Err(bad(format!("arc `{item}` in an undirected type")));
                }
                given.push((position(a)?, position(b)?, FWD));
            } else if let Some(rest) = item.strip_prefix("E(").or_else(|| item.strip_prefix("N(")) {
                if alphabet != Alphabet::Symmetric {
                    return Err(bad(format!("edge literal `{item}` in a tournament type")));
                }
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| bad(format!("unclosed `{item}`")))?;
                let (a, b) = inner
                    .split_once(',')
                    .ok_or_else(|| bad(format!("`{item}` needs two positions")))?;
                let sym = if item.starts_with('E') { E } else { N };
                given.push((position(a)?, position(b)?, sym));
            } else if item.contains('=') {
                let parts = item
                    .split('=')
                    .map(position)
                    .collect::<Result<Vec<usize>>>()?;
                for w in parts.windows(2) {
                    merges.union(w[0], w[1]);
                }
            } else {
                position(item)?;
            }
        }
        let mut table = vec![vec![None::<u8>; arity]; arity];
        for &(a, b, sym) in &given {
            if a == b {
                return Err(bad(format!("pair ({}, {}) repeats a position", a + 1, b + 1)));
            }
            let (ra, rb) = (merges.find(a), merges.find(b));
            if ra == rb {
                return Err(bad(format!("positions {} and {} are merged", a + 1, b + 1)));
            }
            for (x, y, s) in [(ra, rb, sym), (rb, ra, alphabet.flip(sym))] {
                match table[x][y] {
                    Some(old) if old != s => {
                        return Err(bad(format!("conflicting labels for {} and {}", a + 1, b + 1)))
                    }
                    _ => table[x][y] = Some(s),
                }
            }
        }
        let mut pairs = vec![vec![EQ; arity]; arity];
        for i in 0..arity {
            for j in i + 1..arity {
                let (ri, rj) = (merges.find(i), merges.find(j));
                if ri == rj {
                    continue;
                }
                pairs[i][j] = match (table[ri][rj], alphabet) {
                    (Some(s), _) => s,
                    (None, Alphabet::Symmetric) => N,
                    (None, Alphabet::Oriented) => {
                        return Err(bad(format!("no arc between {} and {}", i + 1, j + 1)))
                    }
                };
            }
        }
        Self::try_from_pairs(alphabet, arity, |i, j| pairs[i][j])
    }

    fn representatives(&self) -> Vec<usize> {
        let mut reps = Vec::new();
        for (p, &b) in self.blocks.iter().enumerate() {
            if b as usize == reps.len() {
                reps.push(p);
            }
        }
        reps
    }
}

/// Splits on commas that are not inside `E(…)` parentheses.
fn split_items(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0usize, 0usize);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl fmt::Display for LabeledType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reps = self.representatives();
        let mut items: Vec<String> = Vec::new();
        for (b, _) in reps.iter().enumerate() {
            let members: Vec<String> = (0..self.arity())
                .filter(|&p| self.blocks[p] as usize == b)
                .map(|p| (p + 1).to_string())
                .collect();
            if members.len() > 1 {
                items.push(members.join("="));
            }
        }
        for a in 0..reps.len() {
            for b in a + 1..reps.len() {
                let (x, y) = (reps[a] + 1, reps[b] + 1);
                match (self.alphabet, self.labels[pair_index(a, b, reps.len())]) {
                    (Alphabet::Oriented, FWD) => items.push(format!("{x}->{y}")),
                    (Alphabet::Oriented, _) => items.push(format!("{y}->{x}")),
                    (Alphabet::Symmetric, E) => items.push(format!("E({x},{y})")),
                    _ => {}
                }
            }
        }
        if items.is_empty() {
            items = reps.iter().map(|r| (r + 1).to_string()).collect();
        }
        f.write_str(&items.join(", "))
    }
}

impl fmt::Debug for LabeledType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabeledType({self})")
    }
}

/// Restricted growth strings of length `k`.
fn partitions(k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(k: usize, cur: &mut Vec<u8>, max: u8, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let limit = if cur.is_empty() { 0 } else { max + 1 };
        for b in 0..=limit {
            cur.push(b);
            go(k, cur, max.max(b), out);
            cur.pop();
        }
    }
    go(k, &mut cur, 0, &mut out);
    out
}

/// Every complete type of arity `k` realized in the base, in canonical
/// order.
pub fn enumerate_types(k: usize, base: Base) -> Result<Vec<LabeledType>> {
    if k > MAX_TYPE_ARITY {
        return Err(Error::BudgetExceeded(format!(
            "types of arity {k} (limit {MAX_TYPE_ARITY})"
        )));
    }
    let alphabet = base.alphabet();
    let mut out = Vec::new();
    for blocks in partitions(k) {
        let count = blocks.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
        let pairs = count * count.saturating_sub(1) / 2;
        for mask in 0u32..1 << pairs {
            let labels = (0..pairs)
                .map(|i| if mask >> i & 1 == 0 { 1 } else { 2 })
                .collect();
            let t = LabeledType {
                alphabet,
                blocks: blocks.clone(),
                labels,
            };
            if base.admits(&t) {
                out.push(t);
            }
        }
    }
    out.sort();
    Ok(out)
}
