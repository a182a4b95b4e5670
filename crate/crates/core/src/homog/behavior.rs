//! Behaviors of canonical functions on pair types, and the search for a
//! behavior of a given shape that preserves a template.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

use super::relation::TypeSetRelation;
use super::types::{Alphabet, LabeledType, Base, E, EQ, FWD, N};

/// An injective action of an `n`-ary canonical function on pair types: the
/// output label of a pair as a function of its `n` input labels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PairBehavior {
    alphabet: Alphabet,
    arity: usize,
    /// Indexed by the input labels in base 3, first argument most
    /// significant.
    table: Vec<u8>,
}

fn cell_of(args: &[u8]) -> usize {
    args.iter().fold(0, |acc, &s| acc * 3 + s as usize)
}

fn args_of(mut cell: usize, arity: usize) -> Vec<u8> {
    let mut out = vec![EQ; arity];
    for slot in out.iter_mut().rev() {
        *slot = (cell % 3) as u8;
        cell /= 3;
    }
    out
}

fn flip_cell(alphabet: Alphabet, cell: usize, arity: usize) -> usize {
    let args: Vec<u8> = args_of(cell, arity).into_iter().map(|s| alphabet.flip(s)).collect();
    cell_of(&args)
}

impl PairBehavior {
    /// Checks that `EQ` is produced exactly on the all-`EQ` input and, over
    /// the oriented alphabet, that reversing every input pair reverses the
    /// output.
    pub fn new(alphabet: Alphabet, arity: usize, table: Vec<u8>) -> Result<Self> {
        if arity == 0 || arity > 8 {
            return Err(Error::Parameter(format!("behavior arity {arity} outside 1..=8")));
        }
        let cells = 3usize.pow(arity as u32);
        if table.len() != cells {
            return Err(Error::ArityMismatch {
                expected: cells,
                found: table.len(),
            });
        }
        for (cell, &out) in table.iter().enumerate() {
            if out > 2 {
                return Err(Error::Parameter(format!("symbol {out} out of range")));
            }
            if (cell == 0) != (out == EQ) {
                return Err(Error::Parameter(format!(
                    "not injective at input {}",
                    fmt_args(alphabet, &args_of(cell, arity))
                )));
            }
            if table[flip_cell(alphabet, cell, arity)] != alphabet.flip(out) {
                return Err(Error::Parameter(format!(
                    "not flip-equivariant at input {}",
                    fmt_args(alphabet, &args_of(cell, arity))
                )));
            }
        }
        Ok(PairBehavior {
            alphabet,
            arity,
            table,
        })
    }

    pub fn from_fn<F>(alphabet: Alphabet, arity: usize, f: F) -> Result<Self>
    where
        F: Fn(&[u8]) -> u8,
    {
        let cells = 3usize.pow(arity as u32);
        let table = (0..cells).map(|c| f(&args_of(c, arity))).collect();
        Self::new(alphabet, arity, table)
    }

    /// First projection on distinct pairs, falling through to the second
    /// argument where the first pair is equal.
    pub fn g2(alphabet: Alphabet) -> Self {
        Self::from_fn(alphabet, 2, |a| if a[0] != EQ { a[0] } else { a[1] }).expect("valid")
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn apply(&self, args: &[u8]) -> u8 {
        self.table[cell_of(args)]
    }

    /// Whether the behavior agrees with `op` on every input with no `EQ`.
    pub fn restricts_to<F>(&self, op: F) -> bool
    where
        F: Fn(&[u8]) -> u8,
    {
        (0..self.table.len())
            .map(|c| args_of(c, self.arity))
            .filter(|a| a.iter().all(|&s| s != EQ))
            .all(|a| self.apply(&a) == op(&a))
    }
}

fn fmt_args(alphabet: Alphabet, args: &[u8]) -> String {
    let names: Vec<&str> = args.iter().map(|&s| alphabet.symbol_name(s)).collect();
    format!("({})", names.join(","))
}

impl fmt::Display for PairBehavior {
    /// One line per input, e.g. `(FWD,EQ,BWD) -> FWD`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (cell, &out) in self.table.iter().enumerate() {
            if cell > 0 {
                f.write_str("\n")?;
            }
            write!(
                f,
                "{} -> {}",
                fmt_args(self.alphabet, &args_of(cell, self.arity)),
                self.alphabet.symbol_name(out)
            )?;
        }
        Ok(())
    }
}

impl fmt::Debug for PairBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PairBehavior({:?}, {:?})", self.alphabet, self.table)
    }
}

/// The type of the tuple obtained by applying a canonical function with
/// behavior `b` to tuples of the given types.
pub fn behavior_image(b: &PairBehavior, types: &[&LabeledType]) -> Result<LabeledType> {
    if types.len() != b.arity() {
        return Err(Error::ArityMismatch {
            expected: b.arity(),
            found: types.len(),
        });
    }
    let k = types[0].arity();
    for t in types {
        if t.arity() != k {
            return Err(Error::ArityMismatch {
                expected: k,
                found: t.arity(),
            });
        }
        if t.alphabet() != b.alphabet() {
            return Err(Error::Parameter("type and behavior use different alphabets".into()));
        }
    }
    let mut args = vec![EQ; types.len()];
    let mut pairs = vec![vec![EQ; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            for (slot, t) in args.iter_mut().zip(types) {
                *slot = t.pair(i, j);
            }
            pairs[i][j] = b.apply(&args);
        }
    }
    Ok(LabeledType::from_pairs(b.alphabet(), k, |i, j| pairs[i][j]))
}

fn check_alphabet(b: &PairBehavior, r: &TypeSetRelation) -> Result<()> {
    if b.alphabet() != r.base().alphabet() {
        return Err(Error::Parameter(format!(
            "behavior alphabet does not match base {}",
            r.base()
        )));
    }
    Ok(())
}

/// Whether the image of every `n`-tuple of types of `r` is again in `r`.
pub fn behavior_preserves(b: &PairBehavior, r: &TypeSetRelation) -> Result<bool> {
    check_alphabet(b, r)?;
    let types: Vec<&LabeledType> = r.types().iter().collect();
    if types.is_empty() {
        return Ok(true);
    }
    let n = b.arity();
    let mut idx = vec![0usize; n];
    loop {
        let picked: Vec<&LabeledType> = idx.iter().map(|&i| types[i]).collect();
        if !r.contains(&behavior_image(b, &picked)?) {
            return Ok(false);
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(true);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < types.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// The operation a behavior must perform on distinct pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    TernaryMajority,
    TernaryMinority,
    /// Binary semilattice preferring `E`.
    BinarySlE,
    /// Binary semilattice preferring `N`.
    BinarySlN,
}

impl Shape {
    pub fn arity(self) -> usize {
        match self {
            Shape::TernaryMajority | Shape::TernaryMinority => 3,
            Shape::BinarySlE | Shape::BinarySlN => 2,
        }
    }

    /// The prescribed output on an input without `EQ`.
    pub fn op(self, args: &[u8]) -> u8 {
        match self {
            Shape::TernaryMajority => {
                if args.iter().filter(|&&s| s == args[0]).count() >= 2 {
                    args[0]
                } else {
                    args[1]
                }
            }
            // the labels 1 and 2 behave as the two elements of GF(2)
            Shape::TernaryMinority => {
                let ones = args.iter().filter(|&&s| s == 1).count();
                if ones % 2 == 1 {
                    1
                } else {
                    2
                }
            }
            Shape::BinarySlE => {
                if args.contains(&E) {
                    E
                } else {
                    N
                }
            }
            Shape::BinarySlN => {
                if args.contains(&N) {
                    N
                } else {
                    E
                }
            }
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::TernaryMajority => "TERNARY_MAJORITY",
            Shape::TernaryMinority => "TERNARY_MINORITY",
            Shape::BinarySlE => "BINARY_SL_E",
            Shape::BinarySlN => "BINARY_SL_N",
        })
    }
}

/// Outcome of one shape search, with the data a NONE certificate needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub shape: Shape,
    pub behavior: Option<PairBehavior>,
    /// Table cells with some but not all inputs `EQ`.
    pub free_cells: usize,
    /// Independent choices after pairing cells by reversal.
    pub variables: usize,
    /// Search nodes visited by the backtracking.
    pub nodes: u64,
    /// A NONE answer was confirmed by trying every table.
    pub rechecked: bool,
}

/// Tuples of types whose images must stay in a relation, deduplicated by
/// the table cells they read: one cell per pair of positions.
struct Requirement<'a> {
    relation: &'a TypeSetRelation,
    cells: Vec<usize>,
}

impl Requirement<'_> {
    fn holds(&self, alphabet: Alphabet, table: &[u8]) -> bool {
        let k = self.relation.arity();
        let mut pairs = vec![vec![EQ; k]; k];
        let mut c = self.cells.iter();
        for i in 0..k {
            for j in i + 1..k {
                pairs[i][j] = table[*c.next().expect("one cell per pair")];
            }
        }
        self.relation
            .contains(&LabeledType::from_pairs(alphabet, k, |i, j| pairs[i][j]))
    }
}

/// Upper bound on `|R|^n` tuples scanned per relation.
pub const MAX_SEARCH_TUPLES: usize = 1 << 24;

fn requirements(template: &[TypeSetRelation], n: usize) -> Result<Vec<Requirement<'_>>> {
    let mut out = Vec::new();
    for r in template {
        let types: Vec<&LabeledType> = r.types().iter().collect();
        if types.is_empty() {
            continue;
        }
        let total = types
            .len()
            .checked_pow(n as u32)
            .filter(|&t| t <= MAX_SEARCH_TUPLES)
            .ok_or_else(|| {
                Error::BudgetExceeded(format!("{}^{n} type tuples in one relation", types.len()))
            })?;
        let k = r.arity();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        for code in 0..total {
            let mut rest = code;
            let mut picked = Vec::with_capacity(n);
            for _ in 0..n {
                picked.push(types[rest % types.len()]);
                rest /= types.len();
            }
            let mut cells = Vec::with_capacity(k * k.saturating_sub(1) / 2);
            for i in 0..k {
                for j in i + 1..k {
                    cells.push(picked.iter().fold(0, |acc, t| acc * 3 + t.pair(i, j) as usize));
                }
            }
            seen.insert(cells);
        }
        let mut cells: Vec<Vec<usize>> = seen.into_iter().collect();
        cells.sort();
        out.extend(cells.into_iter().map(|cells| Requirement { relation: r, cells }));
    }
    Ok(out)
}

/// Searches for a behavior of the given shape preserving every relation.
pub fn search_behavior(template: &[TypeSetRelation], shape: Shape) -> Result<Option<PairBehavior>> {
    let Some(first) = template.first() else {
        return Err(Error::Parameter("empty template".into()));
    };
    Ok(search_behavior_report(template, first.base(), shape)?.behavior)
}

/// [`search_behavior`] with certificate data. NONE answers are confirmed by
/// plain enumeration of all tables when there are at most
/// [`RECHECK_FREE_CELLS`] free cells.
pub fn search_behavior_report(
    template: &[TypeSetRelation],
    base: Base,
    shape: Shape,
) -> Result<SearchReport> {
    if let Some(r) = template.iter().find(|r| r.base() != base) {
        return Err(Error::Parameter(format!(
            "relation over {} in a template over {base}",
            r.base()
        )));
    }
    let alphabet = base.alphabet();
    let semilattice = matches!(shape, Shape::BinarySlE | Shape::BinarySlN);
    if semilattice && alphabet == Alphabet::Oriented {
        return Err(Error::ShapeUnsupported(format!("{shape} over {base}")));
    }
    let n = shape.arity();
    let cells = 3usize.pow(n as u32);

    // fixed part of the table; 3 marks a free cell
    let mut table = vec![3u8; cells];
    table[0] = EQ;
    let mut free: Vec<usize> = Vec::new();
    for (c, slot) in table.iter_mut().enumerate().skip(1) {
        let args = args_of(c, n);
        if args.iter().all(|&s| s != EQ) {
            *slot = shape.op(&args);
        } else {
            free.push(c);
        }
    }
    // a variable decides one cell and, over the oriented alphabet, its
    // reversed cell
    let vars: Vec<(usize, usize)> = free
        .iter()
        .map(|&c| (c, flip_cell(alphabet, c, n)))
        .filter(|&(c, f)| c <= f)
        .collect();
    let mut var_of = vec![usize::MAX; cells];
    for (v, &(c, f)) in vars.iter().enumerate() {
        var_of[c] = v;
        var_of[f] = v;
    }

    let reqs = requirements(template, n)?;
    let mut report = SearchReport {
        shape,
        behavior: None,
        free_cells: free.len(),
        variables: vars.len(),
        nodes: 0,
        rechecked: false,
    };
    // requirements are checked once their last variable is set
    let mut due: Vec<Vec<&Requirement>> = vec![Vec::new(); vars.len()];
    for r in &reqs {
        match r.cells.iter().filter(|&&c| var_of[c] != usize::MAX).map(|&c| var_of[c]).max() {
            Some(v) => due[v].push(r),
            None => {
                if !r.holds(alphabet, &table) {
                    return finish_none(report, &reqs, alphabet, &table, &vars);
                }
            }
        }
    }

    fn descend(
        v: usize,
        table: &mut [u8],
        vars: &[(usize, usize)],
        due: &[Vec<&Requirement>],
        alphabet: Alphabet,
        nodes: &mut u64,
    ) -> bool {
        if v == vars.len() {
            return true;
        }
        let (c, f) = vars[v];
        for value in [FWD, FWD + 1] {
            *nodes += 1;
            table[c] = value;
            table[f] = alphabet.flip(value);
            if due[v].iter().all(|r| r.holds(alphabet, table))
                && descend(v + 1, table, vars, due, alphabet, nodes)
            {
                return true;
            }
        }
        table[c] = 3;
        table[f] = 3;
        false
    }

    let mut nodes = 0;
    if descend(0, &mut table, &vars, &due, alphabet, &mut nodes) {
        report.nodes = nodes;
        report.behavior = Some(PairBehavior::new(alphabet, n, table)?);
        return Ok(report);
    }
    report.nodes = nodes;
    finish_none(report, &reqs, alphabet, &table, &vars)
}

pub const RECHECK_FREE_CELLS: usize = 20;

fn finish_none(
    mut report: SearchReport,
    reqs: &[Requirement],
    alphabet: Alphabet,
    fixed: &[u8],
    vars: &[(usize, usize)],
) -> Result<SearchReport> {
    if report.free_cells > RECHECK_FREE_CELLS {
        return Ok(report);
    }
    let mut table = fixed.to_vec();
    for mask in 0u64..1 << vars.len() {
        for (v, &(c, f)) in vars.iter().enumerate() {
            let value = if mask >> v & 1 == 0 { FWD } else { FWD + 1 };
            table[c] = value;
            table[f] = alphabet.flip(value);
        }
        if reqs.iter().all(|r| r.holds(alphabet, &table)) {
            return Err(Error::WitnessCheckFailed(format!(
                "{} search missed a preserving table",
                report.shape
            )));
        }
    }
    report.rechecked = true;
    Ok(report)
}
