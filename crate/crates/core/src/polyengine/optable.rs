use std::fmt;

use crate::error::{Error, Result};
use crate::relstruct::{decode_tuple, encode_tuple, FiniteStructure};

/// A total operation `D^arity -> D`, stored in row-major mixed radix order
/// (first argument most significant).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpTable {
    arity: usize,
    domain_size: usize,
    table: Vec<usize>,
}

impl OpTable {
    pub fn from_table(arity: usize, domain_size: usize, table: Vec<usize>) -> Result<Self> {
        let cells = domain_size
            .checked_pow(arity as u32)
            .ok_or_else(|| Error::BudgetExceeded(format!("{domain_size}^{arity} cells")))?;
        if arity == 0 || table.len() != cells {
            return Err(Error::Parameter(format!(
                "operation table needs {cells} cells, got {}",
                table.len()
            )));
        }
        if table.iter().any(|&v| v >= domain_size) {
            return Err(Error::Parameter("table value outside the domain".into()));
        }
        Ok(OpTable {
            arity,
            domain_size,
            table,
        })
    }

    /// Tabulates a function of the argument tuple.
    pub fn from_fn<F>(arity: usize, domain_size: usize, f: F) -> Self
    where
        F: Fn(&[usize]) -> usize,
    {
        let cells = domain_size.pow(arity as u32);
        let table = (0..cells)
            .map(|c| f(&decode_tuple(c, arity, domain_size)))
            .collect();
        OpTable {
            arity,
            domain_size,
            table,
        }
    }

    pub fn projection(arity: usize, domain_size: usize, coordinate: usize) -> Self {
        Self::from_fn(arity, domain_size, |a| a[coordinate])
    }

    pub fn constant(arity: usize, domain_size: usize, value: usize) -> Self {
        Self::from_fn(arity, domain_size, |_| value)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, args: &[usize]) -> usize {
        self.table[encode_tuple(args, self.domain_size)]
    }
}

impl fmt::Display for OpTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.table.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// The six probe operations on `{0,1}`.
pub mod boolean {
    use super::OpTable;

    pub fn and() -> OpTable {
        OpTable::from_fn(2, 2, |a| a[0] & a[1])
    }

    pub fn or() -> OpTable {
        OpTable::from_fn(2, 2, |a| a[0] | a[1])
    }

    /// The median; the only majority operation on two elements.
    pub fn majority() -> OpTable {
        OpTable::from_fn(3, 2, |a| usize::from(a[0] + a[1] + a[2] >= 2))
    }

    /// `x ⊕ y ⊕ z`; the only minority operation on two elements.
    pub fn minority() -> OpTable {
        OpTable::from_fn(3, 2, |a| a[0] ^ a[1] ^ a[2])
    }

    pub fn constant(value: usize) -> OpTable {
        OpTable::constant(1, 2, value)
    }
}

/// Whether the operation maps every `arity`-tuple of rows of each relation
/// (applied coordinatewise) back into the relation.
pub fn preserves_op(op: &OpTable, template: &FiniteStructure) -> Result<bool> {
    if op.domain_size() != template.domain_size() {
        return Err(Error::DomainMismatch {
            op: op.domain_size(),
            template: template.domain_size(),
        });
    }
    for (_, rel) in template.relations() {
        let rows: Vec<&Vec<usize>> = rel.tuples().iter().collect();
        if rows.is_empty() {
            continue;
        }
        let mut choice = vec![0usize; op.arity()];
        let mut args = vec![0usize; op.arity()];
        let mut image = vec![0usize; rel.arity()];
        loop {
            for (j, slot) in image.iter_mut().enumerate() {
                for (a, &c) in args.iter_mut().zip(&choice) {
                    *a = rows[c][j];
                }
                *slot = op.apply(&args);
            }
            if !rel.contains(&image) {
                return Ok(false);
            }
            let mut i = choice.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < rows.len() {
                    break;
                }
                choice[i] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_in_three() -> FiniteStructure {
        FiniteStructure::new(2)
            .unwrap()
            .with_relation("R", 3, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]])
            .unwrap()
    }

    #[test]
    fn and_preserves_horn_relation() {
        let horn = FiniteStructure::new(2)
            .unwrap()
            .with_relation(
                "H",
                3,
                vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1], vec![1, 1, 1]],
            )
            .unwrap();
        assert!(preserves_op(&boolean::and(), &horn).unwrap());
    }

    #[test]
    fn majority_breaks_one_in_three() {
        let t = one_in_three();
        assert!(!preserves_op(&boolean::majority(), &t).unwrap());
        let witness = [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]];
        let image: Vec<usize> = (0..3)
            .map(|j| boolean::majority().apply(&[witness[0][j], witness[1][j], witness[2][j]]))
            .collect();
        assert_eq!(image, vec![0, 0, 0]);
    }

    #[test]
    fn projections_preserve_everything() {
        let t = one_in_three();
        for n in 1..=3 {
            for i in 0..n {
                assert!(preserves_op(&OpTable::projection(n, 2, i), &t).unwrap());
            }
        }
    }

    #[test]
    fn domain_mismatch() {
        let op = OpTable::projection(2, 3, 0);
        assert_eq!(
            preserves_op(&op, &one_in_three()),
            Err(Error::DomainMismatch { op: 3, template: 2 })
        );
    }

    #[test]
    fn table_layout_is_row_major() {
        let t = boolean::and();
        assert_eq!(t.table(), &[0, 0, 0, 1]);
        let sub = OpTable::from_fn(2, 3, |a| (3 + a[0] - a[1]) % 3);
        assert_eq!(sub.apply(&[0, 1]), 2);
        assert_eq!(sub.table()[1], 2);
    }
}
