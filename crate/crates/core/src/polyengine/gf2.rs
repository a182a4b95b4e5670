//! Linear algebra over the two-element field, rows packed into `u64` words.

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Row {
    bits: Vec<u64>,
    rhs: bool,
}

impl Row {
    pub(crate) fn zero(width: usize) -> Self {
        Row {
            bits: vec![0; width.div_ceil(64).max(1)],
            rhs: false,
        }
    }

    pub(crate) fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn flip(&mut self, i: usize) {
        self.bits[i / 64] ^= 1 << (i % 64);
    }

    pub(crate) fn set_rhs(&mut self, v: bool) {
        self.rhs = v;
    }

    fn xor_assign(&mut self, other: &Row) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
        self.rhs ^= other.rhs;
    }

    fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }
}

/// Solves `rows · x = rhs`; free variables are set to 0.
pub(crate) fn solve(mut rows: Vec<Row>, width: usize) -> Option<Vec<bool>> {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for col in 0..width {
        let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next, found);
        let pivot = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push((next, col));
        next += 1;
    }
    if rows[next..].iter().any(|r| r.is_zero() && r.rhs) {
        return None;
    }
    let mut x = vec![false; width];
    for &(r, col) in &pivots {
        x[col] = rows[r].rhs;
    }
    Some(x)
}

/// Basis of the row space of `vectors`, in reduced echelon form.
pub(crate) fn row_basis(vectors: &[Vec<bool>], width: usize) -> Vec<Vec<bool>> {
    let mut rows: Vec<Vec<bool>> = vectors.to_vec();
    let mut rank = 0;
    for col in 0..width {
        let Some(found) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, found);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

/// Basis of `{ a : a·v = 0 for all v in span(vectors) }`.
pub(crate) fn orthogonal_complement(vectors: &[Vec<bool>], width: usize) -> Vec<Vec<bool>> {
    let basis = row_basis(vectors, width);
    let pivot_cols: Vec<usize> = basis
        .iter()
        .map(|row| row.iter().position(|&b| b).expect("basis rows are non-zero"))
        .collect();
    (0..width)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut a = vec![false; width];
            a[free] = true;
            for (row, &p) in basis.iter().zip(&pivot_cols) {
                if row[free] {
                    a[p] = true;
                }
            }
            a
        })
        .collect()
}
