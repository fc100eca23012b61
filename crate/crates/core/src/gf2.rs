//! Sparse binary matrices and dense GF(2) elimination.

use crate::bitset::BitSet;
use crate::error::{param, Result};

/// Binary matrix stored as sorted row supports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<Vec<usize>>,
}

impl Gf2Matrix {
    /// Sorts each row and checks column bounds. Repeated indices are
    /// rejected; rows must be sets.
    pub fn new(cols: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut rows = rows;
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(param(format!("row {r} repeats a column")));
            }
            if row.last().is_some_and(|&c| c >= cols) {
                return Err(param(format!("row {r} has a column >= {cols}")));
            }
        }
        Ok(Gf2Matrix { cols, rows })
    }

    pub fn identity(n: usize) -> Self {
        Gf2Matrix {
            cols: n,
            rows: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix {
            cols,
            rows: vec![Vec::new(); rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[usize]> {
        self.rows.iter().map(Vec::as_slice)
    }

    pub fn row_bits(&self, r: usize) -> BitSet {
        BitSet::from_indices(self.cols, self.rows[r].iter().copied())
    }

    /// `M·v` over GF(2).
    pub fn mul_vec(&self, v: &BitSet) -> Result<BitSet> {
        if v.len() != self.cols {
            return Err(param(format!("vector length {} != cols {}", v.len(), self.cols)));
        }
        let mut out = BitSet::new(self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            let parity = row.iter().filter(|&&c| v.contains(c)).count() & 1;
            out.set(r, parity == 1);
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut cols = vec![Vec::new(); self.cols];
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                cols[c].push(r);
            }
        }
        Gf2Matrix {
            cols: self.rows(),
            rows: cols,
        }
    }

    fn dense_rows(&self) -> Vec<BitSet> {
        (0..self.rows()).map(|r| self.row_bits(r)).collect()
    }
}

/// Rank over GF(2) by Gaussian elimination on packed rows.
pub fn gf2_rank(m: &Gf2Matrix) -> usize {
    RowSpace::new(m).rank()
}

/// `true` iff `v` lies in the row space of `m`.
pub fn in_row_space(m: &Gf2Matrix, v: &BitSet) -> Result<bool> {
    if v.len() != m.cols() {
        return Err(param(format!("vector length {} != cols {}", v.len(), m.cols())));
    }
    Ok(RowSpace::new(m).contains(v))
}

/// Echelon basis of a row space, for repeated membership queries.
#[derive(Clone, Debug)]
pub struct RowSpace {
    cols: usize,
    // (pivot column, basis row); the pivot is the lowest set bit and is
    // cleared from every other basis row.
    basis: Vec<(usize, BitSet)>,
}

impl RowSpace {
    pub fn new(m: &Gf2Matrix) -> Self {
        let mut basis: Vec<(usize, BitSet)> = Vec::new();
        for mut row in m.dense_rows() {
            for (p, b) in &basis {
                if row.contains(*p) {
                    row.xor_with(b);
                }
            }
            if let Some(pivot) = row.iter().next() {
                for (_, b) in basis.iter_mut() {
                    if b.contains(pivot) {
                        b.xor_with(&row);
                    }
                }
                basis.push((pivot, row));
            }
        }
        RowSpace {
            cols: m.cols(),
            basis,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn basis(&self) -> impl Iterator<Item = &BitSet> {
        self.basis.iter().map(|(_, b)| b)
    }

    pub fn contains(&self, v: &BitSet) -> bool {
        assert_eq!(v.len(), self.cols, "vector width mismatch");
        if v.is_empty() {
            return true;
        }
        let mut r = v.clone();
        for (p, b) in &self.basis {
            if r.contains(*p) {
                r.xor_with(b);
            }
        }
        r.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_and_zero_rank() {
        assert_eq!(gf2_rank(&Gf2Matrix::identity(5)), 5);
        assert_eq!(gf2_rank(&Gf2Matrix::zeros(4, 7)), 0);
    }

    #[test]
    fn dependent_rows() {
        let m = Gf2Matrix::new(4, vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![3]]).unwrap();
        assert_eq!(gf2_rank(&m), 3);
        assert!(!in_row_space(&m, &BitSet::from_indices(4, [0])).unwrap());
        assert!(in_row_space(&m, &BitSet::from_indices(4, [0, 1, 3])).unwrap());
    }

    #[test]
    fn membership_basics() {
        let m = Gf2Matrix::new(6, vec![vec![0, 2, 4], vec![1, 5]]).unwrap();
        assert!(in_row_space(&m, &BitSet::new(6)).unwrap());
        assert!(in_row_space(&m, &m.row_bits(1)).unwrap());
        assert!(in_row_space(&m, &BitSet::new(5)).is_err());
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(Gf2Matrix::new(3, vec![vec![1, 1]]).is_err());
        assert!(Gf2Matrix::new(3, vec![vec![3]]).is_err());
    }

    // Span enumeration oracle: the number of distinct XORs of row subsets
    // is 2^rank.
    proptest! {
        #[test]
        fn rank_matches_span_size(rows in proptest::collection::vec(
            proptest::collection::btree_set(0usize..10, 0..6), 1..7)) {
            let m = Gf2Matrix::new(10, rows.into_iter().map(|s| s.into_iter().collect()).collect()).unwrap();
            let mut span = std::collections::HashSet::new();
            for mask in 0u32..(1 << m.rows()) {
                let mut v = BitSet::new(10);
                for r in 0..m.rows() {
                    if mask >> r & 1 == 1 {
                        v.xor_with(&m.row_bits(r));
                    }
                }
                span.insert(v);
            }
            prop_assert_eq!(span.len(), 1usize << gf2_rank(&m));
            let space = RowSpace::new(&m);
            for v in &span {
                prop_assert!(space.contains(v));
            }
        }
    }
}
