//! Row-major sparse matrices in coordinate form.
//!
//! Λ-level operators have `n^(p+1)` columns but only `p + 2` non-zeros per
//! row, so they are stored sparsely and densified only on request.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use num::Zero;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    /// Sorted by `(row, col)`, no duplicates, no explicit zeros.
    entries: Vec<(usize, usize, T)>,
}

impl<T> SparseMatrix<T>
where
    T: Copy + Zero + PartialEq + Add<Output = T> + Mul<Output = T>,
{
    /// Builds a matrix from triplets, summing duplicates and dropping zeros.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            let e = acc.entry((r, c)).or_insert_with(T::zero);
            *e = *e + v;
        }
        let entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect();
        SparseMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.entries
            .binary_search_by(|&(er, ec, _)| (er, ec).cmp(&(r, c)))
            .map(|i| self.entries[i].2)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.entries.iter().map(|&(r, c, v)| (c, r, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![T::zero(); self.rows];
        for &(r, c, v) in &self.entries {
            y[r] = y[r] + v * x[c];
        }
        y
    }

    /// Sparse product `self * rhs`.
    pub fn matmul(&self, rhs: &SparseMatrix<T>) -> SparseMatrix<T> {
        assert_eq!(self.cols, rhs.rows);
        // Row start offsets of rhs for direct row access.
        let mut starts = vec![0usize; rhs.rows + 1];
        for &(r, _, _) in &rhs.entries {
            starts[r + 1] += 1;
        }
        for i in 0..rhs.rows {
            starts[i + 1] += starts[i];
        }
        let mut triplets = Vec::new();
        for &(r, k, a) in &self.entries {
            for &(_, c, b) in &rhs.entries[starts[k]..starts[k + 1]] {
                triplets.push((r, c, a * b));
            }
        }
        Self::from_triplets(self.rows, rhs.cols, triplets)
    }

    /// Keeps the listed rows and columns, in the given order.
    pub fn submatrix(&self, row_ids: &[usize], col_ids: &[usize]) -> SparseMatrix<T> {
        let mut row_pos = vec![usize::MAX; self.rows];
        for (i, &r) in row_ids.iter().enumerate() {
            row_pos[r] = i;
        }
        let mut col_pos = vec![usize::MAX; self.cols];
        for (j, &c) in col_ids.iter().enumerate() {
            col_pos[c] = j;
        }
        let triplets = self
            .entries
            .iter()
            .filter(|&&(r, c, _)| row_pos[r] != usize::MAX && col_pos[c] != usize::MAX)
            .map(|&(r, c, v)| (row_pos[r], col_pos[c], v));
        Self::from_triplets(row_ids.len(), col_ids.len(), triplets)
    }

    pub fn map<U, F>(&self, f: F) -> SparseMatrix<U>
    where
        U: Copy + Zero + PartialEq + Add<Output = U> + Mul<Output = U>,
        F: Fn(T) -> U,
    {
        SparseMatrix::from_triplets(self.rows, self.cols, self.entries.iter().map(|&(r, c, v)| (r, c, f(v))))
    }
}

impl SparseMatrix<i64> {
    pub fn to_f64(&self) -> SparseMatrix<f64> {
        self.map(|v| v as f64)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.to_f64().to_dense()
    }
}

impl SparseMatrix<f64> {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// Sparse times dense.
    pub fn mul_dense(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(self.cols, rhs.nrows());
        let mut out = DMatrix::zeros(self.rows, rhs.ncols());
        for &(r, c, v) in &self.entries {
            for j in 0..rhs.ncols() {
                out[(r, j)] += v * rhs[(c, j)];
            }
        }
        out
    }
}

impl<T: Display> SparseMatrix<T> {
    /// Triplet text: header `rows cols nnz`, then one `row col value` per line.
    pub fn to_triplet_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.entries.len());
        for (r, c, v) in &self.entries {
            out.push_str(&format!("{r} {c} {v}\n"));
        }
        out
    }
}

/// Dense CSV, one row per line.
pub fn dense_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{}", m[(r, c)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_sum_and_zeros_drop() {
        let m = SparseMatrix::from_triplets(2, 2, [(0, 0, 1i64), (0, 0, -1), (1, 0, 2), (1, 0, 3)]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), 5);
        assert_eq!(m.get(0, 0), 0);
    }

    #[test]
    fn product_and_transpose() {
        let a = SparseMatrix::from_triplets(2, 3, [(0, 0, 1i64), (0, 2, 2), (1, 1, 3)]);
        let b = a.transpose();
        let ab = a.matmul(&b);
        assert_eq!(ab.to_dense(), a.to_dense() * b.to_dense());
        assert_eq!(a.mul_vec(&[1, 1, 1]), vec![3, 3]);
        assert_eq!(a.to_triplet_text(), "2 3 3\n0 0 1\n0 2 2\n1 1 3\n");
        let s = a.submatrix(&[1], &[2, 1]);
        assert_eq!(s.entries(), &[(0, 1, 3)]);
    }
}
