//! Dense matrices over GF(2^m) and exact linear solves.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::gf::{Elem, Field};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Row-major rectangular matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<u16> = self.row(r).iter().map(|e| e.value()).collect();
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

/// Outcome of solving `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(Vec<Elem>),
    /// Affine solution space `particular + span(kernel)` of positive dimension.
    Underdetermined {
        particular: Vec<Elem>,
        kernel: Vec<Vec<Elem>>,
    },
    Inconsistent,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Elem::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Contiguous block `[r0, r0+nr) x [c0, c0+nc)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        Matrix::from_fn(nr, nc, |r, c| self[(r0 + r, c0 + c)])
    }

    /// Submatrix picking arbitrary row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])])
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Matrix::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self[(r, c)]
            } else {
                other[(r, c - self.cols)]
            }
        })
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += f.mul(a, other[(k, c)]);
                }
            }
        }
        out
    }

    /// Row vector times matrix: `v M`.
    pub fn left_mul(&self, f: &Field, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.rows, "vector length mismatch");
        let mut out = vec![Elem::ZERO; self.cols];
        for (r, &x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(r)) {
                *o += f.mul(x, m);
            }
        }
        out
    }

    /// Matrix times column vector: `M v`.
    pub fn mul_vec(&self, f: &Field, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(&a, &b)| f.mul(a, b)).sum())
            .collect()
    }

    pub fn scale_row(&mut self, f: &Field, r: usize, c: Elem) {
        for x in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *x = f.mul(*x, c);
        }
    }

    pub fn scale_col(&mut self, f: &Field, c: usize, s: Elem) {
        for r in 0..self.rows {
            self[(r, c)] = f.mul(self[(r, c)], s);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// `row[dst] += factor * row[src]`
    fn add_row_multiple(&mut self, f: &Field, dst: usize, src: usize, factor: Elem) {
        if factor.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = f.mul(factor, self.data[src * self.cols + c]);
            self.data[dst * self.cols + c] += v;
        }
    }

    /// Reduced row echelon form and pivot columns, restricted to the first
    /// `limit_cols` columns for pivot search (the rest are carried along).
    fn rref_limited(&self, f: &Field, limit_cols: usize) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..limit_cols.min(m.cols) {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = f.inv(m[(row, col)]).expect("pivot is nonzero");
            m.scale_row(f, row, inv);
            for r in 0..m.rows {
                if r != row {
                    let factor = m[(r, col)];
                    m.add_row_multiple(f, r, row, factor);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rref(&self, f: &Field) -> (Matrix, Vec<usize>) {
        self.rref_limited(f, self.cols)
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.rref(f).1.len()
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self, f: &Field) -> Result<Elem, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Elem::ONE;
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Ok(Elem::ZERO);
            };
            // Row swaps flip the sign, which is a no-op in characteristic 2.
            m.swap_rows(col, p);
            let pivot = m[(col, col)];
            det = f.mul(det, pivot);
            let inv = f.inv(pivot).expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = f.mul(m[(r, col)], inv);
                m.add_row_multiple(f, r, col, factor);
            }
        }
        Ok(det)
    }

    pub fn inverse(&self, f: &Field) -> Result<Matrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let (r, pivots) = self.hstack(&Matrix::identity(n)).rref_limited(f, n);
        if pivots.len() < n {
            return Err(MatrixError::Singular);
        }
        Ok(r.block(0, n, n, n))
    }

    /// Basis of the right kernel `{x : M x = 0}`.
    pub fn kernel(&self, f: &Field) -> Vec<Vec<Elem>> {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut x = vec![Elem::ZERO; self.cols];
                x[fc] = Elem::ONE;
                for (pr, &pc) in pivots.iter().enumerate() {
                    // characteristic 2: -a = a
                    x[pc] = r[(pr, fc)];
                }
                x
            })
            .collect()
    }

    /// Solves `M x = b` exactly.
    pub fn solve(&self, f: &Field, b: &[Elem]) -> Result<LinearSolution, MatrixError> {
        if b.len() != self.rows {
            return Err(MatrixError::Dimension(format!(
                "rhs has {} entries, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let n = self.cols;
        let aug = self.hstack(&Matrix::from_fn(self.rows, 1, |r, _| b[r]));
        let (r, pivots) = aug.rref_limited(f, n);
        if (pivots.len()..r.rows).any(|row| !r[(row, n)].is_zero()) {
            return Ok(LinearSolution::Inconsistent);
        }
        let mut particular = vec![Elem::ZERO; n];
        for (pr, &pc) in pivots.iter().enumerate() {
            particular[pc] = r[(pr, n)];
        }
        if pivots.len() == n {
            return Ok(LinearSolution::Unique(particular));
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let kernel = free
            .iter()
            .map(|&fc| {
                let mut x = vec![Elem::ZERO; n];
                x[fc] = Elem::ONE;
                for (pr, &pc) in pivots.iter().enumerate() {
                    x[pc] = r[(pr, fc)];
                }
                x
            })
            .collect();
        Ok(LinearSolution::Underdetermined { particular, kernel })
    }

    /// Entrywise map.
    pub fn map(&self, mut g: impl FnMut(Elem) -> Elem) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| g(x)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Elem> {
        self.data.iter()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Elem;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Elem {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Elem {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}
