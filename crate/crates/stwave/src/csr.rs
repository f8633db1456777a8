//! Compressed sparse row storage.
//!
//! The compressed multiscale matrices are assembled once and then applied
//! many times inside Krylov iterations; CSR gives cache-friendly row-wise
//! products and is the input format of the fill-reducing factorization in
//! [`crate::dissection`].

use nalgebra::DMatrix;

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut compact: Vec<(usize, usize, f64)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            debug_assert!(r < nrows && c < ncols);
            match compact.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => compact.push((r, c, v)),
            }
        }
        let mut row_ptr = vec![0usize; nrows + 1];
        for &(r, _, _) in &compact {
            row_ptr[r + 1] += 1;
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let col_idx = compact.iter().map(|&(_, c, _)| c).collect();
        let values = compact.iter().map(|&(_, _, v)| v).collect();
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c];
            }
            y[r] = acc;
        }
    }

    /// `y += α A x`.
    pub fn matvec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c];
            }
            y[r] += alpha * acc;
        }
    }

    /// `y = Aᵀ x`.
    pub fn tr_matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        y.fill(0.0);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let xr = x[r];
            if xr != 0.0 {
                for (c, v) in cols.iter().zip(vals) {
                    y[*c] += v * xr;
                }
            }
        }
    }

    /// Leading principal `n × n` submatrix.
    pub fn leading_submatrix(&self, n: usize) -> CsrMatrix {
        assert!(n <= self.nrows && n <= self.ncols);
        let mut triplets = Vec::new();
        for r in 0..n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if c < n {
                    triplets.push((r, c, v));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, triplets)
    }

    /// Linear combination on the union pattern: `α·self + β·other`.
    pub fn linear_combination(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> CsrMatrix {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols, other.ncols);
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.nrows {
            let (c1, v1) = self.row(r);
            for (c, v) in c1.iter().zip(v1) {
                triplets.push((r, *c, alpha * v));
            }
            let (c2, v2) = other.row(r);
            for (c, v) in c2.iter().zip(v2) {
                triplets.push((r, *c, beta * v));
            }
        }
        CsrMatrix::from_triplets(self.nrows, self.ncols, triplets)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                out[(r, *c)] += v;
            }
        }
        out
    }

    pub fn from_dense(m: &DMatrix<f64>, drop_tol: f64) -> CsrMatrix {
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)].abs() > drop_tol {
                    t.push((r, c, m[(r, c)]));
                }
            }
        }
        CsrMatrix::from_triplets(m.nrows(), m.ncols(), t)
    }
}
