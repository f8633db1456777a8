//! Banded LU factorization with partial pivoting.
//!
//! The per-level two-scale transforms of [`crate::wavelet`] invert matrices
//! whose columns, after interleaving coarse and detail indices, have a
//! fixed small bandwidth independent of the level.  A band factorization
//! makes each transform level `O(n)`.
//!
//! Storage follows the usual band scheme: entry `(i, j)` with
//! `−ku ≤ j − i ≤ kl` lives at row `kl + ku + i − j` of column `j` in a
//! `(2·kl + ku + 1) × n` array; the extra `kl` leading rows absorb the fill
//! produced by row interchanges.

use crate::error::{Error, Result};

/// Band matrix builder with `kl` subdiagonals and `ku` superdiagonals.
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Column-major `(2·kl + ku + 1) × n`.
    ab: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandedMatrix {
            n,
            kl,
            ku,
            ab: vec![0.0; (2 * kl + ku + 1) * n],
        }
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(j + self.kl >= i && i + self.ku + self.kl >= j, "outside band");
        (self.kl + self.ku + i) - j + j * (2 * self.kl + self.ku + 1)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let o = self.offset(i, j);
        self.ab[o] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let o = self.offset(i, j);
        self.ab[o] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || i + self.ku + self.kl < j {
            0.0
        } else {
            self.ab[self.offset(i, j)]
        }
    }

    /// Factor `PA = LU` in band storage with partial pivoting.
    pub fn lu(mut self) -> Result<BandedLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            // Pivot search in column j among rows j..=j+kl.
            let imax = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = self.get(j, j).abs();
            for i in j + 1..=imax {
                let v = self.get(i, j).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::PivotBreakdown {
                    index: j,
                    pivot: 0.0,
                    guard: 0.0,
                });
            }
            ipiv[j] = p;
            let jmax = (j + kl + ku).min(n - 1);
            if p != j {
                for c in j..=jmax {
                    let (oi, oj) = (self.offset(p, c), self.offset(j, c));
                    self.ab.swap(oi, oj);
                }
            }
            let pivot = self.get(j, j);
            for i in j + 1..=imax {
                let l = self.get(i, j) / pivot;
                self.set(i, j, l);
                if l != 0.0 {
                    for c in j + 1..=jmax {
                        let u = self.get(j, c);
                        if u != 0.0 {
                            self.add(i, c, -l * u);
                        }
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            ab: self.ab,
            ipiv,
        })
    }
}

/// Factored form ready for repeated right-hand sides.
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    fn get(&self, i: usize, j: usize) -> f64 {
        self.ab[(self.kl + self.ku + i) - j + j * (2 * self.kl + self.ku + 1)]
    }

    /// Solve `Ax = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        // Forward: apply P and L.
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(p, j);
            }
            let bj = b[j];
            if bj != 0.0 {
                for i in j + 1..=(j + kl).min(n - 1) {
                    b[i] -= self.get(i, j) * bj;
                }
            }
        }
        // Back substitution with U (bandwidth kl + ku after fill).
        for j in (0..n).rev() {
            let mut x = b[j];
            for c in j + 1..=(j + kl + ku).min(n - 1) {
                x -= self.get(j, c) * b[c];
            }
            b[j] = x / self.get(j, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tridiagonal_solve_matches_dense() {
        let n = 12;
        let mut b = BandedMatrix::zeros(n, 1, 1);
        let mut dense = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) <= 1 {
                    let v = if i == j { 2.5 } else { -1.0 + 0.05 * j as f64 };
                    b.set(i, j, v);
                    dense[(i, j)] = v;
                }
            }
        }
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let x_dense = dense
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(&rhs))
            .unwrap();
        let lu = b.lu().unwrap();
        let mut x = rhs.clone();
        lu.solve_in_place(&mut x);
        for i in 0..n {
            assert_abs_diff_eq!(x[i], x_dense[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_diagonal() {
        // (0,0) entry is zero, so the factorization must interchange rows.
        let mut b = BandedMatrix::zeros(3, 1, 1);
        b.set(0, 0, 0.0);
        b.set(0, 1, 2.0);
        b.set(1, 0, 1.0);
        b.set(1, 1, 1.0);
        b.set(1, 2, 1.0);
        b.set(2, 1, 4.0);
        b.set(2, 2, 1.0);
        let lu = b.lu().unwrap();
        // Solve against a known solution x = (1, 2, 3).
        let mut rhs = vec![4.0, 6.0, 11.0];
        lu.solve_in_place(&mut rhs);
        assert_abs_diff_eq!(rhs[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(rhs[1], 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(rhs[2], 3.0, epsilon = 1e-13);
    }

    #[test]
    fn wide_band_random_system() {
        let n = 40;
        let (kl, ku) = (5, 3);
        let mut b = BandedMatrix::zeros(n, kl, ku);
        let mut dense = nalgebra::DMatrix::zeros(n, n);
        // Deterministic pseudo-random entries.
        let mut state = 123456789u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for j in 0..n {
            for i in j.saturating_sub(ku)..(j + kl + 1).min(n) {
                let v = next() + if i == j { 4.0 } else { 0.0 };
                b.set(i, j, v);
                dense[(i, j)] = v;
            }
        }
        let rhs: Vec<f64> = (0..n).map(|i| next() + i as f64 * 0.01).collect();
        let reference = dense
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(&rhs))
            .unwrap();
        let lu = b.lu().unwrap();
        let mut x = rhs.clone();
        lu.solve_in_place(&mut x);
        for i in 0..n {
            assert_abs_diff_eq!(x[i], reference[i], epsilon = 1e-11);
        }
    }

    #[test]
    fn singular_matrix_reports_breakdown() {
        let mut b = BandedMatrix::zeros(2, 1, 1);
        b.set(0, 0, 1.0);
        b.set(1, 0, 2.0);
        // Column 1 is identically zero → structural singularity.
        assert!(b.lu().is_err());
    }
}
