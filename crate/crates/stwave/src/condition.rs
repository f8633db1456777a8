//! Spectral condition numbers of the diagonally scaled temporal system.
//!
//! For `K = Aₜ + μ·Mₜ` and `D = diag(K)`, the study reports
//! `κ₂(S) = σ_max(S)/σ_min(S)` with `S = D^{−1/2} K D^{−1/2}`.  The extreme
//! singular values come from power iteration on `SᵀS` and, for the smallest
//! one, inverse iteration through an LU factorization of `K`.

use crate::csr::CsrMatrix;
use crate::dissection::{fill_reducing_order, SparseLu};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 5_000;
const RELATIVE_TOL: f64 = 1e-10;

/// Deterministic, mildly irregular start vector for the power iterations.
fn start_vector(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 1.0 + 0.37 * ((i * 2_654_435_761usize) % 1_000) as f64 / 1_000.0)
        .collect()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Largest eigenvalue of the composition `adj ∘ fwd` (assumed symmetric
/// positive semidefinite) by power iteration.
fn dominant_eigenvalue<F, G>(n: usize, mut fwd: F, mut adj: G) -> f64
where
    F: FnMut(&[f64], &mut [f64]),
    G: FnMut(&[f64], &mut [f64]),
{
    let mut v = start_vector(n);
    normalize(&mut v);
    let mut mid = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut lambda = 0.0f64;
    for _ in 0..MAX_ITERATIONS {
        fwd(&v, &mut mid);
        adj(&mid, &mut next);
        let new_lambda = normalize(&mut next);
        std::mem::swap(&mut v, &mut next);
        if (new_lambda - lambda).abs() <= RELATIVE_TOL * new_lambda.abs() {
            return new_lambda;
        }
        lambda = new_lambda;
    }
    lambda
}

/// `κ₂` of `D^{−1/2} K D^{−1/2}` for a square matrix with positive diagonal.
pub fn scaled_condition_number(k: &CsrMatrix) -> Result<f64> {
    assert_eq!(k.nrows, k.ncols);
    let n = k.nrows;
    let mut dinv_sqrt = vec![0.0; n];
    for r in 0..n {
        let (cols, vals) = k.row(r);
        let d = cols
            .iter()
            .zip(vals.iter())
            .find(|(&c, _)| c == r)
            .map(|(_, &v)| v)
            .unwrap_or(0.0);
        if d <= 0.0 {
            return Err(Error::Parameter {
                name: "diagonal",
                value: d,
                reason: format!("row {r} has a nonpositive diagonal entry"),
            });
        }
        dinv_sqrt[r] = 1.0 / d.sqrt();
    }

    // σ_max² = λ_max(SᵀS).
    let mut tmp_f = vec![0.0; n];
    let mut prod_f = vec![0.0; n];
    let mut tmp_a = vec![0.0; n];
    let mut prod_a = vec![0.0; n];
    let ds = &dinv_sqrt;
    let sigma_max_sq = dominant_eigenvalue(
        n,
        |x, y| {
            tmp_f
                .iter_mut()
                .zip(x.iter().zip(ds.iter()))
                .for_each(|(o, (a, b))| *o = a * b);
            k.matvec(&tmp_f, &mut prod_f);
            y.iter_mut()
                .zip(prod_f.iter().zip(ds.iter()))
                .for_each(|(o, (a, b))| *o = a * b);
        },
        |x, y| {
            tmp_a
                .iter_mut()
                .zip(x.iter().zip(ds.iter()))
                .for_each(|(o, (a, b))| *o = a * b);
            k.tr_matvec(&tmp_a, &mut prod_a);
            y.iter_mut()
                .zip(prod_a.iter().zip(ds.iter()))
                .for_each(|(o, (a, b))| *o = a * b);
        },
    );

    // σ_min² = 1/λ_max((SᵀS)⁻¹), via solves with K and Kᵀ.
    let pattern = crate::compress::Pattern {
        n,
        row_ptr: k.row_ptr.clone(),
        col_idx: k.col_idx.clone(),
    };
    let perm = fill_reducing_order(&pattern);
    let lu = SparseLu::factor(k, &perm)?;
    let mut sol_f = vec![0.0; n];
    let mut sol_a = vec![0.0; n];
    let inv_sigma_min_sq = dominant_eigenvalue(
        n,
        |x, y| {
            // S⁻¹ = D^{1/2} K⁻¹ D^{1/2}: dividing by D^{−1/2} multiplies back.
            sol_f
                .iter_mut()
                .zip(x.iter().zip(ds.iter()))
                .for_each(|(o, (a, b))| *o = a / b);
            lu.solve_in_place(&mut sol_f);
            y.iter_mut()
                .zip(sol_f.iter().zip(ds.iter()))
                .for_each(|(o, (v, b))| *o = v / b);
        },
        |x, y| {
            sol_a
                .iter_mut()
                .zip(x.iter().zip(ds.iter()))
                .for_each(|(o, (a, b))| *o = a / b);
            lu.solve_transposed_in_place(&mut sol_a);
            y.iter_mut()
                .zip(sol_a.iter().zip(ds.iter()))
                .for_each(|(o, (v, b))| *o = v / b);
        },
    );

    Ok((sigma_max_sq * inv_sigma_min_sq).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::{compressed_form, FormKind};
    use crate::wavelet::MultiscaleBasis;
    use approx::assert_relative_eq;

    fn scaled_dense(k: &CsrMatrix) -> nalgebra::DMatrix<f64> {
        let n = k.nrows;
        let dense = k.to_dense();
        let d: Vec<f64> = (0..n).map(|i| 1.0 / dense[(i, i)].sqrt()).collect();
        nalgebra::DMatrix::from_fn(n, n, |r, c| d[r] * dense[(r, c)] * d[c])
    }

    #[test]
    fn identity_matrix_has_unit_condition() {
        let eye = CsrMatrix::from_triplets(6, 6, (0..6).map(|i| (i, i, 3.0)).collect());
        assert_relative_eq!(
            scaled_condition_number(&eye).unwrap(),
            1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn matches_dense_svd_at_small_sizes() {
        for (level, mu) in [(3u32, 10.0), (5u32, 100.0)] {
            let basis = MultiscaleBasis::new(2, level).unwrap();
            let (_, a) = compressed_form(&basis, FormKind::Derivative);
            let (_, m) = compressed_form(&basis, FormKind::Mass);
            let k = a.linear_combination(1.0, &m, mu);
            let kappa = scaled_condition_number(&k).unwrap();

            let svd = scaled_dense(&k).svd(false, false);
            let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
            let smin = svd
                .singular_values
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            assert_relative_eq!(kappa, smax / smin, max_relative = 1e-6);
        }
    }

    #[test]
    fn rejects_nonpositive_diagonal() {
        let bad = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, -2.0), (0, 1, 0.5)]);
        assert!(scaled_condition_number(&bad).is_err());
    }
}
