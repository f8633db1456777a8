//! Quadrature assembly of the temporal bilinear forms on uniform hat bases.
//!
//! Both forms are two-dimensional singular integrals
//!
//! ```text
//!   a(φ_row, φ_col) = ⟨∂_t φ_col, H φ_row⟩ = ∬ φ_col'(t) K₋₁(s,t) φ_row'(s) ds dt,
//!   m(φ_row, φ_col) = ⟨φ_col,     H φ_row⟩ = ∬ φ_col(t)  K₋₁(s,t) φ_row'(s) ds dt,
//! ```
//!
//! reduced by [`crate::logkernel::kminus1_pairing`] to one-dimensional
//! integrals against `ln tan(πu/4)` of correlation/convolution weights.
//!
//! On a uniform mesh the weights only depend on the index difference
//! (for the `g(|t−s|)` part) and the index sum (for the `g(s+t)` part), so
//! the full dense matrices need only `O(N)` distinct kernel integrals: a
//! reference correlation/convolution is built once and translated.  Only
//! the right-boundary half-hat breaks the pattern and is handled entry by
//! entry.

use crate::logkernel::{integrate_against_log_tan, kminus1_pairing};
use crate::mesh::{cell_count, hat_deriv_profile, hat_profile, mesh_size};
use crate::piecewise::{convolve, correlate};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// `⟨∂_t φ_{level,col}, H φ_{level,row}⟩` by direct quadrature.
pub fn entry_derivative_form(level: u32, row: usize, col: usize) -> f64 {
    kminus1_pairing(
        &hat_deriv_profile(level, col),
        &hat_deriv_profile(level, row),
    )
}

/// `⟨φ_{level,col}, H φ_{level,row}⟩` by direct quadrature.
pub fn entry_mass_form(level: u32, row: usize, col: usize) -> f64 {
    kminus1_pairing(&hat_profile(level, col), &hat_deriv_profile(level, row))
}

/// Dense single-scale matrices `(A, M)` of the derivative and mass forms at
/// `level`, with `O(N)` distinct kernel integrals.
///
/// `A` is symmetric by construction (the translation tables are shared
/// between `(row, col)` and `(col, row)`); `M` is not symmetric.
pub fn single_scale_forms(level: u32) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = cell_count(level);
    let h = mesh_size(level);
    let mut a = DMatrix::zeros(n, n);
    let mut m = DMatrix::zeros(n, n);

    if n >= 2 {
        let hat_ref = hat_profile(level, 1);
        let d_ref = hat_deriv_profile(level, 1);
        // Reference weights between hats at the same node; translates cover
        // every interior pair.
        let r_dd = correlate(&d_ref, &d_ref);
        let s_dd = convolve(&d_ref, &d_ref);
        let r_hd = correlate(&hat_ref, &d_ref);
        let s_hd = convolve(&hat_ref, &d_ref);

        // Difference part: the autocorrelation of the derivative shape is
        // even, so the derivative form only needs |col − row|.
        let p_diff_a: Vec<f64> = (0..=n.saturating_sub(2))
            .map(|d| integrate_against_log_tan(&r_dd.shifted(d as f64 * h).fold_abs()))
            .collect();
        let off = n as isize - 2;
        let p_diff_m: Vec<f64> = (-off..=off)
            .map(|d| integrate_against_log_tan(&r_hd.shifted(d as f64 * h).fold_abs()))
            .collect();
        // Sum part, indexed by col + row − 2.
        let p_sum_a: Vec<f64> = (0..=2 * n - 4)
            .map(|s| integrate_against_log_tan(&s_dd.shifted(s as f64 * h)))
            .collect();
        let p_sum_m: Vec<f64> = (0..=2 * n - 4)
            .map(|s| integrate_against_log_tan(&s_hd.shifted(s as f64 * h)))
            .collect();

        for row in 1..n {
            for col in 1..n {
                let dd = col as isize - row as isize;
                let sum = col + row - 2;
                a[(row - 1, col - 1)] = -(p_diff_a[dd.unsigned_abs()] + p_sum_a[sum]) / PI;
                m[(row - 1, col - 1)] = -(p_diff_m[(dd + off) as usize] + p_sum_m[sum]) / PI;
            }
        }
    }

    // Right-boundary half-hat row and column.
    for k in 1..=n {
        a[(k - 1, n - 1)] = entry_derivative_form(level, k, n);
        m[(k - 1, n - 1)] = entry_mass_form(level, k, n);
        if k < n {
            a[(n - 1, k - 1)] = entry_derivative_form(level, n, k);
            m[(n - 1, k - 1)] = entry_mass_form(level, n, k);
        }
    }
    (a, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn translation_tables_match_per_entry_quadrature() {
        let level = 3;
        let (a, m) = single_scale_forms(level);
        let n = a.nrows();
        for row in 1..=n {
            for col in 1..=n {
                let ea = entry_derivative_form(level, row, col);
                let em = entry_mass_form(level, row, col);
                assert_abs_diff_eq!(a[(row - 1, col - 1)], ea, epsilon = 1e-12);
                assert_abs_diff_eq!(m[(row - 1, col - 1)], em, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn derivative_form_is_symmetric() {
        let (a, _) = single_scale_forms(4);
        for r in 0..a.nrows() {
            for c in 0..a.ncols() {
                assert_abs_diff_eq!(a[(r, c)], a[(c, r)], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn quadrature_matches_eigen_expansion() {
        // The central consistency check of the whole assembly layer: the
        // singular-quadrature route and the truncated eigen-expansion are
        // fully independent and must agree to the truncation error.
        let level = 3;
        let (a, m) = single_scale_forms(level);
        let (a_ser, m_ser) = crate::kernel::series_forms(level, 200_000);
        for r in 0..a.nrows() {
            for c in 0..a.ncols() {
                assert_abs_diff_eq!(a[(r, c)], a_ser[(r, c)], epsilon = 1e-8);
                assert_abs_diff_eq!(m[(r, c)], m_ser[(r, c)], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn quadratic_forms_are_positive() {
        let (a, m) = single_scale_forms(4);
        let n = a.nrows();
        let x: Vec<f64> = (0..n).map(|i| ((i * 5 + 2) % 7) as f64 - 3.0).collect();
        let (mut qa, mut qm) = (0.0, 0.0);
        for r in 0..n {
            for c in 0..n {
                qa += x[r] * a[(r, c)] * x[c];
                qm += x[r] * m[(r, c)] * x[c];
            }
        }
        assert!(qa > 0.0, "derivative form not positive: {qa}");
        assert!(qm > 0.0, "mass form not positive: {qm}");
    }

    #[test]
    fn smallest_mesh_with_only_boundary_hats() {
        // Level 0 has a single half-hat dof; level 1 has one interior hat
        // and the half-hat.  Both must assemble without the translation
        // tables and agree with the eigen-expansion.
        for level in 0..=1 {
            let (a, m) = single_scale_forms(level);
            let (a_ser, m_ser) = crate::kernel::series_forms(level, 200_000);
            for r in 0..a.nrows() {
                for c in 0..a.ncols() {
                    assert_abs_diff_eq!(a[(r, c)], a_ser[(r, c)], epsilon = 1e-7);
                    assert_abs_diff_eq!(m[(r, c)], m_ser[(r, c)], epsilon = 1e-7);
                }
            }
        }
    }
}
