//! Uniform dyadic meshes on `(0, 1]` and their hat bases.
//!
//! Level `j` has cells of width `h = 2⁻ʲ` and hat functions attached to the
//! nodes `k·h`, `k = 1, …, 2ʲ`.  The node at `t = 0` carries no basis
//! function — trial functions vanish there — and the hat at `t = 1` is the
//! right-boundary half-hat supported on a single cell.

use crate::piecewise::{PiecewiseLinear, PiecewisePoly};

/// Cell width `2⁻ʲ`.
pub fn mesh_size(level: u32) -> f64 {
    0.5f64.powi(level as i32)
}

/// Number of cells `2ʲ`.
pub fn cell_count(level: u32) -> usize {
    1usize << level
}

/// Number of hat degrees of freedom at `level` (nodes `k·h`, `k ≥ 1`).
pub fn dof_count(level: u32) -> usize {
    1usize << level
}

/// The hat `φ_{level,k}` as a piecewise polynomial (`k` is 1-based;
/// `k = 2ˡᵉᵛᵉˡ` yields the half-hat).
pub fn hat_profile(level: u32, k: usize) -> PiecewisePoly {
    hat_linear(level, k).as_poly()
}

/// The derivative `φ'_{level,k}` as a piecewise constant profile.
pub fn hat_deriv_profile(level: u32, k: usize) -> PiecewisePoly {
    hat_linear(level, k).deriv_poly()
}

fn hat_linear(level: u32, k: usize) -> PiecewiseLinear {
    let n = cell_count(level);
    assert!(k >= 1 && k <= n, "hat index {k} out of range 1..={n}");
    let h = mesh_size(level);
    let x = k as f64 * h;
    if k == n {
        PiecewiseLinear::new(vec![x - h, x], vec![0.0, 1.0])
    } else {
        PiecewiseLinear::new(vec![x - h, x, x + h], vec![0.0, 1.0, 0.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn interior_hat_shape() {
        let p = hat_profile(3, 5);
        assert_abs_diff_eq!(p.lo(), 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(p.hi(), 0.75, epsilon = 0.0);
        assert_abs_diff_eq!(p.eval(0.625), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.eval(0.5625), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.integral(), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn boundary_half_hat_shape() {
        let p = hat_profile(2, 4);
        assert_abs_diff_eq!(p.lo(), 0.75, epsilon = 0.0);
        assert_abs_diff_eq!(p.hi(), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(p.eval(1.0 - 1e-12), 1.0, epsilon = 1e-11);
        assert_abs_diff_eq!(p.integral(), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn derivative_profile_is_piecewise_constant() {
        let d = hat_deriv_profile(4, 7);
        let h = mesh_size(4);
        assert_abs_diff_eq!(d.eval(7.0 * h - 0.4 * h), 1.0 / h, epsilon = 1e-12);
        assert_abs_diff_eq!(d.eval(7.0 * h + 0.4 * h), -1.0 / h, epsilon = 1e-12);
        assert_abs_diff_eq!(d.integral(), 0.0, epsilon = 1e-12);
    }
}
