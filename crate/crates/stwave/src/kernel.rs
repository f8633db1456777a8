//! Spectral representation of the modified Hilbert transform on `(0, 1)`.
//!
//! The operator diagonalizes in the eigenbasis of `−d²/dt²` with a Dirichlet
//! condition at `t = 0` and a Neumann condition at `t = 1`:
//!
//! ```text
//!   V_ℓ(t) = √2 sin(ω_ℓ t),   W_ℓ(t) = √2 cos(ω_ℓ t),   ω_ℓ = (ℓ + ½)π,
//!   H V_ℓ = W_ℓ .
//! ```
//!
//! This module provides the eigenpairs, the pointwise kernels of the
//! operator (the principal-value kernel and its once-integrated, weakly
//! singular form), closed-form moments of hat functions against the
//! eigenfunctions, and truncated eigen-expansions of the two bilinear forms
//!
//! ```text
//!   a(u, v) = ⟨∂_t v, H u⟩,      m(u, v) = ⟨v, H u⟩
//! ```
//!
//! on uniform hat bases.  The expansions converge like `L⁻²` in the number
//! of retained terms and serve as an oracle that is independent of the
//! quadrature-based assembly in [`crate::assembly`].

use crate::logkernel::log_tan_kernel;
use nalgebra::DMatrix;
use std::f64::consts::{PI, SQRT_2};

/// Eigenfrequency `ω_ℓ = (ℓ + ½)π`.
pub fn omega(ell: usize) -> f64 {
    (ell as f64 + 0.5) * PI
}

/// Eigenvalue `λ_ℓ = ω_ℓ²` of the underlying second-derivative operator.
pub fn eigenvalue(ell: usize) -> f64 {
    let w = omega(ell);
    w * w
}

/// `V_ℓ(t) = √2 sin(ω_ℓ t)`.
pub fn v_eigen(ell: usize, t: f64) -> f64 {
    SQRT_2 * (omega(ell) * t).sin()
}

/// `W_ℓ(t) = √2 cos(ω_ℓ t)`.
pub fn w_eigen(ell: usize, t: f64) -> f64 {
    SQRT_2 * (omega(ell) * t).cos()
}

/// Principal-value kernel `K(s,t) = ½ [ 1/sin(π(s+t)/2) + 1/sin(π(s−t)/2) ]`.
///
/// Only meaningful for `s ≠ t`; integrals against it require a
/// principal-value interpretation, which is why the assembly routes go
/// through [`kernel_first_order`] instead.
pub fn kernel_pv(s: f64, t: f64) -> f64 {
    0.5 * (1.0 / (0.5 * PI * (s + t)).sin() + 1.0 / (0.5 * PI * (s - t)).sin())
}

/// First-order (once integrated in `s`) kernel
/// `K₋₁(s,t) = −(1/π) [ g(s+t) + g(|t−s|) ]` with `g(u) = ln tan(πu/4)`.
///
/// For `v` with `v(0) = 0` the transform is exactly
/// `(H v)(t) = ∫₀¹ K₋₁(s,t) v'(s) ds`: the boundary term of the
/// integration by parts vanishes because `K₋₁(1, t) ≡ 0` (see
/// [`tests::first_order_kernel_vanishes_at_right_endpoint`]).
pub fn kernel_first_order(s: f64, t: f64) -> f64 {
    -(log_tan_kernel(s + t) + log_tan_kernel((t - s).abs())) / PI
}

/// Moments of the level-`j` hat basis against one eigenpair frequency.
///
/// Index `k − 1` holds the hat at node `k·2⁻ʲ` for `k = 1, …, 2ʲ`; the last
/// entry is the half-hat supported on `[1 − 2⁻ʲ, 1]`.
pub struct HatMoments {
    /// `⟨φ_k, √2 sin(ω·)⟩`
    pub v: Vec<f64>,
    /// `⟨φ_k, √2 cos(ω·)⟩`
    pub w: Vec<f64>,
    /// `⟨φ_k', √2 cos(ω·)⟩`
    pub dw: Vec<f64>,
}

/// Closed-form hat moments at level `j` for frequency `om`.
pub fn hat_moments(j: u32, om: f64) -> HatMoments {
    let n = 1usize << j;
    let mut m = HatMoments {
        v: vec![0.0; n],
        w: vec![0.0; n],
        dw: vec![0.0; n],
    };
    hat_moments_into(j, om, &mut m.v, &mut m.w, &mut m.dw);
    m
}

/// In-place variant of [`hat_moments`] for reuse across many frequencies.
pub fn hat_moments_into(j: u32, om: f64, v: &mut [f64], w: &mut [f64], dw: &mut [f64]) {
    let n = 1usize << j;
    assert!(v.len() == n && w.len() == n && dw.len() == n);
    let h = 0.5f64.powi(j as i32);
    // ∫ φ_k e^{iωt} dt = e^{iω x_k} · 4 sin²(ωh/2) / (ω²h) for interior hats.
    let shape = 4.0 * (0.5 * om * h).sin().powi(2) / (om * om * h);
    for k in 1..n {
        let x = k as f64 * h;
        let (sx, cx) = (om * x).sin_cos();
        v[k - 1] = SQRT_2 * sx * shape;
        w[k - 1] = SQRT_2 * cx * shape;
        // Three-point difference form of ⟨φ_k', cos(ω·)⟩ = (2 sin ωx_k −
        // sin ωx_{k−1} − sin ωx_{k+1})/(ωh); kept as written so the series
        // oracle does not share the product-form rounding of `v`.
        let sm = (om * (x - h)).sin();
        let sp = (om * (x + h)).sin();
        dw[k - 1] = SQRT_2 * (2.0 * sx - sm - sp) / (om * h);
    }
    // Half-hat rising on [1−h, 1].
    let (s1, c1) = om.sin_cos();
    let (sa, ca) = (om * (1.0 - h)).sin_cos();
    v[n - 1] = SQRT_2 * (-c1 / om + (s1 - sa) / (om * om * h));
    w[n - 1] = SQRT_2 * (s1 / om + (c1 - ca) / (om * om * h));
    dw[n - 1] = SQRT_2 * (s1 - sa) / (om * h);
}

/// Truncated eigen-expansions of the derivative form and the mass form on
/// the level-`j` hat basis: returns `(A, M)` with
///
/// ```text
///   A[k,k'] = Σ_{ℓ<terms} ⟨φ_k, V_ℓ⟩ ⟨φ_{k'}', W_ℓ⟩  ≈ ⟨∂_t φ_{k'}, H φ_k⟩,
///   M[k,k'] = Σ_{ℓ<terms} ⟨φ_k, V_ℓ⟩ ⟨φ_{k'}, W_ℓ⟩   ≈ ⟨φ_{k'}, H φ_k⟩.
/// ```
///
/// The truncation error of each entry is `O(terms⁻² h⁻²)`.
pub fn series_forms(j: u32, terms: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = 1usize << j;
    let mut a = DMatrix::zeros(n, n);
    let mut m = DMatrix::zeros(n, n);
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut dw = vec![0.0; n];
    for ell in 0..terms {
        hat_moments_into(j, omega(ell), &mut v, &mut w, &mut dw);
        for r in 0..n {
            let vr = v[r];
            for c in 0..n {
                a[(r, c)] += vr * dw[c];
                m[(r, c)] += vr * w[c];
            }
        }
    }
    (a, m)
}

/// Coefficients `z_ℓ = ⟨z, V_ℓ⟩`, `ℓ < n`, by composite Gauss quadrature
/// resolving the oscillation of each eigenfunction.
pub fn eigen_sine_coefficients(z: impl Fn(f64) -> f64, n: usize) -> Vec<f64> {
    let rule = crate::quad::GaussRule::new(16);
    (0..n)
        .map(|ell| {
            let om = omega(ell);
            let panels = 4.max((om / 4.0).ceil() as usize);
            let mut acc = 0.0;
            for p in 0..panels {
                let a = p as f64 / panels as f64;
                let b = (p + 1) as f64 / panels as f64;
                acc += rule.integrate(a, b, |t| z(t) * SQRT_2 * (om * t).sin());
            }
            acc
        })
        .collect()
}

/// Evaluate the transform from its sine coefficients: `Σ_ℓ z_ℓ W_ℓ(t)`.
pub fn eigen_cosine_sum(coeffs: &[f64], t: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(ell, z)| z * w_eigen(ell, t))
        .sum()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eigenfrequencies_and_eigenvalues() {
        assert_abs_diff_eq!(omega(0), PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(omega(3), 3.5 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(eigenvalue(2), 6.25 * PI * PI, epsilon = 1e-12);
    }

    #[test]
    fn eigenfunctions_satisfy_boundary_conditions() {
        for ell in 0..6 {
            assert_abs_diff_eq!(v_eigen(ell, 0.0), 0.0, epsilon = 1e-15);
            // W_ℓ has a zero at t = 1 (Neumann pair of V), and ‖V_ℓ‖ = 1.
            assert_abs_diff_eq!(w_eigen(ell, 1.0), 0.0, epsilon = 1e-13);
            let rule = crate::quad::GaussRule::new(64);
            let panels = 4 * (ell + 1);
            let mut norm = 0.0;
            for p in 0..panels {
                let (a, b) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
                norm += rule.integrate(a, b, |t| v_eigen(ell, t).powi(2));
            }
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn first_order_kernel_vanishes_at_right_endpoint() {
        // K₋₁(1, t) = −(g(1+t) + g(1−t))/π = 0 because g(2−u) = −g(u);
        // this is what kills the boundary term in the integration by parts.
        for &t in &[0.05, 0.3, 0.62, 0.97] {
            assert_abs_diff_eq!(kernel_first_order(1.0, t), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn first_order_kernel_is_antiderivative_of_pv_kernel() {
        // ∂_s K₋₁(s,t) = −K(s,t) away from the diagonal.
        let d = 1e-5;
        for &(s, t) in &[(0.3, 0.7), (0.62, 0.31), (0.85, 0.2)] {
            let fd = (kernel_first_order(s + d, t) - kernel_first_order(s - d, t)) / (2.0 * d);
            assert_abs_diff_eq!(fd, -kernel_pv(s, t), epsilon = 1e-6 * kernel_pv(s, t).abs());
        }
    }

    #[test]
    fn hat_moments_match_quadrature() {
        let j = 3;
        let n = 1usize << j;
        let h = 0.125;
        let om = omega(7); // ωh ≈ 2.95: oscillatory but resolvable
        let m = hat_moments(j, om);
        let rule = crate::quad::GaussRule::new(32);
        for k in 1..=n {
            let x = k as f64 * h;
            let lo = x - h;
            let hi = (x + h).min(1.0);
            let hat = |t: f64| (1.0 - ((t - x) / h).abs()).max(0.0);
            let hat_d = |t: f64| if t < x { 1.0 / h } else { -1.0 / h };
            let qv = rule.integrate(lo, x, |t| hat(t) * SQRT_2 * (om * t).sin())
                + rule.integrate(x, hi, |t| hat(t) * SQRT_2 * (om * t).sin());
            let qw = rule.integrate(lo, x, |t| hat(t) * SQRT_2 * (om * t).cos())
                + rule.integrate(x, hi, |t| hat(t) * SQRT_2 * (om * t).cos());
            let qdw = rule.integrate(lo, x, |t| hat_d(t) * SQRT_2 * (om * t).cos())
                + rule.integrate(x, hi, |t| hat_d(t) * SQRT_2 * (om * t).cos());
            assert_abs_diff_eq!(m.v[k - 1], qv, epsilon = 1e-13);
            assert_abs_diff_eq!(m.w[k - 1], qw, epsilon = 1e-13);
            assert_abs_diff_eq!(m.dw[k - 1], qdw, epsilon = 1e-12);
        }
    }

    #[test]
    fn transform_of_eigenfunction_is_cosine_partner() {
        // H(V_0 + 0.3 V_3) = W_0 + 0.3 W_3.
        let f = |t: f64| v_eigen(0, t) + 0.3 * v_eigen(3, t);
        let coeffs = eigen_sine_coefficients(f, 8);
        assert_abs_diff_eq!(coeffs[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(coeffs[3], 0.3, epsilon = 1e-12);
        for &t in &[0.1, 0.5, 0.9] {
            let expect = w_eigen(0, t) + 0.3 * w_eigen(3, t);
            assert_abs_diff_eq!(eigen_cosine_sum(&coeffs, t), expect, epsilon = 1e-11);
        }
    }

    #[test]
    fn series_forms_are_consistent_with_operator_structure() {
        // The derivative form is symmetric and positive definite; the mass
        // form is nonsymmetric with a positive symmetric part.  Truncation
        // perturbs each entry by O(L⁻²h⁻²), so symmetry holds to that order.
        let (a, m) = series_forms(3, 20_000);
        let n = a.nrows();
        for r in 0..n {
            for c in 0..n {
                assert_abs_diff_eq!(a[(r, c)], a[(c, r)], epsilon = 1e-5);
            }
        }
        // Quadratic forms on a deterministic test vector.
        let x: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0).collect();
        let mut qa = 0.0;
        let mut qm = 0.0;
        for r in 0..n {
            for c in 0..n {
                qa += x[r] * a[(r, c)] * x[c];
                qm += x[r] * m[(r, c)] * x[c];
            }
        }
        assert!(qa > 0.0, "derivative form must be positive: {qa}");
        assert!(qm > 0.0, "mass form must be positive: {qm}");
    }
}
