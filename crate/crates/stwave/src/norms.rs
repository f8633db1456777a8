//! Error norms for the discrete solutions.
//!
//! Temporal solutions live on the unit interval after rescaling a problem
//! posed on `(0, T)`; the norms carry the horizon factors back:
//! `‖·‖_{L²(0,T)} = √T·‖·‖_{L²(0,1)}`, the `H¹` seminorm scales by `1/√T`,
//! and the interpolation norm of order `½` built from the eigenpairs is
//! scale-invariant.
//!
//! Space-time errors are evaluated algebraically: the squared norm of the
//! discrete part through mass/Gram matrices, the cross term through exact
//! separable moments, so no volume quadrature is needed.

use std::f64::consts::SQRT_2;

use crate::csr::CsrMatrix;
use crate::kernel::{hat_moments_into, omega};
use crate::quad::GaussRule;
use crate::rhs::SineCombination;
use crate::wavelet::MultiscaleBasis;

/// Error norms of a temporal solution against a manufactured one.
#[derive(Debug, Clone, Copy)]
pub struct TemporalErrors {
    /// `L²(0,T)` error.
    pub l2: f64,
    /// `H¹(0,T)` seminorm error.
    pub h1: f64,
    /// Interpolation norm of order `½` (horizon-invariant).
    pub h_half: f64,
    /// Estimated relative size of the truncated series tail in the `½`-norm;
    /// values above `0.01` mean the reported `h_half` is unreliable.
    pub tail_ratio: f64,
}

/// Series length used for the `½`-norm unless a caller overrides it.
pub const HALF_NORM_TERMS: usize = 10_000;

/// Computes the three error norms of a multiscale solution on the unit
/// interval against an exact sine combination, rescaled to horizon `T`.
pub fn temporal_errors(
    basis: &MultiscaleBasis,
    solution: &[f64],
    exact: &SineCombination,
    horizon: f64,
    terms: usize,
) -> TemporalErrors {
    let nodal = basis.synthesis(solution);
    let n = nodal.len();
    let h = 0.5f64.powi(basis.max_level as i32);
    let rule = GaussRule::new(8);

    // L² and H¹ cell by cell; the discrete function is linear per cell and
    // vanishes at τ = 0.
    let mut l2_sq = 0.0;
    let mut h1_sq = 0.0;
    for cell in 0..n {
        let left = if cell == 0 { 0.0 } else { nodal[cell - 1] };
        let right = nodal[cell];
        let a = cell as f64 * h;
        let slope = (right - left) / h;
        l2_sq += rule.integrate(a, a + h, |t| {
            let d = left + slope * (t - a) - exact.eval(t);
            d * d
        });
        h1_sq += rule.integrate(a, a + h, |t| {
            let d = slope - exact.eval_derivative(t);
            d * d
        });
    }

    // ½-norm through the eigen-expansion of the error.
    let exact_coeffs = exact.eigen_coeffs(terms);
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut dw = vec![0.0; n];
    let mut half_sq = 0.0;
    let tail_window = terms - terms / 10;
    let mut tail_c = 0.0;
    for (l, &cl) in exact_coeffs.iter().enumerate() {
        let om = omega(l);
        hat_moments_into(basis.max_level, om, &mut v, &mut w, &mut dw);
        let discrete: f64 = nodal.iter().zip(v.iter()).map(|(x, vk)| x * vk).sum();
        let e = discrete - cl;
        let term = om * e * e;
        half_sq += term;
        if l >= tail_window {
            tail_c += term * (l as f64).powi(3);
        }
    }
    // The per-frequency terms decay like ℓ⁻³, so the truncated tail is about
    // C/(2·terms²) with C estimated from the last decade.
    let tail_c = tail_c / (terms - tail_window) as f64;
    let tail = tail_c / (2.0 * (terms as f64).powi(2));
    let tail_ratio = if half_sq > 0.0 { tail / half_sq } else { 0.0 };

    TemporalErrors {
        l2: (horizon * l2_sq).sqrt(),
        h1: (h1_sq / horizon).sqrt(),
        h_half: half_sq.sqrt(),
        tail_ratio,
    }
}

/// Gram matrix of the temporal hat basis (nodes `k·2⁻ʲ`, `k = 1..2ʲ`, the
/// last one a half-hat): tridiagonal with diagonal `2h/3` (`h/3` for the
/// half-hat) and off-diagonal `h/6`.
pub fn hat_gram_matrix(level: u32) -> CsrMatrix {
    let n = 1usize << level;
    let h = 0.5f64.powi(level as i32);
    let mut t = Vec::with_capacity(3 * n);
    for k in 0..n {
        let diag = if k + 1 == n { h / 3.0 } else { 2.0 * h / 3.0 };
        t.push((k, k, diag));
        if k + 1 < n {
            t.push((k, k + 1, h / 6.0));
            t.push((k + 1, k, h / 6.0));
        }
    }
    CsrMatrix::from_triplets(n, n, t)
}

/// `⟨ϑ_k, sin⟩` for every temporal hat at the given level.
pub fn temporal_sine_moments(level: u32) -> Vec<f64> {
    let n = 1usize << level;
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut dw = vec![0.0; n];
    hat_moments_into(level, 1.0, &mut v, &mut w, &mut dw);
    v.iter().map(|x| x / SQRT_2).collect()
}

/// Squared `L²` error `‖u_h − u‖²` of a rank-structured space-time field.
///
/// `u` is the column-major nodal array (`nx × nt`, spatial index fastest),
/// `mass_x`/`gram_t` the spatial and temporal Gram matrices, and
/// `moment_x`/`moment_t` the exact moments `⟨basis, u_exact⟩` of a separable
/// exact solution with squared norm `exact_norm_sq`.
pub fn quadratic_error_sq(
    u: &[f64],
    nx: usize,
    nt: usize,
    mass_x: &CsrMatrix,
    gram_t: &CsrMatrix,
    moment_x: &[f64],
    moment_t: &[f64],
    exact_norm_sq: f64,
) -> f64 {
    assert_eq!(u.len(), nx * nt);
    assert_eq!(moment_x.len(), nx);
    assert_eq!(moment_t.len(), nt);

    // ‖u_h‖² = Σ_{k,k'} Gram_t[k,k'] · (U[:,k]ᵀ M_x U[:,k']).
    let mut mx_u = vec![0.0; nx * nt];
    for k in 0..nt {
        mass_x.matvec(&u[k * nx..(k + 1) * nx], &mut mx_u[k * nx..(k + 1) * nx]);
    }
    let mut discrete_sq = 0.0;
    for k in 0..nt {
        let (cols, vals) = gram_t.row(k);
        let uk = &u[k * nx..(k + 1) * nx];
        for (&kp, &g) in cols.iter().zip(vals.iter()) {
            let dot: f64 = uk
                .iter()
                .zip(mx_u[kp * nx..(kp + 1) * nx].iter())
                .map(|(a, b)| a * b)
                .sum();
            discrete_sq += g * dot;
        }
    }

    // Cross term ⟨u_h, u⟩ from the separable moments.
    let mut cross = 0.0;
    for k in 0..nt {
        let dot: f64 = u[k * nx..(k + 1) * nx]
            .iter()
            .zip(moment_x.iter())
            .map(|(a, b)| a * b)
            .sum();
        cross += moment_t[k] * dot;
    }

    discrete_sq - 2.0 * cross + exact_norm_sq
}
