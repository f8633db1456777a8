//! Load vectors: pairing a forcing term with the transformed test functions.
//!
//! With the transform's eigen-expansion, the load entry for a test function
//! `ψ` is `⟨f, Hψ⟩ = Σ_ℓ ⟨ψ, V_ℓ⟩ ⟨f, W_ℓ⟩`, so a load vector needs the
//! cosine coefficients of the forcing once and the sine moments of the hat
//! basis per frequency.  The series is accumulated in the hat basis in
//! `O(terms · N)` and converted to the multiscale basis by one adjoint
//! synthesis.

use std::f64::consts::{PI, SQRT_2};

use crate::kernel::{hat_moments_into, omega};
use crate::oscillatory::SmoothFit;
use crate::wavelet::MultiscaleBasis;

/// `⟨√2 sin(ω_k ·), √2 cos(ω_ℓ ·)⟩` on the unit interval, in closed form.
pub fn sine_cosine_pairing(k: usize, ell: usize) -> f64 {
    if (k + ell) % 2 == 0 {
        2.0 / ((k + ell + 1) as f64 * PI)
    } else {
        2.0 / ((k as f64 - ell as f64) * PI)
    }
}

/// Cosine coefficients `⟨f, W_ℓ⟩` of a fitted forcing for `ℓ = 0..terms`.
pub fn cosine_load_series(fit: &SmoothFit, terms: usize) -> Vec<f64> {
    (0..terms)
        .map(|l| SQRT_2 * fit.cosine_integral(omega(l)))
        .collect()
}

/// Assembles the load vector `b_i = Σ_ℓ c_ℓ ⟨ψ_i, V_ℓ⟩` in the multiscale
/// basis from cosine coefficients `c_ℓ` of the forcing.
pub fn assemble_load(basis: &MultiscaleBasis, coeffs: &[f64]) -> Vec<f64> {
    let n = basis.len();
    let mut hat = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut dw = vec![0.0; n];
    for (l, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        hat_moments_into(basis.max_level, omega(l), &mut v, &mut w, &mut dw);
        for (h, &vk) in hat.iter_mut().zip(v.iter()) {
            *h += c * vk;
        }
    }
    basis.synthesis_adjoint(&hat)
}

/// A finite combination `Σ αᵢ √2 sin(ω_{kᵢ} τ)` of the sine eigenfunctions.
///
/// Such combinations make convenient manufactured solutions: they vanish at
/// `τ = 0`, and the data of the evolution problem they solve has closed-form
/// eigen-coefficients.
#[derive(Debug, Clone)]
pub struct SineCombination {
    /// `(index, coefficient)` pairs; indices must be distinct.
    pub terms: Vec<(usize, f64)>,
}

impl SineCombination {
    pub fn eval(&self, tau: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(k, a)| a * SQRT_2 * (omega(k) * tau).sin())
            .sum()
    }

    pub fn eval_derivative(&self, tau: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(k, a)| a * SQRT_2 * omega(k) * (omega(k) * tau).cos())
            .sum()
    }

    /// Exact sine coefficients `⟨u, V_ℓ⟩` for `ℓ = 0..len`.
    pub fn eigen_coeffs(&self, len: usize) -> Vec<f64> {
        let mut c = vec![0.0; len];
        for &(k, a) in &self.terms {
            if k < len {
                c[k] += a;
            }
        }
        c
    }

    /// Cosine coefficients `⟨u' + μu, W_ℓ⟩` of the forcing for which this
    /// combination solves `u' + μu = f`, `u(0) = 0`, on the unit interval.
    pub fn forcing_cosine_coeffs(&self, reaction: f64, len: usize) -> Vec<f64> {
        let mut c = vec![0.0; len];
        for &(k, a) in &self.terms {
            if k < len {
                c[k] += a * omega(k);
            }
            for (l, cl) in c.iter_mut().enumerate() {
                *cl += reaction * a * sine_cosine_pairing(k, l);
            }
        }
        c
    }

    /// Squared `L²(0,1)` norm (the sine eigenfunctions are orthonormal).
    pub fn l2_norm_sq(&self) -> f64 {
        self.terms.iter().map(|&(_, a)| a * a).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logkernel::kminus1_pairing;
    use crate::piecewise::PiecewisePoly;
    use crate::quad::GaussRule;
    use approx::assert_abs_diff_eq;

    fn composite_integral<F: Fn(f64) -> f64>(f: F, cells: usize) -> f64 {
        let rule = GaussRule::new(8);
        let mut acc = 0.0;
        for c in 0..cells {
            let a = c as f64 / cells as f64;
            let b = (c + 1) as f64 / cells as f64;
            acc += rule.integrate(a, b, &f);
        }
        acc
    }

    fn model_solution() -> SineCombination {
        // u(τ) = −2 sin(ω₁τ) + sin(ω₄τ) in normalized form.
        SineCombination {
            terms: vec![(1, -SQRT_2), (4, 0.5 * SQRT_2)],
        }
    }

    #[test]
    fn pairing_closed_form_matches_quadrature() {
        for (k, l) in [(0usize, 0usize), (1, 4), (4, 1), (3, 3), (2, 7), (6, 2)] {
            let direct = composite_integral(
                |t| 2.0 * (omega(k) * t).sin() * (omega(l) * t).cos(),
                64,
            );
            assert_abs_diff_eq!(sine_cosine_pairing(k, l), direct, epsilon = 1e-13);
        }
    }

    #[test]
    fn forcing_coefficients_match_fitted_transform() {
        let u = model_solution();
        let reaction = 20.0;
        let len = 200;
        let closed = u.forcing_cosine_coeffs(reaction, len);
        let fit = SmoothFit::new(
            |t| u.eval_derivative(t) + reaction * u.eval(t),
            0.0,
            1.0,
            64,
        );
        let fitted = cosine_load_series(&fit, len);
        for l in 0..len {
            assert_abs_diff_eq!(closed[l], fitted[l], epsilon = 1e-10);
        }
    }

    #[test]
    fn combination_norm_is_parseval_sum() {
        let u = model_solution();
        let direct = composite_integral(|t| u.eval(t) * u.eval(t), 64);
        assert_abs_diff_eq!(u.l2_norm_sq(), direct, epsilon = 1e-13);
        assert_abs_diff_eq!(u.l2_norm_sq(), 2.5, epsilon = 1e-13);
    }

    #[test]
    fn eigen_coefficients_reconstruct_the_function() {
        let u = model_solution();
        let c = u.eigen_coeffs(8);
        for i in 0..=20 {
            let tau = i as f64 / 20.0;
            let series: f64 = c
                .iter()
                .enumerate()
                .map(|(l, &cl)| cl * SQRT_2 * (omega(l) * tau).sin())
                .sum();
            assert_abs_diff_eq!(series, u.eval(tau), epsilon = 1e-13);
        }
    }

    /// Dual-route check of the load vector: the eigen-series accumulation
    /// against direct singular quadrature `∬ f(t) ψ'(s) K₋₁(s,t) ds dt`.
    #[test]
    fn series_load_matches_singular_quadrature() {
        let u = model_solution();
        let reaction = 20.0;
        let basis = MultiscaleBasis::new(2, 3).unwrap();
        let series = assemble_load(&basis, &u.forcing_cosine_coeffs(reaction, 10_000));

        let cells = 512;
        let breaks: Vec<f64> = (0..=cells).map(|i| i as f64 / cells as f64).collect();
        let forcing = PiecewisePoly::fit_from_samples(&breaks, |t| {
            u.eval_derivative(t) + reaction * u.eval(t)
        });
        for i in 0..basis.len() {
            let direct = kminus1_pairing(&forcing, &basis.deriv_profile(i));
            assert_abs_diff_eq!(series[i], direct, epsilon = 2e-5);
        }
    }
}
