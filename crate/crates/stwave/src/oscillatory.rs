//! Filon-type quadrature for integrals of a smooth function against
//! `cos(ωτ)` and `sin(ωτ)` at many frequencies.
//!
//! The smooth factor is fitted once by piecewise polynomials (degree 8 on a
//! uniform panel grid, interpolated at Chebyshev points in the centered local
//! coordinate `ξ ∈ [−1, 1]`).  A moment request at frequency `ω` then reduces
//! per panel to the monomial moments `∫₋₁¹ ξᵐ cos/sin(θξ) dξ` with
//! `θ = ω·h/2`; these follow a stable upward recurrence when `θ` is large and
//! fall back to Gauss–Legendre when `θ` is small and the recurrence would
//! cancel.  Cost per frequency is `O(panels)`, independent of `ω`.

use std::sync::OnceLock;

use crate::quad::GaussRule;

/// Polynomial degree per panel.
const DEGREE: usize = 8;
/// Recurrence/Gauss switch point for `θ = ω·h/2`.
const THETA_SWITCH: f64 = 20.0;

fn gauss32() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(32))
}

/// Inverse of the interpolation matrix on the reference Chebyshev nodes,
/// mapping samples to local monomial coefficients.
fn vandermonde_inverse() -> &'static [[f64; DEGREE + 1]; DEGREE + 1] {
    static INV: OnceLock<[[f64; DEGREE + 1]; DEGREE + 1]> = OnceLock::new();
    INV.get_or_init(|| {
        let nodes = reference_nodes();
        let mut v = nalgebra::DMatrix::zeros(DEGREE + 1, DEGREE + 1);
        for (i, &x) in nodes.iter().enumerate() {
            let mut p = 1.0;
            for m in 0..=DEGREE {
                v[(i, m)] = p;
                p *= x;
            }
        }
        let inv = v.try_inverse().expect("interpolation matrix is regular");
        let mut out = [[0.0; DEGREE + 1]; DEGREE + 1];
        for m in 0..=DEGREE {
            for i in 0..=DEGREE {
                out[m][i] = inv[(m, i)];
            }
        }
        out
    })
}

/// Chebyshev points of the second kind on `[−1, 1]`, ascending.
fn reference_nodes() -> [f64; DEGREE + 1] {
    let mut nodes = [0.0; DEGREE + 1];
    for (i, node) in nodes.iter_mut().enumerate() {
        *node = -(std::f64::consts::PI * i as f64 / DEGREE as f64).cos();
    }
    nodes
}

/// Piecewise-polynomial surrogate of a smooth function on `[a, b]`.
#[derive(Debug, Clone)]
pub struct SmoothFit {
    a: f64,
    width: f64,
    /// Monomial coefficients per panel in the local coordinate `ξ ∈ [−1, 1]`.
    coeffs: Vec<[f64; DEGREE + 1]>,
}

impl SmoothFit {
    /// Interpolates `f` on `panels` uniform panels of `[a, b]`.
    pub fn new<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> Self {
        assert!(panels > 0 && b > a, "empty fitting range");
        let width = (b - a) / panels as f64;
        let nodes = reference_nodes();
        let inv = vandermonde_inverse();
        let mut coeffs = Vec::with_capacity(panels);
        let mut samples = [0.0; DEGREE + 1];
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            for (s, &x) in samples.iter_mut().zip(nodes.iter()) {
                *s = f(mid + 0.5 * width * x);
            }
            let mut c = [0.0; DEGREE + 1];
            for (m, cm) in c.iter_mut().enumerate() {
                *cm = inv[m].iter().zip(samples.iter()).map(|(v, s)| v * s).sum();
            }
            coeffs.push(c);
        }
        SmoothFit { a, width, coeffs }
    }

    /// Evaluates the surrogate.
    pub fn eval(&self, x: f64) -> f64 {
        let p = (((x - self.a) / self.width) as usize).min(self.coeffs.len() - 1);
        let xi = 2.0 * ((x - self.a) / self.width - p as f64) - 1.0;
        let c = &self.coeffs[p];
        let mut acc = 0.0;
        for &cm in c.iter().rev() {
            acc = acc * xi + cm;
        }
        acc
    }

    /// `∫ f(τ)·cos(ωτ) dτ` over the fitted range.
    pub fn cosine_integral(&self, omega: f64) -> f64 {
        self.oscillatory_integral(omega).0
    }

    /// `∫ f(τ)·sin(ωτ) dτ` over the fitted range.
    pub fn sine_integral(&self, omega: f64) -> f64 {
        self.oscillatory_integral(omega).1
    }

    /// Both trigonometric integrals at once.
    pub fn oscillatory_integral(&self, omega: f64) -> (f64, f64) {
        let h = self.width;
        let theta = 0.5 * omega * h;
        let (mc, ms) = if theta.abs() > THETA_SWITCH {
            monomial_moments(theta)
        } else {
            gauss_moments(theta)
        };
        let mut cos_total = 0.0;
        let mut sin_total = 0.0;
        for (p, c) in self.coeffs.iter().enumerate() {
            let mid = self.a + (p as f64 + 0.5) * h;
            // cos(ω(mid + (h/2)ξ)) = cos(ω·mid)cos(θξ) − sin(ω·mid)sin(θξ).
            let (sm, cm_mid) = (omega * mid).sin_cos();
            let mut mc_dot = 0.0;
            let mut ms_dot = 0.0;
            for m in 0..=DEGREE {
                mc_dot += c[m] * mc[m];
                ms_dot += c[m] * ms[m];
            }
            cos_total += 0.5 * h * (cm_mid * mc_dot - sm * ms_dot);
            sin_total += 0.5 * h * (sm * mc_dot + cm_mid * ms_dot);
        }
        (cos_total, sin_total)
    }
}

/// `∫₋₁¹ ξᵐ cos(θξ) dξ` and `∫₋₁¹ ξᵐ sin(θξ) dξ` by upward recurrence
/// (stable for `θ` beyond the polynomial degree).  By parity the cosine
/// moments vanish for odd `m` and the sine moments for even `m`.
fn monomial_moments(theta: f64) -> ([f64; DEGREE + 1], [f64; DEGREE + 1]) {
    let mut mc = [0.0; DEGREE + 1];
    let mut ms = [0.0; DEGREE + 1];
    let (s, c) = theta.sin_cos();
    mc[0] = 2.0 * s / theta;
    ms[0] = 0.0;
    for m in 1..=DEGREE {
        if m % 2 == 0 {
            mc[m] = (2.0 * s - m as f64 * ms[m - 1]) / theta;
            ms[m] = 0.0;
        } else {
            mc[m] = 0.0;
            ms[m] = (m as f64 * mc[m - 1] - 2.0 * c) / theta;
        }
    }
    (mc, ms)
}

fn gauss_moments(theta: f64) -> ([f64; DEGREE + 1], [f64; DEGREE + 1]) {
    let rule = gauss32();
    let mut mc = [0.0; DEGREE + 1];
    let mut ms = [0.0; DEGREE + 1];
    for (x, w) in rule.mapped(-1.0, 1.0) {
        let (s, c) = (theta * x).sin_cos();
        let mut p = 1.0;
        for m in 0..=DEGREE {
            mc[m] += w * p * c;
            ms[m] += w * p * s;
            p *= x;
        }
    }
    (mc, ms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::omega;
    use approx::assert_abs_diff_eq;

    #[test]
    fn surrogate_reproduces_the_function() {
        let fit = SmoothFit::new(|t: f64| t.cos() + 2.0 * t * t, 0.0, 1.0, 16);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert_abs_diff_eq!(fit.eval(x), x.cos() + 2.0 * x * x, epsilon = 1e-13);
        }
    }

    #[test]
    fn polynomial_against_moderate_frequency_is_exact() {
        // ∫₀¹ τ² cos(ωτ) dτ has the closed form below.
        let fit = SmoothFit::new(|t: f64| t * t, 0.0, 1.0, 8);
        for om in [3.0f64, 17.5, 240.0] {
            let exact = ((om * om - 2.0) * om.sin() + 2.0 * om * om.cos()) / (om * om * om);
            assert_abs_diff_eq!(fit.cosine_integral(om), exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn constant_against_eigenfrequencies() {
        let fit = SmoothFit::new(|_| 1.0, 0.0, 1.0, 64);
        for ell in [0usize, 5, 100, 4000] {
            let om = omega(ell);
            assert_abs_diff_eq!(fit.cosine_integral(om), om.sin() / om, epsilon = 1e-12);
            assert_abs_diff_eq!(fit.sine_integral(om), (1.0 - om.cos()) / om, epsilon = 1e-12);
        }
    }

    #[test]
    fn recurrence_and_gauss_agree_at_the_switch_point() {
        for theta in [19.0, 21.0] {
            let (rc, rs) = monomial_moments(theta);
            let (gc, gs) = gauss_moments(theta);
            for m in 0..=DEGREE {
                assert_abs_diff_eq!(rc[m], gc[m], epsilon = 1e-13);
                assert_abs_diff_eq!(rs[m], gs[m], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn smooth_integrand_matches_closed_form_at_high_frequency() {
        // f = e^t against a frequency that is large for the panel width.
        let fit = SmoothFit::new(|t: f64| t.exp(), 0.0, 1.0, 64);
        let om = 5000.0f64;
        // Closed form: ∫ e^t cos(ωt) = [e^t(cos ωt + ω sin ωt)]/(1+ω²).
        let e = 1f64.exp();
        let exact_cos = (e * (om.cos() + om * om.sin()) - 1.0) / (1.0 + om * om);
        let exact_sin = (e * (om.sin() - om * om.cos()) + om) / (1.0 + om * om);
        assert_abs_diff_eq!(fit.cosine_integral(om), exact_cos, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.sine_integral(om), exact_sin, epsilon = 1e-12);
    }

    #[test]
    fn subrange_fit_uses_its_own_interval() {
        let fit = SmoothFit::new(|t: f64| t, 0.25, 0.75, 8);
        // ∫ t cos(ωt) dt = [cos(ωt)/ω² + t sin(ωt)/ω].
        let om = 40.0;
        let anti = |t: f64| (om * t).cos() / (om * om) + t * (om * t).sin() / om;
        assert_abs_diff_eq!(fit.cosine_integral(om), anti(0.75) - anti(0.25), epsilon = 1e-13);
    }
}
