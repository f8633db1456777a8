//! Integration against the logarithmic kernel `g(u) = ln tan(πu/4)`.
//!
//! The first-order kernel of the modified Hilbert transform splits into
//! functions of the difference and sum variables,
//!
//! ```text
//!   K₋₁(s,t) = −(1/π) [ g(s+t) + g(|t−s|) ],     g(u) = ln tan(πu/4),
//! ```
//!
//! so after the correlation/convolution reduction of [`crate::piecewise`]
//! everything boils down to `∫ p(u) g(u) du` for piecewise polynomials `p`
//! supported in `[0, 2]`.  `g` is analytic inside `(0, 2)` and has
//! integrable logarithmic singularities at both ends; pieces touching an
//! endpoint are integrated by splitting `g` into `±ln(distance)` — whose
//! moments have closed forms — plus an analytic remainder, and interior
//! pieces use Gauss–Legendre with bisection until the piece length is
//! comparable to its distance from the singular points.

use crate::piecewise::{convolve, correlate, PiecewisePoly, MAX_DEG};
use crate::quad::GaussRule;
use std::sync::OnceLock;

/// The kernel `g(u) = ln tan(πu/4)` for `u ∈ (0, 2)`.
pub fn log_tan_kernel(u: f64) -> f64 {
    (std::f64::consts::FRAC_PI_4 * u).tan().ln()
}

/// `ln(tan(x)/x)` evaluated stably down to `x → 0` (limit 0).
fn ln_tan_over_arg(x: f64) -> f64 {
    if x < 1e-6 {
        // tan x / x = 1 + x²/3 + 2x⁴/15 + …
        let x2 = x * x;
        (x2 / 3.0 + 2.0 * x2 * x2 / 15.0).ln_1p()
    } else {
        (x.tan() / x).ln()
    }
}

fn gl16() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(16))
}

/// `∫ p(u) g(u) du` over the support of `p`, which must lie in `[0, 2]`.
pub fn integrate_against_log_tan(p: &PiecewisePoly) -> f64 {
    debug_assert!(p.lo() >= -1e-14 && p.hi() <= 2.0 + 1e-14, "support must be in [0,2]");
    let mut acc = 0.0;
    for i in 0..p.coeffs.len() {
        let (a, b) = (p.breaks[i], p.breaks[i + 1]);
        if b - a <= 0.0 {
            continue;
        }
        acc += integrate_piece(&p.coeffs[i], a, b);
    }
    acc
}

/// Integrate one polynomial piece (local coefficients at `a`) against `g`.
fn integrate_piece(c: &[f64; MAX_DEG + 1], a: f64, b: f64) -> f64 {
    // A piece may touch at most one singular endpoint per branch below, and
    // the analytic remainders used there degrade as the piece approaches the
    // opposite endpoint; long boundary pieces are split at the midpoint of
    // the kernel's range first.
    if (a == 0.0 || b == 2.0) && b - a > 1.0 {
        let c_right = shift_local(c, 1.0 - a);
        return integrate_piece(c, a, 1.0) + integrate_piece(&c_right, 1.0, b);
    }
    let len = b - a;
    if a == 0.0 {
        // g(τ) = ln τ + ln(tan(πτ/4)/τ) + 0 with the second part analytic.
        let closed = moments_against_ln(c, len);
        let smooth = gl16().integrate(0.0, len, |tau| {
            eval_local(c, tau)
                * (ln_tan_over_arg(std::f64::consts::FRAC_PI_4 * tau)
                    + std::f64::consts::FRAC_PI_4.ln())
        });
        closed + smooth
    } else if b == 2.0 {
        // Mirror: with w = 2 − u, g(u) = −ln tan(πw/4) = −ln w − analytic(w).
        // The piece polynomial in w is p(len − w).
        let cw = compose_flip(c, len);
        let closed = -moments_against_ln(&cw, len);
        let smooth = -gl16().integrate(0.0, len, |w| {
            eval_local(&cw, w)
                * (ln_tan_over_arg(std::f64::consts::FRAC_PI_4 * w)
                    + std::f64::consts::FRAC_PI_4.ln())
        });
        closed + smooth
    } else {
        integrate_smooth(c, a, a, b)
    }
}

/// Gauss–Legendre on `[x0, x1] ⊂ (0,2)`, bisecting while the interval is
/// long relative to its distance from the singular endpoints 0 and 2.
fn integrate_smooth(c: &[f64; MAX_DEG + 1], piece_start: f64, x0: f64, x1: f64) -> f64 {
    let nearest = x0.min(2.0 - x1);
    if x1 - x0 <= 0.9 * nearest || x1 - x0 < 1e-15 {
        gl16().integrate(x0, x1, |u| eval_local(c, u - piece_start) * log_tan_kernel(u))
    } else {
        let mid = 0.5 * (x0 + x1);
        integrate_smooth(c, piece_start, x0, mid) + integrate_smooth(c, piece_start, mid, x1)
    }
}

/// Closed form `Σ_m c_m ∫_0^len τ^m ln τ dτ`.
fn moments_against_ln(c: &[f64; MAX_DEG + 1], len: f64) -> f64 {
    let ln_len = len.ln();
    let mut acc = 0.0;
    for (m, &cm) in c.iter().enumerate() {
        let m1 = m as f64 + 1.0;
        let pow = len.powi(m as i32 + 1);
        acc += cm * pow * (ln_len / m1 - 1.0 / (m1 * m1));
    }
    acc
}

/// Expand `p(len − w)` in powers of `w` from local coefficients of `p`.
fn compose_flip(c: &[f64; MAX_DEG + 1], len: f64) -> [f64; MAX_DEG + 1] {
    // Horner in τ = len − w.
    let mut out = [0.0; MAX_DEG + 1];
    for &cm in c.iter().rev() {
        let mut next = [0.0; MAX_DEG + 1];
        for m in 0..=MAX_DEG {
            next[m] += out[m] * len;
            if m + 1 <= MAX_DEG {
                next[m + 1] -= out[m];
            }
        }
        next[0] += cm;
        out = next;
    }
    out
}

fn eval_local(c: &[f64; MAX_DEG + 1], tau: f64) -> f64 {
    ((c[3] * tau + c[2]) * tau + c[1]) * tau + c[0]
}

/// Re-expand local coefficients about a point `d` to the right: `q(τ) = p(τ + d)`.
fn shift_local(c: &[f64; MAX_DEG + 1], d: f64) -> [f64; MAX_DEG + 1] {
    [
        ((c[3] * d + c[2]) * d + c[1]) * d + c[0],
        (3.0 * c[3] * d + 2.0 * c[2]) * d + c[1],
        3.0 * c[3] * d + c[2],
        c[3],
    ]
}

/// `∬ a(t) b(s) K₋₁(s,t) ds dt` for piecewise polynomials `a`, `b`
/// supported in `[0, 1]`.
///
/// `K₋₁` is symmetric, so the pairing is symmetric in `(a, b)`.  When the
/// factors live on very different mesh sizes the coarser one is processed
/// piece by piece, which keeps the breakpoint count of the correlation
/// weights proportional to the finer factor only.
pub fn kminus1_pairing(a: &PiecewisePoly, b: &PiecewisePoly) -> f64 {
    let la = min_piece_len(a);
    let lb = min_piece_len(b);
    if la > 4.0 * lb {
        // Loop over the coarser factor's pieces.
        let mut acc = 0.0;
        for i in 0..a.coeffs.len() {
            let piece = PiecewisePoly {
                breaks: vec![a.breaks[i], a.breaks[i + 1]],
                coeffs: vec![a.coeffs[i]],
            };
            acc += kminus1_pairing_core(&piece, b);
        }
        acc
    } else if lb > 4.0 * la {
        kminus1_pairing(b, a)
    } else {
        kminus1_pairing_core(a, b)
    }
}

fn kminus1_pairing_core(a: &PiecewisePoly, b: &PiecewisePoly) -> f64 {
    let diff_weight = correlate(a, b).fold_abs();
    let sum_weight = convolve(a, b);
    -(integrate_against_log_tan(&diff_weight) + integrate_against_log_tan(&sum_weight))
        / std::f64::consts::PI
}

fn min_piece_len(p: &PiecewisePoly) -> f64 {
    p.breaks
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}
