//! Piecewise-polynomial calculus on dyadic break sets.
//!
//! The temporal basis functions are continuous piecewise linears and their
//! derivatives are piecewise constants.  Pairings against the nonlocal
//! kernel `K₋₁(s,t) = −(1/π)[ln tan(π(s+t)/4) + ln tan(π|t−s|/4)]` reduce
//! to 1-D integrals of *correlation* and *convolution* weights,
//!
//! ```text
//!   ∬ a(t) b(s) k(t−s) ds dt = ∫ k(u) R(u) du,   R(u) = ∫ a(t) b(t−u) dt,
//!   ∬ a(t) b(s) k(s+t) ds dt = ∫ k(v) S(v) dv,   S(v) = ∫ a(t) b(v−t) dt,
//! ```
//!
//! and for piecewise-polynomial `a, b` both weights are again piecewise
//! polynomials (degree ≤ deg a + deg b + 1) with breakpoints at the pairwise
//! differences/sums of the input breakpoints.  This module provides exact
//! construction of those weights.  Pieces are represented in local
//! coordinates (`x − left endpoint`) for numerical stability; since all
//! breakpoints in this crate are dyadic rationals, breakpoint arithmetic is
//! exact in `f64`.

/// Maximum polynomial degree per piece (cubic).
pub const MAX_DEG: usize = 3;

/// Fixed 3-point Gauss rule used for exact overlap integrals (degree ≤ 5).
const GL3_NODES: [f64; 3] = [-0.7745966692414834, 0.0, 0.7745966692414834];
const GL3_WEIGHTS: [f64; 3] = [
    0.5555555555555556,
    0.8888888888888888,
    0.5555555555555556,
];

/// Sample points (scaled to `[0,1]`) used when refitting a piece polynomial.
const FIT_NODES: [f64; 4] = [
    0.03806023374435663, // (1 − cos(π/8))/2
    0.30865828381745514, // (1 − cos(3π/8))/2
    0.6913417161825449,
    0.9619397662556434,
];

/// A continuous piecewise-linear function, zero outside its break range.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    /// Strictly increasing breakpoints.
    pub breaks: Vec<f64>,
    /// Nodal values at the breakpoints.
    pub values: Vec<f64>,
}

impl PiecewiseLinear {
    /// Build from breakpoints and nodal values.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(breaks.len(), values.len());
        assert!(breaks.len() >= 2, "need at least one piece");
        assert!(
            breaks.windows(2).all(|w| w[1] > w[0]),
            "breakpoints must increase strictly"
        );
        Self { breaks, values }
    }

    /// Evaluate at `x` (zero outside the break range).
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.breaks.len();
        if x < self.breaks[0] || x > self.breaks[n - 1] {
            return 0.0;
        }
        let i = piece_index(&self.breaks, x);
        let (a, b) = (self.breaks[i], self.breaks[i + 1]);
        let t = (x - a) / (b - a);
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// The function itself as a piecewise polynomial (degree 1 pieces).
    pub fn as_poly(&self) -> PiecewisePoly {
        let mut coeffs = Vec::with_capacity(self.breaks.len() - 1);
        for i in 0..self.breaks.len() - 1 {
            let len = self.breaks[i + 1] - self.breaks[i];
            let slope = (self.values[i + 1] - self.values[i]) / len;
            coeffs.push([self.values[i], slope, 0.0, 0.0]);
        }
        PiecewisePoly {
            breaks: self.breaks.clone(),
            coeffs,
        }
    }

    /// The weak derivative as a piecewise polynomial (degree 0 pieces).
    pub fn deriv_poly(&self) -> PiecewisePoly {
        let mut coeffs = Vec::with_capacity(self.breaks.len() - 1);
        for i in 0..self.breaks.len() - 1 {
            let len = self.breaks[i + 1] - self.breaks[i];
            let slope = (self.values[i + 1] - self.values[i]) / len;
            coeffs.push([slope, 0.0, 0.0, 0.0]);
        }
        PiecewisePoly {
            breaks: self.breaks.clone(),
            coeffs,
        }
    }
}

/// A piecewise polynomial of degree ≤ [`MAX_DEG`], zero outside its range.
///
/// Piece `i` lives on `[breaks[i], breaks[i+1]]` and is evaluated in the
/// local coordinate `τ = x − breaks[i]` as `Σ_m coeffs[i][m] τ^m`.
#[derive(Debug, Clone)]
pub struct PiecewisePoly {
    /// Strictly increasing breakpoints (`len = pieces + 1`).
    pub breaks: Vec<f64>,
    /// Local monomial coefficients per piece.
    pub coeffs: Vec<[f64; MAX_DEG + 1]>,
}

impl PiecewisePoly {
    /// Left end of the support.
    pub fn lo(&self) -> f64 {
        self.breaks[0]
    }

    /// Right end of the support.
    pub fn hi(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    /// Evaluate at `x` (zero outside the break range).
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo() || x > self.hi() {
            return 0.0;
        }
        let i = piece_index(&self.breaks, x);
        let t = x - self.breaks[i];
        let c = &self.coeffs[i];
        ((c[3] * t + c[2]) * t + c[1]) * t + c[0]
    }

    /// Translate the support by `delta` (local coefficients are unchanged).
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            breaks: self.breaks.iter().map(|b| b + delta).collect(),
            coeffs: self.coeffs.clone(),
        }
    }

    /// Multiply by a scalar.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            breaks: self.breaks.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| [c[0] * factor, c[1] * factor, c[2] * factor, c[3] * factor])
                .collect(),
        }
    }

    /// The reflection `x ↦ p(−x)`.
    pub fn reversed(&self) -> Self {
        let n = self.coeffs.len();
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut coeffs = Vec::with_capacity(n);
        for b in self.breaks.iter().rev() {
            breaks.push(-b);
        }
        for i in (0..n).rev() {
            // Piece on [b_i, b_{i+1}] with p(τ), τ = x − b_i, maps to the
            // piece on [−b_{i+1}, −b_i] with σ = x + b_{i+1}; then
            // τ = (b_{i+1} − b_i) − σ, so expand p(L − σ).
            let len = self.breaks[i + 1] - self.breaks[i];
            coeffs.push(compose_affine(&self.coeffs[i], len, -1.0));
        }
        Self { breaks, coeffs }
    }

    /// The even folding `q(u) = p(u) + p(−u)` for `u ≥ 0`.
    ///
    /// Used to collapse the two half-lines of the `|t−s|` kernel variable.
    pub fn fold_abs(&self) -> Self {
        let rev = self.reversed();
        let hi = self.hi().max(rev.hi());
        assert!(hi > 0.0, "folded support must reach past the origin");
        let mut pts: Vec<f64> = Vec::with_capacity(2 * self.breaks.len() + 1);
        pts.push(0.0);
        for &b in self.breaks.iter().chain(rev.breaks.iter()) {
            if b > 0.0 {
                pts.push(b);
            }
        }
        sort_dedup(&mut pts);
        let eval = |u: f64| self.eval(u) + rev.eval(u);
        Self::fit_from_samples(&pts, eval)
    }

    /// Exact integral over the whole support.
    pub fn integral(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.coeffs.len() {
            let len = self.breaks[i + 1] - self.breaks[i];
            let c = &self.coeffs[i];
            let mut lp = len;
            for (m, &cm) in c.iter().enumerate() {
                acc += cm * lp / (m as f64 + 1.0);
                lp *= len;
            }
        }
        acc
    }

    /// Fit a piecewise polynomial on the given breakpoints by sampling
    /// `f` at four interior nodes per piece.
    ///
    /// Exact whenever `f` restricted to every piece is a polynomial of
    /// degree ≤ [`MAX_DEG`].
    pub fn fit_from_samples<F: Fn(f64) -> f64>(breaks: &[f64], f: F) -> Self {
        let vinv = fit_vandermonde_inverse();
        let mut coeffs = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = b - a;
            let samples = [
                f(a + FIT_NODES[0] * len),
                f(a + FIT_NODES[1] * len),
                f(a + FIT_NODES[2] * len),
                f(a + FIT_NODES[3] * len),
            ];
            // Solve for scaled-local coefficients, then undo the scaling.
            let mut c = [0.0; MAX_DEG + 1];
            let mut scale = 1.0;
            for m in 0..=MAX_DEG {
                let mut acc = 0.0;
                for s in 0..4 {
                    acc += vinv[m][s] * samples[s];
                }
                c[m] = acc / scale;
                scale *= len;
            }
            coeffs.push(c);
        }
        Self {
            breaks: breaks.to_vec(),
            coeffs,
        }
    }
}

/// Cross-correlation `R(u) = ∫ f(t) g(t − u) dt` of two piecewise
/// polynomials, itself piecewise polynomial with breakpoints at all
/// pairwise differences of the input breakpoints.
pub fn correlate(f: &PiecewisePoly, g: &PiecewisePoly) -> PiecewisePoly {
    let mut pts = Vec::with_capacity(f.breaks.len() * g.breaks.len());
    for &bf in &f.breaks {
        for &bg in &g.breaks {
            pts.push(bf - bg);
        }
    }
    sort_dedup(&mut pts);
    PiecewisePoly::fit_from_samples(&pts, |u| overlap_integral(f, g, u))
}

/// Convolution-type weight `S(v) = ∫ f(t) g(v − t) dt`.
pub fn convolve(f: &PiecewisePoly, g: &PiecewisePoly) -> PiecewisePoly {
    correlate(f, &g.reversed())
}

/// Exact overlap integral `∫ f(t) g(t − u) dt` for a fixed shift `u`.
fn overlap_integral(f: &PiecewisePoly, g: &PiecewisePoly, u: f64) -> f64 {
    let lo = f.lo().max(g.lo() + u);
    let hi = f.hi().min(g.hi() + u);
    if hi <= lo {
        return 0.0;
    }
    let mut pts: Vec<f64> = Vec::with_capacity(f.breaks.len() + g.breaks.len() + 2);
    pts.push(lo);
    pts.push(hi);
    for &b in &f.breaks {
        if b > lo && b < hi {
            pts.push(b);
        }
    }
    for &b in &g.breaks {
        let s = b + u;
        if s > lo && s < hi {
            pts.push(s);
        }
    }
    sort_dedup(&mut pts);
    let mut acc = 0.0;
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let half = 0.5 * (w[1] - w[0]);
        if half <= 0.0 {
            continue;
        }
        for k in 0..3 {
            let x = mid + half * GL3_NODES[k];
            acc += half * GL3_WEIGHTS[k] * f.eval(x) * g.eval(x - u);
        }
    }
    acc
}

/// Expand `p(a + b·σ)` in powers of `σ` for a cubic `p` given in powers of τ.
fn compose_affine(c: &[f64; MAX_DEG + 1], a: f64, b: f64) -> [f64; MAX_DEG + 1] {
    // Horner in τ = a + bσ, carrying polynomial coefficients in σ.
    let mut out = [0.0; MAX_DEG + 1];
    for &cm in c.iter().rev() {
        // out := out·(a + bσ) + cm
        let mut next = [0.0; MAX_DEG + 1];
        for m in 0..=MAX_DEG {
            next[m] += out[m] * a;
            if m + 1 <= MAX_DEG {
                next[m + 1] += out[m] * b;
            }
        }
        next[0] += cm;
        out = next;
    }
    out
}

fn piece_index(breaks: &[f64], x: f64) -> usize {
    // Largest i with breaks[i] <= x, clamped to a valid piece.
    match breaks.binary_search_by(|b| b.total_cmp(&x)) {
        Ok(i) => i.min(breaks.len() - 2),
        Err(i) => i.saturating_sub(1).min(breaks.len() - 2),
    }
}

fn sort_dedup(pts: &mut Vec<f64>) {
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| *a == *b);
}

/// Inverse of the 4×4 Vandermonde matrix at the fixed scaled fit nodes.
fn fit_vandermonde_inverse() -> &'static [[f64; 4]; 4] {
    use std::sync::OnceLock;
    static VINV: OnceLock<[[f64; 4]; 4]> = OnceLock::new();
    VINV.get_or_init(|| {
        // Build V[s][m] = node_s^m and invert by Gauss–Jordan.
        let mut aug = [[0.0f64; 8]; 4];
        for s in 0..4 {
            let mut p = 1.0;
            for m in 0..4 {
                aug[s][m] = p;
                p *= FIT_NODES[s];
            }
            aug[s][4 + s] = 1.0;
        }
        for col in 0..4 {
            let piv = (col..4)
                .max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs()))
                .unwrap();
            aug.swap(col, piv);
            let d = aug[col][col];
            for x in aug[col].iter_mut() {
                *x /= d;
            }
            for r in 0..4 {
                if r != col {
                    let f = aug[r][col];
                    for c in 0..8 {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
        // inv[m][s]: coefficient m from sample s — note the transpose.
        let mut inv = [[0.0f64; 4]; 4];
        for m in 0..4 {
            for s in 0..4 {
                inv[m][s] = aug[m][4 + s];
            }
        }
        inv
    })
}
