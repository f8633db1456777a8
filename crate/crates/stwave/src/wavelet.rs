//! Biorthogonal spline wavelets on `(0, 1]` with boundary adaptation.
//!
//! The primal functions are continuous piecewise linears (order `d = 2`)
//! on dyadic meshes, vanishing at `t = 0` and free at `t = 1`.  Two dual
//! orders are provided: `d̃ = 2` and `d̃ = 4`, giving wavelets with two
//! respectively four vanishing moments away from `t = 1`.  Each wavelet is
//! a fixed, level-independent linear combination of fine-level hats; near
//! the two boundaries modified combinations keep the moment conditions and
//! the complement property.
//!
//! A multiscale basis on level `J` consists of the `2^{j₀}` scaling hats of
//! the coarsest level `j₀` followed by the detail blocks of levels
//! `j₀+1, …, J` (sizes `2^{j−1}`), all normalized in `L²`.  The change of
//! basis to fine-level hats (synthesis) and its inverse (forward/analysis)
//! are applied level by level; the analysis step solves one banded system
//! per level, factored once and cached.
//!
//! All stencil weights are exact rationals; the tests reproduce the
//! vanishing moments in exact arithmetic.

use crate::banded::{BandedLu, BandedMatrix};
use crate::error::{Error, Result};
use crate::mesh::{hat_deriv_profile, hat_profile, mesh_size};
use crate::piecewise::{PiecewiseLinear, PiecewisePoly};

/// One wavelet as weights on consecutive fine-level hats.
struct RationalStencil {
    num: &'static [i64],
    den: &'static [i64],
}

impl RationalStencil {
    fn weights(&self) -> Vec<f64> {
        self.num
            .iter()
            .zip(self.den)
            .map(|(&n, &d)| n as f64 / d as f64)
            .collect()
    }
}

/// Stencil tables of one dual order.
pub struct WaveletFamily {
    /// Number of vanishing moments `d̃` of the interior wavelets.
    pub dual_order: u32,
    /// Coarsest admissible scaling level `j₀`.
    pub coarsest_level: u32,
    left: &'static [RationalStencil],
    stationary: RationalStencil,
    /// Hat offset of the first stationary weight relative to `2k`.
    stationary_offset: i64,
    right: &'static [RationalStencil],
}

static FAMILY_D2: WaveletFamily = WaveletFamily {
    dual_order: 2,
    coarsest_level: 2,
    left: &[RationalStencil {
        num: &[5, -3, -1, 1, 1],
        den: &[8, 4, 4, 4, 8],
    }],
    stationary: RationalStencil {
        num: &[-1, -1, 3, -1, -1],
        den: &[8, 4, 4, 4, 8],
    },
    stationary_offset: -3,
    right: &[RationalStencil {
        num: &[-1, -1, 9, -3],
        den: &[16, 8, 16, 4],
    }],
};

static FAMILY_D4: WaveletFamily = WaveletFamily {
    dual_order: 4,
    coarsest_level: 3,
    left: &[
        RationalStencil {
            num: &[63, -65, -1, 57, 13, -31, -3, 7, 7],
            den: &[128, 64, 16, 64, 64, 64, 16, 64, 128],
        },
        RationalStencil {
            num: &[-7, -7, 21, -37, -11, 15, 3, -3, -3],
            den: &[128, 64, 32, 64, 64, 64, 32, 64, 128],
        },
    ],
    stationary: RationalStencil {
        num: &[3, 3, -1, -19, 45, -19, -1, 3, 3],
        den: &[128, 64, 8, 64, 64, 64, 8, 64, 128],
    },
    stationary_offset: -5,
    right: &[
        RationalStencil {
            num: &[9, 9, -53, -31, 345, -105, -45, 15],
            den: &[512, 256, 512, 128, 512, 256, 512, 64],
        },
        RationalStencil {
            num: &[-5, -5, 67, 41, -53, -241, 875, -35],
            den: &[512, 256, 1536, 384, 512, 768, 1536, 64],
        },
    ],
};

/// Stencil table for dual order `2` or `4`.
pub fn family(dual_order: u32) -> Result<&'static WaveletFamily> {
    match dual_order {
        2 => Ok(&FAMILY_D2),
        4 => Ok(&FAMILY_D4),
        _ => Err(Error::Parameter {
            name: "dual_order",
            value: dual_order as f64,
            reason: "supported dual orders are 2 and 4".into(),
        }),
    }
}

impl WaveletFamily {
    /// Number of wavelets at level `j > coarsest_level`.
    pub fn wavelets_at(&self, j: u32) -> usize {
        1usize << (j - 1)
    }

    /// Hat indices (1-based, level `j`) and weights of wavelet `k`
    /// (`1 ≤ k ≤ 2^{j−1}`), unnormalized.
    pub fn hat_expansion(&self, j: u32, k: usize) -> Vec<(usize, f64)> {
        let half = self.wavelets_at(j);
        let n = 1usize << j;
        assert!(k >= 1 && k <= half, "wavelet index {k} out of 1..={half}");
        assert!(j > self.coarsest_level, "stencils do not fit below level {}", self.coarsest_level + 1);
        let nl = self.left.len();
        let nr = self.right.len();
        let (first, stencil): (i64, &RationalStencil) = if k <= nl {
            (1, &self.left[k - 1])
        } else if k > half - nr {
            let s = &self.right[k - (half - nr) - 1];
            (n as i64 - s.num.len() as i64 + 1, s)
        } else {
            (2 * k as i64 + self.stationary_offset, &self.stationary)
        };
        stencil
            .weights()
            .into_iter()
            .enumerate()
            .map(|(i, w)| ((first + i as i64) as usize, w))
            .collect()
    }
}

/// Position of a multiscale index: the coarse scaling block or a detail
/// level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisFunction {
    /// Scaling hat `k` (1-based) on the coarsest level.
    Scaling { k: usize },
    /// Wavelet `k` (1-based) on detail level `j`.
    Wavelet { j: u32, k: usize },
}

/// Block structure of a multiscale basis: scaling block first, then one
/// detail block per level.
#[derive(Clone, Copy, Debug)]
pub struct Block {
    /// `coarsest_level` for the scaling block, otherwise the detail level.
    pub level: u32,
    pub offset: usize,
    pub size: usize,
    pub is_scaling: bool,
}

/// An `L²`-normalized multiscale basis on dyadic level `max_level`.
pub struct MultiscaleBasis {
    pub family: &'static WaveletFamily,
    pub max_level: u32,
    /// `L²` norms of the unnormalized functions, indexed like the basis.
    norms: Vec<f64>,
    /// Banded factorizations of the interleaved two-scale matrices,
    /// one per level `j₀+1..=max_level`.
    level_lus: Vec<BandedLu>,
}

impl MultiscaleBasis {
    pub fn new(dual_order: u32, max_level: u32) -> Result<Self> {
        let family = family(dual_order)?;
        if max_level < family.coarsest_level {
            return Err(Error::Level {
                requested: max_level as usize,
                reason: format!(
                    "multiscale basis needs max_level ≥ {}",
                    family.coarsest_level
                ),
            });
        }
        let mut basis = MultiscaleBasis {
            family,
            max_level,
            norms: Vec::new(),
            level_lus: Vec::new(),
        };
        basis.norms = basis.compute_norms();
        basis.level_lus = basis.factor_levels()?;
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        1usize << self.max_level
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coarsest_level(&self) -> u32 {
        self.family.coarsest_level
    }

    /// Blocks in storage order: scaling block, then levels `j₀+1..=J`.
    pub fn blocks(&self) -> Vec<Block> {
        let j0 = self.family.coarsest_level;
        let mut out = vec![Block {
            level: j0,
            offset: 0,
            size: 1 << j0,
            is_scaling: true,
        }];
        let mut offset = 1usize << j0;
        for j in j0 + 1..=self.max_level {
            let size = self.family.wavelets_at(j);
            out.push(Block {
                level: j,
                offset,
                size,
                is_scaling: false,
            });
            offset += size;
        }
        out
    }

    /// Identify a flat index.
    pub fn classify(&self, flat: usize) -> BasisFunction {
        let j0 = self.family.coarsest_level;
        let scaling = 1usize << j0;
        if flat < scaling {
            return BasisFunction::Scaling { k: flat + 1 };
        }
        let mut offset = scaling;
        for j in j0 + 1..=self.max_level {
            let size = self.family.wavelets_at(j);
            if flat < offset + size {
                return BasisFunction::Wavelet {
                    j,
                    k: flat - offset + 1,
                };
            }
            offset += size;
        }
        panic!("flat index {flat} out of range");
    }

    /// `L²` norm of the unnormalized basis function.
    pub fn raw_norm(&self, flat: usize) -> f64 {
        self.norms[flat]
    }

    /// Support interval of the (normalized) basis function.
    pub fn support(&self, flat: usize) -> (f64, f64) {
        match self.classify(flat) {
            BasisFunction::Scaling { k } => {
                let j0 = self.family.coarsest_level;
                let h = mesh_size(j0);
                let n = 1usize << j0;
                let lo = (k as f64 - 1.0) * h;
                let hi = if k == n { 1.0 } else { (k as f64 + 1.0) * h };
                (lo, hi)
            }
            BasisFunction::Wavelet { j, k } => {
                let h = mesh_size(j);
                let n = 1usize << j;
                let nodes = self.family.hat_expansion(j, k);
                let first = nodes.first().unwrap().0;
                let last = nodes.last().unwrap().0;
                let lo = (first as f64 - 1.0) * h;
                let hi = if last == n { 1.0 } else { (last as f64 + 1.0) * h };
                (lo, hi)
            }
        }
    }

    /// Mesh nodes inside the support — the singular support (kink set) of
    /// the piecewise linear basis function.
    pub fn singular_nodes(&self, flat: usize) -> Vec<f64> {
        let (level, lo, hi) = match self.classify(flat) {
            BasisFunction::Scaling { .. } => {
                let (lo, hi) = self.support(flat);
                (self.family.coarsest_level, lo, hi)
            }
            BasisFunction::Wavelet { j, .. } => {
                let (lo, hi) = self.support(flat);
                (j, lo, hi)
            }
        };
        let h = mesh_size(level);
        let first = (lo / h).round() as usize;
        let last = (hi / h).round() as usize;
        (first..=last).map(|i| i as f64 * h).collect()
    }

    /// The normalized basis function as a piecewise polynomial.
    pub fn profile(&self, flat: usize) -> PiecewisePoly {
        self.assemble_profile(flat, false)
    }

    /// Derivative of the normalized basis function.
    pub fn deriv_profile(&self, flat: usize) -> PiecewisePoly {
        self.assemble_profile(flat, true)
    }

    fn assemble_profile(&self, flat: usize, deriv: bool) -> PiecewisePoly {
        let scale = 1.0 / self.norms[flat];
        match self.classify(flat) {
            BasisFunction::Scaling { k } => {
                let j0 = self.family.coarsest_level;
                let p = if deriv {
                    hat_deriv_profile(j0, k)
                } else {
                    hat_profile(j0, k)
                };
                p.scaled(scale)
            }
            BasisFunction::Wavelet { j, k } => {
                let h = mesh_size(j);
                let n = 1usize << j;
                let nodes = self.family.hat_expansion(j, k);
                let first = nodes.first().unwrap().0;
                let last = nodes.last().unwrap().0;
                // Piecewise linear through the nodal values; a hat has value
                // 1 at its own node and 0 at every other node.
                let lo = first - 1;
                let hi = if last == n { n } else { last + 1 };
                let breaks: Vec<f64> = (lo..=hi).map(|i| i as f64 * h).collect();
                let mut values = vec![0.0; hi - lo + 1];
                for &(node, w) in &nodes {
                    values[node - lo] = w * scale;
                }
                let pl = PiecewiseLinear::new(breaks, values);
                if deriv {
                    pl.deriv_poly()
                } else {
                    pl.as_poly()
                }
            }
        }
    }

    /// Synthesis: multiscale coefficients → hat coefficients on `max_level`.
    pub fn synthesis(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.len());
        let j0 = self.family.coarsest_level;
        // Undo the L² normalization, coarse block first.
        let mut current: Vec<f64> = coeffs[..1 << j0]
            .iter()
            .zip(&self.norms[..1 << j0])
            .map(|(c, norm)| c / norm)
            .collect();
        let mut offset = 1usize << j0;
        for j in j0 + 1..=self.max_level {
            let size = self.family.wavelets_at(j);
            let mut fine = refine_hats(j, &current);
            for k in 1..=size {
                let w = coeffs[offset + k - 1] / self.norms[offset + k - 1];
                if w != 0.0 {
                    for (node, weight) in self.family.hat_expansion(j, k) {
                        fine[node - 1] += w * weight;
                    }
                }
            }
            current = fine;
            offset += size;
        }
        current
    }

    /// Adjoint of [`Self::synthesis`]: maps hat-basis functionals (e.g.
    /// load vectors) to multiscale functionals.
    pub fn synthesis_adjoint(&self, hat: &[f64]) -> Vec<f64> {
        assert_eq!(hat.len(), self.len());
        let j0 = self.family.coarsest_level;
        let mut out = vec![0.0; self.len()];
        let mut current = hat.to_vec();
        let mut offset = self.len();
        for j in (j0 + 1..=self.max_level).rev() {
            let size = self.family.wavelets_at(j);
            offset -= size;
            for k in 1..=size {
                let mut acc = 0.0;
                for (node, weight) in self.family.hat_expansion(j, k) {
                    acc += weight * current[node - 1];
                }
                out[offset + k - 1] = acc;
            }
            current = refine_hats_adjoint(j, &current);
        }
        out[..1 << j0].copy_from_slice(&current);
        for (o, norm) in out.iter_mut().zip(&self.norms) {
            *o /= norm;
        }
        out
    }

    /// Forward transform: hat coefficients on `max_level` → multiscale
    /// coefficients.  Inverse of [`Self::synthesis`].
    pub fn forward(&self, hat: &[f64]) -> Vec<f64> {
        assert_eq!(hat.len(), self.len());
        let j0 = self.family.coarsest_level;
        let mut out = vec![0.0; self.len()];
        let mut current = hat.to_vec();
        let mut offset = self.len();
        for j in (j0 + 1..=self.max_level).rev() {
            let size = self.family.wavelets_at(j);
            offset -= size;
            // Solve [R_φ | R_ψ] (c, w) = current with interleaved columns.
            let lu = &self.level_lus[(j - j0 - 1) as usize];
            lu.solve_in_place(&mut current);
            let mut coarse = vec![0.0; size];
            for k in 1..=size {
                coarse[k - 1] = current[2 * k - 2];
                out[offset + k - 1] = current[2 * k - 1];
            }
            current = coarse;
        }
        out[..1 << j0].copy_from_slice(&current);
        for (o, norm) in out.iter_mut().zip(&self.norms) {
            *o *= norm;
        }
        out
    }

    /// Conjugate a dense single-scale matrix into the multiscale basis:
    /// `Syn ᵀ · dense · Syn`.
    pub fn conjugate(&self, dense: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
        let n = self.len();
        assert_eq!(dense.nrows(), n);
        assert_eq!(dense.ncols(), n);
        // Left factor: apply the synthesis adjoint to every column.
        let mut left = nalgebra::DMatrix::zeros(n, n);
        for c in 0..n {
            let col = self.synthesis_adjoint(dense.column(c).as_slice());
            left.column_mut(c).copy_from_slice(&col);
        }
        // Right factor: rows of `left` against the synthesis, i.e. the
        // adjoint applied to columns of the transpose.
        let lt = left.transpose();
        let mut out = nalgebra::DMatrix::zeros(n, n);
        for c in 0..n {
            let col = self.synthesis_adjoint(lt.column(c).as_slice());
            out.column_mut(c).copy_from_slice(&col);
        }
        out.transpose()
    }

    fn compute_norms(&self) -> Vec<f64> {
        let j0 = self.family.coarsest_level;
        let mut norms = Vec::with_capacity(self.len());
        for k in 1..=1usize << j0 {
            norms.push(hat_norm(j0, k));
        }
        for j in j0 + 1..=self.max_level {
            for k in 1..=self.family.wavelets_at(j) {
                norms.push(self.wavelet_norm(j, k));
            }
        }
        norms
    }

    fn wavelet_norm(&self, j: u32, k: usize) -> f64 {
        // ‖Σ w_i φ_i‖² through the exact tridiagonal hat Gram matrix.
        let h = mesh_size(j);
        let n = 1usize << j;
        let nodes = self.family.hat_expansion(j, k);
        let mut acc = 0.0;
        for &(a, wa) in &nodes {
            for &(b, wb) in &nodes {
                let g = if a == b {
                    if a == n {
                        h / 3.0
                    } else {
                        2.0 * h / 3.0
                    }
                } else if a.abs_diff(b) == 1 {
                    h / 6.0
                } else {
                    0.0
                };
                acc += wa * wb * g;
            }
        }
        acc.sqrt()
    }

    fn factor_levels(&self) -> Result<Vec<BandedLu>> {
        let j0 = self.family.coarsest_level;
        let mut lus = Vec::new();
        for j in j0 + 1..=self.max_level {
            let n = 1usize << j;
            let half = n / 2;
            // Collect triplets: coarse hat k → interleaved column 2k−2,
            // wavelet k → column 2k−1; rows are fine hat indices − 1.
            let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
            for k in 1..=half {
                for (node, w) in coarse_hat_refinement(j, k) {
                    triplets.push((node - 1, 2 * k - 2, w));
                }
                for (node, w) in self.family.hat_expansion(j, k) {
                    triplets.push((node - 1, 2 * k - 1, w));
                }
            }
            let kl = triplets
                .iter()
                .map(|&(i, c, _)| i as i64 - c as i64)
                .max()
                .unwrap()
                .max(0) as usize;
            let ku = triplets
                .iter()
                .map(|&(i, c, _)| c as i64 - i as i64)
                .max()
                .unwrap()
                .max(0) as usize;
            let mut band = BandedMatrix::zeros(n, kl, ku);
            for (i, c, v) in triplets {
                band.add(i, c, v);
            }
            lus.push(band.lu()?);
        }
        Ok(lus)
    }
}

/// `L²` norm of a level-`j` hat (the last index is the half-hat).
fn hat_norm(j: u32, k: usize) -> f64 {
    let h = mesh_size(j);
    if k == 1usize << j {
        (h / 3.0).sqrt()
    } else {
        (2.0 * h / 3.0).sqrt()
    }
}

/// Refinement of the coarse hat `φ_{j−1,k}` into level-`j` hats.
fn coarse_hat_refinement(j: u32, k: usize) -> Vec<(usize, f64)> {
    let half = 1usize << (j - 1);
    if k == half {
        // Coarse half-hat.
        vec![(2 * k - 1, 0.5), (2 * k, 1.0)]
    } else {
        vec![(2 * k - 1, 0.5), (2 * k, 1.0), (2 * k + 1, 0.5)]
    }
}

/// Apply the two-scale refinement to a full coarse coefficient vector.
fn refine_hats(j: u32, coarse: &[f64]) -> Vec<f64> {
    let half = 1usize << (j - 1);
    assert_eq!(coarse.len(), half);
    let mut fine = vec![0.0; 1 << j];
    for k in 1..=half {
        let c = coarse[k - 1];
        if c != 0.0 {
            for (node, w) in coarse_hat_refinement(j, k) {
                fine[node - 1] += c * w;
            }
        }
    }
    fine
}

/// Adjoint of [`refine_hats`].
fn refine_hats_adjoint(j: u32, fine: &[f64]) -> Vec<f64> {
    let half = 1usize << (j - 1);
    assert_eq!(fine.len(), 1 << j);
    let mut coarse = vec![0.0; half];
    for k in 1..=half {
        let mut acc = 0.0;
        for (node, w) in coarse_hat_refinement(j, k) {
            acc += w * fine[node - 1];
        }
        coarse[k - 1] = acc;
    }
    coarse
}

/// Evaluate a hat-coefficient vector at a point (piecewise linear
/// interpolation through the nodal values, zero at `t = 0`).
pub fn eval_hat_function(level: u32, coeffs: &[f64], t: f64) -> f64 {
    let n = 1usize << level;
    assert_eq!(coeffs.len(), n);
    let h = mesh_size(level);
    let x = (t / h).clamp(0.0, n as f64);
    let cell = (x.floor() as usize).min(n - 1);
    let frac = x - cell as f64;
    let left = if cell == 0 { 0.0 } else { coeffs[cell - 1] };
    left + (coeffs[cell] - left) * frac
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_rational::BigRational;
    use num_bigint::BigInt;

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Exact hat moments ∫ φ_i (t/h)^m d(t/h) as rationals (interior and
    /// half-hat), for moment orders 0..=3.
    fn hat_moment(node: usize, n: usize, m: usize) -> BigRational {
        let i = rational(node as i64, 1);
        if node == n {
            let a = &i - rational(1, 1);
            match m {
                0 => rational(1, 2),
                1 => &i / rational(2, 1) - rational(1, 6),
                2 => &i * &i / rational(2, 1) - &i / rational(3, 1) + rational(1, 12),
                3 => {
                    &a * &a * &a / rational(2, 1)
                        + &a * &a
                        + &a * rational(3, 4)
                        + rational(1, 5)
                }
                _ => unreachable!(),
            }
        } else {
            match m {
                0 => rational(1, 1),
                1 => i,
                2 => &i * &i + rational(1, 6),
                3 => &i * &i * &i + &i / rational(2, 1),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn vanishing_moments_hold_exactly() {
        // Interior and left-boundary wavelets kill polynomials up to degree
        // d̃ − 1 exactly; right-boundary wavelets keep d̃ − 1 moments for
        // d̃ = 2 and are checked at their stated orders for d̃ = 4.
        for dual_order in [2u32, 4] {
            let fam = family(dual_order).unwrap();
            let j = fam.coarsest_level + 1;
            let n = 1usize << j;
            let half = n / 2;
            for k in 1..=half {
                let expansion = fam.hat_expansion(j, k);
                let nl = fam.left.len();
                let nr = fam.right.len();
                let stencil = if k <= nl {
                    &fam.left[k - 1]
                } else if k > half - nr {
                    &fam.right[k - (half - nr) - 1]
                } else {
                    &fam.stationary
                };
                for m in 0..dual_order as usize {
                    let mut acc = rational(0, 1);
                    for (i, (&num, &den)) in stencil.num.iter().zip(stencil.den).enumerate() {
                        let node = expansion[i].0;
                        acc = acc + rational(num, den) * hat_moment(node, n, m);
                    }
                    assert_eq!(
                        acc,
                        rational(0, 1),
                        "moment {m} of wavelet (d̃={dual_order}, j={j}, k={k}) must vanish"
                    );
                }
            }
        }
    }

    #[test]
    fn expansion_weights_match_rational_tables() {
        let fam = family(4).unwrap();
        let exp = fam.hat_expansion(5, 3);
        assert_eq!(exp.first().unwrap().0, 1); // 2k − 5 = 1
        assert_abs_diff_eq!(exp[4].1, 45.0 / 64.0, epsilon = 0.0);
        let expr = fam.hat_expansion(5, 16);
        assert_eq!(expr.first().unwrap().0, 25);
        assert_eq!(expr.last().unwrap().0, 32);
        assert_abs_diff_eq!(expr.last().unwrap().1, -35.0 / 64.0, epsilon = 0.0);
    }

    #[test]
    fn synthesis_and_forward_are_inverse() {
        for dual_order in [2u32, 4] {
            let basis = MultiscaleBasis::new(dual_order, 7).unwrap();
            let n = basis.len();
            let coeffs: Vec<f64> = (0..n)
                .map(|i| ((i * 2654435761) % 1000) as f64 / 500.0 - 1.0)
                .collect();
            let hat = basis.synthesis(&coeffs);
            let back = basis.forward(&hat);
            for i in 0..n {
                assert_abs_diff_eq!(back[i], coeffs[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_agrees_with_bilinear_pairing() {
        // ⟨Syn w, v⟩ = ⟨w, Synᵀ v⟩ for arbitrary vectors.
        let basis = MultiscaleBasis::new(2, 6).unwrap();
        let n = basis.len();
        let w: Vec<f64> = (0..n).map(|i| ((i * 37 + 11) % 17) as f64 - 8.0).collect();
        let v: Vec<f64> = (0..n).map(|i| ((i * 53 + 5) % 13) as f64 - 6.0).collect();
        let syn_w = basis.synthesis(&w);
        let adj_v = basis.synthesis_adjoint(&v);
        let lhs: f64 = syn_w.iter().zip(&v).map(|(a, b)| a * b).sum();
        let rhs: f64 = w.iter().zip(&adj_v).map(|(a, b)| a * b).sum();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn profiles_match_synthesis_of_unit_vectors() {
        let basis = MultiscaleBasis::new(4, 6).unwrap();
        for &flat in &[0usize, 7, 15, 16, 20, 31, 47, 63] {
            let mut e = vec![0.0; basis.len()];
            e[flat] = 1.0;
            let hat = basis.synthesis(&e);
            let profile = basis.profile(flat);
            for &t in &[0.07, 0.23, 0.5, 0.77, 0.93] {
                assert_abs_diff_eq!(
                    profile.eval(t),
                    eval_hat_function(6, &hat, t),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn profiles_are_normalized_in_l2() {
        let basis = MultiscaleBasis::new(4, 6).unwrap();
        for &flat in &[0usize, 15, 16, 40, 63] {
            let p = basis.profile(flat);
            // ∫ p² via the exact piecewise integral of p·p.
            let rule = crate::quad::GaussRule::new(8);
            let mut acc = 0.0;
            for w in p.breaks.windows(2) {
                acc += rule.integrate(w[0], w[1], |t| p.eval(t).powi(2));
            }
            assert_abs_diff_eq!(acc, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn supports_nest_in_unit_interval() {
        let basis = MultiscaleBasis::new(2, 8).unwrap();
        for flat in 0..basis.len() {
            let (lo, hi) = basis.support(flat);
            assert!(lo >= 0.0 && hi <= 1.0 && lo < hi);
            let nodes = basis.singular_nodes(flat);
            assert!(nodes.len() >= 2);
            assert_abs_diff_eq!(nodes[0], lo, epsilon = 1e-14);
            assert_abs_diff_eq!(*nodes.last().unwrap(), hi, epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_too_coarse_level() {
        assert!(MultiscaleBasis::new(4, 2).is_err());
        assert!(MultiscaleBasis::new(3, 5).is_err());
    }
}
