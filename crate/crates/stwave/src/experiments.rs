//! Prebuilt parameter studies behind the command-line runners and the
//! integration suites: a reaction-ODE convergence sweep, a condition-number
//! sweep of the diagonally scaled temporal system, and full/sparse
//! tensor-product benchmarks for the heat equation on the unit square.

use std::f64::consts::{PI, SQRT_2};
use std::ops::RangeInclusive;

use crate::bpx::{FullBpx, SparseBpx};
use crate::compress::{
    assemble_form, compressed_form, full_pattern, CompressionParams, FormKind, Pattern,
};
use crate::condition::scaled_condition_number;
use crate::csr::CsrMatrix;
use crate::dissection::{fill_reducing_order, SparseLu};
use crate::error::{Error, Result};
use crate::fem::{assemble_spatial, interior_len_1d, sine_moments_1d};
use crate::gmres::gmres;
use crate::norms::{
    hat_gram_matrix, quadratic_error_sq, temporal_errors, temporal_sine_moments, HALF_NORM_TERMS,
};
use crate::oscillatory::SmoothFit;
use crate::rhs::{assemble_load, cosine_load_series, SineCombination};
use crate::system::{embed, sparse_layout, FullSystem, SparseSystem};
use crate::wavelet::MultiscaleBasis;

/// How the temporal forms are assembled for a study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CompressionChoice {
    /// Default per-form cutoff windows.
    Default,
    /// No dropping: every entry is assembled.
    Dense,
    /// Explicit cutoff constant `a` and smoothness weight `δ`.
    Window { cutoff: f64, delta: f64 },
}

/// Configuration of the reaction-ODE sweep `u' + μu = f` on `(0, T)`.
#[derive(Clone, Debug)]
pub struct OdeConfig {
    pub dual_order: u32,
    pub levels: RangeInclusive<u32>,
    /// Reaction coefficient `μ`.
    pub mu: f64,
    /// Time horizon `T`; the solve is dilated onto the unit interval.
    pub horizon: f64,
    pub compression: CompressionChoice,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig {
            dual_order: 2,
            levels: 4..=10,
            mu: 10.0,
            horizon: 2.0,
            compression: CompressionChoice::Default,
        }
    }
}

/// One level of the ODE sweep.
#[derive(Clone, Debug)]
pub struct OdeRow {
    pub level: u32,
    /// Temporal unknowns `N = 2^level`.
    pub n: usize,
    /// Stored entries of the system matrix.
    pub nnz: usize,
    /// `100 · nnz / N²`.
    pub percent: f64,
    /// Factor entries `nnz(L) + nnz(U)` after fill-reducing reordering.
    pub factor_nnz: usize,
    /// `‖K x − b‖_∞ / ‖b‖_∞` of the direct solve.
    pub residual: f64,
    pub l2: f64,
    pub l2_rate: Option<f64>,
    pub h1: f64,
    pub h1_rate: Option<f64>,
    pub h_half: f64,
    pub h_half_rate: Option<f64>,
    /// Estimated relative truncation of the `½`-norm series.
    pub tail_ratio: f64,
}

/// The closed-form study solution `û(τ) = −2 sin(ω₁τ) + sin(ω₄τ)` on the
/// unit interval, i.e. `u(t) = −2 sin(3πt/4) + sin(9πt/4)` on `(0, 2)`.
pub fn study_solution() -> SineCombination {
    SineCombination {
        terms: vec![(1, -SQRT_2), (4, 0.5 * SQRT_2)],
    }
}

fn form_params(choice: CompressionChoice, kind: FormKind, dual_order: u32) -> CompressionParams {
    let base = CompressionParams::for_form(kind, dual_order);
    match choice {
        CompressionChoice::Default | CompressionChoice::Dense => base,
        CompressionChoice::Window { cutoff, delta } => base.with_cutoffs(cutoff, delta),
    }
}

/// Assembles the two temporal forms of one study level under `choice`.
pub fn temporal_forms(
    basis: &MultiscaleBasis,
    choice: CompressionChoice,
) -> (CsrMatrix, CsrMatrix) {
    if choice == CompressionChoice::Dense {
        let pattern = full_pattern(basis.len());
        let a = assemble_form(basis, &pattern, FormKind::Derivative);
        let m = assemble_form(basis, &pattern, FormKind::Mass);
        return (a, m);
    }
    let d = basis.family.dual_order;
    let pa = form_params(choice, FormKind::Derivative, d);
    let pm = form_params(choice, FormKind::Mass, d);
    let (_, a) = crate::compress::compressed_form_with(basis, FormKind::Derivative, &pa);
    let (_, m) = crate::compress::compressed_form_with(basis, FormKind::Mass, &pm);
    (a, m)
}

fn rate(prev: f64, curr: f64) -> f64 {
    (prev / curr).log2()
}

/// Runs the ODE sweep and reports errors in the norms of `(0, T)`.
///
/// Per level: assemble the temporal forms in multiscale coordinates, combine
/// `K = A + μT·M` (the unit-interval dilation of the horizon-`T` problem),
/// assemble the load from the closed-form forcing series, solve by sparse LU
/// with a fill-reducing ordering, and evaluate the three error norms.
pub fn ode_convergence(cfg: &OdeConfig) -> Result<Vec<OdeRow>> {
    let exact = study_solution();
    let reaction = cfg.mu * cfg.horizon;
    let mut rows: Vec<OdeRow> = Vec::new();
    for level in cfg.levels.clone() {
        let basis = MultiscaleBasis::new(cfg.dual_order, level)?;
        let n = basis.len();
        let (a, m) = temporal_forms(&basis, cfg.compression);
        let k = a.linear_combination(1.0, &m, reaction);

        // The load series must clear the finest-level entry scale, so its
        // length grows with N.
        let series_len = HALF_NORM_TERMS.max(32 * n);
        let b = assemble_load(&basis, &exact.forcing_cosine_coeffs(reaction, series_len));

        let pattern = Pattern {
            n,
            row_ptr: k.row_ptr.clone(),
            col_idx: k.col_idx.clone(),
        };
        let perm = fill_reducing_order(&pattern);
        let lu = SparseLu::factor(&k, &perm)?;
        let mut x = b.clone();
        lu.solve_in_place(&mut x);

        let mut kx = vec![0.0; n];
        k.matvec(&x, &mut kx);
        let bmax = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let residual = kx
            .iter()
            .zip(&b)
            .fold(0.0f64, |acc, (kxi, bi)| acc.max((kxi - bi).abs()))
            / bmax;

        let errs = temporal_errors(&basis, &x, &exact, cfg.horizon, HALF_NORM_TERMS);
        let prev = rows.last();
        rows.push(OdeRow {
            level,
            n,
            nnz: k.nnz(),
            percent: 100.0 * k.nnz() as f64 / (n as f64 * n as f64),
            factor_nnz: lu.fill(),
            residual,
            l2: errs.l2,
            l2_rate: prev.map(|p| rate(p.l2, errs.l2)),
            h1: errs.h1,
            h1_rate: prev.map(|p| rate(p.h1, errs.h1)),
            h_half: errs.h_half,
            h_half_rate: prev.map(|p| rate(p.h_half, errs.h_half)),
            tail_ratio: errs.tail_ratio,
        });
    }
    Ok(rows)
}

/// Configuration of the condition-number sweep.
#[derive(Clone, Debug)]
pub struct CondConfig {
    pub levels: RangeInclusive<u32>,
    pub mus: Vec<f64>,
    /// Horizon of the underlying problem; the reaction weight is `μT`.
    pub horizon: f64,
}

impl Default for CondConfig {
    fn default() -> Self {
        CondConfig {
            levels: 3..=12,
            mus: vec![1.0, 10.0, 100.0],
            horizon: 2.0,
        }
    }
}

/// One dyadic level of the condition sweep: `κ(D^{-1/2} K D^{-1/2})` per μ.
#[derive(Clone, Debug)]
pub struct CondRow {
    pub level: u32,
    pub dof: usize,
    pub kappas: Vec<f64>,
}

/// Sweeps the diagonally scaled temporal system `A + μT·M` in multiscale
/// coordinates over dyadic levels, one condition number per `μ`.
pub fn condition_sweep(cfg: &CondConfig) -> Result<Vec<CondRow>> {
    let mut rows = Vec::new();
    for level in cfg.levels.clone() {
        let basis = MultiscaleBasis::new(2, level)?;
        let (_, a) = compressed_form(&basis, FormKind::Derivative);
        let (_, m) = compressed_form(&basis, FormKind::Mass);
        let mut kappas = Vec::with_capacity(cfg.mus.len());
        for &mu in &cfg.mus {
            let k = a.linear_combination(1.0, &m, mu * cfg.horizon);
            kappas.push(scaled_condition_number(&k)?);
        }
        rows.push(CondRow {
            level,
            dof: basis.len(),
            kappas,
        });
    }
    Ok(rows)
}

/// Tensor-product mode of the heat benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeatMode {
    Full,
    Sparse,
}

/// Configuration of the heat benchmark on `(0,1)² × (0,1)`.
#[derive(Clone, Debug)]
pub struct HeatConfig {
    pub mode: HeatMode,
    pub levels: RangeInclusive<u32>,
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for HeatConfig {
    fn default() -> Self {
        HeatConfig {
            mode: HeatMode::Full,
            levels: 4..=8,
            tol: 1e-8,
            max_iterations: 100,
        }
    }
}

/// One level of the heat benchmark.
#[derive(Clone, Debug)]
pub struct HeatRow {
    pub level: u32,
    /// Temporal unknowns `2^level`.
    pub nt: usize,
    /// Spatial grid nodes `(2^level + 1)²` (boundary included).
    pub nx_nodes: usize,
    /// Actual unknowns of the mode (interior nodes × temporal basis for the
    /// full tensor product; block-layout total for the sparse one).
    pub dofs: usize,
    pub iterations: usize,
    pub converged: bool,
    /// `L²` error over the space-time cylinder.
    pub l2q: f64,
    pub rate: Option<f64>,
    /// Multiply-adds spent in operator applications.
    pub ops: u64,
}

/// Exact `L²` norm squared of `u(x,t) = sin(2πx₁)sin(2πx₂)sin(t)` over
/// the unit space-time cylinder.
fn heat_exact_norm_sq() -> f64 {
    0.25 * (0.5 - (2.0f64).sin() / 4.0)
}

/// Temporal load coefficients `⟨q, 𝓗ψ⟩` for `q(t) = cos t + 8π² sin t`,
/// the forcing profile consistent with the closed-form solution (its
/// spatial factor is a Laplace eigenfunction with eigenvalue `8π²`).
fn heat_temporal_load(basis: &MultiscaleBasis) -> Vec<f64> {
    let fit = SmoothFit::new(|t: f64| t.cos() + 8.0 * PI * PI * t.sin(), 0.0, 1.0, 64);
    let coeffs = cosine_load_series(&fit, HALF_NORM_TERMS);
    assemble_load(basis, &coeffs)
}

/// Spatial load moments `⟨φ_i, sin(2πx₁)sin(2πx₂)⟩` on the interior grid.
fn heat_spatial_moments(level: u32) -> Vec<f64> {
    let m1 = sine_moments_1d(level, 2.0 * PI);
    let n1 = interior_len_1d(level);
    let mut m2 = vec![0.0; n1 * n1];
    for a in 0..n1 {
        for b in 0..n1 {
            m2[a * n1 + b] = m1[a] * m1[b];
        }
    }
    m2
}

/// `L²` cylinder error of a solution given in temporal multiscale
/// coordinates over the full tensor-product grid.
fn heat_l2q_error(basis: &MultiscaleBasis, x: &[f64], nx: usize, spatial_mass: &CsrMatrix) -> f64 {
    let level = basis.max_level;
    let nt = basis.len();
    assert_eq!(x.len(), nx * nt);
    let mut nodal = vec![0.0; nx * nt];
    let mut fibre = vec![0.0; nt];
    for i in 0..nx {
        for k in 0..nt {
            fibre[k] = x[k * nx + i];
        }
        let hat = basis.synthesis(&fibre);
        for k in 0..nt {
            nodal[k * nx + i] = hat[k];
        }
    }
    let err_sq = quadratic_error_sq(
        &nodal,
        nx,
        nt,
        spatial_mass,
        &hat_gram_matrix(level),
        &heat_spatial_moments(level),
        &temporal_sine_moments(level),
        heat_exact_norm_sq(),
    );
    err_sq.max(0.0).sqrt()
}

/// Runs the heat benchmark: multilevel-preconditioned GMRES per level,
/// errors against the closed-form solution.  Nonconvergence is reported in
/// the row and the sweep continues.
pub fn heat_study(cfg: &HeatConfig) -> Result<Vec<HeatRow>> {
    let mut rows: Vec<HeatRow> = Vec::new();
    for level in cfg.levels.clone() {
        let basis = MultiscaleBasis::new(4, level)?;
        let (a, m) = temporal_forms(&basis, CompressionChoice::Default);
        let b_t = heat_temporal_load(&basis);

        let row = match cfg.mode {
            HeatMode::Full => heat_full_level(cfg, level, &basis, &a, &m, &b_t)?,
            HeatMode::Sparse => heat_sparse_level(cfg, level, &basis, &a, &m, &b_t)?,
        };
        let row = HeatRow {
            rate: rows
                .last()
                .filter(|p| p.converged && row.converged)
                .map(|p| rate(p.l2q, row.l2q)),
            ..row
        };
        rows.push(row);
    }
    Ok(rows)
}

fn heat_full_level(
    cfg: &HeatConfig,
    level: u32,
    basis: &MultiscaleBasis,
    a: &CsrMatrix,
    m: &CsrMatrix,
    b_t: &[f64],
) -> Result<HeatRow> {
    let spatial = assemble_spatial(level);
    let nx = spatial.mass.nrows;
    let nt = basis.len();
    let m2 = heat_spatial_moments(level);
    let mut b = vec![0.0; nx * nt];
    for k in 0..nt {
        for i in 0..nx {
            b[k * nx + i] = m2[i] * b_t[k];
        }
    }

    let mut sys = FullSystem::new(&spatial, a, m);
    let mut bpx = FullBpx::new(level, a, m)?;
    let outcome = gmres(
        |x: &[f64], y: &mut [f64]| sys.apply(x, y),
        |r: &[f64], z: &mut [f64]| bpx.apply(r, z),
        &b,
        cfg.tol,
        cfg.max_iterations,
    );
    let (solution, iterations, converged) = unpack_gmres(outcome, nx * nt)?;
    let l2q = solution
        .as_ref()
        .map(|x| heat_l2q_error(basis, x, nx, &spatial.mass))
        .unwrap_or(f64::NAN);

    Ok(HeatRow {
        level,
        nt,
        nx_nodes: ((1usize << level) + 1) * ((1usize << level) + 1),
        dofs: nx * nt,
        iterations,
        converged,
        l2q,
        rate: None,
        ops: sys.flops,
    })
}

fn heat_sparse_level(
    cfg: &HeatConfig,
    level: u32,
    basis: &MultiscaleBasis,
    a: &CsrMatrix,
    m: &CsrMatrix,
    b_t: &[f64],
) -> Result<HeatRow> {
    let layout = sparse_layout(basis);
    let mut b = vec![0.0; layout.total];
    for p in &layout.pairs {
        let m2 = heat_spatial_moments(p.x_level);
        for k in 0..p.t_size {
            let bt = b_t[p.t_offset + k];
            let slab = &mut b[p.offset + k * p.nx..p.offset + (k + 1) * p.nx];
            for (bi, mi) in slab.iter_mut().zip(&m2) {
                *bi = mi * bt;
            }
        }
    }

    let mut sys = SparseSystem::new(basis, a, m);
    let mut bpx = SparseBpx::new(&layout, a, m)?;
    let outcome = gmres(
        |x: &[f64], y: &mut [f64]| sys.apply(x, y),
        |r: &[f64], z: &mut [f64]| bpx.apply(r, z),
        &b,
        cfg.tol,
        cfg.max_iterations,
    );
    let (solution, iterations, converged) = unpack_gmres(outcome, layout.total)?;
    let l2q = solution
        .as_ref()
        .map(|x| {
            let full = embed(&layout, x);
            let spatial_mass = assemble_spatial(level).mass;
            heat_l2q_error(basis, &full, layout.finest_nx(), &spatial_mass)
        })
        .unwrap_or(f64::NAN);

    Ok(HeatRow {
        level,
        nt: basis.len(),
        nx_nodes: ((1usize << level) + 1) * ((1usize << level) + 1),
        dofs: layout.total,
        iterations,
        converged,
        l2q,
        rate: None,
        ops: sys.flops,
    })
}

/// Splits a GMRES outcome into `(solution, iterations, converged)`,
/// propagating every error except nonconvergence.
fn unpack_gmres(
    outcome: Result<(Vec<f64>, crate::gmres::GmresReport)>,
    _len: usize,
) -> Result<(Option<Vec<f64>>, usize, bool)> {
    match outcome {
        Ok((x, report)) => Ok((Some(x), report.iterations, true)),
        Err(Error::NoConvergence { iterations, .. }) => Ok((None, iterations, false)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ode_zero_reaction_recovers_second_order_rates() {
        let cfg = OdeConfig {
            mu: 0.0,
            levels: 5..=6,
            ..OdeConfig::default()
        };
        let rows = ode_convergence(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        let r = rows[1].l2_rate.unwrap();
        assert!((r - 2.0).abs() < 0.2, "L² rate {r} not second order");
        assert!(rows[1].residual < 1e-12);
    }

    #[test]
    fn condition_sweep_matches_dense_reference_values() {
        let cfg = CondConfig {
            levels: 3..=4,
            ..CondConfig::default()
        };
        let rows = condition_sweep(&cfg).unwrap();
        // Dense-route values frozen from an SVD cross-check.
        assert_abs_diff_eq!(rows[0].kappas[1], 4.2814, epsilon = 5e-3);
        assert_abs_diff_eq!(rows[1].kappas[0], 4.8998, epsilon = 5e-3);
        assert_abs_diff_eq!(rows[1].kappas[1], 5.3364, epsilon = 5e-3);
    }

    #[test]
    fn heat_full_smallest_level_matches_exact_galerkin_error() {
        let cfg = HeatConfig {
            levels: 4..=4,
            ..HeatConfig::default()
        };
        let rows = heat_study(&cfg).unwrap();
        let row = &rows[0];
        assert!(row.converged);
        assert!(row.iterations <= 30, "iterations {}", row.iterations);
        // Exact-solve value for this discretization, cross-checked against a
        // 3D Gauss quadrature of the error integral.
        assert_abs_diff_eq!(row.l2q, 3.9234e-3, epsilon = 2.0e-6);
    }

    #[test]
    fn heat_sparse_smallest_level_matches_full_error() {
        let full = heat_study(&HeatConfig {
            levels: 4..=4,
            ..HeatConfig::default()
        })
        .unwrap();
        let sparse = heat_study(&HeatConfig {
            mode: HeatMode::Sparse,
            levels: 4..=4,
            ..HeatConfig::default()
        })
        .unwrap();
        assert!(sparse[0].converged);
        assert!(sparse[0].dofs < full[0].dofs);
        let ratio = sparse[0].l2q / full[0].l2q;
        assert!((0.9..=1.1).contains(&ratio), "error ratio {ratio}");
    }
}
