//! Multilevel tensor preconditioners.
//!
//! One preconditioner pass sweeps the spatial grid hierarchy: restrict the
//! residual to every spatial level `ℓ`, solve a temporal system
//! `Aₜ + 4^ℓ·Mₜ` along each spatial node (the `4^ℓ` matches `h_ℓ⁻²`, the
//! size of the stiffness-to-mass ratio on that level), scale by the level
//! weight `4^{ℓ−j}`, and prolong everything back.  The temporal solves reuse
//! one sparse LU per level; the level sums telescope so each transfer
//! operator is applied once per pass.
//!
//! The sparse tensor variant does the same per spatial level on the
//! complementary temporal resolution `τ(ℓ) = j + j₀ − ℓ` (capped at `j`),
//! whose unknowns form a prefix of the temporal multiscale ordering.  Each
//! temporal block has its own finest companion grid `L`, so the level weight
//! is applied per block as `2^{ℓ−L}` on both sides of the temporal solve
//! (net `4^{ℓ−L}`); on the full layout, where `L ≡ j`, this reduces to the
//! uniform `4^{ℓ−j}` of the full-tensor sweep.

use crate::csr::CsrMatrix;
use crate::dissection::{fill_reducing_order, SparseLu};
use crate::error::Result;
use crate::fem::{interior_len_2d, prolongate_2d, restrict_2d};
use crate::system::{prolong_range, restrict_range, BlockLayout};

/// Builds the fill-reducing LU of `Aₜ + scale·Mₜ`.
fn temporal_lu(deriv: &CsrMatrix, mass: &CsrMatrix, scale: f64) -> Result<SparseLu> {
    let k = deriv.linear_combination(1.0, mass, scale);
    let pattern = crate::compress::Pattern {
        n: k.nrows,
        row_ptr: k.row_ptr.clone(),
        col_idx: k.col_idx.clone(),
    };
    let perm = fill_reducing_order(&pattern);
    SparseLu::factor(&k, &perm)
}

/// Transposes the column-major `rows × cols` array `src` into `dst`
/// (`cols × rows`), tiled for locality.
fn transpose_block(src: &[f64], rows: usize, cols: usize, dst: &mut [f64]) {
    const TILE: usize = 64;
    debug_assert_eq!(src.len(), rows * cols);
    debug_assert_eq!(dst.len(), rows * cols);
    for c0 in (0..cols).step_by(TILE) {
        let c1 = (c0 + TILE).min(cols);
        for r0 in (0..rows).step_by(TILE) {
            let r1 = (r0 + TILE).min(rows);
            for c in c0..c1 {
                for r in r0..r1 {
                    dst[r * cols + c] = src[c * rows + r];
                }
            }
        }
    }
}

/// Solves `K` along the temporal fibre of every spatial node of the
/// column-major `nx × nt` block, in place, scaling results by `weight`.
fn solve_temporal_fibres(
    lu: &SparseLu,
    block: &mut [f64],
    nx: usize,
    nt: usize,
    scratch: &mut Vec<f64>,
    weight: f64,
) {
    scratch.resize(nx * nt, 0.0);
    transpose_block(block, nx, nt, scratch);
    for i in 0..nx {
        lu.solve_in_place(&mut scratch[i * nt..(i + 1) * nt]);
    }
    transpose_block(scratch, nt, nx, block);
    if weight != 1.0 {
        block.iter_mut().for_each(|v| *v *= weight);
    }
}

/// Multilevel preconditioner for the full tensor-product system.
pub struct FullBpx {
    max_level: u32,
    min_level: u32,
    nt: usize,
    /// One temporal LU per spatial level, index `ℓ − min_level`.
    lus: Vec<SparseLu>,
    /// Restricted residual blocks per level, same indexing.
    blocks: Vec<Vec<f64>>,
    scratch: Vec<f64>,
    spare: Vec<f64>,
}

impl FullBpx {
    /// Prepares temporal factorizations for spatial levels `1 ..= max_level`.
    pub fn new(max_level: u32, deriv_t: &CsrMatrix, mass_t: &CsrMatrix) -> Result<Self> {
        let min_level = 1u32;
        let nt = deriv_t.nrows;
        let mut lus = Vec::new();
        let mut blocks = Vec::new();
        for level in min_level..=max_level {
            lus.push(temporal_lu(deriv_t, mass_t, 4f64.powi(level as i32))?);
            blocks.push(vec![0.0; interior_len_2d(level) * nt]);
        }
        let nx_max = interior_len_2d(max_level);
        Ok(FullBpx {
            max_level,
            min_level,
            nt,
            lus,
            blocks,
            scratch: vec![0.0; nx_max * nt],
            spare: vec![0.0; nx_max],
        })
    }

    /// `z ← C·r` on column-major `nx × nt` arrays at the finest level.
    pub fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        let nt = self.nt;
        let top = (self.max_level - self.min_level) as usize;
        assert_eq!(r.len(), self.blocks[top].len());
        assert_eq!(z.len(), r.len());

        // Downward: restrict the residual level by level.
        self.blocks[top].copy_from_slice(r);
        for idx in (1..=top).rev() {
            let level = self.min_level + idx as u32;
            let nxf = interior_len_2d(level);
            let nxc = interior_len_2d(level - 1);
            let (coarse, fine) = self.blocks.split_at_mut(idx);
            for k in 0..nt {
                restrict_2d(
                    level - 1,
                    &fine[0][k * nxf..(k + 1) * nxf],
                    &mut coarse[idx - 1][k * nxc..(k + 1) * nxc],
                );
            }
        }

        // Temporal solves with the level weights 4^{ℓ−j}.
        for idx in 0..=top {
            let level = self.min_level + idx as u32;
            let nx = interior_len_2d(level);
            let weight = 0.25f64.powi((self.max_level - level) as i32);
            solve_temporal_fibres(
                &self.lus[idx],
                &mut self.blocks[idx],
                nx,
                nt,
                &mut self.scratch,
                weight,
            );
        }

        // Upward: telescoped prolongation and accumulation.
        for idx in 1..=top {
            let level = self.min_level + idx as u32;
            let nxf = interior_len_2d(level);
            let nxc = interior_len_2d(level - 1);
            let (coarse, fine) = self.blocks.split_at_mut(idx);
            for k in 0..nt {
                prolongate_2d(
                    level - 1,
                    &coarse[idx - 1][k * nxc..(k + 1) * nxc],
                    &mut self.spare[..nxf],
                );
                let dst = &mut fine[0][k * nxf..(k + 1) * nxf];
                for (d, &s) in dst.iter_mut().zip(self.spare.iter()) {
                    *d += s;
                }
            }
        }
        z.copy_from_slice(&self.blocks[top]);
    }
}

/// Multilevel preconditioner for the sparse tensor system.
pub struct SparseBpx {
    layout: BlockLayout,
    /// Per spatial level `ℓ = 1..=j`: the LU of the leading `2^{τ(ℓ)}`
    /// temporal principal submatrix of `Aₜ + 4^ℓ·Mₜ`.
    levels: Vec<SparseBpxLevel>,
    gather: Vec<f64>,
    scratch: Vec<f64>,
    cbuf_a: Vec<f64>,
    cbuf_b: Vec<f64>,
}

struct SparseBpxLevel {
    level: u32,
    nx: usize,
    n_tau: usize,
    weight: f64,
    lu: SparseLu,
}

impl SparseBpx {
    pub fn new(layout: &BlockLayout, deriv_t: &CsrMatrix, mass_t: &CsrMatrix) -> Result<Self> {
        let j = layout.max_level;
        let j0 = layout.coarsest;
        let mut levels = Vec::new();
        let mut max_gather = 0usize;
        for level in 1..=j {
            let tau = (j + j0 - level).min(j);
            let n_tau = 1usize << tau;
            let nx = interior_len_2d(level);
            let k = deriv_t
                .linear_combination(1.0, mass_t, 4f64.powi(level as i32))
                .leading_submatrix(n_tau);
            let pattern = crate::compress::Pattern {
                n: k.nrows,
                row_ptr: k.row_ptr.clone(),
                col_idx: k.col_idx.clone(),
            };
            let perm = fill_reducing_order(&pattern);
            levels.push(SparseBpxLevel {
                level,
                nx,
                n_tau,
                lu: SparseLu::factor(&k, &perm)?,
            });
            max_gather = max_gather.max(nx * n_tau);
        }
        let nx_max = interior_len_2d(j);
        Ok(SparseBpx {
            layout: layout.clone(),
            levels,
            gather: vec![0.0; max_gather],
            scratch: Vec::new(),
            cbuf_a: vec![0.0; nx_max],
            cbuf_b: vec![0.0; nx_max],
        })
    }

    /// `z ← C·r` on packed sparse-layout vectors.
    pub fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        assert_eq!(r.len(), self.layout.total);
        assert_eq!(z.len(), r.len());
        z.iter_mut().for_each(|v| *v = 0.0);

        for li in 0..self.levels.len() {
            let (level, nx, n_tau) = {
                let l = &self.levels[li];
                (l.level, l.nx, l.n_tau)
            };

            // Gather: restrict every temporal-prefix block to this level.
            self.gather[..nx * n_tau].iter_mut().for_each(|v| *v = 0.0);
            for p in &self.layout.pairs {
                if p.t_offset >= n_tau {
                    continue;
                }
                debug_assert!(p.t_offset + p.t_size <= n_tau);
                debug_assert!(p.x_level >= level);
                for k in 0..p.t_size {
                    self.cbuf_a[..p.nx]
                        .copy_from_slice(&r[p.offset + k * p.nx..p.offset + (k + 1) * p.nx]);
                    restrict_range(p.x_level, level, &mut self.cbuf_a, &mut self.cbuf_b);
                    let col = p.t_offset + k;
                    self.gather[col * nx..(col + 1) * nx].copy_from_slice(&self.cbuf_a[..nx]);
                }
            }

            solve_temporal_fibres(
                &self.levels[li].lu,
                &mut self.gather[..nx * n_tau],
                nx,
                n_tau,
                &mut self.scratch,
                weight,
            );

            // Scatter: prolong each solved column back to its pair's grid.
            for p in &self.layout.pairs {
                if p.t_offset >= n_tau {
                    continue;
                }
                for k in 0..p.t_size {
                    let col = p.t_offset + k;
                    self.cbuf_a[..nx].copy_from_slice(&self.gather[col * nx..(col + 1) * nx]);
                    prolong_range(level, p.x_level, &mut self.cbuf_a, &mut self.cbuf_b);
                    let dst = &mut z[p.offset + k * p.nx..p.offset + (k + 1) * p.nx];
                    for (d, &s) in dst.iter_mut().zip(self.cbuf_a.iter()) {
                        *d += s;
                    }
                }
            }
        }
    }
}
