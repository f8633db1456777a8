//! Space-time system operators.
//!
//! The weak form couples a temporal derivative form `Aₜ` with the spatial
//! mass matrix and a temporal mass form `Mₜ` with the spatial stiffness
//! matrix.  On the full tensor grid the operator is
//! `Aₜ ⊗ Mₓ + Mₜ ⊗ Aₓ`, applied without ever forming the Kronecker
//! products: temporal factors multiply from the right on the column-major
//! coefficient array (spatial index fastest), spatial factors act on each
//! temporal column.
//!
//! The sparse tensor variant keeps, per temporal multiscale block `m`, a
//! spatial grid of complementary resolution `ℓ = j + j₀ − m`.  Because
//! the temporal blocks are disjoint, the resulting space is a direct sum,
//! and the Galerkin blocks between different spatial levels follow from the
//! two-grid transfer operators of the nested Q1 spaces.

use crate::csr::CsrMatrix;
use crate::fem::{
    assemble_spatial, interior_len_2d, prolongate_2d, restrict_2d, SpatialOperators,
};
use crate::wavelet::MultiscaleBasis;

/// Accumulates `out[r−r₀, :] += Σ_c T[r,c]·x[c−c₀, :]` over the given row
/// and column ranges of `t`, where both slab arrays store `nx` spatial
/// values per temporal index.  Returns the multiply-add count.
pub fn temporal_block_multiply(
    t: &CsrMatrix,
    row_range: (usize, usize),
    col_range: (usize, usize),
    x: &[f64],
    nx: usize,
    out: &mut [f64],
) -> u64 {
    debug_assert_eq!(x.len(), (col_range.1 - col_range.0) * nx);
    debug_assert_eq!(out.len(), (row_range.1 - row_range.0) * nx);
    let mut flops = 0u64;
    for r in row_range.0..row_range.1 {
        let (cols, vals) = t.row(r);
        let out_slab = &mut out[(r - row_range.0) * nx..][..nx];
        for (&c, &v) in cols.iter().zip(vals.iter()) {
            if c < col_range.0 || c >= col_range.1 {
                continue;
            }
            let x_slab = &x[(c - col_range.0) * nx..][..nx];
            for (o, &xv) in out_slab.iter_mut().zip(x_slab.iter()) {
                *o += v * xv;
            }
            flops += 2 * nx as u64;
        }
    }
    flops
}

/// Prolongs the spatial vector in `a[..n(from)]` level by level up to `to`;
/// the result ends in `a[..n(to)]`.  `b` is scratch.
pub fn prolong_range(from: u32, to: u32, a: &mut Vec<f64>, b: &mut Vec<f64>) -> u64 {
    let mut flops = 0u64;
    for lev in from..to {
        let nc = interior_len_2d(lev);
        let nf = interior_len_2d(lev + 1);
        b.resize(nf.max(b.len()), 0.0);
        prolongate_2d(lev, &a[..nc], &mut b[..nf]);
        std::mem::swap(a, b);
        flops += 4 * nf as u64;
    }
    flops
}

/// Transposed counterpart of [`prolong_range`]: restricts `a[..n(from)]`
/// down to `a[..n(to)]` with `from ≥ to`.
pub fn restrict_range(from: u32, to: u32, a: &mut Vec<f64>, b: &mut Vec<f64>) -> u64 {
    let mut flops = 0u64;
    for lev in (to..from).rev() {
        let nc = interior_len_2d(lev);
        let nf = interior_len_2d(lev + 1);
        b.resize(nc.max(b.len()), 0.0);
        restrict_2d(lev, &a[..nf], &mut b[..nc]);
        std::mem::swap(a, b);
        flops += 4 * nf as u64;
    }
    flops
}

/// Full tensor-product operator `Aₜ ⊗ Mₓ + Mₜ ⊗ Aₓ` in matrix-free form.
pub struct FullSystem<'a> {
    pub spatial: &'a SpatialOperators,
    pub derivative_t: &'a CsrMatrix,
    pub mass_t: &'a CsrMatrix,
    nx: usize,
    nt: usize,
    buf: Vec<f64>,
    /// Multiply-adds spent in [`FullSystem::apply`] so far.
    pub flops: u64,
}

impl<'a> FullSystem<'a> {
    pub fn new(
        spatial: &'a SpatialOperators,
        derivative_t: &'a CsrMatrix,
        mass_t: &'a CsrMatrix,
    ) -> Self {
        let nx = spatial.mass.nrows;
        let nt = derivative_t.nrows;
        assert_eq!(derivative_t.ncols, nt);
        assert_eq!(mass_t.nrows, nt);
        FullSystem {
            spatial,
            derivative_t,
            mass_t,
            nx,
            nt,
            buf: vec![0.0; nx * nt],
            flops: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.nt)
    }

    /// `y = Mₓ·X·Aₜᵀ + Aₓ·X·Mₜᵀ` on column-major arrays.
    pub fn apply(&mut self, x: &[f64], y: &mut [f64]) {
        let (nx, nt) = (self.nx, self.nt);
        assert_eq!(x.len(), nx * nt);
        assert_eq!(y.len(), nx * nt);

        self.buf.iter_mut().for_each(|v| *v = 0.0);
        self.flops +=
            temporal_block_multiply(self.derivative_t, (0, nt), (0, nt), x, nx, &mut self.buf);
        for k in 0..nt {
            self.spatial
                .mass
                .matvec(&self.buf[k * nx..(k + 1) * nx], &mut y[k * nx..(k + 1) * nx]);
        }
        self.flops += 2 * self.spatial.mass.nnz() as u64 * nt as u64;

        self.buf.iter_mut().for_each(|v| *v = 0.0);
        self.flops += temporal_block_multiply(self.mass_t, (0, nt), (0, nt), x, nx, &mut self.buf);
        let mut col = vec![0.0; nx];
        for k in 0..nt {
            self.spatial
                .stiffness
                .matvec(&self.buf[k * nx..(k + 1) * nx], &mut col);
            for (yv, &cv) in y[k * nx..(k + 1) * nx].iter_mut().zip(col.iter()) {
                *yv += cv;
            }
        }
        self.flops += 2 * self.spatial.stiffness.nnz() as u64 * nt as u64;
    }
}

/// One spatial-grid × temporal-block component of the sparse tensor space.
#[derive(Debug, Clone, Copy)]
pub struct PairBlock {
    pub x_level: u32,
    /// Interior spatial unknowns at `x_level`.
    pub nx: usize,
    /// Temporal multiscale block: its level label, flat offset, and size.
    pub t_level: u32,
    pub t_offset: usize,
    pub t_size: usize,
    /// Flat offset of this component in the packed coefficient vector.
    pub offset: usize,
}

/// Packed layout of the sparse tensor space.
#[derive(Debug, Clone)]
pub struct BlockLayout {
    pub pairs: Vec<PairBlock>,
    pub total: usize,
    pub max_level: u32,
    pub coarsest: u32,
}

/// Pairs every temporal block `m` with the complementary spatial level
/// `j + j₀ − m`.
pub fn sparse_layout(basis: &MultiscaleBasis) -> BlockLayout {
    let j = basis.max_level;
    let j0 = basis.coarsest_level();
    let mut pairs = Vec::new();
    let mut total = 0usize;
    for block in basis.blocks() {
        let x_level = j + j0 - block.level;
        let nx = interior_len_2d(x_level);
        pairs.push(PairBlock {
            x_level,
            nx,
            t_level: block.level,
            t_offset: block.offset,
            t_size: block.size,
            offset: total,
        });
        total += nx * block.size;
    }
    BlockLayout {
        pairs,
        total,
        max_level: j,
        coarsest: j0,
    }
}

impl BlockLayout {
    /// Spatial unknowns of the finest grid in the layout.
    pub fn finest_nx(&self) -> usize {
        interior_len_2d(self.max_level)
    }

    /// Temporal unknowns of the underlying multiscale basis.
    pub fn nt(&self) -> usize {
        self.pairs.iter().map(|p| p.t_size).sum()
    }
}

/// Sparse tensor-product operator on the packed block vector.
pub struct SparseSystem<'a> {
    pub layout: BlockLayout,
    /// Spatial operators for levels `j₀ ..= j`, indexed by `level − j₀`.
    spatial: Vec<SpatialOperators>,
    pub derivative_t: &'a CsrMatrix,
    pub mass_t: &'a CsrMatrix,
    tbuf: Vec<f64>,
    cbuf_a: Vec<f64>,
    cbuf_b: Vec<f64>,
    /// Multiply-adds spent in [`SparseSystem::apply`] so far.
    pub flops: u64,
}

impl<'a> SparseSystem<'a> {
    pub fn new(
        basis: &MultiscaleBasis,
        derivative_t: &'a CsrMatrix,
        mass_t: &'a CsrMatrix,
    ) -> Self {
        let layout = sparse_layout(basis);
        assert_eq!(derivative_t.nrows, basis.len());
        let spatial = (layout.coarsest..=layout.max_level)
            .map(assemble_spatial)
            .collect();
        let nx_max = layout.finest_nx();
        SparseSystem {
            layout,
            spatial,
            derivative_t,
            mass_t,
            tbuf: Vec::new(),
            cbuf_a: vec![0.0; nx_max],
            cbuf_b: vec![0.0; nx_max],
            flops: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.layout.total
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spatial_at(&self, level: u32) -> &SpatialOperators {
        &self.spatial[(level - self.layout.coarsest) as usize]
    }

    pub fn apply(&mut self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.layout.total);
        assert_eq!(y.len(), self.layout.total);
        y.iter_mut().for_each(|v| *v = 0.0);
        let pairs = self.layout.pairs.clone();
        for tp in &pairs {
            for sp in &pairs {
                self.pair_apply(true, sp, tp, x, y);
                self.pair_apply(false, sp, tp, x, y);
            }
        }
    }

    /// Adds the `(target, source)` block contribution of one of the two
    /// Kronecker terms: the temporal derivative form paired with spatial
    /// mass (`derivative_path`), or the temporal mass form paired with
    /// spatial stiffness.
    fn pair_apply(
        &mut self,
        derivative_path: bool,
        sp: &PairBlock,
        tp: &PairBlock,
        x: &[f64],
        y: &mut [f64],
    ) {
        let tmat: &CsrMatrix = if derivative_path {
            self.derivative_t
        } else {
            self.mass_t
        };
        let rows = (tp.t_offset, tp.t_offset + tp.t_size);
        let cols = (sp.t_offset, sp.t_offset + sp.t_size);
        let x_block = &x[sp.offset..sp.offset + sp.nx * sp.t_size];
        let mut flops = 0u64;

        if sp.nx <= tp.nx {
            // Temporal contraction at the coarser (source) spatial size,
            // then prolong each result column and pair at the target level.
            self.tbuf.resize(sp.nx * tp.t_size, 0.0);
            self.tbuf.iter_mut().for_each(|v| *v = 0.0);
            flops += temporal_block_multiply(tmat, rows, cols, x_block, sp.nx, &mut self.tbuf);
            let s_tgt = if derivative_path {
                &self.spatial[(tp.x_level - self.layout.coarsest) as usize].mass
            } else {
                &self.spatial[(tp.x_level - self.layout.coarsest) as usize].stiffness
            };
            for k in 0..tp.t_size {
                self.cbuf_a[..sp.nx].copy_from_slice(&self.tbuf[k * sp.nx..(k + 1) * sp.nx]);
                flops += prolong_range(sp.x_level, tp.x_level, &mut self.cbuf_a, &mut self.cbuf_b);
                s_tgt.matvec(&self.cbuf_a[..tp.nx], &mut self.cbuf_b[..tp.nx]);
                let y_col = &mut y[tp.offset + k * tp.nx..tp.offset + (k + 1) * tp.nx];
                for (yv, &bv) in y_col.iter_mut().zip(self.cbuf_b.iter()) {
                    *yv += bv;
                }
                flops += 2 * s_tgt.nnz() as u64 + tp.nx as u64;
            }
        } else {
            // Pair at the finer (source) level, restrict, then contract in
            // time at the coarser (target) spatial size.
            let s_src = if derivative_path {
                &self.spatial[(sp.x_level - self.layout.coarsest) as usize].mass
            } else {
                &self.spatial[(sp.x_level - self.layout.coarsest) as usize].stiffness
            };
            self.tbuf.resize(tp.nx * sp.t_size, 0.0);
            for k in 0..sp.t_size {
                s_src.matvec(&x_block[k * sp.nx..(k + 1) * sp.nx], &mut self.cbuf_a[..sp.nx]);
                flops += 2 * s_src.nnz() as u64;
                flops +=
                    restrict_range(sp.x_level, tp.x_level, &mut self.cbuf_a, &mut self.cbuf_b);
                self.tbuf[k * tp.nx..(k + 1) * tp.nx].copy_from_slice(&self.cbuf_a[..tp.nx]);
            }
            let y_block = &mut y[tp.offset..tp.offset + tp.nx * tp.t_size];
            flops += temporal_block_multiply(tmat, rows, cols, &self.tbuf, tp.nx, y_block);
        }
        self.flops += flops;
    }
}

/// Expands a packed sparse-layout vector onto the full tensor grid at the
/// finest spatial level (column-major, spatial index fastest).
pub fn embed(layout: &BlockLayout, x: &[f64]) -> Vec<f64> {
    let nx = layout.finest_nx();
    let nt = layout.nt();
    let mut full = vec![0.0; nx * nt];
    let mut a = vec![0.0; nx];
    let mut b = vec![0.0; nx];
    for p in &layout.pairs {
        for k in 0..p.t_size {
            a[..p.nx].copy_from_slice(&x[p.offset + k * p.nx..p.offset + (k + 1) * p.nx]);
            prolong_range(p.x_level, layout.max_level, &mut a, &mut b);
            let col = p.t_offset + k;
            full[col * nx..(col + 1) * nx].copy_from_slice(&a[..nx]);
        }
    }
    full
}

/// Adjoint of [`embed`]: restricts a full tensor vector into the packed
/// sparse layout.
pub fn embed_adjoint(layout: &BlockLayout, full: &[f64]) -> Vec<f64> {
    let nx = layout.finest_nx();
    let mut out = vec![0.0; layout.total];
    let mut a = vec![0.0; nx];
    let mut b = vec![0.0; nx];
    for p in &layout.pairs {
        for k in 0..p.t_size {
            let col = p.t_offset + k;
            a[..nx].copy_from_slice(&full[col * nx..(col + 1) * nx]);
            restrict_range(layout.max_level, p.x_level, &mut a, &mut b);
            out[p.offset + k * p.nx..p.offset + (k + 1) * p.nx].copy_from_slice(&a[..p.nx]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::{compressed_form, FormKind};
    use crate::fem::kron;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vector(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn full_apply_matches_dense_kronecker() {
        let basis = MultiscaleBasis::new(2, 3).unwrap();
        let (_, at) = compressed_form(&basis, FormKind::Derivative);
        let (_, mt) = compressed_form(&basis, FormKind::Mass);
        let spatial = assemble_spatial(2);
        let mut sys = FullSystem::new(&spatial, &at, &mt);

        let x = random_vector(sys.len(), 7);
        let mut y = vec![0.0; sys.len()];
        sys.apply(&x, &mut y);
        assert!(sys.flops > 0);

        let dense = kron(&at, &spatial.mass)
            .linear_combination(1.0, &kron(&mt, &spatial.stiffness), 1.0);
        let mut y_ref = vec![0.0; sys.len()];
        dense.matvec(&x, &mut y_ref);
        for i in 0..y.len() {
            assert_abs_diff_eq!(y[i], y_ref[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn sparse_layout_counts_complementary_grids() {
        let basis = MultiscaleBasis::new(4, 8).unwrap();
        let layout = sparse_layout(&basis);
        assert_eq!(layout.total, 764_160);
        let full = layout.finest_nx() * layout.nt();
        assert_eq!(full, 16_646_400);
        assert!((layout.total as f64) < 0.10 * full as f64);
    }

    #[test]
    fn sparse_apply_matches_embedded_full_operator() {
        let basis = MultiscaleBasis::new(4, 6).unwrap();
        let (_, at) = compressed_form(&basis, FormKind::Derivative);
        let (_, mt) = compressed_form(&basis, FormKind::Mass);

        let mut sparse = SparseSystem::new(&basis, &at, &mt);
        let x = random_vector(sparse.len(), 11);
        let mut y = vec![0.0; sparse.len()];
        sparse.apply(&x, &mut y);
        assert!(sparse.flops > 0);

        let spatial_fine = assemble_spatial(6);
        let mut full = FullSystem::new(&spatial_fine, &at, &mt);
        let x_full = embed(&sparse.layout, &x);
        let mut y_full = vec![0.0; full.len()];
        full.apply(&x_full, &mut y_full);
        let y_ref = embed_adjoint(&sparse.layout, &y_full);

        let scale = y_ref.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        for i in 0..y.len() {
            assert_abs_diff_eq!(y[i], y_ref[i], epsilon = 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn embed_and_adjoint_are_transposes() {
        let basis = MultiscaleBasis::new(4, 5).unwrap();
        let layout = sparse_layout(&basis);
        let x = random_vector(layout.total, 3);
        let yf = random_vector(layout.finest_nx() * layout.nt(), 4);
        let ex = embed(&layout, &x);
        let ay = embed_adjoint(&layout, &yf);
        let lhs: f64 = ex.iter().zip(yf.iter()).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(ay.iter()).map(|(a, b)| a * b).sum();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
    }
}
