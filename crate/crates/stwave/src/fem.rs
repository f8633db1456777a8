//! Bilinear (Q1) finite elements on the unit interval and unit square with
//! homogeneous Dirichlet boundary conditions on dyadic grids.
//!
//! Level `ℓ` uses cells of width `h = 2⁻ˡ`.  Only interior nodes carry
//! degrees of freedom: `2ˡ − 1` of them in 1D and `(2ˡ − 1)²` in 2D, with the
//! 2D flat index running fastest in the `x₁` direction.  The 2D mass and
//! stiffness matrices are Kronecker products of the exact 1D ones, and the
//! inter-grid transfers are the nodal interpolation stencils `(½, 1, ½)`
//! (tensorized in 2D) with restriction as the exact transpose.

use crate::csr::CsrMatrix;

/// Interior node count `2ˡ − 1` of the 1D grid at `level`.
pub fn interior_len_1d(level: u32) -> usize {
    (1usize << level) - 1
}

/// Interior node count `(2ˡ − 1)²` of the 2D grid at `level`.
pub fn interior_len_2d(level: u32) -> usize {
    let n = interior_len_1d(level);
    n * n
}

/// Exact 1D mass matrix `(h/6)·tridiag(1, 4, 1)` on interior nodes.
pub fn mass_1d(level: u32) -> CsrMatrix {
    let h = 0.5f64.powi(level as i32);
    tridiag(interior_len_1d(level), h / 6.0, 4.0 * h / 6.0)
}

/// Exact 1D stiffness matrix `(1/h)·tridiag(−1, 2, −1)` on interior nodes.
pub fn stiffness_1d(level: u32) -> CsrMatrix {
    let h = 0.5f64.powi(level as i32);
    tridiag(interior_len_1d(level), -1.0 / h, 2.0 / h)
}

fn tridiag(n: usize, off: f64, diag: f64) -> CsrMatrix {
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            t.push((i, i - 1, off));
        }
        t.push((i, i, diag));
        if i + 1 < n {
            t.push((i, i + 1, off));
        }
    }
    CsrMatrix::from_triplets(n, n, t)
}

/// Eigenvalue `(4/h)·sin²(kπh/2)` of the 1D stiffness matrix, `k = 1..2ˡ−1`.
pub fn stiffness_eigenvalue_1d(level: u32, k: usize) -> f64 {
    let h = 0.5f64.powi(level as i32);
    let s = (0.5 * k as f64 * std::f64::consts::PI * h).sin();
    4.0 / h * s * s
}

/// Eigenvalue `(h/3)·(2 + cos kπh)` of the 1D mass matrix, `k = 1..2ˡ−1`.
pub fn mass_eigenvalue_1d(level: u32, k: usize) -> f64 {
    let h = 0.5f64.powi(level as i32);
    h / 3.0 * (2.0 + (k as f64 * std::f64::consts::PI * h).cos())
}

/// Mass and stiffness matrices of the 2D grid at one level.
#[derive(Debug, Clone)]
pub struct SpatialOperators {
    pub level: u32,
    /// `M₁ ⊗ M₁`.
    pub mass: CsrMatrix,
    /// `A₁ ⊗ M₁ + M₁ ⊗ A₁` (the `−Δ` form).
    pub stiffness: CsrMatrix,
}

/// Assembles the 2D Q1 matrices at `level ≥ 1` as Kronecker products of the
/// exact 1D factors.
pub fn assemble_spatial(level: u32) -> SpatialOperators {
    assert!(level >= 1, "2D grid needs at least one interior node");
    let m1 = mass_1d(level);
    let a1 = stiffness_1d(level);
    let mass = kron(&m1, &m1);
    let stiffness = kron(&a1, &m1).linear_combination(1.0, &kron(&m1, &a1), 1.0);
    SpatialOperators {
        level,
        mass,
        stiffness,
    }
}

/// Kronecker product `A ⊗ B` of sparse matrices; the row/column flat index is
/// `i_A·nrows(B) + i_B`, so `B` acts on the faster-running index.
pub fn kron(a: &CsrMatrix, b: &CsrMatrix) -> CsrMatrix {
    let mut t = Vec::with_capacity(a.nnz() * b.nnz());
    for ra in 0..a.nrows {
        let (ca, va) = a.row(ra);
        for rb in 0..b.nrows {
            let (cb, vb) = b.row(rb);
            for (&ja, &xa) in ca.iter().zip(va) {
                for (&jb, &xb) in cb.iter().zip(vb) {
                    t.push((ra * b.nrows + rb, ja * b.ncols + jb, xa * xb));
                }
            }
        }
    }
    CsrMatrix::from_triplets(a.nrows * b.nrows, a.ncols * b.ncols, t)
}

/// 1D prolongation from `level` to `level + 1`: even fine nodes copy the
/// coarse value, odd fine nodes average their coarse neighbours.
pub fn prolongate_1d(level: u32, coarse: &[f64], fine: &mut [f64]) {
    let nc = interior_len_1d(level);
    let nf = interior_len_1d(level + 1);
    assert_eq!(coarse.len(), nc, "coarse length");
    assert_eq!(fine.len(), nf, "fine length");
    for (m, f) in fine.iter_mut().enumerate() {
        let node = m + 1;
        *f = if node % 2 == 0 {
            coarse[node / 2 - 1]
        } else {
            let left = if node > 1 { coarse[node / 2 - 1] } else { 0.0 };
            let right = if node / 2 < nc { coarse[node / 2] } else { 0.0 };
            0.5 * (left + right)
        };
    }
}

/// Transpose of [`prolongate_1d`]; accumulates nothing, overwrites `coarse`.
pub fn restrict_1d(level: u32, fine: &[f64], coarse: &mut [f64]) {
    let nc = interior_len_1d(level);
    let nf = interior_len_1d(level + 1);
    assert_eq!(coarse.len(), nc, "coarse length");
    assert_eq!(fine.len(), nf, "fine length");
    for (k, c) in coarse.iter_mut().enumerate() {
        let node = 2 * (k + 1);
        let mut s = fine[node - 1];
        s += 0.5 * fine[node - 2];
        if node < nf {
            s += 0.5 * fine[node];
        }
        *c = s;
    }
}

/// 2D prolongation (tensorized 1D stencil), applied one direction at a time.
pub fn prolongate_2d(level: u32, coarse: &[f64], fine: &mut [f64]) {
    let nc = interior_len_1d(level);
    let nf = interior_len_1d(level + 1);
    assert_eq!(coarse.len(), nc * nc, "coarse length");
    assert_eq!(fine.len(), nf * nf, "fine length");
    // Pass 1: prolong along x within each coarse row.
    let mut mid = vec![0.0; nf * nc];
    for row in 0..nc {
        prolongate_1d(level, &coarse[row * nc..(row + 1) * nc], &mut mid[row * nf..(row + 1) * nf]);
    }
    // Pass 2: prolong along y within each fine column.
    let mut col_c = vec![0.0; nc];
    let mut col_f = vec![0.0; nf];
    for x in 0..nf {
        for row in 0..nc {
            col_c[row] = mid[row * nf + x];
        }
        prolongate_1d(level, &col_c, &mut col_f);
        for row in 0..nf {
            fine[row * nf + x] = col_f[row];
        }
    }
}

/// Transpose of [`prolongate_2d`].
pub fn restrict_2d(level: u32, fine: &[f64], coarse: &mut [f64]) {
    let nc = interior_len_1d(level);
    let nf = interior_len_1d(level + 1);
    assert_eq!(coarse.len(), nc * nc, "coarse length");
    assert_eq!(fine.len(), nf * nf, "fine length");
    // Pass 1: restrict along y within each fine column.
    let mut mid = vec![0.0; nc * nf];
    let mut col_f = vec![0.0; nf];
    let mut col_c = vec![0.0; nc];
    for x in 0..nf {
        for row in 0..nf {
            col_f[row] = fine[row * nf + x];
        }
        restrict_1d(level, &col_f, &mut col_c);
        for row in 0..nc {
            mid[row * nf + x] = col_c[row];
        }
    }
    // Pass 2: restrict along x within each coarse row.
    for row in 0..nc {
        restrict_1d(level, &mid[row * nf..row * nf + nf], &mut coarse[row * nc..(row + 1) * nc]);
    }
}

/// 1D prolongation as an explicit sparse matrix (used by tests and by the
/// Galerkin-identity checks; the solvers use the matrix-free form).
pub fn prolongation_matrix_1d(level: u32) -> CsrMatrix {
    let nc = interior_len_1d(level);
    let nf = interior_len_1d(level + 1);
    let mut t = Vec::with_capacity(3 * nc);
    for k in 0..nc {
        let node = 2 * (k + 1);
        t.push((node - 2, k, 0.5));
        t.push((node - 1, k, 1.0));
        if node < nf {
            t.push((node, k, 0.5));
        }
    }
    CsrMatrix::from_triplets(nf, nc, t)
}

/// 2D prolongation matrix `P₁ ⊗ P₁`.
pub fn prolongation_matrix_2d(level: u32) -> CsrMatrix {
    let p = prolongation_matrix_1d(level);
    kron(&p, &p)
}

/// `⟨φ_k, sin(a·)⟩` for every interior hat at the given level, in closed
/// form: `sin(a x_k) · 4 sin²(ah/2) / (a²h)`.
pub fn sine_moments_1d(level: u32, freq: f64) -> Vec<f64> {
    let h = 0.5f64.powi(level as i32);
    let shape = 4.0 * (0.5 * freq * h).sin().powi(2) / (freq * freq * h);
    (1..=interior_len_1d(level))
        .map(|k| (freq * k as f64 * h).sin() * shape)
        .collect()
}
