//! Space-time Galerkin solver for parabolic evolution problems.
//!
//! The heat equation `∂_t u − Δu = f` on `Q = Ω × (0,T)` admits a coercive
//! space-time variational formulation once the test function is transformed
//! by the modified Hilbert transform `𝓗_T`, defined through the eigenbasis
//! `sin((π/2 + ℓπ)t/T)` ↦ `cos((π/2 + ℓπ)t/T)`.  Discretizing time with
//! piecewise-linear spline wavelets and space with bilinear finite elements
//! yields the block system
//!
//! ```text
//!   (A_t ⊗ M_x + M_t ⊗ A_x) u = f,
//! ```
//!
//! where `A_t = ⟨∂_t φ, 𝓗_T φ⟩` is symmetric positive definite and
//! `M_t = ⟨φ, 𝓗_T φ⟩` is nonsymmetric but positive.  The temporal matrices
//! are dense — `𝓗_T` is nonlocal — but in a wavelet basis with vanishing
//! moments their entries decay like Calderón–Zygmund operators, so an
//! a-priori cut-off pattern retains only `O(N)` entries without degrading
//! the Galerkin convergence rates.
//!
//! What this crate provides, bottom-up:
//!
//! - [`quad`], [`piecewise`], [`logkernel`]: quadrature machinery that
//!   reduces every kernel pairing to 1-D integrals against
//!   `ln tan(πu/4)` with exact endpoint-singularity handling.
//! - [`kernel`]: the eigenpairs of `𝓗_T`, its kernel representations, and
//!   spectral (sine/cosine series) application and assembly oracles.
//! - [`mesh`], [`wavelet`]: dyadic temporal meshes, boundary-adapted
//!   piecewise-linear wavelets with 2 or 4 vanishing moments given by exact
//!   rational stencils, and `O(N)` multiscale transforms.
//! - [`assembly`]: dense single-scale/wavelet assembly of `A_t`, `M_t`
//!   (`O(N)` distinct integrals via translation structure) and single-entry
//!   assembly at arbitrary level pairs for compressed matrices.
//! - [`compress`]: the two-step a-priori compression pattern (support
//!   distance and singular-support distance cut-offs) and compressed
//!   assembly.
//! - [`dissection`]: nested-dissection ordering on the dyadic wavelet tree
//!   and a no-pivot sparse LU with fill accounting.
//! - [`fem`]: Q1 finite elements on the unit interval/square with nested
//!   dyadic refinement and exact Galerkin transfer operators.
//! - [`system`], [`bpx`], [`gmres`]: full and sparse tensor-product
//!   operators (`vec` trick, block matvec), a wavelet-in-time/multilevel-
//!   in-space preconditioner of BPX type, and right-preconditioned GMRES.
//! - [`rhs`], [`norms`], [`oscillatory`]: load-vector assembly and
//!   `L²/H¹/H^{1/2}/L²(Q)` error functionals, built on robust oscillatory
//!   (Filon-type) moment computation.
//! - [`condition`], [`experiments`]: spectral condition-number studies and
//!   the driver routines behind the `ode1d`, `cond` and `heat2d`
//!   command-line experiments, all emitting plain CSV.
//!
//! Every runnable capability has an example under `examples/`; start with
//! `ode_convergence` and `heat_sparse`.

pub mod assembly;
pub mod banded;
pub mod bpx;
pub mod compress;
pub mod condition;
pub mod csr;
pub mod csvio;
pub mod dissection;
pub mod experiments;
pub mod fem;
pub mod gmres;
pub mod kernel;
pub mod logkernel;
pub mod mesh;
pub mod norms;
pub mod oscillatory;
pub mod piecewise;
pub mod quad;
pub mod rhs;
pub mod system;
pub mod wavelet;

mod error;

pub use error::{Error, Result};
