//! Right-preconditioned GMRES without restarts.
//!
//! The Krylov space is built for `A·C⁻¹` with modified Gram–Schmidt
//! orthogonalization and Givens rotations on the Hessenberg matrix, so the
//! monitored quantity is the true relative residual `‖b − A x‖/‖b‖`.  The
//! returned iterate applies the preconditioner once to the Krylov
//! combination, keeping one basis vector per iteration in memory.

use crate::{Error, Result};

/// Iteration report of a [`gmres`] run.
#[derive(Debug, Clone)]
pub struct GmresReport {
    pub iterations: usize,
    /// Relative residual after each iteration (starting value 1 omitted).
    pub residuals: Vec<f64>,
}

/// Solves `A x = b` with right preconditioner `C⁻¹`, initial guess zero.
///
/// `apply` computes `y = A x`; `precondition` computes `y = C⁻¹ x`.  Stops
/// when the relative residual drops below `tol`; exceeding `max_iterations`
/// returns [`Error::NoConvergence`] carrying the residual history.
pub fn gmres<A, P>(
    mut apply: A,
    mut precondition: P,
    b: &[f64],
    tol: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, GmresReport)>
where
    A: FnMut(&[f64], &mut [f64]),
    P: FnMut(&[f64], &mut [f64]),
{
    let n = b.len();
    let beta = norm(b);
    if beta == 0.0 {
        return Ok((
            vec![0.0; n],
            GmresReport {
                iterations: 0,
                residuals: Vec::new(),
            },
        ));
    }

    let mut basis: Vec<Vec<f64>> = vec![b.iter().map(|v| v / beta).collect()];
    let mut hessenberg: Vec<Vec<f64>> = Vec::new(); // column-wise, rotated
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut gamma = vec![beta];
    let mut residuals = Vec::new();

    let mut scratch = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut iterations = 0;
    loop {
        if iterations == max_iterations {
            return Err(Error::NoConvergence {
                solver: "gmres",
                iterations,
                residual: residuals.last().copied().unwrap_or(1.0),
            });
        }
        let k = iterations;
        precondition(&basis[k], &mut scratch);
        apply(&scratch, &mut w);

        // Modified Gram-Schmidt against the existing basis.
        let mut h = vec![0.0; k + 2];
        for (i, v) in basis.iter().enumerate() {
            let hik = dot(v, &w);
            h[i] = hik;
            for (we, ve) in w.iter_mut().zip(v) {
                *we -= hik * ve;
            }
        }
        let hnext = norm(&w);
        h[k + 1] = hnext;

        // Apply the accumulated rotations, then a new one to annihilate
        // the subdiagonal entry.
        for i in 0..k {
            let t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        let r = (h[k] * h[k] + h[k + 1] * h[k + 1]).sqrt();
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (h[k] / r, h[k + 1] / r) };
        cs.push(c);
        sn.push(s);
        h[k] = r;
        h[k + 1] = 0.0;
        gamma.push(-s * gamma[k]);
        gamma[k] *= c;
        hessenberg.push(h);
        iterations += 1;
        residuals.push(gamma[k + 1].abs() / beta);

        let converged = residuals[k] <= tol;
        let stagnated = hnext == 0.0;
        if converged || stagnated {
            // Back-substitute for the Krylov coefficients.
            let m = iterations;
            let mut y = vec![0.0; m];
            for i in (0..m).rev() {
                let mut s = gamma[i];
                for (jj, yj) in y.iter().enumerate().skip(i + 1) {
                    s -= hessenberg[jj][i] * yj;
                }
                y[i] = s / hessenberg[i][i];
            }
            let mut z = vec![0.0; n];
            for (yi, v) in y.iter().zip(&basis) {
                for (ze, ve) in z.iter_mut().zip(v) {
                    *ze += yi * ve;
                }
            }
            precondition(&z, &mut scratch);
            if !converged {
                return Err(Error::NoConvergence {
                    solver: "gmres",
                    iterations,
                    residual: residuals[m - 1],
                });
            }
            return Ok((
                scratch,
                GmresReport {
                    iterations,
                    residuals,
                },
            ));
        }

        let next: Vec<f64> = w.iter().map(|v| v / hnext).collect();
        basis.push(next);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};

    fn identity_pre(x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }

    #[test]
    fn identity_operator_converges_in_one_step() {
        let b = vec![1.0, -2.0, 3.0];
        let (x, rep) = gmres(
            |v: &[f64], out: &mut [f64]| out.copy_from_slice(v),
            identity_pre,
            &b,
            1e-12,
            10,
        )
        .unwrap();
        assert_eq!(rep.iterations, 1);
        for i in 0..3 {
            assert_abs_diff_eq!(x[i], b[i], epsilon = 1e-13);
        }
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let b = vec![0.0; 4];
        let (x, rep) = gmres(
            |v: &[f64], out: &mut [f64]| out.copy_from_slice(v),
            identity_pre,
            &b,
            1e-12,
            10,
        )
        .unwrap();
        assert_eq!(rep.iterations, 0);
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unsymmetric_dense_system_matches_direct_solve() {
        let n = 24;
        let a = DMatrix::from_fn(n, n, |i, j| {
            let base = if i == j { 4.0 } else { 0.0 };
            base + 1.0 / (1.0 + (i as f64 - j as f64).abs().powi(2)) * if i < j { 0.7 } else { 0.3 }
        });
        let b: Vec<f64> = (0..n).map(|i| (0.3 * i as f64).sin() + 0.5).collect();
        let (x, rep) = gmres(
            |v: &[f64], out: &mut [f64]| {
                let r = &a * DVector::from_column_slice(v);
                out.copy_from_slice(r.as_slice());
            },
            identity_pre,
            &b,
            1e-11,
            200,
        )
        .unwrap();
        let xd = a.clone().lu().solve(&DVector::from_column_slice(&b)).unwrap();
        for i in 0..n {
            assert_abs_diff_eq!(x[i], xd[i], epsilon = 1e-8);
        }
        assert!(rep.iterations <= n);
    }

    #[test]
    fn residual_history_is_monotone() {
        let n = 40;
        let a = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0 + (i as f64 * 0.1).sin()
            } else if i.abs_diff(j) == 1 {
                -0.9
            } else {
                0.0
            }
        });
        let b: Vec<f64> = (0..n).map(|i| ((i * 13 + 3) % 17) as f64 - 8.0).collect();
        let (_, rep) = gmres(
            |v: &[f64], out: &mut [f64]| {
                let r = &a * DVector::from_column_slice(v);
                out.copy_from_slice(r.as_slice());
            },
            identity_pre,
            &b,
            1e-10,
            200,
        )
        .unwrap();
        for pair in rep.residuals.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn preconditioner_accelerates_and_result_is_unchanged() {
        let n = 32;
        let diag: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * i as f64).collect();
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..n {
                out[i] = diag[i] * v[i];
                if i > 0 {
                    out[i] += 0.1 * v[i - 1];
                }
            }
        };
        let b: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64).cos()).collect();
        let (x_plain, rep_plain) = gmres(apply, identity_pre, &b, 1e-12, 200).unwrap();
        let (x_pre, rep_pre) = gmres(
            apply,
            |v: &[f64], out: &mut [f64]| {
                for i in 0..n {
                    out[i] = v[i] / diag[i];
                }
            },
            &b,
            1e-12,
            200,
        )
        .unwrap();
        assert!(rep_pre.iterations < rep_plain.iterations);
        for i in 0..n {
            assert_abs_diff_eq!(x_pre[i], x_plain[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn iteration_cap_reports_nonconvergence() {
        let n = 30;
        // Shifted cyclic permutation: GMRES makes no progress until step n.
        let apply = move |v: &[f64], out: &mut [f64]| {
            for i in 0..n {
                out[(i + 1) % n] = v[i];
            }
        };
        let b: Vec<f64> = {
            let mut b = vec![0.0; n];
            b[0] = 1.0;
            b
        };
        let err = gmres(apply, identity_pre, &b, 1e-12, 5).unwrap_err();
        match err {
            Error::NoConvergence {
                solver, iterations, ..
            } => {
                assert_eq!(solver, "gmres");
                assert_eq!(iterations, 5);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
