//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Used for covariance matrices in PCA, where symmetry is structural.
//! Jacobi is slower than tridiagonalization but unconditionally stable,
//! trivially correct to audit, and independent of the Hessenberg/QR path
//! used for general matrices — which makes the two solvers useful as
//! cross-checks on each other.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

use super::Matrix;

/// Eigenvalues (descending) and orthonormal eigenvectors (as matrix
/// columns, same order) of a symmetric matrix.
///
/// Symmetry is checked up to a small relative tolerance; asymmetric input
/// is a dimension error, not silently symmetrized. Each eigenvector's
/// sign is fixed so its largest-magnitude entry is positive.
pub fn symmetric_eigen<T: Scalar>(m: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>)> {
    if !m.is_square() {
        return Err(Error::dim(
            "symmetric_eigen",
            format!("{}x{} is not square", m.rows(), m.cols()),
        ));
    }
    m.ensure_finite("symmetric_eigen")?;
    let n = m.rows();
    let scale = m.max_abs().max(T::one());
    let sym_tol = scale * lit::<T>(1e-8).max(T::epsilon() * lit(64.0));
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > sym_tol {
                return Err(Error::dim(
                    "symmetric_eigen",
                    format!("entry ({i},{j}) differs from its transpose beyond tolerance"),
                ));
            }
        }
    }

    let mut a = m.clone();
    let mut v = Matrix::<T>::identity(n);
    let off_tol = T::epsilon() * m.frobenius_norm().max(T::min_positive_value());

    let max_sweeps = 100;
    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= off_tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= off_tol * lit(1e-3) {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (lit::<T>(2.0) * apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                // A ← JᵀAJ with J the (p,q) rotation.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::Convergence {
            op: "symmetric_eigen",
            details: format!("Jacobi did not converge in {max_sweeps} sweeps"),
        });
    }

    // Sort descending and fix signs deterministically.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap().then(i.cmp(&j)));
    let values: Vec<T> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::<T>::zeros(n, n);
    for (out_col, &src_col) in order.iter().enumerate() {
        let mut max_idx = 0;
        let mut max_abs = T::zero();
        for k in 0..n {
            let x = v[(k, src_col)].abs();
            if x > max_abs {
                max_abs = x;
                max_idx = k;
            }
        }
        let flip = v[(max_idx, src_col)] < T::zero();
        for k in 0..n {
            let x = v[(k, src_col)];
            vectors[(k, out_col)] = if flip { -x } else { x };
        }
    }
    Ok((values, vectors))
}
