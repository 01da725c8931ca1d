//! Principal component analysis on row-sample data matrices.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

use super::{symmetric_eigen, Matrix};

/// A fitted PCA basis: the top-k covariance eigenvectors plus the data
/// mean they were centered on.
#[derive(Debug, Clone)]
pub struct Pca<T> {
    components: Matrix<T>,
    eigenvalues: Vec<T>,
    mean: Vec<T>,
}

impl<T: Scalar> Pca<T> {
    /// Component directions as a k×d matrix, one unit row per component,
    /// ordered by explained variance descending.
    pub fn components(&self) -> &Matrix<T> {
        &self.components
    }

    /// Covariance eigenvalues for the kept components, descending.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Mean row subtracted before projection.
    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    /// Project rows of `data` (m×d) onto the basis, yielding m×k scores.
    pub fn project(&self, data: &Matrix<T>) -> Result<Matrix<T>> {
        let d = self.components.cols();
        if data.cols() != d {
            return Err(Error::dim(
                "pca_project",
                format!("data has {} columns, basis expects {d}", data.cols()),
            ));
        }
        let mut centered = data.clone();
        for i in 0..centered.rows() {
            for j in 0..d {
                centered[(i, j)] -= self.mean[j];
            }
        }
        centered.matmul_transb(&self.components)
    }
}

/// Project `points` (m×d) onto their top-k principal components in one
/// call, returning the m×k scores and the explained variances
/// (covariance eigenvalues, non-increasing).
pub fn pca_project<T: Scalar>(points: &Matrix<T>, k: usize) -> Result<(Matrix<T>, Vec<T>)> {
    let fit = pca(points, k)?;
    let scores = fit.project(points)?;
    Ok((scores, fit.eigenvalues))
}

/// Fit a k-component PCA to an m×d data matrix (rows are samples).
///
/// The covariance is the sample covariance (divisor m−1), so at least two
/// rows are required. Component signs follow the convention of
/// [`symmetric_eigen`]: largest-magnitude entry positive.
pub fn pca<T: Scalar>(data: &Matrix<T>, k: usize) -> Result<Pca<T>> {
    let (m, d) = data.shape();
    if m < 2 {
        return Err(Error::dim(
            "pca",
            format!("need at least 2 sample rows, got {m}"),
        ));
    }
    if k == 0 || k > d {
        return Err(Error::dim(
            "pca",
            format!("component count {k} not in 1..={d}"),
        ));
    }
    data.ensure_finite("pca")?;

    let mut mean = vec![T::zero(); d];
    for i in 0..m {
        for j in 0..d {
            mean[j] += data[(i, j)];
        }
    }
    let m_t = lit::<T>(m as f64);
    for v in mean.iter_mut() {
        *v = *v / m_t;
    }

    let mut centered = data.clone();
    for i in 0..m {
        for j in 0..d {
            centered[(i, j)] -= mean[j];
        }
    }
    let cov = centered
        .matmul_transa(&centered)?
        .scale(T::one() / lit::<T>((m - 1) as f64));

    let (vals, vecs) = symmetric_eigen(&cov)?;
    let mut components = Matrix::<T>::zeros(k, d);
    for c in 0..k {
        for j in 0..d {
            components[(c, j)] = vecs[(j, c)];
        }
    }
    Ok(Pca {
        components,
        eigenvalues: vals[..k].to_vec(),
        mean,
    })
}
