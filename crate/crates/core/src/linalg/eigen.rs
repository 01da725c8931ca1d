//! Eigenvalues of dense non-symmetric real matrices.
//!
//! The pipeline is the classic robust recipe: Parlett-Reinsch balancing,
//! Householder reduction to upper Hessenberg form, then Francis
//! double-shift QR iteration to real Schur form. 1×1 diagonal blocks give
//! real eigenvalues, 2×2 blocks give conjugate pairs. Eigenvectors are not
//! produced here; the residual sanity check and the eigen-domain filter
//! analysis obtain them by complex inverse iteration on the original
//! matrix, which keeps the two routes independent.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

use super::Matrix;

/// Modulus of a complex value, spelled out so results round identically
/// on every platform (`hypot` is not pinned by IEEE 754).
pub fn modulus<T: Scalar>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Complex eigenvalues of a square matrix, sorted by modulus descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum<T> {
    values: Vec<Complex<T>>,
    source_dim: usize,
}

impl<T: Scalar> EigenSpectrum<T> {
    /// The eigenvalues, largest modulus first.
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// Dimension of the matrix the spectrum came from.
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    /// Eigenvalue moduli, descending.
    pub fn moduli(&self) -> Vec<T> {
        self.values.iter().map(|&z| modulus(z)).collect()
    }

    /// Largest modulus (spectral radius), zero for an empty spectrum.
    pub fn spectral_radius(&self) -> T {
        self.values.first().map_or(T::zero(), |&z| modulus(z))
    }

    /// Moduli with exactly one entry kept per conjugate pair, descending.
    ///
    /// Two eigenvalues count as a pair when one matches the conjugate of
    /// the other within an absolute 1e-9 (floored at a few machine
    /// epsilons for narrow scalar types). Real eigenvalues each keep
    /// their own entry.
    pub fn unique_moduli(&self) -> Vec<T> {
        let tol = lit::<T>(1e-9).max(T::epsilon() * lit(8.0));
        let n = self.values.len();
        let mut used = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if used[i] {
                continue;
            }
            let v = self.values[i];
            out.push(modulus(v));
            if v.im != T::zero() {
                let conj = v.conj();
                let pair_tol = tol * (T::one() + modulus(v));
                for j in i + 1..n {
                    if !used[j] && modulus(self.values[j] - conj) <= pair_tol {
                        used[j] = true;
                        break;
                    }
                }
            }
        }
        out
    }

    /// Sum of the eigenvalues (complex; imaginary parts of pairs cancel).
    pub fn sum(&self) -> Complex<T> {
        self.values
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &z| acc + z)
    }

    /// Product of the eigenvalues.
    pub fn product(&self) -> Complex<T> {
        self.values
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |acc, &z| acc * z)
    }

    fn from_values(mut values: Vec<Complex<T>>, source_dim: usize) -> Self {
        values.sort_by(|a, b| {
            let (ma, mb) = (modulus(*a), modulus(*b));
            mb.partial_cmp(&ma)
                .unwrap()
                .then(b.re.partial_cmp(&a.re).unwrap())
                .then(b.im.partial_cmp(&a.im).unwrap())
        });
        EigenSpectrum { values, source_dim }
    }
}

/// Collapse conjugate pairs of a spectrum to single moduli entries.
pub fn unique_moduli<T: Scalar>(spectrum: &EigenSpectrum<T>) -> Vec<T> {
    spectrum.unique_moduli()
}

/// All eigenvalues of a square matrix, modulus-sorted descending.
///
/// Residuals of a sample of the returned eigenvalues are verified by
/// inverse iteration against `‖Av − λv‖ ≤ tol·(1 + ‖A‖_F)`; a sample that
/// cannot be certified is reported as a convergence error rather than
/// returned silently.
pub fn eigenvalues<T: Scalar>(m: &Matrix<T>) -> Result<EigenSpectrum<T>> {
    if !m.is_square() {
        return Err(Error::dim(
            "eigenvalues",
            format!("{}x{} is not square", m.rows(), m.cols()),
        ));
    }
    m.ensure_finite("eigenvalues")?;
    let n = m.rows();
    if n == 0 {
        return Ok(EigenSpectrum {
            values: Vec::new(),
            source_dim: 0,
        });
    }
    if n == 1 {
        return Ok(EigenSpectrum {
            values: vec![Complex::new(m[(0, 0)], T::zero())],
            source_dim: 1,
        });
    }

    let mut work = m.clone();
    balance(&mut work);
    hessenberg_in_place(&mut work);
    let raw = hqr(&mut work, 30 * n)?;
    let spectrum = EigenSpectrum::from_values(raw, n);

    verify_residual_sample(m, &spectrum)?;
    Ok(spectrum)
}

/// Parlett-Reinsch balancing: diagonal similarity scaling by powers of two
/// until row and column norms agree. Eigenvalues are untouched; rounding
/// behavior of the QR sweep improves markedly for badly scaled inputs.
fn balance<T: Scalar>(a: &mut Matrix<T>) {
    let n = a.rows();
    let radix = lit::<T>(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let mut f = T::one();
            let s = c + r;
            let mut c_scaled = c;
            let mut g = r / radix;
            while c_scaled < g {
                f = f * radix;
                c_scaled = c_scaled * sqrdx;
            }
            g = r * radix;
            while c_scaled > g {
                f = f / radix;
                c_scaled = c_scaled / sqrdx;
            }
            if (c_scaled + r) / f < lit::<T>(0.95) * s {
                done = false;
                let g = T::one() / f;
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] * g;
                }
                for j in 0..n {
                    a[(j, i)] = a[(j, i)] * f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place. The
/// reflectors are not accumulated; only eigenvalues are wanted downstream.
fn hessenberg_in_place<T: Scalar>(a: &mut Matrix<T>) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![T::zero(); n];
    for k in 0..n - 2 {
        // Reflector annihilating column k below the subdiagonal.
        let mut norm2 = T::zero();
        for i in k + 1..n {
            let x = a[(i, k)];
            norm2 += x * x;
        }
        if norm2 == T::zero() {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = if x0 >= T::zero() {
            -norm2.sqrt()
        } else {
            norm2.sqrt()
        };
        let v0 = x0 - alpha;
        let vnorm2 = norm2 - x0 * x0 + v0 * v0;
        if vnorm2 == T::zero() {
            continue;
        }
        v[k + 1] = v0;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let beta = lit::<T>(2.0) / vnorm2;

        // A ← (I − βvvᵀ) A, rows k+1..n, columns k..n.
        for j in k..n {
            let mut dot = T::zero();
            for i in k + 1..n {
                dot += v[i] * a[(i, j)];
            }
            let s = beta * dot;
            for i in k + 1..n {
                a[(i, j)] = a[(i, j)] - s * v[i];
            }
        }
        // A ← A (I − βvvᵀ), all rows, columns k+1..n.
        for i in 0..n {
            let mut dot = T::zero();
            for j in k + 1..n {
                dot += a[(i, j)] * v[j];
            }
            let s = beta * dot;
            for j in k + 1..n {
                a[(i, j)] = a[(i, j)] - s * v[j];
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = T::zero();
        }
    }
}

fn sign_of<T: Scalar>(magnitude: T, sign_source: T) -> T {
    if sign_source >= T::zero() {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues
/// only. `budget` caps the total number of QR sweeps; deflation uses the
/// threshold `|h(l,l-1)| ≤ tol·(|h(l-1,l-1)| + |h(l,l)|)` with
/// `tol = max(1e-12, ε)` so narrow scalar types still deflate.
fn hqr<T: Scalar>(h: &mut Matrix<T>, budget: usize) -> Result<Vec<Complex<T>>> {
    let n = h.rows();
    let tol = lit::<T>(1e-12).max(T::epsilon());
    let mut eigs: Vec<Complex<T>> = Vec::with_capacity(n);

    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[(i, j)].abs();
        }
    }
    if anorm == T::zero() {
        // Zero matrix: all eigenvalues zero.
        return Ok(vec![Complex::new(T::zero(), T::zero()); n]);
    }

    let mut sweeps_used = 0usize;
    let mut nn = n as isize - 1;
    let mut shift_total = T::zero();

    while nn >= 0 {
        let mut its = 0usize;
        loop {
            // Look for a negligible subdiagonal element, bottom up.
            let mut l = 0isize;
            let mut i = nn;
            while i >= 1 {
                let (iu, il) = (i as usize, (i - 1) as usize);
                let mut s = h[(il, il)].abs() + h[(iu, iu)].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if h[(iu, il)].abs() <= tol * s {
                    h[(iu, il)] = T::zero();
                    l = i;
                    break;
                }
                i -= 1;
            }

            let nnu = nn as usize;
            let mut x = h[(nnu, nnu)];
            if l == nn {
                // Single real root.
                eigs.push(Complex::new(x + shift_total, T::zero()));
                nn -= 1;
                break;
            }

            let mut y = h[(nnu - 1, nnu - 1)];
            let mut w = h[(nnu, nnu - 1)] * h[(nnu - 1, nnu)];
            if l == nn - 1 {
                // A 2×2 block: one real pair or one conjugate pair.
                let p = lit::<T>(0.5) * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift_total;
                if q >= T::zero() {
                    let z = p + sign_of(z, p);
                    let first = x + z;
                    let second = if z != T::zero() { x - w / z } else { x + z };
                    eigs.push(Complex::new(first, T::zero()));
                    eigs.push(Complex::new(second, T::zero()));
                } else {
                    eigs.push(Complex::new(x + p, z));
                    eigs.push(Complex::new(x + p, -z));
                }
                nn -= 2;
                break;
            }

            // No root isolated yet: run one double-shift QR sweep.
            if sweeps_used >= budget {
                return Err(Error::Convergence {
                    op: "eigenvalues",
                    details: format!(
                        "QR budget of {} sweeps exhausted with {} eigenvalue(s) pending",
                        budget,
                        nn + 1
                    ),
                });
            }
            if its == 30 {
                return Err(Error::Convergence {
                    op: "eigenvalues",
                    details: "30 sweeps without isolating an eigenvalue".into(),
                });
            }
            if its == 10 || its == 20 {
                // Exceptional shift to break symmetry-induced cycles.
                shift_total += x;
                for i in 0..=nnu {
                    h[(i, i)] -= x;
                }
                let s = h[(nnu, nnu - 1)].abs() + h[(nnu - 1, nnu - 2)].abs();
                x = lit::<T>(0.75) * s;
                y = x;
                w = lit::<T>(-0.4375) * s * s;
            }
            its += 1;
            sweeps_used += 1;

            // Find two consecutive small subdiagonals (start row m).
            let mut m = nn - 2;
            let mut p = T::zero();
            let mut q = T::zero();
            let mut r = T::zero();
            while m >= l {
                let mu = m as usize;
                let z = h[(mu, mu)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[(mu + 1, mu)] + h[(mu, mu + 1)];
                q = h[(mu + 1, mu + 1)] - z - rr - ss;
                r = h[(mu + 2, mu + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == l {
                    break;
                }
                let u = h[(mu, mu - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[(mu - 1, mu - 1)].abs() + z.abs() + h[(mu + 1, mu + 1)].abs());
                if u <= T::epsilon() * v {
                    break;
                }
                m -= 1;
            }
            let mu = m as usize;
            for i in mu + 2..=nnu {
                h[(i, i - 2)] = T::zero();
                if i != mu + 2 {
                    h[(i, i - 3)] = T::zero();
                }
            }

            // Double QR sweep on rows/columns l..=nn.
            let lu = l as usize;
            for k in mu..nnu {
                if k != mu {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if k != nnu - 1 {
                        h[(k + 2, k - 1)]
                    } else {
                        T::zero()
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x != T::zero() {
                        p = p / x;
                        q = q / x;
                        r = r / x;
                    }
                }
                let s = sign_of((p * p + q * q + r * r).sqrt(), p);
                if s == T::zero() {
                    continue;
                }
                if k == mu {
                    if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                } else {
                    h[(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q = q / p;
                r = r / p;
                for j in k..=nnu {
                    let mut pp = h[(k, j)] + q * h[(k + 1, j)];
                    if k != nnu - 1 {
                        pp += r * h[(k + 2, j)];
                        h[(k + 2, j)] -= pp * z;
                    }
                    h[(k + 1, j)] -= pp * y;
                    h[(k, j)] -= pp * x;
                }
                let mmin = nnu.min(k + 3);
                for i in lu..=mmin {
                    let mut pp = x * h[(i, k)] + y * h[(i, k + 1)];
                    if k != nnu - 1 {
                        pp += z * h[(i, k + 2)];
                        h[(i, k + 2)] -= pp * r;
                    }
                    h[(i, k + 1)] -= pp * q;
                    h[(i, k)] -= pp;
                }
            }
        }
    }
    Ok(eigs)
}

/// Check `‖Av − λv‖₂ ≤ tol·(1 + ‖A‖_F)` for a small sample of the
/// spectrum, with eigenvectors from inverse iteration.
fn verify_residual_sample<T: Scalar>(a: &Matrix<T>, spectrum: &EigenSpectrum<T>) -> Result<()> {
    let n = a.rows();
    if n < 2 {
        return Ok(());
    }
    let tol = lit::<T>(1e-8).max(T::epsilon() * lit(32.0 + n as f64)) * (T::one() + a.frobenius_norm());
    let mut sample = vec![0usize, n / 2, n - 1];
    sample.dedup();
    for idx in sample {
        let lambda = spectrum.values()[idx];
        match eigenvector_residual(a, lambda) {
            Some(res) if res <= tol => {}
            Some(res) => {
                return Err(Error::Convergence {
                    op: "eigenvalues",
                    details: format!(
                        "residual {res:?} for sampled eigenvalue {idx} exceeds tolerance {tol:?}"
                    ),
                })
            }
            None => {
                return Err(Error::Convergence {
                    op: "eigenvalues",
                    details: format!("inverse iteration failed for sampled eigenvalue {idx}"),
                })
            }
        }
    }
    Ok(())
}

/// Best residual `‖Av − λv‖₂` (with `‖v‖₂ = 1`) achievable by a few
/// rounds of inverse iteration. `None` when no finite iterate appears.
pub(crate) fn eigenvector_residual<T: Scalar>(a: &Matrix<T>, lambda: Complex<T>) -> Option<T> {
    inverse_iteration(a, lambda, &[]).map(|(_, res)| res)
}

/// Remove the components of `v` along each (unit) vector in `basis`.
fn orthogonalize<T: Scalar>(v: &mut [Complex<T>], basis: &[Vec<Complex<T>>]) {
    for u in basis {
        let mut dot = Complex::new(T::zero(), T::zero());
        for (uv, vv) in u.iter().zip(v.iter()) {
            dot = dot + uv.conj() * *vv;
        }
        for (uv, vv) in u.iter().zip(v.iter_mut()) {
            let sub = dot * *uv;
            *vv = *vv - sub;
        }
    }
}

fn norm2<T: Scalar>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.re * z.re + z.im * z.im).sum()
}

/// Project `v` off the span of `basis` (Gram–Schmidt applied twice — a
/// single pass leaves a useless rounding-noise remainder when `v` is
/// nearly inside the span) and renormalize. Returns `false` when `v`
/// had no usable component outside the span.
fn reorthogonalize<T: Scalar>(v: &mut [Complex<T>], basis: &[Vec<Complex<T>>]) -> bool {
    if basis.is_empty() {
        return normalize(v).is_some();
    }
    let before = norm2(v).sqrt();
    orthogonalize(v, basis);
    orthogonalize(v, basis);
    let after = norm2(v).sqrt();
    if !(after.is_finite() && after > before * lit(1e-8)) {
        return false;
    }
    normalize(v).is_some()
}

/// The coordinate axis with the largest remainder after deflation —
/// a deterministic restart when the default start vector lies in the
/// deflated span. With an orthonormal `basis` of size k < n, some axis
/// always keeps a remainder of at least √((n−k)/n).
fn axis_start<T: Scalar>(n: usize, basis: &[Vec<Complex<T>>]) -> Option<Vec<Complex<T>>> {
    let mut best: Option<(T, Vec<Complex<T>>)> = None;
    for j in 0..n {
        let mut e = vec![Complex::new(T::zero(), T::zero()); n];
        e[j] = Complex::new(T::one(), T::zero());
        orthogonalize(&mut e, basis);
        orthogonalize(&mut e, basis);
        let remainder = norm2(&e);
        if best.as_ref().map_or(true, |(b, _)| remainder > *b) {
            best = Some((remainder, e));
        }
    }
    let (remainder, mut e) = best?;
    if remainder.sqrt() < lit(1e-3) {
        return None;
    }
    normalize(&mut e)?;
    Some(e)
}

/// Complex inverse iteration on a real matrix: returns a unit eigenvector
/// estimate for `lambda` and its residual. The shift is nudged off the
/// exact eigenvalue so the shifted LU stays solvable. For a repeated
/// eigenvalue, pass the already-found unit eigenvectors of the same
/// eigenvalue in `deflate`: iterates are kept orthogonal to them so a
/// semisimple eigenspace yields independent directions (a defective one
/// surfaces as a large residual instead).
pub(crate) fn inverse_iteration<T: Scalar>(
    a: &Matrix<T>,
    lambda: Complex<T>,
    deflate: &[Vec<Complex<T>>],
) -> Option<(Vec<Complex<T>>, T)> {
    let n = a.rows();
    let scale = T::one() + a.frobenius_norm();
    let nudge = scale * T::epsilon() * lit(16.0);
    let shifted = Complex::new(lambda.re + nudge, lambda.im);

    // (A − λI) in complex form.
    let mut m = vec![Complex::new(T::zero(), T::zero()); n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = Complex::new(a[(i, j)], T::zero());
        }
        m[i * n + i] = m[i * n + i] - shifted;
    }
    let lu = complex_lu(&mut m, n, scale)?;

    // Deterministic start with uneven components; when deflation
    // swallows it, restart from the most-deflation-free axis.
    let mut v: Vec<Complex<T>> = (0..n)
        .map(|i| Complex::new(T::one() / lit::<T>(1.0 + i as f64), lit::<T>(0.25) / lit::<T>(2.0 + i as f64)))
        .collect();
    if !reorthogonalize(&mut v, deflate) {
        v = axis_start(n, deflate)?;
    }

    let mut best: Option<(Vec<Complex<T>>, T)> = None;
    for _ in 0..4 {
        let mut next = v.clone();
        complex_lu_solve(&m, &lu, n, &mut next);
        if !reorthogonalize(&mut next, deflate) {
            break;
        }
        v = next;
        let res = residual_norm(a, lambda, &v);
        if res.is_finite() {
            let better = best.as_ref().map_or(true, |(_, b)| res < *b);
            if better {
                best = Some((v.clone(), res));
            }
        }
    }
    best
}

fn residual_norm<T: Scalar>(a: &Matrix<T>, lambda: Complex<T>, v: &[Complex<T>]) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for i in 0..n {
        let mut av = Complex::new(T::zero(), T::zero());
        for j in 0..n {
            av = av + Complex::new(a[(i, j)], T::zero()) * v[j];
        }
        let d = av - lambda * v[i];
        acc += d.re * d.re + d.im * d.im;
    }
    acc.sqrt()
}

fn normalize<T: Scalar>(v: &mut [Complex<T>]) -> Option<()> {
    let norm2: T = v.iter().map(|z| z.re * z.re + z.im * z.im).sum();
    let norm = norm2.sqrt();
    if !(norm.is_finite() && norm > T::zero()) {
        return None;
    }
    for z in v.iter_mut() {
        *z = Complex::new(z.re / norm, z.im / norm);
    }
    Some(())
}

/// In-place complex LU with partial pivoting. Returns the pivot vector;
/// exact zero pivots are replaced by a tiny multiple of the matrix scale
/// (the standard inverse-iteration trick).
pub(crate) fn complex_lu<T: Scalar>(
    m: &mut [Complex<T>],
    n: usize,
    scale: T,
) -> Option<Vec<usize>> {
    let tiny = scale * T::epsilon();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let mut pivot = k;
        let mut best = m[k * n + k].re * m[k * n + k].re + m[k * n + k].im * m[k * n + k].im;
        for i in k + 1..n {
            let z = m[i * n + k];
            let mag = z.re * z.re + z.im * z.im;
            if mag > best {
                best = mag;
                pivot = i;
            }
        }
        if pivot != k {
            for j in 0..n {
                m.swap(k * n + j, pivot * n + j);
            }
        }
        pivots.push(pivot);
        if m[k * n + k].re == T::zero() && m[k * n + k].im == T::zero() {
            m[k * n + k] = Complex::new(tiny, T::zero());
        }
        let diag = m[k * n + k];
        for i in k + 1..n {
            let factor = m[i * n + k] / diag;
            if !(factor.re.is_finite() && factor.im.is_finite()) {
                return None;
            }
            m[i * n + k] = factor;
            for j in k + 1..n {
                let sub = factor * m[k * n + j];
                m[i * n + j] = m[i * n + j] - sub;
            }
        }
    }
    Some(pivots)
}

/// Solve with factors produced by [`complex_lu`], overwriting `rhs`.
///
/// The factorization swaps whole rows (multiplier columns included), so
/// every interchange must hit the right-hand side before the
/// substitution phases — interleaving them would pair multipliers with
/// not-yet-permuted entries.
pub(crate) fn complex_lu_solve<T: Scalar>(
    m: &[Complex<T>],
    pivots: &[usize],
    n: usize,
    rhs: &mut [Complex<T>],
) {
    for k in 0..n {
        rhs.swap(k, pivots[k]);
    }
    for k in 0..n {
        for i in k + 1..n {
            let sub = m[i * n + k] * rhs[k];
            rhs[i] = rhs[i] - sub;
        }
    }
    for k in (0..n).rev() {
        for j in k + 1..n {
            let sub = m[k * n + j] * rhs[j];
            rhs[k] = rhs[k] - sub;
        }
        rhs[k] = rhs[k] / m[k * n + k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rng;

    #[test]
    fn plane_rotation_has_unit_imaginary_pair() {
        let m = Matrix::<f64>::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let spec = eigenvalues(&m).unwrap();
        let vals = spec.values();
        assert_eq!(vals.len(), 2);
        assert!((vals[0].re).abs() < 1e-12);
        assert!((vals[0].im - 1.0).abs() < 1e-12);
        assert!((vals[1].im + 1.0).abs() < 1e-12);
        for m in spec.moduli() {
            assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_has_all_ones() {
        let spec = eigenvalues(&Matrix::<f64>::identity(3)).unwrap();
        for &v in spec.values() {
            assert!((v.re - 1.0).abs() < 1e-14);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn triangular_matrix_has_diagonal_eigenvalues() {
        let m = Matrix::<f64>::from_rows(&[
            vec![3.0, 1.0, 2.0],
            vec![0.0, -2.0, 5.0],
            vec![0.0, 0.0, 0.5],
        ])
        .unwrap();
        let mut mods = eigenvalues(&m).unwrap().moduli();
        mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((mods[0] - 0.5).abs() < 1e-10);
        assert!((mods[1] - 2.0).abs() < 1e-10);
        assert!((mods[2] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn non_square_is_rejected() {
        let m = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(eigenvalues(&m), Err(Error::Dimension { .. })));
    }

    #[test]
    fn trace_and_determinant_identities_hold() {
        for seed in 0..20u64 {
            let mut rng = Rng::new(seed);
            let n = 2 + (seed % 7) as usize;
            let m = Matrix::<f64>::random_uniform(n, n, -1.0, 1.0, &mut rng);
            let spec = eigenvalues(&m).unwrap();
            let tr = m.trace();
            let sum = spec.sum();
            assert!(
                (sum.re - tr).abs() <= 1e-8 * (1.0 + tr.abs()),
                "trace mismatch at seed {seed}: {} vs {tr}",
                sum.re
            );
            assert!(sum.im.abs() < 1e-9);
            let det = m.determinant().unwrap();
            let prod = spec.product();
            assert!(
                (prod.re - det).abs() <= 1e-6 * det.abs().max(1e-12),
                "det mismatch at seed {seed}: {} vs {det}",
                prod.re
            );
        }
    }

    #[test]
    fn scaling_matrix_scales_moduli() {
        let mut rng = Rng::new(99);
        let m = Matrix::<f64>::random_uniform(6, 6, -1.0, 1.0, &mut rng);
        let base = eigenvalues(&m).unwrap().moduli();
        let scaled = eigenvalues(&m.scale(2.5)).unwrap().moduli();
        for (b, s) in base.iter().zip(&scaled) {
            assert!((s - 2.5 * b).abs() < 1e-8 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn unique_moduli_collapses_conjugate_pairs() {
        let spec = EigenSpectrum::<f64>::from_values(
            vec![
                Complex::new(0.0, 1.0),
                Complex::new(0.0, -1.0),
                Complex::new(0.5, 0.0),
            ],
            3,
        );
        let u = spec.unique_moduli();
        assert_eq!(u.len(), 2);
        assert!((u[0] - 1.0).abs() < 1e-12);
        assert!((u[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unique_moduli_keeps_repeated_reals() {
        let spec = eigenvalues(&Matrix::<f64>::identity(3)).unwrap();
        assert_eq!(spec.unique_moduli(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn unique_moduli_length_matches_pair_count_oracle() {
        for seed in [5u64, 17, 23, 31] {
            let mut rng = Rng::new(seed);
            let m = Matrix::<f64>::random_uniform(8, 8, -1.0, 1.0, &mut rng);
            let spec = eigenvalues(&m).unwrap();
            // Oracle: count strictly-positive imaginary parts; each marks
            // one conjugate pair.
            let pairs = spec.values().iter().filter(|z| z.im > 0.0).count();
            assert_eq!(spec.unique_moduli().len(), 8 - pairs, "seed {seed}");
        }
    }

    #[test]
    fn residuals_certified_for_random_matrices() {
        for seed in 0..10u64 {
            let mut rng = Rng::new(1000 + seed);
            let m = Matrix::<f64>::random_uniform(7, 7, -1.0, 1.0, &mut rng);
            let spec = eigenvalues(&m).unwrap();
            let tol = 1e-8 * (1.0 + m.frobenius_norm());
            for &lambda in spec.values() {
                let res = eigenvector_residual(&m, lambda).unwrap();
                assert!(res <= tol, "seed {seed}: residual {res}");
            }
        }
    }

    #[test]
    fn nearly_defective_jordan_block_still_converges() {
        // Jordan-like block with a tiny coupling; classic stress case.
        let m = Matrix::<f64>::from_rows(&[
            vec![1.0, 1.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![1e-9, 0.0, 1.0],
        ])
        .unwrap();
        let spec = eigenvalues(&m).unwrap();
        let sum = spec.sum();
        assert!((sum.re - 3.0).abs() < 1e-7);
    }

    #[test]
    fn f32_spectrum_roughly_matches_f64() {
        let mut rng = Rng::new(77);
        let m = Matrix::<f64>::random_uniform(5, 5, -1.0, 1.0, &mut rng);
        let m32: Matrix<f32> = m.cast();
        let mods64 = eigenvalues(&m).unwrap().moduli();
        let mods32 = eigenvalues(&m32).unwrap().moduli();
        for (a, b) in mods64.iter().zip(&mods32) {
            assert!((a - *b as f64).abs() < 1e-4);
        }
    }

    #[test]
    fn complex_lu_solves_random_systems_exactly() {
        // Guards the pivot bookkeeping: interchanges applied at the
        // wrong moment only show up once n ≥ 3 and a later pivot moves
        // an already-used multiplier row.
        let mut rng = Rng::new(321);
        for n in 2..=8usize {
            for _ in 0..25 {
                let a: Vec<Complex<f64>> = (0..n * n)
                    .map(|_| Complex::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
                    .collect();
                let b: Vec<Complex<f64>> = (0..n)
                    .map(|_| Complex::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
                    .collect();
                let mut lu = a.clone();
                let pivots = complex_lu(&mut lu, n, 1.0).unwrap();
                let mut x = b.clone();
                complex_lu_solve(&lu, &pivots, n, &mut x);
                let mut residual = 0.0f64;
                for i in 0..n {
                    let mut ax = Complex::new(0.0, 0.0);
                    for k in 0..n {
                        ax = ax + a[i * n + k] * x[k];
                    }
                    let d = ax - b[i];
                    residual += d.re * d.re + d.im * d.im;
                }
                assert!(residual.sqrt() < 1e-11, "n={n}: residual {}", residual.sqrt());
            }
        }
    }

    #[test]
    fn complex_lu_handles_a_forced_late_pivot_swap() {
        // Ascending first column forces a swap at step 0; the doctored
        // second column forces another at step 1, moving a multiplier
        // row after it has been stored.
        let a: Vec<Complex<f64>> = [
            1.0, 0.0, 0.0, //
            2.0, 1.0, 0.0, //
            3.0, 2.9, 1.0,
        ]
        .iter()
        .map(|&re| Complex::new(re, 0.0))
        .collect();
        let b = vec![
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 1.0),
            Complex::new(-2.0, 0.5),
        ];
        let mut lu = a.clone();
        let pivots = complex_lu(&mut lu, 3, 1.0).unwrap();
        let mut x = b.clone();
        complex_lu_solve(&lu, &pivots, 3, &mut x);
        // The matrix is unit lower triangular: forward substitution is
        // the oracle.
        let e0 = b[0];
        let e1 = b[1] - Complex::new(2.0, 0.0) * e0;
        let e2 = b[2] - Complex::new(3.0, 0.0) * e0 - Complex::new(2.9, 0.0) * e1;
        for (got, want) in x.iter().zip([e0, e1, e2]) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn deflated_iteration_spans_a_semisimple_eigenspace() {
        // Identity: one eigenvalue, full eigenspace. Deflation must
        // produce three mutually orthogonal unit vectors.
        let m = Matrix::<f64>::identity(3);
        let lambda = Complex::new(1.0, 0.0);
        let mut basis: Vec<Vec<Complex<f64>>> = Vec::new();
        for _ in 0..3 {
            let (v, res) = inverse_iteration(&m, lambda, &basis).unwrap();
            assert!(res < 1e-12, "{res}");
            basis.push(v);
        }
        for i in 0..3 {
            for j in 0..i {
                let mut dot = Complex::new(0.0, 0.0);
                for (a, b) in basis[i].iter().zip(&basis[j]) {
                    dot = dot + a.conj() * *b;
                }
                let mag = (dot.re * dot.re + dot.im * dot.im).sqrt();
                assert!(mag < 1e-10, "columns {i},{j} overlap {mag}");
            }
        }
    }
}
