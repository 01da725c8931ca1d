//! Weight-matrix initialization schemes and their spectral statistics.
//!
//! Besides the five classic dense schemes (framework-default uniform,
//! Xavier normal/uniform, Kaiming normal/uniform) this module provides
//! three square-only constructions: the exact identity, a normalized
//! positive-semidefinite scheme whose top eigenvalue is exactly one, and
//! an eigenvalue-pinning scheme built as a scaled product of random plane
//! rotations, so that every eigenvalue modulus and singular value equals
//! a chosen λ ∈ (0,1).
//!
//! [`spectrum_stats`] repeats an initializer many times and reports the
//! positionwise mean/std of the descending-sorted eigenvalue moduli
//! ("ordered mean norms"), the measurement used to compare schemes.

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, symmetric_eigen, Matrix, Rng};
use crate::scalar::{lit, Scalar};

/// Selector for a weight initialization scheme.
///
/// Configuration-level scalars (`lambda`) are plain `f64` regardless of
/// the matrix scalar type; they are converted at construction time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitializerKind {
    /// `U[−1/√fan_in, 1/√fan_in]`, the common framework default.
    DefaultUniform,
    /// `N(0, 2/(fan_in+fan_out))` (variance, not std).
    XavierNormal,
    /// `U[±√(6/(fan_in+fan_out))]`.
    XavierUniform,
    /// `N(0, 2/fan_in)`.
    KaimingNormal,
    /// `U[±√(6/fan_in)]`.
    KaimingUniform,
    /// Exact identity (square only).
    Identity,
    /// Normalized PSD scheme: `A = I + RRᵀ/n` with standard-normal `R`,
    /// scaled so the top eigenvalue is exactly 1 (square only).
    NpRnn,
    /// `λ·(product of n−1 random plane rotations)`: every eigenvalue
    /// modulus and singular value equals `lambda` (square only).
    Eigen {
        /// Target modulus, in (0,1). The experiments use 0.95.
        lambda: f64,
    },
}

impl InitializerKind {
    /// Stable lowercase identifier, used in CSV filenames and configs.
    pub fn name(&self) -> &'static str {
        match self {
            InitializerKind::DefaultUniform => "default_uniform",
            InitializerKind::XavierNormal => "xavier_normal",
            InitializerKind::XavierUniform => "xavier_uniform",
            InitializerKind::KaimingNormal => "kaiming_normal",
            InitializerKind::KaimingUniform => "kaiming_uniform",
            InitializerKind::Identity => "identity",
            InitializerKind::NpRnn => "np_rnn",
            InitializerKind::Eigen { .. } => "eigen",
        }
    }

    /// All eight kinds with the standard λ = 0.95 for the eigen scheme.
    pub fn all_default() -> [InitializerKind; 8] {
        [
            InitializerKind::DefaultUniform,
            InitializerKind::XavierNormal,
            InitializerKind::XavierUniform,
            InitializerKind::KaimingNormal,
            InitializerKind::KaimingUniform,
            InitializerKind::Identity,
            InitializerKind::NpRnn,
            InitializerKind::Eigen { lambda: 0.95 },
        ]
    }

    /// Parse a kind from its [`name`](Self::name); `eigen` gets λ = 0.95.
    pub fn parse(s: &str) -> Result<InitializerKind> {
        match s {
            "default_uniform" | "default" => Ok(InitializerKind::DefaultUniform),
            "xavier_normal" => Ok(InitializerKind::XavierNormal),
            "xavier_uniform" => Ok(InitializerKind::XavierUniform),
            "kaiming_normal" => Ok(InitializerKind::KaimingNormal),
            "kaiming_uniform" => Ok(InitializerKind::KaimingUniform),
            "identity" => Ok(InitializerKind::Identity),
            "np_rnn" => Ok(InitializerKind::NpRnn),
            "eigen" => Ok(InitializerKind::Eigen { lambda: 0.95 }),
            other => Err(Error::Config(format!(
                "unknown initializer kind '{other}'"
            ))),
        }
    }

    /// Replace λ for the eigen kind; other kinds are returned unchanged.
    pub fn with_lambda(self, lambda: f64) -> InitializerKind {
        match self {
            InitializerKind::Eigen { .. } => InitializerKind::Eigen { lambda },
            other => other,
        }
    }
}

/// Positionwise statistics of descending-sorted eigenvalue moduli over
/// repeated initializer draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumStats<T> {
    /// Per-rank mean modulus, rank 0 = largest. Non-increasing.
    pub ordered_means: Vec<T>,
    /// Per-rank population standard deviation.
    pub ordered_stds: Vec<T>,
    /// Number of draws aggregated.
    pub trials: usize,
    /// Matrix dimension of each draw.
    pub dim: usize,
}

impl<T: Scalar> SpectrumStats<T> {
    /// Serialize as CSV with header `rank,mean,std`; ranks are 1-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,mean,std\n");
        for (i, (m, s)) in self.ordered_means.iter().zip(&self.ordered_stds).enumerate() {
            out.push_str(&format!("{},{:.12},{:.12}\n", i + 1, m.to_f64_lossy(), s.to_f64_lossy()));
        }
        out
    }
}

/// Draw a `rows`×`cols` matrix from a scheme.
///
/// The dense schemes use `fan_in = cols` and `fan_out = rows`, matching
/// the `h W ᵀ` application convention where each output coordinate sums
/// over `cols` inputs. The square-only schemes (`Identity`, `NpRnn`,
/// `Eigen`) reject non-square shapes.
pub fn init_dense<T: Scalar>(
    kind: InitializerKind,
    rows: usize,
    cols: usize,
    rng: &mut Rng,
) -> Result<Matrix<T>> {
    if rows == 0 || cols == 0 {
        return Err(Error::Config(format!(
            "initializer shape {rows}x{cols} must have positive dimensions"
        )));
    }
    let fan_in = cols as f64;
    let fan_out = rows as f64;
    match kind {
        InitializerKind::DefaultUniform => {
            let bound = 1.0 / fan_in.sqrt();
            Ok(Matrix::random_uniform(rows, cols, lit(-bound), lit(bound), rng))
        }
        InitializerKind::XavierNormal => {
            let std = (2.0 / (fan_in + fan_out)).sqrt();
            Ok(Matrix::random_normal(rows, cols, T::zero(), lit(std), rng))
        }
        InitializerKind::XavierUniform => {
            let bound = (6.0 / (fan_in + fan_out)).sqrt();
            Ok(Matrix::random_uniform(rows, cols, lit(-bound), lit(bound), rng))
        }
        InitializerKind::KaimingNormal => {
            let std = (2.0 / fan_in).sqrt();
            Ok(Matrix::random_normal(rows, cols, T::zero(), lit(std), rng))
        }
        InitializerKind::KaimingUniform => {
            let bound = (6.0 / fan_in).sqrt();
            Ok(Matrix::random_uniform(rows, cols, lit(-bound), lit(bound), rng))
        }
        InitializerKind::Identity => {
            require_square(kind, rows, cols)?;
            init_identity(rows)
        }
        InitializerKind::NpRnn => {
            require_square(kind, rows, cols)?;
            init_np(rows, rng)
        }
        InitializerKind::Eigen { lambda } => {
            require_square(kind, rows, cols)?;
            init_eigen(rows, lambda, rng)
        }
    }
}

fn require_square(kind: InitializerKind, rows: usize, cols: usize) -> Result<()> {
    if rows != cols {
        return Err(Error::Config(format!(
            "initializer '{}' requires a square shape, got {rows}x{cols}",
            kind.name()
        )));
    }
    Ok(())
}

/// The exact n×n identity; every eigenvalue modulus is exactly 1.
pub fn init_identity<T: Scalar>(n: usize) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::Config("identity initializer needs n ≥ 1".into()));
    }
    Ok(Matrix::identity(n))
}

/// Normalized positive-semidefinite initializer.
///
/// Draws `R` with i.i.d. standard-normal entries, forms the symmetric
/// positive-definite `A = I + RRᵀ/n`, and rescales by the top eigenvalue
/// so the returned matrix has largest eigenvalue exactly 1 and an
/// all-real, non-negative spectrum. The identity offset keeps the bulk of
/// the spectrum well away from zero, which is the point of the scheme:
/// slow, roughly uniform decay across all modes.
pub fn init_np<T: Scalar>(n: usize, rng: &mut Rng) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::Config("np initializer needs n ≥ 1".into()));
    }
    let r = Matrix::<T>::random_normal(n, n, T::zero(), T::one(), rng);
    let a = Matrix::identity(n)
        .add(&r.matmul_transb(&r)?.scale(T::one() / lit(n as f64)))?;
    let (vals, _) = symmetric_eigen(&a)?;
    let top = vals[0];
    if !(top.is_finite() && top > T::zero()) {
        return Err(Error::non_finite("init_np", "top eigenvalue not positive"));
    }
    Ok(a.scale(T::one() / top))
}

/// Right-multiply `m` in place by the plane rotation acting on columns
/// `(i, i+1)`: `[[cos θ, −sin θ], [sin θ, cos θ]]`.
fn rotate_columns<T: Scalar>(m: &mut Matrix<T>, i: usize, theta: T) {
    let (c, s) = (theta.cos(), theta.sin());
    for r in 0..m.rows() {
        let a = m[(r, i)];
        let b = m[(r, i + 1)];
        m[(r, i)] = c * a + s * b;
        m[(r, i + 1)] = c * b - s * a;
    }
}

/// Eigenvalue-pinning initializer: `W = (λI)·W₁⋯W_{n−1}` where `W_i` is
/// the plane rotation by `θ_i ~ U[0, 2π]` on coordinates `(i, i+1)`.
///
/// Since the rotation product is orthogonal, every eigenvalue modulus and
/// singular value of `W` equals `lambda` exactly, and `det W = λⁿ`.
/// Angles are drawn in index order from `rng`, so equal seeds give
/// bitwise-equal matrices. `n = 1` applies no rotations: `[[λ]]`.
pub fn init_eigen<T: Scalar>(n: usize, lambda: f64, rng: &mut Rng) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::Config("eigen initializer needs n ≥ 1".into()));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Config(format!(
            "eigen initializer lambda must lie in (0,1), got {lambda}"
        )));
    }
    let mut w = Matrix::<T>::identity(n).scale(lit(lambda));
    let two_pi = 2.0 * std::f64::consts::PI;
    for i in 0..n.saturating_sub(1) {
        let theta: T = rng.uniform(T::zero(), lit(two_pi));
        rotate_columns(&mut w, i, theta);
    }
    Ok(w)
}

/// Ordered eigenvalue-norm statistics over repeated draws of a scheme.
///
/// Each trial draws an n×n matrix, computes its eigenvalue moduli sorted
/// descending, and the positionwise mean and population std over trials
/// are returned. Means are non-increasing because every per-trial vector
/// is sorted.
pub fn spectrum_stats<T: Scalar>(
    kind: InitializerKind,
    n: usize,
    trials: usize,
    rng: &mut Rng,
) -> Result<SpectrumStats<T>> {
    if trials < 2 {
        return Err(Error::Config(format!(
            "spectrum_stats needs at least 2 trials, got {trials}"
        )));
    }
    let mut all: Vec<Vec<T>> = Vec::with_capacity(trials);
    for _ in 0..trials {
        let w = init_dense::<T>(kind, n, n, rng)?;
        all.push(eigenvalues(&w)?.moduli());
    }
    let t = lit::<T>(trials as f64);
    let mut means = vec![T::zero(); n];
    let mut stds = vec![T::zero(); n];
    for rank in 0..n {
        let mut sum = T::zero();
        for trial in &all {
            sum += trial[rank];
        }
        let mean = sum / t;
        let mut sq = T::zero();
        for trial in &all {
            let d = trial[rank] - mean;
            sq += d * d;
        }
        means[rank] = mean;
        stds[rank] = (sq / t).sqrt();
    }
    Ok(SpectrumStats {
        ordered_means: means,
        ordered_stds: stds,
        trials,
        dim: n,
    })
}
