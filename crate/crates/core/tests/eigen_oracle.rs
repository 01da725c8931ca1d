//! Cross-checks the eigensolver against an independent oracle.
//!
//! The characteristic polynomial is built with the Faddeev–LeVerrier
//! trace recurrence and its roots are found by Durand–Kerner fixed-point
//! iteration — a pipeline that shares no code with the library's
//! balancing/Hessenberg/QR path, so agreement is strong evidence both
//! are right.

use eigenrnn::linalg::{eigenvalues, Matrix, Rng};
use num_complex::Complex64;

/// Coefficients `c` of `det(λI − A) = λⁿ + c[0]λⁿ⁻¹ + … + c[n−1]`.
fn char_poly(a: &Matrix<f64>) -> Vec<f64> {
    let n = a.rows();
    let mut m = Matrix::<f64>::identity(n);
    let mut coeffs = Vec::with_capacity(n);
    for k in 1..=n {
        let am = a.matmul(&m).unwrap();
        let trace: f64 = (0..n).map(|i| am[(i, i)]).sum();
        let c = -trace / k as f64;
        coeffs.push(c);
        if k < n {
            m = am;
            for i in 0..n {
                m[(i, i)] += c;
            }
        }
    }
    coeffs
}

fn eval_monic(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for &c in coeffs {
        p = p * z + c;
    }
    p
}

/// All roots of the monic polynomial, via Durand–Kerner.
fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let spread = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (1..=n).map(|j| spread.powu(j as u32)).collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for j in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for k in 0..n {
                if k != j {
                    denom *= roots[j] - roots[k];
                }
            }
            let delta = eval_monic(coeffs, roots[j]) / denom;
            roots[j] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-13 {
            break;
        }
    }
    roots
}

/// Greedily pair each computed eigenvalue with its closest unused
/// oracle root; returns the largest pairing distance.
fn worst_match(found: &[Complex64], oracle: &[Complex64]) -> f64 {
    assert_eq!(found.len(), oracle.len());
    let mut used = vec![false; oracle.len()];
    let mut worst = 0.0f64;
    for &z in found {
        let (best, dist) = oracle
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, &r)| (i, (z - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[best] = true;
        worst = worst.max(dist);
    }
    worst
}

#[test]
fn random_spectra_match_polynomial_roots() {
    let mut worst = 0.0f64;
    for n in 2..=6 {
        for seed in 0..8 {
            let mut rng = Rng::new(1000 * n as u64 + seed);
            let a = Matrix::from_vec(
                n,
                n,
                (0..n * n).map(|_| rng.uniform(-1.0, 1.0)).collect(),
            )
            .unwrap();

            let spectrum = eigenvalues(&a).unwrap();
            let found: Vec<Complex64> = spectrum
                .values()
                .iter()
                .map(|z| Complex64::new(z.re, z.im))
                .collect();

            let coeffs = char_poly(&a);
            let oracle = poly_roots(&coeffs);
            let scale = 1.0 + spectrum.spectral_radius();
            let dist = worst_match(&found, &oracle);
            assert!(
                dist < 1e-6 * scale,
                "n={n} seed={seed}: worst pairing distance {dist:.3e}"
            );
            worst = worst.max(dist / scale);

            // Two cheap independent invariants: the eigenvalue sum is
            // the trace and the product is the determinant (read off
            // the constant coefficient).
            let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
            let sum: Complex64 = found.iter().sum();
            assert!((sum.re - trace).abs() < 1e-9 * scale, "trace drifted");
            assert!(sum.im.abs() < 1e-9 * scale, "conjugates must cancel");

            let det = if n % 2 == 0 { coeffs[n - 1] } else { -coeffs[n - 1] };
            let product = found
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &z| acc * z);
            assert!(
                (product.re - det).abs() < 1e-7 * (1.0 + det.abs()),
                "determinant drifted: {} vs {det}",
                product.re
            );
            assert!(product.im.abs() < 1e-7 * (1.0 + det.abs()));
        }
    }
    assert!(worst < 1e-6, "overall worst relative distance {worst:.3e}");
}

#[test]
fn a_companion_matrix_recovers_its_roots() {
    // Companion of z⁴ − 5.5z³ + 8z² − 0.5z − 3 = (z−1)(z−2)(z−3)(z+0.5).
    let a = Matrix::<f64>::from_vec(
        4,
        4,
        vec![
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            3.0, 0.5, -8.0, 5.5,
        ],
    )
    .unwrap();
    let spectrum = eigenvalues(&a).unwrap();
    let mut reals: Vec<f64> = spectrum
        .values()
        .iter()
        .map(|z| {
            assert!(z.im.abs() < 1e-8, "all four roots are real");
            z.re
        })
        .collect();
    reals.sort_by(f64::total_cmp);
    let expected = [-0.5, 1.0, 2.0, 3.0];
    for (got, want) in reals.iter().zip(expected) {
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
}
