//! Dense complex matrix arithmetic and the spectral kernels every other
//! module builds on: spectral norm, spectral radius, eigenvalues, singular
//! values, Frobenius norm and a normality test.
//!
//! Hermitian problems (Gram matrices) go through a cyclic Jacobi sweep;
//! general eigenvalues go through Hessenberg reduction plus Wilkinson-shifted
//! QR. Everything is dense and tuned for desk-scale dimensions.

mod fast;
mod hermitian;
mod matrix;
mod qr_eig;
mod svd;

pub use matrix::{vec_dot, vec_norm, Complex64, ComplexMatrix, Lu, C_ONE, C_ZERO};
pub use qr_eig::{eigenvector_for, left_eigenvector_for, sort_eigenvalues};
pub use svd::{polar_unitary, svd, Svd};

pub(crate) use fast::{char3, cubic_roots, cubic_roots_raw, rho_fast, sigma_fast};


use crate::Result;

/// Spectral norm (matrix 2-norm, the largest singular value), computed from
/// the Hermitian eigendecompositions of both A*A and AA*. Taking the larger
/// of the two square roots makes `spectral_norm(A.conj_transpose())` agree
/// with `spectral_norm(A)` exactly, not just to rounding.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    m.validate_finite()?;
    let a = hermitian::hermitian_eigmax(&m.gram())?;
    let b = hermitian::hermitian_eigmax(&m.cogram())?;
    Ok(a.max(b).max(0.0).sqrt())
}

/// Spectral radius: the largest eigenvalue modulus.
pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?[0].norm())
}

/// All n eigenvalues with multiplicity, sorted by modulus descending then
/// principal argument ascending.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    qr_eig::eigenvalues_qr(m)
}

/// Singular values in descending order; their squares are the eigenvalues of
/// A*A.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.validate_finite()?;
    let (lam, _) = hermitian::hermitian_eigen(&m.gram(), false)?;
    Ok(lam.into_iter().map(|l| l.max(0.0).sqrt()).collect())
}

/// Frobenius norm.
pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.frobenius()
}

/// Normality test: the residual is ‖A*A − AA*‖_F and the boolean compares it
/// against `tol · max(1, ‖A‖_F²)`.
pub fn is_normal(m: &ComplexMatrix, tol: f64) -> (bool, f64) {
    let residual = m
        .gram()
        .sub(&m.cogram())
        .expect("same dimension")
        .frobenius();
    let scale = m.frobenius().powi(2).max(1.0);
    (residual <= tol * scale, residual)
}

/// The spectral facts about one matrix, computed together.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    pub sigma_max: f64,
    pub rho: f64,
    pub singular_values: Vec<f64>,
    pub frobenius: f64,
}

pub fn summarize(m: &ComplexMatrix) -> Result<SpectralSummary> {
    let singular = singular_values(m)?;
    let sigma_dual = spectral_norm(m)?;
    Ok(SpectralSummary {
        sigma_max: sigma_dual.max(singular[0]),
        rho: spectral_radius(m)?,
        singular_values: singular,
        frobenius: m.frobenius(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(n: usize, rng: &mut Rng) -> ComplexMatrix {
        let data: Vec<Complex64> = (0..n * n).map(|_| rng.complex_normal()).collect();
        ComplexMatrix::from_entries(n, data).unwrap()
    }

    /// Checkerboard used in several places: entries (-1)^(i+j), +1 at (0,0).
    fn checkerboard(n: usize) -> ComplexMatrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if (i + j) % 2 == 0 { 1.0 } else { -1.0 }).collect())
            .collect();
        ComplexMatrix::from_real_rows(&rows).unwrap()
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&checkerboard(5)).unwrap() - 5.0).abs() < 1e-12);
        assert!((spectral_norm(&ComplexMatrix::identity(4)).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(spectral_norm(&ComplexMatrix::zeros(3)).unwrap(), 0.0);
    }

    #[test]
    fn spectral_norm_rejects_nonfinite() {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 1, c(f64::INFINITY, 0.0));
        assert!(spectral_norm(&m).is_err());
    }

    #[test]
    fn conj_transpose_invariance_is_exact() {
        let mut rng = Rng::new(77);
        for n in [2usize, 3, 5, 7] {
            let m = random_matrix(n, &mut rng);
            let a = spectral_norm(&m).unwrap();
            let b = spectral_norm(&m.conj_transpose()).unwrap();
            assert_eq!(a, b, "n={n}");
        }
    }

    #[test]
    fn spectral_radius_examples() {
        let d = ComplexMatrix::diag(&[c(2.0, 0.0), c(0.0, 3.0)]);
        assert!((spectral_radius(&d).unwrap() - 3.0).abs() < 1e-14);
        assert!((spectral_radius(&checkerboard(5)).unwrap() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn rho_bounded_by_sigma() {
        let mut rng = Rng::new(13);
        for _ in 0..30 {
            let n = 2 + rng.below(5);
            let m = random_matrix(n, &mut rng);
            let rho = spectral_radius(&m).unwrap();
            let sig = spectral_norm(&m).unwrap();
            let scale = m.frobenius().max(1.0);
            assert!(rho <= sig + 1e-9 * scale, "rho {rho} sigma {sig}");
        }
    }

    #[test]
    fn submultiplicative_on_samples() {
        let mut rng = Rng::new(19);
        for _ in 0..20 {
            let n = 2 + rng.below(4);
            let a = random_matrix(n, &mut rng);
            let b = random_matrix(n, &mut rng);
            let lhs = spectral_norm(&a.mul(&b).unwrap()).unwrap();
            let rhs = spectral_norm(&a).unwrap() * spectral_norm(&b).unwrap();
            assert!(lhs <= rhs + 1e-9 * rhs.max(1.0));
        }
    }

    #[test]
    fn singular_values_examples() {
        let s = singular_values(&ComplexMatrix::identity(4)).unwrap();
        for v in &s {
            assert!((v - 1.0).abs() < 1e-13);
        }
        let z = singular_values(&ComplexMatrix::zeros(3)).unwrap();
        assert_eq!(z, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn unitary_singular_values_are_one() {
        // diagonal unitary with assorted phases
        let q = ComplexMatrix::diag(&[
            Complex64::from_polar(1.0, 0.4),
            Complex64::from_polar(1.0, 2.0),
            Complex64::from_polar(1.0, -2.8),
        ]);
        for v in singular_values(&q).unwrap() {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn frobenius_examples() {
        assert!((frobenius_norm(&checkerboard(5)) - 5.0).abs() < 1e-14);
        assert!((frobenius_norm(&ComplexMatrix::identity(4)) - 2.0).abs() < 1e-14);
        assert_eq!(frobenius_norm(&ComplexMatrix::zeros(2)), 0.0);
    }

    #[test]
    fn normality_examples() {
        // Hermitian => normal
        let h = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let (ok, res) = is_normal(&h, 1e-10);
        assert!(ok, "residual {res}");
        // Jordan-ish block is not normal
        let j = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let (ok, res) = is_normal(&j, 1e-10);
        assert!(!ok);
        assert!(res > 0.5);
    }

    #[test]
    fn summary_invariants() {
        let mut rng = Rng::new(3);
        let m = random_matrix(4, &mut rng);
        let s = summarize(&m).unwrap();
        let scale = m.frobenius().max(1.0);
        assert!(s.rho <= s.sigma_max + 1e-9 * scale);
        assert!((s.sigma_max - s.singular_values[0]).abs() <= 1e-12 * scale);
        let fro_sq: f64 = s.singular_values.iter().map(|v| v * v).sum();
        assert!((fro_sq - s.frobenius.powi(2)).abs() < 1e-10 * scale.powi(2));
    }

    #[test]
    fn eigenvalues_of_transpose_match() {
        let mut rng = Rng::new(37);
        let m = random_matrix(5, &mut rng);
        let mut a = eigenvalues(&m).unwrap();
        let b = eigenvalues(&m.transpose()).unwrap();
        // greedy nearest matching
        for x in b {
            let (k, d) = a
                .iter()
                .enumerate()
                .map(|(k, y)| (k, (x - y).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            assert!(d < 1e-8 * m.frobenius().max(1.0));
            a.remove(k);
        }
    }
}
