//! Singular value decomposition via the Hermitian eigendecomposition of the
//! Gram matrix, plus the unitary polar factor built from it.

use super::hermitian::hermitian_eigen;
use super::matrix::{vec_dot, vec_norm, Complex64, ComplexMatrix, C_ZERO};
use crate::{Error, Result};

pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

/// Full SVD A = U Σ V*. Left singular vectors for negligible singular values
/// are completed deterministically from the standard basis.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    let n = m.n();
    let (lam, v) = hermitian_eigen(&m.gram(), true)?;
    let v = v.expect("vectors requested");
    let sigma: Vec<f64> = lam.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let rank_tol = 1e-12 * sigma.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);

    let mut u_cols: Vec<Option<Vec<Complex64>>> = vec![None; n];
    for (j, &s) in sigma.iter().enumerate() {
        if s > rank_tol {
            let vj: Vec<Complex64> = (0..n).map(|i| v.get(i, j)).collect();
            let mvj = m.mul_vec(&vj);
            u_cols[j] = Some(mvj.iter().map(|z| z / s).collect());
        }
    }
    // complete the deficient columns against the ones we already have
    for j in 0..n {
        if u_cols[j].is_some() {
            continue;
        }
        let mut chosen = None;
        for cand in 0..n {
            let mut e = vec![C_ZERO; n];
            e[cand] = Complex64::new(1.0, 0.0);
            for col in u_cols.iter().flatten() {
                let proj = vec_dot(col, &e);
                for (t, c) in e.iter_mut().enumerate() {
                    *c -= col[t] * proj;
                }
            }
            let norm = vec_norm(&e);
            if norm > 0.5 {
                let inv = 1.0 / norm;
                chosen = Some(e.iter().map(|z| z * inv).collect::<Vec<_>>());
                break;
            }
        }
        u_cols[j] = Some(chosen.ok_or_else(|| {
            Error::Numerical("could not complete an orthonormal basis for U".into())
        })?);
    }

    let mut u = ComplexMatrix::zeros(n);
    for (j, col) in u_cols.iter().enumerate() {
        let col = col.as_ref().unwrap();
        for i in 0..n {
            u.set(i, j, col[i]);
        }
    }
    Ok(Svd { u, sigma, v })
}

/// Unitary polar factor of A (the U V* of its SVD). The zero matrix maps to
/// the identity.
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.max_abs_entry() == 0.0 {
        return Ok(ComplexMatrix::identity(m.n()));
    }
    let d = svd(m)?;
    d.u.mul(&d.v.conj_transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn random_matrix(n: usize, rng: &mut Rng) -> ComplexMatrix {
        let data: Vec<Complex64> = (0..n * n).map(|_| rng.complex_normal()).collect();
        ComplexMatrix::from_entries(n, data).unwrap()
    }

    fn reassemble(d: &Svd) -> ComplexMatrix {
        let n = d.sigma.len();
        let mut s = ComplexMatrix::zeros(n);
        for i in 0..n {
            s.set(i, i, Complex64::new(d.sigma[i], 0.0));
        }
        d.u.mul(&s).unwrap().mul(&d.v.conj_transpose()).unwrap()
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        let mut rng = Rng::new(41);
        for n in [1usize, 2, 3, 5, 8] {
            let m = random_matrix(n, &mut rng);
            let d = svd(&m).unwrap();
            assert!(reassemble(&d).max_abs_diff(&m) < 1e-11 * m.frobenius().max(1.0), "n={n}");
            let uu = d.u.conj_transpose().mul(&d.u).unwrap();
            assert!(uu.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-11);
            for w in d.sigma.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn svd_handles_rank_deficiency() {
        // rank-1 matrix
        let m = ComplexMatrix::from_real_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![3.0, 6.0, 9.0],
        ])
        .unwrap();
        let d = svd(&m).unwrap();
        assert!(reassemble(&d).max_abs_diff(&m) < 1e-11 * m.frobenius());
        assert!(d.sigma[1] < 1e-10);
        let uu = d.u.conj_transpose().mul(&d.u).unwrap();
        assert!(uu.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-10);
    }

    #[test]
    fn polar_of_unitary_is_itself() {
        let q = ComplexMatrix::diag(&[
            Complex64::from_polar(1.0, 0.3),
            Complex64::from_polar(1.0, -1.2),
        ]);
        let p = polar_unitary(&q).unwrap();
        assert!(p.max_abs_diff(&q) < 1e-12);
    }

    #[test]
    fn polar_of_positive_diagonal_is_identity() {
        let m = ComplexMatrix::diag(&[Complex64::new(3.0, 0.0), Complex64::new(0.5, 0.0)]);
        let p = polar_unitary(&m).unwrap();
        assert!(p.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn polar_of_zero_is_identity() {
        let p = polar_unitary(&ComplexMatrix::zeros(3)).unwrap();
        assert!(p.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }
}
