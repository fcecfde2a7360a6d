//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation annihilates one off-diagonal pair with a complex plane
//! rotation; sweeps repeat until the off-diagonal mass is at machine level.
//! Robust and accurate at desk scale, which is all this crate targets.

use super::matrix::{Complex64, ComplexMatrix, C_ZERO};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are returned in
/// descending order; when requested, the unitary `vectors` holds matching
/// eigenvectors as columns.
pub fn hermitian_eigen(h: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = h.n();
    let mut a = h.clone();
    let mut v = if want_vectors { Some(ComplexMatrix::identity(n)) } else { None };

    if n == 1 {
        let lam = vec![a.get(0, 0).re];
        return Ok((lam, v));
    }

    let scale = a.frobenius().max(f64::MIN_POSITIVE);
    let stop = (1e-15 * scale).powi(2);
    let skip = (1e-18 * scale).powi(2);

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut off_sq = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off_sq += a.get(p, q).norm_sqr();
            }
        }
        if off_sq <= stop {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let b = a.get(p, q);
                let babs_sq = b.norm_sqr();
                if babs_sq <= skip {
                    continue;
                }
                let babs = babs_sq.sqrt();
                let phase = b / babs; // e^{iφ}
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (app - aqq) / (2.0 * babs);
                // smaller root of t^2 - 2 tau t - 1 = 0
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let se_pos = phase * s; // s e^{iφ}
                let se_neg = phase.conj() * s; // s e^{-iφ}

                // right-multiply columns p, q by the rotation
                for j in 0..n {
                    let ajp = a.get(j, p);
                    let ajq = a.get(j, q);
                    a.set(j, p, ajp * c - ajq * se_neg);
                    a.set(j, q, ajp * se_pos + ajq * c);
                }
                // left-multiply rows p, q by the adjoint rotation
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c - aqj * se_pos);
                    a.set(q, j, apj * se_neg + aqj * c);
                }
                // exact updates for the 2x2 pivot block
                let new_pp = c * c * app - 2.0 * s * c * babs + s * s * aqq;
                let new_qq = s * s * app + 2.0 * s * c * babs + c * c * aqq;
                a.set(p, p, Complex64::new(new_pp, 0.0));
                a.set(q, q, Complex64::new(new_qq, 0.0));
                a.set(p, q, C_ZERO);
                a.set(q, p, C_ZERO);

                if let Some(vm) = v.as_mut() {
                    for j in 0..n {
                        let vjp = vm.get(j, p);
                        let vjq = vm.get(j, q);
                        vm.set(j, p, vjp * c - vjq * se_neg);
                        vm.set(j, q, vjp * se_pos + vjq * c);
                    }
                }
            }
        }
    }
    if !converged {
        // one final check: the last sweep may have finished the job
        let mut off_sq = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off_sq += a.get(p, q).norm_sqr();
            }
        }
        if off_sq > stop {
            return Err(Error::Numerical(format!(
                "Jacobi sweeps did not converge (off-diagonal {:.3e})",
                off_sq.sqrt()
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|vm| {
        let mut out = ComplexMatrix::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..n {
                out.set(r, new_col, vm.get(r, old_col));
            }
        }
        out
    });
    Ok((values, vectors))
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_eigmax(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(h, false)?.0[0])
}

#[cfg(test)]
fn residual(h: &ComplexMatrix, lam: &[f64], v: &ComplexMatrix) -> f64 {
    // ‖H V - V Λ‖_F, test helper
    let n = h.n();
    let hv = h.mul(v).unwrap();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            let d = hv.get(i, j) - v.get(i, j) * lam[j];
            acc += d.norm_sqr();
        }
    }
    acc.sqrt()
}

#[cfg(test)]
pub(crate) fn hermitian_from_parts(n: usize, rng: &mut crate::rng::Rng) -> ComplexMatrix {
    // random Hermitian for tests
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        m.set(i, i, Complex64::new(rng.normal(), 0.0));
        for j in i + 1..n {
            let z = rng.complex_normal();
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn diagonal_matrix_is_fixed_point() {
        let d = ComplexMatrix::diag(&[
            Complex64::new(3.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.5, 0.0),
        ]);
        let (lam, v) = hermitian_eigen(&d, true).unwrap();
        assert_eq!(lam, vec![3.0, 0.5, -1.0]);
        let v = v.unwrap();
        // columns are (possibly permuted) standard basis vectors
        assert!((v.get(0, 0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn known_two_by_two() {
        // [[2, 1+i],[1-i, 3]] has eigenvalues (5 ± sqrt(9+... )) -- compute:
        // tr = 5, det = 6 - |1+i|^2 = 4, eigs = (5 ± sqrt(25-16))/2 = (5±3)/2 = 4, 1
        let h = ComplexMatrix::from_rows(&[
            vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, 1.0)],
            vec![Complex64::new(1.0, -1.0), Complex64::new(3.0, 0.0)],
        ])
        .unwrap();
        let (lam, _) = hermitian_eigen(&h, false).unwrap();
        assert!((lam[0] - 4.0).abs() < 1e-13);
        assert!((lam[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn random_hermitian_decomposition_residual() {
        let mut rng = Rng::new(17);
        for n in [2usize, 3, 5, 8, 12] {
            let h = hermitian_from_parts(n, &mut rng);
            let (lam, v) = hermitian_eigen(&h, true).unwrap();
            let v = v.unwrap();
            let r = residual(&h, &lam, &v);
            assert!(r < 1e-12 * h.frobenius().max(1.0) * (n as f64), "n={n} residual {r}");
            // eigenvalues sorted descending
            for w in lam.windows(2) {
                assert!(w[0] >= w[1]);
            }
            // V unitary
            let vv = v.conj_transpose().mul(&v).unwrap();
            assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn trace_equals_eigenvalue_sum() {
        let mut rng = Rng::new(5);
        let h = hermitian_from_parts(6, &mut rng);
        let (lam, _) = hermitian_eigen(&h, false).unwrap();
        let sum: f64 = lam.iter().sum();
        assert!((sum - h.trace().re).abs() < 1e-12 * h.frobenius().max(1.0));
    }
}
