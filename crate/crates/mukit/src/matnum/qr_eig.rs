//! General complex eigenvalues: Householder reduction to upper Hessenberg
//! form followed by Wilkinson-shifted QR iteration with deflation, plus
//! inverse iteration for individual eigenvectors.

use super::matrix::{vec_dot, vec_norm, Complex64, ComplexMatrix, Lu, C_ONE, C_ZERO};
use crate::{Error, Result};

const DEFLATE_REL: f64 = 1e-14;

/// All eigenvalues with multiplicity, sorted by modulus descending and
/// principal argument ascending.
pub fn eigenvalues_qr(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    m.validate_finite()?;
    let n = m.n();
    if n == 1 {
        return Ok(vec![m.get(0, 0)]);
    }
    let mut h = m.clone();
    hessenberg_in_place(&mut h);
    let mut eigs = qr_iterate(&mut h)?;
    sort_eigenvalues(&mut eigs);
    Ok(eigs)
}

/// Sort by (modulus descending, principal argument ascending).
pub fn sort_eigenvalues(eigs: &mut [Complex64]) {
    eigs.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then_with(|| a.arg().total_cmp(&b.arg()))
    });
}

fn hessenberg_in_place(h: &mut ComplexMatrix) {
    let n = h.n();
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k below the subdiagonal
        let mut x: Vec<Complex64> = (k + 1..n).map(|i| h.get(i, k)).collect();
        let xnorm = vec_norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let sign = if x0 == C_ZERO { C_ONE } else { x0 / x0.norm() };
        let alpha = -sign * xnorm;
        x[0] -= alpha;
        let vnorm_sq: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;

        // left: H <- (I - beta v v*) H on rows k+1.., columns k..
        for j in k..n {
            let mut acc = C_ZERO;
            for (t, xi) in x.iter().enumerate() {
                acc += xi.conj() * h.get(k + 1 + t, j);
            }
            acc *= beta;
            for (t, xi) in x.iter().enumerate() {
                let cur = h.get(k + 1 + t, j);
                h.set(k + 1 + t, j, cur - xi * acc);
            }
        }
        // right: H <- H (I - beta v v*) on columns k+1.., all rows
        for i in 0..n {
            let mut acc = C_ZERO;
            for (t, xi) in x.iter().enumerate() {
                acc += h.get(i, k + 1 + t) * xi;
            }
            acc *= beta;
            for (t, xi) in x.iter().enumerate() {
                let cur = h.get(i, k + 1 + t);
                h.set(i, k + 1 + t, cur - acc * xi.conj());
            }
        }
        // entries below the subdiagonal in column k are now zero
        h.set(k + 1, k, Complex64::new(alpha.re, alpha.im));
        for i in k + 2..n {
            h.set(i, k, C_ZERO);
        }
    }
}

fn qr_iterate(h: &mut ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.n();
    let fro = h.frobenius().max(f64::MIN_POSITIVE);
    let max_total = 100 * n;
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut total_iters = 0usize;
    let mut window_iters = 0usize;

    'outer: loop {
        // zero negligible subdiagonals
        for i in 1..=hi {
            let s = h.get(i - 1, i - 1).norm() + h.get(i, i).norm();
            let thr = if s > 0.0 { DEFLATE_REL * s } else { DEFLATE_REL * fro };
            if h.get(i, i - 1).norm() <= thr {
                h.set(i, i - 1, C_ZERO);
            }
        }
        // deflate converged 1x1 tails
        while hi > 0 && h.get(hi, hi - 1) == C_ZERO {
            eigs.push(h.get(hi, hi));
            hi -= 1;
            window_iters = 0;
        }
        if hi == 0 {
            eigs.push(h.get(0, 0));
            break 'outer;
        }
        // active window [lo..=hi]
        let mut lo = hi;
        while lo > 0 && h.get(lo, lo - 1) != C_ZERO {
            lo -= 1;
        }

        if total_iters >= max_total {
            return Err(Error::Numerical(format!(
                "QR iteration did not converge after {max_total} steps \
                 ({} of {} eigenvalues found)",
                eigs.len(),
                n
            )));
        }
        total_iters += 1;
        window_iters += 1;

        let shift = if window_iters % 12 == 0 {
            // exceptional shift to break potential cycles
            let s = h.get(hi, hi - 1).norm();
            h.get(hi, hi) + Complex64::new(0.75 * s, 0.0)
        } else {
            wilkinson_shift(h, hi)
        };

        qr_step(h, lo, hi, shift);
    }

    Ok(eigs)
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h.get(hi - 1, hi - 1);
    let b = h.get(hi - 1, hi);
    let c = h.get(hi, hi - 1);
    let d = h.get(hi, hi);
    let mean = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    let r1 = mean + disc;
    let r2 = mean - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    for i in lo..=hi {
        let v = h.get(i, i);
        h.set(i, i, v - shift);
    }
    // left Givens sweep: Q* (H - sI) = R
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let a = h.get(k, k);
        let b = h.get(k + 1, k);
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (1.0, C_ZERO)
        } else if a == C_ZERO {
            (0.0, b.conj() / b.norm())
        } else {
            let aphase = a / a.norm();
            (a.norm() / r, aphase * b.conj() / r)
        };
        rots.push((c, s));
        for j in k..=hi {
            let top = h.get(k, j);
            let bot = h.get(k + 1, j);
            h.set(k, j, top * c + bot * s);
            h.set(k + 1, j, -(s.conj()) * top + bot * c);
        }
    }
    // right sweep: R Q, column pairs in the same order
    for (t, &(c, s)) in rots.iter().enumerate() {
        let k = lo + t;
        let top_row = lo;
        let bot_row = (k + 2).min(hi);
        for i in top_row..=bot_row {
            let ck = h.get(i, k);
            let ck1 = h.get(i, k + 1);
            h.set(i, k, ck * c + ck1 * s.conj());
            h.set(i, k + 1, -ck * s + ck1 * c);
        }
    }
    for i in lo..=hi {
        let v = h.get(i, i);
        h.set(i, i, v + shift);
    }
}

/// Right eigenvector for a given (approximate) eigenvalue, by shifted
/// inverse iteration. The returned vector has unit Euclidean norm.
pub fn eigenvector_for(m: &ComplexMatrix, lambda: Complex64) -> Result<Vec<Complex64>> {
    let n = m.n();
    if n == 1 {
        return Ok(vec![C_ONE]);
    }
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    let mut delta = 1e-10 * lambda.norm().max(1e-3 * scale);
    for _attempt in 0..4 {
        let shift = lambda + Complex64::new(delta, 0.5 * delta);
        let mut shifted = m.clone();
        for i in 0..n {
            let v = shifted.get(i, i);
            shifted.set(i, i, v - shift);
        }
        if let Some(lu) = Lu::factor(&shifted) {
            let norm0 = 1.0 / (n as f64).sqrt();
            let mut b = vec![Complex64::new(norm0, 0.0); n];
            for _ in 0..3 {
                let x = lu.solve(&b);
                let xn = vec_norm(&x);
                if !xn.is_finite() || xn == 0.0 {
                    break;
                }
                b = x.iter().map(|z| z / xn).collect();
            }
            // fix the overall phase: make the largest component real positive
            let k = (0..n)
                .max_by(|&i, &j| b[i].norm_sqr().total_cmp(&b[j].norm_sqr()))
                .unwrap();
            if b[k] != C_ZERO {
                let phase = b[k] / b[k].norm();
                b = b.iter().map(|z| z * phase.conj()).collect();
            }
            let mv = m.mul_vec(&b);
            let res: f64 = mv
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if res <= 1e-6 * scale {
                return Ok(b);
            }
            // residual too large: retry with a bigger detuning
        }
        delta *= 100.0;
    }
    Err(Error::Numerical("inverse iteration failed to produce an eigenvector".into()))
}

/// Left eigenvector w (so that w* M = lambda w*), unit norm.
pub fn left_eigenvector_for(m: &ComplexMatrix, lambda: Complex64) -> Result<Vec<Complex64>> {
    eigenvector_for(&m.conj_transpose(), lambda.conj())
}

#[allow(dead_code)]
pub(crate) fn rayleigh(m: &ComplexMatrix, v: &[Complex64]) -> Complex64 {
    let mv = m.mul_vec(v);
    vec_dot(v, &mv) / vec_dot(v, v)
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

    fn assert_multiset_close(a: &[Complex64], b: &[Complex64], tol: f64) {
        assert_eq!(a.len(), b.len());
        let mut used = vec![false; b.len()];
        for x in a {
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            for (j, y) in b.iter().enumerate() {
                if !used[j] {
                    let d = (x - y).norm();
                    if d < best_d {
                        best_d = d;
                        best = j;
                    }
                }
            }
            assert!(best_d <= tol, "eigenvalue {x} unmatched (closest {best_d:.3e})");
            used[best] = true;
        }
    }

    #[test]
    fn triangular_eigenvalues_are_the_diagonal() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(5.0, 0.0), c(-1.0, 1.0)],
            vec![c(0.0, 0.0), c(-3.0, 0.5), c(2.0, 2.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.25, -4.0)],
        ])
        .unwrap();
        let eigs = eigenvalues_qr(&a).unwrap();
        assert_multiset_close(&eigs, &[c(1.0, 2.0), c(-3.0, 0.5), c(0.25, -4.0)], 1e-12);
    }

    #[test]
    fn companion_matrix_recovers_roots() {
        // companion of z^3 - 6z^2 + 11z - 6 = (z-1)(z-2)(z-3)
        let a = ComplexMatrix::from_real_rows(&[
            vec![6.0, -11.0, 6.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let eigs = eigenvalues_qr(&a).unwrap();
        assert_multiset_close(&eigs, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], 1e-10);
    }

    #[test]
    fn trace_and_det_match_eigs() {
        let mut rng = Rng::new(23);
        for n in [2usize, 3, 4, 6, 9] {
            let a = random_matrix(n, &mut rng);
            let eigs = eigenvalues_qr(&a).unwrap();
            let sum: Complex64 = eigs.iter().sum();
            let prod: Complex64 = eigs.iter().product();
            assert!((sum - a.trace()).norm() < 1e-10 * a.frobenius().max(1.0), "trace n={n}");
            assert!(
                (prod - a.det()).norm() < 1e-8 * a.frobenius().max(1.0).powi(n as i32),
                "det n={n}"
            );
        }
    }

    #[test]
    fn transpose_has_same_spectrum() {
        let mut rng = Rng::new(29);
        for _ in 0..5 {
            let a = random_matrix(5, &mut rng);
            let e1 = eigenvalues_qr(&a).unwrap();
            let e2 = eigenvalues_qr(&a.transpose()).unwrap();
            assert_multiset_close(&e1, &e2, 1e-8);
        }
    }

    #[test]
    fn ordering_is_modulus_desc_then_arg_asc() {
        let a = ComplexMatrix::diag(&[c(0.0, 2.0), c(2.0, 0.0), c(-1.0, 0.0)]);
        let eigs = eigenvalues_qr(&a).unwrap();
        // moduli 2, 2, 1; args 90deg vs 0deg -> 0deg first
        assert!((eigs[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((eigs[1] - c(0.0, 2.0)).norm() < 1e-12);
        assert!((eigs[2] - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eigenvector_matches_eigenvalue() {
        let mut rng = Rng::new(31);
        for _ in 0..5 {
            let a = random_matrix(4, &mut rng);
            let eigs = eigenvalues_qr(&a).unwrap();
            let lam = eigs[0];
            let v = eigenvector_for(&a, lam).unwrap();
            let av = a.mul_vec(&v);
            let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - y * lam).norm_sqr()).sum::<f64>().sqrt();
            assert!(res < 1e-8 * a.frobenius().max(1.0), "residual {res}");

            let w = left_eigenvector_for(&a, lam).unwrap();
            let wa = a.conj_transpose().mul_vec(&w);
            let res_l: f64 = wa
                .iter()
                .zip(&w)
                .map(|(x, y)| (x - y * lam.conj()).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res_l < 1e-8 * a.frobenius().max(1.0), "left residual {res_l}");
        }
    }

    #[test]
    fn identity_eigenvalues() {
        let eigs = eigenvalues_qr(&ComplexMatrix::identity(5)).unwrap();
        for e in eigs {
            assert!((e - C_ONE).norm() < 1e-14);
        }
    }
}
