//! Closed-form spectral kernels for n ≤ 3, used by the optimizer and oracle
//! inner loops where millions of evaluations occur. Final reported values are
//! always recomputed through the standard Jacobi/QR paths; these routines only
//! steer the search.

use super::matrix::{Complex64, ComplexMatrix, C_ZERO};
use super::qr_eig::eigenvalues_qr;
use crate::Result;

/// Principal complex square root without trigonometry.
#[inline]
pub(crate) fn csqrt(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return C_ZERO;
    }
    let r = z.norm();
    let re = ((r + z.re) * 0.5).max(0.0).sqrt();
    let im = ((r - z.re) * 0.5).max(0.0).sqrt();
    if z.im >= 0.0 {
        Complex64::new(re, im)
    } else {
        Complex64::new(re, -im)
    }
}

/// Principal complex cube root.
#[inline]
fn ccbrt(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return C_ZERO;
    }
    Complex64::from_polar(z.norm().cbrt(), z.arg() / 3.0)
}

const OMEGA: Complex64 = Complex64::new(-0.5, 0.866_025_403_784_438_6);
const OMEGA2: Complex64 = Complex64::new(-0.5, -0.866_025_403_784_438_6);

/// Cardano roots of λ³ − c2·λ² + c1·λ − c0 without polishing; accurate to
/// roughly 1e-10 relative on well-scaled inputs, which is all a grid scan
/// needs.
#[inline]
pub(crate) fn cubic_roots_raw(c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 3] {
    let a = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = c1 * a - a * a * a * 2.0 - c0;
    let half_q = q * 0.5;
    let disc = half_q * half_q + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let s = csqrt(disc);
    let w1 = -half_q + s;
    let w2 = -half_q - s;
    let w = if w1.norm_sqr() >= w2.norm_sqr() { w1 } else { w2 };
    if w.norm_sqr() == 0.0 {
        // p = q = 0: triple root at the centroid
        [a, a, a]
    } else {
        let u = ccbrt(w);
        let v = -p / (u * 3.0);
        [
            u + v + a,
            u * OMEGA + v * OMEGA2 + a,
            u * OMEGA2 + v * OMEGA + a,
        ]
    }
}

/// Roots of λ³ − c2·λ² + c1·λ − c0 (the characteristic polynomial of a 3×3
/// matrix with trace c2, second elementary symmetric function c1 and
/// determinant c0), with one Newton polish per root.
#[inline]
pub(crate) fn cubic_roots(c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 3] {
    let mut roots = cubic_roots_raw(c2, c1, c0);
    for r in roots.iter_mut() {
        let fp = *r * *r * 3.0 - c2 * *r * 2.0 + c1;
        if fp.norm_sqr() > 1e-300 {
            let f = ((*r - c2) * *r + c1) * *r - c0;
            *r -= f / fp;
        }
    }
    roots
}

/// Characteristic coefficients (trace, 2x2-minor sum, determinant) of a 3×3.
#[inline]
pub(crate) fn char3(m: &ComplexMatrix) -> (Complex64, Complex64, Complex64) {
    let g = |i, j| m.get(i, j);
    let c2 = g(0, 0) + g(1, 1) + g(2, 2);
    let c1 = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) + g(0, 0) * g(2, 2) - g(0, 2) * g(2, 0)
        + g(1, 1) * g(2, 2)
        - g(1, 2) * g(2, 1);
    let c0 = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
        - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
        + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
    (c2, c1, c0)
}

/// Spectral radius steering value: closed form for n ≤ 3, QR beyond.
pub(crate) fn rho_fast(m: &ComplexMatrix) -> Result<f64> {
    match m.n() {
        1 => Ok(m.get(0, 0).norm()),
        2 => {
            let tr = m.get(0, 0) + m.get(1, 1);
            let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
            let disc = csqrt(tr * tr - det * 4.0);
            let r1 = (tr + disc) * 0.5;
            let r2 = (tr - disc) * 0.5;
            Ok(r1.norm().max(r2.norm()))
        }
        3 => {
            let (c2, c1, c0) = char3(m);
            let roots = cubic_roots(c2, c1, c0);
            Ok(roots.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max).sqrt())
        }
        _ => {
            let eigs = eigenvalues_qr(m)?;
            Ok(eigs[0].norm())
        }
    }
}

/// Largest eigenvalue of a 2×2 Hermitian matrix.
#[inline]
fn herm2_eigmax(h: &ComplexMatrix) -> f64 {
    let a = h.get(0, 0).re;
    let d = h.get(1, 1).re;
    let b2 = h.get(0, 1).norm_sqr();
    let mean = 0.5 * (a + d);
    mean + (0.25 * (a - d) * (a - d) + b2).sqrt()
}

/// Largest eigenvalue of a 3×3 Hermitian matrix (trigonometric method).
#[inline]
fn herm3_eigmax(h: &ComplexMatrix) -> f64 {
    let q = (h.get(0, 0).re + h.get(1, 1).re + h.get(2, 2).re) / 3.0;
    let p1 = h.get(0, 1).norm_sqr() + h.get(0, 2).norm_sqr() + h.get(1, 2).norm_sqr();
    let d0 = h.get(0, 0).re - q;
    let d1 = h.get(1, 1).re - q;
    let d2 = h.get(2, 2).re - q;
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    if p2 <= 0.0 {
        return q;
    }
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return q;
    }
    // r = det((H - qI)/p) / 2, real for Hermitian input
    let inv = 1.0 / p;
    let b00 = d0 * inv;
    let b11 = d1 * inv;
    let b22 = d2 * inv;
    let b01 = h.get(0, 1) * inv;
    let b02 = h.get(0, 2) * inv;
    let b12 = h.get(1, 2) * inv;
    let det = b00 * b11 * b22 - b00 * b12.norm_sqr() - b22 * b01.norm_sqr() - b11 * b02.norm_sqr()
        + 2.0 * (b01 * b12 * b02.conj()).re;
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * phi.cos()
}

/// Spectral norm steering value: closed form for n ≤ 3, Jacobi beyond.
pub(crate) fn sigma_fast(m: &ComplexMatrix) -> Result<f64> {
    match m.n() {
        1 => Ok(m.get(0, 0).norm()),
        2 => Ok(herm2_eigmax(&m.gram()).max(0.0).sqrt()),
        3 => Ok(herm3_eigmax(&m.gram()).max(0.0).sqrt()),
        _ => {
            let lam = super::hermitian::hermitian_eigmax(&m.gram())?;
            Ok(lam.max(0.0).sqrt())
        }
    }
}
