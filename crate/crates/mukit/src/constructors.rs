//! Builders for matrix families whose structured singular values are known
//! exactly: the two circulant templates with DFT spectra, doubly stochastic
//! matrices from seeded permutation mixtures, the checkerboard matrix, the
//! nonnegative cone spanned by those families, and full certificates for the
//! phase-twisted powers of cone members.

use crate::matnum::{spectral_norm, Complex64, ComplexMatrix, C_ZERO};
use crate::rng::Rng;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Parameters of one circulant template instance.
///
/// Even templates have first row `[z, z̄, α₂z, α₂z̄, …]` with `z = a + bi`
/// and size `n = 2(1 + #alphas)`; odd templates append the extra real entry
/// `α₁` and have size `n = 2(1 + #alphas) + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirculantSpec {
    pub parity: Parity,
    pub a: f64,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default)]
    pub alphas: Vec<f64>,
}

impl CirculantSpec {
    pub fn even(a: f64, b: f64, alphas: Vec<f64>) -> Self {
        CirculantSpec { parity: Parity::Even, a, b, alpha1: None, alphas }
    }

    pub fn odd(a: f64, b: f64, alpha1: f64, alphas: Vec<f64>) -> Self {
        CirculantSpec { parity: Parity::Odd, a, b, alpha1: Some(alpha1), alphas }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidParameter("circulant parameter a must be positive".into()));
        }
        if !self.b.is_finite() {
            return Err(Error::InvalidParameter("circulant parameter b must be finite".into()));
        }
        if self.alphas.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter("circulant alphas must be positive".into()));
        }
        match (self.parity, self.alpha1) {
            (Parity::Odd, Some(a1)) if a1 > 0.0 && a1.is_finite() => Ok(()),
            (Parity::Odd, _) => Err(Error::InvalidParameter(
                "odd circulants need a positive alpha1".into(),
            )),
            (Parity::Even, None) => Ok(()),
            (Parity::Even, Some(_)) => Err(Error::InvalidParameter(
                "even circulants take no alpha1".into(),
            )),
        }
    }

    pub fn n(&self) -> usize {
        match self.parity {
            Parity::Even => 2 * (1 + self.alphas.len()),
            Parity::Odd => 2 * (1 + self.alphas.len()) + 1,
        }
    }

    /// The constant row sum, which is also the spectral norm whenever
    /// `norm_guaranteed` holds.
    pub fn delta(&self) -> f64 {
        let alpha_sum: f64 = self.alphas.iter().sum();
        match self.parity {
            Parity::Even => 2.0 * self.a * (1.0 + alpha_sum),
            Parity::Odd => 2.0 * self.a * (1.0 + alpha_sum) + self.alpha1.unwrap_or(0.0),
        }
    }

    /// Odd templates always reach their row sum in norm; even templates only
    /// when a ≥ |b|.
    pub fn norm_guaranteed(&self) -> bool {
        match self.parity {
            Parity::Even => self.a >= self.b.abs(),
            Parity::Odd => true,
        }
    }

    pub fn first_row(&self) -> Vec<Complex64> {
        let z = Complex64::new(self.a, self.b);
        let mut row = vec![z, z.conj()];
        for &alpha in &self.alphas {
            row.push(z * alpha);
            row.push(z.conj() * alpha);
        }
        if let Some(a1) = self.alpha1 {
            row.push(Complex64::new(a1, 0.0));
        }
        row
    }

    pub fn build(&self) -> Result<ComplexMatrix> {
        self.validate()?;
        Ok(circulant_from_row(&self.first_row()))
    }
}

/// Row-circulant assembly: row i is the first row cyclically right-shifted
/// by i, i.e. entry (i, j) = row[(j − i) mod n].
pub fn circulant_from_row(row: &[Complex64]) -> ComplexMatrix {
    let n = row.len();
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, row[(j + n - i) % n]);
        }
    }
    m
}

/// Even circulant template. Returns the matrix and its row sum δ_e; when
/// `validate_norm` is set and a ≥ |b|, the spectral norm is checked to equal
/// δ_e. For a < |b| the norm claim is void and the caller decides how loudly
/// to warn.
pub fn circulant_even(a: f64, b: f64, alphas: &[f64], validate_norm: bool) -> Result<(ComplexMatrix, f64)> {
    let spec = CirculantSpec::even(a, b, alphas.to_vec());
    let m = spec.build()?;
    let delta = spec.delta();
    if validate_norm && spec.norm_guaranteed() {
        let sigma = spectral_norm(&m)?;
        if (sigma - delta).abs() > 1e-9 * delta.max(1.0) {
            return Err(Error::Numerical(format!(
                "even circulant norm {sigma} deviates from its row sum {delta}"
            )));
        }
    }
    Ok((m, delta))
}

/// Odd circulant template. Returns the matrix and δ_o; the spectral norm
/// always equals δ_o and is verified.
pub fn circulant_odd(a: f64, b: f64, alpha1: f64, alphas: &[f64]) -> Result<(ComplexMatrix, f64)> {
    let spec = CirculantSpec::odd(a, b, alpha1, alphas.to_vec());
    let m = spec.build()?;
    let delta = spec.delta();
    let sigma = spectral_norm(&m)?;
    if (sigma - delta).abs() > 1e-9 * delta.max(1.0) {
        return Err(Error::Numerical(format!(
            "odd circulant norm {sigma} deviates from its row sum {delta}"
        )));
    }
    Ok((m, delta))
}

/// Eigenvalues of the circulant with the given first row, by direct DFT:
/// λ_j = Σ_k row[k]·ω^{jk} with ω = e^{2πi/n}, ordered j = 0..n−1.
pub fn circulant_eigs(first_row: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = first_row.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty circulant row".into()));
    }
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = C_ZERO;
        for (k, &rk) in first_row.iter().enumerate() {
            let angle = TAU * ((j * k) % n) as f64 / n as f64;
            acc += rk * Complex64::from_polar(1.0, angle);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Doubly stochastic matrix as a convex mixture of k seeded permutation
/// matrices with strictly positive weights (normalized exponentials).
pub fn birkhoff(n: usize, k: usize, seed: u64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("at least one permutation required".into()));
    }
    let mut rng = Rng::derived(seed, 0xB1FF);
    let mut weights: Vec<f64> = (0..k).map(|_| rng.exponential().max(1e-12)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut m = ComplexMatrix::zeros(n);
    for &w in &weights {
        let p = rng.permutation(n);
        for (i, &j) in p.iter().enumerate() {
            let cur = m.get(i, j);
            m.set(i, j, cur + Complex64::new(w, 0.0));
        }
    }
    Ok(m)
}

/// The ±1 checkerboard with +1 in the top-left corner; odd dimensions only.
pub fn checkerboard(n: usize) -> Result<ComplexMatrix> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::InvalidParameter(
            "checkerboard is defined for odd dimensions only".into(),
        ));
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if (i + j) % 2 == 0 { 1.0 } else { -1.0 }).collect())
        .collect();
    ComplexMatrix::from_real_rows(&rows)
}

fn check_doubly_stochastic(m: &ComplexMatrix, tol: f64) -> Result<()> {
    let n = m.n();
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            if z.im.abs() > tol || z.re < -tol {
                return Err(Error::Precondition(format!(
                    "entry ({i}, {j}) = {z} is not a nonnegative real"
                )));
            }
        }
    }
    for (name, sums) in [("row", m.row_sums()), ("column", m.col_sums())] {
        for (i, s) in sums.iter().enumerate() {
            if (s - Complex64::new(1.0, 0.0)).norm() > tol {
                return Err(Error::Precondition(format!("{name} sum {i} is {s}, expected 1")));
            }
        }
    }
    Ok(())
}

/// Nonnegative combination Σ dᵢDᵢ + Σ αⱼCⱼ of doubly stochastic matrices and
/// circulant templates. Returns the combination and its constant row sum r,
/// which is also its spectral norm; both facts are verified before returning.
/// Even circulant terms with a < |b| are rejected because they would break
/// the norm additivity the certificate rests on.
pub fn cone_combo(
    ds_terms: &[(f64, ComplexMatrix)],
    cir_terms: &[(f64, CirculantSpec)],
) -> Result<(ComplexMatrix, f64)> {
    if ds_terms.is_empty() && cir_terms.is_empty() {
        return Err(Error::InvalidParameter("cone combination needs at least one term".into()));
    }
    let n = ds_terms
        .first()
        .map(|(_, m)| m.n())
        .or_else(|| cir_terms.first().map(|(_, s)| s.n()))
        .unwrap();
    let mut x = ComplexMatrix::zeros(n);
    let mut r = 0.0;
    for (w, d) in ds_terms {
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        if d.n() != n {
            return Err(Error::Dimension("cone terms must share one dimension".into()));
        }
        check_doubly_stochastic(d, 1e-10)?;
        x = x.add(&d.scale_re(*w))?;
        r += w;
    }
    for (w, spec) in cir_terms {
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        spec.validate()?;
        if spec.n() != n {
            return Err(Error::Dimension("cone terms must share one dimension".into()));
        }
        if !spec.norm_guaranteed() {
            return Err(Error::Precondition(
                "even circulant terms require a ≥ |b| inside cone combinations".into(),
            ));
        }
        let term = spec.build()?;
        // the certificate rests on each term reaching its row sum in norm,
        // so verify that numerically rather than trusting the parameters
        let delta = spec.delta();
        let sigma = spectral_norm(&term)?;
        if (sigma - delta).abs() > 1e-9 * delta.max(1.0) {
            return Err(Error::Precondition(format!(
                "circulant term norm {sigma} does not reach its row sum {delta}"
            )));
        }
        x = x.add(&term.scale_re(*w))?;
        r += w * delta;
    }
    let scale = r.max(1.0);
    for sums in [x.row_sums(), x.col_sums()] {
        for s in sums {
            if (s - Complex64::new(r, 0.0)).norm() > 1e-10 * scale {
                return Err(Error::Numerical(format!(
                    "cone combination sum {s} deviates from expected {r}"
                )));
            }
        }
    }
    let sigma = spectral_norm(&x)?;
    if (sigma - r).abs() > 1e-8 * scale {
        return Err(Error::Numerical(format!(
            "cone combination norm {sigma} deviates from its row sum {r}"
        )));
    }
    Ok((x, r))
}

/// One doubly stochastic term of a certificate, stored as real rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DsTerm {
    pub weight: f64,
    pub matrix: Vec<Vec<f64>>,
}

/// One circulant term of a certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CirTerm {
    pub weight: f64,
    #[serde(flatten)]
    pub spec: CirculantSpec,
}

/// Constructive description of δ·(W_θ X W_γ)^m with X a cone combination:
/// everything needed to rebuild the matrix and read off its certified value
/// δ·r^m, where r is the constant row sum of X.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OmegaCertificate {
    pub n: usize,
    pub delta: f64,
    pub theta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub m: u32,
    #[serde(default)]
    pub ds_terms: Vec<DsTerm>,
    #[serde(default)]
    pub cir_terms: Vec<CirTerm>,
    /// Constant row sum of X; recomputed and checked on validation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl OmegaCertificate {
    /// Check all certificate invariants, rebuild X, and fill in r.
    pub fn finalize(&mut self) -> Result<(ComplexMatrix, f64)> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("certificate dimension must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter("delta must be positive".into()));
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("power m must be at least 1".into()));
        }
        if self.theta.len() != self.n || self.gamma.len() != self.n {
            return Err(Error::Dimension("theta and gamma need one phase per index".into()));
        }
        let ds: Vec<(f64, ComplexMatrix)> = self
            .ds_terms
            .iter()
            .map(|t| Ok((t.weight, ComplexMatrix::from_real_rows(&t.matrix)?)))
            .collect::<Result<_>>()?;
        let cir: Vec<(f64, CirculantSpec)> =
            self.cir_terms.iter().map(|t| (t.weight, t.spec.clone())).collect();
        let (x, r) = cone_combo(&ds, &cir)?;
        if x.n() != self.n {
            return Err(Error::Dimension(format!(
                "certificate says n = {}, terms build {}x{}",
                self.n,
                x.n(),
                x.n()
            )));
        }
        if let Some(stored) = self.r {
            if (stored - r).abs() > 1e-9 * r.max(1.0) {
                return Err(Error::Precondition(format!(
                    "stored row sum {stored} disagrees with rebuilt value {r}"
                )));
            }
        }
        self.r = Some(r);
        Ok((x, r))
    }

    /// The certified value δ·r^m.
    pub fn expected_mu(&self) -> Option<f64> {
        self.r.map(|r| self.delta * r.powi(self.m as i32))
    }
}

/// Assemble δ·(W_θ X W_γ)^m from a certificate.
pub fn omega_build(cert: &mut OmegaCertificate) -> Result<ComplexMatrix> {
    let (x, _r) = cert.finalize()?;
    let w_theta = ComplexMatrix::diag_phases(&cert.theta);
    let w_gamma = ComplexMatrix::diag_phases(&cert.gamma);
    let core = w_theta.mul(&x)?.mul(&w_gamma)?;
    Ok(core.pow(cert.m).scale_re(cert.delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matnum::{eigenvalues, frobenius_norm, is_normal, singular_values, spectral_radius};
    use crate::rng::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// The 3×3 half-weight cyclic doubly stochastic core used in several
    /// reference instances.
    fn half_cycle_core() -> Vec<Vec<f64>> {
        vec![
            vec![0.5, 0.0, 0.5],
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.5, 0.5],
        ]
    }

    #[test]
    fn even_circulant_reference_instance() {
        let (m, delta) = circulant_even(1.0, -0.5, &[1.0 / 3.0], true).unwrap();
        assert!((delta - 8.0 / 3.0).abs() < 1e-15);
        assert!((spectral_norm(&m).unwrap() - 8.0 / 3.0).abs() < 1e-9);
        // spot-check the printed entries
        assert!((m.get(0, 0) - c(1.0, -0.5)).norm() < 1e-15);
        assert!((m.get(0, 1) - c(1.0, 0.5)).norm() < 1e-15);
        assert!((m.get(0, 2) - c(1.0 / 3.0, -1.0 / 6.0)).norm() < 1e-15);
        assert!((m.get(1, 0) - c(1.0 / 3.0, 1.0 / 6.0)).norm() < 1e-15);
        assert!((m.get(3, 0) - c(1.0, 0.5)).norm() < 1e-15);
        for s in m.row_sums() {
            assert!((s - c(8.0 / 3.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn even_circulant_with_dominant_b() {
        // a < |b|: the row sum stays 8 but the norm blows past it
        let (m, delta) = circulant_even(1.0, 2.0, &[3.0], true).unwrap();
        assert!((delta - 8.0).abs() < 1e-15);
        for s in m.row_sums() {
            assert!((s - c(8.0, 0.0)).norm() < 1e-12);
        }
        assert!((spectral_norm(&m).unwrap() - 16.0).abs() < 1e-9);
        assert!((m.get(0, 0) - c(1.0, 2.0)).norm() < 1e-15);
        assert!((m.get(1, 0) - c(3.0, -6.0)).norm() < 1e-15);
    }

    #[test]
    fn even_circulant_minimal() {
        let (m, delta) = circulant_even(1.0, 0.0, &[], true).unwrap();
        assert_eq!(delta, 2.0);
        assert_eq!(m.n(), 2);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m.get(i, j), c(1.0, 0.0));
            }
        }
        assert!((spectral_norm(&m).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn odd_circulant_reference_instance() {
        let b = -(3.0_f64.sqrt()) / 20.0;
        let (m, delta) = circulant_odd(0.05, b, 0.9, &[]).unwrap();
        assert!((delta - 1.0).abs() < 1e-15);
        let sv = singular_values(&m).unwrap();
        assert!((sv[0] - 1.0).abs() < 1e-9, "{sv:?}");
        assert!((sv[1] - 1.0).abs() < 1e-9, "{sv:?}");
        assert!((sv[2] - 0.7).abs() < 1e-9, "{sv:?}");
        // printed entries
        assert!((m.get(0, 0) - c(0.05, b)).norm() < 1e-15);
        assert!((m.get(0, 2) - c(0.9, 0.0)).norm() < 1e-15);
        assert!((m.get(1, 0) - c(0.9, 0.0)).norm() < 1e-15);
        assert!((m.get(2, 1) - c(0.9, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn odd_circulant_simple_instances() {
        let (_, delta) = circulant_odd(0.5, 0.0, 1.0, &[]).unwrap();
        assert_eq!(delta, 2.0);
    }

    #[test]
    fn odd_circulant_norm_can_exceed_row_sum() {
        // For |b| large against a the norm runs far past the row sum: the
        // j=0 mode keeps the row sum but another Fourier mode dominates.
        // The checked builder refuses such instances.
        assert!(matches!(
            circulant_odd(1.0, 100.0, 1.0, &[]),
            Err(Error::Numerical(_))
        ));
        let spec = CirculantSpec::odd(1.0, 100.0, 1.0, vec![]);
        let m = spec.build().unwrap();
        assert_eq!(spec.delta(), 3.0);
        let sigma = spectral_norm(&m).unwrap();
        assert!((sigma - 100.0 * 3.0_f64.sqrt()).abs() < 1e-6, "sigma {sigma}");
        // row sums still equal the nominal delta
        for s in m.row_sums() {
            assert!((s - c(3.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn circulant_rejects_bad_parameters() {
        assert!(circulant_even(0.0, 1.0, &[], true).is_err());
        assert!(circulant_even(1.0, 1.0, &[-0.5], true).is_err());
        assert!(circulant_odd(1.0, 0.0, 0.0, &[]).is_err());
        assert!(CirculantSpec { parity: Parity::Even, a: 1.0, b: 0.0, alpha1: Some(1.0), alphas: vec![] }
            .validate()
            .is_err());
    }

    #[test]
    fn circulant_eigs_constant_row() {
        let eigs = circulant_eigs(&[c(2.0, -1.0), C_ZERO, C_ZERO, C_ZERO]).unwrap();
        for e in eigs {
            assert!((e - c(2.0, -1.0)).norm() < 1e-14);
        }
        assert!(circulant_eigs(&[]).is_err());
    }

    #[test]
    fn circulant_eigs_match_dense_solver() {
        let mut rng = Rng::new(5);
        for n in [2usize, 3, 5, 8, 13] {
            let row: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
            let fast = circulant_eigs(&row).unwrap();
            let mut dense = eigenvalues(&circulant_from_row(&row)).unwrap();
            for e in &fast {
                let (k, d) = dense
                    .iter()
                    .enumerate()
                    .map(|(k, y)| (k, (e - y).norm()))
                    .min_by(|p, q| p.1.total_cmp(&q.1))
                    .unwrap();
                assert!(d < 1e-9, "n={n}: unmatched eigenvalue, distance {d}");
                dense.remove(k);
            }
        }
    }

    #[test]
    fn odd_reference_dominant_eigenvalue_is_row_sum() {
        let spec = CirculantSpec::odd(0.05, -(3.0_f64.sqrt()) / 20.0, 0.9, vec![]);
        let eigs = circulant_eigs(&spec.first_row()).unwrap();
        assert!((eigs[0] - c(1.0, 0.0)).norm() < 1e-12);
        let max_mod = eigs.iter().map(|e| e.norm()).fold(0.0, f64::max);
        assert!((max_mod - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circulants_are_normal() {
        let mut rng = Rng::new(6);
        for _ in 0..5 {
            let n = 2 + rng.below(6);
            let row: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
            let m = circulant_from_row(&row);
            let (ok, res) = is_normal(&m, 1e-10);
            assert!(ok, "residual {res}");
        }
    }

    #[test]
    fn birkhoff_invariants() {
        let p = birkhoff(4, 1, 7).unwrap();
        // a single term is a permutation matrix
        for i in 0..4 {
            let ones: usize = (0..4).filter(|&j| (p.get(i, j) - c(1.0, 0.0)).norm() < 1e-15).count();
            assert_eq!(ones, 1);
        }
        assert!((spectral_norm(&p).unwrap() - 1.0).abs() < 1e-10);

        let two = birkhoff(2, 2, 3).unwrap();
        // mixture of the only two 2×2 permutations
        assert!((two.get(0, 0) - two.get(1, 1)).norm() < 1e-15);
        assert!((two.get(0, 1) - two.get(1, 0)).norm() < 1e-15);

        for seed in 0..6u64 {
            let n = 2 + (seed as usize % 5);
            let m = birkhoff(n, 1 + (seed as usize % 4), seed).unwrap();
            for s in m.row_sums().iter().chain(m.col_sums().iter()) {
                assert!((s - c(1.0, 0.0)).norm() < 1e-12);
            }
            for e in m.entries() {
                assert!(e.re >= -1e-15 && e.im == 0.0);
            }
            assert!((spectral_norm(&m).unwrap() - 1.0).abs() < 1e-10);
        }
        assert!(birkhoff(3, 0, 0).is_err());
    }

    #[test]
    fn checkerboard_spectral_facts() {
        let d5 = checkerboard(5).unwrap();
        assert!((spectral_norm(&d5).unwrap() - 5.0).abs() < 1e-12);
        assert!((frobenius_norm(&d5) - 5.0).abs() < 1e-14);
        assert!((spectral_radius(&d5).unwrap() - 5.0).abs() < 1e-10);

        let d1 = checkerboard(1).unwrap();
        assert_eq!(spectral_norm(&d1).unwrap(), 1.0);

        let d3 = checkerboard(3).unwrap();
        assert!((spectral_norm(&d3).unwrap() - 3.0).abs() < 1e-12);

        // the row sums alternate ±1: moduli are all 1, the values are not
        // constant
        for (i, s) in d5.row_sums().iter().enumerate() {
            let want = if i % 2 == 0 { 1.0 } else { -1.0 };
            assert!((s - c(want, 0.0)).norm() < 1e-14);
        }

        assert!(checkerboard(4).is_err());
        assert!(checkerboard(0).is_err());
    }

    #[test]
    fn cone_combo_single_term() {
        let d = birkhoff(3, 2, 11).unwrap();
        let (x, r) = cone_combo(&[(3.0, d)], &[]).unwrap();
        assert!((r - 3.0).abs() < 1e-15);
        assert!((spectral_norm(&x).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn cone_combo_mixed_sum_reference() {
        // the 4×4 mixed sum: even circulant plus a prescribed doubly
        // stochastic matrix, with row sum 11/3 and a non-normal result
        let ds = ComplexMatrix::from_real_rows(&[
            vec![0.25, 0.0, 0.375, 0.375],
            vec![0.25, 0.0, 0.375, 0.375],
            vec![0.25, 0.5, 5.0 / 32.0, 3.0 / 32.0],
            vec![0.25, 0.5, 3.0 / 32.0, 5.0 / 32.0],
        ])
        .unwrap();
        let spec = CirculantSpec::even(1.0, -0.5, vec![1.0 / 3.0]);
        let (s, r) = cone_combo(&[(1.0, ds)], &[(1.0, spec)]).unwrap();
        assert!((r - 11.0 / 3.0).abs() < 1e-12);
        assert!((spectral_norm(&s).unwrap() - 11.0 / 3.0).abs() < 1e-9);
        let (ok, res) = is_normal(&s, 1e-10);
        assert!(!ok);
        assert!(res > 1e-3, "normality residual {res}");
        // printed entries of the assembled sum
        assert!((s.get(0, 0) - c(1.25, -0.5)).norm() < 1e-14);
        assert!((s.get(0, 2) - c(17.0 / 24.0, -1.0 / 6.0)).norm() < 1e-14);
        assert!((s.get(2, 1) - c(5.0 / 6.0, 1.0 / 6.0)).norm() < 1e-14);
        assert!((s.get(3, 2) - c(41.0 / 96.0, 1.0 / 6.0)).norm() < 1e-14);
    }

    #[test]
    fn cone_combo_rejects_norm_breaking_terms() {
        let spec = CirculantSpec::even(1.0, 2.0, vec![3.0]);
        assert!(matches!(cone_combo(&[], &[(1.0, spec)]), Err(Error::Precondition(_))));

        let not_ds = ComplexMatrix::from_real_rows(&[vec![0.9, 0.0], vec![0.0, 0.9]]).unwrap();
        assert!(cone_combo(&[(1.0, not_ds)], &[]).is_err());

        assert!(cone_combo(&[], &[]).is_err());
    }

    #[test]
    fn omega_reconstructs_reference_matrix() {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
        let mut cert = OmegaCertificate {
            n: 3,
            delta: 0.1,
            theta: vec![FRAC_PI_2, -FRAC_PI_2, FRAC_PI_3],
            gamma: vec![0.0; 3],
            m: 1,
            ds_terms: vec![DsTerm { weight: 1.0, matrix: half_cycle_core() }],
            cir_terms: vec![],
            r: None,
        };
        let a = omega_build(&mut cert).unwrap();
        assert_eq!(cert.r, Some(1.0));
        assert_eq!(cert.expected_mu(), Some(0.1));
        let expect = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.05), C_ZERO, c(0.0, 0.05)],
            vec![c(0.0, -0.05), c(0.0, -0.05), C_ZERO],
            vec![C_ZERO, c(0.025, 0.025 * 3.0_f64.sqrt()), c(0.025, 0.025 * 3.0_f64.sqrt())],
        ])
        .unwrap();
        assert!(a.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn omega_identity_case() {
        let mut cert = OmegaCertificate {
            n: 2,
            delta: 1.0,
            theta: vec![0.0; 2],
            gamma: vec![0.0; 2],
            m: 1,
            ds_terms: vec![DsTerm { weight: 1.0, matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]] }],
            cir_terms: vec![],
            r: None,
        };
        let a = omega_build(&mut cert).unwrap();
        assert!(a.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn omega_powers_stay_within_formula_budget() {
        // delta (W C W)^2 with the odd reference circulant: the certified
        // formula value is delta · r^2 and the assembled norm can not exceed it
        let mut rng = Rng::new(21);
        let mut cert = OmegaCertificate {
            n: 3,
            delta: 2.0,
            theta: (0..3).map(|_| rng.phase()).collect(),
            gamma: vec![0.0; 3],
            m: 2,
            ds_terms: vec![],
            cir_terms: vec![CirTerm {
                weight: 1.0,
                spec: CirculantSpec::odd(0.05, -(3.0_f64.sqrt()) / 20.0, 0.9, vec![]),
            }],
            r: None,
        };
        let a = omega_build(&mut cert).unwrap();
        assert_eq!(cert.expected_mu(), Some(2.0));
        let sigma = spectral_norm(&a).unwrap();
        assert!(sigma <= 2.0 + 1e-9, "sigma {sigma}");
    }

    #[test]
    fn certificate_json_round_trip() {
        let mut cert = OmegaCertificate {
            n: 3,
            delta: 0.25,
            theta: vec![0.1, 0.2, 0.3],
            gamma: vec![-0.1, 0.0, 0.5],
            m: 3,
            ds_terms: vec![DsTerm { weight: 0.5, matrix: half_cycle_core() }],
            cir_terms: vec![CirTerm {
                weight: 2.0,
                spec: CirculantSpec::odd(0.05, -(3.0_f64.sqrt()) / 20.0, 0.9, vec![]),
            }],
            r: None,
        };
        cert.finalize().unwrap();
        let json = serde_json::to_string_pretty(&cert).unwrap();
        let mut back: OmegaCertificate = serde_json::from_str(&json).unwrap();
        let (x1, r1) = cert.finalize().unwrap();
        let (x2, r2) = back.finalize().unwrap();
        assert_eq!(r1, r2);
        assert_eq!(x1.max_abs_diff(&x2), 0.0);
        assert_eq!(cert.expected_mu(), back.expected_mu());
    }

    #[test]
    fn certificate_rejects_inconsistencies() {
        let mut cert = OmegaCertificate {
            n: 2,
            delta: 1.0,
            theta: vec![0.0; 2],
            gamma: vec![0.0; 2],
            m: 1,
            ds_terms: vec![DsTerm { weight: 1.0, matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]] }],
            cir_terms: vec![],
            r: Some(7.0),
        };
        assert!(cert.finalize().is_err());

        let mut zero_delta = OmegaCertificate {
            n: 1,
            delta: 0.0,
            theta: vec![0.0],
            gamma: vec![0.0],
            m: 1,
            ds_terms: vec![DsTerm { weight: 1.0, matrix: vec![vec![1.0]] }],
            cir_terms: vec![],
            r: None,
        };
        assert!(zero_delta.finalize().is_err());
    }
}
