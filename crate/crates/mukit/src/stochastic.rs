//! Row/column-sum structure analysis of generalized stochastic matrices and
//! the exact structured-singular-value oracles available on that class.
//!
//! A matrix with constant row sum c always satisfies |c| ≤ σ_max; when the
//! two are equal the column sums are forced to the same constant and every
//! power of the matrix has a known exact structured singular value σ^m,
//! independent of the block structure. The weaker equimodular hypothesis
//! (all row-sum moduli equal to σ_max) buys the same formula provided the
//! structure contains the diagonal phase pattern of the row sums, and such
//! matrices factor as σ·W·D with W a diagonal unitary and D a 1-generalized
//! doubly stochastic matrix of unit norm.

use crate::blockstruct::{contains_diagonal, BlockStructure};
use crate::constructors::OmegaCertificate;
use crate::matnum::{spectral_norm, Complex64, ComplexMatrix};
use crate::{Error, Result};

/// Default tolerance for the class-membership tests; extremality decisions
/// deliberately reject borderline cases instead of guessing.
pub const CLASS_TOL: f64 = 1e-8;

/// Which side of the matrix a factorization peels phases from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Row,
    Column,
}

/// Everything the row/column sums say about one matrix.
#[derive(Debug, Clone)]
pub struct StochasticProfile {
    pub row_sums: Vec<Complex64>,
    pub col_sums: Vec<Complex64>,
    pub constant_row: Option<Complex64>,
    pub constant_col: Option<Complex64>,
    pub sigma: f64,
    pub equimodular_rows: bool,
    pub equimodular_cols: bool,
    /// arg(row sum i), populated when the rows are equimodular.
    pub row_phases: Vec<f64>,
    /// arg(column sum j), populated when the columns are equimodular.
    pub col_phases: Vec<f64>,
}

fn constant_value(sums: &[Complex64], tol: f64, scale: f64) -> Option<Complex64> {
    let n = sums.len() as f64;
    let mean = sums.iter().sum::<Complex64>() / n;
    let spread = sums.iter().map(|s| (s - mean).norm()).fold(0.0, f64::max);
    (spread <= tol * scale).then_some(mean)
}

fn equimodular(sums: &[Complex64], sigma: f64, tol: f64, scale: f64) -> bool {
    sums.iter().all(|s| (s.norm() - sigma).abs() <= tol * scale)
}

/// Populate a profile. `tol` drives both the constancy and the
/// equimodularity decisions, each scaled by the matrix magnitude.
pub fn profile(a: &ComplexMatrix, tol: f64) -> Result<StochasticProfile> {
    a.validate_finite()?;
    let n = a.n();
    let row_sums = a.row_sums();
    let col_sums = a.col_sums();
    let sigma = spectral_norm(a)?;
    let sum_scale = (a.max_abs_entry() * n as f64).max(1.0);
    let mod_scale = a.frobenius().max(1.0);
    let constant_row = constant_value(&row_sums, tol, sum_scale);
    let constant_col = constant_value(&col_sums, tol, sum_scale);
    let equimodular_rows = equimodular(&row_sums, sigma, tol, mod_scale);
    let equimodular_cols = equimodular(&col_sums, sigma, tol, mod_scale);
    let phases = |sums: &[Complex64], on: bool| -> Vec<f64> {
        if on && sigma > 0.0 {
            sums.iter().map(|s| s.arg()).collect()
        } else {
            Vec::new()
        }
    };
    Ok(StochasticProfile {
        row_phases: phases(&row_sums, equimodular_rows),
        col_phases: phases(&col_sums, equimodular_cols),
        row_sums,
        col_sums,
        constant_row,
        constant_col,
        sigma,
        equimodular_rows,
        equimodular_cols,
    })
}

/// For a constant-row-sum matrix, the slack σ − |c| (never meaningfully
/// negative).
pub fn check_row_bound(a: &ComplexMatrix) -> Result<f64> {
    let p = profile(a, CLASS_TOL)?;
    let c = p.constant_row.ok_or_else(|| {
        Error::Precondition("matrix does not have a constant row sum".into())
    })?;
    Ok(p.sigma - c.norm())
}

/// Outcome of the extremality check: when |c| = σ the column sums must agree
/// with the row constant.
#[derive(Debug, Clone)]
pub struct ExtremalCheck {
    pub pass: bool,
    pub residual: f64,
}

/// Verify that a constant-row-sum matrix at the extreme |c| = σ is in fact
/// doubly stochastic with the same constant on the columns.
pub fn check_extremal_doubly(a: &ComplexMatrix, tol: f64) -> Result<ExtremalCheck> {
    let p = profile(a, tol)?;
    let c = p.constant_row.ok_or_else(|| {
        Error::Precondition("matrix does not have a constant row sum".into())
    })?;
    let scale = a.frobenius().max(1.0);
    if (c.norm() - p.sigma).abs() > tol * scale {
        return Err(Error::Precondition(format!(
            "row-sum modulus {} is not extremal against the norm {}",
            c.norm(),
            p.sigma
        )));
    }
    let residual = p
        .col_sums
        .iter()
        .map(|s| (s - c).norm())
        .fold(0.0, f64::max);
    Ok(ExtremalCheck { pass: residual <= tol.max(1e-6) * scale, residual })
}

/// Exact value σ^m for powers of a constant-row-sum matrix at the extreme
/// |c| = σ; valid for every block structure of matching dimension.
pub fn mu_exact_power(a: &ComplexMatrix, m: u32, structure: &BlockStructure) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("power must be at least 1".into()));
    }
    if a.n() != structure.n() {
        return Err(Error::Dimension("structure dimension mismatch".into()));
    }
    let p = profile(a, CLASS_TOL)?;
    let c = p
        .constant_row
        .ok_or_else(|| Error::NotInClass("row sums are not constant".into()))?;
    let scale = a.frobenius().max(1.0);
    if (c.norm() - p.sigma).abs() > CLASS_TOL * scale {
        return Err(Error::NotInClass(format!(
            "row-sum modulus {} sits below the norm {}",
            c.norm(),
            p.sigma
        )));
    }
    Ok(p.sigma.powi(m as i32))
}

/// Exact value σ^m under the equimodular hypothesis, which additionally
/// needs the structure to contain the diagonal phase pattern of the sums.
pub fn mu_exact_equimodular(a: &ComplexMatrix, m: u32, structure: &BlockStructure) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("power must be at least 1".into()));
    }
    if a.n() != structure.n() {
        return Err(Error::Dimension("structure dimension mismatch".into()));
    }
    let p = profile(a, CLASS_TOL)?;
    if !p.equimodular_rows && !p.equimodular_cols {
        return Err(Error::NotInClass(
            "neither row nor column sums are equimodular at the norm".into(),
        ));
    }
    if p.equimodular_rows && contains_diagonal(structure, &p.row_phases) {
        return Ok(p.sigma.powi(m as i32));
    }
    if p.equimodular_cols && contains_diagonal(structure, &p.col_phases) {
        return Ok(p.sigma.powi(m as i32));
    }
    Err(Error::Hypothesis(
        "structure does not contain the diagonal phase pattern of the sums".into(),
    ))
}

/// The σ·W·D factorization of an equimodular matrix.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub sigma: f64,
    pub w: ComplexMatrix,
    pub d_core: ComplexMatrix,
    pub side: Side,
}

impl Factorization {
    /// Reassemble the original matrix.
    pub fn reassemble(&self) -> Result<ComplexMatrix> {
        let prod = match self.side {
            Side::Row => self.w.mul(&self.d_core)?,
            Side::Column => self.d_core.mul(&self.w)?,
        };
        Ok(prod.scale_re(self.sigma))
    }
}

/// Peel the sum phases off an equimodular matrix: Row side gives
/// A = σ·W_θ·D, Column side gives A = σ·D·W_γ, with D a 1-generalized
/// doubly stochastic matrix of unit norm.
pub fn decompose_equimodular(a: &ComplexMatrix, side: Side) -> Result<Factorization> {
    let p = profile(a, CLASS_TOL)?;
    let n = a.n();
    if p.sigma == 0.0 {
        return Ok(Factorization {
            sigma: 0.0,
            w: ComplexMatrix::identity(n),
            d_core: a.clone(),
            side,
        });
    }
    let (ok, phases) = match side {
        Side::Row => (p.equimodular_rows, &p.row_phases),
        Side::Column => (p.equimodular_cols, &p.col_phases),
    };
    if !ok {
        return Err(Error::NotInClass(format!(
            "{side:?} sums are not equimodular at the norm"
        )));
    }
    let w = ComplexMatrix::diag_phases(phases);
    let inv = 1.0 / p.sigma;
    let d_core = match side {
        Side::Row => w.conj_transpose().mul(a)?.scale_re(inv),
        Side::Column => a.mul(&w.conj_transpose())?.scale_re(inv),
    };
    Ok(Factorization { sigma: p.sigma, w, d_core, side })
}

/// For a 1-generalized doubly stochastic matrix of unit norm, every entry
/// modulus is at most 1. Returns the check outcome and the largest modulus.
pub fn entry_bound_check(d: &ComplexMatrix) -> Result<(bool, f64)> {
    let p = profile(d, CLASS_TOL)?;
    let scale = d.frobenius().max(1.0);
    let one = Complex64::new(1.0, 0.0);
    let row_ok = p.constant_row.map(|c| (c - one).norm() <= CLASS_TOL * scale);
    let col_ok = p.constant_col.map(|c| (c - one).norm() <= CLASS_TOL * scale);
    if row_ok != Some(true) || col_ok != Some(true) {
        return Err(Error::Precondition(
            "matrix is not 1-generalized doubly stochastic".into(),
        ));
    }
    if (p.sigma - 1.0).abs() > CLASS_TOL * scale {
        return Err(Error::Precondition(format!(
            "norm is {}, the entry bound needs norm 1",
            p.sigma
        )));
    }
    let max_mod = d.max_abs_entry();
    Ok((max_mod <= 1.0 + 1e-9, max_mod))
}

/// Certified exact value δ·r^m for a phase-twisted cone-member power, once
/// the structure contains both diagonal phase patterns.
pub fn mu_exact_class(cert: &OmegaCertificate, structure: &BlockStructure) -> Result<f64> {
    let mut cert = cert.clone();
    let (_x, r) = cert.finalize()?;
    if structure.n() != cert.n {
        return Err(Error::Dimension("structure dimension mismatch".into()));
    }
    if !contains_diagonal(structure, &cert.theta) || !contains_diagonal(structure, &cert.gamma) {
        return Err(Error::Hypothesis(
            "structure does not contain the certificate phase diagonals".into(),
        ));
    }
    Ok(cert.delta * r.powi(cert.m as i32))
}
