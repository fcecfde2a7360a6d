//! Lower and upper bounds for the structured singular value, a destabilizing
//! perturbation certificate, and a brute-force grid oracle for small
//! all-scalar structures.
//!
//! The lower bound is a multistart local ascent of ρ(MU) over the unitary
//! members: the identity is always a start (so the bound never falls below
//! ρ(M)), one start is the block polar factor of M*, and the rest are seeded
//! samples. Each ascent step moves along the eigen-sensitivity direction of
//! the dominant eigenvalue and retracts onto the members, with backtracking
//! step halving. All-scalar structures additionally get cyclic coordinate
//! ascent over the block phases with a golden-section line search.
//!
//! The upper bound minimizes σ_max(D M D⁻¹) over the positive block scalings
//! in log-coordinates (the last block pinned to 1), one coordinate at a time
//! with bracketing plus golden section; that objective has no spurious local
//! minima, so coordinate descent converges to the infimum.
//!
//! Both searches run on a power-of-two rescaling of the input so that all
//! internal comparisons are scale-free; reported values are recomputed from
//! the witnesses on the original matrix through the public spectral kernels.
//!
//! Restarts and grid slabs are independent and run in parallel under the
//! `parallel` feature; merging is a deterministic max-reduce, so parallel and
//! sequential runs report identical values.

use crate::blockstruct::{
    project_unitary, sample_unitary, scaling_matrix, BlockStructure, ScalingMember, UnitaryMember,
};
use crate::matnum::{
    char3, cubic_roots, cubic_roots_raw, eigenvalues, eigenvector_for, left_eigenvector_for,
    rho_fast, sigma_fast, spectral_norm, spectral_radius, vec_dot, Complex64, ComplexMatrix, C_ZERO,
};
use crate::rng::derive_seed;
use crate::{exec, Error, Result};
use std::f64::consts::TAU;

/// Tuning knobs for the bound computations.
#[derive(Debug, Clone)]
pub struct MuOptions {
    /// Total number of ascent starts for the lower bound.
    pub restarts: usize,
    /// Iteration cap per ascent start.
    pub max_iters: usize,
    /// Relative improvement threshold treated as convergence.
    pub tol: f64,
    /// Base seed for all sampled starts.
    pub seed: u64,
    /// Grid points per angle for the brute-force oracle.
    pub grid: usize,
}

impl Default for MuOptions {
    fn default() -> Self {
        MuOptions { restarts: 16, max_iters: 500, tol: 1e-8, seed: 0, grid: 256 }
    }
}

impl MuOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 || self.grid == 0 {
            return Err(Error::InvalidParameter("restarts, max_iters and grid must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidParameter("tol must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Result of the lower-bound search.
#[derive(Debug, Clone)]
pub struct LowerBound {
    pub value: f64,
    pub witness: UnitaryMember,
    pub converged: bool,
    pub iterations: usize,
}

/// Result of the upper-bound search.
#[derive(Debug, Clone)]
pub struct UpperBound {
    pub value: f64,
    pub scaling: ScalingMember,
    pub converged: bool,
    pub iterations: usize,
    /// Set when the bound collapsed below the μ ≈ 0 detection threshold.
    pub mu_zero: bool,
}

/// Combined report with witnesses and a singularity certificate.
#[derive(Debug, Clone)]
pub struct MuReport {
    pub lower: f64,
    pub upper: f64,
    pub u_witness: UnitaryMember,
    pub d_witness: ScalingMember,
    pub perturbation: Option<ComplexMatrix>,
    pub lower_converged: bool,
    pub upper_converged: bool,
    pub lower_iterations: usize,
    pub upper_iterations: usize,
}

// ---------------------------------------------------------------------------
// shared helpers

/// Rescale so the spectral norm sits in [1/2, 1]; powers of two keep the
/// scaling exact in floating point. Returns (scaled matrix, back factor).
fn pow2_normalize(m: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let sigma = sigma_fast(m)?;
    if sigma == 0.0 || !sigma.is_finite() {
        return Ok((m.clone(), 1.0));
    }
    let k = sigma.log2().ceil().clamp(-500.0, 500.0);
    let down = (-k).exp2();
    let up = k.exp2();
    Ok((m.scale_re(down), up))
}

/// Column scaling M · diag(units) without a full matrix product.
fn scale_columns(m: &ComplexMatrix, units: &[Complex64]) -> ComplexMatrix {
    let n = m.n();
    let mut out = m.clone();
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, m.get(i, j) * units[j]);
        }
    }
    out
}

fn expand_units(phases: &[f64], map: &[usize]) -> Vec<Complex64> {
    map.iter().map(|&b| Complex64::from_polar(1.0, phases[b])).collect()
}

fn member_from_phases(structure: &BlockStructure, phases: &[f64]) -> UnitaryMember {
    use crate::blockstruct::BlockParam;
    let params = phases.iter().map(|&t| BlockParam::Phase(t)).collect();
    UnitaryMember::from_params(structure, params).expect("all-scalar parameters")
}

/// Sorted eigenvalues through the fast closed-form path for n ≤ 3.
fn eigs_sorted_fast(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    match m.n() {
        1 => Ok(vec![m.get(0, 0)]),
        2 => {
            let tr = m.get(0, 0) + m.get(1, 1);
            let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
            let disc = {
                let z = tr * tr - det * 4.0;
                // algebraic complex sqrt
                let r = z.norm();
                let re = ((r + z.re) * 0.5).max(0.0).sqrt();
                let im = ((r - z.re) * 0.5).max(0.0).sqrt();
                if z.im >= 0.0 { Complex64::new(re, im) } else { Complex64::new(re, -im) }
            };
            let mut v = vec![(tr + disc) * 0.5, (tr - disc) * 0.5];
            crate::matnum::sort_eigenvalues(&mut v);
            Ok(v)
        }
        3 => {
            let (c2, c1, c0) = char3(m);
            let mut v = cubic_roots(c2, c1, c0).to_vec();
            crate::matnum::sort_eigenvalues(&mut v);
            Ok(v)
        }
        _ => eigenvalues(m),
    }
}

// ---------------------------------------------------------------------------
// lower bound

struct AscentOutcome {
    value: f64,
    witness: UnitaryMember,
    iterations: usize,
    converged: bool,
}

/// Projected gradient ascent of ρ(M U) from one start.
fn ascend(
    m: &ComplexMatrix,
    structure: &BlockStructure,
    start: UnitaryMember,
    opts: &MuOptions,
    sigma_scale: f64,
) -> Result<AscentOutcome> {
    let n = m.n();
    let gain_tol = opts.tol * sigma_scale.max(f64::MIN_POSITIVE);
    let mut u = start;
    let mut f = rho_fast(&m.mul(&u.matrix)?)?;
    let mut alpha = 0.5_f64;
    let mut iterations = 0usize;
    let mut stalls = 0usize;
    let mut converged = false;
    let mut degenerate_at_stall = false;

    while iterations < opts.max_iters {
        iterations += 1;
        let mu_mat = m.mul(&u.matrix)?;
        let eigs = eigs_sorted_fast(&mu_mat)?;
        let lam = eigs[0];
        if lam.norm() < 1e-300 {
            // flat zero spectrum: nothing to climb
            converged = true;
            break;
        }
        let degenerate = eigs.len() > 1
            && (eigs[0].norm() - eigs[1].norm()).abs() <= 1e-10 * eigs[0].norm();

        let v = match eigenvector_for(&mu_mat, lam) {
            Ok(v) => v,
            Err(_) => {
                degenerate_at_stall = degenerate;
                break;
            }
        };
        let w = match left_eigenvector_for(&mu_mat, lam) {
            Ok(w) => w,
            Err(_) => {
                degenerate_at_stall = degenerate;
                break;
            }
        };
        let wv = vec_dot(&w, &v);
        if wv.norm() < 1e-12 {
            // numerically defective dominant eigenvalue; stop here
            degenerate_at_stall = true;
            break;
        }
        let scalar = lam / (lam.norm() * wv.conj());
        let mstar_w = m.conj_transpose().mul_vec(&w);
        let mut grad = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                grad.set(i, j, scalar * mstar_w[i] * v[j].conj());
            }
        }
        let gnorm = grad.frobenius();
        if gnorm < 1e-300 {
            converged = true;
            break;
        }
        let dir = grad.scale_re(1.0 / gnorm);

        let mut accepted = false;
        let mut step = alpha;
        for _ in 0..12 {
            let cand_mat = u.matrix.add(&dir.scale_re(step))?;
            let cand = project_unitary(&cand_mat, structure)?;
            let fc = rho_fast(&m.mul(&cand.matrix)?)?;
            if fc > f * (1.0 + 1e-12) {
                let gain = fc - f;
                u = cand;
                f = fc;
                alpha = (step * 1.6).min(2.0);
                accepted = true;
                if gain <= gain_tol {
                    converged = true;
                }
                break;
            }
            step *= 0.5;
        }
        if converged {
            break;
        }
        if !accepted {
            stalls += 1;
            alpha = (alpha * 0.25).max(1e-9);
            if stalls >= 2 {
                // no improving direction: a local maximum unless the dominant
                // eigenvalue is tied, in which case the gradient is unreliable
                converged = !degenerate;
                degenerate_at_stall = degenerate;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    let _ = degenerate_at_stall;
    Ok(AscentOutcome { value: f, witness: u, iterations, converged })
}

/// Cyclic coordinate ascent over block phases for all-scalar structures.
/// Returns (value, phases, converged, cycles).
fn coordinate_ascent(
    m: &ComplexMatrix,
    structure: &BlockStructure,
    mut phases: Vec<f64>,
    opts: &MuOptions,
    sigma_scale: f64,
) -> Result<(f64, Vec<f64>, bool, usize)> {
    let map = structure.index_to_block();
    let blocks = structure.block_count();
    let eval = |phases: &[f64]| -> Result<f64> {
        let units = expand_units(phases, &map);
        rho_fast(&scale_columns(m, &units))
    };
    let mut best = eval(&phases)?;
    let gain_tol = opts.tol * sigma_scale.max(f64::MIN_POSITIVE);
    let coarse = 32usize;
    let mut converged = false;
    let mut cycles = 0usize;
    let max_cycles = 40usize.min(opts.max_iters);
    while cycles < max_cycles {
        cycles += 1;
        let before = best;
        for b in 0..blocks {
            // coarse scan over the circle
            let mut scan_best = (phases[b], best);
            for t in 0..coarse {
                let theta = TAU * t as f64 / coarse as f64;
                let mut cand = phases.clone();
                cand[b] = theta;
                let v = eval(&cand)?;
                if v > scan_best.1 {
                    scan_best = (theta, v);
                }
            }
            // golden-section refinement around the best coarse point
            let span = TAU / coarse as f64;
            let (mut lo, mut hi) = (scan_best.0 - span, scan_best.0 + span);
            let phi = 0.618_033_988_749_894_8;
            let mut c = hi - phi * (hi - lo);
            let mut d = lo + phi * (hi - lo);
            let eval_at = |theta: f64, phases: &[f64]| -> Result<f64> {
                let mut cand = phases.to_vec();
                cand[b] = theta;
                eval(&cand)
            };
            let mut fc = eval_at(c, &phases)?;
            let mut fd = eval_at(d, &phases)?;
            while hi - lo > 1e-10 {
                if fc > fd {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - phi * (hi - lo);
                    fc = eval_at(c, &phases)?;
                } else {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + phi * (hi - lo);
                    fd = eval_at(d, &phases)?;
                }
            }
            let theta = 0.5 * (lo + hi);
            let v = eval_at(theta, &phases)?;
            let (theta, v) = if v >= scan_best.1 { (theta, v) } else { scan_best };
            if v > best {
                best = v;
                phases[b] = theta.rem_euclid(TAU);
            }
        }
        if best - before <= gain_tol {
            converged = true;
            break;
        }
    }
    Ok((best, phases, converged, cycles))
}

/// Best point of a coarse phase grid, used as an extra deterministic start
/// for all-scalar structures.
fn coarse_grid_phases(
    m: &ComplexMatrix,
    structure: &BlockStructure,
    per_angle: usize,
) -> Result<Vec<f64>> {
    let map = structure.index_to_block();
    let blocks = structure.block_count();
    let total = per_angle.pow(blocks as u32);
    let mut best = (0usize, f64::NEG_INFINITY);
    for flat in 0..total {
        let mut rem = flat;
        let mut phases = vec![0.0; blocks];
        for b in (0..blocks).rev() {
            phases[b] = TAU * (rem % per_angle) as f64 / per_angle as f64;
            rem /= per_angle;
        }
        let units = expand_units(&phases, &map);
        let v = rho_fast(&scale_columns(m, &units))?;
        if v > best.1 {
            best = (flat, v);
        }
    }
    let mut rem = best.0;
    let mut phases = vec![0.0; blocks];
    for b in (0..blocks).rev() {
        phases[b] = TAU * (rem % per_angle) as f64 / per_angle as f64;
        rem /= per_angle;
    }
    Ok(phases)
}

/// Multistart lower bound max_U ρ(M U) with the achieving unitary member.
pub fn mu_lower(m: &ComplexMatrix, structure: &BlockStructure, opts: &MuOptions) -> Result<LowerBound> {
    opts.validate()?;
    m.validate_finite()?;
    if m.n() != structure.n() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{} but structure has dimension {}",
            m.n(),
            m.n(),
            structure.n()
        )));
    }
    let sigma = sigma_fast(m)?;
    if sigma == 0.0 {
        return Ok(LowerBound {
            value: 0.0,
            witness: UnitaryMember::identity(structure),
            converged: true,
            iterations: 0,
        });
    }
    let (m_hat, _back) = pow2_normalize(m)?;
    let sigma_hat = sigma_fast(&m_hat)?;

    // deterministic starts: identity, block polar of M*, then seeded samples
    let mut starts: Vec<UnitaryMember> = vec![
        UnitaryMember::identity(structure),
        project_unitary(&m_hat.conj_transpose(), structure)?,
    ];
    let all_scalar = structure.is_all_scalar();
    if all_scalar {
        let blocks = structure.block_count();
        let affordable = if m.n() <= 3 { blocks <= 4 } else { blocks <= 3 };
        if affordable {
            let phases = coarse_grid_phases(&m_hat, structure, 8)?;
            starts.push(member_from_phases(structure, &phases));
        }
    }
    while starts.len() < opts.restarts.max(starts.len()) {
        let tag = starts.len() as u64;
        starts.push(sample_unitary(structure, derive_seed(opts.seed, tag)));
    }

    let outcomes: Vec<Result<AscentOutcome>> = exec::map_collect(starts.len(), |i| {
        ascend(&m_hat, structure, starts[i].clone(), opts, sigma_hat)
    });
    let mut results = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        results.push(o?);
    }
    let mut best_idx = 0usize;
    for i in 1..results.len() {
        if results[i].value > results[best_idx].value {
            best_idx = i;
        }
    }
    let mut iterations: usize = results.iter().map(|r| r.iterations).sum();
    let mut converged = results[best_idx].converged;
    let mut witness = results[best_idx].witness.clone();
    let mut best_val = results[best_idx].value;

    if all_scalar {
        // polish the best result and an identity start with coordinate ascent
        let candidates = [
            witness.phases().expect("all-scalar member"),
            vec![0.0; structure.block_count()],
        ];
        for phases0 in candidates {
            let (v, phases, conv, cycles) =
                coordinate_ascent(&m_hat, structure, phases0, opts, sigma_hat)?;
            iterations += cycles;
            if v > best_val {
                best_val = v;
                witness = member_from_phases(structure, &phases);
                converged = conv;
            } else if conv && (best_val - v) <= opts.tol * sigma_hat {
                converged = true;
            }
        }
    }

    // report the witness value recomputed through the public kernel on the
    // original scale
    let value = spectral_radius(&m.mul(&witness.matrix)?)?;
    Ok(LowerBound { value, witness, converged, iterations })
}

// ---------------------------------------------------------------------------
// upper bound

/// Entrywise D M D⁻¹ for block log-scales x (one per block).
fn conj_scale(m: &ComplexMatrix, x: &[f64], map: &[usize]) -> ComplexMatrix {
    let n = m.n();
    let d: Vec<f64> = x.iter().map(|&v| v.exp()).collect();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let ratio = d[map[i]] / d[map[j]];
            out.set(i, j, m.get(i, j) * ratio);
        }
    }
    out
}

/// Convex 1-D minimization by golden section with bracket expansion.
fn golden_min<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
) -> Result<(f64, f64)> {
    const PHI: f64 = 0.618_033_988_749_894_8;
    const CAP: f64 = 120.0;
    loop {
        let mut a = lo;
        let mut b = hi;
        let mut c = b - PHI * (b - a);
        let mut d = a + PHI * (b - a);
        let mut fc = f(c)?;
        let mut fd = f(d)?;
        while b - a > 1e-8 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - PHI * (b - a);
                fc = f(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + PHI * (b - a);
                fd = f(d)?;
            }
        }
        let x = 0.5 * (a + b);
        let fx = f(x)?;
        let width = hi - lo;
        if x <= lo + 0.02 * width && lo > -CAP {
            hi = lo + 0.25 * width;
            lo = (lo - 2.0 * width).max(-CAP);
            continue;
        }
        if x >= hi - 0.02 * width && hi < CAP {
            lo = hi - 0.25 * width;
            hi = (hi + 2.0 * width).min(CAP);
            continue;
        }
        return Ok((x, fx));
    }
}

/// Upper bound inf_D σ_max(D M D⁻¹) over the positive block scalings.
pub fn mu_upper(m: &ComplexMatrix, structure: &BlockStructure, opts: &MuOptions) -> Result<UpperBound> {
    opts.validate()?;
    m.validate_finite()?;
    if m.n() != structure.n() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{} but structure has dimension {}",
            m.n(),
            m.n(),
            structure.n()
        )));
    }
    let blocks = structure.block_count();
    if blocks == 1 {
        // D is a positive multiple of the identity: scaling cancels exactly
        return Ok(UpperBound {
            value: spectral_norm(m)?,
            scaling: ScalingMember::identity(structure),
            converged: true,
            iterations: 0,
            mu_zero: false,
        });
    }
    let sigma = sigma_fast(m)?;
    if sigma == 0.0 {
        return Ok(UpperBound {
            value: 0.0,
            scaling: ScalingMember::identity(structure),
            converged: true,
            iterations: 0,
            mu_zero: true,
        });
    }
    let (m_hat, _back) = pow2_normalize(m)?;
    let map = structure.index_to_block();
    let sigma_hat = sigma_fast(&m_hat)?;
    let zero_thresh = 1e-3 * sigma_hat;
    let gain_tol = opts.tol * sigma_hat;

    let mut x = vec![0.0_f64; blocks];
    let mut cur = sigma_hat;
    let mut converged = false;
    let mut mu_zero = false;
    let mut cycles = 0usize;
    let max_cycles = 60usize.min(opts.max_iters);
    while cycles < max_cycles {
        cycles += 1;
        let before = cur;
        for c in 0..blocks - 1 {
            let (xc, val) = golden_min(
                |t| {
                    let mut xt = x.clone();
                    xt[c] = t;
                    sigma_fast(&conj_scale(&m_hat, &xt, &map))
                },
                -10.0,
                10.0,
            )?;
            if val < cur {
                x[c] = xc;
                cur = val;
            }
        }
        if cur < zero_thresh {
            mu_zero = true;
            converged = true;
            break;
        }
        if before - cur <= gain_tol {
            converged = true;
            break;
        }
    }

    let scaling = ScalingMember::new(x.iter().map(|&v| v.exp()).collect(), structure)?;
    let dm = scaling_matrix(&scaling, structure);
    // recompute on the original scale: entrywise ratios avoid forming D⁻¹
    let n = m.n();
    let mut conj = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let ratio = dm.get(i, i).re / dm.get(j, j).re;
            conj.set(i, j, m.get(i, j) * ratio);
        }
    }
    let value = spectral_norm(&conj)?;
    Ok(UpperBound { value, scaling, converged, iterations: cycles, mu_zero })
}

// ---------------------------------------------------------------------------
// destabilizing perturbation

/// Smallest destabilizing member built from a lower-bound witness: for the
/// dominant eigenvalue λ of MU, Δ = −U/λ satisfies det(I + MΔ) = 0 and
/// σ_max(Δ) = 1/ρ(MU).
pub fn destabilizing_perturbation(m: &ComplexMatrix, u: &UnitaryMember) -> Result<ComplexMatrix> {
    let mu_mat = m.mul(&u.matrix)?;
    let eigs = eigenvalues(&mu_mat)?;
    let lam = eigs[0];
    if lam.norm() < 1e-300 {
        return Err(Error::Precondition(
            "spectral radius of M·U is zero, no destabilizing member exists along U".into(),
        ));
    }
    Ok(u.matrix.scale(-(Complex64::new(1.0, 0.0) / lam)))
}

// ---------------------------------------------------------------------------
// brute-force oracle

/// Precomputed characteristic-polynomial pieces for M·diag(units), n ≤ 3.
struct PhasedPoly {
    n: usize,
    map: Vec<usize>,
    diag: Vec<Complex64>,
    pair: Vec<Vec<Complex64>>,
    det: Complex64,
}

impl PhasedPoly {
    fn new(m: &ComplexMatrix, map: &[usize]) -> Self {
        let n = m.n();
        let diag: Vec<Complex64> = (0..n).map(|i| m.get(i, i)).collect();
        let mut pair = vec![vec![C_ZERO; n]; n];
        for j in 0..n {
            for k in j + 1..n {
                pair[j][k] = m.get(j, j) * m.get(k, k) - m.get(j, k) * m.get(k, j);
            }
        }
        PhasedPoly { n, map: map.to_vec(), diag, pair, det: m.det() }
    }

    /// ρ(M diag(units)) from the characteristic polynomial: the diagonal
    /// scaling multiplies each elementary symmetric coefficient by the
    /// corresponding product of units.
    #[inline]
    fn eval(&self, block_units: &[Complex64]) -> f64 {
        let u = |i: usize| block_units[self.map[i]];
        match self.n {
            1 => (self.diag[0] * u(0)).norm(),
            2 => {
                let tr = self.diag[0] * u(0) + self.diag[1] * u(1);
                let det = self.det * (u(0) * u(1));
                let z = tr * tr - det * 4.0;
                let r = z.norm();
                let re = ((r + z.re) * 0.5).max(0.0).sqrt();
                let im = ((r - z.re) * 0.5).max(0.0).sqrt();
                let disc = if z.im >= 0.0 { Complex64::new(re, im) } else { Complex64::new(re, -im) };
                let r1 = (tr + disc) * 0.5;
                let r2 = (tr - disc) * 0.5;
                r1.norm().max(r2.norm())
            }
            _ => {
                let (u0, u1, u2) = (u(0), u(1), u(2));
                let c2 = self.diag[0] * u0 + self.diag[1] * u1 + self.diag[2] * u2;
                let c1 = self.pair[0][1] * (u0 * u1)
                    + self.pair[0][2] * (u0 * u2)
                    + self.pair[1][2] * (u1 * u2);
                let c0 = self.det * (u0 * u1 * u2);
                let roots = cubic_roots_raw(c2, c1, c0);
                roots.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max).sqrt()
            }
        }
    }
}

/// Refine the three cubic roots from nearby seeds with two Newton steps
/// each. Returns None when the refined roots stop summing to the trace,
/// which happens near eigenvalue collisions where seeds can merge.
#[inline]
fn track_cubic_roots(
    seeds: [Complex64; 3],
    c2: Complex64,
    c1: Complex64,
    c0: Complex64,
) -> Option<[Complex64; 3]> {
    let mut roots = seeds;
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let fp = (*r * 3.0 - c2 * 2.0) * *r + c1;
            let f = ((*r - c2) * *r + c1) * *r - c0;
            let step = f / fp;
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            *r -= step;
        }
    }
    // the sum identity only needs to separate healthy tracking from seed
    // collapse, where the error jumps to the distance between distinct roots
    let sum = roots[0] + roots[1] + roots[2];
    let scale = 1.0 + c2.norm_sqr();
    if (sum - c2).norm_sqr() <= 1e-8 * scale {
        Some(roots)
    } else {
        None
    }
}

fn flat_to_phases(mut flat: usize, angles: usize, grid: usize) -> Vec<usize> {
    let mut idx = vec![0usize; angles];
    for b in (0..angles).rev() {
        idx[b] = flat % grid;
        flat /= grid;
    }
    idx
}

/// Exhaustive grid maximization of ρ(M·diag-phases) for all-scalar
/// structures, followed by two rounds of 10× local grid refinement.
pub fn mu_bruteforce(m: &ComplexMatrix, structure: &BlockStructure, opts: &MuOptions) -> Result<f64> {
    opts.validate()?;
    m.validate_finite()?;
    if m.n() != structure.n() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{} but structure has dimension {}",
            m.n(),
            m.n(),
            structure.n()
        )));
    }
    if structure.has_full_block() {
        return Err(Error::UnsupportedStructure(
            "the brute-force oracle handles repeated-scalar blocks only".into(),
        ));
    }
    let angles = structure.block_count();
    if angles > 4 {
        return Err(Error::Complexity(format!(
            "{angles} phase angles exceed the oracle limit of 4"
        )));
    }
    let mut grid = opts.grid;
    if angles == 4 && grid > 64 {
        grid = 64;
    }
    let total = (grid as f64).powi(angles as i32);
    if total > 3.2e7 {
        return Err(Error::Complexity(format!(
            "grid of {grid}^{angles} points is beyond the oracle budget"
        )));
    }
    let total = total as usize;

    let (m_hat, _back) = pow2_normalize(m)?;
    let map = structure.index_to_block();
    let n = m.n();

    let units_table: Vec<Complex64> = (0..grid)
        .map(|t| Complex64::from_polar(1.0, TAU * t as f64 / grid as f64))
        .collect();

    let poly = if n <= 3 { Some(PhasedPoly::new(&m_hat, &map)) } else { None };
    let eval_units = |block_units: &[Complex64]| -> f64 {
        match &poly {
            Some(p) => p.eval(block_units),
            None => {
                let per_index: Vec<Complex64> = map.iter().map(|&b| block_units[b]).collect();
                rho_fast(&scale_columns(&m_hat, &per_index)).unwrap_or(f64::NEG_INFINITY)
            }
        }
    };

    // slab-parallel scan over the first angle; each slab walks its own
    // sub-grid and the slabs merge by (value, lowest flat index)
    let slab_size = total / grid;
    let hot_kernel = n == 3 && angles == 3 && map == [0, 1, 2];
    let slab_results: Vec<(usize, f64)> = exec::map_collect(grid, |t0| {
        if hot_kernel {
            // inner two angles with hoisted coefficient partials; roots are
            // tracked along the innermost axis by two Newton steps from the
            // previous grid point, falling back to Cardano whenever the
            // root-sum identity drifts; compares squared moduli to defer the
            // square root
            let p = poly.as_ref().expect("fast path has the poly");
            let u0 = units_table[t0];
            let d0u0 = p.diag[0] * u0;
            let p01u0 = p.pair[0][1] * u0;
            let p02u0 = p.pair[0][2] * u0;
            let det_u0 = p.det * u0;
            let mut best = (0usize, f64::NEG_INFINITY);
            for t1 in 0..grid {
                let u1 = units_table[t1];
                let c2_base = d0u0 + p.diag[1] * u1;
                let c1_base = p01u0 * u1;
                let c1_lin = p02u0 + p.pair[1][2] * u1;
                let c0_lin = det_u0 * u1;
                let row_base = (t0 * grid + t1) * grid;
                let mut seeds: Option<[Complex64; 3]> = None;
                for t2 in 0..grid {
                    let u2 = units_table[t2];
                    let c2 = c2_base + p.diag[2] * u2;
                    let c1 = c1_base + c1_lin * u2;
                    let c0 = c0_lin * u2;
                    let roots = match seeds {
                        Some(prev) => track_cubic_roots(prev, c2, c1, c0)
                            .unwrap_or_else(|| cubic_roots_raw(c2, c1, c0)),
                        None => cubic_roots_raw(c2, c1, c0),
                    };
                    seeds = Some(roots);
                    let v = roots.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
                    if v > best.1 {
                        best = (row_base + t2, v);
                    }
                }
            }
            best
        } else {
            let mut units = vec![C_ZERO; angles];
            units[0] = units_table[t0];
            let mut best = (0usize, f64::NEG_INFINITY);
            for inner in 0..slab_size {
                let mut rem = inner;
                for b in (1..angles).rev() {
                    units[b] = units_table[rem % grid];
                    rem /= grid;
                }
                let v = eval_units(&units);
                if v > best.1 {
                    best = (t0 * slab_size + inner, v);
                }
            }
            best
        }
    });
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for &(idx, v) in &slab_results {
        if v > best.1 || (v == best.1 && idx < best.0) {
            best = (idx, v);
        }
    }

    let idx = flat_to_phases(best.0, angles, grid);
    let mut phases: Vec<f64> = idx.iter().map(|&t| TAU * t as f64 / grid as f64).collect();
    let mut best_val = {
        let units: Vec<Complex64> = phases.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        eval_units(&units)
    };

    // two refinement rounds: ±(old spacing) scanned at a 10× finer step
    let mut h = TAU / grid as f64;
    for _round in 0..2 {
        let step = h / 10.0;
        let offsets: Vec<f64> = (-10..=10).map(|k| k as f64 * step).collect();
        let combos = offsets.len().pow(angles as u32);
        let mut local_best = (phases.clone(), best_val);
        for flat in 0..combos {
            let mut rem = flat;
            let mut cand = phases.clone();
            for b in (0..angles).rev() {
                cand[b] += offsets[rem % offsets.len()];
                rem /= offsets.len();
            }
            let units: Vec<Complex64> =
                cand.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
            let v = eval_units(&units);
            if v > local_best.1 {
                local_best = (cand, v);
            }
        }
        phases = local_best.0;
        best_val = local_best.1;
        h = step;
    }
    let _ = best_val;

    // report the refined maximum recomputed through the public kernel on the
    // original matrix
    let per_index = expand_units(&phases, &map);
    spectral_radius(&scale_columns(m, &per_index))
}

// ---------------------------------------------------------------------------
// combined report

/// Run both bounds and extract the destabilizing certificate.
pub fn mu_report(m: &ComplexMatrix, structure: &BlockStructure, opts: &MuOptions) -> Result<MuReport> {
    let lower = mu_lower(m, structure, opts)?;
    let upper = mu_upper(m, structure, opts)?;
    let perturbation = if lower.value > 0.0 {
        Some(destabilizing_perturbation(m, &lower.witness)?)
    } else {
        None
    };
    Ok(MuReport {
        lower: lower.value,
        upper: upper.value,
        u_witness: lower.witness,
        d_witness: upper.scaling,
        perturbation,
        lower_converged: lower.converged,
        upper_converged: upper.converged,
        lower_iterations: lower.iterations,
        upper_iterations: upper.iterations,
    })
}
