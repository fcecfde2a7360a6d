//! Complex perturbation block structures: the block-diagonal set the
//! structured singular value is taken against, its unitary members, and the
//! positive scalings that commute with every member.
//!
//! A structure is an ordered list of blocks, each either a repeated scalar
//! `δ·I_k` or a full complex block. The text form accepted everywhere is a
//! comma-separated list of `r:<k>` and `f:<m>` tokens, e.g. `"r:2,f:3"`.

use crate::matnum::{polar_unitary, Complex64, ComplexMatrix, C_ONE, C_ZERO};
use crate::rng::Rng;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    RepeatedScalar,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub kind: BlockKind,
    pub size: usize,
}

/// Ordered block structure with total dimension n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockStructure {
    blocks: Vec<BlockSpec>,
    n: usize,
}

impl BlockStructure {
    pub fn new(blocks: Vec<BlockSpec>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Parse("structure needs at least one block".into()));
        }
        if blocks.iter().any(|b| b.size == 0) {
            return Err(Error::Parse("block sizes must be at least 1".into()));
        }
        let n = blocks.iter().map(|b| b.size).sum();
        Ok(BlockStructure { blocks, n })
    }

    /// Parse a spec string like `"r:1,r:1,f:2"` and check it sums to n.
    pub fn parse(spec: &str, n: usize) -> Result<Self> {
        if spec.trim().is_empty() {
            return Err(Error::Parse("empty structure spec".into()));
        }
        let mut blocks = Vec::new();
        for token in spec.split(',') {
            let token = token.trim();
            let (kind, size_str) = token
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("malformed token '{token}'")))?;
            let kind = match kind.trim() {
                "r" => BlockKind::RepeatedScalar,
                "f" => BlockKind::Full,
                other => return Err(Error::Parse(format!("unknown block kind '{other}'"))),
            };
            let size: usize = size_str
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad block size in '{token}'")))?;
            if size == 0 {
                return Err(Error::Parse(format!("zero block size in '{token}'")));
            }
            blocks.push(BlockSpec { kind, size });
        }
        let total: usize = blocks.iter().map(|b| b.size).sum();
        if total != n {
            return Err(Error::Dimension(format!(
                "structure sizes sum to {total}, expected {n}"
            )));
        }
        BlockStructure::new(blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_all_scalar(&self) -> bool {
        self.blocks.iter().all(|b| b.kind == BlockKind::RepeatedScalar)
    }

    pub fn has_full_block(&self) -> bool {
        !self.is_all_scalar()
    }

    /// Starting index of each block in the expanded dimension.
    pub fn offsets(&self) -> Vec<usize> {
        let mut offs = Vec::with_capacity(self.blocks.len());
        let mut acc = 0;
        for b in &self.blocks {
            offs.push(acc);
            acc += b.size;
        }
        offs
    }

    /// Block index owning each matrix index 0..n.
    pub fn index_to_block(&self) -> Vec<usize> {
        let mut map = Vec::with_capacity(self.n);
        for (bi, b) in self.blocks.iter().enumerate() {
            map.extend(std::iter::repeat(bi).take(b.size));
        }
        map
    }

    pub fn to_spec_string(&self) -> String {
        self.blocks
            .iter()
            .map(|b| match b.kind {
                BlockKind::RepeatedScalar => format!("r:{}", b.size),
                BlockKind::Full => format!("f:{}", b.size),
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Per-block parameters of a unitary member.
#[derive(Debug, Clone)]
pub enum BlockParam {
    Phase(f64),
    Unitary(ComplexMatrix),
}

/// A block-diagonal unitary member of the structure.
#[derive(Debug, Clone)]
pub struct UnitaryMember {
    pub matrix: ComplexMatrix,
    pub params: Vec<BlockParam>,
}

impl UnitaryMember {
    pub fn identity(structure: &BlockStructure) -> Self {
        let params = structure
            .blocks()
            .iter()
            .map(|b| match b.kind {
                BlockKind::RepeatedScalar => BlockParam::Phase(0.0),
                BlockKind::Full => BlockParam::Unitary(ComplexMatrix::identity(b.size)),
            })
            .collect();
        UnitaryMember {
            matrix: ComplexMatrix::identity(structure.n()),
            params,
        }
    }

    /// Build the expanded matrix from per-block parameters.
    pub fn from_params(structure: &BlockStructure, params: Vec<BlockParam>) -> Result<Self> {
        if params.len() != structure.block_count() {
            return Err(Error::Dimension("one parameter per block required".into()));
        }
        let mut m = ComplexMatrix::zeros(structure.n());
        let offsets = structure.offsets();
        for ((b, p), &off) in structure.blocks().iter().zip(&params).zip(&offsets) {
            match (b.kind, p) {
                (BlockKind::RepeatedScalar, BlockParam::Phase(theta)) => {
                    let z = Complex64::from_polar(1.0, *theta);
                    for t in 0..b.size {
                        m.set(off + t, off + t, z);
                    }
                }
                (BlockKind::Full, BlockParam::Unitary(u)) => {
                    if u.n() != b.size {
                        return Err(Error::Dimension("full-block parameter size mismatch".into()));
                    }
                    for r in 0..b.size {
                        for c in 0..b.size {
                            m.set(off + r, off + c, u.get(r, c));
                        }
                    }
                }
                _ => return Err(Error::Parse("parameter kind does not match block kind".into())),
            }
        }
        Ok(UnitaryMember { matrix: m, params })
    }

    /// Check the member invariants: block-diagonal pattern, unitarity within
    /// tolerance, equal scalars inside repeated blocks.
    pub fn validate(&self, structure: &BlockStructure, tol: f64) -> Result<()> {
        let n = structure.n();
        if self.matrix.n() != n {
            return Err(Error::Dimension("member dimension mismatch".into()));
        }
        let map = structure.index_to_block();
        for i in 0..n {
            for j in 0..n {
                if map[i] != map[j] && self.matrix.get(i, j) != C_ZERO {
                    return Err(Error::Precondition(format!(
                        "nonzero entry off the block pattern at ({i}, {j})"
                    )));
                }
            }
        }
        let gram = self.matrix.gram();
        let dev = gram.max_abs_diff(&ComplexMatrix::identity(n));
        if dev > tol * (n as f64) {
            return Err(Error::Precondition(format!(
                "member is not unitary (deviation {dev:.3e})"
            )));
        }
        let offsets = structure.offsets();
        for (b, &off) in structure.blocks().iter().zip(&offsets) {
            if b.kind == BlockKind::RepeatedScalar {
                let first = self.matrix.get(off, off);
                for t in 1..b.size {
                    if (self.matrix.get(off + t, off + t) - first).norm() > tol {
                        return Err(Error::Precondition(
                            "repeated-scalar block diagonal is not constant".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Phase angles when the structure is all-scalar.
    pub fn phases(&self) -> Option<Vec<f64>> {
        self.params
            .iter()
            .map(|p| match p {
                BlockParam::Phase(t) => Some(*t),
                BlockParam::Unitary(_) => None,
            })
            .collect()
    }
}

/// Positive block scalings commuting with the structure; the last entry is
/// pinned to 1 so the parametrization is unique.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingMember {
    d: Vec<f64>,
}

impl ScalingMember {
    pub fn new(d: Vec<f64>, structure: &BlockStructure) -> Result<Self> {
        if d.len() != structure.block_count() {
            return Err(Error::Dimension("one scale per block required".into()));
        }
        if d.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidParameter("scales must be positive and finite".into()));
        }
        let last = *d.last().unwrap();
        Ok(ScalingMember { d: d.iter().map(|x| x / last).collect() })
    }

    pub fn identity(structure: &BlockStructure) -> Self {
        ScalingMember { d: vec![1.0; structure.block_count()] }
    }

    pub fn values(&self) -> &[f64] {
        &self.d
    }
}

/// Sample a unitary member: repeated-scalar blocks get a uniform phase,
/// full blocks get an orthonormalized complex Gaussian. Deterministic in the
/// seed.
pub fn sample_unitary(structure: &BlockStructure, seed: u64) -> UnitaryMember {
    let mut rng = Rng::derived(seed, 0xB10C);
    let params: Vec<BlockParam> = structure
        .blocks()
        .iter()
        .map(|b| match b.kind {
            BlockKind::RepeatedScalar => BlockParam::Phase(rng.phase()),
            BlockKind::Full => BlockParam::Unitary(haar_like_unitary(b.size, &mut rng)),
        })
        .collect();
    UnitaryMember::from_params(structure, params).expect("parameters match structure")
}

/// Orthonormalize a complex Gaussian matrix by modified Gram-Schmidt, making
/// the implied R diagonal real positive.
fn haar_like_unitary(n: usize, rng: &mut Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.complex_normal()).collect())
        .collect();
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = cols[k]
                .iter()
                .zip(cols[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let prev = cols[k].clone();
            for (t, c) in cols[j].iter_mut().enumerate() {
                *c -= prev[t] * proj;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            // astronomically unlikely for Gaussian draws; redraw the column
            cols[j] = (0..n).map(|_| rng.complex_normal()).collect();
            let norm2: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for c in cols[j].iter_mut() {
                *c /= norm2;
            }
            continue;
        }
        // normalize and rotate so the leading coefficient is real positive
        let lead = cols[j][j];
        let phase = if lead == C_ZERO { C_ONE } else { lead / lead.norm() };
        let scale = phase.conj() / norm;
        for c in cols[j].iter_mut() {
            *c *= scale;
        }
    }
    let mut m = ComplexMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            m.set(i, j, col[i]);
        }
    }
    m
}

/// Project an arbitrary matrix onto the unitary members: full blocks take the
/// unitary polar factor of their subblock, repeated-scalar blocks take the
/// phase of the subblock trace. Entries off the pattern are ignored.
pub fn project_unitary(x: &ComplexMatrix, structure: &BlockStructure) -> Result<UnitaryMember> {
    if x.n() != structure.n() {
        return Err(Error::Dimension("projection input dimension mismatch".into()));
    }
    let offsets = structure.offsets();
    let mut params = Vec::with_capacity(structure.block_count());
    for (b, &off) in structure.blocks().iter().zip(&offsets) {
        match b.kind {
            BlockKind::RepeatedScalar => {
                let mut tr = C_ZERO;
                for t in 0..b.size {
                    tr += x.get(off + t, off + t);
                }
                let phi = if tr == C_ZERO { 0.0 } else { tr.arg() };
                params.push(BlockParam::Phase(phi));
            }
            BlockKind::Full => {
                let mut sub = ComplexMatrix::zeros(b.size);
                for r in 0..b.size {
                    for c in 0..b.size {
                        sub.set(r, c, x.get(off + r, off + c));
                    }
                }
                params.push(BlockParam::Unitary(polar_unitary(&sub)?));
            }
        }
    }
    UnitaryMember::from_params(structure, params)
}

/// Expand per-block positive scales into the diagonal scaling matrix.
pub fn scaling_matrix(d: &ScalingMember, structure: &BlockStructure) -> ComplexMatrix {
    let map = structure.index_to_block();
    let entries: Vec<Complex64> = map
        .iter()
        .map(|&b| Complex64::new(d.values()[b], 0.0))
        .collect();
    ComplexMatrix::diag(&entries)
}

/// Does the structure contain diag(e^{iφ_1}, ..., e^{iφ_n})? Repeated-scalar
/// blocks require equal phases modulo 2π (tolerance 1e-10); full blocks
/// accept any diagonal unitary subblock.
pub fn contains_diagonal(structure: &BlockStructure, phases: &[f64]) -> bool {
    if phases.len() != structure.n() {
        return false;
    }
    let offsets = structure.offsets();
    for (b, &off) in structure.blocks().iter().zip(&offsets) {
        if b.kind == BlockKind::RepeatedScalar {
            let first = phases[off];
            for t in 1..b.size {
                if !phases_equal_mod_tau(phases[off + t], first, 1e-10) {
                    return false;
                }
            }
        }
    }
    true
}

fn phases_equal_mod_tau(a: f64, b: f64, tol: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d <= tol || (TAU - d) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matnum::singular_values;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn parse_examples() {
        let b = BlockStructure::parse("r:1,r:1,r:1", 3).unwrap();
        assert_eq!(b.block_count(), 3);
        assert!(b.is_all_scalar());

        let b = BlockStructure::parse("r:2,f:3", 5).unwrap();
        assert_eq!(b.blocks()[0], BlockSpec { kind: BlockKind::RepeatedScalar, size: 2 });
        assert_eq!(b.blocks()[1], BlockSpec { kind: BlockKind::Full, size: 3 });

        assert!(matches!(BlockStructure::parse("f:2", 3), Err(Error::Dimension(_))));
        assert!(matches!(BlockStructure::parse("", 1), Err(Error::Parse(_))));
        assert!(matches!(BlockStructure::parse("x:2", 2), Err(Error::Parse(_))));
        assert!(matches!(BlockStructure::parse("r:0,r:2", 2), Err(Error::Parse(_))));
    }

    #[test]
    fn sample_unitary_invariants() {
        for (spec, n) in [("r:1", 1), ("r:3", 3), ("f:2", 2), ("r:2,f:3", 5), ("f:4,r:1", 5)] {
            let b = BlockStructure::parse(spec, n).unwrap();
            for seed in 0..5u64 {
                let u = sample_unitary(&b, seed);
                u.validate(&b, 1e-10).unwrap();
                for s in singular_values(&u.matrix).unwrap() {
                    assert!((s - 1.0).abs() < 1e-10, "{spec} seed {seed}: sv {s}");
                }
            }
        }
    }

    #[test]
    fn sample_unitary_scalar_block_has_equal_diagonal() {
        let b = BlockStructure::parse("r:3", 3).unwrap();
        let u = sample_unitary(&b, 9);
        let z = u.matrix.get(0, 0);
        assert!((z.norm() - 1.0).abs() < 1e-14);
        assert_eq!(u.matrix.get(1, 1), z);
        assert_eq!(u.matrix.get(2, 2), z);
    }

    #[test]
    fn sampling_is_deterministic() {
        let b = BlockStructure::parse("r:1,f:2", 3).unwrap();
        let u1 = sample_unitary(&b, 123);
        let u2 = sample_unitary(&b, 123);
        assert_eq!(u1.matrix.max_abs_diff(&u2.matrix), 0.0);
    }

    #[test]
    fn projection_fixes_members() {
        let b = BlockStructure::parse("r:2,f:2", 4).unwrap();
        let u = sample_unitary(&b, 3);
        let p = project_unitary(&u.matrix, &b).unwrap();
        assert!(p.matrix.max_abs_diff(&u.matrix) < 1e-10);
    }

    #[test]
    fn projection_is_idempotent() {
        let b = BlockStructure::parse("r:1,f:3", 4).unwrap();
        let mut rng = crate::rng::Rng::new(8);
        let x =
            ComplexMatrix::from_entries(4, (0..16).map(|_| rng.complex_normal()).collect()).unwrap();
        let p1 = project_unitary(&x, &b).unwrap();
        let p2 = project_unitary(&p1.matrix, &b).unwrap();
        assert!(p2.matrix.max_abs_diff(&p1.matrix) < 1e-10);
    }

    #[test]
    fn projection_examples() {
        // repeated-scalar block with subblock (2+2i)I: phase is pi/4
        let b = BlockStructure::parse("r:2", 2).unwrap();
        let x = ComplexMatrix::diag(&[Complex64::new(2.0, 2.0), Complex64::new(2.0, 2.0)]);
        let p = project_unitary(&x, &b).unwrap();
        match p.params[0] {
            BlockParam::Phase(t) => assert!((t - PI / 4.0).abs() < 1e-14),
            _ => panic!("expected phase"),
        }

        // full block with positive diagonal: polar factor is the identity
        let b = BlockStructure::parse("f:2", 2).unwrap();
        let x = ComplexMatrix::diag(&[Complex64::new(3.0, 0.0), Complex64::new(0.5, 0.0)]);
        let p = project_unitary(&x, &b).unwrap();
        assert!(p.matrix.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);

        // zero trace falls back to phase 0
        let b = BlockStructure::parse("r:2", 2).unwrap();
        let x = ComplexMatrix::diag(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        let p = project_unitary(&x, &b).unwrap();
        match p.params[0] {
            BlockParam::Phase(t) => assert_eq!(t, 0.0),
            _ => panic!("expected phase"),
        }
    }

    #[test]
    fn scaling_matrix_examples() {
        let b = BlockStructure::parse("r:2,f:1", 3).unwrap();
        let d = ScalingMember::new(vec![2.0, 1.0], &b).unwrap();
        let m = scaling_matrix(&d, &b);
        assert_eq!(m.get(0, 0), Complex64::new(2.0, 0.0));
        assert_eq!(m.get(1, 1), Complex64::new(2.0, 0.0));
        assert_eq!(m.get(2, 2), Complex64::new(1.0, 0.0));

        let ones = ScalingMember::new(vec![3.0, 3.0], &b).unwrap();
        // normalization pins the last block to 1
        assert_eq!(ones.values(), &[1.0, 1.0]);
        assert!(scaling_matrix(&ones, &b).max_abs_diff(&ComplexMatrix::identity(3)) == 0.0);
    }

    #[test]
    fn scaling_commutes_with_members_exactly() {
        let b = BlockStructure::parse("r:2,f:2,r:1", 5).unwrap();
        let d = ScalingMember::new(vec![2.5, 0.3, 1.0], &b).unwrap();
        let dm = scaling_matrix(&d, &b);
        for seed in 0..4u64 {
            let u = sample_unitary(&b, seed);
            // D U D^{-1} entrywise: within-block ratios are exactly 1
            let mut conj = ComplexMatrix::zeros(5);
            for i in 0..5 {
                for j in 0..5 {
                    let ratio = dm.get(i, i).re / dm.get(j, j).re;
                    conj.set(i, j, u.matrix.get(i, j) * ratio);
                }
            }
            assert!(conj.max_abs_diff(&u.matrix) <= 1e-12);
        }
    }

    #[test]
    fn contains_diagonal_examples() {
        let all_scalar = BlockStructure::parse("r:1,r:1,r:1", 3).unwrap();
        assert!(contains_diagonal(&all_scalar, &[0.3, -2.0, 9.9]));

        let repeated = BlockStructure::parse("r:2", 2).unwrap();
        assert!(!contains_diagonal(&repeated, &[0.0, PI]));
        assert!(contains_diagonal(&repeated, &[FRAC_PI_2, FRAC_PI_2]));

        let full = BlockStructure::parse("f:3", 3).unwrap();
        assert!(contains_diagonal(&full, &[0.1, 2.2, -3.0]));
    }

    #[test]
    fn contains_diagonal_mod_tau() {
        let b = BlockStructure::parse("r:2", 2).unwrap();
        assert!(contains_diagonal(&b, &[0.25, 0.25 + TAU]));
        assert!(contains_diagonal(&b, &[0.25, 0.25 - 3.0 * TAU]));
    }

    #[test]
    fn scaling_rejects_bad_values() {
        let b = BlockStructure::parse("r:1,r:1", 2).unwrap();
        assert!(ScalingMember::new(vec![1.0], &b).is_err());
        assert!(ScalingMember::new(vec![0.0, 1.0], &b).is_err());
        assert!(ScalingMember::new(vec![-1.0, 1.0], &b).is_err());
    }
}
