//! Generalized H-type group specifications and the group law.
//!
//! A group is described by its spectral data: blocks (a_j, k_j) giving
//! W = diag{a_1 I_{2k_1}, ..., a_l I_{2k_l}}, the center dimension m, and the
//! diagonal b of A = B^T B. Optional structure matrices U^{(l)} enable the
//! group product; distances, volumes and kernels depend only on the spectral
//! data.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// One spectral block of W: eigenvalue `a` with multiplicity `2k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumBlock {
    pub a: f64,
    pub k: usize,
}

impl SpectrumBlock {
    pub fn new(a: f64, k: usize) -> Self {
        SpectrumBlock { a, k }
    }
}

/// Validated specification of a group G(2n, m, U, W) with diagonal A.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    blocks: Vec<SpectrumBlock>,
    m: usize,
    b: Vec<f64>,
    u_matrices: Option<Vec<DMatrix<f64>>>,
    // derived
    n: usize,
    big_k: f64,
    c_h: f64,
    big_n: f64,
    c_frak: Vec<f64>,
    block_offsets: Vec<usize>,
}

/// A point (x, t) of the group; x has length 2n, t has length m.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
}

impl GroupPoint {
    pub fn new(x: Vec<f64>, t: Vec<f64>) -> Self {
        GroupPoint { x, t }
    }

    /// The identity element o = (0, 0) for a given spec.
    pub fn origin(spec: &GroupSpec) -> Self {
        GroupPoint {
            x: vec![0.0; 2 * spec.n()],
            t: vec![0.0; spec.m()],
        }
    }

    pub fn inverse(&self) -> Self {
        GroupPoint {
            x: self.x.iter().map(|v| -v).collect(),
            t: self.t.iter().map(|v| -v).collect(),
        }
    }
}

impl GroupSpec {
    /// Build and validate a spec. The a-values must already be strictly
    /// increasing; they are checked, not re-sorted.
    pub fn new(
        blocks: Vec<SpectrumBlock>,
        m: usize,
        b: Vec<f64>,
        u_matrices: Option<Vec<DMatrix<f64>>>,
    ) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::DimensionConstraint("no spectral blocks".into()));
        }
        if m == 0 {
            return Err(Error::DimensionConstraint("center dimension m must be >= 1".into()));
        }
        for w in blocks.windows(2) {
            if w[1].a <= w[0].a {
                return Err(Error::NonIncreasingSpectrum);
            }
        }
        for blk in &blocks {
            if !(blk.a > 0.0) || blk.k == 0 {
                return Err(Error::DimensionConstraint(format!(
                    "block (a = {}, k = {}) must have a > 0, k >= 1",
                    blk.a, blk.k
                )));
            }
        }
        if b.len() != m {
            return Err(Error::DimensionConstraint(format!(
                "b has length {}, expected m = {}",
                b.len(),
                m
            )));
        }
        if b.iter().any(|&v| v < 0.0) {
            return Err(Error::NegativeWeight);
        }
        // Radon-Hurwitz constraints
        let k_min = blocks.iter().map(|b| b.k).min().unwrap();
        let log_bound = 2.0 * (4.0 * k_min as f64).log2();
        if m as f64 > log_bound + 1e-9 {
            return Err(Error::DimensionConstraint(format!(
                "m = {m} exceeds 2 min_j log2(4 k_j) = {log_bound}"
            )));
        }
        if m + 1 > 2 * k_min {
            return Err(Error::DimensionConstraint(format!(
                "m + 1 = {} exceeds min_j 2 k_j = {}",
                m + 1,
                2 * k_min
            )));
        }

        let n: usize = blocks.iter().map(|b| b.k).sum();
        let big_k: f64 = blocks.iter().map(|b| b.a * b.a * b.k as f64).sum();
        let c_h = big_k / n as f64;
        let big_n = n as f64 + m as f64 + 0.5;
        let l = blocks.len();
        let mut c_frak: Vec<f64> = blocks[..l - 1]
            .iter()
            .map(|b| b.k as f64 / big_n)
            .collect();
        let c_last = 1.0 - c_frak.iter().sum::<f64>();
        c_frak.push(c_last);

        let mut block_offsets = Vec::with_capacity(l + 1);
        let mut off = 0;
        for blk in &blocks {
            block_offsets.push(off);
            off += 2 * blk.k;
        }
        block_offsets.push(off);

        let spec = GroupSpec {
            blocks,
            m,
            b,
            u_matrices: None,
            n,
            big_k,
            c_h,
            big_n,
            c_frak,
            block_offsets,
        };
        if let Some(u) = u_matrices {
            spec.check_u(&u)?;
            let mut spec = spec;
            spec.u_matrices = Some(u);
            return Ok(spec);
        }
        Ok(spec)
    }

    pub fn blocks(&self) -> &[SpectrumBlock] {
        &self.blocks
    }
    pub fn ell(&self) -> usize {
        self.blocks.len()
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn b(&self) -> &[f64] {
        &self.b
    }
    pub fn n(&self) -> usize {
        self.n
    }
    /// K = sum a_j^2 k_j = Tr(W^2)/2.
    pub fn big_k(&self) -> f64 {
        self.big_k
    }
    /// The spectral mean C_H = K/n.
    pub fn c_h(&self) -> f64 {
        self.c_h
    }
    /// N = n + m + 1/2.
    pub fn big_n(&self) -> f64 {
        self.big_n
    }
    /// Exponent weights c_j of the product Lambda.
    pub fn c_frak(&self) -> &[f64] {
        &self.c_frak
    }
    pub fn a_top(&self) -> f64 {
        self.blocks.last().unwrap().a
    }
    pub fn u_matrices(&self) -> Option<&[DMatrix<f64>]> {
        self.u_matrices.as_deref()
    }
    /// Whether k_l / n >= eta0 (the top block carries enough dimension).
    pub fn satisfies_top_block_fraction(&self, eta0: f64) -> bool {
        self.blocks.last().unwrap().k as f64 / self.n as f64 >= eta0
    }

    /// Euclidean norms of the blocks of x.
    pub fn block_norms(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), 2 * self.n, "x must have length 2n");
        self.blocks
            .iter()
            .enumerate()
            .map(|(j, _)| {
                let lo = self.block_offsets[j];
                let hi = self.block_offsets[j + 1];
                x[lo..hi].iter().map(|v| v * v).sum::<f64>().sqrt()
            })
            .collect()
    }

    /// |Wx| = (sum_j a_j^2 |x_(j)|^2)^{1/2}.
    pub fn wx_norm(&self, x: &[f64]) -> f64 {
        let norms = self.block_norms(x);
        self.wx_norm_from_blocks(&norms)
    }

    /// Same, from precomputed block norms.
    pub fn wx_norm_from_blocks(&self, norms: &[f64]) -> f64 {
        self.blocks
            .iter()
            .zip(norms)
            .map(|(b, r)| b.a * b.a * r * r)
            .sum::<f64>()
            .sqrt()
    }

    /// Rescaled spec with a_l = 1: a' = a/a_l, b' = b/a_l^2 (and U' = U/a_l).
    /// Together with `normalize_point` this leaves the distance invariant.
    pub fn normalize(&self) -> GroupSpec {
        let al = self.a_top();
        if al == 1.0 {
            return self.clone();
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| SpectrumBlock::new(b.a / al, b.k))
            .collect();
        let b = self.b.iter().map(|v| v / (al * al)).collect();
        let u = self
            .u_matrices
            .as_ref()
            .map(|us| us.iter().map(|u| u / al).collect());
        GroupSpec::new(blocks, self.m, b, u).expect("normalization preserves validity")
    }

    /// The point transform matching `normalize`: (x, t) -> (x, t/a_l).
    pub fn normalize_point(&self, g: &GroupPoint) -> GroupPoint {
        let al = self.a_top();
        GroupPoint {
            x: g.x.clone(),
            t: g.t.iter().map(|v| v / al).collect(),
        }
    }

    fn check_u(&self, u: &[DMatrix<f64>]) -> Result<()> {
        if u.len() != self.m {
            return Err(Error::InvalidU(format!(
                "expected {} structure matrices, got {}",
                self.m,
                u.len()
            )));
        }
        let d = 2 * self.n;
        for (l, mat) in u.iter().enumerate() {
            if mat.nrows() != d || mat.ncols() != d {
                return Err(Error::InvalidU(format!(
                    "U^({l}) has shape {}x{}, expected {d}x{d}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
            for i in 0..d {
                for q in 0..d {
                    if (mat[(i, q)] + mat[(q, i)]).abs() > 1e-12 {
                        return Err(Error::InvalidU(format!("U^({l}) is not skew-symmetric")));
                    }
                }
            }
        }
        if !self.htype_relation_holds(u) {
            return Err(Error::InvalidU(
                "H-type relation U^(i)U^(l) + U^(l)U^(i) = -2 delta_il W^2 fails".into(),
            ));
        }
        Ok(())
    }

    /// Checks the H-type anticommutation relation on basis pairs:
    /// U^(i)U^(l) + U^(l)U^(i) = -2 delta_il W^2 (entrywise 1e-12).
    /// Bilinearity makes basis pairs sufficient.
    pub fn validate_htype(&self) -> Result<bool> {
        let u = self.u_matrices.as_ref().ok_or(Error::MissingU)?;
        let d = 2 * self.n;
        for mat in u {
            for i in 0..d {
                for q in 0..d {
                    if (mat[(i, q)] + mat[(q, i)]).abs() > 1e-12 {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(self.htype_relation_holds(u))
    }

    fn htype_relation_holds(&self, u: &[DMatrix<f64>]) -> bool {
        let d = 2 * self.n;
        let mut w2 = DMatrix::<f64>::zeros(d, d);
        for (j, blk) in self.blocks.iter().enumerate() {
            let lo = self.block_offsets[j];
            let hi = self.block_offsets[j + 1];
            for q in lo..hi {
                w2[(q, q)] = blk.a * blk.a;
            }
        }
        for i in 0..u.len() {
            for l in i..u.len() {
                let anti = &u[i] * &u[l] + &u[l] * &u[i];
                let target = if i == l { -2.0 } else { 0.0 };
                for r in 0..d {
                    for c in 0..d {
                        if (anti[(r, c)] - target * w2[(r, c)]).abs() > 1e-12 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Canonical structure matrix for m = 1:
    /// U^(1) = blockdiag(a_j J_{2k_j}) with J_{2k} = diag of k copies of
    /// [[0, 1], [-1, 0]]. The result passes `validate_htype`.
    pub fn with_standard_u_m1(&self) -> Result<GroupSpec> {
        if self.m != 1 {
            return Err(Error::WrongCenterDim(self.m));
        }
        let d = 2 * self.n;
        let mut u = DMatrix::<f64>::zeros(d, d);
        for (j, blk) in self.blocks.iter().enumerate() {
            let lo = self.block_offsets[j];
            for p in 0..blk.k {
                u[(lo + 2 * p, lo + 2 * p + 1)] = blk.a;
                u[(lo + 2 * p + 1, lo + 2 * p)] = -blk.a;
            }
        }
        let mut spec = self.clone();
        spec.u_matrices = Some(vec![u]);
        Ok(spec)
    }

    /// Group product (x,t)(x',t') = (x + x', t + t' + <x, U x'>/2).
    pub fn multiply(&self, g: &GroupPoint, h: &GroupPoint) -> Result<GroupPoint> {
        let u = self.u_matrices.as_ref().ok_or(Error::MissingU)?;
        let d = 2 * self.n;
        assert_eq!(g.x.len(), d);
        assert_eq!(h.x.len(), d);
        let x: Vec<f64> = g.x.iter().zip(&h.x).map(|(a, b)| a + b).collect();
        let mut t = Vec::with_capacity(self.m);
        for (l, ul) in u.iter().enumerate() {
            let mut pair = 0.0;
            for i in 0..d {
                let mut acc = 0.0;
                for q in 0..d {
                    acc += ul[(i, q)] * h.x[q];
                }
                pair += g.x[i] * acc;
            }
            t.push(g.t[l] + h.t[l] + 0.5 * pair);
        }
        Ok(GroupPoint { x, t })
    }

    /// Distance between two points via left translation: d(g, g') = d(g^{-1} g').
    /// Requires structure matrices.
    pub fn translate_to_origin(&self, g: &GroupPoint, h: &GroupPoint) -> Result<GroupPoint> {
        self.multiply(&g.inverse(), h)
    }
}

/// Convenience constructor mirroring the operation signature.
pub fn new_spec(
    blocks: &[(f64, usize)],
    m: usize,
    b: &[f64],
    u_matrices: Option<Vec<DMatrix<f64>>>,
) -> Result<GroupSpec> {
    GroupSpec::new(
        blocks.iter().map(|&(a, k)| SpectrumBlock::new(a, k)).collect(),
        m,
        b.to_vec(),
        u_matrices,
    )
}
