//! Finite-dimensional *-algebras represented on Hilbert spaces, Bratteli
//! diagrams between them, and morphisms `(φ, L)` in normal form.
//!
//! An object is `A = ⊕_i M_{N_i}` acting on `H = ⊕_i ℂ^{n_i} ⊗ ℂ^{N_i}`, so
//! block `i` acts as `1_{n_i} ⊗ a_i`. Blocks with `n_i = 0` form `ker λ`.
//!
//! A morphism is stored as its diagram, a block unitary `w ∈ U(A₂)` with
//! `φ = Ad w ∘ φ_B`, and the intertwining unitary `L: H₁ → H₂`. The pair
//! `(U, V)` of the decomposition `φ = Ad U ∘ φ_B̃ + Ad V ∘ φ_B₀` is derived
//! from it on demand.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{self, haar_unitary_with, kron, ComplexMatrix, ONE};

pub type BlockMatrices = Vec<ComplexMatrix>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    /// Matrix size `N_i`.
    #[serde(rename = "N")]
    pub size: usize,
    /// Multiplicity `n_i` of `ℂ^{N_i}` inside `H`.
    #[serde(rename = "n")]
    pub mult: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraObject {
    pub blocks: Vec<Block>,
}

impl AlgebraObject {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidInput("algebra needs at least one block".into()));
        }
        if blocks.iter().any(|b| b.size == 0) {
            return Err(Error::InvalidDimension("block dimension N_i must be >= 1".into()));
        }
        Ok(Self { blocks })
    }

    /// Build from parallel lists of block sizes and multiplicities.
    pub fn from_sizes(sizes: &[usize], mults: &[usize]) -> Result<Self> {
        if sizes.len() != mults.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} block sizes but {} multiplicities",
                sizes.len(),
                mults.len()
            )));
        }
        Self::new(
            sizes
                .iter()
                .zip(mults)
                .map(|(&size, &mult)| Block { size, mult })
                .collect(),
        )
    }

    /// `M_N` acting on `ℂ^N`.
    pub fn matrix(n: usize) -> Result<Self> {
        Self::from_sizes(&[n], &[1])
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size).collect()
    }

    pub fn tilde_blocks(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&i| self.blocks[i].mult > 0).collect()
    }

    pub fn kernel_blocks(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&i| self.blocks[i].mult == 0).collect()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size * b.mult).sum()
    }

    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size * b.size).sum()
    }

    /// Offset of block `i` inside `H`.
    pub fn hilbert_offset(&self, i: usize) -> usize {
        self.blocks[..i].iter().map(|b| b.size * b.mult).sum()
    }

    pub fn check_element(&self, a: &[ComplexMatrix]) -> Result<()> {
        if a.len() != self.blocks.len() {
            return Err(Error::ShapeMismatch(format!(
                "element has {} blocks, algebra has {}",
                a.len(),
                self.blocks.len()
            )));
        }
        for (i, (m, b)) in a.iter().zip(&self.blocks).enumerate() {
            if m.shape() != (b.size, b.size) {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    b.size,
                    b.size
                )));
            }
        }
        Ok(())
    }

    pub fn identity_element(&self) -> BlockMatrices {
        self.blocks.iter().map(|b| num::identity(b.size)).collect()
    }

    /// `λ(a)` on `H`, block `i` acting as `1_{n_i} ⊗ a_i`.
    pub fn represent(&self, a: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        self.check_element(a)?;
        let dim = self.hilbert_dim();
        let mut out = num::zeros(dim, dim);
        for (i, b) in self.blocks.iter().enumerate() {
            if b.mult == 0 {
                continue;
            }
            let off = self.hilbert_offset(i);
            let blk = kron(&num::identity(b.mult), &a[i]);
            out.view_mut((off, off), (blk.nrows(), blk.ncols())).copy_from(&blk);
        }
        Ok(out)
    }

    pub fn random_unitary<R: Rng + ?Sized>(&self, rng: &mut R) -> BlockMatrices {
        self.blocks
            .iter()
            .map(|b| haar_unitary_with(b.size, rng).expect("block size >= 1"))
            .collect()
    }

    /// Gaussian random element; spans the whole algebra almost surely.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> BlockMatrices {
        self.blocks
            .iter()
            .map(|b| num::random_complex(b.size, b.size, rng))
            .collect()
    }

    /// Matrix units `e_{rs}` of every block, a linear basis of `A`.
    pub fn matrix_units(&self) -> Vec<BlockMatrices> {
        let mut out = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            for r in 0..b.size {
                for s in 0..b.size {
                    let mut e: BlockMatrices = self.blocks.iter().map(|bb| num::zeros(bb.size, bb.size)).collect();
                    e[i][(r, s)] = ONE;
                    out.push(e);
                }
            }
        }
        out
    }
}

/// Multiplicity matrix `d_ij` (source block `i`, target block `j`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BratteliDiagram {
    pub d: Vec<Vec<usize>>,
    /// Target blocks acting as zero on the target Hilbert space.
    pub kernel_cols: Vec<usize>,
}

impl BratteliDiagram {
    pub fn rows(&self) -> usize {
        self.d.len()
    }

    pub fn cols(&self) -> usize {
        self.d.first().map_or(0, Vec::len)
    }

    pub fn is_kernel_col(&self, j: usize) -> bool {
        self.kernel_cols.contains(&j)
    }

    fn flat(&self) -> Vec<usize> {
        self.d.iter().flatten().copied().collect()
    }

    /// Check unitality, the kernel split and Hilbert compatibility.
    pub fn validate(&self, a1: &AlgebraObject, a2: &AlgebraObject) -> Result<()> {
        let (k1, k2) = (a1.num_blocks(), a2.num_blocks());
        if self.d.len() != k1 || self.d.iter().any(|row| row.len() != k2) {
            return Err(Error::InvalidDiagram(format!("multiplicity matrix must be {k1}x{k2}")));
        }
        if self.kernel_cols != a2.kernel_blocks() {
            return Err(Error::InvalidDiagram(format!(
                "kernel_cols {:?} do not match target kernel blocks {:?}",
                self.kernel_cols,
                a2.kernel_blocks()
            )));
        }
        for (j, bj) in a2.blocks.iter().enumerate() {
            let fed: usize = (0..k1).map(|i| self.d[i][j] * a1.blocks[i].size).sum();
            if fed != bj.size {
                return Err(Error::InvalidDiagram(format!(
                    "target block {j} not unital: N'_j = {} but Σ d_ij N_i = {fed}",
                    bj.size
                )));
            }
        }
        for (i, bi) in a1.blocks.iter().enumerate() {
            let pulled: usize = (0..k2).map(|j| a2.blocks[j].mult * self.d[i][j]).sum();
            if pulled != bi.mult {
                return Err(Error::InvalidDiagram(format!(
                    "source block {i} not Hilbert compatible: n_i = {} but Σ n'_j d_ij = {pulled}",
                    bi.mult
                )));
            }
        }
        Ok(())
    }

    /// Offset of copy `c` of source block `i` inside target block `j`.
    fn slot_offset(&self, a1: &AlgebraObject, j: usize, i: usize, c: usize) -> usize {
        (0..i).map(|ii| self.d[ii][j] * a1.blocks[ii].size).sum::<usize>() + c * a1.blocks[i].size
    }

    /// `φ_B(a)`: block `j` is `⊕_i 1_{d_ij} ⊗ a_i` in block-lexicographic slots.
    pub fn embed(&self, a1: &AlgebraObject, a2: &AlgebraObject, a: &[ComplexMatrix]) -> BlockMatrices {
        a2.blocks
            .iter()
            .enumerate()
            .map(|(j, bj)| {
                let mut m = num::zeros(bj.size, bj.size);
                for (i, bi) in a1.blocks.iter().enumerate() {
                    for c in 0..self.d[i][j] {
                        let off = self.slot_offset(a1, j, i, c);
                        m.view_mut((off, off), (bi.size, bi.size)).copy_from(&a[i]);
                    }
                }
                m
            })
            .collect()
    }

    /// Canonical intertwiner `L_B: H₁ → H₂`, a permutation matrix.
    ///
    /// The `n_i` copies of `ℂ^{N_i}` in `H₁` are matched, in order, with the
    /// slots `(j, m, c)`: target block `j`, its copy `m < n'_j`, and the
    /// `c`-th occurrence of block `i` inside `N'_j`.
    pub fn canonical_intertwiner(&self, a1: &AlgebraObject, a2: &AlgebraObject) -> ComplexMatrix {
        let mut l = num::zeros(a2.hilbert_dim(), a1.hilbert_dim());
        for (i, bi) in a1.blocks.iter().enumerate() {
            let mut q = 0;
            for (j, bj) in a2.blocks.iter().enumerate() {
                for m in 0..bj.mult {
                    for c in 0..self.d[i][j] {
                        let src = a1.hilbert_offset(i) + q * bi.size;
                        let dst = a2.hilbert_offset(j) + m * bj.size + self.slot_offset(a1, j, i, c);
                        for r in 0..bi.size {
                            l[(dst + r, src + r)] = ONE;
                        }
                        q += 1;
                    }
                }
            }
        }
        l
    }

    /// Diagram of the composite `self ∘ first` (first applied first).
    pub fn after(&self, first: &BratteliDiagram) -> BratteliDiagram {
        let (k1, k2, k3) = (first.rows(), first.cols(), self.cols());
        let d = (0..k1)
            .map(|i| {
                (0..k3)
                    .map(|k| (0..k2).map(|j| first.d[i][j] * self.d[j][k]).sum())
                    .collect()
            })
            .collect();
        BratteliDiagram {
            d,
            kernel_cols: self.kernel_cols.clone(),
        }
    }
}

/// All nonnegative `x` with `Σ_i x_i·w_i = total`, lexicographic.
fn compositions(weights: &[usize], total: usize) -> Vec<Vec<usize>> {
    fn rec(weights: &[usize], rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == weights.len() {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = weights[cur.len()];
        for x in 0..=rest / w {
            cur.push(x);
            rec(weights, rest - x * w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(weights, total, &mut Vec::new(), &mut out);
    out
}

fn unital_diagrams(a1: &AlgebraObject, a2: &AlgebraObject) -> Vec<BratteliDiagram> {
    let sizes = a1.sizes();
    let columns: Vec<Vec<Vec<usize>>> = a2.blocks.iter().map(|b| compositions(&sizes, b.size)).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; columns.len()];
    if columns.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let d = (0..a1.num_blocks())
            .map(|i| (0..columns.len()).map(|j| columns[j][choice[j]][i]).collect())
            .collect();
        out.push(BratteliDiagram {
            d,
            kernel_cols: a2.kernel_blocks(),
        });
        let mut k = columns.len();
        loop {
            if k == 0 {
                out.sort_by_key(BratteliDiagram::flat);
                return out;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < columns[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// Every unital *-algebra map `A₁ → A₂` as a diagram, ignoring Hilbert spaces.
pub fn enumerate_unital(a1: &AlgebraObject, a2: &AlgebraObject) -> Vec<BratteliDiagram> {
    unital_diagrams(a1, a2)
}

/// Diagrams admitting a morphism of represented algebras, in lexicographic order.
pub fn enumerate_bratteli(a1: &AlgebraObject, a2: &AlgebraObject) -> Vec<BratteliDiagram> {
    unital_diagrams(a1, a2)
        .into_iter()
        .filter(|b| b.validate(a1, a2).is_ok())
        .collect()
}

#[derive(Clone, Debug)]
pub struct Morphism {
    pub source: AlgebraObject,
    pub target: AlgebraObject,
    pub diagram: BratteliDiagram,
    /// Block unitary with `φ = Ad w ∘ φ_B`.
    pub w: BlockMatrices,
    /// Unitary `L: H₁ → H₂` with `L λ₁(a) L† = λ₂(φ(a))`.
    pub l: ComplexMatrix,
}

pub fn canonical_morphism(a1: &AlgebraObject, a2: &AlgebraObject, b: &BratteliDiagram) -> Result<Morphism> {
    b.validate(a1, a2)?;
    Ok(Morphism {
        source: a1.clone(),
        target: a2.clone(),
        diagram: b.clone(),
        w: a2.identity_element(),
        l: b.canonical_intertwiner(a1, a2),
    })
}

/// `(Ad g ∘ φ_B, g·L_B)` with `g = ⊕_j m_j ⊗ u_j` Haar in `Aut_{Ã₂}(H₂)` and
/// Haar kernel unitaries.
pub fn random_morphism<R: Rng + ?Sized>(
    a1: &AlgebraObject,
    a2: &AlgebraObject,
    b: &BratteliDiagram,
    rng: &mut R,
) -> Result<Morphism> {
    let mut m = canonical_morphism(a1, a2, b)?;
    let mut g = num::zeros(a2.hilbert_dim(), a2.hilbert_dim());
    for (j, bj) in a2.blocks.iter().enumerate() {
        let u = haar_unitary_with(bj.size, rng)?;
        if bj.mult > 0 {
            let mj = haar_unitary_with(bj.mult, rng)?;
            let off = a2.hilbert_offset(j);
            let blk = kron(&mj, &u);
            g.view_mut((off, off), (blk.nrows(), blk.ncols())).copy_from(&blk);
        }
        m.w[j] = u;
    }
    m.l = g * &m.l;
    Ok(m)
}

impl Morphism {
    pub fn identity(a: &AlgebraObject) -> Morphism {
        let k = a.num_blocks();
        let d = (0..k).map(|i| (0..k).map(|j| usize::from(i == j)).collect()).collect();
        Morphism {
            source: a.clone(),
            target: a.clone(),
            diagram: BratteliDiagram {
                d,
                kernel_cols: a.kernel_blocks(),
            },
            w: a.identity_element(),
            l: num::identity(a.hilbert_dim()),
        }
    }

    /// Spin-network link on `(M_N, ℂ^N)`: `φ = Ad u`, `L = u`.
    pub fn link(u: ComplexMatrix) -> Result<Morphism> {
        if !u.is_square() {
            return Err(Error::ShapeMismatch("link must be square".into()));
        }
        let a = AlgebraObject::matrix(u.nrows())?;
        let mut m = Morphism::identity(&a);
        m.w[0] = u.clone();
        m.l = u;
        Ok(m)
    }

    pub fn apply(&self, a: &[ComplexMatrix]) -> Result<BlockMatrices> {
        self.source.check_element(a)?;
        let emb = self.diagram.embed(&self.source, &self.target, a);
        Ok(emb.iter().zip(&self.w).map(|(m, w)| w * m * w.adjoint()).collect())
    }

    /// `U = L·L_B̃†`, the `Aut_{Ã₂}(H₂)` part of the normal form.
    pub fn u(&self) -> ComplexMatrix {
        &self.l * self.diagram.canonical_intertwiner(&self.source, &self.target).adjoint()
    }

    /// `V`, the kernel-block part of `w` (one representative of its coset).
    pub fn v(&self) -> BlockMatrices {
        self.target.kernel_blocks().iter().map(|&j| self.w[j].clone()).collect()
    }

    /// `max ‖L λ₁(a) L† − λ₂(φ(a))‖_∞` over the given elements.
    pub fn equivariance_defect(&self, elems: &[BlockMatrices]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for a in elems {
            let lhs = &self.l * self.source.represent(a)? * self.l.adjoint();
            let rhs = self.target.represent(&self.apply(a)?)?;
            worst = worst.max(num::max_abs_diff(&lhs, &rhs));
        }
        Ok(worst)
    }

    /// True when both morphisms induce the same `φ` on a spanning set.
    pub fn same_phi(&self, other: &Morphism, tol: f64) -> Result<bool> {
        if self.source != other.source || self.target != other.target {
            return Ok(false);
        }
        for e in self.source.matrix_units() {
            let x = self.apply(&e)?;
            let y = other.apply(&e)?;
            if x.iter().zip(&y).any(|(p, q)| num::max_abs_diff(p, q) > tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Conjugate by gauge unitaries: `φ ↦ Ad g_t ∘ φ ∘ Ad g_s†`,
    /// `L ↦ λ_t(g_t) L λ_s(g_s)†`.
    pub fn gauge(&self, g_source: &[ComplexMatrix], g_target: &[ComplexMatrix]) -> Result<Morphism> {
        self.source.check_element(g_source)?;
        self.target.check_element(g_target)?;
        let gs_inv: BlockMatrices = g_source.iter().map(|g| g.adjoint()).collect();
        let pulled = self.diagram.embed(&self.source, &self.target, &gs_inv);
        let w = g_target
            .iter()
            .zip(&self.w)
            .zip(&pulled)
            .map(|((gt, w), p)| gt * w * p)
            .collect();
        let l = self.target.represent(g_target)? * &self.l * self.source.represent(g_source)?.adjoint();
        Ok(Morphism {
            source: self.source.clone(),
            target: self.target.clone(),
            diagram: self.diagram.clone(),
            w,
            l,
        })
    }
}

/// `second ∘ first`.
pub fn compose(second: &Morphism, first: &Morphism) -> Result<Morphism> {
    if first.target != second.source {
        return Err(Error::ShapeMismatch(
            "compose: target of the first morphism differs from source of the second".into(),
        ));
    }
    let a1 = &first.source;
    let a2 = &first.target;
    let a3 = &second.target;
    let d1 = &first.diagram;
    let d2 = &second.diagram;
    let diagram = d2.after(d1);

    // φ_{B₂}∘φ_{B₁} lays copies out as (j, c2, i, c1); the composite's
    // canonical layout is (i, c) with c running over (j, c2, c1).
    let perms: Vec<ComplexMatrix> = a3
        .blocks
        .iter()
        .enumerate()
        .map(|(k, bk)| {
            let mut p = num::zeros(bk.size, bk.size);
            let mut can = 0;
            for (i, bi) in a1.blocks.iter().enumerate() {
                for j in 0..a2.num_blocks() {
                    for c2 in 0..d2.d[j][k] {
                        for c1 in 0..d1.d[i][j] {
                            let nested = d2.slot_offset(a2, k, j, c2) + d1.slot_offset(a1, j, i, c1);
                            for r in 0..bi.size {
                                p[(nested + r, can + r)] = ONE;
                            }
                            can += bi.size;
                        }
                    }
                }
            }
            p
        })
        .collect();

    let w1_img = d2.embed(a2, a3, &first.w);
    let w = second
        .w
        .iter()
        .zip(&w1_img)
        .zip(&perms)
        .map(|((w2, w1), p)| w2 * w1 * p)
        .collect();
    Ok(Morphism {
        source: a1.clone(),
        target: a3.clone(),
        diagram,
        w,
        l: &second.l * &first.l,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomEntry {
    pub diagram: BratteliDiagram,
    /// Real dimension of `Aut_{Ã₂}(H₂) = Π_j U(N'_j) × U(n'_j)`.
    pub aut_dim: usize,
    /// Real dimension of the kernel orbit `U(ker λ₂)/stabilizer`.
    pub kernel_orbit_dim: usize,
    /// Dimension of the set of `(φ̃, L)` pairs, with the redundant
    /// central phases of `Aut_{Ã₂}(H₂)` removed.
    pub effective_dim: usize,
    /// True when `aut_dim` overcounts `effective_dim` by shared central phases.
    pub central_redundancy: bool,
}

pub fn hom_descriptor(a1: &AlgebraObject, a2: &AlgebraObject) -> Vec<HomEntry> {
    enumerate_bratteli(a1, a2)
        .into_iter()
        .map(|b| {
            let tilde = a2.tilde_blocks();
            let aut_dim: usize = tilde
                .iter()
                .map(|&j| a2.blocks[j].size.pow(2) + a2.blocks[j].mult.pow(2))
                .sum();
            let kernel_orbit_dim: usize = a2
                .kernel_blocks()
                .iter()
                .map(|&j| a2.blocks[j].size.pow(2) - (0..a1.num_blocks()).map(|i| b.d[i][j].pow(2)).sum::<usize>())
                .sum();
            let stab: usize = tilde
                .iter()
                .map(|&j| (0..a1.num_blocks()).map(|i| b.d[i][j].pow(2)).sum::<usize>())
                .sum();
            let effective_dim = tilde.iter().map(|&j| a2.blocks[j].size.pow(2)).sum::<usize>()
                + a1.blocks.iter().map(|bi| bi.mult.pow(2)).sum::<usize>()
                - stab;
            HomEntry {
                diagram: b,
                aut_dim,
                kernel_orbit_dim,
                effective_dim,
                central_redundancy: aut_dim != effective_dim,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "n")]
pub enum GroupFactor {
    /// `U(N_i)` acting on a faithful block.
    Unitary(usize),
    /// `U(n_i)` acting on the multiplicity space of a faithful block.
    Multiplicity(usize),
    /// `PU(N_i)` acting on a kernel block.
    ProjectiveUnitary(usize),
}

impl std::fmt::Display for GroupFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupFactor::Unitary(n) | GroupFactor::Multiplicity(n) => write!(f, "U({n})"),
            GroupFactor::ProjectiveUnitary(n) => write!(f, "PU({n})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AutStructure {
    pub unitary_factors: Vec<GroupFactor>,
    /// Classes of faithful blocks with equal `(N, n)`, each of size ≥ 2.
    pub tilde_permutations: Vec<Vec<usize>>,
    /// Classes of kernel blocks with equal `N`, each of size ≥ 2.
    pub kernel_permutations: Vec<Vec<usize>>,
}

impl AutStructure {
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.unitary_factors.iter().map(ToString::to_string).collect();
        let perm = self
            .tilde_permutations
            .iter()
            .chain(&self.kernel_permutations)
            .map(|c| format!("S{}", c.len()))
            .collect::<Vec<_>>();
        if parts.is_empty() {
            parts.push("1".into());
        }
        let mut s = parts.join(" x ");
        if !perm.is_empty() {
            s = format!("({s}) ⋊ {}", perm.join(" x "));
        }
        s
    }
}

pub fn automorphisms(a: &AlgebraObject) -> AutStructure {
    let mut unitary_factors = Vec::new();
    for &i in &a.tilde_blocks() {
        unitary_factors.push(GroupFactor::Unitary(a.blocks[i].size));
    }
    for &i in &a.tilde_blocks() {
        unitary_factors.push(GroupFactor::Multiplicity(a.blocks[i].mult));
    }
    for &i in &a.kernel_blocks() {
        unitary_factors.push(GroupFactor::ProjectiveUnitary(a.blocks[i].size));
    }
    let mut tilde: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for i in a.tilde_blocks() {
        tilde.entry((a.blocks[i].size, a.blocks[i].mult)).or_default().push(i);
    }
    let mut kernel: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in a.kernel_blocks() {
        kernel.entry(a.blocks[i].size).or_default().push(i);
    }
    AutStructure {
        unitary_factors,
        tilde_permutations: tilde.into_values().filter(|c| c.len() > 1).collect(),
        kernel_permutations: kernel.into_values().filter(|c| c.len() > 1).collect(),
    }
}

/// Scalar `z` as an element of a one-block algebra.
pub fn scalar(z: Complex64) -> BlockMatrices {
    vec![ComplexMatrix::from_element(1, 1, z)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rng_from_seed, TOL_HERMITIAN};

    fn obj(sizes: &[usize], mults: &[usize]) -> AlgebraObject {
        AlgebraObject::from_sizes(sizes, mults).unwrap()
    }

    #[test]
    fn object_validation() {
        assert!(AlgebraObject::new(vec![]).is_err());
        assert!(AlgebraObject::from_sizes(&[0], &[1]).is_err());
        let a = obj(&[1, 2, 3], &[1, 0, 2]);
        assert_eq!(a.tilde_blocks(), vec![0, 2]);
        assert_eq!(a.kernel_blocks(), vec![1]);
        assert_eq!(a.hilbert_dim(), 7);
    }

    #[test]
    fn identity_diagram_is_unique_for_matrix_algebra() {
        for n in 1..=4 {
            let a = AlgebraObject::matrix(n).unwrap();
            let ds = enumerate_bratteli(&a, &a);
            assert_eq!(ds.len(), 1);
            assert_eq!(ds[0].d, vec![vec![1]]);
            let m = canonical_morphism(&a, &a, &ds[0]).unwrap();
            assert_eq!(m.l, num::identity(n));
        }
    }

    #[test]
    fn scalars_into_c_plus_m2() {
        let a1 = obj(&[1], &[1]);
        let a2 = obj(&[1, 2], &[1, 0]);
        // ℂ on ℂ into ℂ⊕M₂ where only the ℂ summand acts on H₂ = ℂ.
        let ds = enumerate_bratteli(&a1, &a2);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].d, vec![vec![1, 2]]);
        let m = canonical_morphism(&a1, &a2, &ds[0]).unwrap();
        let z = Complex64::new(0.3, -1.2);
        let img = m.apply(&scalar(z)).unwrap();
        assert_eq!(img[0][(0, 0)], z);
        assert_eq!(img[1], num::identity(2) * z);
    }

    #[test]
    fn m2_into_m4_is_one_tensor_a() {
        let a1 = obj(&[2], &[0]);
        let a2 = obj(&[4], &[0]);
        let ds = enumerate_bratteli(&a1, &a2);
        assert_eq!(ds.len(), 1);
        let m = canonical_morphism(&a1, &a2, &ds[0]).unwrap();
        let mut rng = rng_from_seed(1);
        let a = a1.random_element(&mut rng);
        assert_eq!(m.apply(&a).unwrap()[0], kron(&num::identity(2), &a[0]));

        let diag = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ONE * 2.0]));
        let img = m.apply(&[diag]).unwrap();
        let expect: Vec<f64> = img[0].diagonal().iter().map(|z| z.re).collect();
        assert_eq!(expect, vec![1.0, 2.0, 1.0, 2.0]);
    }

    #[test]
    fn c_plus_m2_into_m3() {
        let a1 = obj(&[1, 2], &[1, 1]);
        let a2 = obj(&[3], &[1]);
        assert_eq!(enumerate_unital(&a1, &a2).len(), 2);
        let ds = enumerate_bratteli(&a1, &a2);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].d, vec![vec![1], vec![1]]);
        let h = hom_descriptor(&a1, &a2);
        assert_eq!(h[0].effective_dim, 9);
    }

    #[test]
    fn m2_plus_m3_into_m5_plus_m3() {
        let a1 = obj(&[2, 3], &[0, 0]);
        let a2 = obj(&[5, 3], &[0, 0]);
        let ds = enumerate_bratteli(&a1, &a2);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].d, vec![vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn hom_descriptor_dimensions() {
        let h = hom_descriptor(&AlgebraObject::matrix(3).unwrap(), &AlgebraObject::matrix(3).unwrap());
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].aut_dim, 10);
        assert_eq!(h[0].effective_dim, 9);
        assert!(h[0].central_redundancy);

        let h = hom_descriptor(&obj(&[2], &[0]), &obj(&[4], &[0]));
        assert_eq!(h[0].kernel_orbit_dim, 12);
        assert_eq!(h[0].aut_dim, 0);

        let h = hom_descriptor(&obj(&[2], &[0]), &obj(&[2], &[0]));
        assert_eq!(h[0].kernel_orbit_dim, 3);
    }

    #[test]
    fn automorphism_structures() {
        let a = AlgebraObject::matrix(3).unwrap();
        let s = automorphisms(&a);
        assert_eq!(
            s.unitary_factors,
            vec![GroupFactor::Unitary(3), GroupFactor::Multiplicity(1)]
        );
        assert!(s.tilde_permutations.is_empty());

        let s = automorphisms(&obj(&[2, 2], &[0, 0]));
        assert_eq!(
            s.unitary_factors,
            vec![GroupFactor::ProjectiveUnitary(2), GroupFactor::ProjectiveUnitary(2)]
        );
        assert_eq!(s.kernel_permutations, vec![vec![0, 1]]);
        assert_eq!(s.describe(), "(PU(2) x PU(2)) ⋊ S2");

        let s = automorphisms(&obj(&[1, 2, 3], &[1, 1, 1]));
        assert_eq!(
            &s.unitary_factors[..3],
            &[
                GroupFactor::Unitary(1),
                GroupFactor::Unitary(2),
                GroupFactor::Unitary(3)
            ]
        );
        assert!(s.tilde_permutations.is_empty() && s.kernel_permutations.is_empty());
    }

    #[test]
    fn apply_is_star_homomorphism() {
        let a1 = obj(&[1, 2], &[2, 1]);
        let a2 = obj(&[3, 4], &[1, 1]);
        let mut rng = rng_from_seed(17);
        for b in enumerate_bratteli(&a1, &a2) {
            let m = random_morphism(&a1, &a2, &b, &mut rng).unwrap();
            let x = a1.random_element(&mut rng);
            let y = a1.random_element(&mut rng);
            let xy: BlockMatrices = x.iter().zip(&y).map(|(p, q)| p * q).collect();
            let xs: BlockMatrices = x.iter().map(|p| p.adjoint()).collect();
            let fx = m.apply(&x).unwrap();
            let fy = m.apply(&y).unwrap();
            for (k, fxy) in m.apply(&xy).unwrap().iter().enumerate() {
                assert!(num::max_abs_diff(fxy, &(&fx[k] * &fy[k])) < 1e-10);
            }
            for (k, fxs) in m.apply(&xs).unwrap().iter().enumerate() {
                assert!(num::max_abs_diff(fxs, &fx[k].adjoint()) < 1e-12);
            }
        }
    }

    #[test]
    fn apply_rejects_bad_shapes() {
        let a = AlgebraObject::matrix(2).unwrap();
        let m = Morphism::identity(&a);
        assert!(matches!(m.apply(&[num::identity(3)]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn random_morphisms_are_equivariant() {
        let pairs = [
            (obj(&[1, 2], &[1, 1]), obj(&[3], &[1])),
            (obj(&[1], &[2]), obj(&[1, 1], &[1, 1])),
            (obj(&[1], &[3]), obj(&[1, 2], &[1, 1])),
            (obj(&[2, 1], &[2, 0]), obj(&[4, 3], &[1, 0])),
            (obj(&[2], &[0]), obj(&[4], &[0])),
        ];
        let mut rng = rng_from_seed(3);
        for (a1, a2) in pairs {
            let ds = enumerate_bratteli(&a1, &a2);
            assert!(!ds.is_empty());
            for b in ds {
                let m = random_morphism(&a1, &a2, &b, &mut rng).unwrap();
                assert!(num::unitarity_defect(&m.l) < 1e-12);
                let elems: Vec<_> = (0..20).map(|_| a1.random_unitary(&mut rng)).collect();
                assert!(m.equivariance_defect(&elems).unwrap() < 1e-10);
                let u = m.u();
                assert!(num::unitarity_defect(&u) < 1e-12);
                assert_eq!(m.v().len(), a2.kernel_blocks().len());
            }
        }
    }

    #[test]
    fn compose_scalars_through_c_plus_m2_into_m3() {
        let a1 = obj(&[1], &[3]);
        let a2 = obj(&[1, 2], &[1, 1]);
        let a3 = obj(&[3], &[1]);
        let b1 = &enumerate_bratteli(&a1, &a2)[0];
        let b2 = &enumerate_bratteli(&a2, &a3)[0];
        let mut rng = rng_from_seed(5);
        let m1 = random_morphism(&a1, &a2, b1, &mut rng).unwrap();
        let m2 = random_morphism(&a2, &a3, b2, &mut rng).unwrap();
        let c = compose(&m2, &m1).unwrap();
        assert_eq!(c.diagram.d, vec![vec![3]]);
        assert!(num::max_abs_diff(&c.l, &(&m2.l * &m1.l)) < 1e-14);
        let elems: Vec<_> = (0..20).map(|_| a1.random_element(&mut rng)).collect();
        assert!(c.equivariance_defect(&elems).unwrap() < 1e-10);
        c.diagram.validate(&a1, &a3).unwrap();
    }

    #[test]
    fn compose_with_identity() {
        let a1 = obj(&[1, 2], &[1, 1]);
        let a2 = obj(&[3], &[1]);
        let b = &enumerate_bratteli(&a1, &a2)[0];
        let mut rng = rng_from_seed(9);
        let m = random_morphism(&a1, &a2, b, &mut rng).unwrap();
        let left = compose(&Morphism::identity(&a2), &m).unwrap();
        let right = compose(&m, &Morphism::identity(&a1)).unwrap();
        for c in [left, right] {
            assert_eq!(c.diagram, m.diagram);
            assert!(num::max_abs_diff(&c.l, &m.l) < 1e-14);
            assert!(c.same_phi(&m, 1e-12).unwrap());
        }
    }

    #[test]
    fn compose_endpoint_mismatch() {
        let a = AlgebraObject::matrix(2).unwrap();
        let b = AlgebraObject::matrix(3).unwrap();
        assert!(compose(&Morphism::identity(&a), &Morphism::identity(&b)).is_err());
    }

    #[test]
    fn gauge_conjugation_keeps_equivariance() {
        let a1 = obj(&[1, 2], &[1, 1]);
        let a2 = obj(&[3], &[1]);
        let b = &enumerate_bratteli(&a1, &a2)[0];
        let mut rng = rng_from_seed(21);
        let m = random_morphism(&a1, &a2, b, &mut rng).unwrap();
        let gs = a1.random_unitary(&mut rng);
        let gt = a2.random_unitary(&mut rng);
        let g = m.gauge(&gs, &gt).unwrap();
        let elems: Vec<_> = (0..5).map(|_| a1.random_element(&mut rng)).collect();
        assert!(g.equivariance_defect(&elems).unwrap() < 1e-10);
    }

    #[test]
    fn represent_is_hermitian_on_hermitian_input() {
        let a = obj(&[2, 1], &[2, 3]);
        let mut rng = rng_from_seed(2);
        let h: BlockMatrices = a
            .blocks
            .iter()
            .map(|b| num::random_hermitian(b.size, &mut rng))
            .collect();
        assert!(num::is_hermitian(&a.represent(&h).unwrap(), TOL_HERMITIAN));
    }

    #[test]
    fn json_round_trip() {
        let a = obj(&[1, 2], &[1, 0]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"blocks":[{"N":1,"n":1},{"N":2,"n":0}]}"#);
        assert_eq!(serde_json::from_str::<AlgebraObject>(&s).unwrap(), a);
        let b = BratteliDiagram {
            d: vec![vec![1, 2]],
            kernel_cols: vec![1],
        };
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, r#"{"d":[[1,2]],"kernel_cols":[1]}"#);
        assert_eq!(serde_json::from_str::<BratteliDiagram>(&s).unwrap(), b);
    }
}
