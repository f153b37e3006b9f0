//! Representation calculus for products of unitary groups.
//!
//! Irreducibles of `U(N)` are labelled by non-increasing integer vectors.
//! Characters are weight multisets computed from Gelfand–Tsetlin patterns;
//! every decomposition (tensor products, restrictions, invariants) runs the
//! same loop: peel off the lexicographically largest weight as a highest
//! weight and subtract its character.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finalg::{AlgebraObject, BratteliDiagram};
use crate::num::{self, ComplexMatrix};

/// Largest irrep dimension whose character is materialized.
pub const CHARACTER_CAP: u128 = 1_000_000;

pub type Weight = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HighestWeight {
    pub lambda: Weight,
}

impl HighestWeight {
    pub fn new(lambda: Weight) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidDimension("highest weight needs rank >= 1".into()));
        }
        if lambda.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("weight {lambda:?} is not non-increasing")));
        }
        Ok(Self { lambda })
    }

    pub fn trivial(n: usize) -> Self {
        Self { lambda: vec![0; n] }
    }

    pub fn rank(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.lambda.iter().all(|&x| x == 0)
    }

    /// Highest weight of the dual representation.
    pub fn dual(&self) -> Self {
        Self {
            lambda: self.lambda.iter().rev().map(|x| -x).collect(),
        }
    }
}

impl fmt::Display for HighestWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lambda.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Weight multiset of a representation of `U(N_1) × … × U(N_k)`; weights
/// are the concatenation of the per-factor weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightCharacter {
    pub ranks: Vec<usize>,
    pub mults: BTreeMap<Weight, u64>,
}

impl WeightCharacter {
    pub fn trivial(ranks: &[usize]) -> Self {
        let total = ranks.iter().sum();
        Self {
            ranks: ranks.to_vec(),
            mults: BTreeMap::from([(vec![0; total], 1)]),
        }
    }

    pub fn dim(&self) -> u64 {
        self.mults.values().sum()
    }

    pub fn get(&self, mu: &[i64]) -> u64 {
        self.mults.get(mu).copied().unwrap_or(0)
    }

    pub fn dual(&self) -> Self {
        Self {
            ranks: self.ranks.clone(),
            mults: self
                .mults
                .iter()
                .map(|(w, &c)| (w.iter().map(|x| -x).collect(), c))
                .collect(),
        }
    }

    /// Character of the tensor product over the same group.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.ranks != other.ranks {
            return Err(Error::RankMismatch(format!(
                "cannot tensor characters of ranks {:?} and {:?}",
                self.ranks, other.ranks
            )));
        }
        let mut mults = BTreeMap::new();
        for (a, &x) in &self.mults {
            for (b, &y) in &other.mults {
                let w: Weight = a.iter().zip(b).map(|(p, q)| p + q).collect();
                *mults.entry(w).or_insert(0) += x * y;
            }
        }
        Ok(Self {
            ranks: self.ranks.clone(),
            mults,
        })
    }

    /// Character of the outer product over `G × G'`.
    pub fn outer(&self, other: &Self) -> Self {
        let mut mults = BTreeMap::new();
        for (a, &x) in &self.mults {
            for (b, &y) in &other.mults {
                let mut w = a.clone();
                w.extend_from_slice(b);
                *mults.entry(w).or_insert(0) += x * y;
            }
        }
        let mut ranks = self.ranks.clone();
        ranks.extend_from_slice(&other.ranks);
        Self { ranks, mults }
    }

    pub fn add(&mut self, other: &Self, times: u64) {
        for (w, &c) in &other.mults {
            *self.mults.entry(w.clone()).or_insert(0) += c * times;
        }
    }

    /// Weyl group invariance within every factor.
    pub fn is_weyl_symmetric(&self) -> bool {
        let mut off = 0;
        for &r in &self.ranks {
            for a in 0..r {
                for b in (a + 1)..r {
                    for (w, &c) in &self.mults {
                        let mut s = w.clone();
                        s.swap(off + a, off + b);
                        if self.get(&s) != c {
                            return false;
                        }
                    }
                }
            }
            off += r;
        }
        true
    }
}

pub fn weyl_dim(w: &HighestWeight) -> u128 {
    let l = &w.lambda;
    let n = l.len();
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..n {
        for j in (i + 1)..n {
            num *= (l[i] - l[j] + (j - i) as i64) as u128;
            den *= (j - i) as u128;
        }
    }
    num / den
}

fn gt_character(row: &[i64], memo: &mut HashMap<Weight, BTreeMap<Weight, u64>>) -> BTreeMap<Weight, u64> {
    if row.len() == 1 {
        return BTreeMap::from([(row.to_vec(), 1)]);
    }
    if let Some(hit) = memo.get(row) {
        return hit.clone();
    }
    let k = row.len();
    let total: i64 = row.iter().sum();
    let mut out = BTreeMap::new();
    // Rows below interlace: row[i] >= next[i] >= row[i + 1].
    let mut next = vec![0i64; k - 1];
    fn fill(
        row: &[i64],
        i: usize,
        next: &mut Vec<i64>,
        total: i64,
        memo: &mut HashMap<Weight, BTreeMap<Weight, u64>>,
        out: &mut BTreeMap<Weight, u64>,
    ) {
        if i == next.len() {
            let sub = gt_character(next, memo);
            let mu = total - next.iter().sum::<i64>();
            for (w, c) in sub {
                let mut w = w;
                w.push(mu);
                *out.entry(w).or_insert(0) += c;
            }
            return;
        }
        for x in row[i + 1]..=row[i] {
            next[i] = x;
            fill(row, i + 1, next, total, memo, out);
        }
    }
    fill(row, 0, &mut next, total, memo, &mut out);
    memo.insert(row.to_vec(), out.clone());
    out
}

/// Weight multiplicities as Gelfand–Tsetlin pattern counts.
///
/// The top row is shifted to be nonnegative and the weights shifted back.
pub fn weight_multiplicities(w: &HighestWeight) -> Result<WeightCharacter> {
    let dim = weyl_dim(w);
    if dim > CHARACTER_CAP {
        return Err(Error::CapExceeded(format!(
            "irrep {w} has dimension {dim} > {CHARACTER_CAP}"
        )));
    }
    let shift = *w.lambda.last().expect("rank >= 1");
    let top: Weight = w.lambda.iter().map(|x| x - shift).collect();
    let raw = gt_character(&top, &mut HashMap::new());
    Ok(WeightCharacter {
        ranks: vec![w.rank()],
        mults: raw
            .into_iter()
            .map(|(mu, c)| (mu.into_iter().map(|x| x + shift).collect(), c))
            .collect(),
    })
}

/// Character of an irreducible of a product group.
pub fn product_character(ws: &[HighestWeight]) -> Result<WeightCharacter> {
    let mut acc = WeightCharacter {
        ranks: Vec::new(),
        mults: BTreeMap::from([(Vec::new(), 1)]),
    };
    for w in ws {
        acc = acc.outer(&weight_multiplicities(w)?);
    }
    Ok(acc)
}

fn split(w: &[i64], ranks: &[usize]) -> Vec<HighestWeight> {
    let mut out = Vec::with_capacity(ranks.len());
    let mut off = 0;
    for &r in ranks {
        out.push(HighestWeight {
            lambda: w[off..off + r].to_vec(),
        });
        off += r;
    }
    out
}

/// Irreducible content of a product-group character.
pub fn decompose(ch: &WeightCharacter) -> Result<BTreeMap<Vec<HighestWeight>, u64>> {
    let mut rest: BTreeMap<Weight, i128> = ch.mults.iter().map(|(w, &c)| (w.clone(), c as i128)).collect();
    let mut out = BTreeMap::new();
    let mut cache: HashMap<Vec<HighestWeight>, WeightCharacter> = HashMap::new();
    while let Some((top, &count)) = rest.iter().next_back() {
        let top = top.clone();
        if count < 0 {
            return Err(Error::InternalConsistency(format!(
                "negative residual multiplicity at weight {top:?}"
            )));
        }
        let hw = split(&top, &ch.ranks);
        if hw.iter().any(|h| h.lambda.windows(2).any(|p| p[0] < p[1])) {
            return Err(Error::InternalConsistency(format!(
                "largest residual weight {top:?} is not dominant"
            )));
        }
        let irrep = match cache.get(&hw) {
            Some(c) => c.clone(),
            None => {
                let c = product_character(&hw)?;
                cache.insert(hw.clone(), c.clone());
                c
            }
        };
        for (w, &c) in &irrep.mults {
            let e = rest.entry(w.clone()).or_insert(0);
            *e -= count * c as i128;
        }
        rest.retain(|_, c| *c != 0);
        out.insert(hw, count as u64);
    }
    Ok(out)
}

pub fn tensor_decompose(w1: &HighestWeight, w2: &HighestWeight) -> Result<BTreeMap<HighestWeight, u64>> {
    if w1.rank() != w2.rank() {
        return Err(Error::RankMismatch(format!(
            "tensor product of U({}) and U({}) irreps",
            w1.rank(),
            w2.rank()
        )));
    }
    let ch = weight_multiplicities(w1)?.tensor(&weight_multiplicities(w2)?)?;
    Ok(decompose(&ch)?.into_iter().map(|(mut k, v)| (k.remove(0), v)).collect())
}

/// Linear map between weight lattices of maximal tori, target → source.
///
/// Row `s` of `map` gives source coordinate `s` as an integer combination of
/// the target coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusEmbedding {
    pub source_ranks: Vec<usize>,
    pub target_ranks: Vec<usize>,
    pub map: Vec<Vec<i64>>,
}

impl TorusEmbedding {
    pub fn new(source_ranks: Vec<usize>, target_ranks: Vec<usize>, map: Vec<Vec<i64>>) -> Result<Self> {
        let rows: usize = source_ranks.iter().sum();
        let cols: usize = target_ranks.iter().sum();
        if map.len() != rows || map.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(format!("torus map must be {rows}x{cols}")));
        }
        Ok(Self {
            source_ranks,
            target_ranks,
            map,
        })
    }

    /// The trivial subgroup of `Π U(target_ranks)`.
    pub fn trivial(target_ranks: &[usize]) -> Self {
        Self {
            source_ranks: Vec::new(),
            target_ranks: target_ranks.to_vec(),
            map: Vec::new(),
        }
    }

    /// Identity embedding of the whole group.
    pub fn identity(ranks: &[usize]) -> Self {
        let n: usize = ranks.iter().sum();
        Self {
            source_ranks: ranks.to_vec(),
            target_ranks: ranks.to_vec(),
            map: (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect(),
        }
    }

    /// Joint embedding of `K × H` for two subgroups of the same group.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.target_ranks != other.target_ranks {
            return Err(Error::RankMismatch("subgroups of different groups".into()));
        }
        let mut source_ranks = self.source_ranks.clone();
        source_ranks.extend_from_slice(&other.source_ranks);
        let mut map = self.map.clone();
        map.extend(other.map.iter().cloned());
        Ok(Self {
            source_ranks,
            target_ranks: self.target_ranks.clone(),
            map,
        })
    }

    pub fn apply(&self, mu: &[i64]) -> Weight {
        self.map
            .iter()
            .map(|row| row.iter().zip(mu).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `φ_B: U(A₁) → U(A₂)` on tori: target slot `(j, i, c, r)` is fed by
    /// coordinate `r` of source block `i`.
    pub fn pullback(a1: &AlgebraObject, a2: &AlgebraObject, b: &BratteliDiagram) -> Self {
        let source_ranks = a1.sizes();
        let target_ranks = a2.sizes();
        let src_off: Vec<usize> = offsets(&source_ranks);
        let cols: usize = target_ranks.iter().sum();
        let mut map = vec![vec![0i64; cols]; src_off[src_off.len() - 1]];
        let mut col = 0;
        for j in 0..a2.num_blocks() {
            for (i, bi) in a1.blocks.iter().enumerate() {
                for _ in 0..b.d[i][j] {
                    for r in 0..bi.size {
                        map[src_off[i] + r][col] = 1;
                        col += 1;
                    }
                }
            }
        }
        Self {
            source_ranks,
            target_ranks,
            map,
        }
    }

    /// Torus of the stabilizer `K_B = Π_{kernel j} Π_i U(d_ij) ⊗ 1_{N_i}`.
    pub fn stabilizer(a1: &AlgebraObject, a2: &AlgebraObject, b: &BratteliDiagram) -> Self {
        let target_ranks = a2.sizes();
        let cols: usize = target_ranks.iter().sum();
        let mut source_ranks = Vec::new();
        let mut map = Vec::new();
        let mut col = 0;
        for j in 0..a2.num_blocks() {
            let kernel = a2.blocks[j].mult == 0;
            for (i, bi) in a1.blocks.iter().enumerate() {
                let dij = b.d[i][j];
                if kernel && dij > 0 {
                    source_ranks.push(dij);
                }
                for _ in 0..dij {
                    if kernel {
                        let mut row = vec![0i64; cols];
                        row[col..col + bi.size].iter_mut().for_each(|x| *x = 1);
                        map.push(row);
                    }
                    col += bi.size;
                }
            }
        }
        Self {
            source_ranks,
            target_ranks,
            map,
        }
    }
}

fn offsets(ranks: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    for r in ranks {
        out.push(out.last().unwrap() + r);
    }
    out
}

/// Push a character of the target group through the torus map.
pub fn push_character(ch: &WeightCharacter, emb: &TorusEmbedding) -> Result<WeightCharacter> {
    if ch.ranks != emb.target_ranks {
        return Err(Error::RankMismatch(format!(
            "character of ranks {:?} along embedding into {:?}",
            ch.ranks, emb.target_ranks
        )));
    }
    let mut mults = BTreeMap::new();
    for (w, &c) in &ch.mults {
        *mults.entry(emb.apply(w)).or_insert(0) += c;
    }
    Ok(WeightCharacter {
        ranks: emb.source_ranks.clone(),
        mults,
    })
}

/// Branching of a product-group irrep to the subgroup described by `emb`.
pub fn restrict_product(ws: &[HighestWeight], emb: &TorusEmbedding) -> Result<BTreeMap<Vec<HighestWeight>, u64>> {
    let ch = product_character(ws)?;
    let pushed = push_character(&ch, emb)?;
    let out = decompose(&pushed)?;
    let total: u64 = out
        .iter()
        .map(|(k, &m)| m * k.iter().map(|h| weyl_dim(h) as u64).product::<u64>())
        .sum();
    if total != ch.dim() {
        return Err(Error::InternalConsistency("restriction changed the dimension".into()));
    }
    Ok(out)
}

pub fn restrict(w: &HighestWeight, emb: &TorusEmbedding) -> Result<BTreeMap<Vec<HighestWeight>, u64>> {
    restrict_product(std::slice::from_ref(w), emb)
}

pub fn invariant_dim(w: &HighestWeight, k: &TorusEmbedding) -> Result<u64> {
    invariant_dim_product(std::slice::from_ref(w), k)
}

pub fn invariant_dim_product(ws: &[HighestWeight], k: &TorusEmbedding) -> Result<u64> {
    Ok(restrict_product(ws, k)?
        .into_iter()
        .filter(|(hw, _)| hw.iter().all(HighestWeight::is_trivial))
        .map(|(_, m)| m)
        .sum())
}

/// Character of `h` acting on the `k`-invariant subspace of the irrep `ws`.
///
/// `k` and `h` must commute inside the ambient group.
pub fn invariant_character(ws: &[HighestWeight], k: &TorusEmbedding, h: &TorusEmbedding) -> Result<WeightCharacter> {
    let joint = k.product(h)?;
    let nk = k.source_ranks.len();
    let mut out = WeightCharacter {
        ranks: h.source_ranks.clone(),
        mults: BTreeMap::new(),
    };
    for (hw, m) in restrict_product(ws, &joint)? {
        if hw[..nk].iter().all(HighestWeight::is_trivial) {
            out.add(&product_character(&hw[nk..])?, m);
        }
    }
    Ok(out)
}

/// Multiplicity of the trivial representation in a product-group character.
pub fn trivial_multiplicity(ch: &WeightCharacter) -> Result<u64> {
    let zero: Vec<HighestWeight> = ch.ranks.iter().map(|&r| HighestWeight::trivial(r)).collect();
    Ok(decompose(ch)?.get(&zero).copied().unwrap_or(0))
}

/// `c₂(λ) = Σ_i λ_i (λ_i + N + 1 − 2i)`, the eigenvalue of `−Σ_a ρ(X_a)²`
/// over the trace-orthonormal basis of `u(N)`.
pub fn casimir(w: &HighestWeight) -> i64 {
    let n = w.rank() as i64;
    w.lambda
        .iter()
        .enumerate()
        .map(|(i, &l)| l * (l + n + 1 - 2 * (i as i64 + 1)))
        .sum()
}

pub fn casimir_product(ws: &[HighestWeight]) -> i64 {
    ws.iter().map(casimir).sum()
}

/// Spectrum of `−Σ_a ρ(X_a)²` for explicit images of [`num::lie_basis`].
pub fn casimir_explicit(images: &[ComplexMatrix]) -> Result<Vec<f64>> {
    let n = (images.len() as f64).sqrt().round() as usize;
    if n * n != images.len() || n == 0 {
        return Err(Error::ShapeMismatch(format!(
            "{} generator images is not N² for any N",
            images.len()
        )));
    }
    let basis = num::lie_basis(n);
    let dim = images[0].nrows();
    if images.iter().any(|m| m.shape() != (dim, dim)) {
        return Err(Error::ShapeMismatch("generator images of mixed shape".into()));
    }
    for a in 0..basis.len() {
        for b in (a + 1)..basis.len() {
            let comm = &basis[a] * &basis[b] - &basis[b] * &basis[a];
            let mut expect = num::zeros(dim, dim);
            for (c, xc) in basis.iter().enumerate() {
                let f = num::trace(&(xc.adjoint() * &comm));
                if f.norm() > 0.0 {
                    expect += &images[c] * f;
                }
            }
            let got = &images[a] * &images[b] - &images[b] * &images[a];
            if num::max_abs_diff(&got, &expect) > 1e-9 {
                return Err(Error::ContractViolation(format!(
                    "images fail the commutation relation for generators {a}, {b}"
                )));
            }
        }
    }
    let mut cas = num::zeros(dim, dim);
    for m in images {
        cas -= m * m;
    }
    num::eigvals_hermitian(&cas)
}

/// Explicit matrices for small representations, used as Casimir oracles.
pub mod explicit {
    use super::*;

    pub fn defining(n: usize) -> Vec<ComplexMatrix> {
        num::lie_basis(n)
    }

    pub fn dual(n: usize) -> Vec<ComplexMatrix> {
        num::lie_basis(n).iter().map(|x| x.map(|z| z.conj())).collect()
    }

    pub fn trivial(n: usize) -> Vec<ComplexMatrix> {
        vec![num::zeros(1, 1); n * n]
    }

    pub fn tensor(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
        let ia = num::identity(a[0].nrows());
        let ib = num::identity(b[0].nrows());
        a.iter()
            .zip(b)
            .map(|(x, y)| num::kron(x, &ib) + num::kron(&ia, y))
            .collect()
    }

    /// `ad(X)Y = [X, Y]` in the coordinates of the basis itself.
    pub fn adjoint(n: usize) -> Vec<ComplexMatrix> {
        let basis = num::lie_basis(n);
        let m = basis.len();
        basis
            .iter()
            .map(|x| {
                ComplexMatrix::from_fn(m, m, |c, b| {
                    let comm = x * &basis[b] - &basis[b] * x;
                    num::trace(&(basis[c].adjoint() * comm))
                })
            })
            .collect()
    }
}

/// An outgoing edge at a vertex: the edge irrep over `U(A_{t(e)})`, the
/// stabilizer `K` whose invariants are kept, and the pullback `φ_B` to the
/// vertex group.
#[derive(Clone, Debug)]
pub struct OutgoingLeg {
    pub weight: Vec<HighestWeight>,
    pub stabilizer: TorusEmbedding,
    pub pullback: TorusEmbedding,
}

/// `dim Hom_{U(A_v)}(⊗ incoming, ⊗ outgoing)` as the trivial multiplicity
/// of `(⊗ in) ⊗ (⊗ out)*`.
pub fn intertwiner_dim(
    vertex_ranks: &[usize],
    incoming: &[Vec<HighestWeight>],
    outgoing: &[OutgoingLeg],
) -> Result<u64> {
    let mut acc = WeightCharacter::trivial(vertex_ranks);
    for w in incoming {
        let ranks: Vec<usize> = w.iter().map(HighestWeight::rank).collect();
        if ranks != vertex_ranks {
            return Err(Error::RankMismatch(format!(
                "incoming weight of ranks {ranks:?} at a vertex of ranks {vertex_ranks:?}"
            )));
        }
        acc = acc.tensor(&product_character(w)?)?;
    }
    for leg in outgoing {
        if leg.pullback.source_ranks != vertex_ranks {
            return Err(Error::RankMismatch(
                "outgoing pullback does not land in the vertex group".into(),
            ));
        }
        let ch = invariant_character(&leg.weight, &leg.stabilizer, &leg.pullback)?;
        acc = acc.tensor(&ch.dual())?;
    }
    trivial_multiplicity(&acc)
}
