//! Directed graphs, hypercubic lattices, and quiver representations.
//!
//! Only forward edges are stored; a reversed edge `ē` is an [`EdgeRef`] with
//! `reversed = true` and carries `L_ē = L_e†`.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finalg::{random_morphism, AlgebraObject, BlockMatrices, BratteliDiagram, Morphism};
use crate::num::{self, rng_from_seed, ComplexMatrix};

/// Desk-scale bound on `L^d · d · dim S`.
pub const LATTICE_CAP: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub num_vertices: usize,
    /// `(source, target)` per edge id.
    pub edges: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some((e, _)) = edges
            .iter()
            .enumerate()
            .find(|(_, &(s, t))| s >= num_vertices || t >= num_vertices)
        {
            return Err(Error::InvalidInput(format!("edge {e} references a missing vertex")));
        }
        Ok(Self { num_vertices, edges })
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn target(&self, e: usize) -> usize {
        self.edges[e].1
    }

    /// Edges with `s(e) = v`.
    pub fn outgoing(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].0 == v).collect()
    }

    /// Edges with `t(e) = v`.
    pub fn incoming(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].1 == v).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeRef {
    pub edge: usize,
    pub reversed: bool,
}

impl EdgeRef {
    pub fn forward(edge: usize) -> Self {
        Self { edge, reversed: false }
    }

    pub fn backward(edge: usize) -> Self {
        Self { edge, reversed: true }
    }

    pub fn inverse(self) -> Self {
        Self {
            edge: self.edge,
            reversed: !self.reversed,
        }
    }

    pub fn tail(self, q: &Quiver) -> usize {
        if self.reversed {
            q.target(self.edge)
        } else {
            q.source(self.edge)
        }
    }

    pub fn head(self, q: &Quiver) -> usize {
        if self.reversed {
            q.source(self.edge)
        } else {
            q.target(self.edge)
        }
    }
}

/// Elementary square at `base` spanned by axes `mu < nu`.
///
/// `path = [e1, e2, ē3, ē4]`: `e1` along `μ̂` at `x`, `e2` along `ν̂` at
/// `x + μ̂`, `e3` along `μ̂` at `x + ν̂` traversed backwards, `e4` along `ν̂`
/// at `x` traversed backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plaquette {
    pub base: usize,
    pub mu: usize,
    pub nu: usize,
    pub path: [EdgeRef; 4],
}

#[derive(Clone, Debug)]
pub struct EmbeddedQuiver {
    pub quiver: Quiver,
    pub dim: usize,
    pub positions: Vec<Vec<f64>>,
    /// Unit direction of each forward edge.
    pub directions: Vec<Vec<f64>>,
    pub lengths: Vec<f64>,
    pub plaquettes: Vec<Plaquette>,
    /// Present for hypercubic lattices only.
    pub lattice: Option<LatticeSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub d: usize,
    #[serde(rename = "L")]
    pub size: usize,
    pub l: f64,
    pub periodic: bool,
}

impl LatticeSpec {
    pub fn num_vertices(&self) -> usize {
        self.size.pow(self.d as u32)
    }

    pub fn coords(&self, v: usize) -> Vec<usize> {
        let mut x = vec![0; self.d];
        let mut r = v;
        for k in (0..self.d).rev() {
            x[k] = r % self.size;
            r /= self.size;
        }
        x
    }

    pub fn index(&self, x: &[usize]) -> usize {
        x.iter().fold(0, |acc, &c| acc * self.size + c)
    }

    /// Neighbour in direction `+axis`, wrapping when periodic.
    pub fn shift(&self, v: usize, axis: usize) -> Option<usize> {
        let mut x = self.coords(v);
        if x[axis] + 1 < self.size {
            x[axis] += 1;
        } else if self.periodic {
            x[axis] = 0;
        } else {
            return None;
        }
        Some(self.index(&x))
    }
}

impl EmbeddedQuiver {
    /// Embedding read off vertex positions, without plaquettes.
    pub fn from_positions(quiver: Quiver, positions: Vec<Vec<f64>>) -> Result<Self> {
        if positions.len() != quiver.num_vertices || positions.is_empty() {
            return Err(Error::ShapeMismatch("one position per vertex required".into()));
        }
        let dim = positions[0].len();
        if positions.iter().any(|p| p.len() != dim) {
            return Err(Error::ShapeMismatch("positions of mixed dimension".into()));
        }
        let mut directions = Vec::with_capacity(quiver.num_edges());
        let mut lengths = Vec::with_capacity(quiver.num_edges());
        for &(s, t) in &quiver.edges {
            let v: Vec<f64> = positions[t].iter().zip(&positions[s]).map(|(a, b)| a - b).collect();
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len == 0.0 {
                return Err(Error::InvalidInput(format!("edge {s}->{t} has zero length")));
            }
            directions.push(v.iter().map(|x| x / len).collect());
            lengths.push(len);
        }
        Ok(Self {
            quiver,
            dim,
            positions,
            directions,
            lengths,
            plaquettes: Vec::new(),
            lattice: None,
        })
    }

    pub fn spec(&self) -> Result<LatticeSpec> {
        self.lattice
            .ok_or_else(|| Error::Unsupported("operation requires a hypercubic lattice".into()))
    }

    /// Forward edge leaving `v` along `+axis`, if any.
    pub fn edge_at(&self, v: usize, axis: usize) -> Option<usize> {
        let spec = self.lattice?;
        if spec.periodic {
            return Some(v * spec.d + axis);
        }
        let t = spec.shift(v, axis)?;
        let first = self.quiver.outgoing(v);
        first
            .into_iter()
            .find(|&e| self.quiver.target(e) == t && self.axis(e) == Some(axis))
    }

    /// Lattice axis of a forward edge.
    pub fn axis(&self, e: usize) -> Option<usize> {
        let dir = &self.directions[e];
        let k = dir.iter().position(|&x| (x - 1.0).abs() < 1e-12)?;
        dir.iter()
            .enumerate()
            .all(|(i, &x)| i == k || x.abs() < 1e-12)
            .then_some(k)
    }
}

/// Hypercubic lattice with spacing `l`; forward edges along `+μ̂` only.
pub fn build_lattice(d: usize, size: usize, l: f64, periodic: bool) -> Result<EmbeddedQuiver> {
    if !(2..=4).contains(&d) {
        return Err(Error::Unsupported(format!(
            "lattice dimension {d}; supported are 2, 3, 4"
        )));
    }
    if size == 0 {
        return Err(Error::InvalidDimension("lattice size L must be >= 1".into()));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "lattice spacing must be positive, got {l}"
        )));
    }
    let spinor = 1usize << (d / 2);
    let nv = size
        .checked_pow(d as u32)
        .filter(|nv| nv.saturating_mul(d * spinor) <= LATTICE_CAP)
        .ok_or_else(|| Error::CapExceeded(format!("L^d·d·2^⌊d/2⌋ exceeds {LATTICE_CAP} for d={d}, L={size}")))?;
    let spec = LatticeSpec { d, size, l, periodic };

    let mut edges = Vec::new();
    let mut directions = Vec::new();
    let mut index = vec![None; nv * d];
    for v in 0..nv {
        for axis in 0..d {
            if let Some(t) = spec.shift(v, axis) {
                index[v * d + axis] = Some(edges.len());
                edges.push((v, t));
                let mut dir = vec![0.0; d];
                dir[axis] = 1.0;
                directions.push(dir);
            }
        }
    }
    let mut plaquettes = Vec::new();
    for v in 0..nv {
        for mu in 0..d {
            for nu in (mu + 1)..d {
                let (Some(xm), Some(xn)) = (spec.shift(v, mu), spec.shift(v, nu)) else {
                    continue;
                };
                let e1 = index[v * d + mu].expect("edge exists");
                let e2 = index[xm * d + nu].expect("edge exists");
                let e3 = index[xn * d + mu].expect("edge exists");
                let e4 = index[v * d + nu].expect("edge exists");
                plaquettes.push(Plaquette {
                    base: v,
                    mu,
                    nu,
                    path: [
                        EdgeRef::forward(e1),
                        EdgeRef::forward(e2),
                        EdgeRef::backward(e3),
                        EdgeRef::backward(e4),
                    ],
                });
            }
        }
    }
    let positions = (0..nv)
        .map(|v| spec.coords(v).iter().map(|&c| c as f64 * l).collect())
        .collect();
    let ne = edges.len();
    Ok(EmbeddedQuiver {
        quiver: Quiver {
            num_vertices: nv,
            edges,
        },
        dim: d,
        positions,
        directions,
        lengths: vec![l; ne],
        plaquettes,
        lattice: Some(spec),
    })
}

#[derive(Clone, Debug)]
pub struct QuiverRep {
    pub objects: Vec<AlgebraObject>,
    pub morphisms: Vec<Morphism>,
    /// Finite Dirac block `D_v` on `H_v`.
    pub dirac: Vec<ComplexMatrix>,
}

impl QuiverRep {
    pub fn new(q: &Quiver, objects: Vec<AlgebraObject>, morphisms: Vec<Morphism>) -> Result<Self> {
        if objects.len() != q.num_vertices || morphisms.len() != q.num_edges() {
            return Err(Error::ShapeMismatch(
                "one object per vertex and one morphism per edge required".into(),
            ));
        }
        for (e, m) in morphisms.iter().enumerate() {
            let (s, t) = q.edges[e];
            if m.source != objects[s] || m.target != objects[t] {
                return Err(Error::ShapeMismatch(format!(
                    "morphism on edge {e} does not match its endpoint objects"
                )));
            }
        }
        let dirac = objects
            .iter()
            .map(|o| num::zeros(o.hilbert_dim(), o.hilbert_dim()))
            .collect();
        Ok(Self {
            objects,
            morphisms,
            dirac,
        })
    }

    /// Every vertex carries `(M_N, ℂ^N)` and edge `e` the link `u_e`.
    pub fn from_links(q: &Quiver, links: Vec<ComplexMatrix>) -> Result<Self> {
        let n = links.first().map_or(1, |u| u.nrows());
        if links.iter().any(|u| u.shape() != (n, n)) {
            return Err(Error::ShapeMismatch("all links must be N x N".into()));
        }
        let obj = AlgebraObject::matrix(n)?;
        let morphisms = links.into_iter().map(Morphism::link).collect::<Result<_>>()?;
        Self::new(q, vec![obj; q.num_vertices], morphisms)
    }

    pub fn identity_links(q: &Quiver, n: usize) -> Result<Self> {
        Self::from_links(q, vec![num::identity(n); q.num_edges()])
    }

    pub fn haar_links<R: Rng + ?Sized>(q: &Quiver, n: usize, rng: &mut R) -> Result<Self> {
        let links = (0..q.num_edges())
            .map(|_| num::haar_unitary_with(n, rng))
            .collect::<Result<_>>()?;
        Self::from_links(q, links)
    }

    /// `L_e` or `L_ē = L_e†`.
    pub fn link(&self, r: EdgeRef) -> ComplexMatrix {
        let l = &self.morphisms[r.edge].l;
        if r.reversed {
            l.adjoint()
        } else {
            l.clone()
        }
    }

    /// Common `N` when every vertex is `(M_N, ℂ^N)`.
    pub fn spin_network_rank(&self) -> Option<usize> {
        let n = self.objects.first()?.hilbert_dim();
        let obj = AlgebraObject::matrix(n).ok()?;
        self.objects.iter().all(|o| *o == obj).then_some(n)
    }

    pub fn set_dirac(&mut self, v: usize, d: ComplexMatrix) -> Result<()> {
        let h = self.objects[v].hilbert_dim();
        if d.shape() != (h, h) {
            return Err(Error::ShapeMismatch(format!("D_{v} must be {h}x{h}")));
        }
        if !num::is_hermitian(&d, num::TOL_CONSTRUCTION) {
            return Err(Error::ContractViolation(format!("D_{v} is not Hermitian")));
        }
        self.dirac[v] = d;
        Ok(())
    }

    pub fn has_dirac(&self) -> bool {
        self.dirac.iter().any(|d| num::max_abs(d) > 0.0)
    }

    pub fn total_hilbert_dim(&self) -> usize {
        self.objects.iter().map(AlgebraObject::hilbert_dim).sum()
    }
}

/// Per-edge unitaries Haar in `Aut_{Ã}(H)`, kernel unitaries Haar, `D_v = 0`.
pub fn random_rep(
    q: &Quiver,
    objects: Vec<AlgebraObject>,
    diagrams: &[BratteliDiagram],
    seed: u64,
) -> Result<QuiverRep> {
    if diagrams.len() != q.num_edges() || objects.len() != q.num_vertices {
        return Err(Error::ShapeMismatch(
            "one object per vertex and one diagram per edge required".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let morphisms = q
        .edges
        .iter()
        .zip(diagrams)
        .map(|(&(s, t), b)| random_morphism(&objects[s], &objects[t], b, &mut rng))
        .collect::<Result<_>>()?;
    QuiverRep::new(q, objects, morphisms)
}

/// Vertex unitaries `g_v ∈ U(A_v)`, one matrix per block.
#[derive(Clone, Debug)]
pub struct GaugeTransform {
    pub per_vertex: Vec<BlockMatrices>,
}

impl GaugeTransform {
    pub fn identity(rep: &QuiverRep) -> Self {
        Self {
            per_vertex: rep.objects.iter().map(AlgebraObject::identity_element).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(rep: &QuiverRep, rng: &mut R) -> Self {
        Self {
            per_vertex: rep.objects.iter().map(|o| o.random_unitary(rng)).collect(),
        }
    }

    /// `self · first`, acting as `first` then `self`.
    pub fn after(&self, first: &GaugeTransform) -> Self {
        Self {
            per_vertex: self
                .per_vertex
                .iter()
                .zip(&first.per_vertex)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).collect())
                .collect(),
        }
    }

    /// `U(g) = ⊕_v λ_v(g_v)` on `⊕_v H_v`.
    pub fn hilbert_unitaries(&self, rep: &QuiverRep) -> Result<Vec<ComplexMatrix>> {
        rep.objects
            .iter()
            .zip(&self.per_vertex)
            .map(|(o, g)| o.represent(g))
            .collect()
    }
}

pub fn gauge_act(q: &Quiver, rep: &QuiverRep, g: &GaugeTransform) -> Result<QuiverRep> {
    if g.per_vertex.len() != q.num_vertices {
        return Err(Error::ShapeMismatch(
            "gauge transform needs one entry per vertex".into(),
        ));
    }
    let morphisms = q
        .edges
        .iter()
        .zip(&rep.morphisms)
        .map(|(&(s, t), m)| m.gauge(&g.per_vertex[s], &g.per_vertex[t]))
        .collect::<Result<_>>()?;
    let lam = g.hilbert_unitaries(rep)?;
    let dirac = rep.dirac.iter().zip(&lam).map(|(d, u)| u * d * u.adjoint()).collect();
    Ok(QuiverRep {
        objects: rep.objects.clone(),
        morphisms,
        dirac,
    })
}

/// `L_ē₄ L_ē₃ L_e₂ L_e₁`.
pub fn plaquette_holonomy(rep: &QuiverRep, p: &Plaquette) -> Result<ComplexMatrix> {
    let mut acc = rep.link(p.path[0]);
    for &r in &p.path[1..] {
        let l = rep.link(r);
        if l.ncols() != acc.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "plaquette links on edge {} are not composable",
                r.edge
            )));
        }
        acc = l * acc;
    }
    if !acc.is_square() {
        return Err(Error::ShapeMismatch("plaquette holonomy is not square".into()));
    }
    Ok(acc)
}

/// Checkpoint file: lattice metadata plus one `N×N` link per forward edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub d: usize,
    #[serde(rename = "L")]
    pub size: usize,
    pub l: f64,
    pub periodic: bool,
    #[serde(rename = "N")]
    pub n: usize,
    /// Row-major `[re, im]` pairs, edges in lattice order.
    pub links: Vec<Vec<[f64; 2]>>,
}

impl LatticeConfig {
    pub fn from_rep(eq: &EmbeddedQuiver, rep: &QuiverRep) -> Result<Self> {
        let spec = eq.spec()?;
        let n = rep
            .spin_network_rank()
            .ok_or_else(|| Error::Unsupported("configuration files hold (M_N, C^N) links only".into()))?;
        let links = rep
            .morphisms
            .iter()
            .map(|m| {
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        let z = m.l[(i, j)];
                        out.push([z.re, z.im]);
                    }
                }
                out
            })
            .collect();
        Ok(Self {
            d: spec.d,
            size: spec.size,
            l: spec.l,
            periodic: spec.periodic,
            n,
            links,
        })
    }

    pub fn lattice(&self) -> Result<EmbeddedQuiver> {
        build_lattice(self.d, self.size, self.l, self.periodic)
    }

    pub fn to_rep(&self, eq: &EmbeddedQuiver) -> Result<QuiverRep> {
        if self.links.len() != eq.quiver.num_edges() {
            return Err(Error::ShapeMismatch(format!(
                "configuration has {} links, lattice has {} edges",
                self.links.len(),
                eq.quiver.num_edges()
            )));
        }
        let n = self.n;
        let links = self
            .links
            .iter()
            .map(|entries| {
                if entries.len() != n * n {
                    return Err(Error::ShapeMismatch(format!("link needs {} entries", n * n)));
                }
                let m = ComplexMatrix::from_row_iterator(n, n, entries.iter().map(|&[re, im]| Complex64::new(re, im)));
                if num::unitarity_defect(&m) > 1e-10 {
                    return Err(Error::InvalidInput("configuration link is not unitary".into()));
                }
                Ok(m)
            })
            .collect::<Result<_>>()?;
        QuiverRep::from_links(&eq.quiver, links)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }
}
