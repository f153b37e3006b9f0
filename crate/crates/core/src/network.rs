//! Gauge networks: Peter–Weyl basis vectors of `L²(X/G)` at a fixed object
//! assignment, their Casimir energies and time-evolution phases.
//!
//! The edge group is `G_e = U(A_{t(e)}) = Π_j U(N'_j)`. An edge label is one
//! highest weight per block of `A_{t(e)}`; it is admissible when its
//! `K_B`-invariant subspace is nonzero. At a vertex the incoming labels are
//! tensored with the duals of the outgoing invariant subspaces, pulled back
//! along `φ_B`, and the trivial multiplicity is the intertwiner dimension.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finalg::{AlgebraObject, BratteliDiagram};
use crate::quiver::{EdgeRef, Quiver};
use crate::repthy::{self, casimir_product, HighestWeight, OutgoingLeg, TorusEmbedding};

/// Bound on the number of edge-label assignments examined by enumeration.
pub const ENUMERATION_CAP: u128 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaugeNetwork {
    pub edges: Vec<(usize, usize)>,
    pub objects: Vec<AlgebraObject>,
    pub diagrams: Vec<BratteliDiagram>,
    /// Per edge, one highest weight per block of the target algebra.
    pub weights: Vec<Vec<HighestWeight>>,
    pub intertwiner_dims: Vec<u64>,
    /// Chosen basis vector of each intertwiner space.
    pub intertwiner_index: Vec<u64>,
}

/// Objects and diagrams at which networks live.
#[derive(Clone, Debug)]
pub struct NetworkFrame {
    pub quiver: Quiver,
    pub objects: Vec<AlgebraObject>,
    pub diagrams: Vec<BratteliDiagram>,
    stabilizers: Vec<TorusEmbedding>,
    pullbacks: Vec<TorusEmbedding>,
}

impl NetworkFrame {
    pub fn new(quiver: Quiver, objects: Vec<AlgebraObject>, diagrams: Vec<BratteliDiagram>) -> Result<Self> {
        if objects.len() != quiver.num_vertices || diagrams.len() != quiver.num_edges() {
            return Err(Error::ShapeMismatch(
                "one object per vertex and one diagram per edge required".into(),
            ));
        }
        for o in &objects {
            if o.blocks.iter().any(|b| b.mult > 1) {
                return Err(Error::Unsupported(
                    "gauge networks over objects with multiplicities n_i > 1".into(),
                ));
            }
        }
        let mut stabilizers = Vec::new();
        let mut pullbacks = Vec::new();
        for (e, &(s, t)) in quiver.edges.iter().enumerate() {
            diagrams[e].validate(&objects[s], &objects[t])?;
            stabilizers.push(TorusEmbedding::stabilizer(&objects[s], &objects[t], &diagrams[e]));
            pullbacks.push(TorusEmbedding::pullback(&objects[s], &objects[t], &diagrams[e]));
        }
        Ok(Self {
            quiver,
            objects,
            diagrams,
            stabilizers,
            pullbacks,
        })
    }

    pub fn edge_ranks(&self, e: usize) -> Vec<usize> {
        self.objects[self.quiver.target(e)].sizes()
    }

    /// Admissible labels of edge `e` with all entries in `[-cutoff, cutoff]`.
    pub fn edge_candidates(&self, e: usize, cutoff: i64) -> Result<Vec<Vec<HighestWeight>>> {
        let mut per_block: Vec<Vec<HighestWeight>> = Vec::new();
        for r in self.edge_ranks(e) {
            per_block.push(dominant_weights(r, cutoff));
        }
        let mut out = Vec::new();
        for label in cartesian(&per_block) {
            if repthy::invariant_dim_product(&label, &self.stabilizers[e])? > 0 {
                out.push(label);
            }
        }
        Ok(out)
    }

    pub fn intertwiner_dim(&self, v: usize, weights: &[Vec<HighestWeight>]) -> Result<u64> {
        let incoming: Vec<Vec<HighestWeight>> = self
            .quiver
            .incoming(v)
            .into_iter()
            .map(|e| weights[e].clone())
            .collect();
        let outgoing: Vec<OutgoingLeg> = self
            .quiver
            .outgoing(v)
            .into_iter()
            .map(|e| OutgoingLeg {
                weight: weights[e].clone(),
                stabilizer: self.stabilizers[e].clone(),
                pullback: self.pullbacks[e].clone(),
            })
            .collect();
        repthy::intertwiner_dim(&self.objects[v].sizes(), &incoming, &outgoing)
    }

    /// Validate a labelling and return its intertwiner dimensions.
    pub fn check(&self, weights: &[Vec<HighestWeight>]) -> Result<Vec<u64>> {
        if weights.len() != self.quiver.num_edges() {
            return Err(Error::ShapeMismatch("one label per edge required".into()));
        }
        for (e, w) in weights.iter().enumerate() {
            let ranks: Vec<usize> = w.iter().map(HighestWeight::rank).collect();
            if ranks != self.edge_ranks(e) {
                return Err(Error::RankMismatch(format!(
                    "edge {e} label has ranks {ranks:?}, expected {:?}",
                    self.edge_ranks(e)
                )));
            }
            if repthy::invariant_dim_product(w, &self.stabilizers[e])? == 0 {
                return Err(Error::InvalidInput(format!("edge {e} label has no K-invariants")));
            }
        }
        (0..self.quiver.num_vertices)
            .map(|v| self.intertwiner_dim(v, weights))
            .collect()
    }

    pub fn network(&self, weights: Vec<Vec<HighestWeight>>, index: Vec<u64>) -> Result<GaugeNetwork> {
        let dims = self.check(&weights)?;
        if index.len() != dims.len() || index.iter().zip(&dims).any(|(i, d)| i >= d) {
            return Err(Error::InvalidInput("intertwiner index out of range".into()));
        }
        Ok(GaugeNetwork {
            edges: self.quiver.edges.clone(),
            objects: self.objects.clone(),
            diagrams: self.diagrams.clone(),
            weights,
            intertwiner_dims: dims,
            intertwiner_index: index,
        })
    }
}

fn dominant_weights(rank: usize, cutoff: i64) -> Vec<HighestWeight> {
    fn rec(rank: usize, hi: i64, lo: i64, cur: &mut Vec<i64>, out: &mut Vec<HighestWeight>) {
        if cur.len() == rank {
            out.push(HighestWeight { lambda: cur.clone() });
            return;
        }
        for x in (lo..=hi).rev() {
            cur.push(x);
            rec(rank, x, lo, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(rank, cutoff, -cutoff, &mut Vec::new(), &mut out);
    out.sort();
    out
}

fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for x in list {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// All networks with edge weights bounded by `cutoff`, one per intertwiner
/// basis index, in lexicographic order of labels then indices.
pub fn enumerate_networks(frame: &NetworkFrame, cutoff: i64) -> Result<Vec<GaugeNetwork>> {
    if cutoff < 0 {
        return Err(Error::InvalidInput("cutoff must be nonnegative".into()));
    }
    let candidates = (0..frame.quiver.num_edges())
        .map(|e| frame.edge_candidates(e, cutoff))
        .collect::<Result<Vec<_>>>()?;
    let total: u128 = candidates.iter().map(|c| c.len() as u128).product();
    if total > ENUMERATION_CAP {
        return Err(Error::CapExceeded(format!(
            "{total} edge labellings exceed the cap of {ENUMERATION_CAP}"
        )));
    }
    let mut out = Vec::new();
    for weights in cartesian(&candidates) {
        let dims = (0..frame.quiver.num_vertices)
            .map(|v| frame.intertwiner_dim(v, &weights))
            .collect::<Result<Vec<_>>>()?;
        if dims.contains(&0) {
            continue;
        }
        let ranges: Vec<Vec<u64>> = dims.iter().map(|&d| (0..d).collect()).collect();
        for index in cartesian(&ranges) {
            out.push(GaugeNetwork {
                edges: frame.quiver.edges.clone(),
                objects: frame.objects.clone(),
                diagrams: frame.diagrams.clone(),
                weights: weights.clone(),
                intertwiner_dims: dims.clone(),
                intertwiner_index: index,
            });
        }
    }
    Ok(out)
}

/// Network carrying `weight` around a closed path: forward steps get the
/// weight, reversed steps its dual, and all other edges are trivial.
///
/// Only for frames whose edge groups are a single `U(N)`.
pub fn loop_network(frame: &NetworkFrame, path: &[EdgeRef], weight: &HighestWeight) -> Result<GaugeNetwork> {
    let q = &frame.quiver;
    for w in path.windows(2) {
        if w[0].head(q) != w[1].tail(q) {
            return Err(Error::InvalidInput("path steps do not join".into()));
        }
    }
    if let (Some(first), Some(last)) = (path.first(), path.last()) {
        if last.head(q) != first.tail(q) {
            return Err(Error::InvalidInput("path is not closed".into()));
        }
    }
    let mut weights: Vec<Vec<HighestWeight>> = (0..q.num_edges())
        .map(|e| frame.edge_ranks(e).into_iter().map(HighestWeight::trivial).collect())
        .collect();
    let mut seen = vec![false; q.num_edges()];
    for r in path {
        if std::mem::replace(&mut seen[r.edge], true) {
            return Err(Error::InvalidInput(format!("edge {} used twice", r.edge)));
        }
        if weights[r.edge].len() != 1 || weights[r.edge][0].rank() != weight.rank() {
            return Err(Error::RankMismatch(format!(
                "edge {} does not carry U({})",
                r.edge,
                weight.rank()
            )));
        }
        weights[r.edge][0] = if r.reversed { weight.dual() } else { weight.clone() };
    }
    let index = vec![0; q.num_vertices];
    frame.network(weights, index)
}

/// Eigenvalue of the Casimir Hamiltonian on a basis network.
pub fn hamiltonian_energy(psi: &GaugeNetwork) -> i64 {
    psi.weights.iter().map(|w| casimir_product(w)).sum()
}

/// `exp(i t (E(ψ) − E(ψ′)))`.
pub fn evolution_phase(psi: &GaugeNetwork, psi_prime: &GaugeNetwork, t: f64) -> Complex64 {
    let de = (hamiltonian_energy(psi) - hamiltonian_energy(psi_prime)) as f64;
    Complex64::from_polar(1.0, t * de)
}

/// Block-rank data of a correspondence between two networks on one graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceStub {
    pub source: GaugeNetwork,
    pub target: GaugeNetwork,
    /// Per vertex, ranks of the bimodule between blocks of `A_v` and `A_v′`.
    pub ranks: Vec<Vec<Vec<u64>>>,
}

impl CorrespondenceStub {
    pub fn new(source: GaugeNetwork, target: GaugeNetwork, ranks: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        if source.edges != target.edges {
            return Err(Error::ShapeMismatch("correspondence between different graphs".into()));
        }
        if ranks.len() != source.objects.len() {
            return Err(Error::ShapeMismatch("one rank matrix per vertex required".into()));
        }
        for (v, r) in ranks.iter().enumerate() {
            let (rows, cols) = (source.objects[v].num_blocks(), target.objects[v].num_blocks());
            if r.len() != rows || r.iter().any(|row| row.len() != cols) {
                return Err(Error::ShapeMismatch(format!(
                    "rank matrix at vertex {v} must be {rows}x{cols}"
                )));
            }
        }
        Ok(Self { source, target, ranks })
    }

    /// `A_v` as a bimodule over itself at every vertex.
    pub fn identity(psi: &GaugeNetwork) -> Self {
        let ranks = psi
            .objects
            .iter()
            .map(|o| {
                let k = o.num_blocks();
                (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect()
            })
            .collect();
        Self {
            source: psi.clone(),
            target: psi.clone(),
            ranks,
        }
    }
}

/// `E ⊗_{A′} F`: rank matrices multiply vertex by vertex.
pub fn compose_correspondences(p1: &CorrespondenceStub, p2: &CorrespondenceStub) -> Result<CorrespondenceStub> {
    if p1.target != p2.source {
        return Err(Error::ShapeMismatch("correspondences are not composable".into()));
    }
    let ranks = p1
        .ranks
        .iter()
        .zip(&p2.ranks)
        .map(|(a, b)| {
            let inner = b.len();
            a.iter()
                .map(|row| {
                    (0..b.first().map_or(0, Vec::len))
                        .map(|k| (0..inner).map(|j| row[j] * b[j][k]).sum())
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(CorrespondenceStub {
        source: p1.source.clone(),
        target: p2.target.clone(),
        ranks,
    })
}

/// `(network id, energy)` rows for a spectrum listing.
pub fn spectrum_table(networks: &[GaugeNetwork]) -> BTreeMap<usize, i64> {
    networks
        .iter()
        .enumerate()
        .map(|(i, n)| (i, hamiltonian_energy(n)))
        .collect()
}
