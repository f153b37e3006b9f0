//! Lattice Dirac operators on `S ⊗ ⊕_v H_v`.
//!
//! Vector index order is `(vertex, spinor, colour)`. For a forward edge
//! `e: s → t` the `(t, s)` block is `(1/2l_e) γ_e ⊗ L_e` and the `(s, t)`
//! block is `(1/2l_e) γ_ē ⊗ L_e†` with `γ_ē = γ_e†`; the diagonal block at
//! `v` is `γ ⊗ D_v` with `γ` the grading. The spin holonomy is trivial.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::num::{self, CliffordSet, ComplexMatrix, I};
use crate::quiver::{EdgeRef, EmbeddedQuiver, QuiverRep};

/// Largest operator dimension assembled or diagonalized densely.
pub const DENSE_CAP: usize = 4096;

#[derive(Clone, Debug)]
pub struct EdgeGamma {
    /// `γ_e` for every forward edge.
    pub gammas: Vec<ComplexMatrix>,
}

impl EdgeGamma {
    pub fn get(&self, r: EdgeRef) -> ComplexMatrix {
        let g = &self.gammas[r.edge];
        if r.reversed {
            g.adjoint()
        } else {
            g.clone()
        }
    }
}

/// Dual frame `θ^e` at each vertex and `γ_e = i c(θ^e)`.
///
/// With `X = Σ_i u_i u_iᵀ` over the outgoing unit directions at a vertex,
/// `θ^{e_i} = X⁺ u_i`, so that `Σ_i θ^{e_i} u_iᵀ` is the identity on their
/// span. A star that does not span `ℝᵈ` is an error except on hypercubic
/// lattices, where open boundaries leave partial axis stars.
pub fn edge_gammas(eq: &EmbeddedQuiver, cs: &CliffordSet) -> Result<EdgeGamma> {
    if cs.dim != eq.dim {
        return Err(Error::ShapeMismatch(format!(
            "Clifford set of dimension {} on a {}-dimensional embedding",
            cs.dim, eq.dim
        )));
    }
    let d = eq.dim;
    let mut theta: Vec<Vec<f64>> = vec![Vec::new(); eq.quiver.num_edges()];
    for v in 0..eq.quiver.num_vertices {
        let out = eq.quiver.outgoing(v);
        if out.is_empty() {
            continue;
        }
        let mut frame = DMatrix::<f64>::zeros(d, d);
        for &e in &out {
            let u = DVector::from_column_slice(&eq.directions[e]);
            frame += &u * u.transpose();
        }
        let svd = frame.svd(true, true);
        let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10).count();
        if rank < d && eq.lattice.is_none() {
            return Err(Error::RankDeficient(v));
        }
        let pinv = svd.pseudo_inverse(1e-10).map_err(|_| Error::RankDeficient(v))?;
        for &e in &out {
            let th = &pinv * DVector::from_column_slice(&eq.directions[e]);
            theta[e] = th.iter().copied().collect();
        }
    }
    let s = cs.spinor_dim();
    let gammas = theta
        .iter()
        .map(|th| {
            th.iter()
                .enumerate()
                .fold(num::zeros(s, s), |acc, (mu, &x)| acc + cs.generator(mu) * (I * x))
        })
        .collect();
    Ok(EdgeGamma { gammas })
}

#[derive(Clone, Debug)]
pub struct LatticeDirac {
    pub matrix: ComplexMatrix,
    pub spinor_dim: usize,
    /// Start of each vertex block.
    pub offsets: Vec<usize>,
    pub vertex_dims: Vec<usize>,
}

impl LatticeDirac {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `U(g) = ⊕_v 1_S ⊗ λ_v(g_v)` in this operator's index layout.
    pub fn block_unitary(&self, per_vertex: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        if per_vertex.len() != self.offsets.len() {
            return Err(Error::ShapeMismatch("one unitary per vertex required".into()));
        }
        let mut u = num::zeros(self.dim(), self.dim());
        for (v, g) in per_vertex.iter().enumerate() {
            let blk = num::kron(&num::identity(self.spinor_dim), g);
            let off = self.offsets[v];
            u.view_mut((off, off), (blk.nrows(), blk.ncols())).copy_from(&blk);
        }
        Ok(u)
    }
}

pub fn assemble(eq: &EmbeddedQuiver, rep: &QuiverRep, cs: &CliffordSet) -> Result<LatticeDirac> {
    let q = &eq.quiver;
    if rep.objects.len() != q.num_vertices || rep.morphisms.len() != q.num_edges() {
        return Err(Error::ShapeMismatch("representation does not fit the quiver".into()));
    }
    let grading = match (&cs.grading, rep.has_dirac()) {
        (_, false) => None,
        (Some(g), true) => Some(g),
        (None, true) => {
            return Err(Error::Unsupported(
                "vertex Dirac blocks need a grading, which odd dimensions lack".into(),
            ))
        }
    };
    let gam = edge_gammas(eq, cs)?;
    let s = cs.spinor_dim();
    let vertex_dims: Vec<usize> = rep.objects.iter().map(|o| o.hilbert_dim()).collect();
    let mut offsets = Vec::with_capacity(vertex_dims.len());
    let mut total = 0;
    for &h in &vertex_dims {
        offsets.push(total);
        total += s * h;
    }
    if total > DENSE_CAP {
        return Err(Error::CapExceeded(format!("operator dimension {total} > {DENSE_CAP}")));
    }
    let mut m = num::zeros(total, total);
    for (e, &(src, tgt)) in q.edges.iter().enumerate() {
        let l = &rep.morphisms[e].l;
        if l.shape() != (vertex_dims[tgt], vertex_dims[src]) {
            return Err(Error::ShapeMismatch(format!("L on edge {e} has the wrong shape")));
        }
        let c = Complex64::new(1.0 / (2.0 * eq.lengths[e]), 0.0);
        let fwd = num::kron(&gam.gammas[e], l) * c;
        let (ro, co) = (offsets[tgt], offsets[src]);
        let mut view = m.view_mut((ro, co), fwd.shape());
        view += &fwd;
        let bwd = fwd.adjoint();
        let mut view = m.view_mut((co, ro), bwd.shape());
        view += &bwd;
    }
    if let Some(g) = grading {
        for (v, dv) in rep.dirac.iter().enumerate() {
            let blk = num::kron(g, dv);
            let mut view = m.view_mut((offsets[v], offsets[v]), blk.shape());
            view += &blk;
        }
    }
    if !num::is_hermitian(&m, num::TOL_HERMITIAN) {
        return Err(Error::InternalConsistency(
            "assembled Dirac operator is not Hermitian".into(),
        ));
    }
    Ok(LatticeDirac {
        matrix: m,
        spinor_dim: s,
        offsets,
        vertex_dims,
    })
}

pub fn apply(ld: &LatticeDirac, psi: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    if psi.len() != ld.dim() {
        return Err(Error::ShapeMismatch(format!(
            "vector of length {} for an operator of dimension {}",
            psi.len(),
            ld.dim()
        )));
    }
    Ok(&ld.matrix * psi)
}

pub fn spectrum(ld: &LatticeDirac) -> Result<Vec<f64>> {
    if ld.dim() > DENSE_CAP {
        return Err(Error::CapExceeded(format!(
            "spectrum of dimension {} > {DENSE_CAP}",
            ld.dim()
        )));
    }
    num::eigvals_hermitian(&ld.matrix)
}
