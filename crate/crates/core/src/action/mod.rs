//! The quartic spectral action on a lattice, its closed form, and the
//! related Wilson, fermionic and Kogut–Susskind functionals.
//!
//! Throughout, `S = (l⁴ / dim S) · Tr D⁴` (spinor trace normalized). Writing
//! `D = H + M` with `H` the hopping part and `M = γ ⊗ D_v` the vertex part,
//! terms with an odd number of `H` factors vanish under the spinor trace and
//!
//! ```text
//! Tr D⁴ = Tr H⁴ + 4 Tr H²M² + 2 Tr HMHM + Tr M⁴.
//! ```
//!
//! `Tr H⁴` is a sum over closed walks of length four. Plaquette boundaries
//! give the Wilson term, walks whose edge word cancels freely give the
//! configuration-independent constant, and whatever remains (only on tori
//! with `L = 2` or `L = 4`) is reported as the winding part.

pub mod continuum;
pub mod mc;

use std::collections::HashSet;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::dirac::{assemble, edge_gammas, LatticeDirac, DENSE_CAP};
use crate::error::{Error, Result};
use crate::num::{self, CliffordSet, ComplexMatrix};
use crate::quiver::{plaquette_holonomy, EdgeRef, EmbeddedQuiver, QuiverRep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `Tr_S / dim S`.
    NormalizedSpinorTrace,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionBreakdown {
    pub total: f64,
    pub wilson_part: f64,
    pub higgs_hopping: f64,
    pub higgs_mass: f64,
    pub higgs_quartic: f64,
    pub constant_part: f64,
    /// Non-contractible walks that are not plaquettes; zero unless `L ∈ {2, 4}`.
    pub winding_part: f64,
    pub normalization: Normalization,
}

impl ActionBreakdown {
    pub fn parts_sum(&self) -> f64 {
        self.wilson_part
            + self.higgs_hopping
            + self.higgs_mass
            + self.higgs_quartic
            + self.constant_part
            + self.winding_part
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExactAction {
    /// `(l⁴ / dim S) Tr D⁴`.
    pub normalized: f64,
    /// `l⁴ Tr D⁴`.
    pub unnormalized: f64,
}

/// Dense evaluation through `Tr D⁴ = ‖D²‖_F²`.
pub fn spectral_action_exact(ld: &LatticeDirac, l: f64) -> Result<ExactAction> {
    if ld.dim() > DENSE_CAP {
        return Err(Error::CapExceeded(format!(
            "operator dimension {} > {DENSE_CAP}",
            ld.dim()
        )));
    }
    let d2 = num::matmul(&ld.matrix, &ld.matrix);
    let tr4: f64 = d2.iter().map(|z| z.norm_sqr()).sum();
    let unnormalized = l.powi(4) * tr4;
    Ok(ExactAction {
        normalized: unnormalized / ld.spinor_dim as f64,
        unnormalized,
    })
}

fn lattice_spacing(eq: &EmbeddedQuiver) -> Result<f64> {
    let spec = eq.spec()?;
    if spec.size < 2 {
        return Err(Error::Unsupported("spectral action needs L >= 2".into()));
    }
    Ok(spec.l)
}

/// `Σ_p (tr U_p + tr U_p†) = 2 Σ_p Re tr U_p`.
pub fn plaquette_trace_sum(rep: &QuiverRep, eq: &EmbeddedQuiver) -> Result<f64> {
    let mut s = 0.0;
    for p in &eq.plaquettes {
        s += 2.0 * num::trace(&plaquette_holonomy(rep, p)?).re;
    }
    Ok(s)
}

/// `−¼ Σ_p (tr U_p + tr U_p†)`.
pub fn wilson_action(rep: &QuiverRep, eq: &EmbeddedQuiver) -> Result<f64> {
    Ok(-0.25 * plaquette_trace_sum(rep, eq)?)
}

/// Steps available at each vertex: `(edge ref, head vertex)`.
fn steps(eq: &EmbeddedQuiver) -> Vec<Vec<(EdgeRef, usize)>> {
    let q = &eq.quiver;
    let mut out = vec![Vec::new(); q.num_vertices];
    for (e, &(s, t)) in q.edges.iter().enumerate() {
        out[s].push((EdgeRef::forward(e), t));
        out[t].push((EdgeRef::backward(e), s));
    }
    out
}

fn reduces_to_identity(word: &[EdgeRef]) -> bool {
    let mut stack: Vec<EdgeRef> = Vec::with_capacity(word.len());
    for &r in word {
        if stack.last() == Some(&r.inverse()) {
            stack.pop();
        } else {
            stack.push(r);
        }
    }
    // The word is closed, so a cyclic cancellation between its ends counts too.
    while stack.len() >= 2 && stack[0] == stack[stack.len() - 1].inverse() {
        stack.pop();
        stack.remove(0);
    }
    stack.is_empty()
}

fn plaquette_walks(eq: &EmbeddedQuiver) -> HashSet<[EdgeRef; 4]> {
    let mut set = HashSet::new();
    for p in &eq.plaquettes {
        let fwd = p.path;
        let rev = [fwd[3].inverse(), fwd[2].inverse(), fwd[1].inverse(), fwd[0].inverse()];
        for w in [fwd, rev] {
            for k in 0..4 {
                set.insert([w[k], w[(k + 1) % 4], w[(k + 2) % 4], w[(k + 3) % 4]]);
            }
        }
    }
    set
}

/// The terms of the action that only involve plaquettes, vertices and
/// single edges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalParts {
    pub wilson_part: f64,
    pub higgs_hopping: f64,
    pub higgs_mass: f64,
    pub higgs_quartic: f64,
}

pub fn local_parts(eq: &EmbeddedQuiver, rep: &QuiverRep) -> Result<LocalParts> {
    let l = lattice_spacing(eq)?;
    let wilson_part = wilson_action(rep, eq)?;

    let mut higgs_quartic = 0.0;
    for dv in &rep.dirac {
        let d2 = dv * dv;
        higgs_quartic += num::trace(&(&d2 * &d2)).re;
    }
    higgs_quartic *= l.powi(4);

    let mut higgs_mass = 0.0;
    let mut higgs_hopping = 0.0;
    for (e, &(s, t)) in eq.quiver.edges.iter().enumerate() {
        let (ds, dt) = (&rep.dirac[s], &rep.dirac[t]);
        higgs_mass += num::trace(&(ds * ds)).re + num::trace(&(dt * dt)).re;
        let le = &rep.morphisms[e].l;
        higgs_hopping -= num::trace(&(le.adjoint() * dt * le * ds)).re;
    }
    Ok(LocalParts {
        wilson_part,
        higgs_hopping: higgs_hopping * l * l,
        higgs_mass: higgs_mass * l * l,
        higgs_quartic,
    })
}

/// Term-by-term evaluation of the quartic action.
pub fn spectral_action_closed(eq: &EmbeddedQuiver, rep: &QuiverRep, cs: &CliffordSet) -> Result<ActionBreakdown> {
    let l = lattice_spacing(eq)?;
    let q = &eq.quiver;
    if rep.has_dirac() && cs.grading.is_none() {
        return Err(Error::Unsupported(
            "vertex Dirac blocks need a grading, which odd dimensions lack".into(),
        ));
    }
    let gam = edge_gammas(eq, cs)?;
    let dim_s = cs.spinor_dim() as f64;
    let norm = l.powi(4) / dim_s;

    let LocalParts {
        wilson_part,
        higgs_hopping,
        higgs_mass,
        higgs_quartic,
    } = local_parts(eq, rep)?;

    let star = steps(eq);
    let plaq = plaquette_walks(eq);
    let step_gamma = |r: EdgeRef| gam.get(r);
    let step_factor = |r: EdgeRef| 1.0 / (2.0 * eq.lengths[r.edge]);

    let mut constant_part = 0.0;
    let mut winding_part = 0.0;
    for v in 0..q.num_vertices {
        let hv = rep.objects[v].hilbert_dim() as f64;
        for &(r1, x1) in &star[v] {
            for &(r2, x2) in &star[x1] {
                for &(r3, x3) in &star[x2] {
                    for &(r4, x4) in &star[x3] {
                        if x4 != v {
                            continue;
                        }
                        let word = [r1, r2, r3, r4];
                        if plaq.contains(&word) {
                            continue;
                        }
                        let f = step_factor(r1) * step_factor(r2) * step_factor(r3) * step_factor(r4);
                        let g = step_gamma(r4) * step_gamma(r3) * step_gamma(r2) * step_gamma(r1);
                        let gs = num::trace(&g);
                        if reduces_to_identity(&word) {
                            constant_part += norm * f * gs.re * hv;
                        } else {
                            let w = rep.link(r4) * rep.link(r3) * rep.link(r2) * rep.link(r1);
                            winding_part += norm * f * (gs * num::trace(&w)).re;
                        }
                    }
                }
            }
        }
    }

    if rep.has_dirac() {
        let grading = cs.grading.as_ref().expect("checked above");
        for v in 0..q.num_vertices {
            let dv = &rep.dirac[v];
            let dv2 = dv * dv;
            for &(r1, x1) in &star[v] {
                for &(r2, x2) in &star[x1] {
                    if x2 != v || r2 == r1.inverse() {
                        continue;
                    }
                    let f = step_factor(r1) * step_factor(r2);
                    let (g1, g2) = (step_gamma(r1), step_gamma(r2));
                    let (l1, l2) = (rep.link(r1), rep.link(r2));
                    let hhmm = num::trace(&(&g2 * &g1)) * num::trace(&(&l2 * &l1 * &dv2));
                    let hmhm =
                        num::trace(&(&g2 * grading * &g1 * grading)) * num::trace(&(&l2 * &rep.dirac[x1] * &l1 * dv));
                    winding_part += norm * f * (4.0 * hhmm + 2.0 * hmhm).re;
                }
            }
        }
    }

    let mut out = ActionBreakdown {
        total: 0.0,
        wilson_part,
        higgs_hopping,
        higgs_mass,
        higgs_quartic,
        constant_part,
        winding_part,
        normalization: Normalization::NormalizedSpinorTrace,
    };
    out.total = out.parts_sum();
    Ok(out)
}

/// Convenience: assemble and evaluate the dense trace.
pub fn exact_for(eq: &EmbeddedQuiver, rep: &QuiverRep, cs: &CliffordSet) -> Result<ExactAction> {
    let l = lattice_spacing(eq)?;
    spectral_action_exact(&assemble(eq, rep, cs)?, l)
}

/// `⟨ψ, Dψ⟩`.
pub fn fermionic_action(ld: &LatticeDirac, psi: &DVector<Complex64>) -> Result<Complex64> {
    let dpsi = crate::dirac::apply(ld, psi)?;
    Ok(psi.dotc(&dpsi))
}

/// Magnetic Kogut–Susskind term: the plaquette sum `Σ_p (tr U_p + tr U_p†)`
/// on a three-dimensional spin-network configuration.
pub fn ks_magnetic(rep: &QuiverRep, eq: &EmbeddedQuiver) -> Result<f64> {
    if eq.dim != 3 {
        return Err(Error::Unsupported(format!(
            "Kogut–Susskind magnetic term is three-dimensional, got d = {}",
            eq.dim
        )));
    }
    if rep.has_dirac() {
        return Err(Error::Unsupported("Kogut–Susskind setting requires D_v = 0".into()));
    }
    if rep.spin_network_rank().is_none() {
        return Err(Error::Unsupported(
            "Kogut–Susskind setting requires (M_n, C^n) objects".into(),
        ));
    }
    plaquette_trace_sum(rep, eq)
}

/// Affine relation `exact = slope · magnetic + intercept` fitted over
/// configurations, with the worst residual of the fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Fit the exact normalized action against the magnetic term.
pub fn ks_fit(eq: &EmbeddedQuiver, reps: &[QuiverRep], cs: &CliffordSet) -> Result<KsFit> {
    if reps.len() < 2 {
        return Err(Error::InvalidInput("a fit needs at least two configurations".into()));
    }
    let samples = reps
        .iter()
        .map(|r| Ok((ks_magnetic(r, eq)?, exact_for(eq, r, cs)?.normalized)))
        .collect::<Result<Vec<_>>>()?;
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("configurations share one magnetic value".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = samples
        .iter()
        .map(|s| (s.1 - slope * s.0 - intercept).abs())
        .fold(0.0, f64::max);
    Ok(KsFit {
        slope,
        intercept,
        max_residual,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsEnergy {
    pub electric: f64,
    pub magnetic: f64,
    pub total: f64,
}

/// `ℍ_KS = ℍ + tr f(D)`: a network's Casimir energy plus the spectral action
/// of a configuration.
pub fn ks_energy(electric: f64, magnetic: f64) -> KsEnergy {
    KsEnergy {
        electric,
        magnetic,
        total: electric + magnetic,
    }
}

/// Identity-link value of the quartic action on the same lattice and objects.
pub fn vacuum_action(eq: &EmbeddedQuiver, n: usize, cs: &CliffordSet) -> Result<ActionBreakdown> {
    spectral_action_closed(eq, &QuiverRep::identity_links(&eq.quiver, n)?, cs)
}

/// Random Hermitian `D_v` on every vertex, scaled by `scale`.
pub fn randomize_higgs<R: rand::Rng + ?Sized>(rep: &mut QuiverRep, scale: f64, rng: &mut R) -> Result<()> {
    for v in 0..rep.objects.len() {
        let h = rep.objects[v].hilbert_dim();
        let d: ComplexMatrix = num::random_hermitian(h, rng) * Complex64::new(scale, 0.0);
        rep.set_dirac(v, d)?;
    }
    Ok(())
}
