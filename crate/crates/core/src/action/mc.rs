//! Metropolis sampling of link configurations weighted by the Wilson part
//! of the spectral action.
//!
//! The target density is `exp((β/N) Σ_p Re tr U_p) = exp(−(2β/N)·W)` with
//! `W` the Wilson part, so that `β` is the usual lattice coupling: a single
//! `U(1)` plaquette is distributed as `e^{β cos θ}`.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{self, ComplexMatrix, Rng64};
use crate::quiver::{build_lattice, EdgeRef, EmbeddedQuiver, LatticeConfig, QuiverRep};

const TARGET_ACCEPTANCE: (f64, f64) = (0.3, 0.6);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCParams {
    pub d: usize,
    pub size: usize,
    pub periodic: bool,
    pub n: usize,
    pub beta: f64,
    pub thermalization: usize,
    pub sweeps: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub bin_size: usize,
}

impl MCParams {
    /// The open `2×2` lattice in two dimensions, which has one plaquette.
    pub fn single_plaquette(beta: f64, sweeps: usize, seed: u64) -> Self {
        Self {
            d: 2,
            size: 2,
            periodic: false,
            n: 1,
            beta,
            thermalization: 1000,
            sweeps,
            seed,
            epsilon: 1.0,
            bin_size: 100,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidDimension("link rank N must be >= 1".into()));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "beta must be finite and >= 0, got {}",
                self.beta
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "step size must be positive, got {}",
                self.epsilon
            )));
        }
        if self.bin_size == 0 {
            return Err(Error::InvalidInput("bin size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Generator position as a seed, stream and 128-bit word offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: [u8; 32],
    pub stream: u64,
    pub word_pos: String,
}

impl RngState {
    fn capture(rng: &Rng64) -> Self {
        Self {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos().to_string(),
        }
    }

    fn restore(&self) -> Result<Rng64> {
        let pos: u128 = self
            .word_pos
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad generator position {:?}", self.word_pos)))?;
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(pos);
        Ok(rng)
    }
}

/// Serialized sampler state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub params: MCParams,
    pub sweeps_done: usize,
    pub epsilon: f64,
    pub accepted: u64,
    pub proposed: u64,
    pub plaquette_history: Vec<f64>,
    pub action_history: Vec<f64>,
    pub rng: RngState,
    pub config: LatticeConfig,
}

#[derive(Clone, Debug)]
pub struct MCState {
    pub params: MCParams,
    pub eq: EmbeddedQuiver,
    pub links: Vec<ComplexMatrix>,
    pub epsilon: f64,
    pub sweeps_done: usize,
    /// Acceptance counters over measurement sweeps.
    pub accepted: u64,
    pub proposed: u64,
    /// `(1/(N P)) Σ_p Re tr U_p` after each measurement sweep.
    pub plaquette_history: Vec<f64>,
    /// Wilson part after each measurement sweep.
    pub action_history: Vec<f64>,
    rng: Rng64,
    edge_plaquettes: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MCSummary {
    pub beta: f64,
    pub seed: u64,
    pub sweeps: usize,
    pub mean_plaquette: f64,
    pub plaquette_error: f64,
    pub mean_action: f64,
    pub action_error: f64,
    pub acceptance: f64,
    pub epsilon: f64,
}

fn holonomy(links: &[ComplexMatrix], path: &[EdgeRef; 4]) -> ComplexMatrix {
    let step = |r: EdgeRef| {
        if r.reversed {
            links[r.edge].adjoint()
        } else {
            links[r.edge].clone()
        }
    };
    step(path[3]) * step(path[2]) * step(path[1]) * step(path[0])
}

/// Metropolis acceptance for a change `delta` in log density.
pub fn metropolis_accept<R: Rng + ?Sized>(delta: f64, rng: &mut R) -> bool {
    delta >= 0.0 || rng.random::<f64>() < delta.exp()
}

/// `exp(iεX)` with `X` Gaussian in the span of the Hermitian Lie basis.
pub fn random_step<R: Rng + ?Sized>(n: usize, epsilon: f64, rng: &mut R) -> Result<ComplexMatrix> {
    num::expi_hermitian(&num::random_hermitian(n, rng), epsilon)
}

impl MCState {
    /// Cold start: all links set to the identity.
    pub fn new(params: MCParams) -> Result<Self> {
        params.validate()?;
        let eq = build_lattice(params.d, params.size, 1.0, params.periodic)?;
        if eq.plaquettes.is_empty() {
            return Err(Error::InvalidInput("lattice has no plaquettes".into()));
        }
        let links = vec![num::identity(params.n); eq.quiver.num_edges()];
        let rng = num::rng_from_seed(params.seed);
        Ok(Self::assemble(params.clone(), eq, links, rng, params.epsilon))
    }

    fn assemble(params: MCParams, eq: EmbeddedQuiver, links: Vec<ComplexMatrix>, rng: Rng64, epsilon: f64) -> Self {
        let mut edge_plaquettes = vec![Vec::new(); eq.quiver.num_edges()];
        for (k, p) in eq.plaquettes.iter().enumerate() {
            for r in p.path {
                edge_plaquettes[r.edge].push(k);
            }
        }
        Self {
            params,
            eq,
            links,
            epsilon,
            sweeps_done: 0,
            accepted: 0,
            proposed: 0,
            plaquette_history: Vec::new(),
            action_history: Vec::new(),
            rng,
            edge_plaquettes,
        }
    }

    fn local_sum(&self, e: usize) -> f64 {
        self.edge_plaquettes[e]
            .iter()
            .map(|&k| num::trace(&holonomy(&self.links, &self.eq.plaquettes[k].path)).re)
            .sum()
    }

    /// `Σ_p Re tr U_p`.
    pub fn plaquette_sum(&self) -> f64 {
        self.eq
            .plaquettes
            .iter()
            .map(|p| num::trace(&holonomy(&self.links, &p.path)).re)
            .sum()
    }

    pub fn average_plaquette(&self) -> f64 {
        self.plaquette_sum() / (self.params.n * self.eq.plaquettes.len()) as f64
    }

    pub fn wilson_action(&self) -> f64 {
        -0.5 * self.plaquette_sum()
    }

    pub fn is_thermalizing(&self) -> bool {
        self.sweeps_done < self.params.thermalization
    }

    /// One pass over all links; returns the number of accepted proposals.
    fn sweep(&mut self) -> Result<u64> {
        let coupling = self.params.beta / self.params.n as f64;
        let mut accepted = 0;
        for e in 0..self.links.len() {
            let old = self.local_sum(e);
            let step = random_step(self.params.n, self.epsilon, &mut self.rng)?;
            let trial = &step * &self.links[e];
            let previous = std::mem::replace(&mut self.links[e], trial);
            let new = self.local_sum(e);
            if metropolis_accept(coupling * (new - old), &mut self.rng) {
                accepted += 1;
            } else {
                self.links[e] = previous;
            }
        }
        for u in &mut self.links {
            num::reunitarize(u);
        }
        Ok(accepted)
    }

    /// Run until `thermalization + sweeps` sweeps are done, or `limit` more
    /// sweeps, whichever comes first.
    pub fn advance(&mut self, limit: usize) -> Result<()> {
        let total = self.params.thermalization + self.params.sweeps;
        let stop = total.min(self.sweeps_done.saturating_add(limit));
        let per_sweep = self.links.len() as u64;
        while self.sweeps_done < stop {
            let thermalizing = self.is_thermalizing();
            let acc = self.sweep()?;
            if thermalizing {
                let rate = acc as f64 / per_sweep as f64;
                if rate < TARGET_ACCEPTANCE.0 {
                    self.epsilon *= 0.9;
                } else if rate > TARGET_ACCEPTANCE.1 {
                    self.epsilon = (self.epsilon * 1.1).min(std::f64::consts::PI);
                }
            } else {
                self.accepted += acc;
                self.proposed += per_sweep;
                let s = self.plaquette_sum();
                self.plaquette_history
                    .push(s / (self.params.n * self.eq.plaquettes.len()) as f64);
                self.action_history.push(-0.5 * s);
            }
            self.sweeps_done += 1;
        }
        Ok(())
    }

    pub fn run(&mut self) -> Result<()> {
        self.advance(usize::MAX)
    }

    pub fn is_done(&self) -> bool {
        self.sweeps_done >= self.params.thermalization + self.params.sweeps
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.links.iter().map(num::unitarity_defect).fold(0.0, f64::max)
    }

    pub fn rep(&self) -> Result<QuiverRep> {
        QuiverRep::from_links(&self.eq.quiver, self.links.clone())
    }

    pub fn summary(&self) -> Result<MCSummary> {
        let b = self.params.bin_size;
        let (mean_plaquette, plaquette_error) = jackknife(&self.plaquette_history, b)?;
        let (mean_action, action_error) = jackknife(&self.action_history, b)?;
        Ok(MCSummary {
            beta: self.params.beta,
            seed: self.params.seed,
            sweeps: self.plaquette_history.len(),
            mean_plaquette,
            plaquette_error,
            mean_action,
            action_error,
            acceptance: if self.proposed == 0 {
                0.0
            } else {
                self.accepted as f64 / self.proposed as f64
            },
            epsilon: self.epsilon,
        })
    }

    pub fn checkpoint(&self) -> Result<Checkpoint> {
        Ok(Checkpoint {
            params: self.params.clone(),
            sweeps_done: self.sweeps_done,
            epsilon: self.epsilon,
            accepted: self.accepted,
            proposed: self.proposed,
            plaquette_history: self.plaquette_history.clone(),
            action_history: self.action_history.clone(),
            rng: RngState::capture(&self.rng),
            config: LatticeConfig::from_rep(&self.eq, &self.rep()?)?,
        })
    }

    pub fn restore(cp: &Checkpoint) -> Result<Self> {
        cp.params.validate()?;
        let eq = build_lattice(cp.params.d, cp.params.size, 1.0, cp.params.periodic)?;
        if cp.config.d != cp.params.d || cp.config.size != cp.params.size || cp.config.n != cp.params.n {
            return Err(Error::ShapeMismatch(
                "checkpoint configuration does not match its parameters".into(),
            ));
        }
        let rep = cp.config.to_rep(&eq)?;
        let links = rep.morphisms.iter().map(|m| m.l.clone()).collect();
        let mut st = Self::assemble(cp.params.clone(), eq, links, cp.rng.restore()?, cp.epsilon);
        st.sweeps_done = cp.sweeps_done;
        st.accepted = cp.accepted;
        st.proposed = cp.proposed;
        st.plaquette_history = cp.plaquette_history.clone();
        st.action_history = cp.action_history.clone();
        Ok(st)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(&self.checkpoint()?)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cp: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::restore(&cp)
    }
}

/// Thermalize and measure.
pub fn metropolis(params: MCParams) -> Result<MCState> {
    let mut st = MCState::new(params)?;
    st.run()?;
    Ok(st)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainsSummary {
    pub chains: Vec<MCSummary>,
    pub mean_plaquette: f64,
    pub plaquette_error: f64,
}

/// Independent chains with seeds `seed, seed + 1, …`, run in parallel.
pub fn run_chains(params: &MCParams, k: usize) -> Result<ChainsSummary> {
    if k == 0 {
        return Err(Error::InvalidInput("need at least one chain".into()));
    }
    let chains = (0..k as u64)
        .into_par_iter()
        .map(|i| {
            let p = MCParams {
                seed: params.seed.wrapping_add(i),
                ..params.clone()
            };
            metropolis(p)?.summary()
        })
        .collect::<Result<Vec<_>>>()?;
    let kf = k as f64;
    let mean_plaquette = chains.iter().map(|c| c.mean_plaquette).sum::<f64>() / kf;
    let plaquette_error = chains.iter().map(|c| c.plaquette_error.powi(2)).sum::<f64>().sqrt() / kf;
    Ok(ChainsSummary {
        chains,
        mean_plaquette,
        plaquette_error,
    })
}

/// Binned jackknife estimate of the mean and its standard error.
pub fn jackknife(samples: &[f64], bin_size: usize) -> Result<(f64, f64)> {
    if bin_size == 0 {
        return Err(Error::InvalidInput("bin size must be >= 1".into()));
    }
    let nb = samples.len() / bin_size;
    if nb < 2 {
        return Err(Error::InvalidInput(format!(
            "jackknife needs two full bins, have {} samples at bin size {bin_size}",
            samples.len()
        )));
    }
    let bins: Vec<f64> = samples
        .chunks_exact(bin_size)
        .map(|c| c.iter().sum::<f64>() / bin_size as f64)
        .collect();
    let total: f64 = bins.iter().sum();
    let nbf = nb as f64;
    let leave_out: Vec<f64> = bins.iter().map(|b| (total - b) / (nbf - 1.0)).collect();
    let mean = leave_out.iter().sum::<f64>() / nbf;
    let var = leave_out.iter().map(|x| (x - mean).powi(2)).sum::<f64>() * (nbf - 1.0) / nbf;
    Ok((total / nbf, var.sqrt()))
}

/// A single `U(1)` link `e^{iθ}` sampled from `exp(−κθ²)`, `θ ∈ (−π, π]`,
/// with the same proposal and acceptance rule as the lattice sampler.
/// Returns the angle after each step.
pub fn single_link_chain(kappa: f64, epsilon: f64, steps: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = num::rng_from_seed(seed);
    let log_density = |t: f64| -kappa * t * t;
    let mut u = num::identity(1);
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let proposal = random_step(1, epsilon, &mut rng)? * &u;
        let (t0, t1) = (u[(0, 0)].arg(), proposal[(0, 0)].arg());
        if metropolis_accept(log_density(t1) - log_density(t0), &mut rng) {
            u = proposal;
        }
        out.push(u[(0, 0)].arg());
    }
    Ok(out)
}
