use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gaugenet::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "gaugenet", version, about = "Gauge networks and lattice spectral actions")]
pub struct Cli {
    /// Emit `{command, config, result}` as JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// JSON object whose keys override the command's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bratteli diagrams between two finite spectral triples.
    Brat(AlgebraPair),
    /// Hom-set descriptors and automorphism groups.
    Hom(AlgebraPair),
    /// Representation theory of U(N).
    #[command(subcommand)]
    Rep(RepCommand),
    /// Gauge-network basis states up to a weight cutoff.
    Basis(GraphArgs),
    /// Casimir energy levels of the gauge-network basis.
    Hamiltonian(GraphArgs),
    /// Lattice Dirac operator.
    #[command(subcommand)]
    Dirac(DiracCommand),
    /// Spectral action on a lattice.
    #[command(subcommand)]
    Action(ActionCommand),
    /// Lattice action against continuum integrals on refined lattices.
    Continuum(ContinuumArgs),
    /// Metropolis sampling of the Wilson action.
    Mc(McArgs),
    /// Kogut–Susskind decomposition in three dimensions.
    Ks(KsArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraPair {
    /// Block sizes of the source algebra, e.g. "1,2".
    #[arg(long)]
    pub a1: Option<String>,
    /// Block sizes of the target algebra.
    #[arg(long)]
    pub a2: Option<String>,
    /// Hilbert dimension carried by each source block; defaults to the block sizes.
    #[arg(long)]
    pub h1: Option<String>,
    /// Hilbert dimension carried by each target block.
    #[arg(long)]
    pub h2: Option<String>,
    /// Also list unital diagrams that fail Hilbert compatibility.
    #[arg(long)]
    #[serde(default)]
    pub all: bool,
}

#[derive(Subcommand, Debug)]
pub enum RepCommand {
    /// Weyl dimension.
    Dim(WeightArgs),
    /// Weight multiplicities.
    Weights(WeightArgs),
    /// Tensor product decomposition.
    Tensor(TensorArgs),
    /// Quadratic Casimir.
    Casimir(WeightArgs),
    /// Invariants under a subgroup and the residual character.
    Invariant(InvariantArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct WeightArgs {
    /// Non-increasing highest weight, e.g. "1,0,0,-1".
    #[arg(long, allow_hyphen_values = true)]
    pub weight: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct TensorArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub weight: Option<String>,
    /// Second factor.
    #[arg(long = "with", allow_hyphen_values = true)]
    #[serde(rename = "with")]
    pub other: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct InvariantArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub weight: Option<String>,
    /// Torus map of the fixed subgroup: one row per source coordinate, "1,1,0,0;0,0,1,1".
    #[arg(long, allow_hyphen_values = true)]
    pub fixed: Option<String>,
    /// Torus map of the residual subgroup, same format.
    #[arg(long, allow_hyphen_values = true)]
    pub residual: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GraphArgs {
    /// `theta` (two vertices, two parallel edges) or `cycle`.
    #[arg(long, default_value = "theta")]
    pub graph: String,
    /// Number of edges of a cycle.
    #[arg(long, default_value_t = 3)]
    pub len: usize,
    /// Rank of the matrix algebra at every vertex.
    #[arg(long = "N", default_value_t = 1)]
    #[serde(rename = "N")]
    pub n: usize,
    /// Largest absolute weight entry per edge.
    #[arg(long, default_value_t = 2)]
    pub cutoff: i64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct LatticeArgs {
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long = "L", default_value_t = 3)]
    #[serde(rename = "L")]
    pub size: usize,
    /// Lattice spacing.
    #[arg(long, default_value_t = 1.0)]
    pub l: f64,
    /// Shorthand for `d,L,l`.
    #[arg(long)]
    pub lattice: Option<String>,
    /// Open boundary instead of a torus.
    #[arg(long)]
    #[serde(default)]
    pub open: bool,
    #[arg(long = "N", default_value_t = 1)]
    #[serde(rename = "N")]
    pub n: usize,
    /// Link configuration file; replaces the lattice and link flags.
    #[arg(long)]
    pub links: Option<PathBuf>,
}

impl LatticeArgs {
    /// Fold `--lattice` into `d`, `L` and `l`.
    pub fn normalize(&mut self) -> Result<()> {
        if let Some(s) = self.lattice.take() {
            let parts: Vec<&str> = s.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::InvalidInput(format!("--lattice expects d,L,l, got {s:?}")));
            }
            self.d = parse_num(parts[0], "d")?;
            self.size = parse_num(parts[1], "L")?;
            self.l = parse_num(parts[2], "l")?;
        }
        Ok(())
    }
}

#[derive(Subcommand, Debug)]
pub enum DiracCommand {
    /// Eigenvalues of the lattice Dirac operator as CSV.
    Spectrum(DiracArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct DiracArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    /// Haar-random links from this seed; identity links when absent.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum ActionCommand {
    /// Closed form against the dense trace.
    Compare(ActionArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ActionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scale of random Higgs blocks; 0 disables them.
    #[arg(long, default_value_t = 0.0)]
    pub higgs: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ContinuumArgs {
    /// 2 or 4.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Number of refinement levels.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// `gauge`, `higgs` or `coupled`.
    #[arg(long, default_value = "gauge")]
    pub fixture: String,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct McArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    /// Measurement sweeps.
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub therm: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long = "L", default_value_t = 4)]
    #[serde(rename = "L")]
    pub size: usize,
    #[arg(long = "N", default_value_t = 1)]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long)]
    #[serde(default)]
    pub open: bool,
    /// The open 2x2 lattice in two dimensions with U(1) links.
    #[arg(long)]
    #[serde(default)]
    pub single_plaquette: bool,
    /// Initial proposal width.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Jackknife bin size.
    #[arg(long, default_value_t = 100)]
    pub bin: usize,
    /// Print every k-th measurement.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// Write the final state here.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Continue from a checkpoint; its parameters replace the flags.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Stop after this many sweeps in this invocation.
    #[arg(long)]
    pub stop_after: Option<usize>,
    /// Independent chains with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct KsArgs {
    #[arg(long = "L", default_value_t = 3)]
    #[serde(rename = "L")]
    pub size: usize,
    #[arg(long = "N", default_value_t = 2)]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub l: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random configurations.
    #[arg(long, default_value_t = 20)]
    pub configs: usize,
    /// Weight of the electric loop around the first plaquette; defaults to the defining representation.
    #[arg(long, allow_hyphen_values = true)]
    pub weight: Option<String>,
}

/// Overlay the keys of a JSON config file onto parsed flags.
pub fn resolve<T: Serialize + DeserializeOwned>(args: T, config: Option<&Path>) -> Result<T> {
    let Some(path) = config else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(path)?;
    let overrides: Value = serde_json::from_str(&text)?;
    let Value::Object(overrides) = overrides else {
        return Err(Error::InvalidInput(format!("{} is not a JSON object", path.display())));
    };
    let Value::Object(mut base) = serde_json::to_value(&args)? else {
        return Err(Error::InternalConsistency(
            "arguments did not serialize to an object".into(),
        ));
    };
    for (k, v) in overrides {
        if !base.contains_key(&k) {
            return Err(Error::InvalidInput(format!("unknown config key {k:?}")));
        }
        base.insert(k, v);
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| Error::InvalidInput(format!("config: {e}")))
}

pub fn required<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::InvalidInput(format!("--{name} is required")))
}

pub fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("cannot parse {what} from {s:?}")))
}

pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| parse_num(x, what)).collect()
}

/// Rows separated by `;`, entries by `,`.
pub fn parse_rows(s: &str, what: &str) -> Result<Vec<Vec<i64>>> {
    s.split(';').map(|r| parse_list(r, what)).collect()
}
