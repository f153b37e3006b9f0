use std::collections::BTreeMap;

use gaugenet::action::continuum::{self, Fixture};
use gaugenet::action::mc::{run_chains, MCParams, MCState};
use gaugenet::action::{self as sa, exact_for, ks_magnetic, randomize_higgs, spectral_action_closed, vacuum_action};
use gaugenet::dirac;
use gaugenet::finalg::{automorphisms, enumerate_bratteli, enumerate_unital, hom_descriptor, AlgebraObject};
use gaugenet::network::{enumerate_networks, hamiltonian_energy, loop_network, GaugeNetwork, NetworkFrame};
use gaugenet::num::{self, clifford, rng_from_seed, TOL_RECONSTRUCTION};
use gaugenet::quiver::{build_lattice, EmbeddedQuiver, LatticeConfig, Quiver, QuiverRep};
use gaugenet::repthy::{
    self, casimir, casimir_explicit, decompose, explicit, invariant_character, invariant_dim, tensor_decompose,
    weight_multiplicities, weyl_dim, HighestWeight, TorusEmbedding,
};
use gaugenet::{Error, Result};
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{csv, fixed, pairs, sci, table, Output};

fn weight(s: &Option<String>, name: &str) -> Result<HighestWeight> {
    HighestWeight::new(parse_list(&required(s, name)?, name)?)
}

fn algebra(sizes: &str, hilbert: Option<&str>, name: &str) -> Result<AlgebraObject> {
    let sizes: Vec<usize> = parse_list(sizes, name)?;
    let dims: Vec<usize> = match hilbert {
        Some(h) => parse_list(h, name)?,
        None => sizes.clone(),
    };
    if dims.len() != sizes.len() {
        return Err(Error::InvalidInput(format!(
            "{name}: {} Hilbert dimensions for {} blocks",
            dims.len(),
            sizes.len()
        )));
    }
    let mults = sizes
        .iter()
        .zip(&dims)
        .map(|(&n, &h)| {
            if n == 0 || h % n != 0 {
                Err(Error::InvalidInput(format!(
                    "{name}: Hilbert dimension {h} is not a multiple of block size {n}"
                )))
            } else {
                Ok(h / n)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraObject::from_sizes(&sizes, &mults)
}

fn pair(a: &AlgebraPair) -> Result<(AlgebraObject, AlgebraObject)> {
    Ok((
        algebra(&required(&a.a1, "a1")?, a.h1.as_deref(), "a1")?,
        algebra(&required(&a.a2, "a2")?, a.h2.as_deref(), "a2")?,
    ))
}

fn matrix_string(d: &[Vec<usize>]) -> String {
    let rows: Vec<String> = d
        .iter()
        .map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

pub fn brat(a: &AlgebraPair) -> Result<Output> {
    let (a1, a2) = pair(a)?;
    let unital = enumerate_unital(&a1, &a2);
    let admissible = enumerate_bratteli(&a1, &a2);
    let listed: Vec<_> = if a.all { unital.clone() } else { admissible.clone() };
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for (k, b) in listed.iter().enumerate() {
        let ok = admissible.contains(b);
        rows.push(vec![
            k.to_string(),
            matrix_string(&b.d),
            ok.to_string(),
            format!("{:?}", b.kernel_cols),
        ]);
        items.push(json!({ "d": b.d, "kernel_cols": b.kernel_cols, "admissible": ok }));
    }
    let text = format!(
        "{} admissible of {} unital\n{}",
        admissible.len(),
        unital.len(),
        table(&["index", "d", "admissible", "kernel_cols"], &rows)
    );
    Ok(Output::new(
        json!({ "unital": unital.len(), "admissible": admissible.len(), "diagrams": items }),
        text,
    ))
}

pub fn hom(a: &AlgebraPair) -> Result<Output> {
    let (a1, a2) = pair(a)?;
    let entries = hom_descriptor(&a1, &a2);
    let (g1, g2) = (automorphisms(&a1), automorphisms(&a2));
    let rows: Vec<Vec<String>> = entries
        .iter()
        .enumerate()
        .map(|(k, e)| {
            vec![
                k.to_string(),
                matrix_string(&e.diagram.d),
                e.aut_dim.to_string(),
                e.kernel_orbit_dim.to_string(),
                e.effective_dim.to_string(),
                e.central_redundancy.to_string(),
            ]
        })
        .collect();
    let text = format!(
        "Aut(A1) = {}\nAut(A2) = {}\n{}",
        g1.describe(),
        g2.describe(),
        table(
            &[
                "index",
                "d",
                "aut_dim",
                "kernel_orbit",
                "effective_dim",
                "central_redundancy"
            ],
            &rows
        )
    );
    Ok(Output::new(
        json!({
            "aut_source": { "structure": g1, "description": g1.describe() },
            "aut_target": { "structure": g2, "description": g2.describe() },
            "entries": entries,
        }),
        text,
    ))
}

fn weight_json(w: &HighestWeight) -> Value {
    json!(w.lambda)
}

pub fn rep(cmd: &RepCommand, config: Option<&std::path::Path>) -> Result<(Value, Output)> {
    match cmd {
        RepCommand::Dim(a) => {
            let a = resolve(a.clone(), config)?;
            let w = weight(&a.weight, "weight")?;
            let dim = weyl_dim(&w);
            Ok((
                serde_json::to_value(&a)?,
                Output::new(json!({ "weight": weight_json(&w), "dim": dim }), format!("{dim}\n")),
            ))
        }
        RepCommand::Weights(a) => {
            let a = resolve(a.clone(), config)?;
            let w = weight(&a.weight, "weight")?;
            let ch = weight_multiplicities(&w)?;
            let mults = &ch.mults;
            let rows: Vec<Vec<String>> = mults
                .iter()
                .rev()
                .map(|(mu, m)| vec![fmt_weight(mu), m.to_string()])
                .collect();
            let items: Vec<Value> = mults
                .iter()
                .rev()
                .map(|(mu, m)| json!({ "weight": mu, "multiplicity": m }))
                .collect();
            Ok((
                serde_json::to_value(&a)?,
                Output::new(
                    json!({ "weight": weight_json(&w), "dim": ch.dim(), "weights": items }),
                    format!("dim {}\n{}", ch.dim(), table(&["weight", "multiplicity"], &rows)),
                ),
            ))
        }
        RepCommand::Tensor(a) => {
            let a = resolve(a.clone(), config)?;
            let w1 = weight(&a.weight, "weight")?;
            let w2 = weight(&a.other, "with")?;
            let parts = tensor_decompose(&w1, &w2)?;
            let rows: Vec<Vec<String>> = parts
                .iter()
                .rev()
                .map(|(w, m)| vec![w.to_string(), m.to_string(), weyl_dim(w).to_string()])
                .collect();
            let items: Vec<Value> = parts
                .iter()
                .rev()
                .map(|(w, m)| json!({ "weight": weight_json(w), "multiplicity": m, "dim": weyl_dim(w) }))
                .collect();
            Ok((
                serde_json::to_value(&a)?,
                Output::new(
                    json!({ "parts": items }),
                    table(&["weight", "multiplicity", "dim"], &rows),
                ),
            ))
        }
        RepCommand::Casimir(a) => {
            let a = resolve(a.clone(), config)?;
            let w = weight(&a.weight, "weight")?;
            let c = casimir(&w);
            let mut items = vec![("casimir", c.to_string())];
            let mut result = json!({ "weight": weight_json(&w), "casimir": c });
            if let Some((images, skip)) = explicit_images(&w) {
                let vals = casimir_explicit(&images)?;
                let spread = vals[skip..].iter().map(|v| (v - c as f64).abs()).fold(0.0, f64::max);
                items.push(("explicit_max_deviation", sci(spread)));
                result["explicit_max_deviation"] = json!(spread);
            }
            Ok((serde_json::to_value(&a)?, Output::new(result, pairs(&items))))
        }
        RepCommand::Invariant(a) => {
            let a = resolve(a.clone(), config)?;
            let w = weight(&a.weight, "weight")?;
            let k = embedding(&required(&a.fixed, "fixed")?, w.rank())?;
            let dim = invariant_dim(&w, &k)?;
            let mut items = vec![("invariant_dim", dim.to_string())];
            let mut result = json!({ "weight": weight_json(&w), "invariant_dim": dim });
            if let Some(h) = &a.residual {
                let h = embedding(h, w.rank())?;
                let ch = invariant_character(std::slice::from_ref(&w), &k, &h)?;
                let parts = decompose(&ch)?;
                let desc: Vec<String> = parts
                    .iter()
                    .map(|(ws, m)| {
                        let name: Vec<String> = ws.iter().map(ToString::to_string).collect();
                        format!("{m} x {}", name.join("⊗"))
                    })
                    .collect();
                items.push(("residual", desc.join(" + ")));
                let json_parts: Vec<Value> = parts
                    .iter()
                    .map(|(ws, m)| json!({ "weights": ws.iter().map(weight_json).collect::<Vec<_>>(), "multiplicity": m }))
                    .collect();
                result["residual"] = json!(json_parts);
            }
            Ok((serde_json::to_value(&a)?, Output::new(result, pairs(&items))))
        }
    }
}

fn fmt_weight(mu: &[i64]) -> String {
    format!("({})", mu.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

/// Explicit Lie-algebra images when the weight is one of the built-in
/// representations, with the number of lowest eigenvalues belonging to
/// other summands (the centre of `u(N)` inside the adjoint).
fn explicit_images(w: &HighestWeight) -> Option<(Vec<num::ComplexMatrix>, usize)> {
    let n = w.rank();
    let is = |v: &[i64]| w.lambda == v;
    let mut defining = vec![0; n];
    defining[0] = 1;
    let mut adjoint = defining.clone();
    adjoint[n - 1] -= 1;
    if w.is_trivial() {
        Some((explicit::trivial(n), 0))
    } else if is(&defining) {
        Some((explicit::defining(n), 0))
    } else if is(&HighestWeight { lambda: defining }.dual().lambda) {
        Some((explicit::dual(n), 0))
    } else if n > 1 && is(&adjoint) {
        Some((explicit::adjoint(n), 1))
    } else {
        None
    }
}

fn embedding(s: &str, target_rank: usize) -> Result<TorusEmbedding> {
    let map = parse_rows(s, "torus map")?;
    TorusEmbedding::new(vec![map.len()], vec![target_rank], map)
}

fn graph_frame(g: &GraphArgs) -> Result<NetworkFrame> {
    let q = match g.graph.as_str() {
        "theta" => Quiver::new(2, vec![(0, 1), (0, 1)])?,
        "cycle" => {
            if g.len == 0 {
                return Err(Error::InvalidInput("a cycle needs at least one edge".into()));
            }
            Quiver::new(g.len, (0..g.len).map(|v| (v, (v + 1) % g.len)).collect())?
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown graph {other:?}; use theta or cycle"
            )))
        }
    };
    lattice_frame(q, g.n)
}

/// `M_N` on `ℂ^N` at every vertex, joined by the identity diagram.
fn lattice_frame(q: Quiver, n: usize) -> Result<NetworkFrame> {
    let a = AlgebraObject::matrix(n)?;
    let b = enumerate_bratteli(&a, &a)
        .into_iter()
        .next()
        .ok_or_else(|| Error::InternalConsistency("no diagram M_N -> M_N".into()))?;
    let objects = vec![a; q.num_vertices];
    let diagrams = vec![b; q.num_edges()];
    NetworkFrame::new(q, objects, diagrams)
}

fn labels(n: &GaugeNetwork) -> String {
    n.weights
        .iter()
        .map(|ws| ws.iter().map(ToString::to_string).collect::<Vec<_>>().join("⊗"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn basis(g: &GraphArgs) -> Result<Output> {
    let frame = graph_frame(g)?;
    let nets = enumerate_networks(&frame, g.cutoff)?;
    let rows: Vec<Vec<String>> = nets
        .iter()
        .enumerate()
        .map(|(k, n)| {
            vec![
                k.to_string(),
                labels(n),
                format!("{:?}", n.intertwiner_index),
                format!("{:?}", n.intertwiner_dims),
                hamiltonian_energy(n).to_string(),
            ]
        })
        .collect();
    let items: Vec<Value> = nets
        .iter()
        .map(|n| {
            json!({
                "weights": n.weights.iter().map(|ws| ws.iter().map(weight_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "intertwiner_dims": n.intertwiner_dims,
                "intertwiner_index": n.intertwiner_index,
                "energy": hamiltonian_energy(n),
            })
        })
        .collect();
    Ok(Output::new(
        json!({ "count": nets.len(), "networks": items }),
        format!(
            "{} networks\n{}",
            nets.len(),
            table(
                &["index", "edge labels", "intertwiner", "intertwiner_dims", "energy"],
                &rows
            )
        ),
    ))
}

pub fn hamiltonian(g: &GraphArgs) -> Result<Output> {
    let frame = graph_frame(g)?;
    let nets = enumerate_networks(&frame, g.cutoff)?;
    let mut levels: BTreeMap<i64, usize> = BTreeMap::new();
    for n in &nets {
        *levels.entry(hamiltonian_energy(n)).or_default() += 1;
    }
    let rows: Vec<Vec<String>> = levels.iter().map(|(e, c)| vec![e.to_string(), c.to_string()]).collect();
    let items: Vec<Value> = levels
        .iter()
        .map(|(e, c)| json!({ "energy": e, "degeneracy": c }))
        .collect();
    Ok(Output::new(
        json!({ "states": nets.len(), "levels": items }),
        table(&["energy", "degeneracy"], &rows),
    ))
}

/// Lattice, links and Clifford set for the lattice commands.
fn lattice_setup(a: &LatticeArgs, seed: Option<u64>) -> Result<(EmbeddedQuiver, QuiverRep)> {
    if let Some(path) = &a.links {
        let cfg = LatticeConfig::load(path)?;
        let eq = cfg.lattice()?;
        let rep = cfg.to_rep(&eq)?;
        return Ok((eq, rep));
    }
    let eq = build_lattice(a.d, a.size, a.l, !a.open)?;
    let rep = match seed {
        Some(s) => QuiverRep::haar_links(&eq.quiver, a.n, &mut rng_from_seed(s))?,
        None => QuiverRep::identity_links(&eq.quiver, a.n)?,
    };
    Ok((eq, rep))
}

pub fn dirac_spectrum(a: &DiracArgs) -> Result<Output> {
    let (eq, rep) = lattice_setup(&a.lattice, a.seed)?;
    let cs = clifford(eq.dim)?;
    let ld = dirac::assemble(&eq, &rep, &cs)?;
    let vals = dirac::spectrum(&ld)?;
    let rows: Vec<Vec<String>> = vals
        .iter()
        .enumerate()
        .map(|(k, v)| vec![k.to_string(), v.to_string()])
        .collect();
    Ok(Output::new(
        json!({ "dim": ld.dim(), "eigenvalues": vals }),
        csv(&["index", "eigenvalue"], &rows),
    ))
}

pub fn action_compare(a: &ActionArgs) -> Result<Output> {
    let seed = if a.lattice.links.is_some() {
        a.seed
    } else {
        Some(required(&a.seed, "seed")?)
    };
    let (eq, mut rep) = lattice_setup(&a.lattice, seed)?;
    let cs = clifford(eq.dim)?;
    if a.higgs < 0.0 || !a.higgs.is_finite() {
        return Err(Error::InvalidInput(format!("--higgs must be >= 0, got {}", a.higgs)));
    }
    if a.higgs > 0.0 {
        if cs.grading.is_none() {
            return Err(Error::Unsupported(format!(
                "Higgs blocks need a grading; d = {} is odd",
                eq.dim
            )));
        }
        let mut rng = rng_from_seed(seed.unwrap_or(0).wrapping_add(1));
        randomize_higgs(&mut rep, a.higgs, &mut rng)?;
    }
    let closed = spectral_action_closed(&eq, &rep, &cs)?;
    let exact = exact_for(&eq, &rep, &cs)?;
    let delta = (closed.total - exact.normalized).abs();
    let items = [
        ("exact_normalized", fixed(exact.normalized)),
        ("exact_unnormalized", fixed(exact.unnormalized)),
        ("closed_total", fixed(closed.total)),
        ("delta", sci(delta)),
        ("wilson_part", fixed(closed.wilson_part)),
        ("higgs_hopping", fixed(closed.higgs_hopping)),
        ("higgs_mass", fixed(closed.higgs_mass)),
        ("higgs_quartic", fixed(closed.higgs_quartic)),
        ("constant_part", fixed(closed.constant_part)),
        ("winding_part", fixed(closed.winding_part)),
    ];
    let mut out = Output::new(
        json!({ "breakdown": closed, "exact": exact, "delta": delta, "operator_dim": rep.total_hilbert_dim() * cs.spinor_dim() }),
        pairs(&items),
    );
    if delta >= TOL_RECONSTRUCTION {
        out.violation = Some(format!("closed form and dense trace differ by {delta:e}"));
    }
    Ok(out)
}

pub fn continuum(a: &ContinuumArgs) -> Result<Output> {
    let fixture = match a.fixture.as_str() {
        "gauge" => Fixture::abelian_gauge(),
        "higgs" => Fixture::higgs_only(),
        "coupled" => Fixture::default(),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown fixture {other:?}; use gauge, higgs or coupled"
            )))
        }
    };
    if a.levels < 1 {
        return Err(Error::InvalidInput("--levels must be >= 1".into()));
    }
    let sizes = continuum::ladder(a.d, a.levels);
    if sizes.len() < a.levels {
        return Err(Error::InvalidInput(format!(
            "d = {} supports at most {} levels",
            a.d,
            sizes.len()
        )));
    }
    let study = continuum::continuum_study(a.d, &sizes, &fixture)?;
    let order_of = |size: usize, sector: &str| {
        study
            .orders
            .iter()
            .find(|o| o.to_size == size && o.sector == sector)
            .and_then(|o| o.order)
    };
    let rows: Vec<Vec<String>> = study
        .rows
        .iter()
        .map(|r| {
            vec![
                r.size.to_string(),
                r.spacing.to_string(),
                r.sector.clone(),
                r.lattice.to_string(),
                r.continuum.to_string(),
                r.rel_error.to_string(),
                order_of(r.size, &r.sector).map(|o| o.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    Ok(Output::new(
        serde_json::to_value(&study)?,
        csv(
            &["L", "l", "sector", "lattice", "continuum", "rel_error", "order"],
            &rows,
        ),
    ))
}

fn mc_params(a: &McArgs) -> Result<MCParams> {
    let (beta, sweeps, seed) = (
        required(&a.beta, "beta")?,
        required(&a.sweeps, "sweeps")?,
        required(&a.seed, "seed")?,
    );
    let mut p = if a.single_plaquette {
        MCParams::single_plaquette(beta, sweeps, seed)
    } else {
        MCParams {
            d: a.d,
            size: a.size,
            periodic: !a.open,
            n: a.n,
            beta,
            thermalization: 0,
            sweeps,
            seed,
            epsilon: a.epsilon,
            bin_size: a.bin,
        }
    };
    p.thermalization = a.therm;
    p.epsilon = a.epsilon;
    p.bin_size = a.bin;
    Ok(p)
}

/// Returns the effective sampler parameters for the config echo.
pub fn mc(a: &McArgs) -> Result<(Value, Output)> {
    if a.every == 0 {
        return Err(Error::InvalidInput("--every must be >= 1".into()));
    }
    if a.chains > 1 {
        if a.resume.is_some() || a.checkpoint.is_some() || a.stop_after.is_some() {
            return Err(Error::InvalidInput(
                "--chains cannot be combined with checkpointing".into(),
            ));
        }
        let p = mc_params(a)?;
        let s = run_chains(&p, a.chains)?;
        let rows: Vec<Vec<String>> = s
            .chains
            .iter()
            .enumerate()
            .map(|(k, c)| {
                vec![
                    k.to_string(),
                    c.seed.to_string(),
                    c.mean_plaquette.to_string(),
                    c.plaquette_error.to_string(),
                    c.acceptance.to_string(),
                ]
            })
            .collect();
        let text = csv(
            &["chain", "seed", "mean_plaquette", "plaquette_error", "acceptance"],
            &rows,
        ) + &format!("# combined plaquette = {} +- {}\n", s.mean_plaquette, s.plaquette_error);
        return Ok((serde_json::to_value(&p)?, Output::new(serde_json::to_value(&s)?, text)));
    }

    let mut st = match &a.resume {
        Some(path) => MCState::load(path)?,
        None => MCState::new(mc_params(a)?)?,
    };
    st.advance(a.stop_after.unwrap_or(usize::MAX))?;
    if let Some(path) = &a.checkpoint {
        st.save(path)?;
    }
    let defect = st.unitarity_defect();
    let first = st.params.thermalization;
    let rows: Vec<Vec<String>> = st
        .plaquette_history
        .iter()
        .zip(&st.action_history)
        .enumerate()
        .filter(|(k, _)| (k + 1) % a.every == 0)
        .map(|(k, (p, s))| vec![(first + k + 1).to_string(), p.to_string(), s.to_string()])
        .collect();
    let mut text = csv(&["sweep", "plaquette", "action"], &rows);
    let mut result = json!({
        "sweeps_done": st.sweeps_done,
        "done": st.is_done(),
        "unitarity_defect": defect,
        "plaquette": st.plaquette_history.iter().skip(a.every - 1).step_by(a.every).collect::<Vec<_>>(),
    });
    text.push_str(&format!("# sweeps_done = {}\n", st.sweeps_done));
    if st.plaquette_history.len() >= 2 * st.params.bin_size {
        let s = st.summary()?;
        text.push_str(&format!(
            "# plaquette = {} +- {}\n# action = {} +- {}\n# acceptance = {}\n# epsilon = {}\n",
            s.mean_plaquette, s.plaquette_error, s.mean_action, s.action_error, s.acceptance, s.epsilon
        ));
        result["summary"] = serde_json::to_value(&s)?;
    }
    let mut out = Output::new(result, text);
    if defect > 1e-10 {
        out.violation = Some(format!("links drifted from unitarity by {defect:e}"));
    }
    Ok((serde_json::to_value(&st.params)?, out))
}

pub fn ks(a: &KsArgs) -> Result<Output> {
    let seed = required(&a.seed, "seed")?;
    if a.configs < 2 {
        return Err(Error::InvalidInput("--configs must be >= 2".into()));
    }
    let eq = build_lattice(3, a.size, a.l, true)?;
    let cs = clifford(3)?;
    let mut rng = rng_from_seed(seed);
    let reps = (0..a.configs)
        .map(|_| QuiverRep::haar_links(&eq.quiver, a.n, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let vac = vacuum_action(&eq, a.n, &cs)?;
    let constant = vac.constant_part + vac.winding_part;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, r) in reps.iter().enumerate() {
        let magnetic = ks_magnetic(r, &eq)?;
        let exact = exact_for(&eq, r, &cs)?.normalized;
        let predicted = -0.25 * magnetic + constant;
        let delta = (exact - predicted).abs();
        worst = worst.max(delta);
        rows.push(vec![
            k.to_string(),
            fixed(magnetic),
            fixed(exact),
            fixed(predicted),
            sci(delta),
        ]);
        items.push(json!({ "magnetic": magnetic, "exact": exact, "predicted": predicted, "delta": delta }));
    }
    let fit = sa::ks_fit(&eq, &reps, &cs)?;

    let w = match &a.weight {
        Some(s) => HighestWeight::new(parse_list(s, "weight")?)?,
        None => {
            let mut v = vec![0; a.n];
            v[0] = 1;
            HighestWeight::new(v)?
        }
    };
    let frame = lattice_frame(eq.quiver.clone(), a.n)?;
    let psi = loop_network(&frame, &eq.plaquettes[0].path, &w)?;
    let electric = hamiltonian_energy(&psi) as f64;
    let energy = sa::ks_energy(electric, exact_for(&eq, &reps[0], &cs)?.normalized);
    let loop_casimir = repthy::casimir(&w);

    let text = format!(
        "{}\n{}",
        table(&["config", "magnetic", "exact", "predicted", "delta"], &rows),
        pairs(&[
            ("constant", fixed(constant)),
            ("max_delta", sci(worst)),
            ("fit_slope", fixed(fit.slope)),
            ("fit_intercept", fixed(fit.intercept)),
            ("loop_weight", w.to_string()),
            ("loop_electric", fixed(energy.electric)),
            ("config0_action", fixed(energy.magnetic)),
            ("H_KS", fixed(energy.total)),
        ])
    );
    let mut out = Output::new(
        json!({
            "configs": items,
            "constant": constant,
            "max_delta": worst,
            "fit": { "slope": fit.slope, "intercept": fit.intercept, "max_residual": fit.max_residual },
            "loop": { "weight": weight_json(&w), "casimir": loop_casimir, "edges": eq.plaquettes[0].path.len() },
            "energy": energy,
        }),
        text,
    );
    if worst >= TOL_RECONSTRUCTION {
        out.violation = Some(format!("plaquette form misses the exact action by {worst:e}"));
    }
    Ok(out)
}
