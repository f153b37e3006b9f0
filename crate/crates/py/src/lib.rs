//! Python bindings. Structured results are returned as plain dicts and lists.

use gaugenet::action::continuum::{continuum_study as study, Fixture};
use gaugenet::action::mc::{metropolis as run_metropolis, MCParams};
use gaugenet::action::{self, exact_for, randomize_higgs, spectral_action_closed};
use gaugenet::finalg::{enumerate_bratteli, enumerate_unital, AlgebraObject};
use gaugenet::num::{clifford, rng_from_seed};
use gaugenet::quiver::{build_lattice, EmbeddedQuiver, LatticeConfig, QuiverRep};
use gaugenet::{dirac, repthy, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err(e: Error) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (_, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py, T: serde::Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(x).map_err(json_err)?)
}

fn highest(weight: Vec<i64>) -> PyResult<repthy::HighestWeight> {
    repthy::HighestWeight::new(weight).map_err(err)
}

/// Dimension of the irreducible `U(N)` representation with this highest weight.
#[pyfunction]
fn weyl_dim(weight: Vec<i64>) -> PyResult<u128> {
    Ok(repthy::weyl_dim(&highest(weight)?))
}

#[pyfunction]
fn casimir(weight: Vec<i64>) -> PyResult<i64> {
    Ok(repthy::casimir(&highest(weight)?))
}

/// `[(weight, multiplicity), ...]` in decreasing order.
#[pyfunction]
fn tensor_decompose(a: Vec<i64>, b: Vec<i64>) -> PyResult<Vec<(Vec<i64>, u64)>> {
    let parts = repthy::tensor_decompose(&highest(a)?, &highest(b)?).map_err(err)?;
    Ok(parts.into_iter().rev().map(|(w, m)| (w.lambda, m)).collect())
}

/// Invariants under the subgroup whose maximal torus maps in by `fixed`
/// (one row per subgroup coordinate).
#[pyfunction]
fn invariant_dim(weight: Vec<i64>, fixed: Vec<Vec<i64>>) -> PyResult<u64> {
    let w = highest(weight)?;
    let k = repthy::TorusEmbedding::new(vec![fixed.len()], vec![w.rank()], fixed).map_err(err)?;
    repthy::invariant_dim(&w, &k).map_err(err)
}

/// Bratteli matrices `d[i][j]` from `(sizes, mults)` to `(sizes, mults)`.
#[pyfunction]
#[pyo3(signature = (source, target, unital_only = false))]
fn bratteli(
    source: (Vec<usize>, Vec<usize>),
    target: (Vec<usize>, Vec<usize>),
    unital_only: bool,
) -> PyResult<Vec<Vec<Vec<usize>>>> {
    let a1 = AlgebraObject::from_sizes(&source.0, &source.1).map_err(err)?;
    let a2 = AlgebraObject::from_sizes(&target.0, &target.1).map_err(err)?;
    let ds = if unital_only {
        enumerate_unital(&a1, &a2)
    } else {
        enumerate_bratteli(&a1, &a2)
    };
    Ok(ds.into_iter().map(|b| b.d).collect())
}

/// Hypercubic lattice with spacing `l`.
#[pyclass(module = "gaugenet_py")]
struct Lattice {
    eq: EmbeddedQuiver,
    periodic: bool,
}

#[pymethods]
impl Lattice {
    #[new]
    #[pyo3(signature = (d, size, l = 1.0, periodic = true))]
    fn new(d: usize, size: usize, l: f64, periodic: bool) -> PyResult<Self> {
        Ok(Self {
            eq: build_lattice(d, size, l, periodic).map_err(err)?,
            periodic,
        })
    }

    #[getter]
    fn d(&self) -> usize {
        self.eq.dim
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.eq.quiver.num_vertices
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.eq.quiver.num_edges()
    }

    #[getter]
    fn num_plaquettes(&self) -> usize {
        self.eq.plaquettes.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Lattice(d={}, vertices={}, periodic={})",
            self.eq.dim,
            self.eq.quiver.num_vertices,
            if self.periodic { "True" } else { "False" }
        )
    }
}

/// Links and Higgs blocks on a lattice.
#[pyclass(module = "gaugenet_py")]
struct Configuration {
    eq: EmbeddedQuiver,
    rep: QuiverRep,
}

#[pymethods]
impl Configuration {
    #[staticmethod]
    fn identity(lattice: &Lattice, n: usize) -> PyResult<Self> {
        Ok(Self {
            eq: lattice.eq.clone(),
            rep: QuiverRep::identity_links(&lattice.eq.quiver, n).map_err(err)?,
        })
    }

    /// Haar-random `U(n)` links.
    #[staticmethod]
    fn haar(lattice: &Lattice, n: usize, seed: u64) -> PyResult<Self> {
        let rep = QuiverRep::haar_links(&lattice.eq.quiver, n, &mut rng_from_seed(seed)).map_err(err)?;
        Ok(Self {
            eq: lattice.eq.clone(),
            rep,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let cfg = LatticeConfig::load(path.as_ref()).map_err(err)?;
        let eq = cfg.lattice().map_err(err)?;
        let rep = cfg.to_rep(&eq).map_err(err)?;
        Ok(Self { eq, rep })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        LatticeConfig::from_rep(&self.eq, &self.rep)
            .and_then(|c| c.save(path.as_ref()))
            .map_err(err)
    }

    /// Random Hermitian Higgs block of the given scale at every vertex.
    fn randomize_higgs(&mut self, scale: f64, seed: u64) -> PyResult<()> {
        randomize_higgs(&mut self.rep, scale, &mut rng_from_seed(seed)).map_err(err)
    }

    fn dirac_spectrum(&self) -> PyResult<Vec<f64>> {
        let cs = clifford(self.eq.dim).map_err(err)?;
        let ld = dirac::assemble(&self.eq, &self.rep, &cs).map_err(err)?;
        dirac::spectrum(&ld).map_err(err)
    }

    /// Closed-form breakdown of the quartic spectral action.
    fn spectral_action<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let cs = clifford(self.eq.dim).map_err(err)?;
        serialize(py, &spectral_action_closed(&self.eq, &self.rep, &cs).map_err(err)?)
    }

    /// `(normalized, unnormalized)` dense trace.
    fn exact_action(&self) -> PyResult<(f64, f64)> {
        let cs = clifford(self.eq.dim).map_err(err)?;
        let e = exact_for(&self.eq, &self.rep, &cs).map_err(err)?;
        Ok((e.normalized, e.unnormalized))
    }

    fn wilson_action(&self) -> PyResult<f64> {
        action::wilson_action(&self.rep, &self.eq).map_err(err)
    }
}

/// Lattice against continuum values of a smooth fixture: `gauge`, `higgs` or `coupled`.
#[pyfunction]
#[pyo3(signature = (d, sizes, fixture = "gauge"))]
fn continuum_study<'py>(py: Python<'py>, d: usize, sizes: Vec<usize>, fixture: &str) -> PyResult<Bound<'py, PyAny>> {
    let fx = match fixture {
        "gauge" => Fixture::abelian_gauge(),
        "higgs" => Fixture::higgs_only(),
        "coupled" => Fixture::default(),
        other => return Err(PyValueError::new_err(format!("unknown fixture {other:?}"))),
    };
    serialize(py, &study(d, &sizes, &fx).map_err(err)?)
}

/// Metropolis run on the single open plaquette, or on a periodic `size^d` lattice.
#[pyfunction]
#[pyo3(signature = (beta, sweeps, seed, d = 2, size = 2, n = 1, single_plaquette = true, thermalization = 1000))]
#[allow(clippy::too_many_arguments)]
fn metropolis<'py>(
    py: Python<'py>,
    beta: f64,
    sweeps: usize,
    seed: u64,
    d: usize,
    size: usize,
    n: usize,
    single_plaquette: bool,
    thermalization: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let mut p = MCParams::single_plaquette(beta, sweeps, seed);
    if !single_plaquette {
        p.d = d;
        p.size = size;
        p.n = n;
        p.periodic = true;
    }
    p.thermalization = thermalization;
    let summary = py
        .detach(|| run_metropolis(p).and_then(|st| st.summary()))
        .map_err(err)?;
    serialize(py, &summary)
}

#[pymodule]
fn gaugenet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(weyl_dim, m)?)?;
    m.add_function(wrap_pyfunction!(casimir, m)?)?;
    m.add_function(wrap_pyfunction!(tensor_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(invariant_dim, m)?)?;
    m.add_function(wrap_pyfunction!(bratteli, m)?)?;
    m.add_function(wrap_pyfunction!(continuum_study, m)?)?;
    m.add_function(wrap_pyfunction!(metropolis, m)?)?;
    m.add_class::<Lattice>()?;
    m.add_class::<Configuration>()?;
    Ok(())
}
