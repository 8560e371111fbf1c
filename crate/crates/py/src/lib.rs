//! Python bindings: `Hypergraph` and `Pattern` classes plus the main
//! operations (densities, exponents, copy counting, balanced families,
//! exact Turán numbers). Structured reports cross the boundary as plain
//! dicts/lists via JSON.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use supersat::enumerate;
use supersat::family::{
    self, parse_cutoff, verify_certificate, BetaMode, BuildOptions, CopyFamily,
};
use supersat::hypergraph::Hypergraph;
use supersat::pattern::{self, parse_rational};
use supersat::turan;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Converts any serializable report into Python objects through JSON.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Hypergraph", frozen, from_py_object)]
#[derive(Clone)]
struct PyHypergraph {
    inner: Hypergraph,
}

#[pymethods]
impl PyHypergraph {
    #[new]
    #[pyo3(signature = (n, edges, r = 2))]
    fn new(n: usize, edges: Vec<Vec<usize>>, r: usize) -> PyResult<Self> {
        Ok(Self { inner: Hypergraph::build(n, r, edges).map_err(err)?.0 })
    }

    #[staticmethod]
    fn cycle(m: usize) -> PyResult<Self> {
        Ok(Self { inner: Hypergraph::cycle(m).map_err(err)? })
    }

    #[staticmethod]
    fn path(m: usize) -> PyResult<Self> {
        Ok(Self { inner: Hypergraph::path(m).map_err(err)? })
    }

    #[staticmethod]
    fn complete(n: usize) -> PyResult<Self> {
        Ok(Self { inner: Hypergraph::complete_graph(n).map_err(err)? })
    }

    #[staticmethod]
    fn complete_bipartite(a: usize, b: usize) -> PyResult<Self> {
        Ok(Self { inner: Hypergraph::complete_bipartite(a, b).map_err(err)? })
    }

    #[staticmethod]
    fn cube() -> PyResult<Self> {
        Ok(Self { inner: Hypergraph::cube().map_err(err)? })
    }

    /// Seeded G(n, p) sample.
    #[staticmethod]
    #[pyo3(signature = (n, p, seed, r = 2))]
    fn gnp(n: usize, p: f64, seed: u64, r: usize) -> PyResult<Self> {
        Ok(Self { inner: Hypergraph::gnp_sample(n, p, r, seed).map_err(err)? })
    }

    /// Parses the edge-list text format (`n m r` header, one edge per line).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: Hypergraph::parse_text(text).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<Vec<usize>> {
        self.inner.edges().to_vec()
    }

    fn to_text(&self) -> String {
        self.inner.serialize_text()
    }

    fn induced_subgraph(&self, vertices: Vec<usize>) -> PyResult<Self> {
        Ok(Self { inner: self.inner.induced_subgraph(&vertices).map_err(err)? })
    }

    fn uniform_vertex_subset(&self, w: usize, seed: u64) -> PyResult<Vec<usize>> {
        self.inner.uniform_vertex_subset(w, seed).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Hypergraph(n={}, m={}, r={})",
            self.inner.n(),
            self.inner.edge_count(),
            self.inner.r()
        )
    }
}

#[pyclass(name = "Pattern", frozen, from_py_object)]
#[derive(Clone)]
struct PyPattern {
    inner: pattern::Pattern,
}

#[pymethods]
impl PyPattern {
    #[new]
    fn new(graph: PyHypergraph) -> PyResult<Self> {
        Ok(Self { inner: pattern::Pattern::new(graph.inner).map_err(err)? })
    }

    #[getter]
    fn h(&self) -> usize {
        self.inner.h()
    }

    #[getter]
    fn l(&self) -> usize {
        self.inner.ell()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    #[getter]
    fn is_r_partite(&self) -> bool {
        self.inner.is_r_partite()
    }

    /// Density report: m_r, m*_r (as rational strings), strict balance,
    /// and the witnesses.
    fn densities<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = pattern::compute_densities(&self.inner).map_err(err)?;
        to_py(py, &report)
    }

    /// Exponent set at the given alpha (rational string) and host scale.
    #[pyo3(signature = (alpha, k = 1.0, n = 100))]
    fn exponents<'py>(
        &self,
        py: Python<'py>,
        alpha: &str,
        k: f64,
        n: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let alpha = parse_rational(alpha).map_err(err)?;
        let report = pattern::compute_densities(&self.inner).map_err(err)?;
        let exps =
            pattern::compute_exponents(&report, &self.inner, &alpha, k, n).map_err(err)?;
        to_py(py, &exps)
    }

    fn __repr__(&self) -> String {
        format!(
            "Pattern(h={}, l={}, r={})",
            self.inner.h(),
            self.inner.ell(),
            self.inner.r()
        )
    }
}

#[pyfunction]
fn count_copies(host: &PyHypergraph, pattern: &PyPattern) -> PyResult<usize> {
    enumerate::count_copies(&host.inner, &pattern.inner).map_err(err)
}

/// (embeddings, automorphisms) of the pattern in the host.
#[pyfunction]
fn embedding_count(host: &PyHypergraph, pattern: &PyPattern) -> PyResult<(usize, usize)> {
    let ec = enumerate::embedding_count(&host.inner, &pattern.inner).map_err(err)?;
    Ok((ec.embeddings, ec.automorphisms))
}

/// Copies as sorted lists of host edge indices, in canonical order.
#[pyfunction]
#[pyo3(signature = (host, pattern, limit = None))]
fn enumerate_copies(
    host: &PyHypergraph,
    pattern: &PyPattern,
    limit: Option<usize>,
) -> PyResult<Vec<Vec<usize>>> {
    let copies = enumerate::enumerate_copies(&host.inner, &pattern.inner, limit, &[])
        .map_err(err)?;
    Ok(copies.into_iter().map(|c| c.edge_set.indices().to_vec()).collect())
}

/// Exact extremal number with a witness edge list.
#[pyfunction]
#[pyo3(signature = (n, pattern, budget = None))]
fn ex_exact(
    n: usize,
    pattern: &PyPattern,
    budget: Option<u64>,
) -> PyResult<(usize, Vec<Vec<usize>>)> {
    let record = turan::ex_exact(n, &pattern.inner, budget).map_err(err)?;
    Ok((record.ex_value, record.witness))
}

/// Maximum pattern-free edge count of the host: (value, kind).
#[pyfunction]
#[pyo3(signature = (host, pattern, mode = "exact", copy_budget = None))]
fn ex_random_subgraph(
    host: &PyHypergraph,
    pattern: &PyPattern,
    mode: &str,
    copy_budget: Option<usize>,
) -> PyResult<(usize, String)> {
    let mode = match mode {
        "exact" => turan::MeasureMode::Exact,
        "greedy" => turan::MeasureMode::Greedy,
        other => return Err(PyValueError::new_err(format!("mode must be exact or greedy, got {other}"))),
    };
    let res = turan::ex_random_subgraph(&host.inner, &pattern.inner, mode, copy_budget)
        .map_err(err)?;
    let kind = match res.kind {
        turan::MeasuredKind::Exact => "exact",
        turan::MeasuredKind::GreedyLowerBound => "greedy_lower_bound",
    };
    Ok((res.value, kind.to_string()))
}

/// Builds a balanced family and returns a dict with the family, build
/// report, certificate, and replay audit.
#[pyfunction]
#[pyo3(signature = (
    host, pattern, alpha, beta_mode = "thm1", n_target = None, c = 1.0,
    delta_prime = 1.0, cutoff = "l-1"
))]
#[allow(clippy::too_many_arguments)]
fn build_family<'py>(
    py: Python<'py>,
    host: &PyHypergraph,
    pattern: &PyPattern,
    alpha: &str,
    beta_mode: &str,
    n_target: Option<usize>,
    c: f64,
    delta_prime: f64,
    cutoff: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let alpha = parse_rational(alpha).map_err(err)?;
    let beta_mode = match beta_mode {
        "thm1" => BetaMode::Thm1,
        "thm2" => BetaMode::Thm2,
        other => BetaMode::Explicit(
            other
                .parse::<f64>()
                .map_err(|_| PyValueError::new_err(format!("bad beta_mode `{other}`")))?,
        ),
    };
    let options = BuildOptions {
        k_override: None,
        n_target,
        c,
        delta_prime,
        beta_mode,
        cutoff: parse_cutoff(cutoff).map_err(err)?,
    };
    let (fam, report) =
        family::build_balanced_family(&host.inner, &pattern.inner, &alpha, &options)
            .map_err(err)?;
    let certificate = verify_certificate(&fam);
    let audit = family::replay_audit(&fam);
    let bundle = serde_json::json!({
        "family": fam,
        "report": report,
        "certificate": certificate,
        "replay_audit": audit,
    });
    to_py(py, &bundle)
}

/// Re-verifies a bundle dict produced by `build_family`; returns the fresh
/// certificate plus an overall `verified` flag.
#[pyfunction]
fn verify_family<'py>(py: Python<'py>, bundle: Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let text: String = py
        .import("json")?
        .call_method1("dumps", (bundle,))?
        .extract()?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(err)?;
    let fam = value
        .get("family")
        .ok_or_else(|| PyValueError::new_err("bundle has no `family` field"))?;
    let mut fam: CopyFamily = serde_json::from_value(fam.clone()).map_err(err)?;
    fam.rebuild();
    let certificate = verify_certificate(&fam);
    let audit = family::replay_audit(&fam);
    let mut ok = certificate.satisfied && audit.sound;
    for member in &fam.members {
        if !family::member_is_copy(&fam.host, &fam.pattern, member).map_err(err)? {
            ok = false;
        }
    }
    let out = serde_json::json!({
        "certificate": certificate,
        "replay_audit": audit,
        "verified": ok,
    });
    to_py(py, &out)
}

/// Container codegree function delta(F, tau) of a member list.
#[pyfunction]
fn codegree(members: Vec<Vec<usize>>, l: usize, tau: f64) -> PyResult<f64> {
    let members: Vec<_> = members
        .into_iter()
        .map(supersat::hypergraph::EdgeSet::new)
        .collect();
    family::codegree_function(&members, l, tau).map_err(err)
}

#[pymodule]
fn supersat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHypergraph>()?;
    m.add_class::<PyPattern>()?;
    m.add_function(wrap_pyfunction!(count_copies, m)?)?;
    m.add_function(wrap_pyfunction!(embedding_count, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_copies, m)?)?;
    m.add_function(wrap_pyfunction!(ex_exact, m)?)?;
    m.add_function(wrap_pyfunction!(ex_random_subgraph, m)?)?;
    m.add_function(wrap_pyfunction!(build_family, m)?)?;
    m.add_function(wrap_pyfunction!(verify_family, m)?)?;
    m.add_function(wrap_pyfunction!(codegree, m)?)?;
    Ok(())
}
