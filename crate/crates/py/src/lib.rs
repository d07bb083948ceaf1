//! Python bindings. Sets travel as lists of ints, streams and families as
//! the same text the command line accepts, and structured results as dicts.

use std::hash::{Hash, Hasher};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::pyclass::CompareOp;
use serde::Serialize;

use schreier_core::cbindex::{self, CbConfig};
use schreier_core::families::{parse_family, Corpus, Family};
use schreier_core::ramsey::{self, ClassifyConfig, Policy, SearchConfig};
use schreier_core::schreier as sch;
use schreier_core::{FinSet, Stream};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn finset(elems: Vec<u64>) -> PyResult<FinSet> {
    FinSet::from_unsorted(elems).map_err(err)
}

fn stream(text: &str) -> PyResult<Stream> {
    text.parse().map_err(err)
}

fn family(text: &str, horizon: u64) -> PyResult<Family> {
    parse_family(text, &Corpus::default(), horizon).map_err(err)
}

/// An ordinal below ε₀ in Cantor normal form.
#[pyclass(name = "Ordinal", frozen, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyOrdinal(schreier_core::Ordinal);

/// Accepts either an `Ordinal` or its text form.
#[derive(FromPyObject)]
enum OrdinalArg {
    Ord(PyOrdinal),
    Int(u64),
    Text(String),
}

impl OrdinalArg {
    fn get(self) -> PyResult<schreier_core::Ordinal> {
        match self {
            OrdinalArg::Ord(o) => Ok(o.0),
            OrdinalArg::Int(n) => Ok(schreier_core::Ordinal::finite(n)),
            OrdinalArg::Text(t) => t.parse().map_err(err),
        }
    }
}

#[pymethods]
impl PyOrdinal {
    #[new]
    fn new(value: OrdinalArg) -> PyResult<Self> {
        value.get().map(PyOrdinal)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Ordinal('{}')", self.0)
    }

    fn __richcmp__(&self, other: OrdinalArg, op: CompareOp) -> PyResult<bool> {
        Ok(op.matches(self.0.cmp(&other.get()?)))
    }

    fn __hash__(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }

    fn __add__(&self, other: OrdinalArg) -> PyResult<Self> {
        Ok(PyOrdinal(self.0.add(&other.get()?)))
    }

    fn successor(&self) -> Self {
        PyOrdinal(self.0.successor())
    }

    fn is_limit(&self) -> bool {
        self.0.is_limit()
    }

    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    fn fund(&self, n: u64) -> PyResult<Self> {
        self.0.fund(n).map(PyOrdinal).map_err(err)
    }

    fn sfund(&self, n: u64) -> PyResult<Self> {
        self.0.sfund(n).map(PyOrdinal).map_err(err)
    }

    fn step(&self, n: u64) -> PyResult<Self> {
        sch::step(&self.0, n).map(PyOrdinal).map_err(err)
    }
}

/// `"Member"`, `"ProperInitial"` or `"ExtendsMember(k)"`.
#[pyfunction]
fn classify(xi: OrdinalArg, s: Vec<u64>) -> PyResult<String> {
    Ok(sch::classify_peel(&xi.get()?, &finset(s)?).to_string())
}

#[pyfunction]
fn is_member(xi: OrdinalArg, s: Vec<u64>) -> PyResult<bool> {
    Ok(sch::is_member(&xi.get()?, &finset(s)?))
}

#[pyfunction]
#[pyo3(signature = (xi, s, ground=None))]
fn in_substar(xi: OrdinalArg, s: Vec<u64>, ground: Option<&str>) -> PyResult<bool> {
    let g = ground.map(stream).transpose()?;
    Ok(sch::in_substar(&xi.get()?, &finset(s)?, g.as_ref()))
}

/// Blocks and trailing segment of the canonical representation.
#[pyfunction]
fn decompose(xi: OrdinalArg, s: Vec<u64>) -> PyResult<(Vec<Vec<u64>>, Vec<u64>)> {
    let rep = sch::canonical_rep(&xi.get()?, &finset(s)?).map_err(err)?;
    let blocks = rep.blocks.iter().map(|b| b.as_slice().to_vec()).collect();
    Ok((blocks, rep.trailing.as_slice().to_vec()))
}

/// Members of `A_ξ` inside `{1..n}`.
#[pyfunction]
#[pyo3(signature = (xi, n, budget=1_000_000))]
fn enumerate(xi: OrdinalArg, n: u64, budget: usize) -> PyResult<Vec<Vec<u64>>> {
    let members = sch::enumerate(&xi.get()?, &FinSet::range(1, n), budget).map_err(err)?;
    Ok(members.into_iter().map(|s| s.as_slice().to_vec()).collect())
}

#[pyfunction]
#[pyo3(signature = (family_text, s, horizon=40))]
fn family_contains(family_text: &str, s: Vec<u64>, horizon: u64) -> PyResult<bool> {
    Ok(family(family_text, horizon)?.contains(&finset(s)?))
}

/// Strong Cantor-Bendixson index of a family on a stream.
#[pyfunction]
#[pyo3(signature = (family_text, stream_text, ladder=None, horizon=40))]
fn index<'py>(
    py: Python<'py>,
    family_text: &str,
    stream_text: &str,
    ladder: Option<Vec<OrdinalArg>>,
    horizon: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let ladder = match ladder {
        Some(l) => l.into_iter().map(OrdinalArg::get).collect::<PyResult<Vec<_>>>()?,
        None => cbindex::finite_ladder(6),
    };
    let f = family(family_text, horizon)?;
    let m = stream(stream_text)?;
    let report = py
        .detach(|| cbindex::index(&f, &m, &ladder, CbConfig::default()))
        .map_err(err)?;
    to_dict(py, &report)
}

/// Finitized Ramsey dichotomy search; the result is re-verified before return.
#[pyfunction]
#[pyo3(signature = (xi, family_text, stream_text="all", horizon=40, target=6, budget=1_000_000, policy="majority"))]
#[allow(clippy::too_many_arguments)]
fn dichotomy<'py>(
    py: Python<'py>,
    xi: OrdinalArg,
    family_text: &str,
    stream_text: &str,
    horizon: u64,
    target: usize,
    budget: usize,
    policy: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SearchConfig {
        horizon,
        target,
        budget,
        policy: policy.parse::<Policy>().map_err(err)?,
        ..SearchConfig::default()
    };
    let (xi, f, m) = (xi.get()?, family(family_text, horizon)?, stream(stream_text)?);
    let outcome = py.detach(|| ramsey::dichotomy_search(&xi, &f, &m, cfg)).map_err(err)?;
    to_dict(py, &outcome)
}

/// Places a hereditary family into the cases of the hereditary dichotomy.
#[pyfunction]
#[pyo3(signature = (family_text, stream_text, target_xi, horizon=40))]
fn classify_hereditary<'py>(
    py: Python<'py>,
    family_text: &str,
    stream_text: &str,
    target_xi: OrdinalArg,
    horizon: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let (f, m, target) = (family(family_text, horizon)?, stream(stream_text)?, target_xi.get()?);
    let mut cfg = ClassifyConfig::for_target(&target);
    cfg.search.horizon = horizon;
    let verdict = py
        .detach(|| ramsey::classify_hereditary(&f, &m, &target, &cfg))
        .map_err(err)?;
    to_dict(py, &verdict)
}

/// Runs the command line in-process: `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let (mut out, mut errs) = (Vec::new(), Vec::new());
    let argv = std::iter::once("schreier".to_string()).chain(args);
    let code = schreier_core::cli::run(argv, &mut out, &mut errs);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&errs).into_owned(),
    )
}

#[pymodule]
fn schreier(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOrdinal>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(is_member, m)?)?;
    m.add_function(wrap_pyfunction!(in_substar, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(family_contains, m)?)?;
    m.add_function(wrap_pyfunction!(index, m)?)?;
    m.add_function(wrap_pyfunction!(dichotomy, m)?)?;
    m.add_function(wrap_pyfunction!(classify_hereditary, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
