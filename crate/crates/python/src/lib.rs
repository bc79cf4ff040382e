//! Python bindings: an `Engine` built from graph and query text, updated with
//! update-stream records and answered in all four modes.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use dyncade_core::engine::{Cursor, Engine, EngineError, EngineMode};
use dyncade_core::eval::oracle_answers;
use dyncade_core::graph::text::{parse_graph, parse_updates};
use dyncade_core::graph::{DegreePolicy, GraphError, VertexId};
use dyncade_core::query::NormalizedQuery;

create_exception!(dyncade, DyncadeError, PyValueError, "Parse, validation or update error.");
create_exception!(dyncade, DegreeExceededError, DyncadeError, "An update would exceed the degree bound.");
create_exception!(dyncade, StaleCursorError, PyRuntimeError, "The engine changed while enumerating.");

fn engine_err(e: EngineError) -> PyErr {
    match e {
        EngineError::Graph(GraphError::DegreeExceeded { .. }) => DegreeExceededError::new_err(e.to_string()),
        EngineError::StaleCursor { .. } => StaleCursorError::new_err(e.to_string()),
        _ => DyncadeError::new_err(e.to_string()),
    }
}

fn ids(t: &[VertexId]) -> Vec<u32> {
    t.iter().map(|v| v.0).collect()
}

/// Dynamic query engine over one graph and one query.
#[pyclass(name = "Engine", module = "dyncade")]
pub struct PyEngine {
    inner: Engine,
}

#[pymethods]
impl PyEngine {
    /// `mode` is "bounded" or "low". Give `degree`, or `c` and `eps` for the
    /// cap `c * n^eps`.
    #[new]
    #[pyo3(signature = (graph, query, mode = "bounded", degree = None, c = None, eps = None))]
    fn new(
        graph: &str,
        query: &str,
        mode: &str,
        degree: Option<u32>,
        c: Option<f64>,
        eps: Option<f64>,
    ) -> PyResult<Self> {
        let mode = match mode {
            "bounded" => EngineMode::BoundedDegree,
            "low" => EngineMode::LowDegree,
            other => return Err(DyncadeError::new_err(format!("unknown mode `{other}`"))),
        };
        let policy = match (degree, c, eps) {
            (Some(d), None, None) => DegreePolicy::Bounded(d),
            (None, Some(c), Some(eps)) => DegreePolicy::LowDegree { c, eps },
            _ => return Err(DyncadeError::new_err("give degree, or c and eps")),
        };
        let q = NormalizedQuery::parse(query).map_err(|e| DyncadeError::new_err(format!("query: {e}")))?;
        let g = parse_graph(graph, policy).map_err(|e| DyncadeError::new_err(format!("graph: {e}")))?;
        Ok(PyEngine { inner: Engine::preprocess(g, q, mode).map_err(engine_err)? })
    }

    /// Applies every record of update-stream text, such as `"+e 1 4"`.
    /// Records before a failing one stay applied.
    fn update(&mut self, records: &str) -> PyResult<()> {
        let ops = parse_updates(records).map_err(|e| DyncadeError::new_err(e.to_string()))?;
        for (_, op) in ops {
            self.inner.update(&op).map_err(engine_err)?;
        }
        Ok(())
    }

    fn check(&self) -> bool {
        self.inner.check()
    }

    fn count(&self) -> u64 {
        self.inner.count()
    }

    fn test(&self, tuple: Vec<u32>) -> PyResult<bool> {
        let t: Vec<VertexId> = tuple.into_iter().map(VertexId).collect();
        self.inner.test(&t).map_err(engine_err)
    }

    fn check_sentence(&self, name: &str) -> PyResult<bool> {
        self.inner.check_sentence(name).map_err(engine_err)
    }

    /// Answers in lexicographic order, at most `limit` of them.
    #[pyo3(signature = (limit = None))]
    fn answers(&self, limit: Option<usize>) -> PyResult<Vec<Vec<u32>>> {
        let mut c = self.inner.open_cursor();
        let mut out = Vec::new();
        while out.len() < limit.unwrap_or(usize::MAX) {
            match self.inner.next(&mut c).map_err(engine_err)? {
                Some(t) => out.push(ids(&t)),
                None => break,
            }
        }
        Ok(out)
    }

    /// Brute-force answers, for cross-checking.
    fn oracle_answers(&self) -> Vec<Vec<u32>> {
        oracle_answers(self.inner.graph(), self.inner.query()).iter().map(|t| ids(t)).collect()
    }

    #[getter]
    fn version(&self) -> u64 {
        self.inner.version()
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.graph().vertex_count()
    }

    fn __iter__(slf: Bound<'_, Self>) -> AnswerIter {
        let cursor = slf.borrow().inner.open_cursor();
        AnswerIter { engine: slf.unbind(), cursor }
    }

    fn __repr__(&self) -> String {
        format!(
            "Engine(mode={:?}, vertices={}, version={})",
            self.inner.mode(),
            self.inner.graph().vertex_count(),
            self.inner.version()
        )
    }
}

/// Lazy enumeration; raises `StaleCursorError` if the engine is updated.
#[pyclass(module = "dyncade")]
pub struct AnswerIter {
    engine: Py<PyEngine>,
    cursor: Cursor,
}

#[pymethods]
impl AnswerIter {
    fn __iter__(slf: PyRef<'_, Self>) -> PyRef<'_, Self> {
        slf
    }

    fn __next__(&mut self, py: Python<'_>) -> PyResult<Option<Vec<u32>>> {
        let engine = self.engine.borrow(py);
        Ok(engine.inner.next(&mut self.cursor).map_err(engine_err)?.map(|t| ids(&t)))
    }
}

#[pymodule]
pub fn dyncade(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEngine>()?;
    m.add_class::<AnswerIter>()?;
    m.add("DyncadeError", m.py().get_type::<DyncadeError>())?;
    m.add("DegreeExceededError", m.py().get_type::<DegreeExceededError>())?;
    m.add("StaleCursorError", m.py().get_type::<StaleCursorError>())?;
    Ok(())
}
