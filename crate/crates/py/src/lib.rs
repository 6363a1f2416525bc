//! Python bindings. Slopes cross the boundary as strings such as `"-12/5"`,
//! structured results as plain dicts and lists.

use cabling::atlas::LegendrianAtlas as Atlas;
use cabling::farey::{product as farey_product, Slope};
use cabling::invariants::{CableParams as Params, ClassicalInvariants};
use cabling::llc::{tb_upper_bound as llc_tb_bound, yasui_width_bound as yasui};
use cabling::negcable::{classify as neg_classify, ToriAtlas};
use cabling::paths::{
    enumerate_solid_torus, enumerate_thickened as thickened, shortest_path as sp,
    tail as farey_tail,
};
use cabling::poscable::{diamond as pos_diamond, expand as pos_expand, width_gate};
use cabling::render::{render_mountain_range, LabelMode, RenderFormat, RenderSpec};
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn slope(text: &str) -> PyResult<Slope> {
    text.parse().map_err(err)
}

fn value_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, value_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    value_to_py(py, &serde_json::to_value(v).map_err(err)?)
}

#[pyclass(
    name = "CableParams",
    module = "cabling",
    frozen,
    eq,
    hash,
    skip_from_py_object
)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct PyCableParams(Params);

#[pymethods]
impl PyCableParams {
    #[new]
    fn new(p: i64, q: i64) -> PyResult<Self> {
        Params::new(p, q).map(PyCableParams).map_err(err)
    }

    #[getter]
    fn p(&self) -> i64 {
        self.0.p()
    }

    #[getter]
    fn q(&self) -> i64 {
        self.0.q()
    }

    #[getter]
    fn slope(&self) -> String {
        self.0.slope().to_string()
    }

    fn __repr__(&self) -> String {
        format!("CableParams({}, {})", self.0.p(), self.0.q())
    }
}

#[pyclass(
    name = "LegendrianAtlas",
    module = "cabling",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyAtlas(Atlas);

#[pymethods]
impl PyAtlas {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Atlas::from_json(text).map(PyAtlas).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn name(&self) -> &str {
        self.0.name()
    }

    #[getter]
    fn max_tb(&self) -> i64 {
        self.0.max_tb()
    }

    #[getter]
    fn ceil_width(&self) -> Option<i64> {
        self.0.ceil_width()
    }

    /// `(id, tb, rot)` per generator.
    #[getter]
    fn generators(&self) -> Vec<(String, i64, i64)> {
        self.0
            .generators()
            .iter()
            .map(|g| (g.id.clone(), g.tb, g.rot))
            .collect()
    }

    fn is_legendrian_simple(&self) -> bool {
        self.0.is_legendrian_simple()
    }

    fn is_transversely_simple(&self) -> bool {
        self.0.is_transversely_simple()
    }

    /// Number of isotopy classes with the given invariants.
    fn count_at(&self, tb: i64, rot: i64) -> usize {
        self.0.classes_at(ClassicalInvariants::new(tb, rot)).len()
    }

    fn mountain_range<'py>(&self, py: Python<'py>, tb_floor: i64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.mountain_range(tb_floor).map_err(err)?)
    }

    #[pyo3(signature = (tb_floor, format = "ascii", labels = "counts"))]
    fn render(&self, tb_floor: i64, format: &str, labels: &str) -> PyResult<String> {
        let format = match format {
            "ascii" => RenderFormat::Ascii,
            "svg" => RenderFormat::Svg,
            "json" => RenderFormat::Json,
            other => return Err(err(format!("unknown format {other:?}"))),
        };
        let label_mode = match labels {
            "counts" => LabelMode::Counts,
            "ids" => LabelMode::Ids,
            other => return Err(err(format!("unknown label mode {other:?}"))),
        };
        let range = self.0.mountain_range(tb_floor).map_err(err)?;
        render_mountain_range(
            &range,
            RenderSpec {
                format,
                tb_floor,
                label_mode,
            },
        )
        .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "LegendrianAtlas({:?}, max_tb={}, generators={})",
            self.0.name(),
            self.0.max_tb(),
            self.0.generators().len()
        )
    }
}

#[pyfunction]
fn shortest_path(target: &str) -> PyResult<Vec<String>> {
    let path = sp(&slope(target)?).map_err(err)?;
    Ok(path.vertices().iter().map(Slope::to_string).collect())
}

#[pyfunction]
fn tail<'py>(py: Python<'py>, target: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &farey_tail(&slope(target)?).map_err(err)?)
}

#[pyfunction]
fn product(a: &str, b: &str) -> PyResult<BigInt> {
    Ok(farey_product(&slope(a)?, &slope(b)?))
}

/// Canonical decorated paths; `start = "inf"` gives solid tori.
#[pyfunction]
fn enumerate_tight<'py>(py: Python<'py>, start: &str, end: &str) -> PyResult<Bound<'py, PyAny>> {
    let (s0, s1) = (slope(start)?, slope(end)?);
    let paths = if s0.is_infinite() {
        enumerate_solid_torus(&s1)
    } else {
        thickened(&s0, &s1)
    }
    .map_err(err)?;
    to_py(py, &paths)
}

#[pyfunction]
fn expand(atlas: &PyAtlas, params: &PyCableParams) -> PyResult<PyAtlas> {
    pos_expand(&atlas.0, params.0)
        .map(|e| PyAtlas(e.atlas))
        .map_err(err)
}

/// Returns the cable atlas and the classification report.
#[pyfunction]
fn classify_negative<'py>(
    py: Python<'py>,
    tori_json: &str,
) -> PyResult<(PyAtlas, Bound<'py, PyAny>)> {
    let tori = ToriAtlas::from_json(tori_json).map_err(err)?;
    let c = neg_classify(&tori).map_err(err)?;
    Ok((PyAtlas(c.atlas), to_py(py, &c.report)?))
}

/// `(tb, rot)` pairs of the diamond over the base point `(rot a, tb b)`.
#[pyfunction]
fn diamond(params: &PyCableParams, a: i64, b: i64) -> PyResult<Vec<(i64, i64)>> {
    let d = pos_diamond(params.0, a, b).map_err(err)?;
    Ok(d.points.iter().map(|c| (c.tb, c.rot)).collect())
}

#[pyfunction]
fn tb_upper_bound(atlas: &PyAtlas, params: &PyCableParams) -> PyResult<i64> {
    llc_tb_bound(params.0, width_gate(&atlas.0).bound, atlas.0.max_tb()).map_err(err)
}

#[pyfunction]
fn yasui_width_bound(m: i64) -> PyResult<String> {
    yasui(m).map(|b| b.bound.to_string()).map_err(err)
}

/// Adds every class and function to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCableParams>()?;
    m.add_class::<PyAtlas>()?;
    m.add_function(wrap_pyfunction!(shortest_path, m)?)?;
    m.add_function(wrap_pyfunction!(tail, m)?)?;
    m.add_function(wrap_pyfunction!(product, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_tight, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(classify_negative, m)?)?;
    m.add_function(wrap_pyfunction!(diamond, m)?)?;
    m.add_function(wrap_pyfunction!(tb_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(yasui_width_bound, m)?)?;
    Ok(())
}

#[pymodule]
#[pyo3(name = "cabling")]
fn cabling_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
