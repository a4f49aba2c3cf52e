//! Python bindings. Reports come back as plain dicts and lists.

use ncyclic::generate::{child_seed, generate_example, ExampleKind, ExampleParams, STREAM_SEARCH};
use ncyclic::hamiltonian::{self, LiftVariant};
use ncyclic::monotonicity::{self, SearchMethod, Verdict};
use ncyclic::transport::{self, InvolutionMethod};
use ncyclic::{io, DiscreteDomain, Error, FieldTuple, GridHamiltonian, IndexCycle, NInvolution};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

create_exception!(ncyclic, NotMonotoneError, PyValueError);

fn err(e: Error) -> PyErr {
    match e {
        Error::NotMonotone { .. } => NotMonotoneError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let l = PyList::empty(py);
            for x in a {
                l.append(to_py(py, x)?)?;
            }
            l.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn report<'py>(py: Python<'py>, r: impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(r).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn verdict<'py>(py: Python<'py>, v: Verdict) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Verdict::Pass => Ok(py.None().into_bound(py)),
        Verdict::Witness(w) => report(py, w),
    }
}

/// Sampled vector fields `(u_1, .., u_{N-1})` on a weighted point cloud.
#[pyclass(name = "Fields", module = "ncyclic", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFields(FieldTuple);

#[pymethods]
impl PyFields {
    /// `fields[l][i]` is the value of `u_{l+1}` at `points[i]`.
    #[new]
    #[pyo3(signature = (points, fields, weights=None))]
    fn new(points: Vec<Vec<f64>>, fields: Vec<Vec<Vec<f64>>>, weights: Option<Vec<f64>>) -> PyResult<Self> {
        let dom = DiscreteDomain::new(points, weights).map_err(err)?;
        Ok(Self(FieldTuple::new(dom, fields).map_err(err)?))
    }

    /// Seeded example: `gradient`, `rotation`, `triplet4`, `random_monotone` or `random`.
    #[staticmethod]
    #[pyo3(signature = (kind, m, dimension, order, seed=0, regular=false))]
    fn generate(kind: &str, m: usize, dimension: usize, order: usize, seed: u64, regular: bool) -> PyResult<Self> {
        let kind: ExampleKind = kind.parse().map_err(err)?;
        let params = ExampleParams {
            regular,
            ..ExampleParams::new(kind, m, dimension, order, seed)
        };
        Ok(Self(generate_example(&params).map_err(err)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(io::parse_fields_json(text).map_err(err)?))
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(Self(io::parse_fields_csv(text).map_err(err)?))
    }

    fn to_json(&self) -> String {
        io::fields_to_json(&self.0)
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.domain().len()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.0.domain().dimension()
    }

    #[getter]
    fn points(&self) -> Vec<Vec<f64>> {
        self.0.domain().points().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.domain().weights().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<Vec<Vec<f64>>> {
        self.0.to_nested()
    }

    fn __repr__(&self) -> String {
        format!(
            "Fields(order={}, m={}, dimension={})",
            self.0.order(),
            self.0.domain().len(),
            self.0.domain().dimension()
        )
    }
}

/// Dense function of `N` point indices.
#[pyclass(name = "Hamiltonian", module = "ncyclic", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyHamiltonian(GridHamiltonian);

#[pymethods]
impl PyHamiltonian {
    /// Row-major values, first index most significant.
    #[new]
    fn new(m: usize, order: usize, values: Vec<f64>) -> PyResult<Self> {
        Ok(Self(GridHamiltonian::new(m, order, values).map_err(err)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(io::parse_tensor_json(text).map_err(err)?))
    }

    fn to_json(&self) -> String {
        io::tensor_to_json(&self.0)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn __getitem__(&self, t: Vec<usize>) -> PyResult<f64> {
        if t.len() != self.0.order() || t.iter().any(|&i| i >= self.0.m()) {
            return Err(PyValueError::new_err(format!("bad index {t:?}")));
        }
        Ok(self.0.get(&t))
    }

    /// `max_t |sum_k H(sigma^k t)|`.
    fn max_abs_rotation_sum(&self) -> f64 {
        self.0.max_abs_rotation_sum()
    }

    fn antisymmetrize(&self) -> PyResult<Self> {
        Ok(Self(hamiltonian::antisymmetrize(&self.0).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian(m={}, order={})", self.0.m(), self.0.order())
    }
}

/// `None` when jointly monotone, else a `{cycle, defect, kind}` witness.
#[pyfunction]
#[pyo3(signature = (fields, tolerance=monotonicity::DEFAULT_TOL))]
fn check_joint<'py>(py: Python<'py>, fields: &PyFields, tolerance: f64) -> PyResult<Bound<'py, PyAny>> {
    verdict(py, monotonicity::check_joint(&fields.0, tolerance).map_err(err)?)
}

/// N-cyclic monotonicity of field slot `slot` (0-based); `method` is `bellman` or `enum`.
#[pyfunction]
#[pyo3(signature = (fields, order, slot=0, tolerance=monotonicity::DEFAULT_TOL, method="bellman"))]
fn check_single<'py>(
    py: Python<'py>,
    fields: &PyFields,
    order: usize,
    slot: usize,
    tolerance: f64,
    method: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let method = match method {
        "bellman" => SearchMethod::NegativeCycle,
        "enum" => SearchMethod::Enumerate,
        other => return Err(PyValueError::new_err(format!("unknown method {other}"))),
    };
    if slot + 1 >= fields.0.order() {
        return Err(PyValueError::new_err("slot out of range"));
    }
    let u = fields.0.component(slot);
    verdict(py, monotonicity::check_single(&u, order, tolerance, method).map_err(err)?)
}

#[pyfunction]
fn cycle_defect(fields: &PyFields, cycle: Vec<usize>) -> PyResult<f64> {
    let c = IndexCycle::new(cycle, fields.0.domain().len()).map_err(err)?;
    monotonicity::cycle_defect(&fields.0, &c).map_err(err)
}

/// Fixed-point Hamiltonian and its representation report.
#[pyfunction]
#[pyo3(signature = (fields, tol=hamiltonian::DEFAULT_FIXED_POINT_TOL, max_iter=hamiltonian::DEFAULT_MAX_ITER))]
fn build_maximal_h<'py>(
    py: Python<'py>,
    fields: &PyFields,
    tol: f64,
    max_iter: usize,
) -> PyResult<(PyHamiltonian, Bound<'py, PyAny>)> {
    let (h, rep) = hamiltonian::build_maximal_h(&fields.0, tol, max_iter).map_err(err)?;
    Ok((PyHamiltonian(h), report(py, rep)?))
}

#[pyfunction]
fn build_psi<'py>(py: Python<'py>, fields: &PyFields) -> PyResult<(PyHamiltonian, Bound<'py, PyAny>)> {
    let (h, rep) = hamiltonian::build_psi(&fields.0).map_err(err)?;
    Ok((PyHamiltonian(h), report(py, rep)?))
}

#[pyfunction]
#[pyo3(signature = (h, fields, tolerance=hamiltonian::REPORT_TOL))]
fn verify_dualrep<'py>(
    py: Python<'py>,
    h: &PyHamiltonian,
    fields: &PyFields,
    tolerance: f64,
) -> PyResult<Bound<'py, PyAny>> {
    report(py, hamiltonian::verify_dualrep_with_tol(&h.0, &fields.0, tolerance).map_err(err)?)
}

/// Two-variable F of field slot `slot` and its certificate report.
#[pyfunction]
#[pyo3(signature = (fields, order, slot=0, tol=1e-8))]
fn build_two_var_f<'py>(
    py: Python<'py>,
    fields: &PyFields,
    order: usize,
    slot: usize,
    tol: f64,
) -> PyResult<(PyHamiltonian, Bound<'py, PyAny>)> {
    if slot + 1 >= fields.0.order() {
        return Err(PyValueError::new_err("slot out of range"));
    }
    let (f, rep) = hamiltonian::build_two_var_f(&fields.0.component(slot), order, tol).map_err(err)?;
    Ok((PyHamiltonian(f), report(py, rep)?))
}

/// `variant` is `printed` or `corrected`.
#[pyfunction]
#[pyo3(signature = (f, order, variant="corrected"))]
fn lift_f_to_h<'py>(
    py: Python<'py>,
    f: &PyHamiltonian,
    order: usize,
    variant: &str,
) -> PyResult<(PyHamiltonian, Bound<'py, PyAny>)> {
    let variant = match variant {
        "printed" => LiftVariant::Printed,
        "corrected" => LiftVariant::Corrected,
        other => return Err(PyValueError::new_err(format!("unknown variant {other}"))),
    };
    let (h, rep) = hamiltonian::lift_f_to_h(&f.0, order, variant).map_err(err)?;
    Ok((PyHamiltonian(h), report(py, rep)?))
}

/// `{value, coupling: {order, m, entries}, diagnostics}`.
#[pyfunction]
fn solve_sigma_kantorovich<'py>(py: Python<'py>, fields: &PyFields) -> PyResult<Bound<'py, PyAny>> {
    let res = transport::solve_sigma_kantorovich(&fields.0).map_err(err)?;
    let v = serde_json::json!({
        "value": res.value,
        "coupling": io::coupling_document(&res.coupling),
        "diagnostics": res.diagnostics,
    });
    to_py(py, &v)
}

/// `method` is `exact` or `local`; the search seed is derived from `seed`.
#[pyfunction]
#[pyo3(signature = (fields, method="exact", restarts=20, seed=0))]
fn solve_involution_polar<'py>(
    py: Python<'py>,
    fields: &PyFields,
    method: &str,
    restarts: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let method = match method {
        "exact" => InvolutionMethod::Exact,
        "local" => InvolutionMethod::Local { restarts },
        other => return Err(PyValueError::new_err(format!("unknown method {other}"))),
    };
    let res = transport::solve_involution_polar(&fields.0, method, child_seed(seed, STREAM_SEARCH)).map_err(err)?;
    report(py, res)
}

/// Gap at `perm` (identity by default) for an antisymmetric `h`.
#[pyfunction]
#[pyo3(signature = (fields, h, perm=None))]
fn duality_gap(fields: &PyFields, h: &PyHamiltonian, perm: Option<Vec<usize>>) -> PyResult<f64> {
    let n = fields.0.order();
    let s = match perm {
        Some(p) => NInvolution::new(p, n).map_err(err)?,
        None => NInvolution::identity(fields.0.domain().len(), n),
    };
    let mut bar = h.0.clone();
    if !bar.flags().antisymmetric {
        bar = bar.claim_antisymmetric().map_err(err)?;
    }
    transport::duality_gap(&fields.0, &bar, &s).map_err(err)
}

#[pyfunction(name = "child_seed")]
fn py_child_seed(seed: u64, stream: u64) -> u64 {
    child_seed(seed, stream)
}

#[pymodule]
#[pyo3(name = "ncyclic")]
fn ncyclic_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NotMonotoneError", m.py().get_type::<NotMonotoneError>())?;
    m.add_class::<PyFields>()?;
    m.add_class::<PyHamiltonian>()?;
    m.add_function(wrap_pyfunction!(check_joint, m)?)?;
    m.add_function(wrap_pyfunction!(check_single, m)?)?;
    m.add_function(wrap_pyfunction!(cycle_defect, m)?)?;
    m.add_function(wrap_pyfunction!(build_psi, m)?)?;
    m.add_function(wrap_pyfunction!(build_maximal_h, m)?)?;
    m.add_function(wrap_pyfunction!(verify_dualrep, m)?)?;
    m.add_function(wrap_pyfunction!(build_two_var_f, m)?)?;
    m.add_function(wrap_pyfunction!(lift_f_to_h, m)?)?;
    m.add_function(wrap_pyfunction!(solve_sigma_kantorovich, m)?)?;
    m.add_function(wrap_pyfunction!(solve_involution_polar, m)?)?;
    m.add_function(wrap_pyfunction!(duality_gap, m)?)?;
    m.add_function(wrap_pyfunction!(py_child_seed, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
