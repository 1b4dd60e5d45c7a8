//! Python bindings: exact forms and subspaces, plus the analysis, complement,
//! canonical-form, flattening and involutivity operations. Structured results
//! are returned as JSON strings with the same layout as the CLI reports.

use isodec::analysis;
use isodec::flatten::{self, CoordinateSplit, FlattenParams};
use isodec::io;
use isodec::isotropic::{self, ComplementMethod, VerticalData};
use isodec::rational::{fmt_q, parse_q};
use isodec::report;
use isodec::search::SearchBudget;
use isodec::{AlternatingForm, Subspace, Vector};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(isodec, IsodecError, PyException);

fn py_err(e: isodec::Error) -> PyErr {
    IsodecError::new_err(format!("{}: {e}", e.kind()))
}

fn vector(coords: Vec<String>) -> PyResult<Vector> {
    let qs = coords.iter().map(|s| parse_q(s)).collect::<isodec::Result<Vec<_>>>().map_err(py_err)?;
    Ok(Vector::new(qs))
}

fn budget(seed: u64) -> SearchBudget {
    SearchBudget::with_seed(seed)
}

fn json_string(v: &serde_json::Value) -> String {
    serde_json::to_string(v).expect("JSON values serialize")
}

/// An exact alternating form with rational coefficients.
#[pyclass(name = "Form", module = "isodec", frozen)]
struct PyForm {
    inner: AlternatingForm,
}

#[pymethods]
impl PyForm {
    /// `terms` is a list of `(indices, coeff)` with 1-based increasing indices
    /// and coefficients given as rational strings such as `"-3/4"`.
    #[new]
    fn new(dimension: usize, degree: usize, terms: Vec<(Vec<usize>, String)>) -> PyResult<Self> {
        let mut f = AlternatingForm::zero(dimension, degree);
        for (idx, c) in terms {
            let term = AlternatingForm::monomial(dimension, &idx, parse_q(&c).map_err(py_err)?).map_err(py_err)?;
            f = f.try_add(&term).map_err(py_err)?;
        }
        Ok(PyForm { inner: f })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: io::FormJson = io::parse_json(text).map_err(py_err)?;
        Ok(PyForm {
            inner: io::form_from_json(&j).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&io::form_to_json(&self.inner)).expect("forms serialize")
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn terms(&self) -> Vec<(Vec<usize>, String)> {
        self.inner.terms().map(|(t, c)| (t.indices(), fmt_q(c))).collect()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn wedge(&self, other: &PyForm) -> PyResult<PyForm> {
        Ok(PyForm {
            inner: self.inner.wedge(&other.inner).map_err(py_err)?,
        })
    }

    fn contract(&self, v: Vec<String>) -> PyResult<PyForm> {
        Ok(PyForm {
            inner: self.inner.contract(&vector(v)?).map_err(py_err)?,
        })
    }

    fn __add__(&self, other: &PyForm) -> PyResult<PyForm> {
        Ok(PyForm {
            inner: self.inner.try_add(&other.inner).map_err(py_err)?,
        })
    }

    fn __sub__(&self, other: &PyForm) -> PyResult<PyForm> {
        Ok(PyForm {
            inner: self.inner.try_sub(&other.inner).map_err(py_err)?,
        })
    }

    fn __eq__(&self, other: &PyForm) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Form(dimension={}, degree={}, terms={})",
            self.inner.dimension(),
            self.inner.degree(),
            self.inner.num_terms()
        )
    }

    fn kernel(&self) -> PyResult<PySubspace> {
        Ok(PySubspace {
            inner: analysis::kernel(&self.inner).map_err(py_err)?,
        })
    }

    fn is_decomposable(&self) -> bool {
        analysis::is_decomposable(&self.inner).decomposable
    }

    fn support_dim(&self) -> usize {
        analysis::support_dim(&self.inner)
    }

    /// Bounds on the length (fewest decomposable summands), as JSON.
    #[pyo3(signature = (seed = 7))]
    fn length_bounds(&self, seed: u64) -> String {
        json_string(&report::length_json(&analysis::length_bounds(&self.inner, &budget(seed))))
    }
}

/// A linear subspace of `ℝᵈ` (or of its dual), kept in reduced echelon form.
#[pyclass(name = "Subspace", module = "isodec", frozen)]
struct PySubspace {
    inner: Subspace,
}

#[pymethods]
impl PySubspace {
    #[staticmethod]
    fn span(ambient: usize, vectors: Vec<Vec<String>>) -> PyResult<Self> {
        let vs = vectors.into_iter().map(vector).collect::<PyResult<Vec<_>>>()?;
        Ok(PySubspace {
            inner: Subspace::span(ambient, &vs).map_err(py_err)?,
        })
    }

    /// Span of the 1-based coordinate directions in `indices`.
    #[staticmethod]
    fn coordinate(ambient: usize, indices: Vec<usize>) -> PyResult<Self> {
        Ok(PySubspace {
            inner: Subspace::coordinate(ambient, false, &indices).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: io::SubspaceJson = io::parse_json(text).map_err(py_err)?;
        Ok(PySubspace {
            inner: io::subspace_from_json(&j).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&io::subspace_to_json(&self.inner)).expect("subspaces serialize")
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn ambient(&self) -> usize {
        self.inner.ambient()
    }

    fn basis(&self) -> Vec<Vec<String>> {
        self.inner.basis().iter().map(|r| r.iter().map(fmt_q).collect()).collect()
    }

    fn contains(&self, v: Vec<String>) -> PyResult<bool> {
        Ok(self.inner.contains(&vector(v)?.coords))
    }

    fn __eq__(&self, other: &PySubspace) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Subspace(ambient={}, dim={})", self.inner.ambient(), self.inner.dim())
    }
}

/// A catalog entry: `(form, L, V, r, F)`; `V`, `r` and `F` may be `None`.
/// `spec` is e.g. `"omega0:2,2"`, `"r11"`, `"max_dim:1,2"`.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn catalog(spec: &str) -> PyResult<(PyForm, PySubspace, Option<PySubspace>, Option<usize>, Option<PySubspace>)> {
    let e = isodec::catalog::by_name(spec).map_err(py_err)?;
    let (v, r) = match e.v {
        Some(vd) => (Some(PySubspace { inner: vd.v }), Some(vd.r)),
        None => (None, None),
    };
    Ok((
        PyForm { inner: e.form },
        PySubspace { inner: e.l },
        v,
        r,
        e.f.map(|inner| PySubspace { inner }),
    ))
}

#[pyfunction]
fn is_k_isotropic(form: &PyForm, l: &PySubspace, k: usize) -> PyResult<bool> {
    Ok(analysis::classify_isotropy(&l.inner, &form.inner, k)
        .map_err(py_err)?
        .is_k_isotropic)
}

/// An `n`-isotropic complement of `L`, verified exactly before it is returned.
#[pyfunction]
#[pyo3(signature = (form, l, v = None, r = None, seed = 7))]
fn complement(form: &PyForm, l: &PySubspace, v: Option<&PySubspace>, r: Option<usize>, seed: u64) -> PyResult<PySubspace> {
    let vertical = match (v, r) {
        (Some(v), Some(r)) => Some(VerticalData { v: v.inner.clone(), r }),
        (None, None) => None,
        _ => {
            return Err(py_err(isodec::Error::precondition("V and r must be given together")));
        }
    };
    let res = isotropic::complement_n_isotropic(
        &form.inner,
        &l.inner,
        vertical.as_ref(),
        ComplementMethod::Auto,
        &budget(seed),
    )
    .map_err(py_err)?;
    Ok(PySubspace { inner: res.f })
}

/// Budgeted 𝔑_L computation, as JSON.
#[pyfunction]
#[pyo3(signature = (form, l, f, seed = 7))]
fn nl(form: &PyForm, l: &PySubspace, f: &PySubspace, seed: u64) -> PyResult<String> {
    let r = isotropic::frak_n_l(&form.inner, &l.inner, &f.inner, &budget(seed)).map_err(py_err)?;
    Ok(json_string(&report::nl_json(&r)))
}

/// Canonical representation on a basis of `F` realizing 𝔑 = dim(L/ker ω),
/// as JSON (fails with a precondition error when 𝔑_L is not certified zero).
#[pyfunction]
#[pyo3(signature = (form, l, f, seed = 7))]
fn canonical(form: &PyForm, l: &PySubspace, f: &PySubspace, seed: u64) -> PyResult<String> {
    let r = isotropic::frak_n_l(&form.inner, &l.inner, &f.inner, &budget(seed)).map_err(py_err)?;
    let rep = isotropic::canonical_representation(&form.inner, &l.inner, &r.witness_basis).map_err(py_err)?;
    let reconstructs = rep.reconstruct() == form.inner;
    Ok(json_string(&report::canonical_json(&rep, reconstructs)))
}

/// Moser flattening of a closed polynomial form (JSON text) along the split
/// `x`/`y` of 1-based coordinates; returns the result as JSON.
#[pyfunction]
#[pyo3(signature = (form_json, x, y, steps = 100, samples = 50, tol = 1e-6, seed = 7))]
#[allow(clippy::too_many_arguments)]
fn flatten_form(
    form_json: &str,
    x: Vec<usize>,
    y: Vec<usize>,
    steps: usize,
    samples: usize,
    tol: f64,
    seed: u64,
) -> PyResult<String> {
    let j: io::PolyFormJson = io::parse_json(form_json).map_err(py_err)?;
    let omega = io::polyform_from_json(&j).map_err(py_err)?;
    let s = CoordinateSplit::new(omega.dimension(), &x, &y).map_err(py_err)?;
    let params = FlattenParams {
        steps,
        samples,
        tol,
        seed,
        ..Default::default()
    };
    let r = flatten::moser_flatten(&omega, &s, &params).map_err(py_err)?;
    Ok(json_string(&report::flatten_json(&r)))
}

/// Frobenius check of a polynomial distribution given as JSON text.
#[pyfunction]
#[pyo3(signature = (distribution_json, probes = 5, seed = 7))]
fn involutive(distribution_json: &str, probes: usize, seed: u64) -> PyResult<String> {
    let j: io::DistributionJson = io::parse_json(distribution_json).map_err(py_err)?;
    let dist = io::distribution_from_json(&j).map_err(py_err)?;
    let r = flatten::involutive(&dist, probes, seed).map_err(py_err)?;
    Ok(json_string(&report::involutive_json(&r)))
}

#[pymodule]
fn isodec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("IsodecError", m.py().get_type::<IsodecError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyForm>()?;
    m.add_class::<PySubspace>()?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(is_k_isotropic, m)?)?;
    m.add_function(wrap_pyfunction!(complement, m)?)?;
    m.add_function(wrap_pyfunction!(nl, m)?)?;
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add_function(wrap_pyfunction!(flatten_form, m)?)?;
    m.add_function(wrap_pyfunction!(involutive, m)?)?;
    Ok(())
}
