use std::collections::HashMap;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use schouten_core::catalog::{load_catalog, verify_catalog, VerifyOptions};
use schouten_core::exactpoly::rational::ratio;
use schouten_core::exactpoly::{parse_polynomial, Polynomial, Rational, VariableTable};
use schouten_core::geometry::{curvature_operator_pipeline, ConnectionKind};
use schouten_core::liealgebras::{build_family, parse_custom_algebra, Eta, FamilyId, LieAlgebraFamily};
use schouten_core::soliton::{
    scan as scan_family, soliton_system, SolitonSystem, DEFAULT_LAMBDA0_GRID, DEFAULT_TOLERANCE,
};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_kind(kind: &str) -> PyResult<ConnectionKind> {
    kind.parse().map_err(|e: String| PyValueError::new_err(e))
}

/// A rational from a Python int, str or `fractions.Fraction`.
fn to_rational(value: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = value.str()?.to_string();
    let vars = VariableTable::new(Vec::<String>::new()).map_err(value_error)?;
    parse_polynomial(&text, &vars)
        .ok()
        .and_then(|p| p.constant_value())
        .ok_or_else(|| PyValueError::new_err(format!("not a rational number: {text}")))
}

fn to_fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.to_string(),))
}

/// Exact polynomial over the rationals.
#[pyclass(name = "Polynomial", module = "schouten", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPolynomial {
    inner: Polynomial,
}

impl PyPolynomial {
    fn wrap(inner: Polynomial) -> Self {
        PyPolynomial { inner }
    }
}

#[pymethods]
impl PyPolynomial {
    /// Parses `text` over `variables`, or over the standard table when omitted.
    #[new]
    #[pyo3(signature = (text, variables=None))]
    fn new(text: &str, variables: Option<Vec<String>>) -> PyResult<Self> {
        let vars: Arc<VariableTable> = match variables {
            Some(names) => VariableTable::new(names).map_err(value_error)?,
            None => VariableTable::standard(),
        };
        parse_polynomial(text, &vars).map(Self::wrap).map_err(value_error)
    }

    fn variables(&self) -> Vec<String> {
        self.inner.vars().names().to_vec()
    }

    fn degree(&self) -> Option<u32> {
        self.inner.total_degree()
    }

    fn degree_in(&self, name: &str) -> PyResult<u32> {
        self.inner.degree_in_var(name).map_err(value_error)
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Exact value as a `fractions.Fraction`; every variable that occurs must be bound.
    fn eval<'py>(&self, py: Python<'py>, point: HashMap<String, Bound<'py, PyAny>>) -> PyResult<Bound<'py, PyAny>> {
        let mut values = std::collections::BTreeMap::new();
        for (name, v) in &point {
            values.insert(name.clone(), to_rational(v)?);
        }
        let r = self.inner.eval(&values).map_err(value_error)?;
        to_fraction(py, &r)
    }

    fn substitute(&self, name: &str, replacement: &Self) -> PyResult<Self> {
        self.inner.substitute_var(name, &replacement.inner).map(Self::wrap).map_err(value_error)
    }

    fn reduce_square(&self, name: &str, rhs: &Self) -> PyResult<Self> {
        self.inner.reduce_square_var(name, &rhs.inner).map(Self::wrap).map_err(value_error)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.inner.checked_add(&other.inner).map(Self::wrap).map_err(value_error)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.inner.checked_sub(&other.inner).map(Self::wrap).map_err(value_error)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.inner.checked_mul(&other.inner).map(Self::wrap).map_err(value_error)
    }

    fn __neg__(&self) -> Self {
        Self::wrap(-&self.inner)
    }

    fn __pow__(&self, exponent: u32, _modulo: Option<u32>) -> Self {
        Self::wrap(self.inner.pow(exponent))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial('{}')", self.inner)
    }
}

/// One of `g1..g7`, or a custom algebra.
#[pyclass(name = "Family", module = "schouten", frozen)]
struct PyFamily {
    inner: LieAlgebraFamily,
}

#[pymethods]
impl PyFamily {
    #[new]
    #[pyo3(signature = (name, eta=None))]
    fn new(name: &str, eta: Option<i64>) -> PyResult<Self> {
        let id: FamilyId = name.parse().map_err(value_error)?;
        let eta = eta
            .map(|v| Eta::from_value(v).ok_or_else(|| PyValueError::new_err(format!("eta must be 1 or -1, got {v}"))))
            .transpose()?;
        build_family(&id, eta).map(|inner| PyFamily { inner }).map_err(value_error)
    }

    /// Builds a family from the text of an algebra file.
    #[staticmethod]
    #[pyo3(signature = (text, name="custom"))]
    fn custom(text: &str, name: &str) -> PyResult<Self> {
        parse_custom_algebra(text, name).map(|inner| PyFamily { inner }).map_err(value_error)
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label()
    }

    /// `[e_i, e_j]` for the pairs 12, 13, 23.
    fn brackets(&self) -> HashMap<String, Vec<String>> {
        [("12", 0, 1), ("13", 0, 2), ("23", 1, 2)]
            .into_iter()
            .map(|(key, i, j)| {
                let v = self.inner.structure.bracket_basis(i, j);
                (key.to_string(), v.iter().map(ToString::to_string).collect())
            })
            .collect()
    }

    fn constraints(&self) -> Vec<PyPolynomial> {
        self.inner.constraints.iter().cloned().map(PyPolynomial::wrap).collect()
    }

    fn __repr__(&self) -> String {
        format!("Family('{}')", self.inner.label())
    }
}

/// Ricci operator rows and scalar curvature under `kind`.
#[pyfunction]
fn ricci(family: &PyFamily, kind: &str) -> PyResult<(Vec<Vec<PyPolynomial>>, PyPolynomial)> {
    let data = curvature_operator_pipeline(&family.inner, parse_kind(kind)?);
    let rows = data.operator.0 .0.iter().map(|row| row.iter().cloned().map(PyPolynomial::wrap).collect()).collect();
    Ok((rows, PyPolynomial::wrap(data.scalar)))
}

/// The nine derivation residuals, keyed `12.1` .. `23.3`.
#[pyfunction]
fn system(family: &PyFamily, kind: &str) -> PyResult<Vec<(String, PyPolynomial)>> {
    let sys = soliton_system(&family.inner, parse_kind(kind)?);
    let keys = SolitonSystem::residual_keys().into_iter().map(|k| k.trim_start_matches("residual.").to_string());
    Ok(keys.zip(sys.residuals.iter().cloned().map(PyPolynomial::wrap)).collect())
}

/// Checks the built-in catalog; `only` restricts to one label.
#[pyfunction]
#[pyo3(signature = (seed=0, only=None))]
fn verify<'py>(py: Python<'py>, seed: u64, only: Option<String>) -> PyResult<Bound<'py, PyAny>> {
    let catalog = load_catalog().map_err(value_error)?;
    let report = py.detach(|| verify_catalog(&catalog, &VerifyOptions { seed, only, ..VerifyOptions::default() }));
    json_to_py(py, &report.to_json())
}

/// Solves for `c` at seeded points over the default `lambda0` grid.
#[pyfunction]
#[pyo3(signature = (family, kind, seed=0, count=100, tolerance=DEFAULT_TOLERANCE))]
fn scan<'py>(
    py: Python<'py>,
    family: &PyFamily,
    kind: &str,
    seed: u64,
    count: usize,
    tolerance: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = parse_kind(kind)?;
    let grid: Vec<Rational> = DEFAULT_LAMBDA0_GRID.iter().map(|&(n, d)| ratio(n, d)).collect();
    let report = py.detach(|| scan_family(&family.inner, kind, seed, count, &grid, tolerance)).map_err(value_error)?;
    json_to_py(py, &report)
}

#[pymodule]
fn schouten(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(ricci, m)?)?;
    m.add_function(wrap_pyfunction!(system, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    Ok(())
}
