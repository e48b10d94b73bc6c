//! Python bindings.  Points are Python complex numbers; `None` or any value
//! with an infinite component is the point at infinity.  Reports and
//! summaries are returned as plain dicts.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use pd::harness::{CampaignConfig, OutputFormat};
use pd::{ChebDegree, CollinearQuad, ExtendedPoint, InequalityReport, Statement, TwoSlitDomain, Witnesses};
use polydistort as pd;

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl ToString) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Serializes through JSON so Python sees the same fields as the CLI.
fn to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(runtime_err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn extended(z: Option<Complex64>) -> PyResult<ExtendedPoint> {
    match z {
        None => Ok(ExtendedPoint::Infinity),
        Some(z) => ExtendedPoint::new(z).map_err(value_err),
    }
}

fn from_extended(z: ExtendedPoint) -> Option<Complex64> {
    z.finite()
}

fn degree(n: usize) -> PyResult<ChebDegree> {
    ChebDegree::new(n).map_err(value_err)
}

fn quad(points: [Option<Complex64>; 4]) -> PyResult<CollinearQuad> {
    let pts = [
        extended(points[0])?,
        extended(points[1])?,
        extended(points[2])?,
        extended(points[3])?,
    ];
    CollinearQuad::from_points(pts).map_err(value_err)
}

fn report(py: Python<'_>, r: Result<InequalityReport, pd::inequalities::CheckError>) -> PyResult<Py<PyAny>> {
    to_py(py, &r.map_err(runtime_err)?)
}

#[pyclass(name = "Polynomial", module = "polydistort", frozen)]
struct PyPolynomial {
    inner: pd::Polynomial,
}

#[pymethods]
impl PyPolynomial {
    /// Coefficients in ascending order.
    #[new]
    fn new(coeffs: Vec<Complex64>) -> PyResult<Self> {
        pd::Polynomial::new(coeffs)
            .map(|inner| PyPolynomial { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn from_roots(leading: Complex64, roots: Vec<Complex64>) -> PyResult<Self> {
        pd::Polynomial::from_roots(leading, &roots)
            .map(|inner| PyPolynomial { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn chebyshev(n: usize) -> PyResult<Self> {
        Ok(PyPolynomial {
            inner: pd::cheb_coeffs(degree(n)?),
        })
    }

    /// A reproducible random member of the class, normalized so the largest
    /// critical value has modulus one.
    #[staticmethod]
    #[pyo3(signature = (n, seed, real = false))]
    fn random_in_class(n: usize, seed: u64, real: bool) -> PyResult<Self> {
        let cfg = if real {
            pd::SamplingConfig::real()
        } else {
            pd::SamplingConfig::default()
        };
        pd::random_in_class(n, seed, &cfg)
            .map(|inner| PyPolynomial { inner })
            .map_err(runtime_err)
    }

    #[getter]
    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn __call__(&self, z: Complex64) -> Complex64 {
        self.inner.evaluate(z)
    }

    fn derivative(&self) -> PyResult<Self> {
        self.inner
            .derivative()
            .map(|inner| PyPolynomial { inner })
            .map_err(value_err)
    }

    /// `z -> P(z + a)`.
    fn shift(&self, a: Complex64) -> Self {
        PyPolynomial {
            inner: self.inner.shift(a),
        }
    }

    fn roots(&self) -> PyResult<Vec<Complex64>> {
        self.inner.roots().map(|r| r.roots).map_err(runtime_err)
    }

    /// `(critical_points, critical_values)`.
    fn critical(&self) -> PyResult<(Vec<Complex64>, Vec<Complex64>)> {
        let p = pd::critical_profile(&self.inner).map_err(runtime_err)?;
        Ok((p.critical_points, p.critical_values))
    }

    #[pyo3(signature = (tol = pd::inequalities::DEFAULT_TOL))]
    fn in_class(&self, tol: f64) -> PyResult<bool> {
        pd::is_in_class(&self.inner, tol).map(|(ok, _)| ok).map_err(runtime_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(runtime_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(|inner| PyPolynomial { inner })
            .map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("Polynomial({})", serde_json::to_string(&self.inner).unwrap_or_default())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyfunction]
fn cheb_eval(n: usize, z: Complex64) -> PyResult<Complex64> {
    Ok(pd::cheb_eval(degree(n)?, z))
}

#[pyfunction]
fn cheb_inverse_ray(n: usize, y: f64) -> PyResult<f64> {
    pd::cheb_inverse_ray(degree(n)?, y).map_err(value_err)
}

#[pyfunction]
fn largest_zero(n: usize) -> PyResult<f64> {
    Ok(pd::largest_zero(degree(n)?))
}

/// `(a1, a2, a3, a4) = (a3 - a1)(a4 - a2) / ((a3 - a2)(a4 - a1))`; `None` is
/// infinity, both as input and as result.
#[pyfunction]
fn cross_ratio(
    a1: Option<Complex64>,
    a2: Option<Complex64>,
    a3: Option<Complex64>,
    a4: Option<Complex64>,
) -> PyResult<Option<Complex64>> {
    pd::cross_ratio(extended(a1)?, extended(a2)?, extended(a3)?, extended(a4)?)
        .map(from_extended)
        .map_err(value_err)
}

#[pyfunction]
fn grotzsch_mu(r: f64) -> PyResult<f64> {
    pd::grotzsch_mu(r).map_err(value_err)
}

fn domain(a: f64, b: f64, c: f64, d: f64) -> PyResult<TwoSlitDomain> {
    use pd::ExtReal;
    TwoSlitDomain::new(
        ExtReal::from_f64(a),
        ExtReal::from_f64(b),
        ExtReal::from_f64(c),
        ExtReal::from_f64(d),
    )
    .map_err(value_err)
}

/// Modulus of the complement of `[a, b] u [c, d]`; `a` may be `-inf` and
/// `d` may be `inf`.
#[pyfunction]
fn two_slit_modulus(a: f64, b: f64, c: f64, d: f64) -> PyResult<f64> {
    Ok(pd::two_slit_modulus(&domain(a, b, c, d)?))
}

/// Grid estimate of the same modulus, `(value, error_estimate)`.
#[pyfunction]
#[pyo3(signature = (a, b, c, d, resolution = 24))]
fn modulus_oracle(a: f64, b: f64, c: f64, d: f64, resolution: usize) -> PyResult<(f64, f64)> {
    let cfg = pd::OracleConfig {
        resolution,
        ..Default::default()
    };
    let est = pd::modulus_oracle(&domain(a, b, c, d)?, &cfg).map_err(value_err)?;
    Ok((est.value, est.error_estimate))
}

const TOL: f64 = pd::inequalities::DEFAULT_TOL;

#[pyfunction]
#[pyo3(signature = (p, points, tol = TOL))]
fn theorem1_check(py: Python<'_>, p: &PyPolynomial, points: [Option<Complex64>; 4], tol: f64) -> PyResult<Py<PyAny>> {
    report(py, pd::theorem1_check(&p.inner, &quad(points)?, tol))
}

#[pyfunction]
#[pyo3(signature = (p, points, tol = TOL))]
fn remark1_check(py: Python<'_>, p: &PyPolynomial, points: [Option<Complex64>; 4], tol: f64) -> PyResult<Py<PyAny>> {
    report(py, pd::remark1_check(&p.inner, &quad(points)?, tol))
}

#[pyfunction]
#[pyo3(signature = (p, z1, z2, z, tol = TOL))]
fn corollary1_check(
    py: Python<'_>,
    p: &PyPolynomial,
    z1: Complex64,
    z2: Complex64,
    z: Complex64,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    report(py, pd::corollary1_check(&p.inner, z1, z2, z, tol))
}

#[pyfunction]
#[pyo3(signature = (p, z1, z2, tol = TOL))]
fn corollary2_check(py: Python<'_>, p: &PyPolynomial, z1: Complex64, z2: Complex64, tol: f64) -> PyResult<Py<PyAny>> {
    report(py, pd::corollary2_check(&p.inner, z1, z2, tol))
}

#[pyfunction]
#[pyo3(signature = (p, z, tol = TOL))]
fn corollary3_check(py: Python<'_>, p: &PyPolynomial, z: Complex64, tol: f64) -> PyResult<Py<PyAny>> {
    report(py, pd::corollary3_check(&p.inner, z, tol))
}

#[pyfunction]
#[pyo3(signature = (p, tol = TOL))]
fn corollary4_check(py: Python<'_>, p: &PyPolynomial, tol: f64) -> PyResult<Py<PyAny>> {
    report(py, pd::corollary4_check(&p.inner, tol))
}

#[pyfunction]
#[pyo3(signature = (p, tol = TOL))]
fn corollary4_upper_check(py: Python<'_>, p: &PyPolynomial, tol: f64) -> PyResult<Py<PyAny>> {
    report(py, pd::corollary4_upper_check(&p.inner, tol))
}

#[pyfunction]
#[pyo3(signature = (p, tol = TOL))]
fn corollary5_check(py: Python<'_>, p: &PyPolynomial, tol: f64) -> PyResult<Py<PyAny>> {
    report(py, pd::corollary5_check(&p.inner, tol))
}

#[pyfunction]
fn corollary5_d(p: &PyPolynomial) -> PyResult<f64> {
    pd::corollary5_d(&p.inner).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (p, x, h = None, tol = TOL))]
fn eq8_check(py: Python<'_>, p: &PyPolynomial, x: f64, h: Option<f64>, tol: f64) -> PyResult<Py<PyAny>> {
    report(py, pd::eq8_check(&p.inner, x, h, tol))
}

/// Checks a statement on a witness given as JSON text, as the CLI does.
#[pyfunction]
#[pyo3(signature = (statement, witness, tol = None))]
fn verify(py: Python<'_>, statement: &str, witness: &str, tol: Option<f64>) -> PyResult<Py<PyAny>> {
    let statement: Statement = statement.parse().map_err(value_err)?;
    let w: Witnesses = serde_json::from_str(witness).map_err(value_err)?;
    to_py(py, &pd::verify(statement, &w, tol).map_err(value_err)?)
}

#[pyfunction]
fn bounds(py: Python<'_>, p: &PyPolynomial) -> PyResult<Py<PyAny>> {
    to_py(py, &pd::bounds_report(&p.inner).map_err(value_err)?)
}

#[pyfunction]
#[pyo3(signature = (n, trials = 100, seed = 0))]
fn run_equality(py: Python<'_>, n: usize, trials: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let summary = py.detach(|| pd::run_equality(n, trials, seed)).map_err(value_err)?;
    to_py(py, &summary)
}

/// Runs a campaign from a JSON config and returns its summary.  The config's
/// output file, if any, is written in its format.
#[pyfunction]
fn run_campaign(py: Python<'_>, config: &str) -> PyResult<Py<PyAny>> {
    let cfg: CampaignConfig = serde_json::from_str(config).map_err(value_err)?;
    let outcome = py.detach(|| pd::run_campaign(&cfg)).map_err(value_err)?;
    if let Some(path) = &cfg.output {
        let file = std::fs::File::create(path).map_err(runtime_err)?;
        match cfg.format {
            OutputFormat::Csv => pd::harness::write_trials_csv(&outcome.trials, file).map_err(runtime_err)?,
            OutputFormat::Json => serde_json::to_writer(file, &outcome.trials).map_err(runtime_err)?,
        }
    }
    to_py(py, &outcome.summary)
}

#[pymodule]
#[pyo3(name = "polydistort")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_function(wrap_pyfunction!(cheb_eval, m)?)?;
    m.add_function(wrap_pyfunction!(cheb_inverse_ray, m)?)?;
    m.add_function(wrap_pyfunction!(largest_zero, m)?)?;
    m.add_function(wrap_pyfunction!(cross_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(grotzsch_mu, m)?)?;
    m.add_function(wrap_pyfunction!(two_slit_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(modulus_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_check, m)?)?;
    m.add_function(wrap_pyfunction!(remark1_check, m)?)?;
    m.add_function(wrap_pyfunction!(corollary1_check, m)?)?;
    m.add_function(wrap_pyfunction!(corollary2_check, m)?)?;
    m.add_function(wrap_pyfunction!(corollary3_check, m)?)?;
    m.add_function(wrap_pyfunction!(corollary4_check, m)?)?;
    m.add_function(wrap_pyfunction!(corollary4_upper_check, m)?)?;
    m.add_function(wrap_pyfunction!(corollary5_check, m)?)?;
    m.add_function(wrap_pyfunction!(corollary5_d, m)?)?;
    m.add_function(wrap_pyfunction!(eq8_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(run_equality, m)?)?;
    m.add_function(wrap_pyfunction!(run_campaign, m)?)?;
    m.add(
        "STATEMENTS",
        Statement::ALL.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
    )?;
    Ok(())
}
