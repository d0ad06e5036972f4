//! Python bindings for the distribution-pairing engine.
//!
//! Exposes the singular kernels, the smooth probe family, the pairing
//! operations and the moment machinery in-process, so the numerics can be
//! driven from a notebook or a script without shelling out to the CLI.
//! Values come back as plain floats and dicts; exact Bernoulli numbers come
//! back as numerator/denominator strings to avoid silent precision loss.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use distpair::moments;
use distpair::pairing::{self, KernelKind, KernelSpec, LadderSpec, PairingResult};
use distpair::probes::{shifted_family, FamilySeed, Probe, TestFunction};
use distpair::special::{self, SeriesTruncation};

fn value_error<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn result_dict<'py>(py: Python<'py>, r: &PairingResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("error_estimate", r.error_estimate)?;
    d.set_item("nodes_used", r.nodes_used)?;
    d.set_item("converged", r.converged)?;
    Ok(d)
}

/// A singular kernel together with its admissible regularization.
#[pyclass(name = "Kernel", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyKernel {
    inner: KernelSpec,
}

#[pymethods]
impl PyKernel {
    /// `coth y` under the principal-value reading.
    #[staticmethod]
    fn coth() -> Self {
        PyKernel { inner: KernelSpec::coth() }
    }

    /// `1/y` under the principal-value reading.
    #[staticmethod]
    fn inv_y() -> Self {
        PyKernel { inner: KernelSpec::inv_y() }
    }

    /// Standardized `csch^2 y` under the finite-part reading.
    #[staticmethod]
    fn csch2() -> Self {
        PyKernel { inner: KernelSpec::csch2() }
    }

    /// `1/y^2` under the finite-part reading.
    #[staticmethod]
    fn inv_y2() -> Self {
        PyKernel { inner: KernelSpec::inv_y2() }
    }

    /// The bounded remainder `coth y - 1/y`; an ordinary integrable kernel.
    #[staticmethod]
    fn langevin() -> Self {
        PyKernel { inner: KernelSpec::langevin() }
    }

    /// Real part of `coth(y + i eps)` at fixed positive `eps`.
    #[staticmethod]
    fn coth_eps_real(eps: f64) -> Self {
        PyKernel { inner: KernelSpec::coth_eps_real(eps) }
    }

    /// Imaginary part of `coth(y + i eps)` at fixed positive `eps`.
    #[staticmethod]
    fn coth_eps_imag(eps: f64) -> Self {
        PyKernel { inner: KernelSpec::coth_eps_imag(eps) }
    }

    fn __repr__(&self) -> String {
        format!("Kernel({})", self.inner.digest_string())
    }
}

/// A smooth test function: Gaussian, Hermite-modulated Gaussian, or a
/// compactly supported bump.
#[pyclass(name = "TestFunction", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyTestFunction {
    inner: TestFunction,
}

#[pymethods]
impl PyTestFunction {
    /// `exp(-(y - center)^2 / (2 width^2))`.
    #[staticmethod]
    fn gaussian(center: f64, width: f64) -> PyResult<Self> {
        Ok(PyTestFunction { inner: TestFunction::gaussian(center, width).map_err(value_error)? })
    }

    /// Hermite polynomial of the given order times the Gaussian envelope.
    #[staticmethod]
    fn hermite(order: u32, center: f64, width: f64) -> PyResult<Self> {
        Ok(PyTestFunction {
            inner: TestFunction::hermite(order, center, width).map_err(value_error)?,
        })
    }

    /// `exp(-width^2 / (width^2 - (y - center)^2))` inside its support,
    /// zero outside.
    #[staticmethod]
    fn bump(center: f64, width: f64) -> PyResult<Self> {
        Ok(PyTestFunction { inner: TestFunction::bump(center, width).map_err(value_error)? })
    }

    /// Evaluate the probe or one of its derivatives.
    #[pyo3(signature = (y, order = 0))]
    fn eval(&self, y: f64, order: u32) -> PyResult<f64> {
        self.inner.eval(y, order).map_err(value_error)
    }

    fn label(&self) -> String {
        self.inner.label()
    }

    fn __repr__(&self) -> String {
        format!("TestFunction({})", self.inner.label())
    }
}

/// `<T, phi>` for a kernel under its regularization; returns a dict with
/// `value`, `error_estimate`, `nodes_used` and `converged`.
#[pyfunction]
#[pyo3(signature = (kernel, phi, tol = 1e-9))]
fn pair<'py>(
    py: Python<'py>,
    kernel: &PyKernel,
    phi: &PyTestFunction,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = pairing::pair(&kernel.inner, &phi.inner, tol).map_err(value_error)?;
    result_dict(py, &r)
}

/// `<T', phi> = -<T, phi'>`, the weak (distributional) derivative pairing.
#[pyfunction]
#[pyo3(signature = (kernel, phi, tol = 1e-9))]
fn weak_derivative_pair<'py>(
    py: Python<'py>,
    kernel: &PyKernel,
    phi: &PyTestFunction,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = pairing::weak_derivative_pair(&kernel.inner, &phi.inner, tol).map_err(value_error)?;
    result_dict(py, &r)
}

/// `lim_{eps -> 0} <Im coth(. + i eps), phi>`, extrapolated down a strictly
/// decreasing eps ladder; the limit is `-pi phi(0)`.
#[pyfunction]
#[pyo3(signature = (phi, eps_ladder = None, tol = 1e-7))]
fn nascent_delta_limit<'py>(
    py: Python<'py>,
    phi: &PyTestFunction,
    eps_ladder: Option<Vec<f64>>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let ladder = match eps_ladder {
        Some(values) => {
            let order = values.len().saturating_sub(1).clamp(1, 5);
            LadderSpec::new(values, order).map_err(value_error)?
        }
        None => LadderSpec::default_eps(),
    };
    let r = pairing::pair_with_ladder(KernelKind::CothEpsImag, &phi.inner, &ladder, tol)
        .map_err(value_error)?;
    result_dict(py, &r)
}

/// Run the derivative-identity check over the standard probe battery.
/// Returns the verdict, the worst residual, and one row per probe.
#[pyfunction]
#[pyo3(signature = (tol = 1e-6))]
fn check_derivative_identity(py: Python<'_>, tol: f64) -> PyResult<Bound<'_, PyDict>> {
    let battery = shifted_family(&FamilySeed::default()).map_err(value_error)?;
    let outcome = pairing::check_derivative_identity(&battery, tol).map_err(value_error)?;
    let d = PyDict::new(py);
    d.set_item("name", &outcome.name)?;
    d.set_item("verdict", outcome.verdict.as_str())?;
    d.set_item("residual", outcome.residual)?;
    d.set_item("tolerance", outcome.tolerance)?;
    let rows = PyList::empty(py);
    for row in &outcome.details {
        let r = PyDict::new(py);
        r.set_item("label", &row.label)?;
        for (k, v) in &row.values {
            r.set_item(k, v)?;
        }
        rows.append(r)?;
    }
    d.set_item("rows", rows)?;
    Ok(d)
}

/// `n`-th moment `<T, y^n e^{-y^2}>` of a kernel.
#[pyfunction]
#[pyo3(signature = (kernel, n, tol = 1e-9))]
fn moment<'py>(
    py: Python<'py>,
    kernel: &PyKernel,
    n: u32,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = moments::moment(&kernel.inner, n, tol).map_err(value_error)?;
    result_dict(py, &r)
}

/// Closed form for the shifted even moment `mu_2m(eps)` of the eps-shifted
/// kernel, in terms of an odd Bernoulli polynomial.
#[pyfunction]
fn moment_formula(m: u32, eps: f64) -> PyResult<f64> {
    moments::moment_formula(m, eps).map_err(value_error)
}

/// `int_0^inf x^{2m} / (cosh x - cos(2 pi a)) dx` by direct quadrature.
#[pyfunction]
#[pyo3(signature = (m, a, tol = 1e-10))]
fn cosh_power_integral<'py>(
    py: Python<'py>,
    m: u32,
    a: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = moments::cosh_power_integral(m, a, tol).map_err(value_error)?;
    result_dict(py, &r)
}

/// `sum_k sin(2 pi k a) / k^{2n+1}` in closed Bernoulli-polynomial form.
#[pyfunction]
fn bernoulli_sine_series(n: u32, a: f64) -> PyResult<f64> {
    moments::bernoulli_sine_series(n, a).map_err(value_error)
}

/// `coth y` in the stable `1 + 2/expm1(2y)` form.
#[pyfunction]
fn coth(y: f64) -> PyResult<f64> {
    special::coth_direct(y).map_err(value_error)
}

/// `csch^2 y = 1/sinh^2 y`.
#[pyfunction]
fn csch2(y: f64) -> PyResult<f64> {
    special::csch2_direct(y).map_err(value_error)
}

/// `coth y` reassembled as `sign(y) (1 + 2/(e^{2|y|} - 1))`.
#[pyfunction]
fn decompose_sign(y: f64) -> PyResult<f64> {
    special::decompose_sign(y).map_err(value_error)
}

/// `coth y - 1/y`, the bounded remainder.
#[pyfunction]
fn langevin(y: f64) -> f64 {
    special::langevin(y)
}

/// Partial-fraction series for `coth` truncated at `k` terms, optionally
/// with the closed-form tail estimate added.
#[pyfunction]
#[pyo3(signature = (y, k, tail_correction = true))]
fn coth_series(y: f64, k: u64, tail_correction: bool) -> PyResult<f64> {
    let trunc = SeriesTruncation::new(k, tail_correction).map_err(value_error)?;
    special::coth_series(y, trunc).map_err(value_error)
}

/// Partial-fraction series for `csch^2` truncated at `k` terms.
#[pyfunction]
#[pyo3(signature = (y, k, tail_correction = true))]
fn csch2_series(y: f64, k: u64, tail_correction: bool) -> PyResult<f64> {
    let trunc = SeriesTruncation::new(k, tail_correction).map_err(value_error)?;
    special::csch2_series(y, trunc).map_err(value_error)
}

/// Exact Bernoulli number `B_n` as a `(numerator, denominator)` string pair.
#[pyfunction]
fn bernoulli_number(n: u32) -> (String, String) {
    let b = special::bernoulli::bernoulli_number(n);
    (b.numer().to_string(), b.denom().to_string())
}

/// Bernoulli polynomial `B_n(x)` evaluated in double precision.
#[pyfunction]
fn bernoulli_polynomial(n: u32, x: f64) -> f64 {
    special::bernoulli::bernoulli_polynomial(n, x)
}

/// Distribution-pairing laboratory: singular kernels against smooth probes,
/// driven in-process.
#[pymodule]
fn distpair_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKernel>()?;
    m.add_class::<PyTestFunction>()?;
    m.add_function(wrap_pyfunction!(pair, m)?)?;
    m.add_function(wrap_pyfunction!(weak_derivative_pair, m)?)?;
    m.add_function(wrap_pyfunction!(nascent_delta_limit, m)?)?;
    m.add_function(wrap_pyfunction!(check_derivative_identity, m)?)?;
    m.add_function(wrap_pyfunction!(moment, m)?)?;
    m.add_function(wrap_pyfunction!(moment_formula, m)?)?;
    m.add_function(wrap_pyfunction!(cosh_power_integral, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_sine_series, m)?)?;
    m.add_function(wrap_pyfunction!(coth, m)?)?;
    m.add_function(wrap_pyfunction!(csch2, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_sign, m)?)?;
    m.add_function(wrap_pyfunction!(langevin, m)?)?;
    m.add_function(wrap_pyfunction!(coth_series, m)?)?;
    m.add_function(wrap_pyfunction!(csch2_series, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_number, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_polynomial, m)?)?;
    Ok(())
}
