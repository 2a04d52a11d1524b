//! Python bindings: `mdspline.Space`, `mdspline.Basis` and `mdspline.Curve`.
//!
//! Validation failures raise `mdspline.ValidationError`, operator
//! preconditions raise `mdspline.PreconditionError` (both subclass
//! `ValueError`) and internal failures raise `RuntimeError`.

use std::sync::Arc;

use mdspline::sample::{sample, Quantity};
use mdspline::{BSplineBasis, ConnectionMatrix, ErrorKind, ExtendedPartitions, MDCurve, SpaceDocument, SplineSpace};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(mdspline, ValidationError, PyValueError);
create_exception!(mdspline, PreconditionError, PyValueError);

fn py_err(e: mdspline::Error) -> PyErr {
    match e.kind() {
        ErrorKind::Validation => ValidationError::new_err(e.to_string()),
        ErrorKind::Precondition => PreconditionError::new_err(e.to_string()),
        ErrorKind::Internal => PyRuntimeError::new_err(e.to_string()),
    }
}

/// A multi-degree spline space.
///
/// `connections`, when given, holds one connection matrix per break-point
/// as a list of rows (lower triangular, first row `[1]`).
#[pyclass(frozen, module = "mdspline")]
pub struct Space {
    inner: SplineSpace,
}

#[pymethods]
impl Space {
    #[new]
    #[pyo3(signature = (domain, breakpoints, degrees, continuities, connections=None))]
    fn new(
        domain: (f64, f64),
        breakpoints: Vec<f64>,
        degrees: Vec<usize>,
        continuities: Vec<usize>,
        connections: Option<Vec<Vec<Vec<f64>>>>,
    ) -> PyResult<Self> {
        let domain = [domain.0, domain.1];
        let inner = match connections {
            None => SplineSpace::new(domain, breakpoints, degrees, continuities),
            Some(ms) => {
                let ms = ms
                    .iter()
                    .map(|rows| ConnectionMatrix::from_rows(rows))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(ValidationError::new_err)?;
                SplineSpace::with_connections(domain, breakpoints, degrees, continuities, ms)
            }
        }
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Space of a JSON document; control points, if present, are ignored.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = SpaceDocument::from_json(text).and_then(|d| d.to_space()).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        SpaceDocument::from_space(&self.inner).to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        (self.inner.a(), self.inner.b())
    }

    #[getter]
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().to_vec()
    }

    #[getter]
    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees().to_vec()
    }

    #[getter]
    fn continuities(&self) -> Vec<usize> {
        self.inner.continuities().to_vec()
    }

    #[getter]
    fn is_geometric(&self) -> bool {
        self.inner.is_geometric()
    }

    /// Extended partitions `(s, t)`.
    fn partitions(&self) -> (Vec<f64>, Vec<f64>) {
        let p = ExtendedPartitions::new(&self.inner);
        (p.s().to_vec(), p.t().to_vec())
    }

    fn zero_bound(&self, p: usize, r: usize) -> PyResult<usize> {
        self.inner.zero_bound(p, r).map_err(py_err)
    }

    fn basis(&self) -> PyResult<Basis> {
        Basis::new(self)
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!(
            "Space(domain={:?}, breakpoints={:?}, degrees={:?}, continuities={:?})",
            self.inner.domain(),
            self.inner.breakpoints(),
            self.inner.degrees(),
            self.inner.continuities()
        )
    }
}

/// The B-spline basis `N_1..N_K` of a space (0-based in Python).
#[pyclass(frozen, module = "mdspline")]
pub struct Basis {
    inner: Arc<BSplineBasis>,
}

#[pymethods]
impl Basis {
    #[new]
    fn new(space: &Space) -> PyResult<Self> {
        let inner = BSplineBasis::new(&space.inner).map_err(py_err)?;
        Ok(Self { inner: Arc::new(inner) })
    }

    #[getter]
    fn space(&self) -> Space {
        Space { inner: self.inner.space().clone() }
    }

    /// All `K` basis values at `x`.
    fn eval(&self, x: f64) -> PyResult<Vec<f64>> {
        self.inner.eval_all(x).map_err(py_err)
    }

    fn eval_many(&self, xs: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        xs.into_iter().map(|x| self.eval(x)).collect()
    }

    /// `order`-th derivatives of all basis functions at `x`.
    fn derivative(&self, x: f64, order: usize) -> PyResult<Vec<f64>> {
        self.inner.derivative(order).iter().map(|f| f.eval(x).map_err(py_err)).collect()
    }

    /// Transition function values `f_1(x)..f_K(x)`.
    fn transitions(&self, x: f64) -> PyResult<Vec<f64>> {
        let ts = self
            .inner
            .transitions()
            .ok_or_else(|| PyRuntimeError::new_err("basis was built without transition functions"))?;
        ts.functions().iter().map(|f| f.eval(x).map_err(py_err)).collect()
    }

    fn support(&self, i: usize) -> PyResult<(f64, f64)> {
        if i >= self.inner.len() {
            return Err(PreconditionError::new_err(format!("index {i} out of range for {} functions", self.inner.len())));
        }
        Ok(self.inner.support(i))
    }

    /// Sample table `(columns, rows)` of `basis`, `transitions` or
    /// `derivative:R` on `n` uniformly spaced parameters.
    #[pyo3(signature = (what="basis", n=200))]
    fn sample(&self, what: &str, n: usize) -> PyResult<(Vec<String>, Vec<Vec<f64>>)> {
        let what: Quantity = what.parse().map_err(py_err)?;
        if what == Quantity::Curve {
            return Err(PyValueError::new_err("use Curve.sample for curve points"));
        }
        let t = sample(&self.inner, None, what, n).map_err(py_err)?;
        Ok((t.columns, t.rows))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// A multi-degree spline curve. Operators return new curves.
#[pyclass(frozen, module = "mdspline")]
pub struct Curve {
    inner: MDCurve,
}

#[pymethods]
impl Curve {
    #[new]
    fn new(space: &Space, points: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self { inner: MDCurve::new(&space.inner, points).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = SpaceDocument::from_json(text).and_then(|d| d.to_curve()).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        SpaceDocument::from_curve(&self.inner).to_json()
    }

    #[getter]
    fn space(&self) -> Space {
        Space { inner: self.inner.space().clone() }
    }

    #[getter]
    fn control_points(&self) -> Vec<Vec<f64>> {
        self.inner.control_points()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn basis(&self) -> Basis {
        Basis { inner: Arc::new(self.inner.basis().clone()) }
    }

    fn eval(&self, x: f64) -> PyResult<Vec<f64>> {
        self.inner.eval(x).map_err(py_err)
    }

    fn eval_many(&self, xs: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        xs.into_iter().map(|x| self.eval(x)).collect()
    }

    #[pyo3(signature = (n=200))]
    fn sample(&self, n: usize) -> PyResult<(Vec<String>, Vec<Vec<f64>>)> {
        let t = sample(self.inner.basis(), Some(&self.inner), Quantity::Curve, n).map_err(py_err)?;
        Ok((t.columns, t.rows))
    }

    fn with_point(&self, index: usize, point: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: self.inner.with_point(index, &point).map_err(py_err)? })
    }

    /// Refined curve with one knot inserted at `x`, plus the coefficients
    /// `alpha`, `beta` of `f_i = alpha_i f^_i + beta_i f^_{i+1}`.
    fn insert_knot(&self, x: f64) -> PyResult<(Self, Vec<f64>, Vec<f64>)> {
        let r = self.inner.insert_knot(x).map_err(py_err)?;
        Ok((Self { inner: r.curve }, r.alpha, r.beta))
    }

    /// Raise the degree of the 0-based interval `interval` by `times`.
    #[pyo3(signature = (interval, times=1))]
    fn elevate(&self, interval: usize, times: usize) -> PyResult<Self> {
        Ok(Self { inner: self.inner.elevate_degree(interval, times).map_err(py_err)? })
    }

    fn to_conventional(&self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.to_conventional().map_err(py_err)? })
    }

    /// Bezier segments as `(interval, degree, points)` tuples.
    #[allow(clippy::type_complexity)]
    fn to_bezier(&self) -> Vec<((f64, f64), usize, Vec<Vec<f64>>)> {
        self.inner
            .to_bezier()
            .segments
            .into_iter()
            .map(|s| ((s.interval[0], s.interval[1]), s.degree, s.points))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pymodule]
#[pyo3(name = "mdspline")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Space>()?;
    m.add_class::<Basis>()?;
    m.add_class::<Curve>()?;
    m.add("ValidationError", m.py().get_type::<ValidationError>())?;
    m.add("PreconditionError", m.py().get_type::<PreconditionError>())?;
    Ok(())
}
