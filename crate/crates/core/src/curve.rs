//! Parametric multi-degree spline curves and their refinement operators.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::BSplineBasis;
use crate::bernstein::de_casteljau;
use crate::error::{Error, Result};
use crate::space::{ConnectionMatrix, ExtendedPartitions, SplineSpace};

#[derive(Debug, Clone)]
pub struct MDCurve {
    basis: Arc<BSplineBasis>,
    dim: usize,
    /// `K * dim` coordinates, point by point.
    coords: Vec<f64>,
}

/// A refined curve together with the coefficients relating old and new
/// transition functions, `f_i = alpha_i f^_i + beta_i f^_{i+1}`.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub curve: MDCurve,
    pub alpha: Vec<f64>,
    /// Computed independently from the derivatives at `t_{i-1}`.
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BezierSegment {
    pub interval: [f64; 2],
    pub degree: usize,
    pub points: Vec<Vec<f64>>,
}

impl BezierSegment {
    /// de Casteljau evaluation at `x` in the segment interval.
    pub fn eval(&self, x: f64) -> Vec<f64> {
        let u = (x - self.interval[0]) / (self.interval[1] - self.interval[0]);
        let dim = self.points.first().map_or(0, Vec::len);
        (0..dim)
            .map(|c| {
                let coeffs: Vec<f64> = self.points.iter().map(|p| p[c]).collect();
                de_casteljau(&coeffs, u)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BezierSegmentList {
    pub segments: Vec<BezierSegment>,
}

impl BezierSegmentList {
    pub fn eval(&self, x: f64) -> Option<Vec<f64>> {
        let last = self.segments.len().checked_sub(1)?;
        let j = self.segments.partition_point(|s| s.interval[1] <= x).min(last);
        let seg = &self.segments[j];
        (x >= seg.interval[0] && x <= seg.interval[1]).then(|| seg.eval(x))
    }
}

impl MDCurve {
    pub fn new(space: &SplineSpace, points: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_basis(Arc::new(BSplineBasis::new(space)?), points)
    }

    pub fn from_basis(basis: Arc<BSplineBasis>, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.len() != basis.len() {
            return Err(Error::ControlPointCount { expected: basis.len(), got: points.len() });
        }
        let dim = points.first().map_or(0, Vec::len);
        if !(1..=3).contains(&dim) {
            return Err(Error::Dimension(dim));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::Dimension(p.len()));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Document("control point coordinates must be finite".into()));
        }
        Ok(Self { basis, dim, coords: points.concat() })
    }

    fn from_coords(basis: Arc<BSplineBasis>, dim: usize, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), basis.len() * dim);
        Self { basis, dim, coords }
    }

    pub fn basis(&self) -> &BSplineBasis {
        &self.basis
    }

    pub fn space(&self) -> &SplineSpace {
        self.basis.space()
    }

    pub fn partitions(&self) -> &ExtendedPartitions {
        self.basis.partitions()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn control_points(&self) -> Vec<Vec<f64>> {
        self.coords.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// Same basis, control point `i` moved.
    pub fn with_point(&self, i: usize, p: &[f64]) -> Result<Self> {
        if i >= self.len() {
            return Err(Error::OutOfRange { index: i, len: self.len() });
        }
        if p.len() != self.dim {
            return Err(Error::Dimension(p.len()));
        }
        let mut coords = self.coords.clone();
        coords[i * self.dim..(i + 1) * self.dim].copy_from_slice(p);
        Ok(Self::from_coords(Arc::clone(&self.basis), self.dim, coords))
    }

    /// Same control points on a space of equal dimension (e.g. new connection matrices).
    pub fn with_space(&self, space: &SplineSpace) -> Result<Self> {
        Self::new(space, self.control_points())
    }

    /// Replaces the connection matrix at break-point `x_i`.
    pub fn with_connection(&self, i: usize, m: ConnectionMatrix) -> Result<Self> {
        self.with_space(&self.space().with_connection(i, m)?)
    }

    pub fn eval(&self, x: f64) -> Result<Vec<f64>> {
        let local = self.basis.eval_local(x)?;
        let mut out = vec![0.0; self.dim];
        for (k, v) in local.values.iter().enumerate() {
            for (o, c) in out.iter_mut().zip(self.point(local.first() + k)) {
                *o += v * c;
            }
        }
        Ok(out)
    }

    /// Inserts one knot `s_hat` into both extended partitions.
    pub fn insert_knot(&self, s_hat: f64) -> Result<Refinement> {
        let space = self.space();
        if !(s_hat > space.a() && s_hat < space.b()) {
            return Err(Error::OutsideDomain { x: s_hat, a: space.a(), b: space.b() });
        }
        let j = space.locate(s_hat)?;
        let d = space.degree(j);
        let mut breakpoints = space.breakpoints().to_vec();
        let mut degrees = space.degrees().to_vec();
        let mut continuities = space.continuities().to_vec();
        let mut connections = space.connections().map(<[ConnectionMatrix]>::to_vec);
        if j > 0 && s_hat == space.x(j) {
            let k = continuities[j - 1];
            if k == 0 {
                return Err(Error::ContinuityUnderflow { index: j });
            }
            continuities[j - 1] = k - 1;
            if let Some(ms) = connections.as_mut() {
                ms[j - 1] = ms[j - 1].truncated(k);
            }
        } else {
            breakpoints.insert(j, s_hat);
            degrees.insert(j + 1, d);
            continuities.insert(j, d - 1);
            if let Some(ms) = connections.as_mut() {
                ms.insert(j, ConnectionMatrix::identity(d));
            }
        }
        let refined = SplineSpace::from_parts(
            space.domain(),
            breakpoints,
            degrees,
            continuities,
            connections,
        )?;
        let new_basis = Arc::new(BSplineBasis::new(&refined)?);
        let span = self.partitions().s().partition_point(|&v| v <= s_hat) - 1;
        let r = new_basis.partitions().s().iter().filter(|&&v| v == s_hat).count();
        self.refine(new_basis, span, d, span + 1 - r)
    }

    /// Raises the degree of interval `j` by `times`, one step at a time.
    pub fn elevate_degree(&self, j: usize, times: usize) -> Result<Self> {
        if j >= self.space().intervals() {
            return Err(Error::OutOfRange { index: j, len: self.space().intervals() });
        }
        let mut c = self.clone();
        for _ in 0..times {
            c = c.elevate_once(j)?.curve;
        }
        Ok(c)
    }

    /// Raises the degree of interval `j` by one.
    pub fn elevate_once(&self, j: usize) -> Result<Refinement> {
        let space = self.space();
        if j >= space.intervals() {
            return Err(Error::OutOfRange { index: j, len: space.intervals() });
        }
        let d = space.degree(j);
        let mut degrees = space.degrees().to_vec();
        degrees[j] += 1;
        let elevated = SplineSpace::from_parts(
            space.domain(),
            space.breakpoints().to_vec(),
            degrees,
            space.continuities().to_vec(),
            space.connections().map(<[ConnectionMatrix]>::to_vec),
        )?;
        let new_basis = Arc::new(BSplineBasis::new(&elevated)?);
        let span = self.partitions().span_of_interval(space, j);
        self.refine(new_basis, span, d, span)
    }

    /// Shared coefficient update: `alpha_i = 1` for `i <= span - d`, the
    /// derivative ratio up to `last`, and `0` beyond.
    fn refine(
        &self,
        new_basis: Arc<BSplineBasis>,
        span: usize,
        d: usize,
        last: usize,
    ) -> Result<Refinement> {
        let old_ts = self
            .basis
            .transitions()
            .ok_or_else(|| Error::Internal("curve basis has no transition functions".into()))?;
        let new_ts = new_basis
            .transitions()
            .ok_or_else(|| Error::Internal("refined basis has no transition functions".into()))?;
        let old_parts = self.partitions();
        let kdim = self.len();
        let first = span - d + 1;

        let mut alpha = vec![0.0; kdim];
        let mut beta = vec![1.0; kdim];
        for i in 0..kdim {
            if i < first {
                alpha[i] = 1.0;
                beta[i] = 0.0;
            } else if i <= last {
                let si = old_parts.s()[i];
                let order = usize::try_from(old_parts.k_s(i) + 1)
                    .map_err(|_| Error::Internal(format!("k_s of knot {i} is below -1")))?;
                let num = old_ts.get(i).start_derivative(order)?;
                let den = new_ts.get(i).right_derivative(si, order)?;
                if !(den > 0.0) {
                    return Err(Error::Internal(format!(
                        "refined transition {} has non-positive derivative {den} at s_i",
                        i + 1
                    )));
                }
                alpha[i] = num / den;

                let ti = old_parts.t()[i - 1];
                let order_t = usize::try_from(old_parts.k_t(i - 1) + 1)
                    .map_err(|_| Error::Internal(format!("k_t of knot {} is below -1", i - 1)))?;
                let num = old_ts.get(i).end_derivative(order_t)?;
                let den = new_ts.get(i + 1).left_derivative(ti, order_t)?;
                if den == 0.0 {
                    return Err(Error::Internal(format!(
                        "refined transition {} has zero derivative at t_{{i-1}}",
                        i + 2
                    )));
                }
                beta[i] = num / den;
            }
        }

        let dim = self.dim;
        let mut coords = Vec::with_capacity((kdim + 1) * dim);
        for i in 0..=kdim {
            if i < first {
                coords.extend_from_slice(self.point(i));
            } else if i <= last {
                let (a, cur, prev) = (alpha[i], self.point(i), self.point(i - 1));
                coords.extend(cur.iter().zip(prev).map(|(c, p)| a * c + (1.0 - a) * p));
            } else {
                coords.extend_from_slice(self.point(i - 1));
            }
        }
        Ok(Refinement {
            curve: Self::from_coords(new_basis, dim, coords),
            alpha,
            beta,
        })
    }

    /// Local Bernstein control points of every interval.
    pub fn to_bezier(&self) -> BezierSegmentList {
        let space = self.space();
        let segments = (0..space.intervals())
            .map(|j| {
                let d = space.degree(j);
                let span = self.partitions().span_of_interval(space, j);
                let mut points = vec![vec![0.0; self.dim]; d + 1];
                for i in span - d..=span {
                    let coeffs = &self.basis.local_coefficients(i, j).coeffs;
                    for (h, pt) in points.iter_mut().enumerate() {
                        for (o, c) in pt.iter_mut().zip(self.point(i)) {
                            *o += c * coeffs[h];
                        }
                    }
                }
                BezierSegment { interval: [space.x(j), space.x(j + 1)], degree: d, points }
            })
            .collect();
        BezierSegmentList { segments }
    }

    /// Elevates every interval to the maximum degree, left to right.
    pub fn to_conventional(&self) -> Result<Self> {
        let m = self.space().max_degree();
        let mut c = self.clone();
        for j in 0..self.space().intervals() {
            let times = m - c.space().degree(j);
            c = c.elevate_degree(j, times)?;
        }
        Ok(c)
    }
}
