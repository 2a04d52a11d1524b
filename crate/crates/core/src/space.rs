//! Multi-degree spline spaces and their left/right extended partitions.
//!
//! Index conventions used throughout the crate:
//!
//! * break-points are numbered `0..=q+1`, with `x_0 = a` and `x_{q+1} = b`;
//! * interval `j` is `[x_j, x_{j+1}]`, `j = 0..=q`, and carries degree `d_j`;
//! * the continuity `k_i` belongs to the interior break-point `x_i`, `i = 1..=q`;
//! * knots and basis functions are numbered from `0` (the mathematical
//!   convention numbers them from 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower-triangular matrix relating left and right derivative vectors at a
/// break-point: `M (D^0_- f, .., D^k_- f)^T = (D^0_+ f, .., D^k_+ f)^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix {
    order: usize,
    /// Row-major, `order * order` entries; strictly upper part is zero.
    entries: Vec<f64>,
}

impl ConnectionMatrix {
    pub fn identity(order: usize) -> Self {
        let mut entries = vec![0.0; order * order];
        for r in 0..order {
            entries[r * order + r] = 1.0;
        }
        Self { order, entries }
    }

    /// Builds a matrix from its rows. Row `r` may hold either `r + 1` entries
    /// (the lower triangle only) or `order` entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> std::result::Result<Self, String> {
        let order = rows.len();
        if order == 0 {
            return Err("matrix has no rows".into());
        }
        let mut entries = vec![0.0; order * order];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != r + 1 && row.len() != order {
                return Err(format!("row {r} has {} entries", row.len()));
            }
            for (c, &v) in row.iter().enumerate() {
                if c > r && v != 0.0 {
                    return Err(format!("entry ({r},{c}) above the diagonal is nonzero"));
                }
                entries[r * order + c] = v;
            }
        }
        let m = Self { order, entries };
        m.check()?;
        Ok(m)
    }

    /// Builds a matrix from a flat row-major list: either the packed lower
    /// triangle (`n(n+1)/2` values) or the full square (`n*n` values).
    pub fn from_flat(order: usize, values: &[f64]) -> std::result::Result<Self, String> {
        let packed = order * (order + 1) / 2;
        let rows: Vec<Vec<f64>> = if values.len() == packed {
            let mut it = values.iter().copied();
            (0..order).map(|r| it.by_ref().take(r + 1).collect()).collect()
        } else if values.len() == order * order {
            values.chunks(order).map(|c| c.to_vec()).collect()
        } else {
            return Err(format!(
                "expected {packed} (packed) or {} (full) entries for order {order}, got {}",
                order * order,
                values.len()
            ));
        };
        Self::from_rows(&rows)
    }

    fn check(&self) -> std::result::Result<(), String> {
        let n = self.order;
        for r in 0..n {
            for c in 0..n {
                let v = self.get(r, c);
                if !v.is_finite() {
                    return Err(format!("entry ({r},{c}) is not finite"));
                }
                if c > r && v != 0.0 {
                    return Err(format!("entry ({r},{c}) above the diagonal is nonzero"));
                }
            }
            if self.get(r, r) <= 0.0 {
                return Err(format!("diagonal entry ({r},{r}) is not positive"));
            }
        }
        for c in 1..n {
            if self.get(0, c) != 0.0 || self.get(c, 0) != 0.0 {
                return Err("first row and column must be (1, 0, ..., 0)".into());
            }
        }
        if self.get(0, 0) != 1.0 {
            return Err("first row and column must be (1, 0, ..., 0)".into());
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries[r * self.order + c]
    }

    pub fn is_identity(&self) -> bool {
        (0..self.order).all(|r| (0..self.order).all(|c| self.get(r, c) == f64::from(r == c)))
    }

    /// Leading principal submatrix of the given order.
    pub fn truncated(&self, order: usize) -> Self {
        let rows: Vec<Vec<f64>> = (0..order)
            .map(|r| (0..=r).map(|c| self.get(r, c)).collect())
            .collect();
        Self::from_rows(&rows).expect("leading block of a valid connection matrix is valid")
    }

    /// Packed lower triangle, row-major.
    pub fn packed(&self) -> Vec<f64> {
        (0..self.order)
            .flat_map(|r| (0..=r).map(move |c| (r, c)))
            .map(|(r, c)| self.get(r, c))
            .collect()
    }
}

/// Unvalidated description of a spline space, as found in JSON documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSpace {
    pub domain: [f64; 2],
    pub breakpoints: Vec<f64>,
    pub degrees: Vec<usize>,
    pub continuities: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connections: Option<Vec<Vec<f64>>>,
}

impl RawSpace {
    pub fn validate(&self) -> Result<SplineSpace> {
        let connections = match &self.connections {
            None => None,
            Some(list) => {
                if list.len() != self.breakpoints.len() {
                    return Err(Error::ConnectionMatrix {
                        index: list.len().min(self.breakpoints.len()) + 1,
                        reason: format!(
                            "expected {} matrices, got {}",
                            self.breakpoints.len(),
                            list.len()
                        ),
                    });
                }
                let mut ms = Vec::with_capacity(list.len());
                for (i, flat) in list.iter().enumerate() {
                    let order = self.continuities.get(i).map_or(0, |k| k + 1);
                    let m = ConnectionMatrix::from_flat(order, flat)
                        .map_err(|reason| Error::ConnectionMatrix { index: i + 1, reason })?;
                    ms.push(m);
                }
                Some(ms)
            }
        };
        SplineSpace::build(
            self.domain[0],
            self.domain[1],
            self.breakpoints.clone(),
            self.degrees.clone(),
            self.continuities.clone(),
            connections,
        )
    }
}

/// A validated space `S(P_d, K, Delta[, M])` of multi-degree splines.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace {
    a: f64,
    b: f64,
    breakpoints: Vec<f64>,
    degrees: Vec<usize>,
    continuities: Vec<usize>,
    connections: Option<Vec<ConnectionMatrix>>,
    dim: usize,
    max_degree: usize,
}

impl SplineSpace {
    /// Parametrically continuous space.
    pub fn new(
        domain: [f64; 2],
        breakpoints: Vec<f64>,
        degrees: Vec<usize>,
        continuities: Vec<usize>,
    ) -> Result<Self> {
        Self::build(domain[0], domain[1], breakpoints, degrees, continuities, None)
    }

    /// Geometrically continuous space; `connections[i-1]` belongs to `x_i`.
    pub fn with_connections(
        domain: [f64; 2],
        breakpoints: Vec<f64>,
        degrees: Vec<usize>,
        continuities: Vec<usize>,
        connections: Vec<ConnectionMatrix>,
    ) -> Result<Self> {
        Self::build(
            domain[0],
            domain[1],
            breakpoints,
            degrees,
            continuities,
            Some(connections),
        )
    }

    fn build(
        a: f64,
        b: f64,
        breakpoints: Vec<f64>,
        degrees: Vec<usize>,
        continuities: Vec<usize>,
        connections: Option<Vec<ConnectionMatrix>>,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidDomain { a, b });
        }
        let q = breakpoints.len();
        let mut prev = a;
        for (i, &x) in breakpoints.iter().enumerate() {
            if !(x.is_finite() && x > prev && x < b) {
                return Err(Error::BreakpointOrder { index: i + 1, value: x });
            }
            prev = x;
        }
        if degrees.len() != q + 1 {
            return Err(Error::DegreeCount { expected: q + 1, got: degrees.len() });
        }
        if continuities.len() != q {
            return Err(Error::ContinuityCount { expected: q, got: continuities.len() });
        }
        if let Some(j) = degrees.iter().position(|&d| d < 1) {
            return Err(Error::DegreeTooLow { interval: j });
        }
        for (idx, &k) in continuities.iter().enumerate() {
            let i = idx + 1;
            let (dl, dr) = (degrees[i - 1], degrees[i]);
            let max = if dl == dr { dr - 1 } else { dl.min(dr) };
            if k > max {
                return Err(Error::ContinuityOutOfRange { index: i, k, max });
            }
        }
        let connections = match connections {
            Some(ms) => {
                if ms.len() != q {
                    return Err(Error::ConnectionMatrix {
                        index: ms.len().min(q) + 1,
                        reason: format!("expected {q} matrices, got {}", ms.len()),
                    });
                }
                for (idx, m) in ms.iter().enumerate() {
                    if m.order() != continuities[idx] + 1 {
                        return Err(Error::ConnectionMatrix {
                            index: idx + 1,
                            reason: format!(
                                "order {} does not match continuity C^{} (expected order {})",
                                m.order(),
                                continuities[idx],
                                continuities[idx] + 1
                            ),
                        });
                    }
                    m.check()
                        .map_err(|reason| Error::ConnectionMatrix { index: idx + 1, reason })?;
                }
                Some(ms)
            }
            None => None,
        };
        let dim = degrees[0]
            + 1
            + (1..=q).map(|i| degrees[i] - continuities[i - 1]).sum::<usize>();
        let dim_right = degrees[q]
            + 1
            + (1..=q).map(|i| degrees[i - 1] - continuities[i - 1]).sum::<usize>();
        if dim != dim_right {
            return Err(Error::Internal(format!(
                "dimension counts disagree: {dim} vs {dim_right}"
            )));
        }
        let max_degree = *degrees.iter().max().expect("at least one interval");
        Ok(Self {
            a,
            b,
            breakpoints,
            degrees,
            continuities,
            connections,
            dim,
            max_degree,
        })
    }

    pub fn domain(&self) -> [f64; 2] {
        [self.a, self.b]
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Interior break-points `x_1..x_q`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Number of interior break-points `q`.
    pub fn q(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn intervals(&self) -> usize {
        self.degrees.len()
    }

    /// Break-point `x_i` for `i = 0..=q+1`.
    pub fn x(&self, i: usize) -> f64 {
        if i == 0 {
            self.a
        } else if i == self.q() + 1 {
            self.b
        } else {
            self.breakpoints[i - 1]
        }
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree(&self, j: usize) -> usize {
        self.degrees[j]
    }

    pub fn continuities(&self) -> &[usize] {
        &self.continuities
    }

    /// Continuity `k_i` at interior break-point `x_i`, `i = 1..=q`.
    pub fn continuity(&self, i: usize) -> usize {
        self.continuities[i - 1]
    }

    pub fn connections(&self) -> Option<&[ConnectionMatrix]> {
        self.connections.as_deref()
    }

    /// Connection matrix at `x_i`, or `None` for parametric continuity.
    pub fn connection(&self, i: usize) -> Option<&ConnectionMatrix> {
        self.connections.as_ref().map(|ms| &ms[i - 1])
    }

    pub fn is_geometric(&self) -> bool {
        self.connections
            .as_ref()
            .is_some_and(|ms| ms.iter().any(|m| !m.is_identity()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn is_uniform_degree(&self) -> bool {
        self.degrees.iter().all(|&d| d == self.degrees[0])
    }

    /// Interval containing `x`: half-open `[x_j, x_{j+1})`, the last one closed at `b`.
    pub fn locate(&self, x: f64) -> Result<usize> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::OutsideDomain { x, a: self.a, b: self.b });
        }
        Ok(self.breakpoints.partition_point(|&bp| bp <= x))
    }

    /// Upper bound on the number of zeros (with multiplicity) of a nonzero
    /// spline of this space on `[x_p, x_r]`.
    pub fn zero_bound(&self, p: usize, r: usize) -> Result<usize> {
        let q = self.q();
        if p >= r || r > q + 1 {
            return Err(Error::IndexRange { p, r, intervals: q + 1 });
        }
        let inner: usize = (p + 1..r).map(|i| self.degrees[i] - self.continuity(i)).sum();
        Ok(self.degrees[p] + inner)
    }

    pub fn to_raw(&self) -> RawSpace {
        RawSpace {
            domain: [self.a, self.b],
            breakpoints: self.breakpoints.clone(),
            degrees: self.degrees.clone(),
            continuities: self.continuities.clone(),
            connections: self
                .connections
                .as_ref()
                .map(|ms| ms.iter().map(ConnectionMatrix::packed).collect()),
        }
    }

    /// Same space with the connection matrix at `x_i` replaced.
    pub fn with_connection(&self, i: usize, m: ConnectionMatrix) -> Result<Self> {
        if i == 0 || i > self.q() {
            return Err(Error::OutOfRange { index: i, len: self.q() + 1 });
        }
        let mut ms = self.connections.clone().unwrap_or_else(|| {
            self.continuities
                .iter()
                .map(|&k| ConnectionMatrix::identity(k + 1))
                .collect()
        });
        ms[i - 1] = m;
        Self::build(
            self.a,
            self.b,
            self.breakpoints.clone(),
            self.degrees.clone(),
            self.continuities.clone(),
            Some(ms),
        )
    }

    pub(crate) fn from_parts(
        domain: [f64; 2],
        breakpoints: Vec<f64>,
        degrees: Vec<usize>,
        continuities: Vec<usize>,
        connections: Option<Vec<ConnectionMatrix>>,
    ) -> Result<Self> {
        Self::build(domain[0], domain[1], breakpoints, degrees, continuities, connections)
    }
}

/// Left (`s`) and right (`t`) extended partitions of a clamped space, with
/// the break-point index of every knot.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPartitions {
    s: Vec<f64>,
    t: Vec<f64>,
    ps: Vec<usize>,
    pt: Vec<usize>,
    degrees: Vec<usize>,
}

impl ExtendedPartitions {
    pub fn new(space: &SplineSpace) -> Self {
        let q = space.q();
        let d = space.degrees();
        let mut s = Vec::with_capacity(space.dim());
        let mut ps = Vec::with_capacity(space.dim());
        let mut t = Vec::with_capacity(space.dim());
        let mut pt = Vec::with_capacity(space.dim());
        for _ in 0..=d[0] {
            s.push(space.a());
            ps.push(0);
        }
        for i in 1..=q {
            let k = space.continuity(i);
            for _ in 0..d[i] - k {
                s.push(space.x(i));
                ps.push(i);
            }
            for _ in 0..d[i - 1] - k {
                t.push(space.x(i));
                pt.push(i);
            }
        }
        for _ in 0..=d[q] {
            t.push(space.b());
            pt.push(q + 1);
        }
        debug_assert_eq!(s.len(), space.dim());
        debug_assert_eq!(t.len(), space.dim());
        Self { s, t, ps, pt, degrees: d.to_vec() }
    }

    /// Checks user-supplied knot vectors against the ones the space implies.
    pub fn from_knots(space: &SplineSpace, s: &[f64], t: &[f64]) -> Result<Self> {
        let p = Self::new(space);
        let d0 = space.degree(0);
        let dq = space.degree(space.q());
        let lead = s.iter().take_while(|&&v| v == space.a()).count();
        let trail = t.iter().rev().take_while(|&&v| v == space.b()).count();
        if lead != d0 + 1 || trail != dq + 1 {
            return Err(Error::Unclamped(format!(
                "expected a repeated {} times in s and b repeated {} times in t, found {lead} and {trail}",
                d0 + 1,
                dq + 1
            )));
        }
        if s != p.s() || t != p.t() {
            return Err(Error::Document(
                "knot multiplicities do not match degrees and continuities".into(),
            ));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn ps(&self) -> &[usize] {
        &self.ps
    }

    pub fn pt(&self) -> &[usize] {
        &self.pt
    }

    /// Number of further knots equal to `s_i` after position `i`.
    pub fn s_run_after(&self, i: usize) -> usize {
        self.s[i + 1..].iter().take_while(|&&v| v == self.s[i]).count()
    }

    /// Number of knots equal to `t_i` before position `i`.
    pub fn t_run_before(&self, i: usize) -> usize {
        self.t[..i].iter().rev().take_while(|&&v| v == self.t[i]).count()
    }

    /// `k_i^s`: the transition function `f_i` vanishes `k_i^s + 1` times at `s_i`.
    /// Equals `-1` only for the first knot.
    pub fn k_s(&self, i: usize) -> isize {
        self.degrees[self.ps[i]] as isize - self.s_run_after(i) as isize - 1
    }

    /// `k_i^t`: `1 - f_{i+1}` vanishes `k_i^t + 1` times at `t_i`.
    pub fn k_t(&self, i: usize) -> isize {
        self.degrees[self.pt[i] - 1] as isize - self.t_run_before(i) as isize - 1
    }

    /// Both endpoint orders of knot `i`, or an error when `i` is out of range.
    pub fn endpoint_orders(&self, i: usize) -> Result<(isize, isize)> {
        if i >= self.len() {
            return Err(Error::OutOfRange { index: i, len: self.len() });
        }
        Ok((self.k_s(i), self.k_t(i)))
    }

    /// Index `l` with `s_l <= x_j < min(s_{l+1}, b)`: the last basis function
    /// that is nonzero on interval `j`. Functions `l - d_j ..= l` are active there.
    pub fn span_of_interval(&self, space: &SplineSpace, j: usize) -> usize {
        let xj = space.x(j);
        self.s.partition_point(|&v| v <= xj) - 1
    }

    /// Knot vector of the conventional spline space when all degrees are equal.
    pub fn classical_knots(&self) -> Option<Vec<f64>> {
        let d = self.degrees[0];
        if self.degrees.iter().any(|&x| x != d) {
            return None;
        }
        let mut u = self.s.clone();
        u.extend_from_slice(&self.t[self.t.len() - (d + 1)..]);
        Some(u)
    }
}
