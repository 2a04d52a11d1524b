//! Transition functions `f_i = N_i + N_{i+1} + ... + N_K`.
//!
//! Each `f_i` is zero left of `s_i`, one right of `t_{i-1}`, and is found on
//! `[s_i, t_{i-1}]` by solving a small Hermite system: the first `k_i^s + 1`
//! Bernstein coefficients of the first piece are zero, the last
//! `k_{i-1}^t + 1` of the last piece are one, and the pieces join with the
//! continuity (or connection-matrix relation) of every interior break-point.

use std::sync::Arc;

use serde::Serialize;
use twofloat::TwoFloat as Dd;

use crate::bernstein::{BernsteinPiece, Side};
use crate::error::{Error, Result};
use crate::piecewise::PiecewisePoly;
use crate::space::{ExtendedPartitions, SplineSpace};

const PIVOT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionFunction {
    /// 0-based function index.
    pub index: usize,
    /// Break-point index of `s_i`.
    pub first_breakpoint: usize,
    /// Break-point index of `t_{i-1}`.
    pub last_breakpoint: usize,
    pub k_s: isize,
    pub k_t: isize,
    /// Scaled residual of the Hermite system (zero when nothing was solved).
    pub residual: f64,
    poly: PiecewisePoly,
    /// `1 - f_i`, rounded from the same extended-precision solution.
    complement: PiecewisePoly,
}

impl TransitionFunction {
    pub fn poly(&self) -> &PiecewisePoly {
        &self.poly
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.poly.eval(x)
    }

    /// Intervals on which the function is not constant.
    pub fn nontrivial_intervals(&self) -> std::ops::Range<usize> {
        self.first_breakpoint..self.last_breakpoint
    }

    pub fn complement(&self) -> &PiecewisePoly {
        &self.complement
    }

    /// `D_+^{order} f_i(x_p)` at the start of the nontrivial range.
    pub fn start_derivative(&self, order: usize) -> Result<f64> {
        self.right_derivative(self.poly.piece(self.first_breakpoint).lo, order)
    }

    /// `D_-^{order} f_i(x_r)` at the end of the nontrivial range.
    pub fn end_derivative(&self, order: usize) -> Result<f64> {
        self.left_derivative(self.poly.piece(self.last_breakpoint - 1).hi, order)
    }

    /// `D_+^{order} f_i(x)` at a break-point `x < b`.
    pub fn right_derivative(&self, x: f64, order: usize) -> Result<f64> {
        let j = self
            .poly
            .pieces()
            .iter()
            .position(|p| p.lo == x)
            .ok_or_else(|| Error::Internal(format!("{x} does not start an interval")))?;
        self.poly.piece(j).endpoint_derivative(Side::Left, order)
    }

    /// `D_-^{order} f_i(x)` at a break-point `x > a`; derivatives come from
    /// the complement, which keeps its relative accuracy near one.
    pub fn left_derivative(&self, x: f64, order: usize) -> Result<f64> {
        let j = self
            .poly
            .pieces()
            .iter()
            .position(|p| p.hi == x)
            .ok_or_else(|| Error::Internal(format!("{x} does not end an interval")))?;
        if order == 0 {
            return self.poly.piece(j).endpoint_derivative(Side::Right, 0);
        }
        Ok(-self.complement.piece(j).endpoint_derivative(Side::Right, order)?)
    }
}

/// Returns `(k_i^s, k_i^t)` for the 0-based knot index `i`.
pub fn endpoint_orders(partitions: &ExtendedPartitions, i: usize) -> Result<(isize, isize)> {
    partitions.endpoint_orders(i)
}

/// Solves for `f_i`, `1 <= i < K` (0-based; `f_0` is the constant one).
///
/// The system is assembled and eliminated in double-double arithmetic;
/// `f_i` and `1 - f_i` are rounded from the same extended solution.
pub fn solve_transition(
    space: &SplineSpace,
    partitions: &ExtendedPartitions,
    i: usize,
) -> Result<TransitionFunction> {
    let kdim = partitions.len();
    if i == 0 || i >= kdim {
        return Err(Error::OutOfRange { index: i, len: kdim });
    }
    let p = partitions.ps()[i];
    let r = partitions.pt()[i - 1];
    if p >= r {
        return Err(Error::Internal(format!(
            "transition function {i} has an empty nontrivial range [x_{p}, x_{r}]"
        )));
    }
    let k_s = partitions.k_s(i);
    let k_t = partitions.k_t(i - 1);
    let n_zero = (k_s + 1).max(0) as usize;
    let n_one = (k_t + 1).max(0) as usize;

    let breaks: Vec<f64> = (0..=space.q() + 1).map(|j| space.x(j)).collect();
    let mut poly = PiecewisePoly::constant(&breaks, space.degrees(), 0.0);
    let mut complement = PiecewisePoly::constant(&breaks, space.degrees(), 1.0);
    for j in r..space.intervals() {
        *poly.piece_mut(j) = BernsteinPiece::constant(breaks[j], breaks[j + 1], space.degree(j), 1.0);
        *complement.piece_mut(j) = BernsteinPiece::constant(breaks[j], breaks[j + 1], space.degree(j), 0.0);
    }

    // Column of every free coefficient; pinned coefficients carry their value.
    let mut layout: Vec<Vec<Coeff>> = (p..r)
        .map(|j| vec![Coeff::Free(usize::MAX); space.degree(j) + 1])
        .collect();
    for c in layout[0].iter_mut().take(n_zero) {
        *c = Coeff::Fixed(0.0);
    }
    let last = layout.len() - 1;
    let dl = space.degree(r - 1);
    for h in dl + 1 - n_one..=dl {
        if let Coeff::Fixed(_) = layout[last][h] {
            return Err(Error::Internal(format!(
                "transition function {i}: pinned zeros and ones overlap"
            )));
        }
        layout[last][h] = Coeff::Fixed(1.0);
    }
    let mut unknowns = 0;
    for c in layout.iter_mut().flatten() {
        if let Coeff::Free(col) = c {
            *col = unknowns;
            unknowns += 1;
        }
    }

    let equations: usize = (p + 1..r).map(|j| space.continuity(j) + 1).sum();
    if equations != unknowns {
        return Err(Error::Internal(format!(
            "transition function {i}: {equations} conditions for {unknowns} unknowns"
        )));
    }

    let mut residual = 0.0;
    if unknowns > 0 {
        let mut sys = System::new(equations, unknowns);
        let mut row = 0;
        for j in p + 1..r {
            let (lp, rp) = (j - 1 - p, j - p);
            let hl = Dd::new_sub(breaks[j], breaks[j - 1]);
            let hr = Dd::new_sub(breaks[j + 1], breaks[j]);
            let (dl, dr) = (space.degree(j - 1), space.degree(j));
            let kj = space.continuity(j);
            let m = space.connection(j).filter(|m| !m.is_identity());
            let Some(m) = m else {
                let cells = [&layout[lp], &layout[rp]];
                for rho in 0..=kj {
                    for ((side, l), w) in blossom_row(dl, hl, dr, hr, rho) {
                        sys.add(row, cells[side][l], w);
                    }
                    row += 1;
                }
                continue;
            };
            let h_min = hl.min(hr);
            for rho in 0..=kj {
                let scale = h_min.powi(rho as i32);
                // Right side: D^rho_+ of the piece starting at x_j.
                for (l, w) in derivative_weights(dr, hr, rho).into_iter().enumerate() {
                    sys.add(row, layout[rp][l], scale * w);
                }
                // Left side: sum_c M[rho][c] D^c_- of the piece ending at x_j.
                for c in 0..=rho {
                    let mc = m.get(rho, c);
                    if mc == 0.0 {
                        continue;
                    }
                    let off = dl - c;
                    for (l, w) in derivative_weights(dl, hl, c).into_iter().enumerate() {
                        sys.add(row, layout[lp][off + l], -(scale * mc) * w);
                    }
                }
                row += 1;
            }
        }
        let (x, res) = sys.solve(i)?;
        residual = res;
        fill(&mut poly, &mut complement, p, &layout, |col| {
            (f64::from(x[col]), f64::from(1.0 - x[col]))
        });
    } else {
        fill(&mut poly, &mut complement, p, &layout, |_| unreachable!("no free coefficients"));
    }

    Ok(TransitionFunction {
        index: i,
        first_breakpoint: p,
        last_breakpoint: r,
        k_s,
        k_t,
        residual,
        poly,
        complement,
    })
}

fn fill(
    poly: &mut PiecewisePoly,
    complement: &mut PiecewisePoly,
    first: usize,
    layout: &[Vec<Coeff>],
    free: impl Fn(usize) -> (f64, f64),
) {
    for (lp, cells) in layout.iter().enumerate() {
        for (h, c) in cells.iter().enumerate() {
            let (v, w) = match *c {
                Coeff::Fixed(v) => (v, 1.0 - v),
                Coeff::Free(col) => free(col),
            };
            poly.piece_mut(first + lp).coeffs[h] = v;
            complement.piece_mut(first + lp).coeffs[h] = w;
        }
    }
}

/// `C^rho` condition at a parametric join in blossom form, as weights on
/// `(piece, coefficient)` with piece `0` the left and `1` the right one.
///
/// Both pieces are viewed at the common degree `D`. If the right piece is
/// the narrower one its coefficient `rho` is the left polynomial's blossom
/// at `(1^{D-rho}, (1 + hr/hl)^rho)`; otherwise the left coefficient
/// `D - rho` is the right blossom at `(0^{D-rho}, (-hl/hr)^rho)`.
fn blossom_row(dl: usize, hl: Dd, dr: usize, hr: Dd, rho: usize) -> Vec<((usize, usize), Dd)> {
    let d = dl.max(dr);
    let (near, far, at, v) = if hr <= hl {
        ((1, dr), (0, dl), d - rho, 1.0 + div(hr, hl))
    } else {
        ((0, dl), (1, dr), 0, -div(hl, hr))
    };
    let own = if near.0 == 1 { rho } else { d - rho };
    let mut out: Vec<((usize, usize), Dd)> = elevation_row(near.1, d, own)
        .map(|(l, e)| ((near.0, l), e))
        .collect();
    for l in 0..=rho {
        let b = binomial(rho, l) * v.powi(l as i32) * (1.0 - v).powi((rho - l) as i32);
        out.extend(elevation_row(far.1, d, at + l).map(|(c, e)| ((far.0, c), -(b * e))));
    }
    out
}

/// Weights of the degree-`from` coefficients in coefficient `m` of the
/// same polynomial elevated to degree `to`.
fn elevation_row(from: usize, to: usize, m: usize) -> impl Iterator<Item = (usize, Dd)> {
    let lo = (m + from).saturating_sub(to);
    (lo..=from.min(m)).map(move |l| {
        let num = binomial(from, l) * binomial(to - from, m - l);
        (l, Dd::new_div(num, binomial(to, m)))
    })
}

/// Weights of `order + 1` consecutive coefficients in the endpoint
/// derivative of a degree-`d` piece of width `h`.
fn derivative_weights(d: usize, h: Dd, order: usize) -> Vec<Dd> {
    let falling = (0..order).fold(1.0, |acc, k| acc * (d - k) as f64);
    let factor = div(Dd::from(falling), h.powi(order as i32));
    (0..=order)
        .map(|l| {
            let sign = if (order - l) % 2 == 0 { 1.0 } else { -1.0 };
            factor * (sign * binomial(order, l))
        })
        .collect()
}

/// Double-double quotient by long division.
fn div(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    Dd::new_add(q1, q2) + q3
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

#[derive(Debug, Clone, Copy)]
enum Coeff {
    Fixed(f64),
    Free(usize),
}

/// Dense square system in double-double arithmetic.
struct System {
    a: Vec<Vec<Dd>>,
    rhs: Vec<Dd>,
}

impl System {
    fn new(rows: usize, cols: usize) -> Self {
        Self { a: vec![vec![Dd::from(0.0); cols]; rows], rhs: vec![Dd::from(0.0); rows] }
    }

    fn add(&mut self, row: usize, cell: Coeff, w: Dd) {
        match cell {
            Coeff::Free(col) => self.a[row][col] += w,
            Coeff::Fixed(v) if v == 0.0 => {}
            Coeff::Fixed(v) => self.rhs[row] -= w * v,
        }
    }

    /// Gaussian elimination with partial pivoting; returns the solution and
    /// its scaled residual.
    fn solve(&self, index: usize) -> Result<(Vec<Dd>, f64)> {
        let n = self.rhs.len();
        let max_entry = self.a.iter().flatten().fold(0.0f64, |m, v| m.max(v.hi().abs()));
        let mut a = self.a.clone();
        let mut b = self.rhs.clone();
        let (mut min_pivot, mut max_pivot) = (f64::INFINITY, 0.0f64);
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&u, &v| a[u][k].hi().abs().total_cmp(&a[v][k].hi().abs()))
                .unwrap_or(k);
            a.swap(k, piv);
            b.swap(k, piv);
            let pivot = a[k][k];
            min_pivot = min_pivot.min(pivot.hi().abs());
            max_pivot = max_pivot.max(pivot.hi().abs());
            if !(pivot.hi().abs() >= PIVOT_THRESHOLD * max_entry) || pivot.hi() == 0.0 {
                let condition = if min_pivot > 0.0 { max_pivot / min_pivot } else { f64::INFINITY };
                return Err(Error::SingularSystem { index, condition });
            }
            let (top, rest) = a.split_at_mut(k + 1);
            let pivot_row = &top[k];
            for (u, row) in rest.iter_mut().enumerate() {
                let factor = div(row[k], pivot);
                if factor.hi() == 0.0 {
                    continue;
                }
                for c in k..n {
                    row[c] -= factor * pivot_row[c];
                }
                b[k + 1 + u] = b[k + 1 + u] - factor * b[k];
            }
        }
        let mut x = vec![Dd::from(0.0); n];
        for k in (0..n).rev() {
            let mut s = b[k];
            for c in k + 1..n {
                s -= a[k][c] * x[c];
            }
            x[k] = div(s, a[k][k]);
        }

        let mut res_max = 0.0f64;
        let mut row_max = 0.0f64;
        for (row, bi) in self.a.iter().zip(&self.rhs) {
            let mut s = -*bi;
            let mut abs = 0.0;
            for (aij, xj) in row.iter().zip(&x) {
                s += *aij * *xj;
                abs += aij.hi().abs();
            }
            res_max = res_max.max(s.hi().abs());
            row_max = row_max.max(abs);
        }
        let x_max = x.iter().fold(0.0f64, |m, v| m.max(v.hi().abs()));
        let b_max = self.rhs.iter().fold(0.0f64, |m, v| m.max(v.hi().abs()));
        let denom = (row_max * x_max + b_max).max(f64::MIN_POSITIVE);
        Ok((x, res_max / denom))
    }
}

/// All `K` transition functions of a space.
#[derive(Debug, Clone)]
pub struct TransitionSet {
    space: Arc<SplineSpace>,
    partitions: Arc<ExtendedPartitions>,
    functions: Vec<TransitionFunction>,
}

impl TransitionSet {
    pub fn space(&self) -> &SplineSpace {
        &self.space
    }

    pub fn partitions(&self) -> &ExtendedPartitions {
        &self.partitions
    }

    pub(crate) fn space_arc(&self) -> Arc<SplineSpace> {
        Arc::clone(&self.space)
    }

    pub(crate) fn partitions_arc(&self) -> Arc<ExtendedPartitions> {
        Arc::clone(&self.partitions)
    }

    pub fn functions(&self) -> &[TransitionFunction] {
        &self.functions
    }

    pub fn get(&self, i: usize) -> &TransitionFunction {
        &self.functions[i]
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// JSON-friendly coefficient tables of the nontrivial pieces.
    pub fn dump(&self) -> Vec<TransitionDump> {
        self.functions
            .iter()
            .map(|f| TransitionDump {
                index: f.index + 1,
                s: self.partitions.s()[f.index],
                t: if f.index == 0 { self.space.b() } else { self.partitions.t()[f.index - 1] },
                k_s: f.k_s,
                k_t: f.k_t,
                residual: f.residual,
                pieces: f.nontrivial_intervals().map(|j| f.poly.piece(j).clone()).collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionDump {
    /// 1-based index as in the usual mathematical numbering.
    pub index: usize,
    pub s: f64,
    pub t: f64,
    pub k_s: isize,
    pub k_t: isize,
    pub residual: f64,
    pub pieces: Vec<BernsteinPiece>,
}

pub fn solve_all(space: Arc<SplineSpace>, partitions: Arc<ExtendedPartitions>) -> Result<TransitionSet> {
    let breaks: Vec<f64> = (0..=space.q() + 1).map(|j| space.x(j)).collect();
    let mut functions = Vec::with_capacity(partitions.len());
    functions.push(TransitionFunction {
        index: 0,
        first_breakpoint: 0,
        last_breakpoint: 0,
        k_s: partitions.k_s(0),
        k_t: -1,
        residual: 0.0,
        poly: PiecewisePoly::constant(&breaks, space.degrees(), 1.0),
        complement: PiecewisePoly::constant(&breaks, space.degrees(), 0.0),
    });
    for i in 1..partitions.len() {
        functions.push(solve_transition(&space, &partitions, i)?);
    }
    Ok(TransitionSet { space, partitions, functions })
}

/// Convenience wrapper building the partitions as well.
pub fn transitions_of(space: &SplineSpace) -> Result<TransitionSet> {
    let partitions = ExtendedPartitions::new(space);
    solve_all(Arc::new(space.clone()), Arc::new(partitions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::ConnectionMatrix;

    fn running() -> SplineSpace {
        SplineSpace::new([0.0, 7.0], vec![1.0, 3.0, 6.0], vec![1, 2, 4, 2], vec![0, 1, 2]).unwrap()
    }

    #[test]
    fn bernstein_tail_sums_on_a_single_interval() {
        let sp = SplineSpace::new([0.0, 1.0], vec![], vec![2], vec![]).unwrap();
        let ts = transitions_of(&sp).unwrap();
        assert_eq!(ts.len(), 3);
        for k in 0..=20 {
            let x = k as f64 / 20.0;
            assert!((ts.get(0).eval(x).unwrap() - 1.0).abs() < 1e-15);
            assert!((ts.get(1).eval(x).unwrap() - (2.0 * x - x * x)).abs() < 1e-14);
            assert!((ts.get(2).eval(x).unwrap() - x * x).abs() < 1e-14);
        }
    }

    #[test]
    fn cubic_bezier_tail_sums() {
        let sp = SplineSpace::new([0.0, 1.0], vec![], vec![3], vec![]).unwrap();
        let ts = transitions_of(&sp).unwrap();
        for (i, f) in ts.functions().iter().enumerate() {
            let expect: Vec<f64> = (0..=3).map(|h| if h >= i { 1.0 } else { 0.0 }).collect();
            assert_eq!(f.poly().piece(0).coeffs, expect);
        }
    }

    #[test]
    fn running_example_last_function() {
        let ts = transitions_of(&running()).unwrap();
        assert_eq!(ts.len(), 7);
        let f7 = ts.get(6);
        assert_eq!((f7.first_breakpoint, f7.last_breakpoint), (2, 4));
        for k in 0..=30 {
            let x = 3.0 * k as f64 / 30.0;
            assert_eq!(f7.eval(x).unwrap(), 0.0);
        }
        assert!((f7.eval(7.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_conditions_and_taylor_signs() {
        let sp = running();
        let ts = transitions_of(&sp).unwrap();
        for f in &ts.functions()[1..] {
            assert!(f.residual <= 1e-10, "residual {}", f.residual);
            for rho in 0..=f.k_s.max(-1) {
                assert!(f.start_derivative(rho as usize).unwrap().abs() < 1e-12);
            }
            assert!(f.start_derivative((f.k_s + 1) as usize).unwrap() > 0.0);
            let sign = if f.k_t % 2 == 0 { 1.0 } else { -1.0 };
            assert!(sign * f.end_derivative((f.k_t + 1) as usize).unwrap() > 0.0);
            assert!((f.end_derivative(0).unwrap() - 1.0).abs() < 1e-12);
            for k in 0..200 {
                let x = 7.0 * k as f64 / 199.0;
                let v = f.eval(x).unwrap();
                assert!((-1e-12..=1.0 + 1e-12).contains(&v), "f_{} ({x}) = {v}", f.index + 1);
            }
        }
    }

    #[test]
    fn identity_connections_match_parametric() {
        let base = SplineSpace::new(
            [0.0, 3.0],
            vec![0.75, 1.75, 2.5],
            vec![3, 4, 3, 1],
            vec![2, 2, 0],
        )
        .unwrap();
        let gc = SplineSpace::with_connections(
            [0.0, 3.0],
            vec![0.75, 1.75, 2.5],
            vec![3, 4, 3, 1],
            vec![2, 2, 0],
            vec![
                ConnectionMatrix::identity(3),
                ConnectionMatrix::identity(3),
                ConnectionMatrix::identity(1),
            ],
        )
        .unwrap();
        let a = transitions_of(&base).unwrap();
        let b = transitions_of(&gc).unwrap();
        for (fa, fb) in a.functions().iter().zip(b.functions()) {
            for k in 0..=100 {
                let x = 3.0 * k as f64 / 100.0;
                assert!((fa.eval(x).unwrap() - fb.eval(x).unwrap()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn out_of_range_index() {
        let sp = running();
        let parts = ExtendedPartitions::new(&sp);
        assert!(solve_transition(&sp, &parts, 0).is_err());
        assert!(solve_transition(&sp, &parts, 7).is_err());
    }
}
