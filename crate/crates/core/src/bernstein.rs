//! Polynomials in local Bernstein form over a single interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `sum_h b_h B_{h,d}(x)` on `[lo, hi]`, `d = coeffs.len() - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinPiece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl BernsteinPiece {
    pub fn new(lo: f64, hi: f64, coeffs: Vec<f64>) -> Self {
        assert!(hi > lo, "empty piece interval [{lo}, {hi}]");
        assert!(!coeffs.is_empty(), "a piece needs at least one coefficient");
        Self { lo, hi, coeffs }
    }

    pub fn constant(lo: f64, hi: f64, degree: usize, value: f64) -> Self {
        Self::new(lo, hi, vec![value; degree + 1])
    }

    pub fn zero(lo: f64, hi: f64, degree: usize) -> Self {
        Self::constant(lo, hi, degree, 0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= self.lo && x <= self.hi) {
            return Err(Error::OutsideInterval { x, lo: self.lo, hi: self.hi });
        }
        Ok(self.value(x))
    }

    /// de Casteljau evaluation without the interval check.
    pub fn value(&self, x: f64) -> f64 {
        let u = (x - self.lo) / self.width();
        de_casteljau(&self.coeffs, u)
    }

    pub fn derivative(&self) -> Self {
        let d = self.degree();
        if d == 0 {
            return Self::zero(self.lo, self.hi, 0);
        }
        let scale = d as f64 / self.width();
        let coeffs = self.coeffs.windows(2).map(|w| scale * (w[1] - w[0])).collect();
        Self { lo: self.lo, hi: self.hi, coeffs }
    }

    /// Antiderivative taking the value `lower_value` at `lo`.
    pub fn antiderivative(&self, lower_value: f64) -> Self {
        let step = self.width() / (self.degree() + 1) as f64;
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        let mut acc = lower_value;
        coeffs.push(acc);
        for &b in &self.coeffs {
            acc += step * b;
            coeffs.push(acc);
        }
        Self { lo: self.lo, hi: self.hi, coeffs }
    }

    /// Integral over the whole piece interval.
    pub fn integral(&self) -> f64 {
        self.width() / (self.degree() + 1) as f64 * self.coeffs.iter().sum::<f64>()
    }

    /// One-sided derivative of order `order` at an end of the interval.
    pub fn endpoint_derivative(&self, side: Side, order: usize) -> Result<f64> {
        let d = self.degree();
        if order > d {
            return Err(Error::OrderTooHigh { order, degree: d });
        }
        let off = match side {
            Side::Left => 0,
            Side::Right => d - order,
        };
        // Repeated differencing: exact when neighbouring coefficients agree.
        let mut diff = self.coeffs[off..=off + order].to_vec();
        for level in 1..=order {
            for l in 0..=order - level {
                diff[l] = diff[l + 1] - diff[l];
            }
        }
        let falling: f64 = (d + 1 - order..=d).map(|k| k as f64).product();
        Ok(falling / self.width().powi(order as i32) * diff[0])
    }

    pub fn elevate_once(&self) -> Self {
        let d = self.degree();
        let n = (d + 1) as f64;
        let mut coeffs = Vec::with_capacity(d + 2);
        coeffs.push(self.coeffs[0]);
        for h in 1..=d {
            let w = h as f64 / n;
            coeffs.push(w * self.coeffs[h - 1] + (1.0 - w) * self.coeffs[h]);
        }
        coeffs.push(self.coeffs[d]);
        Self { lo: self.lo, hi: self.hi, coeffs }
    }

    /// Same polynomial written at degree `degree >= self.degree()`.
    pub fn elevated_to(&self, degree: usize) -> Self {
        assert!(degree >= self.degree(), "cannot lower the degree of a piece");
        let mut p = self.clone();
        while p.degree() < degree {
            p = p.elevate_once();
        }
        p
    }

    /// `self + scale * other`, elevating either operand to the common degree.
    pub fn add_scaled(&self, other: &Self, scale: f64) -> Self {
        let d = self.degree().max(other.degree());
        let mut a = self.elevated_to(d);
        let b = other.elevated_to(d);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += scale * y;
        }
        a
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }
}

pub(crate) fn de_casteljau(coeffs: &[f64], u: f64) -> f64 {
    let mut work = coeffs.to_vec();
    let n = work.len();
    for r in 1..n {
        for h in 0..n - r {
            work[h] = (1.0 - u) * work[h] + u * work[h + 1];
        }
    }
    work[0]
}

/// Weights `w` with `D^order f(end) = sum_l w_l b_{off + l}`, where `off = 0`
/// on the left and `off = degree - order` on the right.
pub fn endpoint_weights(degree: usize, width: f64, order: usize) -> Result<Vec<f64>> {
    if order > degree {
        return Err(Error::OrderTooHigh { order, degree });
    }
    let falling: f64 = (0..order).map(|i| (degree - i) as f64).product();
    let factor = falling / width.powi(order as i32);
    let mut w = Vec::with_capacity(order + 1);
    let mut binom = 1.0;
    for l in 0..=order {
        let sign = if (order - l) % 2 == 0 { 1.0 } else { -1.0 };
        w.push(factor * sign * binom);
        binom = binom * (order - l) as f64 / (l + 1) as f64;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn piece(coeffs: &[f64], lo: f64, hi: f64) -> BernsteinPiece {
        BernsteinPiece::new(lo, hi, coeffs.to_vec())
    }

    #[test]
    fn eval_examples() {
        assert_eq!(piece(&[0.0, 0.0, 1.0], 0.0, 1.0).eval(1.0).unwrap(), 1.0);
        assert_eq!(piece(&[0.0, 1.0, 0.0], 0.0, 1.0).eval(0.5).unwrap(), 0.5);
        let ones = piece(&[1.0; 4], 2.0, 5.0);
        for x in [2.0, 2.3, 3.7, 5.0] {
            assert!((ones.eval(x).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(matches!(ones.eval(5.5), Err(Error::OutsideInterval { .. })));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(piece(&[0.0, 1.0], 0.0, 2.0).derivative().coeffs, vec![0.5]);
        assert_eq!(piece(&[0.0, 0.0, 1.0], 0.0, 1.0).derivative().coeffs, vec![0.0, 2.0]);
        let c = piece(&[3.0], 0.0, 1.0).derivative();
        assert_eq!((c.degree(), c.coeffs[0]), (0, 0.0));
    }

    #[test]
    fn antiderivative_examples() {
        assert_eq!(piece(&[1.0, 1.0], 0.0, 1.0).antiderivative(0.0).coeffs, vec![0.0, 0.5, 1.0]);
        let a = piece(&[1.0, 0.0, 0.0], 0.0, 1.0).antiderivative(0.0);
        assert!((a.value(1.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((piece(&[1.0, 0.0, 0.0], 0.0, 1.0).integral() - 1.0 / 3.0).abs() < 1e-15);
        let z = piece(&[0.0, 0.0], 0.0, 1.0).antiderivative(2.5);
        assert!(z.coeffs.iter().all(|&c| c == 2.5));
    }

    #[test]
    fn endpoint_derivative_examples() {
        let p = piece(&[0.0, 0.0, 1.0], 0.0, 1.0);
        assert_eq!(p.endpoint_derivative(Side::Left, 2).unwrap(), 2.0);
        let q = piece(&[0.7, 0.1, 0.4], 0.0, 1.0);
        assert_eq!(q.endpoint_derivative(Side::Left, 0).unwrap(), 0.7);
        assert_eq!(q.endpoint_derivative(Side::Right, 0).unwrap(), 0.4);
        let r = piece(&[0.0, 1.0, 1.0], 0.0, 2.0);
        assert_eq!(r.endpoint_derivative(Side::Right, 1).unwrap(), 0.0);
        assert!(matches!(
            r.endpoint_derivative(Side::Left, 3),
            Err(Error::OrderTooHigh { order: 3, degree: 2 })
        ));
    }

    #[test]
    fn elevate_examples() {
        assert_eq!(piece(&[0.0, 1.0], 0.0, 1.0).elevate_once().coeffs, vec![0.0, 0.5, 1.0]);
        assert_eq!(piece(&[2.0, 2.0], 0.0, 1.0).elevate_once().coeffs, vec![2.0; 3]);
    }

    fn arb_piece(max_degree: usize) -> impl Strategy<Value = BernsteinPiece> {
        (
            -3.0f64..3.0,
            0.05f64..4.0,
            prop::collection::vec(-5.0f64..5.0, 1..=max_degree + 1),
        )
            .prop_map(|(lo, w, c)| BernsteinPiece::new(lo, lo + w, c))
    }

    proptest! {
        #[test]
        fn derivative_inverts_antiderivative(p in arb_piece(8), v in -2.0f64..2.0) {
            let back = p.antiderivative(v).derivative();
            let scale = p.coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            for (a, b) in back.coeffs.iter().zip(&p.coeffs) {
                prop_assert!((a - b).abs() <= 1e-13 * scale);
            }
        }

        #[test]
        fn elevation_preserves_values(p in arb_piece(8), us in prop::collection::vec(0.0f64..=1.0, 100)) {
            let e = p.elevate_once();
            prop_assert_eq!(e.degree(), p.degree() + 1);
            let scale = p.coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            for u in us {
                let x = p.lo + u * p.width();
                prop_assert!((e.value(x) - p.value(x)).abs() <= 1e-13 * scale);
            }
        }

        #[test]
        fn endpoint_derivative_matches_finite_differences(p in arb_piece(8), order in 0usize..3) {
            prop_assume!(order <= p.degree());
            // Polynomial extension beyond the interval is valid for de Casteljau.
            let f = |x: f64| p.value(x);
            let h = 1e-4 * p.width();
            for (side, x0) in [(Side::Left, p.lo), (Side::Right, p.hi)] {
                let fd = match order {
                    0 => f(x0),
                    1 => (f(x0 + h) - f(x0 - h)) / (2.0 * h),
                    _ => (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / (h * h),
                };
                let exact = p.endpoint_derivative(side, order).unwrap();
                let scale = 1.0 + exact.abs() + p.coeffs.iter().map(|c| c.abs()).sum::<f64>()
                    * (p.degree().pow(order as u32) as f64) / p.width().powi(order as i32);
                prop_assert!((fd - exact).abs() <= 1e-6 * scale, "fd {} exact {}", fd, exact);
            }
        }
    }
}
