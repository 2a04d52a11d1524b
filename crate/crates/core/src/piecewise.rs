use serde::{Deserialize, Serialize};

use crate::bernstein::BernsteinPiece;
use crate::error::{Error, Result};

/// A function given by one Bernstein piece on each break-point interval of
/// `[a, b]`. Pieces may have different degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    pieces: Vec<BernsteinPiece>,
}

impl PiecewisePoly {
    pub fn new(pieces: Vec<BernsteinPiece>) -> Self {
        assert!(!pieces.is_empty());
        debug_assert!(pieces.windows(2).all(|w| w[0].hi == w[1].lo));
        Self { pieces }
    }

    /// Constant function written at the given per-interval degrees.
    pub fn constant(breaks: &[f64], degrees: &[usize], value: f64) -> Self {
        let pieces = breaks
            .windows(2)
            .zip(degrees)
            .map(|(w, &d)| BernsteinPiece::constant(w[0], w[1], d, value))
            .collect();
        Self { pieces }
    }

    pub fn pieces(&self) -> &[BernsteinPiece] {
        &self.pieces
    }

    pub fn piece(&self, j: usize) -> &BernsteinPiece {
        &self.pieces[j]
    }

    pub(crate) fn piece_mut(&mut self, j: usize) -> &mut BernsteinPiece {
        &mut self.pieces[j]
    }

    pub fn intervals(&self) -> usize {
        self.pieces.len()
    }

    pub fn lo(&self) -> f64 {
        self.pieces[0].lo
    }

    pub fn hi(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].hi
    }

    /// Interval index of `x` (half-open, last interval closed).
    pub fn locate(&self, x: f64) -> Result<usize> {
        if !(x >= self.lo() && x <= self.hi()) {
            return Err(Error::OutsideDomain { x, a: self.lo(), b: self.hi() });
        }
        let j = self.pieces.partition_point(|p| p.hi <= x);
        Ok(j.min(self.pieces.len() - 1))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let j = self.locate(x)?;
        Ok(self.pieces[j].value(x))
    }

    pub fn derivative(&self) -> Self {
        Self { pieces: self.pieces.iter().map(BernsteinPiece::derivative).collect() }
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    /// `self + scale * other` interval by interval.
    pub fn add_scaled(&self, other: &Self, scale: f64) -> Self {
        assert_eq!(self.pieces.len(), other.pieces.len());
        Self {
            pieces: self
                .pieces
                .iter()
                .zip(&other.pieces)
                .map(|(a, b)| a.add_scaled(b, scale))
                .collect(),
        }
    }

    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(BernsteinPiece::integral).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| p.coeffs.iter())
            .fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_and_eval() {
        let p = PiecewisePoly::new(vec![
            BernsteinPiece::new(0.0, 1.0, vec![0.0, 1.0]),
            BernsteinPiece::new(1.0, 3.0, vec![5.0, 5.0, 5.0]),
        ]);
        assert_eq!(p.locate(1.0).unwrap(), 1);
        assert_eq!(p.locate(3.0).unwrap(), 1);
        assert_eq!(p.eval(0.5).unwrap(), 0.5);
        assert_eq!(p.eval(1.0).unwrap(), 5.0);
        assert!(p.eval(-0.1).is_err());
        assert!((p.integral() - 10.5).abs() < 1e-14);
    }

    #[test]
    fn add_scaled_elevates_mixed_degrees() {
        let a = PiecewisePoly::constant(&[0.0, 1.0, 2.0], &[0, 2], 1.0);
        let b = PiecewisePoly::new(vec![
            BernsteinPiece::new(0.0, 1.0, vec![0.0, 1.0]),
            BernsteinPiece::new(1.0, 2.0, vec![1.0]),
        ]);
        let c = a.add_scaled(&b, -1.0);
        assert_eq!(c.piece(0).degree(), 1);
        assert_eq!(c.piece(1).degree(), 2);
        assert!((c.eval(0.25).unwrap() - 0.75).abs() < 1e-15);
        assert!(c.eval(1.5).unwrap().abs() < 1e-15);
    }
}
