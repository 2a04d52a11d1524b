//! Uniform sample tables of bases, transition functions and curves.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::BSplineBasis;
use crate::curve::MDCurve;
use crate::error::{Error, Result};
use crate::space::SplineSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Basis,
    Transitions,
    Curve,
    /// Derivative of the given order of every basis function.
    Derivative(usize),
}

impl FromStr for Quantity {
    type Err = Error;

    /// Accepts `basis`, `transitions`, `curve`, `derivative` (first order)
    /// and `derivative:R` / `derivativeR`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basis" => Ok(Self::Basis),
            "transitions" => Ok(Self::Transitions),
            "curve" => Ok(Self::Curve),
            "derivative" => Ok(Self::Derivative(1)),
            _ => s
                .strip_prefix("derivative")
                .map(|r| r.trim_start_matches(':'))
                .and_then(|r| r.parse().ok())
                .map(Self::Derivative)
                .ok_or_else(|| Error::Unsupported(format!("unknown sample quantity {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SampleTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Header row, then every value with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write!(out, "{v:.16e}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite sample values")
    }
}

/// `n` uniform parameters on `[a, b]`, endpoints included.
pub fn grid(space: &SplineSpace, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Unsupported(format!("need at least 2 samples, got {n}")));
    }
    let (a, b) = (space.a(), space.b());
    Ok((0..n)
        .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
        .collect())
}

fn numbered(prefix: &str, count: usize) -> impl Iterator<Item = String> + '_ {
    (1..=count).map(move |i| format!("{prefix}{i}"))
}

pub fn sample_basis(basis: &BSplineBasis, n: usize) -> Result<SampleTable> {
    let xs = grid(basis.space(), n)?;
    let columns = std::iter::once("x".to_string()).chain(numbered("N", basis.len())).collect();
    let rows = xs
        .iter()
        .map(|&x| Ok(std::iter::once(x).chain(basis.eval_all(x)?).collect()))
        .collect::<Result<_>>()?;
    Ok(SampleTable { columns, rows })
}

pub fn sample_derivative(basis: &BSplineBasis, order: usize, n: usize) -> Result<SampleTable> {
    let xs = grid(basis.space(), n)?;
    let ds = basis.derivative(order);
    let columns = std::iter::once("x".to_string())
        .chain(numbered(&format!("D{order}N"), basis.len()))
        .collect();
    let rows = xs
        .iter()
        .map(|&x| {
            let mut row = vec![x];
            for d in &ds {
                row.push(d.eval(x)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(SampleTable { columns, rows })
}

pub fn sample_transitions(basis: &BSplineBasis, n: usize) -> Result<SampleTable> {
    let ts = basis
        .transitions()
        .ok_or_else(|| Error::Unsupported("basis has no transition functions".into()))?;
    let xs = grid(basis.space(), n)?;
    let columns = std::iter::once("x".to_string()).chain(numbered("f", ts.len())).collect();
    let rows = xs
        .iter()
        .map(|&x| {
            let mut row = vec![x];
            for f in ts.functions() {
                row.push(f.eval(x)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(SampleTable { columns, rows })
}

pub fn sample_curve(curve: &MDCurve, n: usize) -> Result<SampleTable> {
    let xs = grid(curve.space(), n)?;
    let names = ["x", "y", "z"];
    let columns = std::iter::once("u".to_string())
        .chain(names[..curve.dim()].iter().map(|s| s.to_string()))
        .collect();
    let rows = xs
        .iter()
        .map(|&u| Ok(std::iter::once(u).chain(curve.eval(u)?).collect()))
        .collect::<Result<_>>()?;
    Ok(SampleTable { columns, rows })
}

/// Samples `what` from a basis, using `curve` for curve tables.
pub fn sample(basis: &BSplineBasis, curve: Option<&MDCurve>, what: Quantity, n: usize) -> Result<SampleTable> {
    match what {
        Quantity::Basis => sample_basis(basis, n),
        Quantity::Transitions => sample_transitions(basis, n),
        Quantity::Derivative(r) => sample_derivative(basis, r, n),
        Quantity::Curve => {
            let c = curve.ok_or_else(|| Error::Document("curve samples need \"control_points\"".into()))?;
            sample_curve(c, n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis() -> BSplineBasis {
        let sp = SplineSpace::new([0.0, 7.0], vec![1.0, 3.0, 6.0], vec![1, 2, 4, 2], vec![0, 1, 2]).unwrap();
        BSplineBasis::new(&sp).unwrap()
    }

    #[test]
    fn quantity_names() {
        assert_eq!("basis".parse::<Quantity>().unwrap(), Quantity::Basis);
        assert_eq!("derivative".parse::<Quantity>().unwrap(), Quantity::Derivative(1));
        assert_eq!("derivative:3".parse::<Quantity>().unwrap(), Quantity::Derivative(3));
        assert_eq!("derivative2".parse::<Quantity>().unwrap(), Quantity::Derivative(2));
        assert!("bases".parse::<Quantity>().is_err());
    }

    #[test]
    fn basis_rows_sum_to_one() {
        let t = sample_basis(&basis(), 71).unwrap();
        assert_eq!(t.columns.len(), 8);
        assert_eq!(t.rows.first().unwrap()[0], 0.0);
        assert_eq!(t.rows.last().unwrap()[0], 7.0);
        for r in &t.rows {
            assert!((r[1..].iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(grid(basis().space(), 1).is_err());
    }

    #[test]
    fn csv_round_trips_values() {
        let t = sample_transitions(&basis(), 9).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x,f1,f2,f3,f4,f5,f6,f7");
        for (line, row) in lines.zip(&t.rows) {
            let parsed: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            assert_eq!(&parsed, row);
        }
    }
}
