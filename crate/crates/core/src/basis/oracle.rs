//! Integral recurrence for the basis, carried out exactly on Bernstein pieces.
//!
//! Level `n` holds `N_{i,n}` for `i >= m - n` (0-based), supported on
//! `[s_i, t_{i-m+n}]`. On an interval `j` of the support the function is `1`
//! when `n = m - d_j`, the difference of the normalised running integrals of
//! `N_{i,n-1}` and `N_{i+1,n-1}` when `n > m - d_j`, and zero otherwise.
//! A vanishing `N_{i,n}` contributes a unit step at `s_i` to the running
//! integrals; the function past the last index contributes nothing.

use std::sync::Arc;

use crate::bernstein::BernsteinPiece;
use crate::error::{Error, Result};
use crate::piecewise::PiecewisePoly;
use crate::space::{ExtendedPartitions, SplineSpace};

use super::BSplineBasis;

/// One level of the recurrence. `functions[i]` is `None` when `N_{i,n}` is
/// undefined or vanishes identically.
#[derive(Debug, Clone)]
pub struct RecurrenceLevel {
    pub n: usize,
    pub functions: Vec<Option<PiecewisePoly>>,
    /// `delta_{i,n} = 1 / integral of N_{i,n}`; zero for vanishing functions.
    pub deltas: Vec<f64>,
}

impl RecurrenceLevel {
    pub fn nonzero_count(&self) -> usize {
        self.functions.iter().filter(|f| f.is_some()).count()
    }

    /// Value of `N_{i,n}(x)`, zero for undefined or vanishing functions.
    pub fn value(&self, i: usize, x: f64) -> Result<f64> {
        match self.functions.get(i) {
            Some(Some(f)) => f.eval(x),
            _ => Ok(0.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RecurrenceLevels {
    pub space: Arc<SplineSpace>,
    pub partitions: Arc<ExtendedPartitions>,
    pub levels: Vec<RecurrenceLevel>,
}

impl RecurrenceLevels {
    pub fn level(&self, n: usize) -> &RecurrenceLevel {
        &self.levels[n]
    }

    pub fn into_basis(self) -> BSplineBasis {
        let m = self.space.max_degree();
        let breaks = breaks(&self.space);
        let functions = self.levels[m]
            .functions
            .iter()
            .map(|f| {
                f.clone()
                    .unwrap_or_else(|| PiecewisePoly::constant(&breaks, self.space.degrees(), 0.0))
            })
            .collect();
        BSplineBasis::from_functions(self.space, self.partitions, functions)
    }
}

#[derive(Debug, Clone)]
enum Cumulative {
    Zero,
    One,
    /// Value between the two conventions of a vanishing function; never
    /// needed by a consistent recurrence.
    Undetermined,
    Poly(BernsteinPiece),
}

fn breaks(space: &SplineSpace) -> Vec<f64> {
    (0..=space.q() + 1).map(|j| space.x(j)).collect()
}

/// Builds every level `n = 0..=m` of the integral recurrence.
pub fn integral_recurrence_levels(space: &SplineSpace) -> Result<RecurrenceLevels> {
    let partitions = ExtendedPartitions::new(space);
    let kdim = partitions.len();
    let m = space.max_degree();
    let xs = breaks(space);
    let s = partitions.s();
    let t = partitions.t();
    let nint = space.intervals();

    // Support end t_{i-m+n} (0-based), or None when the index is negative.
    let support_end = |i: usize, n: usize| -> Option<f64> {
        (i + n).checked_sub(m).map(|idx| t[idx])
    };

    let mut levels: Vec<RecurrenceLevel> = Vec::with_capacity(m + 1);
    // Running integrals of delta * N at the previous level, per function and interval.
    let mut prev_cum: Vec<Vec<Cumulative>> = Vec::new();

    for n in 0..=m {
        let mut functions: Vec<Option<PiecewisePoly>> = vec![None; kdim];
        let first = m - n;
        for i in first..kdim {
            let end = support_end(i, n).expect("defined functions have a support end");
            if !(s[i] < end) {
                continue;
            }
            let mut pieces = Vec::with_capacity(nint);
            let mut active = false;
            for j in 0..nint {
                let d = space.degree(j);
                let inside = xs[j] >= s[i] && xs[j + 1] <= end;
                let piece = if !inside || n + d < m {
                    BernsteinPiece::zero(xs[j], xs[j + 1], (n + d).saturating_sub(m))
                } else if n + d == m {
                    active = true;
                    BernsteinPiece::constant(xs[j], xs[j + 1], 0, 1.0)
                } else {
                    active = true;
                    let here = cumulative_piece(&prev_cum[i][j], xs[j], xs[j + 1])
                        .ok_or_else(|| undetermined(i, n, j))?;
                    let next = match prev_cum.get(i + 1) {
                        Some(c) => cumulative_piece(&c[j], xs[j], xs[j + 1])
                            .ok_or_else(|| undetermined(i + 1, n, j))?,
                        None => BernsteinPiece::zero(xs[j], xs[j + 1], 0),
                    };
                    let p = here.add_scaled(&next, -1.0);
                    p.elevated_to(n + d - m)
                };
                pieces.push(piece);
            }
            if n > 0 && i + 1 < kdim {
                check_outside_support(&prev_cum, i, &xs, s[i], end, space, n)?;
            }
            if active {
                functions[i] = Some(PiecewisePoly::new(pieces));
            }
        }

        let mut deltas = vec![0.0; kdim];
        let mut cum = Vec::with_capacity(kdim);
        for i in 0..kdim {
            let end = support_end(i, n);
            match &functions[i] {
                Some(f) => {
                    let integral = f.integral();
                    if !(integral > 0.0) {
                        return Err(Error::Internal(format!(
                            "N_{{{},{n}}} has non-positive integral {integral}",
                            i + 1
                        )));
                    }
                    deltas[i] = 1.0 / integral;
                    let end = end.expect("nonzero functions have a support end");
                    let mut run = 0.0;
                    let mut row = Vec::with_capacity(nint);
                    for j in 0..nint {
                        if xs[j + 1] <= s[i] {
                            row.push(Cumulative::Zero);
                        } else if xs[j] >= end {
                            row.push(Cumulative::One);
                        } else {
                            let piece = f.piece(j).scaled(deltas[i]).antiderivative(run);
                            run = *piece.coeffs.last().expect("nonempty");
                            row.push(Cumulative::Poly(piece));
                        }
                    }
                    cum.push(row);
                }
                None => {
                    let row = (0..nint)
                        .map(|j| {
                            if xs[j + 1] <= s[i] {
                                Cumulative::Zero
                            } else if xs[j] >= s[i] && end.is_none_or(|e| xs[j] >= e) {
                                Cumulative::One
                            } else {
                                Cumulative::Undetermined
                            }
                        })
                        .collect();
                    cum.push(row);
                }
            }
        }
        prev_cum = cum;
        levels.push(RecurrenceLevel { n, functions, deltas });
    }

    Ok(RecurrenceLevels {
        space: Arc::new(space.clone()),
        partitions: Arc::new(partitions),
        levels,
    })
}

/// Final basis `N_{i,m}` from the integral recurrence.
pub fn integral_recurrence_oracle(space: &SplineSpace) -> Result<BSplineBasis> {
    Ok(integral_recurrence_levels(space)?.into_basis())
}

fn cumulative_piece(c: &Cumulative, lo: f64, hi: f64) -> Option<BernsteinPiece> {
    match c {
        Cumulative::Zero => Some(BernsteinPiece::constant(lo, hi, 0, 0.0)),
        Cumulative::One => Some(BernsteinPiece::constant(lo, hi, 0, 1.0)),
        Cumulative::Poly(p) => Some(p.clone()),
        Cumulative::Undetermined => None,
    }
}

fn undetermined(i: usize, n: usize, j: usize) -> Error {
    Error::Internal(format!(
        "running integral of vanishing N_{{{},{}}} needed on interval {j}",
        i + 1,
        n - 1
    ))
}

/// The integral difference must vanish on intervals outside `[s_i, end]`.
fn check_outside_support(
    prev_cum: &[Vec<Cumulative>],
    i: usize,
    xs: &[f64],
    start: f64,
    end: f64,
    space: &SplineSpace,
    n: usize,
) -> Result<()> {
    let m = space.max_degree();
    for j in 0..space.intervals() {
        let inside = xs[j] >= start && xs[j + 1] <= end;
        if inside || n + space.degree(j) <= m {
            continue;
        }
        let (Some(a), Some(b)) = (
            cumulative_piece(&prev_cum[i][j], xs[j], xs[j + 1]),
            cumulative_piece(&prev_cum[i + 1][j], xs[j], xs[j + 1]),
        ) else {
            continue;
        };
        let diff = a.add_scaled(&b, -1.0);
        if diff.coeffs.iter().any(|c| c.abs() > 1e-9) {
            return Err(Error::Internal(format!(
                "N_{{{},{n}}} is nonzero on interval {j} outside its support [{start}, {end}]",
                i + 1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn running() -> SplineSpace {
        SplineSpace::new([0.0, 7.0], vec![1.0, 3.0, 6.0], vec![1, 2, 4, 2], vec![0, 1, 2]).unwrap()
    }

    #[test]
    fn running_example_level_counts() {
        let levels = integral_recurrence_levels(&running()).unwrap();
        let counts: Vec<usize> = levels.levels.iter().map(RecurrenceLevel::nonzero_count).collect();
        assert_eq!(counts, vec![1, 2, 4, 6, 7]);
    }

    #[test]
    fn level_one_of_running_example() {
        let levels = integral_recurrence_levels(&running()).unwrap();
        let l1 = levels.level(1);
        for x in [3.0, 4.0, 5.5] {
            assert!((l1.value(5, x).unwrap() - (6.0 - x) / 3.0).abs() < 1e-14);
            assert!((l1.value(6, x).unwrap() - (x - 3.0) / 3.0).abs() < 1e-14);
        }
        assert_eq!(l1.value(6, 6.5).unwrap(), 0.0);
    }

    #[test]
    fn phi_example_has_five_functions() {
        let sp = SplineSpace::new(
            [0.0, 5.0],
            vec![1.0, 2.0, 3.0, 4.0],
            vec![2, 3, 4, 3, 2],
            vec![2, 3, 3, 2],
        )
        .unwrap();
        let b = integral_recurrence_oracle(&sp).unwrap();
        assert_eq!(b.len(), 5);
        for k in 0..=100 {
            let x = 5.0 * k as f64 / 100.0;
            let sum: f64 = b.eval_all(x).unwrap().iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_degree_starts_everything_at_level_zero() {
        let sp = SplineSpace::new([0.0, 3.0], vec![1.0, 2.0], vec![2, 2, 2], vec![1, 1]).unwrap();
        let levels = integral_recurrence_levels(&sp).unwrap();
        // m - d_j = 0 on every interval: level 0 holds the indicator functions.
        assert_eq!(levels.level(0).nonzero_count(), 3);
    }
}
