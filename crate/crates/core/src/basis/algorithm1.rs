//! Cox-de Boor style evaluation with explicit linear `phi` functions.
//!
//! Valid when every join of unequal degrees is `C^0` or `C^1`; joins of equal
//! degree may have any admissible continuity. Levels `1..m-1` use
//! `phi_i^{n-1} = (x - s_i) / (t_{i-m+n-1} - s_i)`. The last level uses the
//! piecewise-linear `phi` built from the weights `h_j / d_j` when the support
//! of `N_{i,m-1}` spans two or three intervals of unequal degrees.

use crate::error::{Error, Result};
use crate::space::{ExtendedPartitions, SplineSpace};

#[derive(Debug, Clone)]
pub struct Algorithm1 {
    space: SplineSpace,
    partitions: ExtendedPartitions,
}

impl Algorithm1 {
    pub fn new(space: &SplineSpace) -> Result<Self> {
        for i in 1..=space.q() {
            let (dl, dr) = (space.degree(i - 1), space.degree(i));
            if dl != dr && space.continuity(i) > 1 {
                return Err(Error::Unsupported(format!(
                    "C^{} join of degrees {dl} and {dr} at x_{i}",
                    space.continuity(i)
                )));
            }
        }
        if space.is_geometric() {
            return Err(Error::Unsupported("connection matrices".into()));
        }
        Ok(Self { space: space.clone(), partitions: ExtendedPartitions::new(space) })
    }

    pub fn qualifies(space: &SplineSpace) -> bool {
        Self::new(space).is_ok()
    }

    /// Whether `phi_i^{m-1}` takes the piecewise-linear form (0-based `i >= 1`).
    pub fn uses_piecewise_linear_phi(&self, i: usize) -> bool {
        let p = self.partitions.ps()[i];
        let r = self.partitions.pt()[i - 1];
        let ni = r.saturating_sub(p);
        let degrees = &self.space.degrees()[p..r.max(p)];
        (ni == 2 || ni == 3) && degrees.iter().any(|&d| d != degrees[0])
    }

    fn phi(&self, i: usize, n: usize, x: f64, j: usize) -> f64 {
        let m = self.space.max_degree();
        let s = self.partitions.s();
        let t = self.partitions.t();
        // phi_i^{n-1} only multiplies N_{i,n-1}, which needs i >= m - n + 1.
        let Some(ti) = (i + n).checked_sub(m + 1) else {
            return 0.0;
        };
        if n == m && self.uses_piecewise_linear_phi(i) {
            let p = self.partitions.ps()[i];
            let r = self.partitions.pt()[i - 1];
            let w = |jj: usize| (self.space.x(jj + 1) - self.space.x(jj)) / self.space.degree(jj) as f64;
            let delta: f64 = (p..r).map(w).sum();
            let jx = j.clamp(p, r - 1);
            let before: f64 = (p..jx).map(w).sum();
            let partial = (x - self.space.x(jx)) / self.space.degree(jx) as f64;
            return (before + partial) / delta;
        }
        let span = t[ti] - s[i];
        if span > 0.0 {
            (x - s[i]) / span
        } else {
            0.0
        }
    }

    /// Values of all `K` basis functions at `x`.
    pub fn eval_all(&self, x: f64) -> Result<Vec<f64>> {
        let j = self.space.locate(x)?;
        let m = self.space.max_degree();
        let kdim = self.partitions.len();
        let s = self.partitions.s();
        let t = self.partitions.t();
        let (xl, xr) = (self.space.x(j), self.space.x(j + 1));
        let d = self.space.degree(j);

        let mut prev = vec![0.0; kdim + 1];
        for n in 0..=m {
            let mut cur = vec![0.0; kdim + 1];
            for i in (m - n)..kdim {
                let end = t[i + n - m];
                if !(s[i] < end && xl >= s[i] && xr <= end) {
                    continue;
                }
                cur[i] = if n + d == m {
                    1.0
                } else if n + d > m {
                    let left = if i + n > m { self.phi(i, n, x, j) * prev[i] } else { 0.0 };
                    let right = if i + 1 < kdim {
                        (1.0 - self.phi(i + 1, n, x, j)) * prev[i + 1]
                    } else {
                        0.0
                    };
                    left + right
                } else {
                    0.0
                };
            }
            prev = cur;
        }
        prev.truncate(kdim);
        Ok(prev)
    }
}
