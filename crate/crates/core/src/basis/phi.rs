//! Samples the ratio functions `phi_i^{n-1}` implied by two adjacent
//! recurrence levels through
//! `N_{i,n} = phi_i^{n-1} N_{i,n-1} + (1 - phi_{i+1}^{n-1}) N_{i+1,n-1}`.
//!
//! Nothing rational is stored: each call walks the relation upward from the
//! first function of level `n` at a single parameter value.

use super::oracle::RecurrenceLevels;
use crate::error::{Error, Result};

const VANISHING: f64 = 1e-13;

/// `phi_i^{n-1}(x)` for the 0-based index `i`, or `None` when a level-`(n-1)`
/// denominator vanishes at `x` (the sample should be skipped).
pub fn extract_phi(levels: &RecurrenceLevels, i: usize, n: usize, x: f64) -> Result<Option<f64>> {
    let m = levels.space.max_degree();
    if n == 0 || n > m {
        return Err(Error::OutOfRange { index: n, len: m + 1 });
    }
    let first = m - n;
    if i <= first || i >= levels.partitions.len() {
        return Err(Error::OutOfRange { index: i, len: levels.partitions.len() });
    }
    let upper = levels.level(n);
    let lower = levels.level(n - 1);
    // phi_first * N_{first, n-1} vanishes because N_{first, n-1} is undefined.
    let mut carried = 0.0;
    let mut phi = 0.0;
    for k in first..i {
        let denom = lower.value(k + 1, x)?;
        if denom.abs() < VANISHING {
            if k + 1 == i {
                return Ok(None);
            }
            // phi_{k+1} is free here, but its product with N_{k+1,n-1} is zero.
            carried = 0.0;
            continue;
        }
        let rest = upper.value(k, x)? - carried;
        phi = 1.0 - rest / denom;
        carried = phi * denom;
    }
    Ok(Some(phi))
}
