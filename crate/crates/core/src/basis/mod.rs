//! The multi-degree B-spline basis `N_1..N_K`.
//!
//! [`BSplineBasis::from_transitions`] is the production path (`N_i = f_i - f_{i+1}`).
//! [`oracle`] rebuilds the basis level by level from the integral recurrence in
//! exact Bernstein arithmetic, and [`algorithm1`] evaluates it with a
//! Cox-de Boor style recurrence on spaces whose unequal-degree joins are at
//! most `C^1`.

pub mod algorithm1;
pub mod oracle;
pub mod phi;

use std::sync::Arc;

use crate::bernstein::BernsteinPiece;
use crate::error::{Error, Result};
use crate::piecewise::PiecewisePoly;
use crate::space::{ExtendedPartitions, SplineSpace};
use crate::transition::{solve_all, TransitionSet};

#[derive(Debug, Clone)]
pub struct BSplineBasis {
    space: Arc<SplineSpace>,
    partitions: Arc<ExtendedPartitions>,
    functions: Vec<PiecewisePoly>,
    transitions: Option<Arc<TransitionSet>>,
}

/// The `d_j + 1` basis functions that can be nonzero at a parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBasis {
    pub interval: usize,
    /// 0-based index `l` of the last active function.
    pub span: usize,
    pub values: Vec<f64>,
}

impl LocalBasis {
    /// 0-based index of the first active function, `l - d_j`.
    pub fn first(&self) -> usize {
        self.span + 1 - self.values.len()
    }
}

impl BSplineBasis {
    /// Solves the transition functions of `space` and differences them.
    pub fn new(space: &SplineSpace) -> Result<Self> {
        let partitions = ExtendedPartitions::new(space);
        let ts = solve_all(Arc::new(space.clone()), Arc::new(partitions))?;
        Ok(Self::from_transitions(Arc::new(ts)))
    }

    pub fn from_transitions(ts: Arc<TransitionSet>) -> Self {
        let k = ts.len();
        let functions = (0..k)
            .map(|i| {
                let fi = ts.get(i).poly();
                if i + 1 < k {
                    fi.add_scaled(ts.get(i + 1).poly(), -1.0)
                } else {
                    fi.clone()
                }
            })
            .collect();
        Self {
            space: ts.space_arc(),
            partitions: ts.partitions_arc(),
            functions,
            transitions: Some(ts),
        }
    }

    pub(crate) fn from_functions(
        space: Arc<SplineSpace>,
        partitions: Arc<ExtendedPartitions>,
        functions: Vec<PiecewisePoly>,
    ) -> Self {
        Self { space, partitions, functions, transitions: None }
    }

    pub fn space(&self) -> &SplineSpace {
        &self.space
    }

    pub fn partitions(&self) -> &ExtendedPartitions {
        &self.partitions
    }

    pub fn transitions(&self) -> Option<&TransitionSet> {
        self.transitions.as_deref()
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.space.max_degree()
    }

    pub fn function(&self, i: usize) -> &PiecewisePoly {
        &self.functions[i]
    }

    pub fn functions(&self) -> &[PiecewisePoly] {
        &self.functions
    }

    /// Support `[s_i, t_i]` of `N_i`.
    pub fn support(&self, i: usize) -> (f64, f64) {
        (self.partitions.s()[i], self.partitions.t()[i])
    }

    /// All `K` values at `x`.
    pub fn eval_all(&self, x: f64) -> Result<Vec<f64>> {
        let j = self.space.locate(x)?;
        Ok(self.functions.iter().map(|f| f.piece(j).value(x)).collect())
    }

    /// Values of the active functions `l - d_j ..= l` at `x`.
    pub fn eval_local(&self, x: f64) -> Result<LocalBasis> {
        let j = self.space.locate(x)?;
        let span = self.partitions.span_of_interval(&self.space, j);
        let d = self.space.degree(j);
        if span < d {
            return Err(Error::Internal(format!(
                "span {span} on interval {j} leaves fewer than {} active functions",
                d + 1
            )));
        }
        let values = (span - d..=span)
            .map(|i| self.functions[i].piece(j).value(x))
            .collect();
        Ok(LocalBasis { interval: j, span, values })
    }

    /// Local Bernstein coefficients of `N_i` on interval `j`.
    pub fn local_coefficients(&self, i: usize, j: usize) -> &BernsteinPiece {
        self.functions[i].piece(j)
    }

    /// `D^order N_i` for every `i`.
    pub fn derivative(&self, order: usize) -> Vec<PiecewisePoly> {
        self.functions.iter().map(|f| f.nth_derivative(order)).collect()
    }
}
