//! Multi-degree splines: piecewise polynomials whose pieces have different
//! degrees, joined with prescribed (parametric or geometric) continuity.
//!
//! The B-spline basis is computed from *transition functions*, the tail sums
//! `f_i = N_i + ... + N_K`, each of which solves a small Hermite problem in
//! local Bernstein form. Knot insertion, local degree elevation and Bezier
//! extraction are all expressed through those functions.
//!
//! ```
//! use mdspline::{MDCurve, SplineSpace};
//!
//! let space = SplineSpace::new([0.0, 7.0], vec![1.0, 3.0, 6.0], vec![1, 2, 4, 2], vec![0, 1, 2])?;
//! assert_eq!(space.dim(), 7);
//! let pts: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64, (i * i) as f64]).collect();
//! let curve = MDCurve::new(&space, pts)?;
//! let refined = curve.insert_knot(2.6)?.curve;
//! assert_eq!(refined.len(), 8);
//! # Ok::<(), mdspline::Error>(())
//! ```

pub mod basis;
pub mod bernstein;
pub mod curve;
pub mod document;
mod error;
pub mod piecewise;
pub mod sample;
pub mod space;
pub mod transition;

pub use basis::{BSplineBasis, LocalBasis};
pub use bernstein::{BernsteinPiece, Side};
pub use curve::{BezierSegment, BezierSegmentList, MDCurve, Refinement};
pub use document::SpaceDocument;
pub use error::{Error, ErrorKind, Result};
pub use piecewise::PiecewisePoly;
pub use sample::SampleTable;
pub use space::{ConnectionMatrix, ExtendedPartitions, RawSpace, SplineSpace};
pub use transition::{TransitionFunction, TransitionSet};
