//! Versioned editing sessions.

use std::collections::VecDeque;
use std::sync::{Arc, RwLock};

use mdspline::{ConnectionMatrix, Error, MDCurve, SpaceDocument};
use serde::Deserialize;
use tokio::sync::Mutex;

pub const UNDO_DEPTH: usize = 64;

/// Immutable state visible to readers.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub version: u64,
    /// The session curve. Sessions opened without control points carry zero
    /// points of dimension 1, which are never reported.
    pub curve: MDCurve,
    pub has_points: bool,
}

impl Snapshot {
    pub fn document(&self) -> SpaceDocument {
        if self.has_points {
            SpaceDocument::from_curve(&self.curve)
        } else {
            SpaceDocument::from_space(self.curve.space())
        }
    }

    pub fn control_points(&self) -> Option<Vec<Vec<f64>>> {
        self.has_points.then(|| self.curve.control_points())
    }
}

/// A mutating request.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Op {
    MovePoint {
        index: usize,
        point: Vec<f64>,
    },
    InsertKnot {
        x: f64,
    },
    Elevate {
        interval: usize,
        #[serde(default = "one")]
        times: usize,
    },
    /// Replaces `M_j` at the 1-based break-point `x_j`, either from explicit
    /// entries (packed lower triangle or full row-major) or from the
    /// `alpha`, `beta`, `gamma` parameters of a `C^2` connection.
    SetConnection {
        breakpoint: usize,
        #[serde(default)]
        matrix: Option<Vec<f64>>,
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default)]
        beta: Option<f64>,
        #[serde(default)]
        gamma: Option<f64>,
    },
}

fn one() -> usize {
    1
}

/// Why a mutation was refused.
#[derive(Debug, Clone, PartialEq)]
pub enum Refusal {
    /// `expected_version` does not match the current version.
    Stale { current: u64 },
    /// Operator preconditions failed, or the undo stack is empty.
    Precondition(String),
    /// The new state failed a consistency check.
    Internal(String),
}

impl From<Error> for Refusal {
    fn from(e: Error) -> Self {
        match e.kind() {
            mdspline::ErrorKind::Internal => Refusal::Internal(e.to_string()),
            _ => Refusal::Precondition(e.to_string()),
        }
    }
}

/// Outcome of an applied operation.
#[derive(Debug, Clone)]
pub struct Applied {
    pub snapshot: Arc<Snapshot>,
    /// Largest point-set deviation between the old and new curves, when
    /// invariance was checked.
    pub max_deviation: Option<f64>,
}

pub struct Session {
    current: RwLock<Arc<Snapshot>>,
    undo: Mutex<VecDeque<Arc<Snapshot>>>,
    verify: bool,
}

impl Session {
    pub fn open(doc: &SpaceDocument, verify: bool) -> Result<Self, Error> {
        let (curve, has_points) = if doc.has_curve() {
            (doc.to_curve()?, true)
        } else {
            let space = doc.to_space()?;
            let zeros = vec![vec![0.0]; space.dim()];
            (MDCurve::new(&space, zeros)?, false)
        };
        let snapshot = Snapshot { version: 0, curve, has_points };
        Ok(Self { current: RwLock::new(Arc::new(snapshot)), undo: Mutex::new(VecDeque::new()), verify })
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("session lock").clone()
    }

    fn publish(&self, s: Snapshot) -> Arc<Snapshot> {
        let s = Arc::new(s);
        *self.current.write().expect("session lock") = s.clone();
        s
    }

    pub async fn apply(&self, op: &Op, expected_version: Option<u64>) -> Result<Applied, Refusal> {
        let mut undo = self.undo.lock().await;
        let cur = self.snapshot();
        if let Some(v) = expected_version {
            if v != cur.version {
                return Err(Refusal::Stale { current: cur.version });
            }
        }
        let (curve, refines) = apply_op(&cur, op)?;
        let max_deviation = if refines && self.verify && cur.has_points {
            let dev = point_set_deviation(&cur.curve, &curve)?;
            let scale = cur.curve.control_points().iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
            if dev > 1e-10 * scale {
                return Err(Refusal::Internal(format!("curve moved by {dev:e} during refinement")));
            }
            Some(dev)
        } else {
            None
        };
        if undo.len() == UNDO_DEPTH {
            undo.pop_front();
        }
        undo.push_back(cur.clone());
        let snapshot = self.publish(Snapshot { version: cur.version + 1, curve, has_points: cur.has_points });
        Ok(Applied { snapshot, max_deviation })
    }

    pub async fn undo(&self, expected_version: Option<u64>) -> Result<Arc<Snapshot>, Refusal> {
        let mut undo = self.undo.lock().await;
        let cur = self.snapshot();
        if let Some(v) = expected_version {
            if v != cur.version {
                return Err(Refusal::Stale { current: cur.version });
            }
        }
        let prev = undo.pop_back().ok_or_else(|| Refusal::Precondition("nothing to undo".into()))?;
        Ok(self.publish(Snapshot { version: cur.version + 1, curve: prev.curve.clone(), has_points: prev.has_points }))
    }

    pub async fn undo_depth(&self) -> usize {
        self.undo.lock().await.len()
    }
}

fn apply_op(cur: &Snapshot, op: &Op) -> Result<(MDCurve, bool), Refusal> {
    let curve = &cur.curve;
    Ok(match op {
        Op::MovePoint { index, point } => {
            if !cur.has_points {
                return Err(Refusal::Precondition("session has no control points".into()));
            }
            (curve.with_point(*index, point)?, false)
        }
        Op::InsertKnot { x } => (curve.insert_knot(*x)?.curve, true),
        Op::Elevate { interval, times } => (curve.elevate_degree(*interval, *times)?, true),
        Op::SetConnection { breakpoint, matrix, alpha, beta, gamma } => {
            let space = curve.space();
            if *breakpoint == 0 || *breakpoint > space.q() {
                return Err(Refusal::Precondition(format!(
                    "break-point index {breakpoint} is not in 1..={}",
                    space.q()
                )));
            }
            let order = space.continuity(*breakpoint) + 1;
            let m = match (matrix, alpha, beta, gamma) {
                (Some(values), None, None, None) => ConnectionMatrix::from_flat(order, values),
                (None, alpha, beta, gamma) => shape_matrix(order, alpha.unwrap_or(1.0), beta.unwrap_or(0.0), gamma.unwrap_or(1.0)),
                _ => Err("give either \"matrix\" or alpha/beta/gamma".into()),
            }
            .map_err(Refusal::Precondition)?;
            (curve.with_connection(*breakpoint, m)?, false)
        }
    })
}

/// `[[1], [0, alpha], [0, beta, gamma]]` cut to `order` rows.
fn shape_matrix(order: usize, alpha: f64, beta: f64, gamma: f64) -> Result<ConnectionMatrix, String> {
    if order > 3 {
        return Err(format!("alpha/beta/gamma describe joins up to C^2, this one needs order {order}"));
    }
    let rows = [vec![1.0], vec![0.0, alpha], vec![0.0, beta, gamma]];
    ConnectionMatrix::from_rows(&rows[..order])
}

fn point_set_deviation(a: &MDCurve, b: &MDCurve) -> Result<f64, Error> {
    let (lo, hi) = (a.space().a(), a.space().b());
    let n = 400;
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let x = if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
        let (p, q) = (a.eval(x)?, b.eval(x)?);
        worst = p.iter().zip(&q).fold(worst, |m, (u, v)| m.max((u - v).abs()));
    }
    Ok(worst)
}
