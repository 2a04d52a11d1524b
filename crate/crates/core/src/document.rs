//! JSON documents describing a space and, optionally, a curve on it.

use serde::{Deserialize, Serialize};

use crate::curve::MDCurve;
use crate::error::{Error, Result};
use crate::space::{RawSpace, SplineSpace};

/// A space document with optional `"control_points"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDocument {
    #[serde(flatten)]
    pub space: RawSpace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_points: Option<Vec<Vec<f64>>>,
}

impl SpaceDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Document(format!("line {} column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        serde_json::from_value(value).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents hold only numbers and arrays")
    }

    pub fn from_space(space: &SplineSpace) -> Self {
        Self { space: space.to_raw(), control_points: None }
    }

    pub fn from_curve(curve: &MDCurve) -> Self {
        Self { space: curve.space().to_raw(), control_points: Some(curve.control_points()) }
    }

    pub fn to_space(&self) -> Result<SplineSpace> {
        let all = [self.space.domain.as_slice(), &self.space.breakpoints];
        if all.iter().flat_map(|v| v.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Document("numbers must be finite".into()));
        }
        self.space.validate()
    }

    pub fn has_curve(&self) -> bool {
        self.control_points.is_some()
    }

    pub fn to_curve(&self) -> Result<MDCurve> {
        let points = self
            .control_points
            .clone()
            .ok_or_else(|| Error::Document("missing \"control_points\"".into()))?;
        MDCurve::new(&self.to_space()?, points)
    }
}
