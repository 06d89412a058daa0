//! Curve representations: analytic builtins, raw samples, arc-length resampling
//! and synthesis from prescribed curvature functions.

mod arclength;
mod sampled;
mod spec;
mod synth;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use arclength::{arc_length_table, reparametrize_by_arclength, sample_curve, ArcLengthTable};
pub use sampled::{CurveDerivatives, Differentiation, SampledCurve, ARC_SPEED_TOLERANCE};
pub use spec::{CurveKind, CurveSpec};
pub(crate) use synth::gram_deviation;
pub use synth::{
    synthesize_from_curvatures_3d, synthesize_from_curvatures_4d, synthesize_on, CurvatureSpec, Curvatures, ScalarFn,
    Synthesis,
};

/// Ambient dimension of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dimension {
    Three,
    Four,
}

impl Dimension {
    pub fn get(self) -> usize {
        match self {
            Dimension::Three => 3,
            Dimension::Four => 4,
        }
    }
}

impl Dimension {
    pub(crate) fn check(self, expected: Dimension) -> crate::error::Result<()> {
        if self != expected {
            return Err(crate::error::Error::DimensionMismatch { expected: expected.get(), got: self.get() });
        }
        Ok(())
    }
}

impl TryFrom<u8> for Dimension {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            3 => Ok(Dimension::Three),
            4 => Ok(Dimension::Four),
            other => Err(format!("dimension must be 3 or 4, got {other}")),
        }
    }
}

impl From<Dimension> for u8 {
    fn from(d: Dimension) -> u8 {
        d.get() as u8
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.get())
    }
}
