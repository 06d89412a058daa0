use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::Dimension;
use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::stencil::CentralStencil;

/// Allowed deviation of chord speed from 1 on a [`SampledCurve`].
pub const ARC_SPEED_TOLERANCE: f64 = 1e-3;

/// Samples trimmed at each end of a curve carrying exact derivatives, matching the
/// reach of the 5-point stencil used to difference frames along the grid.
const JET_TRIM: usize = 2;

/// Minimum number of samples for any frame computation.
pub const MIN_SAMPLES: usize = 9;

/// How derivatives are estimated on curves that carry only positions.
///
/// Derivatives use a centered stencil of `2 * half_width + 1` points whose spacing is
/// the multiple of the grid step closest to `target_spacing`. Spacing the stencil
/// wider than the grid keeps round-off in third and fourth derivatives far below the
/// truncation error of the stencil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Differentiation {
    pub half_width: usize,
    pub target_spacing: f64,
}

impl Default for Differentiation {
    fn default() -> Self {
        Self { half_width: 4, target_spacing: 0.05 }
    }
}

/// Arc-length parametrized curve on a uniform grid `s_i = start + i * step`.
///
/// Points of E3 curves are spatial quaternions (zero scalar part). Curves obtained
/// from analytic builtins also carry their exact arc-length derivatives ("jets").
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    dimension: Dimension,
    start: f64,
    step: f64,
    points: Vec<Quaternion>,
    jets: Option<Vec<[Quaternion; 4]>>,
}

impl SampledCurve {
    /// Validates the grid and the unit-speed certificate.
    pub fn new(dimension: Dimension, start: f64, step: f64, points: Vec<Quaternion>) -> Result<Self> {
        let curve = Self { dimension, start, step, points, jets: None };
        curve.validate()?;
        Ok(curve)
    }

    /// Like [`Self::new`], attaching derivatives 1..=4 with respect to arc length.
    pub fn with_jets(
        dimension: Dimension,
        start: f64,
        step: f64,
        points: Vec<Quaternion>,
        jets: Vec<[Quaternion; 4]>,
    ) -> Result<Self> {
        if jets.len() != points.len() {
            return Err(Error::InvalidSpec("jet count differs from point count".into()));
        }
        let curve = Self { dimension, start, step, points, jets: Some(jets) };
        curve.validate()?;
        Ok(curve)
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::InvalidSpec(format!("grid step must be positive, got {}", self.step)));
        }
        if self.points.len() < 2 {
            return Err(Error::TooFewSamples { got: self.points.len(), need: 2 });
        }
        if self.dimension == Dimension::Three {
            if let Some(i) = self.points.iter().position(|p| p.d != 0.0) {
                return Err(Error::InvalidSpec(format!("E3 sample {i} has a nonzero scalar part")));
            }
        }
        for (i, w) in self.points.windows(2).enumerate() {
            let speed = (w[1] - w[0]).norm() / self.step;
            if !((speed - 1.0).abs() <= ARC_SPEED_TOLERANCE) {
                return Err(Error::NotUnitSpeed { index: i, speed });
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn s(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn s_grid(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.s(i)).collect()
    }

    /// Total arc length covered by the grid.
    pub fn length(&self) -> f64 {
        (self.len() - 1) as f64 * self.step
    }

    pub fn points(&self) -> &[Quaternion] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Quaternion {
        self.points[i]
    }

    pub fn jets(&self) -> Option<&[[Quaternion; 4]]> {
        self.jets.as_deref()
    }

    /// Largest `|chord / step - 1|` over consecutive samples.
    pub fn unit_speed_deviation(&self) -> f64 {
        self.points.windows(2).map(|w| ((w[1] - w[0]).norm() / self.step - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Applies `x -> linear(x) + translation` to positions and `linear` to derivatives.
    /// `linear` must be an orthogonal map that preserves the curve's dimension.
    pub fn rigidly_moved<F>(&self, linear: F, translation: Quaternion) -> Result<Self>
    where
        F: Fn(Quaternion) -> Quaternion,
    {
        let points = self.points.iter().map(|p| linear(*p) + translation).collect();
        match &self.jets {
            Some(jets) => {
                let jets = jets.iter().map(|j| j.map(&linear)).collect();
                Self::with_jets(self.dimension, self.start, self.step, points, jets)
            }
            None => Self::new(self.dimension, self.start, self.step, points),
        }
    }

    /// Derivative estimator for this curve under `diff`.
    pub fn derivatives(&self, diff: &Differentiation) -> Result<CurveDerivatives<'_>> {
        let n = self.len();
        if n < MIN_SAMPLES {
            return Err(Error::TooFewSamples { got: n, need: MIN_SAMPLES });
        }
        if self.jets.is_some() {
            return Ok(CurveDerivatives { curve: self, stencil: None, interior: JET_TRIM..n - JET_TRIM });
        }
        let stencil = CentralStencil::with_target_spacing(diff.half_width, self.step, diff.target_spacing, n)?;
        let reach = stencil.reach();
        Ok(CurveDerivatives { curve: self, stencil: Some(stencil), interior: reach..n - reach })
    }
}

/// Arc-length derivatives of a [`SampledCurve`] at interior samples.
#[derive(Debug, Clone)]
pub struct CurveDerivatives<'a> {
    curve: &'a SampledCurve,
    stencil: Option<CentralStencil>,
    interior: Range<usize>,
}

impl CurveDerivatives<'_> {
    /// Sample indices where derivatives are defined.
    pub fn interior(&self) -> Range<usize> {
        self.interior.clone()
    }

    /// Stencil in use, or `None` when exact derivatives are available.
    pub fn stencil(&self) -> Option<&CentralStencil> {
        self.stencil.as_ref()
    }

    /// Derivatives of orders 1..=4 at sample `i`.
    pub fn at(&self, i: usize) -> Result<[Quaternion; 4]> {
        if !self.interior.contains(&i) {
            return Err(Error::BoundaryIndex { index: i, start: self.interior.start, end: self.interior.end });
        }
        match (&self.stencil, self.curve.jets()) {
            (None, Some(jets)) => Ok(jets[i]),
            (Some(st), _) => {
                let pts = self.curve.points();
                Ok([st.apply(pts, i, 1), st.apply(pts, i, 2), st.apply(pts, i, 3), st.apply(pts, i, 4)])
            }
            (None, None) => unreachable!("derivatives without jets always carry a stencil"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, step: f64) -> Vec<Quaternion> {
        (0..n).map(|i| Quaternion::new(i as f64 * step, 0.0, 0.0, 0.0)).collect()
    }

    #[test]
    fn rejects_non_unit_speed() {
        let pts: Vec<Quaternion> = (0..20).map(|i| Quaternion::new(2.0 * i as f64, 0.0, 0.0, 0.0)).collect();
        assert!(matches!(
            SampledCurve::new(Dimension::Three, 0.0, 1.0, pts),
            Err(Error::NotUnitSpeed { index: 0, .. })
        ));
    }

    #[test]
    fn rejects_scalar_part_in_e3() {
        let mut pts = line(20, 0.1);
        pts[3].d = 1e-3;
        assert!(matches!(SampledCurve::new(Dimension::Three, 0.0, 0.1, pts), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn interior_depends_on_stencil_reach() {
        let c = SampledCurve::new(Dimension::Three, 0.0, 0.01, line(101, 0.01)).unwrap();
        let d = c.derivatives(&Differentiation::default()).unwrap();
        assert_eq!(d.interior(), 20..81);
        assert!(matches!(d.at(5), Err(Error::BoundaryIndex { .. })));
        let v = d.at(50).unwrap();
        assert!((v[0] - Quaternion::E1).norm() < 1e-12);
        assert!(v[1].norm() < 1e-9);
    }

    #[test]
    fn too_few_samples() {
        let c = SampledCurve::new(Dimension::Three, 0.0, 0.01, line(5, 0.01)).unwrap();
        assert!(matches!(c.derivatives(&Differentiation::default()), Err(Error::TooFewSamples { .. })));
    }
}
