use super::CorrespondenceMap;
use crate::curve::{Dimension, SampledCurve};
use crate::error::{Error, Result};
use crate::frenet::{frames_3d, frames_4d, FrameConfig};
use crate::quat::Quaternion;
use crate::stencil::{cumulative_integral, derivative_nodes, interpolate_nodes, interpolate_uniform, INTERP_POINTS};

/// Partners slower than this are rejected.
pub const MIN_PARTNER_SPEED: f64 = 1e-6;

/// `1 - λK` at or below this counts as outside the speed domain.
const DOMAIN_MARGIN: f64 = 1e-9;

/// A constructed partner with its correspondence to the source curve.
#[derive(Debug, Clone)]
pub struct Partner {
    pub lambda: f64,
    /// Arc-length parametrized partner, starting at `s* = 0`.
    pub beta: SampledCurve,
    /// Source arc length against partner arc length, one row per source sample used.
    pub map: CorrespondenceMap,
    /// `‖dβ/ds‖` from the curvatures of the source.
    pub formula_speed: Vec<f64>,
    /// `‖dβ/ds‖` by differencing the offset samples.
    pub measured_speed: Vec<f64>,
}

impl Partner {
    pub fn into_parts(self) -> (SampledCurve, CorrespondenceMap) {
        (self.beta, self.map)
    }
}

/// `β = α + λ n`, resampled by its own arc length.
pub fn construct_partner_3d(alpha: &SampledCurve, lambda: f64, cfg: &FrameConfig) -> Result<Partner> {
    alpha.dimension().check(Dimension::Three)?;
    if lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    let series = frames_3d(alpha, cfg)?;
    series.require_complete()?;
    let mut raw = Vec::with_capacity(series.frames.len());
    let mut formula = Vec::with_capacity(series.frames.len());
    for (i, f) in series.index.iter().zip(&series.frames) {
        let speed = ((1.0 - lambda * f.curvature).powi(2) + (lambda * f.torsion).powi(2)).sqrt();
        if !(speed >= MIN_PARTNER_SPEED) {
            return Err(Error::DegeneratePartner { index: *i, s: f.s, speed });
        }
        formula.push(speed);
        raw.push(alpha.point(*i) + Quaternion::from(f.normal) * lambda);
    }
    finish(alpha, &series.index, raw, formula, lambda)
}

/// `β = α + λ N`, resampled by its own arc length. Requires `1 - λK > 0`.
pub fn construct_partner_4d(alpha: &SampledCurve, lambda: f64, cfg: &FrameConfig) -> Result<Partner> {
    alpha.dimension().check(Dimension::Four)?;
    if lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    let series = frames_4d(alpha, cfg)?;
    series.require_complete()?;
    let mut raw = Vec::with_capacity(series.frames.len());
    let mut formula = Vec::with_capacity(series.frames.len());
    for (i, f) in series.index.iter().zip(&series.frames) {
        let value = 1.0 - lambda * f.curvature;
        if !(value > DOMAIN_MARGIN) {
            return Err(Error::PartnerSpeedDomain { index: *i, s: f.s, value });
        }
        let speed = (value * value + (lambda * f.torsion).powi(2)).sqrt();
        if !(speed >= MIN_PARTNER_SPEED) {
            return Err(Error::DegeneratePartner { index: *i, s: f.s, speed });
        }
        formula.push(speed);
        raw.push(alpha.point(*i) + f.normal * lambda);
    }
    finish(alpha, &series.index, raw, formula, lambda)
}

fn finish(
    alpha: &SampledCurve,
    index: &[usize],
    raw: Vec<Quaternion>,
    formula_speed: Vec<f64>,
    lambda: f64,
) -> Result<Partner> {
    let n = raw.len();
    if n < 9 {
        return Err(Error::TooFewSamples { got: n, need: 9 });
    }
    let s: Vec<f64> = index.iter().map(|i| alpha.s(*i)).collect();
    let mut measured_speed = Vec::with_capacity(n);
    for (j, x) in s.iter().enumerate() {
        let speed = derivative_nodes(&s, &raw, *x, 1, INTERP_POINTS).norm();
        if !(speed >= MIN_PARTNER_SPEED) {
            return Err(Error::DegeneratePartner { index: index[j], s: *x, speed });
        }
        measured_speed.push(speed);
    }
    let s_star = cumulative_integral(&measured_speed, alpha.step());
    let length = s_star[n - 1];
    // odd, so the partner can be written back out as a curve spec
    let m = n | 1;
    let step = length / (m - 1) as f64;
    let points: Vec<Quaternion> = (0..m)
        .map(|j| {
            let target = if j == m - 1 { length } else { j as f64 * step };
            let source = interpolate_nodes(&s_star, &s, target, INTERP_POINTS);
            interpolate_uniform(&raw, s[0], alpha.step(), source)
        })
        .collect();
    let beta = SampledCurve::new(alpha.dimension(), 0.0, step, points)?;
    let map = CorrespondenceMap::new(s.into_iter().zip(s_star).collect())?;
    Ok(Partner { lambda, beta, map, formula_speed, measured_speed })
}
