//! Frenet frames and curvatures of unit-speed curves in E3 and E4, obtained by
//! Gram-Schmidt on the derivative vectors.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::curve::{CurveDerivatives, Differentiation, Dimension, SampledCurve};
use crate::error::{Error, Result};
use crate::quat::{cross4, det4, Quaternion, SpatialQuaternion};
use crate::stencil::CentralStencil;

/// Configuration shared by frame extraction and everything built on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    /// Gram-Schmidt residuals below this make the frame undefined.
    pub kappa_min: f64,
    pub differentiation: Differentiation,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self { kappa_min: 1e-8, differentiation: Differentiation::default() }
    }
}

/// `{t, n, b}` with curvature `k > 0` and torsion `r` at arc length `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrenetFrame3 {
    pub s: f64,
    pub tangent: SpatialQuaternion,
    pub normal: SpatialQuaternion,
    pub binormal: SpatialQuaternion,
    pub curvature: f64,
    pub torsion: f64,
}

impl FrenetFrame3 {
    /// Standard basis, for seeding synthesis.
    pub fn standard() -> Self {
        Self::seed(
            SpatialQuaternion::new(1.0, 0.0, 0.0),
            SpatialQuaternion::new(0.0, 1.0, 0.0),
            SpatialQuaternion::new(0.0, 0.0, 1.0),
        )
    }

    /// A frame with the given vectors and zeroed curvature fields.
    pub fn seed(tangent: SpatialQuaternion, normal: SpatialQuaternion, binormal: SpatialQuaternion) -> Self {
        Self { s: 0.0, tangent, normal, binormal, curvature: 0.0, torsion: 0.0 }
    }

    pub fn vectors(&self) -> Vec<Quaternion> {
        vec![self.tangent.into(), self.normal.into(), self.binormal.into()]
    }

    /// Largest deviation from orthonormality and from `b = t ∧ n`.
    pub fn orthonormality_error(&self) -> f64 {
        let v = self.vectors();
        let gram = crate::curve::gram_deviation(&v);
        let hand = (self.tangent.cross(self.normal) - self.binormal).norm();
        gram.max(hand)
    }
}

/// `{T, N, B1, B2}` with curvatures `K > 0`, `k > 0` and bitorsion `r - K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrenetFrame4 {
    pub s: f64,
    pub tangent: Quaternion,
    pub normal: Quaternion,
    pub binormal1: Quaternion,
    pub binormal2: Quaternion,
    pub curvature: f64,
    pub torsion: f64,
    pub bitorsion: f64,
}

impl FrenetFrame4 {
    pub fn standard() -> Self {
        Self::seed(Quaternion::E1, Quaternion::E2, Quaternion::E3, Quaternion::E4)
    }

    pub fn seed(tangent: Quaternion, normal: Quaternion, binormal1: Quaternion, binormal2: Quaternion) -> Self {
        Self { s: 0.0, tangent, normal, binormal1, binormal2, curvature: 0.0, torsion: 0.0, bitorsion: 0.0 }
    }

    pub fn vectors(&self) -> Vec<Quaternion> {
        vec![self.tangent, self.normal, self.binormal1, self.binormal2]
    }

    pub fn determinant(&self) -> f64 {
        det4([self.tangent, self.normal, self.binormal1, self.binormal2])
    }

    pub fn orthonormality_error(&self) -> f64 {
        crate::curve::gram_deviation(&self.vectors())
    }
}

/// Frames that move along a curve by an antisymmetric Frenet generator.
pub trait MovingFrame {
    fn s(&self) -> f64;
    fn vectors(&self) -> Vec<Quaternion>;
    /// `A` with `E_i' = Σ_j A_ij E_j`.
    fn generator(&self) -> Vec<Vec<f64>>;
    /// Largest curvature magnitude, used to scale residuals.
    fn curvature_scale(&self) -> f64;
}

impl MovingFrame for FrenetFrame3 {
    fn s(&self) -> f64 {
        self.s
    }
    fn vectors(&self) -> Vec<Quaternion> {
        FrenetFrame3::vectors(self)
    }
    fn generator(&self) -> Vec<Vec<f64>> {
        let (k, r) = (self.curvature, self.torsion);
        vec![vec![0.0, k, 0.0], vec![-k, 0.0, r], vec![0.0, -r, 0.0]]
    }
    fn curvature_scale(&self) -> f64 {
        self.curvature.abs().max(self.torsion.abs())
    }
}

impl MovingFrame for FrenetFrame4 {
    fn s(&self) -> f64 {
        self.s
    }
    fn vectors(&self) -> Vec<Quaternion> {
        FrenetFrame4::vectors(self)
    }
    fn generator(&self) -> Vec<Vec<f64>> {
        let (big, k, b) = (self.curvature, self.torsion, self.bitorsion);
        vec![vec![0.0, big, 0.0, 0.0], vec![-big, 0.0, k, 0.0], vec![0.0, -k, 0.0, b], vec![0.0, 0.0, -b, 0.0]]
    }
    fn curvature_scale(&self) -> f64 {
        self.curvature.abs().max(self.torsion.abs()).max(self.bitorsion.abs())
    }
}

fn degenerate(index: usize, s: f64, cause: String) -> Error {
    Error::DegenerateCurvature { index, s, cause }
}

/// E3 frame from arc-length derivatives `d = [α', α'', α''', α'''']`.
fn frame3_from(d: &[Quaternion; 4], index: usize, s: f64, kappa_min: f64) -> Result<FrenetFrame3> {
    let t = d[0].normalized();
    let residual = d[1] - t * d[1].dot(t);
    let k = residual.norm();
    if !(k >= kappa_min) {
        return Err(degenerate(index, s, format!("‖α''‖ = {k:e} below κ_min = {kappa_min:e}")));
    }
    let n = residual / k;
    let b = t.vector_part().cross(n.vector_part()).to_quaternion();
    // n' = (α''' - k' n) / k with k' = h(α''', n)
    let k_prime = d[2].dot(n);
    let n_prime = (d[2] - n * k_prime) / k;
    let r = n_prime.dot(b);
    Ok(FrenetFrame3 {
        s,
        tangent: t.vector_part(),
        normal: n.vector_part(),
        binormal: b.vector_part(),
        curvature: k,
        torsion: r,
    })
}

/// E4 frame from arc-length derivatives.
fn frame4_from(d: &[Quaternion; 4], index: usize, s: f64, kappa_min: f64) -> Result<FrenetFrame4> {
    let t = d[0].normalized();
    let r2 = d[1] - t * d[1].dot(t);
    let big_k = r2.norm();
    if !(big_k >= kappa_min) {
        return Err(degenerate(index, s, format!("‖α''‖ = {big_k:e} below κ_min = {kappa_min:e}")));
    }
    let n = r2 / big_k;
    let r3 = d[2] - t * d[2].dot(t) - n * d[2].dot(n);
    let r3_norm = r3.norm();
    if !(r3_norm >= kappa_min) {
        return Err(degenerate(
            index,
            s,
            format!("α''' residual {r3_norm:e} below κ_min = {kappa_min:e}: derivative set has rank < 3"),
        ));
    }
    let b1 = r3 / r3_norm;
    // N' = -K T + k B1, so k = h(N' + K T, B1) = h(α''', B1) / K
    let k = r3_norm / big_k;
    let b2 = cross4(t, n, b1).normalized();
    // B1' has B2-component h(α'''', B2) / ‖r3‖
    let bitorsion = d[3].dot(b2) / r3_norm;
    Ok(FrenetFrame4 { s, tangent: t, normal: n, binormal1: b1, binormal2: b2, curvature: big_k, torsion: k, bitorsion })
}

/// Frenet frame of an E3 curve at sample `i`.
pub fn frame_3d(curve: &SampledCurve, i: usize, cfg: &FrameConfig) -> Result<FrenetFrame3> {
    curve.dimension().check(Dimension::Three)?;
    let der = curve.derivatives(&cfg.differentiation)?;
    frame3_from(&der.at(i)?, i, curve.s(i), cfg.kappa_min)
}

/// Frenet frame of an E4 curve at sample `i`.
pub fn frame_4d(curve: &SampledCurve, i: usize, cfg: &FrameConfig) -> Result<FrenetFrame4> {
    curve.dimension().check(Dimension::Four)?;
    let der = curve.derivatives(&cfg.differentiation)?;
    frame4_from(&der.at(i)?, i, curve.s(i), cfg.kappa_min)
}

/// A sample where the frame is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameGap {
    pub index: usize,
    pub s: f64,
    pub cause: String,
}

impl FrameGap {
    pub fn to_error(&self) -> Error {
        degenerate(self.index, self.s, self.cause.clone())
    }
}

/// Frames over the interior of a curve; samples where the frame fails are gaps.
#[derive(Debug, Clone)]
pub struct FrameSeries<F> {
    pub interior: Range<usize>,
    pub index: Vec<usize>,
    pub frames: Vec<F>,
    pub gaps: Vec<FrameGap>,
    pub step: f64,
}

impl<F> FrameSeries<F> {
    pub fn is_complete(&self) -> bool {
        self.gaps.is_empty()
    }

    /// Fails with the first gap, if any.
    pub fn require_complete(&self) -> Result<()> {
        match self.gaps.first() {
            Some(gap) => Err(gap.to_error()),
            None => Ok(()),
        }
    }
}

fn series<F>(
    curve: &SampledCurve,
    cfg: &FrameConfig,
    build: impl Fn(&[Quaternion; 4], usize, f64, f64) -> Result<F>,
) -> Result<FrameSeries<F>> {
    let der: CurveDerivatives<'_> = curve.derivatives(&cfg.differentiation)?;
    let interior = der.interior();
    let mut index = Vec::with_capacity(interior.len());
    let mut frames = Vec::with_capacity(interior.len());
    let mut gaps = Vec::new();
    for i in interior.clone() {
        match build(&der.at(i)?, i, curve.s(i), cfg.kappa_min) {
            Ok(f) => {
                index.push(i);
                frames.push(f);
            }
            Err(Error::DegenerateCurvature { index, s, cause }) => gaps.push(FrameGap { index, s, cause }),
            Err(e) => return Err(e),
        }
    }
    Ok(FrameSeries { interior, index, frames, gaps, step: curve.step() })
}

pub fn frames_3d(curve: &SampledCurve, cfg: &FrameConfig) -> Result<FrameSeries<FrenetFrame3>> {
    curve.dimension().check(Dimension::Three)?;
    series(curve, cfg, frame3_from)
}

pub fn frames_4d(curve: &SampledCurve, cfg: &FrameConfig) -> Result<FrameSeries<FrenetFrame4>> {
    curve.dimension().check(Dimension::Four)?;
    series(curve, cfg, frame4_from)
}

/// Unit tangents over the derivative interior; defined even where curvature vanishes.
pub fn unit_tangents(curve: &SampledCurve, cfg: &FrameConfig) -> Result<(Range<usize>, Vec<Quaternion>)> {
    let der = curve.derivatives(&cfg.differentiation)?;
    let interior = der.interior();
    let tangents = interior.clone().map(|i| der.at(i).map(|d| d[0].normalized())).collect::<Result<Vec<_>>>()?;
    Ok((interior, tangents))
}

/// Per-sample curvature functions over the interior of a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub dimension: Dimension,
    pub s: Vec<f64>,
    pub index: Vec<usize>,
    /// `k` in E3, `K` in E4.
    pub curvature: Vec<f64>,
    /// `r` in E3, `k` in E4.
    pub torsion: Vec<f64>,
    /// `r - K`, E4 only.
    pub bitorsion: Option<Vec<f64>>,
    pub gaps: Vec<FrameGap>,
}

impl CurvatureProfile {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn from_frames_3d(series: &FrameSeries<FrenetFrame3>) -> Self {
        Self {
            dimension: Dimension::Three,
            s: series.frames.iter().map(|f| f.s).collect(),
            index: series.index.clone(),
            curvature: series.frames.iter().map(|f| f.curvature).collect(),
            torsion: series.frames.iter().map(|f| f.torsion).collect(),
            bitorsion: None,
            gaps: series.gaps.clone(),
        }
    }

    pub fn from_frames_4d(series: &FrameSeries<FrenetFrame4>) -> Self {
        Self {
            dimension: Dimension::Four,
            s: series.frames.iter().map(|f| f.s).collect(),
            index: series.index.clone(),
            curvature: series.frames.iter().map(|f| f.curvature).collect(),
            torsion: series.frames.iter().map(|f| f.torsion).collect(),
            bitorsion: Some(series.frames.iter().map(|f| f.bitorsion).collect()),
            gaps: series.gaps.clone(),
        }
    }
}

/// Curvatures at every interior sample of `curve`.
pub fn curvature_profile(curve: &SampledCurve, cfg: &FrameConfig) -> Result<CurvatureProfile> {
    if curve.len() < 9 {
        return Err(Error::TooFewSamples { got: curve.len(), need: 9 });
    }
    match curve.dimension() {
        Dimension::Three => Ok(CurvatureProfile::from_frames_3d(&frames_3d(curve, cfg)?)),
        Dimension::Four => Ok(CurvatureProfile::from_frames_4d(&frames_4d(curve, cfg)?)),
    }
}

/// How well differenced frames satisfy the Frenet equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrenetResidual {
    /// Max over samples of `max_i ‖E_i' - Σ_j A_ij E_j‖ / max(1, curvature scale)`.
    pub max_residual: f64,
    /// Max `|M_ij + M_ji|` with `M_ij = h(E_i', E_j)`.
    pub max_antisymmetry: f64,
    pub samples: usize,
}

/// Differences frame vectors along the grid with a 5-point stencil and compares
/// with the Frenet generator. Only samples whose stencil neighbours are all present
/// contribute.
pub fn frenet_residual<F: MovingFrame>(series: &FrameSeries<F>) -> FrenetResidual {
    let stencil = CentralStencil::new(2, 1, series.step);
    let mut max_residual: f64 = 0.0;
    let mut max_antisymmetry: f64 = 0.0;
    let mut samples = 0;
    let vectors: Vec<Vec<Quaternion>> = series.frames.iter().map(|f| f.vectors()).collect();
    for j in 2..series.frames.len().saturating_sub(2) {
        if series.index[j + 2] - series.index[j - 2] != 4 {
            continue;
        }
        let frame = &series.frames[j];
        let gen = frame.generator();
        let dim = gen.len();
        let window: Vec<&Vec<Quaternion>> = (j - 2..=j + 2).map(|m| &vectors[m]).collect();
        let mut derivs = Vec::with_capacity(dim);
        for v in 0..dim {
            let column: Vec<Quaternion> = window.iter().map(|w| w[v]).collect();
            derivs.push(stencil.apply(&column, 2, 1));
        }
        let scale = frame.curvature_scale().max(1.0);
        let e = &vectors[j];
        for v in 0..dim {
            let mut predicted = Quaternion::ZERO;
            for w in 0..dim {
                predicted += e[w] * gen[v][w];
            }
            max_residual = max_residual.max((derivs[v] - predicted).norm() / scale);
            for w in 0..dim {
                let m_vw = derivs[v].dot(e[w]);
                let m_wv = derivs[w].dot(e[v]);
                max_antisymmetry = max_antisymmetry.max((m_vw + m_wv).abs());
            }
        }
        samples += 1;
    }
    FrenetResidual { max_residual, max_antisymmetry, samples }
}
