use serde::Serialize;

use super::{max_abs, CorrespondenceMap, Stats};
use crate::curve::{Dimension, SampledCurve};
use crate::error::{Error, Result};
use crate::frenet::{frames_3d, frames_4d, unit_tangents, CurvatureProfile, FrameConfig, FrameSeries, MovingFrame};
use crate::quat::Quaternion;
use crate::stencil::{derivative_nodes, interpolate_nodes, interpolate_uniform, CentralStencil, INTERP_POINTS};

/// Fraction of each curve's interior the correspondence must span.
pub const MIN_COVERAGE: f64 = 0.9;

/// Below this `|cos θ|` the speed-ratio identity is not evaluated.
const COS_GUARD: f64 = 1e-3;

/// Frame vectors and scalars on a run of samples, interpolated only inside
/// windows free of gaps.
struct Track {
    s: Vec<f64>,
    index: Vec<usize>,
    vectors: Vec<Vec<Quaternion>>,
    scalars: Vec<Vec<f64>>,
}

struct TrackValue {
    vectors: Vec<Quaternion>,
    scalars: Vec<f64>,
}

impl Track {
    fn from_frames<F: MovingFrame>(series: &FrameSeries<F>, scalars: impl Fn(&F) -> Vec<f64>) -> Self {
        let dim = series.frames.first().map_or(0, |f| f.vectors().len());
        let width = series.frames.first().map_or(0, |f| scalars(f).len());
        let mut vectors = vec![Vec::with_capacity(series.frames.len()); dim];
        let mut scalar_cols = vec![Vec::with_capacity(series.frames.len()); width];
        for f in &series.frames {
            for (col, v) in vectors.iter_mut().zip(f.vectors()) {
                col.push(v);
            }
            for (col, v) in scalar_cols.iter_mut().zip(scalars(f)) {
                col.push(v);
            }
        }
        Self {
            s: series.frames.iter().map(|f| f.s()).collect(),
            index: series.index.clone(),
            vectors,
            scalars: scalar_cols,
        }
    }

    fn tangents(curve: &SampledCurve, cfg: &FrameConfig) -> Result<Self> {
        let (interior, tangents) = unit_tangents(curve, cfg)?;
        Ok(Self {
            s: interior.clone().map(|i| curve.s(i)).collect(),
            index: interior.collect(),
            vectors: vec![tangents],
            scalars: vec![],
        })
    }

    fn window(&self, x: f64) -> Option<std::ops::Range<usize>> {
        let n = self.s.len();
        let p = INTERP_POINTS;
        if n < p || x < self.s[0] || x > self.s[n - 1] {
            return None;
        }
        let cell = self.s.partition_point(|v| *v <= x).saturating_sub(1).min(n - 2);
        let lo = (cell + 1).saturating_sub(p / 2).min(n - p);
        (self.index[lo + p - 1] - self.index[lo] == p - 1).then_some(lo..lo + p)
    }

    fn at(&self, x: f64) -> Option<TrackValue> {
        let w = self.window(x)?;
        let xs = &self.s[w.clone()];
        Some(TrackValue {
            vectors: self.vectors.iter().map(|c| interpolate_nodes(xs, &c[w.clone()], x, INTERP_POINTS)).collect(),
            scalars: self.scalars.iter().map(|c| interpolate_nodes(xs, &c[w.clone()], x, INTERP_POINTS)).collect(),
        })
    }
}

fn point_at(curve: &SampledCurve, s: f64) -> Quaternion {
    interpolate_uniform(curve.points(), curve.start(), curve.step(), s)
}

/// Interior span of a curve's derivatives, in arc length.
fn interior_span(curve: &SampledCurve, cfg: &FrameConfig) -> Result<(f64, f64)> {
    let der = curve.derivatives(&cfg.differentiation)?;
    let r = der.interior();
    Ok((curve.s(r.start), curve.s(r.end - 1)))
}

/// Map rows inside both interiors, with the coverage of each curve.
type Usable = (Vec<(f64, f64)>, f64, f64);

/// Checks coverage and keeps the rows inside both interiors.
fn usable_rows(
    alpha: &SampledCurve,
    beta: &SampledCurve,
    map: &CorrespondenceMap,
    cfg: &FrameConfig,
) -> Result<Usable> {
    let (a0, a1) = interior_span(alpha, cfg)?;
    let (b0, b1) = interior_span(beta, cfg)?;
    let rows: Vec<(f64, f64)> =
        map.pairs().iter().copied().filter(|(s, t)| *s >= a0 && *s <= a1 && *t >= b0 && *t <= b1).collect();
    let (coverage_alpha, coverage_beta) = match (rows.first(), rows.last()) {
        (Some(f), Some(l)) if rows.len() >= INTERP_POINTS => ((l.0 - f.0) / (a1 - a0), (l.1 - f.1) / (b1 - b0)),
        _ => (0.0, 0.0),
    };
    if !(coverage_alpha >= MIN_COVERAGE && coverage_beta >= MIN_COVERAGE) {
        return Err(Error::CorrespondenceGap { coverage_alpha, coverage_beta, required: MIN_COVERAGE });
    }
    Ok((rows, coverage_alpha, coverage_beta))
}

/// Derivative of `ys` with respect to `xs` at row `j`, over a local window whose
/// entries are all present.
fn windowed_derivative(xs: &[f64], ys: &[Option<f64>], j: usize) -> Option<f64> {
    let n = xs.len();
    let p = INTERP_POINTS;
    if n < p {
        return None;
    }
    let lo = j.saturating_sub(p / 2).min(n - p);
    let vals: Option<Vec<f64>> = ys[lo..lo + p].iter().copied().collect();
    Some(derivative_nodes(&xs[lo..lo + p], &vals?, xs[j], 1, p))
}

/// `dr*/ds* - (k*/μ)(1 + μ² r*²)` along a partner profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeResidual {
    pub s: Vec<f64>,
    pub derivative: Vec<f64>,
    pub residual: Vec<f64>,
}

impl OdeResidual {
    pub fn max_abs(&self) -> Option<f64> {
        max_abs(self.residual.iter().copied())
    }
}

/// Residual of the partner torsion equation, with `dr*/ds*` from a 5-point stencil
/// on contiguous runs of the profile.
pub fn partner_ode_residual_3d(profile: &CurvatureProfile, mu: f64) -> Result<OdeResidual> {
    profile.dimension.check(Dimension::Three)?;
    if mu == 0.0 {
        return Err(Error::ZeroMu);
    }
    if profile.len() < 5 {
        return Err(Error::TooFewSamples { got: profile.len(), need: 5 });
    }
    let mut out = OdeResidual { s: vec![], derivative: vec![], residual: vec![] };
    for j in 2..profile.len() - 2 {
        if profile.index[j + 2] - profile.index[j - 2] != 4 {
            continue;
        }
        let h = (profile.s[j + 2] - profile.s[j - 2]) / 4.0;
        let dr = CentralStencil::new(2, 1, h).apply(&profile.torsion[j - 2..=j + 2], 2, 1);
        let (k, r) = (profile.curvature[j], profile.torsion[j]);
        out.s.push(profile.s[j]);
        out.derivative.push(dr);
        out.residual.push(dr - k / mu * (1.0 + mu * mu * r * r));
    }
    Ok(out)
}

/// One corresponded pair of an E3 verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSample3 {
    pub s: f64,
    pub s_star: f64,
    pub distance: f64,
    /// `h(t, t*)`.
    pub cos_theta: f64,
    /// `|h(n, b*)|`; absent where either frame is undefined.
    pub alignment: Option<f64>,
    /// `atan2(h(t, n*), h(t, t*))`, unwrapped along the map.
    pub theta: Option<f64>,
    /// `h(α - β, b*)`.
    pub signed_offset: Option<f64>,
    pub ds_ds_star: f64,
    /// `|ds/ds* - 1/cos θ|`.
    pub speed_ratio_residual: Option<f64>,
    /// `|μ r* + tan θ|`.
    pub offset_angle_residual: Option<f64>,
    /// `|dθ/ds* + k*|`.
    pub angle_rate_residual: Option<f64>,
    pub partner_curvature: Option<f64>,
    pub partner_torsion: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdicts3 {
    pub normal_binormal_aligned: bool,
    pub constant_distance: bool,
    pub constant_tangent_angle: bool,
    pub partner_torsion_equation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport3 {
    pub tolerance: f64,
    pub coverage_alpha: f64,
    pub coverage_beta: f64,
    /// Offset along the partner binormal, signed so that `α = β + μ b*`.
    pub mu: Option<f64>,
    pub distance: Stats,
    pub cos_theta: Stats,
    /// Present when every corresponded pair has both frames.
    pub alignment: Option<Stats>,
    pub partner_frame_gaps: usize,
    pub speed_ratio_residual_max: Option<f64>,
    pub offset_angle_residual_max: Option<f64>,
    pub angle_rate_residual_max: Option<f64>,
    /// Per-sample profiles are left out of serialized reports.
    #[serde(skip)]
    pub partner_ode: Option<OdeResidual>,
    pub partner_ode_residual_max: Option<f64>,
    pub verdicts: Verdicts3,
    #[serde(skip)]
    pub samples: Vec<PairSample3>,
}

/// Checks a constructed E3 pair along its correspondence.
pub fn verify_pair_3d(
    alpha: &SampledCurve,
    beta: &SampledCurve,
    map: &CorrespondenceMap,
    tol: f64,
    cfg: &FrameConfig,
) -> Result<PairReport3> {
    alpha.dimension().check(Dimension::Three)?;
    beta.dimension().check(Dimension::Three)?;
    let (rows, coverage_alpha, coverage_beta) = usable_rows(alpha, beta, map, cfg)?;

    let alpha_frames = frames_3d(alpha, cfg)?;
    let beta_frames = frames_3d(beta, cfg)?;
    let alpha_track = Track::from_frames(&alpha_frames, |_| vec![]);
    let beta_track = Track::from_frames(&beta_frames, |f| vec![f.curvature, f.torsion]);
    let alpha_tangent = Track::tangents(alpha, cfg)?;
    let beta_tangent = Track::tangents(beta, cfg)?;

    let star_col: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let map_s = map.source();
    let map_star = map.target();

    let mut samples = Vec::with_capacity(rows.len());
    let mut last_theta: Option<f64> = None;
    for &(s, s_star) in &rows {
        let t = alpha_tangent.at(s).map(|v| v.vectors[0]).unwrap_or_else(|| unreachable_tangent(s));
        let t_star = beta_tangent.at(s_star).map(|v| v.vectors[0]).unwrap_or_else(|| unreachable_tangent(s_star));
        let diff = point_at(alpha, s) - point_at(beta, s_star);
        let mut sample = PairSample3 {
            s,
            s_star,
            distance: diff.norm(),
            cos_theta: t.dot(t_star),
            alignment: None,
            theta: None,
            signed_offset: None,
            ds_ds_star: derivative_nodes(&map_star, &map_s, s_star, 1, INTERP_POINTS),
            speed_ratio_residual: None,
            offset_angle_residual: None,
            angle_rate_residual: None,
            partner_curvature: None,
            partner_torsion: None,
        };
        if let Some(b) = beta_track.at(s_star) {
            let (n_star, b_star) = (b.vectors[1], b.vectors[2]);
            let mut theta = t.dot(n_star).atan2(sample.cos_theta);
            if let Some(prev) = last_theta {
                theta += (2.0 * std::f64::consts::PI) * ((prev - theta) / (2.0 * std::f64::consts::PI)).round();
            }
            last_theta = Some(theta);
            sample.theta = Some(theta);
            sample.signed_offset = Some(diff.dot(b_star));
            sample.partner_curvature = Some(b.scalars[0]);
            sample.partner_torsion = Some(b.scalars[1]);
            if let Some(a) = alpha_track.at(s) {
                sample.alignment = Some(a.vectors[1].dot(b_star).abs());
            }
        }
        if sample.cos_theta.abs() >= COS_GUARD {
            sample.speed_ratio_residual = Some((sample.ds_ds_star - 1.0 / sample.cos_theta).abs());
        }
        samples.push(sample);
    }

    let distances: Vec<f64> = samples.iter().map(|p| p.distance).collect();
    let distance = Stats::of(&distances).expect("usable rows are non-empty");
    let cos_theta = Stats::of(&samples.iter().map(|p| p.cos_theta).collect::<Vec<_>>()).expect("non-empty");
    let mu = samples.iter().find_map(|p| p.signed_offset).map(|o| o.signum() * distance.mean);

    if let Some(mu) = mu {
        for p in samples.iter_mut() {
            if let (Some(theta), Some(r)) = (p.theta, p.partner_torsion) {
                p.offset_angle_residual = Some((mu * r + theta.tan()).abs());
            }
        }
    }
    let thetas: Vec<Option<f64>> = samples.iter().map(|p| p.theta).collect();
    for (j, p) in samples.iter_mut().enumerate() {
        if let (Some(rate), Some(k)) = (windowed_derivative(&star_col, &thetas, j), p.partner_curvature) {
            p.angle_rate_residual = Some((rate + k).abs());
        }
    }

    let alignments: Option<Vec<f64>> = samples.iter().map(|p| p.alignment).collect();
    let alignment = alignments.as_deref().and_then(Stats::of);
    let beta_profile = CurvatureProfile::from_frames_3d(&beta_frames);
    let partner_ode = match mu {
        Some(mu) if mu != 0.0 && beta_profile.len() >= 5 => Some(partner_ode_residual_3d(&beta_profile, mu)?),
        _ => None,
    };
    let partner_ode_residual_max = partner_ode.as_ref().and_then(OdeResidual::max_abs);

    let verdicts = Verdicts3 {
        normal_binormal_aligned: alignment.is_some_and(|a| a.min >= 1.0 - tol),
        constant_distance: distance.relative_spread() <= tol,
        constant_tangent_angle: cos_theta.std <= tol,
        partner_torsion_equation: partner_ode_residual_max.is_some_and(|m| m <= tol),
    };
    Ok(PairReport3 {
        tolerance: tol,
        coverage_alpha,
        coverage_beta,
        mu,
        distance,
        cos_theta,
        alignment,
        partner_frame_gaps: beta_frames.gaps.len(),
        speed_ratio_residual_max: max_abs(samples.iter().filter_map(|p| p.speed_ratio_residual)),
        offset_angle_residual_max: max_abs(samples.iter().filter_map(|p| p.offset_angle_residual)),
        angle_rate_residual_max: max_abs(samples.iter().filter_map(|p| p.angle_rate_residual)),
        partner_ode,
        partner_ode_residual_max,
        verdicts,
        samples,
    })
}

fn unreachable_tangent(s: f64) -> Quaternion {
    panic!("tangent requested at s = {s} outside the derivative interior")
}

/// One corresponded pair of an E4 verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSample4 {
    pub s: f64,
    pub s_bar: f64,
    pub distance: f64,
    /// `h(β - α, N)`.
    pub signed_offset: Option<f64>,
    /// `h(N, B̄1)`.
    pub g: Option<f64>,
    /// `h(N, B̄2)`.
    pub h: Option<f64>,
    /// `sqrt(h(N, T̄)² + h(N, N̄)²)`.
    pub leakage: Option<f64>,
    /// `|g² + h² + leakage² - 1|`.
    pub unit_deviation: Option<f64>,
    /// `ds̄/ds` from the correspondence.
    pub psi_prime: f64,
    /// `sqrt(1 - λK)`, where defined.
    pub psi_prime_formula: Option<f64>,
    /// `|(1 - λK)² + (λk)² - (1 - λK)|`.
    pub identity_residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdicts4 {
    pub normal_in_binormal_plane: bool,
    pub constant_distance: bool,
    pub psi_prime_matches: bool,
    pub psi_prime_identity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport4 {
    pub tolerance: f64,
    pub coverage_alpha: f64,
    pub coverage_beta: f64,
    /// Mean of `h(β - α, N)`.
    pub lambda: Option<f64>,
    pub distance: Stats,
    /// Present when every corresponded pair has both frames.
    pub leakage: Option<Stats>,
    pub unit_deviation_max: Option<f64>,
    pub partner_frame_gaps: usize,
    pub psi_prime: Stats,
    /// Max `|ψ' - sqrt(1 - λK)|`.
    pub psi_prime_residual_max: Option<f64>,
    pub identity_residual_max: Option<f64>,
    pub verdicts: Verdicts4,
    #[serde(skip)]
    pub samples: Vec<PairSample4>,
}

/// Checks a constructed E4 pair along its correspondence.
pub fn verify_pair_4d(
    alpha: &SampledCurve,
    beta: &SampledCurve,
    map: &CorrespondenceMap,
    tol: f64,
    cfg: &FrameConfig,
) -> Result<PairReport4> {
    alpha.dimension().check(Dimension::Four)?;
    beta.dimension().check(Dimension::Four)?;
    let (rows, coverage_alpha, coverage_beta) = usable_rows(alpha, beta, map, cfg)?;

    let alpha_frames = frames_4d(alpha, cfg)?;
    let beta_frames = frames_4d(beta, cfg)?;
    let alpha_track = Track::from_frames(&alpha_frames, |f| vec![f.curvature, f.torsion]);
    let beta_track = Track::from_frames(&beta_frames, |_| vec![]);
    let map_s = map.source();
    let map_bar = map.target();

    let mut samples = Vec::with_capacity(rows.len());
    for &(s, s_bar) in &rows {
        let diff = point_at(beta, s_bar) - point_at(alpha, s);
        let mut sample = PairSample4 {
            s,
            s_bar,
            distance: diff.norm(),
            signed_offset: None,
            g: None,
            h: None,
            leakage: None,
            unit_deviation: None,
            psi_prime: derivative_nodes(&map_s, &map_bar, s, 1, INTERP_POINTS),
            psi_prime_formula: None,
            identity_residual: None,
        };
        let a = alpha_track.at(s);
        if let Some(a) = &a {
            sample.signed_offset = Some(diff.dot(a.vectors[1]));
        }
        if let (Some(a), Some(b)) = (&a, beta_track.at(s_bar)) {
            let n = a.vectors[1];
            let g = n.dot(b.vectors[2]);
            let h = n.dot(b.vectors[3]);
            let leak = (n.dot(b.vectors[0]).powi(2) + n.dot(b.vectors[1]).powi(2)).sqrt();
            sample.g = Some(g);
            sample.h = Some(h);
            sample.leakage = Some(leak);
            sample.unit_deviation = Some((g * g + h * h + leak * leak - 1.0).abs());
        }
        samples.push(sample);
    }

    let distance = Stats::of(&samples.iter().map(|p| p.distance).collect::<Vec<_>>()).expect("non-empty");
    let offsets: Vec<f64> = samples.iter().filter_map(|p| p.signed_offset).collect();
    let lambda = Stats::of(&offsets).map(|o| o.mean);
    if let Some(lambda) = lambda {
        for p in samples.iter_mut() {
            if let Some(a) = alpha_track.at(p.s) {
                let (big_k, k) = (a.scalars[0], a.scalars[1]);
                let w = 1.0 - lambda * big_k;
                p.identity_residual = Some((w * w + (lambda * k).powi(2) - w).abs());
                if w >= 0.0 {
                    p.psi_prime_formula = Some(w.sqrt());
                }
            }
        }
    }

    let leakages: Option<Vec<f64>> = samples.iter().map(|p| p.leakage).collect();
    let leakage = leakages.as_deref().and_then(Stats::of);
    let psi_prime = Stats::of(&samples.iter().map(|p| p.psi_prime).collect::<Vec<_>>()).expect("non-empty");
    let psi_residuals: Option<Vec<f64>> =
        samples.iter().map(|p| p.psi_prime_formula.map(|f| (p.psi_prime - f).abs())).collect();
    let psi_prime_residual_max = psi_residuals.and_then(max_abs);
    let identities: Option<Vec<f64>> = samples.iter().map(|p| p.identity_residual).collect();
    let identity_residual_max = identities.and_then(max_abs);

    let verdicts = Verdicts4 {
        normal_in_binormal_plane: leakage.is_some_and(|l| l.max <= tol),
        constant_distance: distance.relative_spread() <= tol,
        psi_prime_matches: psi_prime_residual_max.is_some_and(|m| m <= tol),
        psi_prime_identity: identity_residual_max.is_some_and(|m| m <= tol),
    };
    Ok(PairReport4 {
        tolerance: tol,
        coverage_alpha,
        coverage_beta,
        lambda,
        distance,
        leakage,
        unit_deviation_max: max_abs(samples.iter().filter_map(|p| p.unit_deviation)),
        partner_frame_gaps: beta_frames.gaps.len(),
        psi_prime,
        psi_prime_residual_max,
        identity_residual_max,
        verdicts,
        samples,
    })
}

/// `|(1 - λK)² + (λk)² - (1 - λK)|` at the samples where `|K - λ(K² + k²)| ≤ eq_tol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiIdentity {
    pub s: Vec<f64>,
    pub residual: Vec<f64>,
    pub skipped: usize,
}

impl PsiIdentity {
    pub fn max_abs(&self) -> Option<f64> {
        max_abs(self.residual.iter().copied())
    }
}

pub fn psi_prime_identity(profile: &CurvatureProfile, lambda: f64, eq_tol: f64) -> Result<PsiIdentity> {
    profile.dimension.check(Dimension::Four)?;
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let mut out = PsiIdentity { s: vec![], residual: vec![], skipped: 0 };
    for ((s, big_k), k) in profile.s.iter().zip(&profile.curvature).zip(&profile.torsion) {
        if (big_k - lambda * (big_k * big_k + k * k)).abs() > eq_tol {
            out.skipped += 1;
            continue;
        }
        let w = 1.0 - lambda * big_k;
        out.s.push(*s);
        out.residual.push((w * w + (lambda * k).powi(2) - w).abs());
    }
    Ok(out)
}
