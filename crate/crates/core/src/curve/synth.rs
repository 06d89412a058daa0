use serde::{Deserialize, Serialize};

use super::{Dimension, SampledCurve};
use crate::error::{Error, Result};
use crate::frenet::{FrenetFrame3, FrenetFrame4};
use crate::quat::Quaternion;

/// Largest Gram-matrix deviation accepted for a seed frame.
const SEED_ORTHONORMAL_TOL: f64 = 1e-10;

/// A curvature function of arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarFn {
    Constant(f64),
    /// Knots `(s, value)`, linearly interpolated and held constant beyond the ends.
    Table(Vec<(f64, f64)>),
    /// `offset + slope * s`.
    Affine {
        offset: f64,
        slope: f64,
    },
    /// The larger root `(1 + sqrt(1 - 4 λ² g²)) / (2 λ)` of `c = λ (c² + g²)`, where `g`
    /// is the next curvature (torsion in E3, the second curvature in E4). Only valid in
    /// the first-curvature slot; it makes the curve satisfy the Mannheim equality exactly.
    MannheimRoot {
        lambda: f64,
    },
}

impl ScalarFn {
    fn validate(&self, name: &'static str) -> Result<()> {
        match self {
            ScalarFn::Constant(v) if !v.is_finite() => Err(Error::InvalidSpec(format!("{name}: non-finite constant"))),
            ScalarFn::Table(knots) => {
                if knots.is_empty() {
                    return Err(Error::InvalidSpec(format!("{name}: empty knot table")));
                }
                if let Some(i) = knots.windows(2).position(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::InvalidSpec(format!("{name}: knots not strictly increasing at {}", i + 1)));
                }
                if knots.iter().any(|(s, v)| !s.is_finite() || !v.is_finite()) {
                    return Err(Error::InvalidSpec(format!("{name}: non-finite knot")));
                }
                Ok(())
            }
            ScalarFn::Affine { offset, slope } if !(offset.is_finite() && slope.is_finite()) => {
                Err(Error::InvalidSpec(format!("{name}: non-finite affine coefficients")))
            }
            ScalarFn::MannheimRoot { lambda } if !(*lambda > 0.0) => {
                Err(Error::InvalidSpec(format!("{name}: mannheim_root needs lambda > 0")))
            }
            _ => Ok(()),
        }
    }

    /// Value at `s`; `next` feeds [`ScalarFn::MannheimRoot`].
    fn eval(&self, s: f64, next: f64) -> Result<f64> {
        Ok(match self {
            ScalarFn::Constant(v) => *v,
            ScalarFn::Affine { offset, slope } => offset + slope * s,
            ScalarFn::Table(knots) => {
                let j = knots.partition_point(|(x, _)| *x <= s);
                if j == 0 {
                    knots[0].1
                } else if j == knots.len() {
                    knots[j - 1].1
                } else {
                    let (x0, y0) = knots[j - 1];
                    let (x1, y1) = knots[j];
                    y0 + (y1 - y0) * (s - x0) / (x1 - x0)
                }
            }
            ScalarFn::MannheimRoot { lambda } => {
                let disc = 1.0 - 4.0 * lambda * lambda * next * next;
                if disc < 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "mannheim_root undefined at s = {s}: |{next}| exceeds 1/(2 lambda)"
                    )));
                }
                (1.0 + disc.sqrt()) / (2.0 * lambda)
            }
        })
    }

    fn needs_next(&self) -> bool {
        matches!(self, ScalarFn::MannheimRoot { .. })
    }
}

/// Prescribed curvature functions for synthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CurvatureSpec {
    /// Curvature `k > 0` and torsion `r`.
    E3 { curvature: ScalarFn, torsion: ScalarFn },
    /// Curvatures `K > 0`, `k > 0` and bitorsion `r - K`.
    E4 { curvature: ScalarFn, torsion: ScalarFn, bitorsion: ScalarFn },
}

/// Curvatures at one arc-length value: `[k, r, 0]` in E3, `[K, k, r - K]` in E4.
pub type Curvatures = [f64; 3];

impl CurvatureSpec {
    pub fn dimension(&self) -> Dimension {
        match self {
            CurvatureSpec::E3 { .. } => Dimension::Three,
            CurvatureSpec::E4 { .. } => Dimension::Four,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_positive = |f: &ScalarFn, name: &'static str| -> Result<()> {
            f.validate(name)?;
            match f {
                ScalarFn::Constant(v) if *v <= 0.0 => Err(Error::NonPositiveCurvature { name, s: 0.0, value: *v }),
                ScalarFn::Table(knots) => match knots.iter().find(|(_, v)| *v <= 0.0) {
                    Some((s, v)) => Err(Error::NonPositiveCurvature { name, s: *s, value: *v }),
                    None => Ok(()),
                },
                _ => Ok(()),
            }
        };
        match self {
            CurvatureSpec::E3 { curvature, torsion } => {
                check_positive(curvature, "k")?;
                torsion.validate("r")?;
                if torsion.needs_next() {
                    return Err(Error::InvalidSpec("mannheim_root is only valid for the curvature k".into()));
                }
            }
            CurvatureSpec::E4 { curvature, torsion, bitorsion } => {
                check_positive(curvature, "K")?;
                check_positive(torsion, "k")?;
                bitorsion.validate("bitorsion")?;
                if torsion.needs_next() || bitorsion.needs_next() {
                    return Err(Error::InvalidSpec("mannheim_root is only valid for the curvature K".into()));
                }
            }
        }
        Ok(())
    }

    /// Curvatures at `s`, enforcing the positivity constraints.
    pub fn eval(&self, s: f64) -> Result<Curvatures> {
        let positive = |name: &'static str, value: f64| {
            if value > 0.0 {
                Ok(value)
            } else {
                Err(Error::NonPositiveCurvature { name, s, value })
            }
        };
        match self {
            CurvatureSpec::E3 { curvature, torsion } => {
                let r = torsion.eval(s, 0.0)?;
                let k = positive("k", curvature.eval(s, r)?)?;
                Ok([k, r, 0.0])
            }
            CurvatureSpec::E4 { curvature, torsion, bitorsion } => {
                let k = positive("k", torsion.eval(s, 0.0)?)?;
                let big_k = positive("K", curvature.eval(s, k)?)?;
                let bt = bitorsion.eval(s, 0.0)?;
                Ok([big_k, k, bt])
            }
        }
    }

    /// Antisymmetric Frenet generator at `s` (3x3 block used in E3).
    fn generator(&self, s: f64) -> Result<[[f64; 4]; 4]> {
        let c = self.eval(s)?;
        let mut a = [[0.0; 4]; 4];
        a[0][1] = c[0];
        a[1][0] = -c[0];
        a[1][2] = c[1];
        a[2][1] = -c[1];
        if self.dimension() == Dimension::Four {
            a[2][3] = c[2];
            a[3][2] = -c[2];
        }
        Ok(a)
    }
}

/// Output of a synthesis run.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub curve: SampledCurve,
    /// Frame at every sample, in Frenet order.
    pub frames: Vec<Vec<Quaternion>>,
    /// Largest Gram deviation of the frame right after an RK4 step, before correction.
    pub gram_drift: f64,
    /// Largest Gram deviation after re-orthonormalization.
    pub gram_residual: f64,
}

/// Largest `|<e_i, e_j> - δ_ij|`.
pub(crate) fn gram_deviation(frame: &[Quaternion]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..frame.len() {
        for j in i..frame.len() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((frame[i].dot(frame[j]) - target).abs());
        }
    }
    worst
}

/// Modified Gram-Schmidt in order.
fn orthonormalize(frame: &mut [Quaternion]) {
    for i in 0..frame.len() {
        let mut v = frame[i];
        for u in &frame[..i] {
            v -= *u * v.dot(*u);
        }
        frame[i] = v.normalized();
    }
}

fn rate(a: &[[f64; 4]; 4], frame: &[Quaternion]) -> Vec<Quaternion> {
    (0..frame.len())
        .map(|i| {
            let mut acc = Quaternion::ZERO;
            for (j, f) in frame.iter().enumerate() {
                if a[i][j] != 0.0 {
                    acc += *f * a[i][j];
                }
            }
            acc
        })
        .collect()
}

fn axpy(base: &[Quaternion], dir: &[Quaternion], h: f64) -> Vec<Quaternion> {
    base.iter().zip(dir).map(|(b, d)| *b + *d * h).collect()
}

/// Integrates position and frame with classical RK4 over `[s0, s1]` using `n` samples,
/// starting at the origin with frame `seed`.
pub fn synthesize_on(profile: &CurvatureSpec, seed: &[Quaternion], span: (f64, f64), n: usize) -> Result<Synthesis> {
    profile.validate()?;
    let dim = profile.dimension();
    if seed.len() != dim.get() {
        return Err(Error::InvalidSpec(format!("seed frame needs {} vectors", dim.get())));
    }
    if dim == Dimension::Three && seed.iter().any(|v| v.d != 0.0) {
        return Err(Error::InvalidSpec("E3 seed vectors must be spatial".into()));
    }
    let deviation = gram_deviation(seed);
    if !(deviation <= SEED_ORTHONORMAL_TOL) {
        return Err(Error::NonOrthonormalSeed { deviation });
    }
    let (s0, s1) = span;
    if !(s1 > s0) {
        return Err(Error::InvalidSpec("synthesis length must be positive".into()));
    }
    if n < 9 {
        return Err(Error::TooFewSamples { got: n, need: 9 });
    }
    let h = (s1 - s0) / (n - 1) as f64;
    let mut position = Quaternion::ZERO;
    let mut frame = seed.to_vec();
    let mut points = Vec::with_capacity(n);
    let mut frames = Vec::with_capacity(n);
    points.push(position);
    frames.push(frame.clone());
    let mut gram_drift: f64 = 0.0;
    let mut gram_residual = deviation;
    let mut a_start = profile.generator(s0)?;
    for step in 0..n - 1 {
        let s = s0 + step as f64 * h;
        let a_mid = profile.generator(s + 0.5 * h)?;
        let a_end = profile.generator(s + h)?;

        let k1 = rate(&a_start, &frame);
        let p1 = frame[0];
        let f2 = axpy(&frame, &k1, 0.5 * h);
        let k2 = rate(&a_mid, &f2);
        let p2 = f2[0];
        let f3 = axpy(&frame, &k2, 0.5 * h);
        let k3 = rate(&a_mid, &f3);
        let p3 = f3[0];
        let f4 = axpy(&frame, &k3, h);
        let k4 = rate(&a_end, &f4);
        let p4 = f4[0];

        position += (p1 + p2 * 2.0 + p3 * 2.0 + p4) * (h / 6.0);
        for i in 0..frame.len() {
            frame[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        gram_drift = gram_drift.max(gram_deviation(&frame));
        orthonormalize(&mut frame);
        gram_residual = gram_residual.max(gram_deviation(&frame));
        points.push(position);
        frames.push(frame.clone());
        a_start = a_end;
    }
    let curve = SampledCurve::new(dim, s0, h, points)?;
    Ok(Synthesis { curve, frames, gram_drift, gram_residual })
}

/// Synthesizes an E3 curve of the given `length` from `profile`, seeded with the
/// vectors of `frame0` (its curvature fields are ignored).
pub fn synthesize_from_curvatures_3d(
    profile: &CurvatureSpec,
    frame0: &FrenetFrame3,
    length: f64,
    n: usize,
) -> Result<Synthesis> {
    if profile.dimension() != Dimension::Three {
        return Err(Error::DimensionMismatch { expected: 3, got: 4 });
    }
    synthesize_on(profile, &frame0.vectors(), (0.0, length), n)
}

/// E4 counterpart of [`synthesize_from_curvatures_3d`].
pub fn synthesize_from_curvatures_4d(
    profile: &CurvatureSpec,
    frame0: &FrenetFrame4,
    length: f64,
    n: usize,
) -> Result<Synthesis> {
    if profile.dimension() != Dimension::Four {
        return Err(Error::DimensionMismatch { expected: 4, got: 3 });
    }
    synthesize_on(profile, &frame0.vectors(), (0.0, length), n)
}
