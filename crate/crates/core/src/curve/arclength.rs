use super::spec::{CurveKind, CurveSpec};
use super::synth::synthesize_on;
use super::SampledCurve;
use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::stencil::{locate, simpson};

/// Speeds below this are treated as a stalled parametrization.
const MIN_SPEED: f64 = 1e-9;

const NEWTON_MAX_ITER: usize = 12;

/// Monotone map `t -> s(t)` tabulated on the spec's sample grid, with `s(t0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcLengthTable {
    pub t: Vec<f64>,
    pub s: Vec<f64>,
    pub speed: Vec<f64>,
}

impl ArcLengthTable {
    pub fn length(&self) -> f64 {
        *self.s.last().expect("table is never empty")
    }
}

fn speed_at(spec: &CurveSpec, t: f64) -> Result<f64> {
    let speed = spec.velocity(t)?.norm();
    if !(speed >= MIN_SPEED) {
        return Err(Error::DegenerateSpeed { t, speed });
    }
    Ok(speed)
}

/// Composite Simpson quadrature of the speed, one panel per grid cell.
pub fn arc_length_table(spec: &CurveSpec) -> Result<ArcLengthTable> {
    if matches!(spec.kind(), CurveKind::FromCurvatures { .. }) {
        return Err(Error::UnsupportedKind("from_curvatures"));
    }
    let (t0, t1) = spec.domain();
    let n = spec.samples();
    let h = spec.grid_step();
    let t: Vec<f64> = (0..n).map(|i| if i == n - 1 { t1 } else { t0 + i as f64 * h }).collect();
    let speed = t.iter().map(|t| speed_at(spec, *t)).collect::<Result<Vec<_>>>()?;
    let mut s = Vec::with_capacity(n);
    s.push(0.0);
    for i in 0..n - 1 {
        let mid = 0.5 * (t[i] + t[i + 1]);
        let mid_speed = speed_at(spec, mid)?;
        let cell = (t[i + 1] - t[i]) / 6.0 * (speed[i] + 4.0 * mid_speed + speed[i + 1]);
        s.push(s[i] + cell);
    }
    Ok(ArcLengthTable { t, s, speed })
}

/// Cubic Hermite guess for `t(target)` inside cell `i`, slopes limited to stay monotone.
fn hermite_guess(table: &ArcLengthTable, i: usize, target: f64) -> f64 {
    let (s0, s1) = (table.s[i], table.s[i + 1]);
    let (t0, t1) = (table.t[i], table.t[i + 1]);
    let ds = s1 - s0;
    let secant = (t1 - t0) / ds;
    let mut m0 = 1.0 / table.speed[i];
    let mut m1 = 1.0 / table.speed[i + 1];
    let (a, b) = (m0 / secant, m1 / secant);
    let r = a * a + b * b;
    if r > 9.0 {
        let tau = 3.0 / r.sqrt();
        m0 *= tau;
        m1 *= tau;
    }
    let u = (target - s0) / ds;
    let (u2, u3) = (u * u, u * u * u);
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    h00 * t0 + h10 * ds * m0 + h01 * t1 + h11 * ds * m1
}

/// Parameter at arc length `target`: monotone cubic guess, then Newton on the
/// quadrature-defined arc length.
fn invert(spec: &CurveSpec, table: &ArcLengthTable, target: f64) -> Result<f64> {
    let i = locate(&table.s, target);
    let (ta, tb) = (table.t[i], table.t[i + 1]);
    if target <= table.s[i] {
        return Ok(ta);
    }
    if target >= table.s[i + 1] {
        return Ok(tb);
    }
    let mut t = hermite_guess(table, i, target).clamp(ta, tb);
    let tol = 1e-15 * (tb - ta).max(f64::MIN_POSITIVE) * 4.0;
    for _ in 0..NEWTON_MAX_ITER {
        let partial = simpson(|x| spec.velocity(x).map(|v| v.norm()).unwrap_or(f64::NAN), ta, t);
        let f = table.s[i] + partial - target;
        let step = f / speed_at(spec, t)?;
        let next = (t - step).clamp(ta, tb);
        let moved = (next - t).abs();
        t = next;
        if moved <= tol {
            break;
        }
    }
    Ok(t)
}

/// Derivatives 1..=4 of `s -> c(t(s))` from derivatives `c[m] = c^(m+1)(t)`.
pub(crate) fn arc_length_jet(c: [Quaternion; 4]) -> [Quaternion; 4] {
    let [c1, c2, c3, c4] = c;
    let sigma = c1.norm();
    let s1 = c1.dot(c2) / sigma;
    let s2 = (c2.dot(c2) + c1.dot(c3) - s1 * s1) / sigma;
    let s3 = (3.0 * c2.dot(c3) + c1.dot(c4) - 3.0 * s1 * s2) / sigma;
    let u1 = 1.0 / sigma;
    let u2 = -s1 / sigma.powi(3);
    let u3 = (3.0 * s1 * s1 - sigma * s2) / sigma.powi(5);
    let u4 = (-s3 * sigma * sigma + 10.0 * sigma * s1 * s2 - 15.0 * s1.powi(3)) / sigma.powi(7);
    [
        c1 * u1,
        c2 * (u1 * u1) + c1 * u2,
        c3 * u1.powi(3) + c2 * (3.0 * u1 * u2) + c1 * u3,
        c4 * u1.powi(4) + c3 * (6.0 * u1 * u1 * u2) + c2 * (3.0 * u2 * u2 + 4.0 * u1 * u3) + c1 * u4,
    ]
}

/// Samples that are already unit speed on a uniform grid covering the domain are
/// used as they are.
fn unit_speed_samples(spec: &CurveSpec, table: &ArcLengthTable, n: usize) -> Option<SampledCurve> {
    let CurveKind::Sampled { params, points } = spec.kind() else {
        return None;
    };
    let (t0, t1) = spec.domain();
    if params.len() != n || params[0] != t0 || params[n - 1] != t1 || table.t.len() != n {
        return None;
    }
    let step = (t1 - t0) / (n - 1) as f64;
    let uniform = params.iter().enumerate().all(|(i, p)| (p - (t0 + i as f64 * step)).abs() <= 1e-12 * (t1 - t0));
    let identity = table.s.iter().zip(params).all(|(s, p)| (s - (p - t0)).abs() <= 1e-8);
    if !(uniform && identity) {
        return None;
    }
    SampledCurve::new(spec.dimension(), 0.0, step, points.clone()).ok()
}

/// Resamples the curve at `n` points uniformly spaced in arc length, starting at `s = 0`.
///
/// Builtin curves also carry exact arc-length derivatives.
pub fn reparametrize_by_arclength(spec: &CurveSpec, n: usize) -> Result<SampledCurve> {
    if n < 9 || n.is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!("sample count must be odd and at least 9, got {n}")));
    }
    let table = arc_length_table(spec)?;
    if let Some(curve) = unit_speed_samples(spec, &table, n) {
        return Ok(curve);
    }
    let length = table.length();
    let step = length / (n - 1) as f64;
    let mut points = Vec::with_capacity(n);
    let mut jets = spec.kind().is_builtin().then(|| Vec::with_capacity(n));
    for j in 0..n {
        let target = if j == n - 1 { length } else { j as f64 * step };
        let t = invert(spec, &table, target)?;
        points.push(spec.evaluate(t)?);
        if let Some(jets) = jets.as_mut() {
            let c = [1, 2, 3, 4].map(|order| spec.analytic(t, order));
            jets.push(arc_length_jet(c));
        }
    }
    match jets {
        Some(jets) => SampledCurve::with_jets(spec.dimension(), 0.0, step, points, jets),
        None => SampledCurve::new(spec.dimension(), 0.0, step, points),
    }
}

/// Unit-speed samples of any spec at its own sample count: synthesized curves are
/// integrated over the domain, all others are reparametrized by arc length.
pub fn sample_curve(spec: &CurveSpec) -> Result<SampledCurve> {
    match spec.kind() {
        CurveKind::FromCurvatures { profile, seed } => {
            let seed = match seed {
                Some(seed) => seed.clone(),
                None => (0..spec.dimension().get()).map(Quaternion::basis).collect(),
            };
            Ok(synthesize_on(profile, &seed, spec.domain(), spec.samples())?.curve)
        }
        _ => reparametrize_by_arclength(spec, spec.samples()),
    }
}
