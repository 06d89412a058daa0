use super::{CurvatureSpec, Dimension};
use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::stencil::{derivative_nodes, fornberg_weights, interpolate_nodes};

/// Nodes used by the local cubic through the nearest samples of a sampled curve.
const CUBIC_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    /// `(a cos t, a sin t, b t)`.
    Helix3 { a: f64, b: f64 },
    /// `(R cos t, R sin t, 0)`.
    Circle3 { radius: f64 },
    /// `(a cos t, a sin t, b cos ωt, b sin ωt)`.
    Clifford4 { a: f64, b: f64, omega: f64 },
    /// Raw samples `points[i]` at strictly increasing `params[i]`.
    Sampled { params: Vec<f64>, points: Vec<Quaternion> },
    /// Curve produced by integrating the Frenet equations; `seed` defaults to the standard basis.
    FromCurvatures { profile: CurvatureSpec, seed: Option<Vec<Quaternion>> },
}

impl CurveKind {
    pub fn name(&self) -> &'static str {
        match self {
            CurveKind::Helix3 { .. } => "helix3",
            CurveKind::Circle3 { .. } => "circle3",
            CurveKind::Clifford4 { .. } => "clifford4",
            CurveKind::Sampled { .. } => "sampled",
            CurveKind::FromCurvatures { .. } => "from_curvatures",
        }
    }

    fn natural_dimension(&self) -> Option<Dimension> {
        match self {
            CurveKind::Helix3 { .. } | CurveKind::Circle3 { .. } => Some(Dimension::Three),
            CurveKind::Clifford4 { .. } => Some(Dimension::Four),
            CurveKind::FromCurvatures { profile, .. } => Some(profile.dimension()),
            CurveKind::Sampled { .. } => None,
        }
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self, CurveKind::Helix3 { .. } | CurveKind::Circle3 { .. } | CurveKind::Clifford4 { .. })
    }
}

/// A validated curve description: kind, parameter domain and sample count.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    dimension: Dimension,
    kind: CurveKind,
    domain: (f64, f64),
    samples: usize,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

impl CurveSpec {
    pub fn new(dimension: Dimension, kind: CurveKind, domain: (f64, f64), samples: usize) -> Result<Self> {
        let (t0, t1) = domain;
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
            return Err(invalid(format!("domain [{t0}, {t1}] must satisfy t0 < t1")));
        }
        if samples < 9 || samples.is_multiple_of(2) {
            return Err(invalid(format!("samples must be odd and at least 9, got {samples}")));
        }
        if let Some(natural) = kind.natural_dimension() {
            if natural != dimension {
                return Err(invalid(format!("{} curves live in {natural}, spec says {dimension}", kind.name())));
            }
        }
        match &kind {
            CurveKind::Helix3 { a, b } => {
                if !(*a > 0.0) || !b.is_finite() {
                    return Err(invalid("helix3 needs a > 0 and finite b"));
                }
            }
            CurveKind::Circle3 { radius } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(invalid("circle3 needs R > 0"));
                }
            }
            CurveKind::Clifford4 { a, b, omega } => {
                if !(*a > 0.0 && *b > 0.0 && *omega > 0.0) || *omega == 1.0 {
                    return Err(invalid("clifford4 needs a, b, omega > 0 and omega != 1"));
                }
            }
            CurveKind::Sampled { params, points } => {
                if params.len() != points.len() {
                    return Err(invalid("sampled params and points differ in length"));
                }
                if params.len() < CUBIC_POINTS {
                    return Err(invalid("sampled curves need at least four samples"));
                }
                if let Some(i) = params.windows(2).position(|w| !(w[1] > w[0])) {
                    return Err(invalid(format!("sampled params not strictly increasing at row {}", i + 1)));
                }
                if dimension == Dimension::Three && points.iter().any(|p| p.d != 0.0) {
                    return Err(invalid("E3 samples must have three coordinates"));
                }
                if t0 < params[0] || t1 > params[params.len() - 1] {
                    return Err(invalid("domain exceeds the sampled parameter range"));
                }
            }
            CurveKind::FromCurvatures { profile, seed } => {
                profile.validate()?;
                if let Some(seed) = seed {
                    if seed.len() != dimension.get() {
                        return Err(invalid(format!("seed frame needs {} vectors", dimension.get())));
                    }
                }
            }
        }
        Ok(Self { dimension, kind, domain, samples })
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Grid spacing `(t1 - t0) / (samples - 1)`.
    pub fn grid_step(&self) -> f64 {
        (self.domain.1 - self.domain.0) / (self.samples - 1) as f64
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (t0, t1) = self.domain;
        if t < t0 || t > t1 || t.is_nan() {
            return Err(Error::OutOfDomain { t, t0, t1 });
        }
        Ok(())
    }

    /// Position at parameter `t`.
    pub fn evaluate(&self, t: f64) -> Result<Quaternion> {
        self.check_domain(t)?;
        match &self.kind {
            CurveKind::Sampled { params, points } => Ok(interpolate_nodes(params, points, t, CUBIC_POINTS)),
            CurveKind::FromCurvatures { .. } => Err(Error::UnsupportedKind("from_curvatures")),
            _ => Ok(self.analytic(t, 0)),
        }
    }

    /// Velocity used for arc length: exact for builtins, the derivative of the local
    /// cubic for sampled curves.
    pub(crate) fn velocity(&self, t: f64) -> Result<Quaternion> {
        match &self.kind {
            CurveKind::Sampled { params, points } => Ok(derivative_nodes(params, points, t, 1, CUBIC_POINTS)),
            CurveKind::FromCurvatures { .. } => Err(Error::UnsupportedKind("from_curvatures")),
            _ => Ok(self.analytic(t, 1)),
        }
    }

    /// Derivative of `order` (1..=4) at `t`: closed form for builtins, central
    /// differences on the sample spacing otherwise.
    pub fn derivative(&self, t: f64, order: usize) -> Result<Quaternion> {
        if !(1..=4).contains(&order) {
            return Err(invalid(format!("derivative order must be 1..=4, got {order}")));
        }
        match &self.kind {
            k if k.is_builtin() => {
                self.check_domain(t)?;
                Ok(self.analytic(t, order))
            }
            _ => self.derivative_fd(t, order, self.grid_step()),
        }
    }

    /// Central finite difference of `evaluate`: 5 points for orders 1-2, 7 for 3-4.
    pub fn derivative_fd(&self, t: f64, order: usize, h: f64) -> Result<Quaternion> {
        if !(1..=4).contains(&order) {
            return Err(invalid(format!("derivative order must be 1..=4, got {order}")));
        }
        let half: i32 = if order <= 2 { 2 } else { 3 };
        let (t0, t1) = self.domain;
        let reach = half as f64 * h;
        if t - reach < t0 || t + reach > t1 {
            return Err(Error::OutOfDomain { t, t0: t0 + reach, t1: t1 - reach });
        }
        let offsets: Vec<f64> = (-half..=half).map(f64::from).collect();
        let w = fornberg_weights(0.0, &offsets, order);
        let center = self.evaluate(t)?;
        let mut acc = Quaternion::ZERO;
        for (j, off) in offsets.iter().enumerate() {
            if w[order][j] != 0.0 {
                acc += (self.evaluate(t + off * h)? - center) * w[order][j];
            }
        }
        Ok(acc / h.powi(order as i32))
    }

    /// Closed-form derivative of `order` (0..=4) for builtin kinds.
    pub(crate) fn analytic(&self, t: f64, order: usize) -> Quaternion {
        match self.kind {
            CurveKind::Helix3 { a, b } => {
                let (x, y) = circle_derivative(t, 1.0, order);
                let z = match order {
                    0 => b * t,
                    1 => b,
                    _ => 0.0,
                };
                Quaternion::new(a * x, a * y, z, 0.0)
            }
            CurveKind::Circle3 { radius } => {
                let (x, y) = circle_derivative(t, 1.0, order);
                Quaternion::new(radius * x, radius * y, 0.0, 0.0)
            }
            CurveKind::Clifford4 { a, b, omega } => {
                let (x, y) = circle_derivative(t, 1.0, order);
                let (z, w) = circle_derivative(t, omega, order);
                Quaternion::new(a * x, a * y, b * z, b * w)
            }
            _ => unreachable!("analytic derivatives exist only for builtin kinds"),
        }
    }
}

/// `d^order/dt^order (cos ωt, sin ωt)`.
fn circle_derivative(t: f64, omega: f64, order: usize) -> (f64, f64) {
    let (s, c) = (omega * t).sin_cos();
    let scale = omega.powi(order as i32);
    let (x, y) = match order % 4 {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    };
    (scale * x, scale * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn helix(a: f64, b: f64) -> CurveSpec {
        CurveSpec::new(Dimension::Three, CurveKind::Helix3 { a, b }, (0.0, 2.0 * PI), 1001).unwrap()
    }

    #[test]
    fn evaluate_builtins_at_zero() {
        let circle =
            CurveSpec::new(Dimension::Three, CurveKind::Circle3 { radius: 2.0 }, (0.0, 2.0 * PI), 101).unwrap();
        assert_eq!(circle.evaluate(0.0).unwrap(), Quaternion::E1 * 2.0);
        assert_eq!(helix(2.0, 1.0).evaluate(0.0).unwrap(), Quaternion::new(2.0, 0.0, 0.0, 0.0));
        let cl = CurveSpec::new(
            Dimension::Four,
            CurveKind::Clifford4 { a: FRAC_1_SQRT_2, b: FRAC_1_SQRT_2, omega: 2.0 },
            (0.0, 2.0 * PI),
            101,
        )
        .unwrap();
        assert_eq!(cl.evaluate(0.0).unwrap(), Quaternion::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0));
    }

    #[test]
    fn analytic_derivative_examples() {
        let circle =
            CurveSpec::new(Dimension::Three, CurveKind::Circle3 { radius: 2.0 }, (0.0, 2.0 * PI), 101).unwrap();
        assert_eq!(circle.derivative(0.0, 1).unwrap(), Quaternion::new(0.0, 2.0, 0.0, 0.0));
        let d2 = helix(2.0, 1.0).derivative(FRAC_PI_2, 2).unwrap();
        assert!((d2 - Quaternion::new(0.0, -2.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn finite_differences_match_closed_form_on_helix() {
        let h = helix(2.0, 1.0);
        let mut worst: f64 = 0.0;
        for i in 0..100 {
            let t = 0.1 + i as f64 * 0.06;
            for order in 1..=2 {
                let fd = h.derivative_fd(t, order, 1e-3).unwrap();
                worst = worst.max((fd - h.analytic(t, order)).max_abs_component());
            }
        }
        assert!(worst <= 1e-6, "max gap {worst}");
    }

    #[test]
    fn domain_errors() {
        let h = helix(2.0, 1.0);
        assert!(matches!(h.evaluate(-0.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(h.derivative_fd(1e-3, 3, 1e-3), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn rejects_bad_specs() {
        let bad = |kind, dim, samples| CurveSpec::new(dim, kind, (0.0, 1.0), samples);
        assert!(bad(CurveKind::Helix3 { a: 0.0, b: 1.0 }, Dimension::Three, 11).is_err());
        assert!(bad(CurveKind::Circle3 { radius: 1.0 }, Dimension::Three, 10).is_err());
        assert!(bad(CurveKind::Circle3 { radius: 1.0 }, Dimension::Four, 11).is_err());
        assert!(bad(CurveKind::Clifford4 { a: 1.0, b: 1.0, omega: 1.0 }, Dimension::Four, 11).is_err());
        let params = vec![0.0, 0.5, 0.5, 1.0];
        let points = vec![Quaternion::ZERO; 4];
        assert!(bad(CurveKind::Sampled { params, points }, Dimension::Three, 11).is_err());
    }

    #[test]
    fn sampled_kind_interpolates_cubics_exactly() {
        let params: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let points: Vec<Quaternion> = params.iter().map(|t| Quaternion::new(*t, t * t, t * t * t, 0.0)).collect();
        let spec = CurveSpec::new(Dimension::Three, CurveKind::Sampled { params, points }, (0.0, 1.0), 11).unwrap();
        let p = spec.evaluate(0.437).unwrap();
        assert!((p - Quaternion::new(0.437, 0.437f64.powi(2), 0.437f64.powi(3), 0.0)).norm() < 1e-14);
        assert!(matches!(
            CurveSpec::new(Dimension::Three, spec.kind().clone(), (0.0, 1.5), 11),
            Err(Error::InvalidSpec(_))
        ));
        let from = CurveSpec::new(
            Dimension::Three,
            CurveKind::FromCurvatures {
                profile: CurvatureSpec::E3 {
                    curvature: super::super::ScalarFn::Constant(1.0),
                    torsion: super::super::ScalarFn::Constant(0.0),
                },
                seed: None,
            },
            (0.0, 1.0),
            11,
        )
        .unwrap();
        assert!(matches!(from.evaluate(0.5), Err(Error::UnsupportedKind(_))));
    }
}
