//! Real quaternion algebra.
//!
//! A quaternion is written `q = a e1 + b e2 + c e3 + d e4` with `e4 = 1`, so the
//! scalar part is the *last* coefficient. The multiplication table is
//!
//! ```text
//! e1 e2 = e3    e2 e3 = e1    e3 e1 = e2
//! e2 e1 = -e3   e3 e2 = -e1   e1 e3 = -e2
//! e1^2 = e2^2 = e3^2 = -1
//! ```
//!
//! Points and vectors of E4 are quaternions; points and vectors of E3 are the
//! spatial quaternions (zero scalar part).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Relative bound on the vector part of `p γq + q γp`, which vanishes identically.
const H_FORM_VECTOR_TOL: f64 = 1e-12;

/// A real quaternion `a e1 + b e2 + c e3 + d`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const E1: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const E2: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const E3: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const E4: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Basis element `e_{index+1}`; `index` runs over `0..4`.
    pub fn basis(index: usize) -> Self {
        match index {
            0 => Self::E1,
            1 => Self::E2,
            2 => Self::E3,
            3 => Self::E4,
            _ => panic!("quaternion basis index {index} out of range"),
        }
    }

    #[inline]
    pub const fn from_scalar(d: f64) -> Self {
        Self::new(0.0, 0.0, 0.0, d)
    }

    /// Reassembles `S + V`.
    #[inline]
    pub fn from_parts(scalar: f64, vector: SpatialQuaternion) -> Self {
        Self::new(vector.a, vector.b, vector.c, scalar)
    }

    /// Builds a quaternion from coordinates `(x, y, z[, w])`; a missing `w` is 0.
    pub fn from_coords(coords: &[f64]) -> Self {
        let get = |i: usize| coords.get(i).copied().unwrap_or(0.0);
        Self::new(get(0), get(1), get(2), get(3))
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    #[inline]
    pub fn from_array(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    /// `S_q`.
    #[inline]
    pub fn scalar_part(self) -> f64 {
        self.d
    }

    /// `V_q`.
    #[inline]
    pub fn vector_part(self) -> SpatialQuaternion {
        SpatialQuaternion::new(self.a, self.b, self.c)
    }

    /// Hamiltonian conjugation `γq = -a e1 - b e2 - c e3 + d`.
    #[inline]
    pub fn conj(self) -> Self {
        Self::new(-self.a, -self.b, -self.c, self.d)
    }

    /// Quaternion product, expanded as
    /// `S_p S_q - <V_p, V_q> + S_p V_q + S_q V_p + V_p ∧ V_q`.
    pub fn mul_quat(self, q: Self) -> Self {
        let (sp, vp) = (self.scalar_part(), self.vector_part());
        let (sq, vq) = (q.scalar_part(), q.vector_part());
        let scalar = sp * sq - vp.dot(vq);
        let vector = vq * sp + vp * sq + vp.cross(vq);
        Self::from_parts(scalar, vector)
    }

    /// The bilinear form `h(p, q) = ½[p γq + q γp]`, evaluated literally.
    ///
    /// The vector part of the bracket cancels; in debug builds that is checked
    /// before it is discarded.
    pub fn h_form(self, q: Self) -> f64 {
        let sum = self.mul_quat(q.conj()) + q.mul_quat(self.conj());
        let half = sum * 0.5;
        debug_assert!(
            {
                let leak = half.vector_part().norm();
                let scale = self.norm() * q.norm();
                !leak.is_finite() || leak <= H_FORM_VECTOR_TOL * scale.max(1.0)
            },
            "vector part of h-form bracket did not cancel"
        );
        half.scalar_part()
    }

    /// Euclidean inner product of the coefficient vectors; agrees with [`Self::h_form`].
    #[inline]
    pub fn dot(self, q: Self) -> f64 {
        self.a * q.a + self.b * q.b + self.c * q.c + self.d * q.d
    }

    /// `‖q‖² = q γq` (scalar part).
    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.mul_quat(self.conj()).scalar_part()
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// `‖q + γq‖ ≤ tol`, i.e. `|2d| ≤ tol`.
    pub fn is_spatial(self, tol: f64) -> bool {
        (self + self.conj()).norm() <= tol
    }

    /// `q / ‖q‖`; zero stays zero-divided (NaN), matching the no-validation kernel policy.
    #[inline]
    pub fn normalized(self) -> Self {
        self / self.norm()
    }

    pub fn max_abs_component(self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} e1 + {} e2 + {} e3 + {}", self.a, self.b, self.c, self.d)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, q: Self) -> Self {
        Self::new(self.a + q.a, self.b + q.b, self.c + q.c, self.d + q.d)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, q: Self) {
        *self = *self + q;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, q: Self) -> Self {
        Self::new(self.a - q.a, self.b - q.b, self.c - q.c, self.d - q.d)
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, q: Self) {
        *self = *self - q;
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, q: Self) -> Self {
        self.mul_quat(q)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        Self::new(self.a / s, self.b / s, self.c / s, self.d / s)
    }
}

/// A spatial quaternion `a e1 + b e2 + c e3`: a point or vector of E3.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpatialQuaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SpatialQuaternion {
    pub const ZERO: SpatialQuaternion = SpatialQuaternion::new(0.0, 0.0, 0.0);

    #[inline]
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    #[inline]
    pub fn dot(self, v: Self) -> f64 {
        self.a * v.a + self.b * v.b + self.c * v.c
    }

    /// Vector product `V_p ∧ V_q`.
    #[inline]
    pub fn cross(self, v: Self) -> Self {
        Self::new(self.b * v.c - self.c * v.b, self.c * v.a - self.a * v.c, self.a * v.b - self.b * v.a)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(self.a, self.b, self.c, 0.0)
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }
}

impl From<SpatialQuaternion> for Quaternion {
    fn from(v: SpatialQuaternion) -> Self {
        v.to_quaternion()
    }
}

impl Add for SpatialQuaternion {
    type Output = Self;
    #[inline]
    fn add(self, v: Self) -> Self {
        Self::new(self.a + v.a, self.b + v.b, self.c + v.c)
    }
}

impl Sub for SpatialQuaternion {
    type Output = Self;
    #[inline]
    fn sub(self, v: Self) -> Self {
        Self::new(self.a - v.a, self.b - v.b, self.c - v.c)
    }
}

impl Neg for SpatialQuaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c)
    }
}

impl Mul<f64> for SpatialQuaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s)
    }
}

/// Free-function form of the product, for call sites that read better without operators.
pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    p.mul_quat(q)
}

pub fn quat_conj(q: Quaternion) -> Quaternion {
    q.conj()
}

pub fn h_form(p: Quaternion, q: Quaternion) -> f64 {
    p.h_form(q)
}

pub fn quat_norm(q: Quaternion) -> f64 {
    q.norm()
}

pub fn is_spatial(q: Quaternion, tol: f64) -> bool {
    q.is_spatial(tol)
}

/// Determinant of the 4x4 matrix whose rows are the coefficient vectors of `rows`.
pub fn det4(rows: [Quaternion; 4]) -> f64 {
    let m: [[f64; 4]; 4] = rows.map(Quaternion::to_array);
    let minor = |r: [usize; 3], c: [usize; 3]| {
        m[r[0]][c[0]] * (m[r[1]][c[1]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[1]])
            - m[r[0]][c[1]] * (m[r[1]][c[0]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[0]])
            + m[r[0]][c[2]] * (m[r[1]][c[0]] * m[r[2]][c[1]] - m[r[1]][c[1]] * m[r[2]][c[0]])
    };
    let rest = [1, 2, 3];
    m[0][0] * minor(rest, [1, 2, 3]) - m[0][1] * minor(rest, [0, 2, 3]) + m[0][2] * minor(rest, [0, 1, 3])
        - m[0][3] * minor(rest, [0, 1, 2])
}

/// The vector `X` with `det[u, v, w, x] = <X, x>` for every `x`.
///
/// `X` is orthogonal to `u`, `v`, `w` and `det[u, v, w, X] = ‖X‖² ≥ 0`.
pub fn cross4(u: Quaternion, v: Quaternion, w: Quaternion) -> Quaternion {
    Quaternion::new(
        det4([u, v, w, Quaternion::E1]),
        det4([u, v, w, Quaternion::E2]),
        det4([u, v, w, Quaternion::E3]),
        det4([u, v, w, Quaternion::E4]),
    )
}
