use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::real::{wrap_angle, Real};

/// Upright placement transform: translation plus a rotation about gravity (+z up).
///
/// The yaw is always stored wrapped to `[-pi, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
#[serde(try_from = "PoseRepr<T>", into = "PoseRepr<T>")]
pub struct Pose<T> {
    translation: Vec3<T>,
    yaw: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
#[serde(deny_unknown_fields)]
struct PoseRepr<T> {
    t: Vec3<T>,
    yaw: T,
}

impl<T: Real> TryFrom<PoseRepr<T>> for Pose<T> {
    type Error = String;
    fn try_from(r: PoseRepr<T>) -> Result<Self, String> {
        if !r.t.is_finite() || !r.yaw.is_finite() {
            return Err("pose has non-finite components".into());
        }
        Ok(Pose::new(r.t, r.yaw))
    }
}

impl<T: Real> From<Pose<T>> for PoseRepr<T> {
    fn from(p: Pose<T>) -> Self {
        PoseRepr {
            t: p.translation,
            yaw: p.yaw,
        }
    }
}

impl<T: Real> Default for Pose<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> Pose<T> {
    pub fn new(translation: Vec3<T>, yaw: T) -> Self {
        Self {
            translation,
            yaw: wrap_angle(yaw),
        }
    }

    pub fn identity() -> Self {
        Self::new(Vec3::zeros(), T::zero())
    }

    pub fn from_translation(translation: Vec3<T>) -> Self {
        Self::new(translation, T::zero())
    }

    #[inline]
    pub fn translation(&self) -> Vec3<T> {
        self.translation
    }

    #[inline]
    pub fn yaw(&self) -> T {
        self.yaw
    }

    pub fn with_translation(&self, translation: Vec3<T>) -> Self {
        Self {
            translation,
            yaw: self.yaw,
        }
    }

    pub fn with_yaw(&self, yaw: T) -> Self {
        Self::new(self.translation, yaw)
    }

    /// Rotates `v` about +z by the pose yaw (no translation).
    #[inline]
    pub fn rotate(&self, v: &Vec3<T>) -> Vec3<T> {
        rotate_z(v, self.yaw)
    }

    #[inline]
    pub fn transform_point(&self, p: &Vec3<T>) -> Vec3<T> {
        self.rotate(p) + self.translation
    }

    pub fn inverse_transform_point(&self, p: &Vec3<T>) -> Vec3<T> {
        rotate_z(&(*p - self.translation), -self.yaw)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.transform_point(&other.translation),
            self.yaw + other.yaw,
        )
    }

    /// Retraction used by guidance: adds translations, wraps the summed yaw.
    pub fn boxplus(&self, delta: &PoseDelta<T>) -> Self {
        Self::new(self.translation + delta.translation, self.yaw + delta.yaw)
    }

    pub fn cast<U: Real>(&self) -> Pose<U> {
        Pose::new(self.translation.cast(), U::lit(self.yaw.as_f64()))
    }
}

/// Tangent-space element of the 4-DOF pose: translation plus yaw increment.
/// Also used for cost gradients with respect to the pose.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct PoseDelta<T> {
    pub translation: Vec3<T>,
    pub yaw: T,
}

impl<T: Real> PoseDelta<T> {
    pub fn zero() -> Self {
        Self {
            translation: Vec3::zeros(),
            yaw: T::zero(),
        }
    }

    pub fn scaled(&self, translation_scale: T, yaw_scale: T) -> Self {
        Self {
            translation: self.translation * translation_scale,
            yaw: self.yaw * yaw_scale,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            translation: self.translation + o.translation,
            yaw: self.yaw + o.yaw,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.translation.is_finite() && self.yaw.is_finite()
    }
}

#[inline]
pub fn rotate_z<T: Real>(v: &Vec3<T>, angle: T) -> Vec3<T> {
    let (s, c) = angle.sin_cos();
    Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

/// Unit quaternion `(w, x, y, z)`; only used when authoring scenes with tilted objects.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
#[serde(try_from = "[T; 4]", into = "[T; 4]")]
pub struct UnitQuaternion<T> {
    w: T,
    x: T,
    y: T,
    z: T,
}

impl<T: Real> TryFrom<[T; 4]> for UnitQuaternion<T> {
    type Error = String;
    fn try_from(q: [T; 4]) -> Result<Self, String> {
        UnitQuaternion::new(q[0], q[1], q[2], q[3])
            .ok_or_else(|| "degenerate quaternion".to_string())
    }
}

impl<T: Real> From<UnitQuaternion<T>> for [T; 4] {
    fn from(q: UnitQuaternion<T>) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

impl<T: Real> UnitQuaternion<T> {
    /// Normalizes `(w, x, y, z)`; `None` for a zero or non-finite input.
    pub fn new(w: T, x: T, y: T, z: T) -> Option<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return None;
        }
        Some(Self {
            w: w / n,
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn from_yaw(yaw: T) -> Self {
        let (s, c) = (yaw * T::half()).sin_cos();
        Self {
            w: c,
            x: T::zero(),
            y: T::zero(),
            z: s,
        }
    }

    pub fn components(&self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn norm(&self) -> T {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn rotate(&self, v: &Vec3<T>) -> Vec3<T> {
        let u = Vec3::new(self.x, self.y, self.z);
        let t = u.cross(v) * T::two();
        *v + t * self.w + u.cross(&t)
    }

    /// Heading of the rotated +x axis projected onto the horizontal plane.
    pub fn heading(&self) -> T {
        let ex = self.rotate(&Vec3::new(T::one(), T::zero(), T::zero()));
        if ex.x.abs() + ex.y.abs() < T::lit(1e-12) {
            // x axis points along gravity; fall back to the rotated y axis.
            let ey = self.rotate(&Vec3::new(T::zero(), T::one(), T::zero()));
            return wrap_angle(ey.y.atan2(ey.x) - T::FRAC_PI_2());
        }
        ex.y.atan2(ex.x)
    }

    /// The rotation left after removing the heading: `R = R_z(heading) * tilt`.
    pub fn tilt(&self) -> Self {
        let h = Self::from_yaw(-self.heading());
        h.mul(self)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let w = self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z;
        let x = self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y;
        let y = self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x;
        let z = self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w;
        Self::new(w, x, y, z).expect("product of unit quaternions")
    }

    /// True when the rotation is (numerically) a pure rotation about +z.
    pub fn is_upright(&self, tol: T) -> bool {
        self.x.abs() <= tol && self.y.abs() <= tol
    }
}
