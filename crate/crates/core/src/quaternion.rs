//! Real quaternions `H` and the reduced quaternions `A = span{1, e1, e2}`.
//!
//! Component order is always `(1, e1, e2, e3)`. The multiplication table is
//! `e1 e2 = e3 = -e2 e1`, `e2 e3 = e1 = -e3 e2`, `e3 e1 = e2 = -e1 e3`,
//! `e_i^2 = -1`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const E1: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const E2: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const E3: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(a0: f64, a1: f64, a2: f64, a3: f64) -> Self {
        Quaternion { a0, a1, a2, a3 }
    }

    pub fn sc(&self) -> f64 {
        self.a0
    }

    /// Vector part `(a1, a2, a3)`.
    pub fn vec(&self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(self.a0, -self.a1, -self.a2, -self.a3)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a0 * self.a0 + self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3
    }

    pub fn norm(&self) -> f64 {
        // hypot chain avoids overflow for large components
        self.a0.hypot(self.a1).hypot(self.a2).hypot(self.a3)
    }

    pub fn scale(&self, s: f64) -> Self {
        Quaternion::new(self.a0 * s, self.a1 * s, self.a2 * s, self.a3 * s)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.a0, self.a1, self.a2, self.a3]
    }

    /// Drops the `e3` component.
    pub fn to_reduced(&self) -> ReducedQuaternion {
        ReducedQuaternion::new(self.a0, self.a1, self.a2)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.a0 * b.a0 - a.a1 * b.a1 - a.a2 * b.a2 - a.a3 * b.a3,
            a.a0 * b.a1 + a.a1 * b.a0 + a.a2 * b.a3 - a.a3 * b.a2,
            a.a0 * b.a2 - a.a1 * b.a3 + a.a2 * b.a0 + a.a3 * b.a1,
            a.a0 * b.a3 + a.a1 * b.a2 - a.a2 * b.a1 + a.a3 * b.a0,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, b: Quaternion) -> Quaternion {
        Quaternion::new(
            self.a0 + b.a0,
            self.a1 + b.a1,
            self.a2 + b.a2,
            self.a3 + b.a3,
        )
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, b: Quaternion) {
        *self = *self + b;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, b: Quaternion) -> Quaternion {
        Quaternion::new(
            self.a0 - b.a0,
            self.a1 - b.a1,
            self.a2 - b.a2,
            self.a3 - b.a3,
        )
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl From<ReducedQuaternion> for Quaternion {
    fn from(x: ReducedQuaternion) -> Self {
        Quaternion::new(x.x0, x.x1, x.x2, 0.0)
    }
}

/// The H-product of two quaternions.
pub fn quat_mul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

/// Element `x0 + x1 e1 + x2 e2` of `A`, identified with the point
/// `(x0, x1, x2)` of R³.
///
/// `A` is a real vector space but not a subalgebra of `H`, so there is no
/// `Mul` impl here; products are taken in [`Quaternion`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReducedQuaternion {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
}

/// Points of R³ share the representation of `A`.
pub type Point3 = ReducedQuaternion;

impl ReducedQuaternion {
    pub const ZERO: ReducedQuaternion = ReducedQuaternion::new(0.0, 0.0, 0.0);

    pub const fn new(x0: f64, x1: f64, x2: f64) -> Self {
        ReducedQuaternion { x0, x1, x2 }
    }

    pub fn sc(&self) -> f64 {
        self.x0
    }

    /// Vector part `x1 e1 + x2 e2`.
    pub fn vec(&self) -> ReducedQuaternion {
        ReducedQuaternion::new(0.0, self.x1, self.x2)
    }

    pub fn conj(&self) -> Self {
        ReducedQuaternion::new(self.x0, -self.x1, -self.x2)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2
    }

    pub fn norm(&self) -> f64 {
        self.x0.hypot(self.x1).hypot(self.x2)
    }

    pub fn scale(&self, s: f64) -> Self {
        ReducedQuaternion::new(self.x0 * s, self.x1 * s, self.x2 * s)
    }

    pub fn dot(&self, other: &ReducedQuaternion) -> f64 {
        self.x0 * other.x0 + self.x1 * other.x1 + self.x2 * other.x2
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x0, self.x1, self.x2]
    }

    pub fn component(&self, i: usize) -> f64 {
        match i {
            0 => self.x0,
            1 => self.x1,
            2 => self.x2,
            _ => panic!("reduced quaternion has three components, got index {i}"),
        }
    }

    /// Unit coordinate vector along axis `i` (0, 1 or 2).
    pub fn axis(i: usize) -> Self {
        let mut p = ReducedQuaternion::ZERO;
        match i {
            0 => p.x0 = 1.0,
            1 => p.x1 = 1.0,
            2 => p.x2 = 1.0,
            _ => panic!("axis index {i} out of range"),
        }
        p
    }
}

impl Add for ReducedQuaternion {
    type Output = ReducedQuaternion;
    fn add(self, b: ReducedQuaternion) -> ReducedQuaternion {
        ReducedQuaternion::new(self.x0 + b.x0, self.x1 + b.x1, self.x2 + b.x2)
    }
}

impl AddAssign for ReducedQuaternion {
    fn add_assign(&mut self, b: ReducedQuaternion) {
        self.x0 += b.x0;
        self.x1 += b.x1;
        self.x2 += b.x2;
    }
}

impl Sub for ReducedQuaternion {
    type Output = ReducedQuaternion;
    fn sub(self, b: ReducedQuaternion) -> ReducedQuaternion {
        ReducedQuaternion::new(self.x0 - b.x0, self.x1 - b.x1, self.x2 - b.x2)
    }
}

impl Neg for ReducedQuaternion {
    type Output = ReducedQuaternion;
    fn neg(self) -> ReducedQuaternion {
        self.scale(-1.0)
    }
}

/// An `A`-valued function on the unit ball.
pub trait FieldFn {
    fn eval(&self, p: Point3) -> ReducedQuaternion;
}

impl<F> FieldFn for F
where
    F: Fn(Point3) -> ReducedQuaternion,
{
    fn eval(&self, p: Point3) -> ReducedQuaternion {
        self(p)
    }
}
