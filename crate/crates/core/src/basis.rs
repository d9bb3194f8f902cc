//! The homogeneous monogenic polynomials `X_n^{l,†}` and `Y_n^{m,†}`.
//!
//! In spherical coordinates `x = r (cos θ, sin θ cos φ, sin θ sin φ)` with
//! `t = cos θ` the polynomials read
//!
//! ```text
//! X_n^l = r^n { (n+l+1)/2 P_n^l(t) cos lφ
//!             + 1/4 P_n^{l+1}(t) [ cos (l+1)φ e1 + sin (l+1)φ e2 ]
//!             + 1/4 (n+l+1)(n+l) P_n^{l-1}(t) [ -cos (l-1)φ e1 + sin (l-1)φ e2 ] }
//!
//! Y_n^m = r^n { (n+m+1)/2 P_n^m(t) sin mφ
//!             + 1/4 P_n^{m+1}(t) [ sin (m+1)φ e1 - cos (m+1)φ e2 ]
//!             - 1/4 (n+m+1)(n+m) P_n^{m-1}(t) [ sin (m-1)φ e1 + cos (m-1)φ e2 ] }
//! ```
//!
//! where the Chebyshev factors `T_k(x1/ρ)` and `(x2/ρ) U_{k-1}(x1/ρ)` have
//! been replaced by `cos kφ` and `sin kφ`. On the `x0` axis `φ := 0`; every
//! φ-dependent term carries a factor `P_n^l(±1) = 0` there.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::{Point3, ReducedQuaternion};
use crate::special::{factorial_ratio, legendre_p_with, LegendreConvention, LegendreTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    X,
    Y,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::X => f.write_str("X"),
            Family::Y => f.write_str("Y"),
        }
    }
}

/// Address of one basis polynomial: family, degree `n` and order `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    pub family: Family,
    pub n: u32,
    pub m: u32,
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}^{}", self.family, self.n, self.m)
    }
}

impl BasisIndex {
    pub const fn new(family: Family, n: u32, m: u32) -> Self {
        BasisIndex { family, n, m }
    }

    pub const fn x(n: u32, m: u32) -> Self {
        BasisIndex::new(Family::X, n, m)
    }

    pub const fn y(n: u32, m: u32) -> Self {
        BasisIndex::new(Family::Y, n, m)
    }

    pub fn is_valid(&self) -> bool {
        match self.family {
            Family::X => self.m <= self.n + 1,
            Family::Y => self.m >= 1 && self.m <= self.n + 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidIndex(*self))
        }
    }

    pub fn is_hyperholomorphic_constant(&self) -> bool {
        self.m == self.n + 1
    }

    /// Position in the canonical ordering: degrees ascending, within a degree
    /// `X^0..X^{n+1}` then `Y^1..Y^{n+1}`.
    pub fn position(&self) -> usize {
        let n = self.n as usize;
        let base = n * (n + 2);
        match self.family {
            Family::X => base + self.m as usize,
            Family::Y => base + n + 1 + self.m as usize,
        }
    }

    pub fn from_position(pos: usize) -> Self {
        // degree n occupies [n(n+2), (n+1)(n+3))
        let mut n = ((pos as f64 + 1.0).sqrt() - 1.0).floor() as usize;
        while (n + 1) * (n + 3) <= pos {
            n += 1;
        }
        while n * (n + 2) > pos {
            n -= 1;
        }
        let off = pos - n * (n + 2);
        if off <= n + 1 {
            BasisIndex::x(n as u32, off as u32)
        } else {
            BasisIndex::y(n as u32, (off - n - 1) as u32)
        }
    }
}

/// Number of basis polynomials of degree at most `n_max`.
pub fn basis_count(n_max: u32) -> usize {
    let n = n_max as usize + 1;
    n * (n + 2)
}

/// The `2n + 3` indices of degree `n` in canonical order.
pub fn enumerate_basis(n: u32) -> Vec<BasisIndex> {
    (0..=n + 1)
        .map(|m| BasisIndex::x(n, m))
        .chain((1..=n + 1).map(|m| BasisIndex::y(n, m)))
        .collect()
}

/// All indices with degree `≤ n_max` in canonical order.
pub fn enumerate_up_to(n_max: u32) -> Vec<BasisIndex> {
    (0..=n_max).flat_map(enumerate_basis).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub fn from_point(p: Point3) -> Self {
        let r = p.norm();
        let rho = p.x1.hypot(p.x2);
        let theta = if r == 0.0 { 0.0 } else { rho.atan2(p.x0) };
        let phi = if rho == 0.0 { 0.0 } else { p.x2.atan2(p.x1) };
        SphericalPoint { r, theta, phi }
    }

    pub fn to_point(&self) -> Point3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Point3::new(self.r * ct, self.r * st * cp, self.r * st * sp)
    }
}

/// Angular data shared by every basis polynomial at one point.
struct Angles {
    r: f64,
    t: f64,
    phi: f64,
}

impl Angles {
    fn of(p: Point3) -> Self {
        let r = p.norm();
        let rho = p.x1.hypot(p.x2);
        let t = if r == 0.0 {
            1.0
        } else {
            (p.x0 / r).clamp(-1.0, 1.0)
        };
        let phi = if rho == 0.0 { 0.0 } else { p.x2.atan2(p.x1) };
        Angles { r, t, phi }
    }
}

/// Assembles one polynomial from the three Legendre values it needs.
/// `p_lo` is ignored when its prefactor `(n+m+1)(n+m)` vanishes.
#[allow(clippy::too_many_arguments)]
fn assemble(
    idx: BasisIndex,
    rn: f64,
    p_mid: f64,
    p_hi: f64,
    p_lo: impl FnOnce() -> f64,
    cos: impl Fn(i32) -> f64,
    sin: impl Fn(i32) -> f64,
) -> ReducedQuaternion {
    let n = idx.n as f64;
    let m = idx.m as i32;
    let mf = idx.m as f64;
    let lead = 0.5 * (n + mf + 1.0) * p_mid;
    let hi = 0.25 * p_hi;
    let weight = (n + mf + 1.0) * (n + mf);
    let lo = if weight == 0.0 {
        0.0
    } else {
        0.25 * weight * p_lo()
    };
    let v = match idx.family {
        Family::X => ReducedQuaternion::new(
            lead * cos(m),
            hi * cos(m + 1) - lo * cos(m - 1),
            hi * sin(m + 1) + lo * sin(m - 1),
        ),
        Family::Y => ReducedQuaternion::new(
            lead * sin(m),
            hi * sin(m + 1) - lo * sin(m - 1),
            -hi * cos(m + 1) - lo * cos(m - 1),
        ),
    };
    v.scale(rn)
}

/// Unnormalized value of the basis polynomial `idx` at `p`.
pub fn eval_basis(idx: BasisIndex, p: Point3) -> Result<ReducedQuaternion> {
    eval_basis_with(LegendreConvention::FERRERS, idx, p)
}

pub fn eval_basis_with(
    conv: LegendreConvention,
    idx: BasisIndex,
    p: Point3,
) -> Result<ReducedQuaternion> {
    idx.validate()?;
    let a = Angles::of(p);
    let m = idx.m as i32;
    let n = idx.n;
    let rn = a.r.powi(n as i32);
    let p_mid = legendre_p_with(conv, n, m, a.t)?;
    let p_hi = legendre_p_with(conv, n, m + 1, a.t)?;
    let lo = || legendre_p_with(conv, n, m - 1, a.t).expect("prefactor guards P_0^-1");
    Ok(assemble(
        idx,
        rn,
        p_mid,
        p_hi,
        lo,
        |k| crate::special::cheb_cos(k, a.phi),
        |k| crate::special::cheb_sin(k, a.phi),
    ))
}

/// Values of every basis polynomial of degree `≤ n_max` at one point.
#[derive(Debug, Clone)]
pub struct BasisFrame {
    n_max: u32,
    values: Vec<ReducedQuaternion>,
}

impl BasisFrame {
    pub fn new(n_max: u32, p: Point3) -> Self {
        Self::with_convention(LegendreConvention::FERRERS, n_max, p)
    }

    pub fn with_convention(conv: LegendreConvention, n_max: u32, p: Point3) -> Self {
        let a = Angles::of(p);
        let table = LegendreTable::with_convention(conv, n_max, a.t);
        // cos/sin of kφ for k in -1..=n_max+2
        let kmax = n_max as i32 + 2;
        let trig: Vec<(f64, f64)> = (-1..=kmax)
            .map(|k| {
                (
                    crate::special::cheb_cos(k, a.phi),
                    crate::special::cheb_sin(k, a.phi),
                )
            })
            .collect();
        let cos = |k: i32| trig[(k + 1) as usize].0;
        let sin = |k: i32| trig[(k + 1) as usize].1;

        let mut values = Vec::with_capacity(basis_count(n_max));
        let mut rn = 1.0;
        for n in 0..=n_max {
            for idx in enumerate_basis(n) {
                let m = idx.m as i32;
                let v = assemble(
                    idx,
                    rn,
                    table.get(n, m),
                    table.get(n, m + 1),
                    || table.get(n, m - 1),
                    cos,
                    sin,
                );
                values.push(v);
            }
            rn *= a.r;
        }
        BasisFrame { n_max, values }
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn get(&self, idx: BasisIndex) -> ReducedQuaternion {
        self.values[idx.position()]
    }

    /// Values in canonical order.
    pub fn values(&self) -> &[ReducedQuaternion] {
        &self.values
    }
}

/// Right-hand side of the pointwise modulus estimate
/// `|B(x)| ≤ (n+1)/2 · √((n+1+m)!/(n+1-m)!) · |x|^n`.
pub fn pointwise_bound(idx: BasisIndex, r: f64) -> Result<f64> {
    idx.validate()?;
    let ratio = factorial_ratio(idx.n, idx.m)?;
    Ok(0.5 * (idx.n as f64 + 1.0) * ratio.sqrt() * r.powi(idx.n as i32))
}

/// Exact hypercomplex derivative `(1/2) D̄` of an unnormalized basis polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hyperderivative {
    Zero,
    Multiple { factor: f64, lower: BasisIndex },
}

pub fn exact_hyperderivative(idx: BasisIndex) -> Result<Hyperderivative> {
    idx.validate()?;
    if idx.n == 0 || idx.is_hyperholomorphic_constant() {
        return Ok(Hyperderivative::Zero);
    }
    Ok(Hyperderivative::Multiple {
        factor: (idx.n + idx.m + 1) as f64,
        lower: BasisIndex::new(idx.family, idx.n - 1, idx.m),
    })
}
