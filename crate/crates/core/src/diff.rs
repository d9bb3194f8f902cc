//! Central-difference approximations of the Cauchy–Riemann operators
//! `D = ∂0 + e1 ∂1 + e2 ∂2`, `D̄ = ∂0 - e1 ∂1 - e2 ∂2` and of the Riesz
//! system `div f̄ = 0, curl f̄ = 0`.
//!
//! Every stencil must stay inside the open unit ball: `|p| + h < 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::{FieldFn, Point3, Quaternion};

pub const DEFAULT_STEP: f64 = 1e-5;

fn check_stencil(p: Point3, reach: f64) -> Result<()> {
    if reach.is_nan() || reach <= 0.0 {
        return Err(Error::Domain(format!(
            "finite-difference step {reach} must be positive"
        )));
    }
    if p.norm() + reach >= 1.0 {
        return Err(Error::Domain(format!(
            "stencil of reach {reach} around |p| = {} leaves the unit ball",
            p.norm()
        )));
    }
    Ok(())
}

/// Central differences `∂_i f(p)` for an `H`-valued map, `i = 0, 1, 2`.
fn partials<F>(f: &F, p: Point3, h: f64) -> [Quaternion; 3]
where
    F: Fn(Point3) -> Quaternion + ?Sized,
{
    let mut out = [Quaternion::ZERO; 3];
    for (i, d) in out.iter_mut().enumerate() {
        let step = Point3::axis(i).scale(h);
        *d = (f(p + step) - f(p - step)).scale(0.5 / h);
    }
    out
}

fn cauchy_riemann<F>(f: &F, p: Point3, h: f64, sign: f64) -> Quaternion
where
    F: Fn(Point3) -> Quaternion + ?Sized,
{
    let [d0, d1, d2] = partials(f, p, h);
    d0 + (Quaternion::E1 * d1).scale(sign) + (Quaternion::E2 * d2).scale(sign)
}

/// `D f(p)` for an `H`-valued map.
pub fn d_quaternion<F>(f: &F, p: Point3, h: f64) -> Result<Quaternion>
where
    F: Fn(Point3) -> Quaternion + ?Sized,
{
    check_stencil(p, h)?;
    Ok(cauchy_riemann(f, p, h, 1.0))
}

/// `D̄ f(p)` for an `H`-valued map.
pub fn dbar_quaternion<F>(f: &F, p: Point3, h: f64) -> Result<Quaternion>
where
    F: Fn(Point3) -> Quaternion + ?Sized,
{
    check_stencil(p, h)?;
    Ok(cauchy_riemann(f, p, h, -1.0))
}

/// Central-difference `D f(p)`. The result lives in `H`; its `e3` part is
/// the `-curl` component along `x0` and is nonzero for non-monogenic `f`.
pub fn apply_d_fd(f: &impl FieldFn, p: Point3, h: f64) -> Result<Quaternion> {
    d_quaternion(&|q: Point3| Quaternion::from(f.eval(q)), p, h)
}

pub fn apply_dbar_fd(f: &impl FieldFn, p: Point3, h: f64) -> Result<Quaternion> {
    dbar_quaternion(&|q: Point3| Quaternion::from(f.eval(q)), p, h)
}

/// Central-difference hypercomplex derivative `(1/2) D̄ f(p)`.
pub fn apply_hyperderivative_fd(f: &impl FieldFn, p: Point3, h: f64) -> Result<Quaternion> {
    Ok(apply_dbar_fd(f, p, h)?.scale(0.5))
}

/// Componentwise 7-point Laplacian.
pub fn laplacian_fd<F>(f: &F, p: Point3, h: f64) -> Result<Quaternion>
where
    F: Fn(Point3) -> Quaternion + ?Sized,
{
    check_stencil(p, h)?;
    let center = f(p).scale(-6.0);
    let mut acc = center;
    for i in 0..3 {
        let step = Point3::axis(i).scale(h);
        acc += f(p + step) + f(p - step);
    }
    Ok(acc.scale(1.0 / (h * h)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszResidual {
    pub div: f64,
    pub curl: [f64; 3],
}

impl RieszResidual {
    /// Euclidean size of `(div, curl)`.
    pub fn magnitude(&self) -> f64 {
        let [a, b, c] = self.curl;
        (self.div * self.div + a * a + b * b + c * c).sqrt()
    }
}

/// `div f̄` and `curl f̄` of the vector field `f̄ = (f0, -f1, -f2)`.
pub fn riesz_residual(f: &impl FieldFn, p: Point3, h: f64) -> Result<RieszResidual> {
    check_stencil(p, h)?;
    let g = |q: Point3| Quaternion::from(f.eval(q));
    let [d0, d1, d2] = partials(&g, p, h);
    // columns: ∂_j of (f0, f1, f2)
    let div = d0.a0 - d1.a1 - d2.a2;
    let curl = [
        -d1.a2 + d2.a1, // ∂1(-f2) - ∂2(-f1)
        d2.a0 + d0.a2,  // ∂2 f0 - ∂0(-f2)
        -d0.a1 - d1.a0, // ∂0(-f1) - ∂1 f0
    ];
    Ok(RieszResidual { div, curl })
}

/// Residuals at step `h` and `h/2` and the observed order
/// `log2(r(h) / r(h/2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub h: f64,
    pub residual: f64,
    pub residual_half: f64,
    pub order: f64,
}

impl Convergence {
    /// True when the residual at `h` sits at round-off level, where an
    /// observed order carries no information.
    pub fn at_noise_floor(&self, floor: f64) -> bool {
        self.residual <= floor
    }
}

pub fn step_halving<E>(
    h: f64,
    mut residual: impl FnMut(f64) -> std::result::Result<f64, E>,
) -> std::result::Result<Convergence, E> {
    let r1 = residual(h)?;
    let r2 = residual(0.5 * h)?;
    Ok(Convergence {
        h,
        residual: r1,
        residual_half: r2,
        order: (r1 / r2).log2(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{eval_basis, BasisIndex};
    use crate::quaternion::ReducedQuaternion;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn coordinate_fields() {
        let p = Point3::new(0.1, -0.2, 0.3);
        let x0 = |q: Point3| ReducedQuaternion::new(q.x0, 0.0, 0.0);
        let x1 = |q: Point3| ReducedQuaternion::new(q.x1, 0.0, 0.0);
        assert!(close(
            apply_d_fd(&x0, p, DEFAULT_STEP).unwrap(),
            Quaternion::ONE,
            1e-9
        ));
        assert!(close(
            apply_d_fd(&x1, p, DEFAULT_STEP).unwrap(),
            Quaternion::E1,
            1e-9
        ));
    }

    #[test]
    fn basis_is_monogenic() {
        let p = Point3::new(0.2, 0.1, -0.4);
        let f = |q: Point3| eval_basis(BasisIndex::x(1, 0), q).unwrap();
        assert!(apply_d_fd(&f, p, DEFAULT_STEP).unwrap().norm() < 1e-9);
    }

    #[test]
    fn hyperderivative_examples() {
        let p = Point3::new(-0.3, 0.25, 0.1);
        let c = |_: Point3| ReducedQuaternion::new(0.4, -1.0, 2.0);
        assert_eq!(
            apply_hyperderivative_fd(&c, p, DEFAULT_STEP).unwrap(),
            Quaternion::ZERO
        );

        let x10 = |q: Point3| eval_basis(BasisIndex::x(1, 0), q).unwrap();
        let d = apply_hyperderivative_fd(&x10, p, DEFAULT_STEP).unwrap();
        assert!(close(d, Quaternion::ONE, 1e-9));

        for n in 0..3 {
            let hc = |q: Point3| eval_basis(BasisIndex::y(n, n + 1), q).unwrap();
            assert!(apply_hyperderivative_fd(&hc, p, 1e-4).unwrap().norm() < 1e-6);
        }
    }

    #[test]
    fn riesz_examples() {
        let p = Point3::new(0.1, 0.2, 0.3);
        let e1 = |_: Point3| ReducedQuaternion::new(0.0, 1.0, 0.0);
        let r = riesz_residual(&e1, p, DEFAULT_STEP).unwrap();
        assert_eq!(
            r,
            RieszResidual {
                div: 0.0,
                curl: [0.0; 3]
            }
        );

        let x21 = |q: Point3| eval_basis(BasisIndex::x(2, 1), q).unwrap();
        assert!(riesz_residual(&x21, p, 1e-4).unwrap().magnitude() < 1e-6);

        // f̄ = (x1, 0, 0): div = 0, curl = (0, 0, -1)
        let s = |q: Point3| ReducedQuaternion::new(q.x1, 0.0, 0.0);
        let r = riesz_residual(&s, p, DEFAULT_STEP).unwrap();
        assert!(r.div.abs() < 1e-9);
        assert!((r.curl[2] + 1.0).abs() < 1e-9 && r.curl[0].abs() < 1e-9 && r.curl[1].abs() < 1e-9);
    }

    #[test]
    fn riesz_matches_cauchy_riemann_components() {
        let p = Point3::new(0.3, -0.1, 0.2);
        let f = |q: Point3| ReducedQuaternion::new(q.x0 * q.x1, q.x2 * q.x2, q.x0 - q.x1 * q.x2);
        let d = apply_d_fd(&f, p, 1e-4).unwrap();
        let r = riesz_residual(&f, p, 1e-4).unwrap();
        assert!((d.a0 - r.div).abs() < 1e-12);
        assert!((d.a3 + r.curl[0]).abs() < 1e-12);
        assert!((d.a2 - r.curl[1]).abs() < 1e-12);
        assert!((d.a1 + r.curl[2]).abs() < 1e-12);
    }

    #[test]
    fn stencil_must_stay_inside() {
        let f = |q: Point3| q;
        assert!(matches!(
            apply_d_fd(&f, Point3::new(0.99999, 0.0, 0.0), 1e-4),
            Err(Error::Domain(_))
        ));
        assert!(apply_d_fd(&f, Point3::ZERO, 0.0).is_err());
        assert!(riesz_residual(&f, Point3::new(0.0, 0.0, 1.0), 1e-5).is_err());
    }

    #[test]
    fn laplacian_factorizes() {
        // D(D̄ f) = Δ f for a smooth non-harmonic field
        let f = |q: Point3| {
            Quaternion::new(
                (q.x0 * 1.3).sin() * q.x1,
                (q.x1 * q.x2).exp(),
                q.x0 * q.x0 * q.x2,
                0.0,
            )
        };
        let p = Point3::new(0.2, -0.3, 0.1);
        let mut errs = Vec::new();
        for h in [2e-3, 1e-3] {
            let dbar = |q: Point3| dbar_quaternion(&f, q, h).unwrap();
            let comp = d_quaternion(&dbar, p, h).unwrap();
            let lap = laplacian_fd(&f, p, h).unwrap();
            errs.push((comp - lap).norm());
        }
        assert!(errs[0] < 1e-5 && errs[1] < errs[0] / 3.0, "{errs:?}");
    }

    #[test]
    fn observed_order_is_two() {
        let f = |q: Point3| eval_basis(BasisIndex::x(4, 2), q).unwrap();
        let p = Point3::new(0.3, 0.2, -0.4);
        let conv = step_halving(1e-3, |h| apply_d_fd(&f, p, h).map(|d| d.norm())).unwrap();
        assert!(conv.order > 1.9 && conv.order < 2.1, "{conv:?}");
    }
}
