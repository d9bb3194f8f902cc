//! Derivative-free maximization over spheres centred at the origin.
//!
//! Directions come from a golden-ratio (R2) low-discrepancy sequence mapped
//! area-preservingly onto S². The sequence is nested: the first `N` points
//! for `N' > N` samples are the `N` points, so the raw lattice maximum never
//! decreases with the sample count. The best lattice points are then
//! polished by alternating golden-section searches in `θ` and `φ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quaternion::Point3;

// plastic number g solves g³ = g + 1
const PLASTIC: f64 = 1.324_717_957_244_746;

/// Number of lattice candidates handed to the polish step.
const POLISH_STARTS: usize = 4;
const POLISH_ROUNDS: usize = 3;
const GOLDEN_ITERS: usize = 40;

/// The `i`-th lattice direction as `(θ, φ)`.
pub fn lattice_angles(i: usize) -> (f64, f64) {
    let a1 = 1.0 / PLASTIC;
    let a2 = 1.0 / (PLASTIC * PLASTIC);
    let u = (0.5 + a1 * i as f64).fract();
    let v = (0.5 + a2 * i as f64).fract();
    let z = 1.0 - 2.0 * u;
    (z.clamp(-1.0, 1.0).acos(), 2.0 * PI * v - PI)
}

pub fn direction(theta: f64, phi: f64) -> Point3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Point3::new(ct, st * cp, st * sp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereMax {
    /// Largest value found.
    pub value: f64,
    /// Largest value on the raw lattice, before polishing.
    pub lattice_value: f64,
    /// Point where `value` was attained.
    pub argmax: Point3,
    pub n_samples: usize,
    pub radius: f64,
}

fn golden_section_max(mut g: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    let (mut best_x, mut best) = if gc >= gd { (c, gc) } else { (d, gd) };
    for _ in 0..GOLDEN_ITERS {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
            if gc > best {
                best = gc;
                best_x = c;
            }
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
            if gd > best {
                best = gd;
                best_x = d;
            }
        }
    }
    (best_x, best)
}

/// Typical distance between neighbouring points of an `n`-point lattice.
pub fn lattice_spacing(n_samples: usize) -> f64 {
    (4.0 * PI / n_samples.max(1) as f64).sqrt()
}

/// Alternating golden-section searches in `θ` and `φ` within two lattice
/// spacings of `start = (value, θ, φ)`. Only improvements are accepted.
pub fn polish(
    radius: f64,
    spacing: f64,
    start: (f64, f64, f64),
    f: impl Fn(Point3) -> f64,
) -> (f64, f64, f64) {
    let half_width = 2.0 * spacing;
    let (mut v, mut theta, mut phi) = start;
    for _ in 0..POLISH_ROUNDS {
        let lo = (theta - half_width).max(0.0);
        let hi = (theta + half_width).min(PI);
        let (t, vt) = golden_section_max(|t| f(direction(t, phi).scale(radius)), lo, hi);
        if vt > v {
            v = vt;
            theta = t;
        }
        let dphi = (half_width / theta.sin().max(spacing)).min(PI);
        let (p, vp) = golden_section_max(
            |p| f(direction(theta, p).scale(radius)),
            phi - dphi,
            phi + dphi,
        );
        if vp > v {
            v = vp;
            phi = p;
        }
    }
    (v, theta, phi)
}

/// Maximizes `f` over the sphere `|x| = radius` with `n_samples` lattice
/// points plus local polish. The result is a lower estimate of the true max.
pub fn sphere_max(radius: f64, n_samples: usize, f: impl Fn(Point3) -> f64) -> SphereMax {
    if radius == 0.0 || n_samples == 0 {
        let v = f(Point3::ZERO);
        return SphereMax {
            value: v,
            lattice_value: v,
            argmax: Point3::ZERO,
            n_samples,
            radius,
        };
    }
    let mut top: Vec<(f64, f64, f64)> = Vec::with_capacity(POLISH_STARTS + 1);
    for i in 0..n_samples {
        let (theta, phi) = lattice_angles(i);
        let v = f(direction(theta, phi).scale(radius));
        if top.len() < POLISH_STARTS || v > top[top.len() - 1].0 {
            let pos = top.iter().position(|e| v > e.0).unwrap_or(top.len());
            top.insert(pos, (v, theta, phi));
            top.truncate(POLISH_STARTS);
        }
    }
    let lattice_value = top[0].0;
    let (mut best, mut best_theta, mut best_phi) = top[0];

    let spacing = lattice_spacing(n_samples);
    for &(v0, t0, p0) in &top {
        let (v, theta, phi) = polish(radius, spacing, (v0, t0, p0), &f);
        if v > best {
            best = v;
            best_theta = theta;
            best_phi = phi;
        }
    }
    SphereMax {
        value: best,
        lattice_value,
        argmax: direction(best_theta, best_phi).scale(radius),
        n_samples,
        radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_is_on_sphere_and_nested() {
        for i in 0..1000 {
            let (t, p) = lattice_angles(i);
            assert!((direction(t, p).norm() - 1.0).abs() < 1e-15);
        }
        assert_eq!(lattice_angles(17), lattice_angles(17));
    }

    #[test]
    fn lattice_is_roughly_uniform() {
        // mean of x0 and of x0² over the sphere: 0 and 1/3
        let n = 20_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for i in 0..n {
            let (t, p) = lattice_angles(i);
            let d = direction(t, p);
            s1 += d.x1;
            s2 += d.x0 * d.x0;
        }
        assert!((s1 / n as f64).abs() < 1e-3);
        assert!((s2 / n as f64 - 1.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn polish_finds_linear_maximum() {
        // max of a·x on the unit sphere is |a|
        let a = Point3::new(0.3, -0.5, 0.8);
        let m = sphere_max(1.0, 500, |x| x.dot(&a));
        assert!((m.value - a.norm()).abs() < 1e-10, "{m:?}");
        assert!(m.value >= m.lattice_value);
        let m = sphere_max(0.5, 500, |x| x.dot(&a));
        assert!((m.value - 0.5 * a.norm()).abs() < 1e-10);
    }

    #[test]
    fn raw_lattice_max_is_monotone_in_samples() {
        let f = |x: Point3| (3.0 * x.x0).sin() * x.x1 + x.x2 * x.x2;
        let mut prev = f64::NEG_INFINITY;
        for n in [10, 100, 1000, 5000] {
            let m = sphere_max(1.0, n, f);
            assert!(m.lattice_value >= prev);
            prev = m.lattice_value;
        }
    }

    #[test]
    fn zero_radius() {
        let m = sphere_max(0.0, 100, |x| x.x0 + 2.0);
        assert_eq!(m.value, 2.0);
    }
}
