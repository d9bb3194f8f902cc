//! Bohr-type sums, majorant-based radius bisection and the hypercomplex
//! derivative estimate `M((1/2) D̄ f, r) ≤ 8(3r+1)/(1-r)^5 (M_f(1) - |Sc f(0)|)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::basis::{enumerate_basis, pointwise_bound, BasisIndex};
use crate::error::{Error, Result};
use crate::quadrature::{CompensatedSum, NormTable};
use crate::quaternion::Point3;
use crate::series::{hyperderivative_series, max_modulus, MonogenicSeries};
use crate::sphere::sphere_max;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BohrVariant {
    /// `Σ_n |sum of the degree-n terms|`.
    GroupedByDegree,
    /// `Σ |coefficient| · |basis element|` over single terms.
    Termwise,
}

impl BohrVariant {
    /// Published radius the reconstruction is compared against.
    pub fn reference_radius(&self) -> f64 {
        match self {
            BohrVariant::GroupedByDegree => 0.125,
            BohrVariant::Termwise => 0.026,
        }
    }
}

pub fn bohr_sum(
    s: &MonogenicSeries,
    p: Point3,
    variant: BohrVariant,
    nt: &NormTable,
) -> Result<f64> {
    let ev = s.evaluator(nt)?;
    Ok(match variant {
        BohrVariant::GroupedByDegree => ev.eval_by_degree(p).iter().map(|v| v.norm()).sum(),
        BohrVariant::Termwise => ev.term_moduli(p).iter().sum(),
    })
}

/// Maximum of [`bohr_sum`] over the sphere of radius `r`.
pub fn bohr_sup(
    s: &MonogenicSeries,
    r: f64,
    variant: BohrVariant,
    nt: &NormTable,
    n_samples: usize,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1]")));
    }
    let ev = s.evaluator(nt)?;
    let f = |p: Point3| -> f64 {
        match variant {
            BohrVariant::GroupedByDegree => ev.eval_by_degree(p).iter().map(|v| v.norm()).sum(),
            BohrVariant::Termwise => ev.term_moduli(p).iter().sum(),
        }
    };
    Ok(sphere_max(r, n_samples, f).value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorantConfig {
    /// Smallest truncation degree; raised automatically up to the norm table degree.
    pub degree: u32,
    pub tail_tolerance: f64,
    pub bracket_width: f64,
}

impl Default for MajorantConfig {
    fn default() -> Self {
        MajorantConfig {
            degree: 8,
            tail_tolerance: 1e-6,
            bracket_width: 1e-9,
        }
    }
}

/// Coefficient bound times basis bound on the unit sphere, per degree
/// `n = 1..=nt.n_max` (entry `n - 1`).
///
/// Grouped: `√(4π/3) · (Σ_k (bound_k / ‖B_k‖)²)^{1/2}` over all `2n+3` elements.
/// Termwise: `(4π/3) Σ_k K_k · bound_k / ‖B_k‖` over `m ≤ n`, with
/// `K_k = max|Sc B_k| ‖B_k‖ / ‖Sc B_k‖²`.
pub fn degree_bounds(variant: BohrVariant, nt: &NormTable) -> Result<Vec<f64>> {
    let vol = 4.0 * PI / 3.0;
    (1..=nt.n_max)
        .map(|n| {
            let mut acc = 0.0;
            for idx in enumerate_basis(n) {
                let e = nt.entry(idx)?;
                let b = pointwise_bound(idx, 1.0)? / e.l2_norm;
                match variant {
                    BohrVariant::GroupedByDegree => acc += b * b,
                    BohrVariant::Termwise if !idx.is_hyperholomorphic_constant() => {
                        acc += e.sc_max * e.l2_norm / (e.sc_l2_norm * e.sc_l2_norm) * b
                    }
                    BohrVariant::Termwise => {}
                }
            }
            Ok(match variant {
                BohrVariant::GroupedByDegree => vol.sqrt() * acc.sqrt(),
                BohrVariant::Termwise => vol * acc,
            })
        })
        .collect()
}

/// Truncated majorant value with a ratio-test tail estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorantValue {
    pub partial: f64,
    /// `+∞` when the available degrees do not certify a tail below tolerance.
    pub tail: f64,
    pub degree: u32,
}

impl MajorantValue {
    pub fn upper(&self) -> f64 {
        self.partial + self.tail
    }
}

pub fn evaluate_majorant(bounds: &[f64], r: f64, config: &MajorantConfig) -> MajorantValue {
    let mut partial = 0.0;
    let mut rn = 1.0;
    for (i, &d) in bounds.iter().enumerate() {
        let n = i + 1;
        rn *= r;
        partial += rn * d;
        if n < config.degree as usize || n == bounds.len() {
            continue;
        }
        let next = rn * r * bounds[n];
        let q = r * bounds[n] / d;
        if q < 1.0 {
            let tail = next / (1.0 - q);
            if tail < config.tail_tolerance {
                return MajorantValue {
                    partial,
                    tail,
                    degree: n as u32,
                };
            }
        }
    }
    MajorantValue {
        partial,
        tail: f64::INFINITY,
        degree: bounds.len() as u32,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub variant: BohrVariant,
    pub computed_radius: f64,
    pub truncation_degree: u32,
    pub tail_bound: f64,
    pub bracket: (f64, f64),
    pub majorant_lo: f64,
    pub majorant_hi: f64,
    pub majorant_at_radius: f64,
    pub paper_reference_value: f64,
    /// `computed_radius / paper_reference_value`.
    pub ratio: f64,
    pub degree_bounds: Vec<f64>,
    pub norm_table_degree: u32,
    pub config: MajorantConfig,
}

/// Solves `M(r) = 1` by bisection on the upper estimate `partial + tail`.
/// Partial sums bound `M` from below, so a partial sum above one settles
/// the upper end without a tail estimate.
pub fn majorant_radius(
    variant: BohrVariant,
    nt: &NormTable,
    config: &MajorantConfig,
) -> Result<RadiusReport> {
    if config.degree == 0 || config.degree > nt.n_max {
        return Err(Error::Config(format!(
            "truncation degree {} needs a norm table of degree ≥ it (have {})",
            config.degree, nt.n_max
        )));
    }
    let bounds = degree_bounds(variant, nt)?;
    let mut lo = 0.0;
    let mut hi = [0.5, 0.9, 0.99]
        .into_iter()
        .find(|&r| evaluate_majorant(&bounds, r, config).partial > 1.0)
        .ok_or_else(|| {
            Error::Bisection(format!("{variant:?}: majorant stays below 1 on (0, 0.99]"))
        })?;

    while hi - lo > config.bracket_width {
        let mid = 0.5 * (lo + hi);
        let v = evaluate_majorant(&bounds, mid, config);
        if v.partial > 1.0 {
            hi = mid;
        } else if v.tail.is_finite() {
            if v.upper() < 1.0 {
                lo = mid;
            } else {
                // root lies within the tail estimate of `mid`
                hi = mid;
            }
        } else {
            return Err(Error::Config(format!(
                "tail not below {} at r = {mid} with degrees up to {}; raise the truncation",
                config.tail_tolerance, nt.n_max
            )));
        }
    }

    let at_hi = evaluate_majorant(&bounds, hi, config);
    if !at_hi.tail.is_finite() {
        return Err(Error::Config(format!(
            "tail not below {} at r = {hi}; raise the truncation above {}",
            config.tail_tolerance, nt.n_max
        )));
    }
    let at_lo = evaluate_majorant(&bounds, lo, config);
    if !(at_lo.upper() < 1.0 && at_hi.upper() >= 1.0) {
        return Err(Error::Bisection(format!(
            "bracket [{lo}, {hi}] does not straddle 1: {} / {}",
            at_lo.upper(),
            at_hi.upper()
        )));
    }
    let radius = 0.5 * (lo + hi);
    let at_radius = evaluate_majorant(&bounds, radius, config);
    let reference = variant.reference_radius();
    Ok(RadiusReport {
        variant,
        computed_radius: radius,
        truncation_degree: at_hi.degree,
        tail_bound: at_hi.tail,
        bracket: (lo, hi),
        majorant_lo: at_lo.upper(),
        majorant_hi: at_hi.upper(),
        majorant_at_radius: at_radius.upper(),
        paper_reference_value: reference,
        ratio: radius / reference,
        degree_bounds: bounds,
        norm_table_degree: nt.n_max,
        config: *config,
    })
}

fn check_radius(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1)")));
    }
    Ok(())
}

/// `8(3r+1)/(1-r)^5 · (M1 - |sc0|)`.
pub fn derivative_bound_rhs(r: f64, m1: f64, sc0: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(8.0 * (3.0 * r + 1.0) / (1.0 - r).powi(5) * (m1 - sc0.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum {
    pub sum: f64,
    /// Ratio-test bound on the neglected terms, `+∞` if not yet decreasing.
    pub remainder: f64,
    pub terms: u32,
}

fn derivative_series_term(n: u32, r: f64) -> f64 {
    let nf = n as f64;
    nf * nf * (nf + 1.0) * (nf + 2.0) * r.powi(n as i32 - 1)
}

/// `(4/3) Σ_{n=1}^{N} r^{n-1} n² (n+1) (n+2)`.
pub fn derivative_series_sum(r: f64, n_terms: u32) -> Result<SeriesSum> {
    check_radius(r)?;
    let mut acc = CompensatedSum::default();
    for n in 1..=n_terms {
        acc.add(derivative_series_term(n, r));
    }
    // t_{n+1} / t_n = r (n+1)(n+3) / n², decreasing in n
    let n = n_terms.max(1) as f64 + 1.0;
    let q = r * (n + 1.0) * (n + 3.0) / (n * n);
    let remainder = if r == 0.0 {
        0.0
    } else if q < 1.0 {
        4.0 * derivative_series_term(n_terms + 1, r) / (3.0 * (1.0 - q))
    } else {
        f64::INFINITY
    };
    Ok(SeriesSum {
        sum: 4.0 * acc.value() / 3.0,
        remainder,
        terms: n_terms,
    })
}

/// `(1/√(2π)) Σ_n √(2n+3) n r^{n-1} [√(n+1)|a_n^0| + Σ_{m=1}^{n} √(((n+1)²-m²)/(n+1)) (|a_n^m| + |b_n^m|)]`
/// over the non-constant part of `s`.
pub fn derivative_coefficient_majorant(s: &MonogenicSeries, r: f64) -> f64 {
    let mut total = 0.0;
    for n in 1..=s.n_max() {
        let nf = n as f64;
        let mut inner = (nf + 1.0).sqrt() * s.get(BasisIndex::x(n, 0)).abs();
        for m in 1..=n {
            let mf = m as f64;
            let w = (((nf + 1.0).powi(2) - mf * mf) / (nf + 1.0)).sqrt();
            inner += w * (s.get(BasisIndex::x(n, m)).abs() + s.get(BasisIndex::y(n, m)).abs());
        }
        total += (2.0 * nf + 3.0).sqrt() * nf * r.powi(n as i32 - 1) * inner;
    }
    total / (2.0 * PI).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    /// Present when `s` is orthogonal to the hyperholomorphic constants.
    pub rhs_with_f0: Option<f64>,
    pub slack_with_f0: Option<f64>,
    pub holds_with_f0: Option<bool>,
    pub coefficient_majorant: f64,
    pub holds_coefficient_majorant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub m1: f64,
    pub sc0: f64,
    pub f0_modulus: f64,
    pub orthogonal: bool,
    pub n_sphere_samples: usize,
    pub rows: Vec<BoundRow>,
    /// Failures of the final estimate, both forms counted.
    pub violations: usize,
    pub coefficient_majorant_violations: usize,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.violations == 0
    }
}

pub fn verify_derivative_bound(
    s: &MonogenicSeries,
    r_grid: &[f64],
    nt: &NormTable,
    n_samples: usize,
) -> Result<BoundReport> {
    for &r in r_grid {
        check_radius(r)?;
    }
    let m1 = max_modulus(s, nt, 1.0, n_samples)?.value;
    let f0 = s.evaluator(nt)?.eval(Point3::ZERO);
    let orthogonal = s.is_orthogonal_to_hyperholomorphic_constants();
    let derivative = hyperderivative_series(s, nt)?;

    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let lhs = max_modulus(&derivative, nt, r, n_samples)?.value;
        let rhs = derivative_bound_rhs(r, m1, f0.x0)?;
        let rhs_with_f0 = if orthogonal {
            Some(derivative_bound_rhs(r, m1, f0.norm())?)
        } else {
            None
        };
        let coefficient_majorant = derivative_coefficient_majorant(s, r);
        rows.push(BoundRow {
            r,
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: lhs <= rhs,
            rhs_with_f0,
            slack_with_f0: rhs_with_f0.map(|c| c - lhs),
            holds_with_f0: rhs_with_f0.map(|c| lhs <= c),
            coefficient_majorant,
            holds_coefficient_majorant: lhs <= coefficient_majorant * (1.0 + 1e-12),
        });
    }
    let violations = rows
        .iter()
        .map(|row| usize::from(!row.holds) + usize::from(row.holds_with_f0 == Some(false)))
        .sum();
    let coefficient_majorant_violations = rows
        .iter()
        .filter(|row| !row.holds_coefficient_majorant)
        .count();
    Ok(BoundReport {
        m1,
        sc0: f0.x0.abs(),
        f0_modulus: f0.norm(),
        orthogonal,
        n_sphere_samples: n_samples,
        rows,
        violations,
        coefficient_majorant_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::eval_basis;
    use crate::quadrature::{norm_table_with_samples, BallRule};
    use crate::series::{evaluate, sample_random, Constraint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    fn table() -> &'static NormTable {
        static CELL: OnceLock<NormTable> = OnceLock::new();
        CELL.get_or_init(|| norm_table_with_samples(12, &BallRule::default_rule(), 5000).unwrap())
    }

    fn random_point(rng: &mut impl Rng) -> Point3 {
        loop {
            let p = Point3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if p.norm() <= 1.0 {
                return p;
            }
        }
    }

    #[test]
    fn single_term_variants_agree() {
        let nt = table();
        let s = MonogenicSeries::single(2, BasisIndex::x(1, 0), 1.0).unwrap();
        let p = Point3::new(0.3, -0.2, 0.5);
        let want = eval_basis(BasisIndex::x(1, 0), p).unwrap().norm()
            / nt.l2_norm(BasisIndex::x(1, 0)).unwrap();
        for v in [BohrVariant::GroupedByDegree, BohrVariant::Termwise] {
            assert!((bohr_sum(&s, p, v, nt).unwrap() - want).abs() < 1e-14);
        }
        let zero = MonogenicSeries::zeros(3);
        assert_eq!(bohr_sum(&zero, p, BohrVariant::Termwise, nt).unwrap(), 0.0);
    }

    #[test]
    fn termwise_dominates_grouped() {
        let nt = table();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..20 {
            let s = sample_random(seed, 5, Constraint::None, 1.0, nt).unwrap();
            for _ in 0..5 {
                let p = random_point(&mut rng);
                let g = bohr_sum(&s, p, BohrVariant::GroupedByDegree, nt).unwrap();
                let t = bohr_sum(&s, p, BohrVariant::Termwise, nt).unwrap();
                assert!(t >= g * (1.0 - 1e-14));
                assert!(g >= evaluate(&s, nt, p).unwrap().norm() * (1.0 - 1e-14));
            }
        }
    }

    #[test]
    fn bohr_sup_examples() {
        let nt = table();
        let s = sample_random(2, 4, Constraint::ZeroAtOrigin, 1.0, nt).unwrap();
        assert_eq!(
            bohr_sup(&s, 0.0, BohrVariant::GroupedByDegree, nt, 100).unwrap(),
            0.0
        );
        let a = bohr_sup(&s, 0.1, BohrVariant::GroupedByDegree, nt, 2000).unwrap();
        let b = bohr_sup(&s, 0.2, BohrVariant::GroupedByDegree, nt, 2000).unwrap();
        assert!(a <= b);
        assert!(bohr_sup(&s, 0.125, BohrVariant::GroupedByDegree, nt, 2000).unwrap() < 1.0);
        assert!(bohr_sup(&s, 1.2, BohrVariant::Termwise, nt, 10).is_err());
    }

    #[test]
    fn majorant_roots() {
        let nt = table();
        let config = MajorantConfig::default();
        for v in [BohrVariant::GroupedByDegree, BohrVariant::Termwise] {
            let rep = majorant_radius(v, nt, &config).unwrap();
            assert!(rep.computed_radius > 0.0);
            assert!((rep.majorant_at_radius - 1.0).abs() < 1e-6, "{rep:?}");
            assert!(rep.majorant_lo < 1.0 && rep.majorant_hi >= 1.0);
            assert!(rep.tail_bound < 1e-6);
            assert!(rep.bracket.1 - rep.bracket.0 <= 1e-6);
            assert_eq!(rep.paper_reference_value, v.reference_radius());
        }
    }

    #[test]
    fn majorant_is_increasing() {
        let bounds = degree_bounds(BohrVariant::GroupedByDegree, table()).unwrap();
        let config = MajorantConfig::default();
        let mut prev = 0.0;
        for i in 1..20 {
            let v = evaluate_majorant(&bounds, i as f64 * 0.01, &config).partial;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn majorant_needs_degrees() {
        let nt = norm_table_with_samples(3, &BallRule::default_rule(), 200).unwrap();
        let config = MajorantConfig {
            degree: 3,
            ..MajorantConfig::default()
        };
        assert!(matches!(
            majorant_radius(BohrVariant::GroupedByDegree, &nt, &config),
            Err(Error::Config(_))
        ));
        let config = MajorantConfig {
            degree: 5,
            ..MajorantConfig::default()
        };
        assert!(majorant_radius(BohrVariant::Termwise, &nt, &config).is_err());
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(derivative_bound_rhs(0.0, 1.0, 0.0).unwrap(), 8.0);
        assert!((derivative_bound_rhs(0.5, 1.0, 0.0).unwrap() - 640.0).abs() < 1e-12);
        assert_eq!(derivative_bound_rhs(0.3, 0.7, -0.7).unwrap(), 0.0);
        assert!(matches!(
            derivative_bound_rhs(1.0, 1.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn series_sum_examples() {
        let s = derivative_series_sum(0.0, 1000).unwrap();
        assert_eq!(s.sum, 8.0);
        let s = derivative_series_sum(0.5, 400).unwrap();
        assert!((s.sum - 640.0).abs() < 1e-9);
        assert!(s.remainder < 1e-9);
        let mut prev = 0.0;
        for n in 1..60 {
            let v = derivative_series_sum(0.7, n).unwrap().sum;
            assert!(v >= prev);
            prev = v;
        }
        assert!(derivative_series_sum(0.9, 3)
            .unwrap()
            .remainder
            .is_infinite());
    }

    #[test]
    fn derivative_bound_examples() {
        let nt = table();
        let c = MonogenicSeries::single(4, BasisIndex::x(0, 0), 1.0).unwrap();
        let rep = verify_derivative_bound(&c, &[0.1, 0.5], nt, 500).unwrap();
        assert!(rep.all_hold());
        assert!(rep.rows.iter().all(|r| r.lhs == 0.0));

        for seed in 0..5 {
            let s = sample_random(seed, 5, Constraint::OrthogonalToHholo, 1.0, nt).unwrap();
            let rep = verify_derivative_bound(&s, &[0.1, 0.5, 0.9], nt, 2000).unwrap();
            assert!(rep.orthogonal);
            assert!(rep.all_hold(), "{rep:?}");
            assert_eq!(rep.coefficient_majorant_violations, 0);
        }
        assert!(verify_derivative_bound(&c, &[1.0], nt, 10).is_err());
    }

    #[test]
    fn coefficient_majorant_is_per_term_sharp() {
        // for a single term the majorant equals the exact derivative modulus
        // bound on the sphere, which the basis attains at its extremal point
        let nt = table();
        let s = MonogenicSeries::single(2, BasisIndex::x(1, 0), 1.0).unwrap();
        let d = hyperderivative_series(&s, nt).unwrap();
        let lhs = max_modulus(&d, nt, 0.4, 200).unwrap().value;
        let maj = derivative_coefficient_majorant(&s, 0.4);
        assert!(lhs <= maj * (1.0 + 1e-12));
    }
}
