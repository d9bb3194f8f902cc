//! Finite Fourier expansions in the normalized monogenic system.
//!
//! A [`MonogenicSeries`] stores real coefficients `a_n^m` (family X) and
//! `b_n^m` (family Y) with respect to `B* = B / ‖B‖`. Evaluation needs the
//! norms, so most operations take a [`NormTable`].

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::basis::{basis_count, enumerate_up_to, BasisFrame, BasisIndex, Family, Hyperderivative};
use crate::error::{Error, Result};
use crate::quadrature::{BallRule, CompensatedSum, NormTable};
use crate::quaternion::{FieldFn, Point3, ReducedQuaternion};
use crate::sphere::sphere_max;

/// Safety factor applied on top of a sampled sup norm when rescaling.
pub const SUP_MARGIN: f64 = 1e-3;

/// Lattice size for sup-norm estimates on the unit sphere.
pub const SUP_SAMPLES: usize = 20_000;

/// `2 √(π/3)`, the `L2(B)` norm of the constant function 1.
pub fn two_sqrt_pi_over_3() -> f64 {
    2.0 * (PI / 3.0).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonogenicSeries {
    n_max: u32,
    coeffs: Vec<f64>,
}

impl MonogenicSeries {
    pub fn zeros(n_max: u32) -> Self {
        MonogenicSeries {
            n_max,
            coeffs: vec![0.0; basis_count(n_max)],
        }
    }

    /// Coefficients in canonical basis order.
    pub fn from_coefficients(n_max: u32, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis_count(n_max) {
            return Err(Error::Config(format!(
                "degree {n_max} needs {} coefficients, got {}",
                basis_count(n_max),
                coeffs.len()
            )));
        }
        Ok(MonogenicSeries { n_max, coeffs })
    }

    pub fn single(n_max: u32, idx: BasisIndex, value: f64) -> Result<Self> {
        let mut s = Self::zeros(n_max);
        s.set(idx, value)?;
        Ok(s)
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    fn check(&self, idx: BasisIndex) -> Result<()> {
        idx.validate()?;
        if idx.n > self.n_max {
            return Err(Error::OutOfRange(format!(
                "{idx} beyond series degree {}",
                self.n_max
            )));
        }
        Ok(())
    }

    pub fn get(&self, idx: BasisIndex) -> f64 {
        if !idx.is_valid() || idx.n > self.n_max {
            return 0.0;
        }
        self.coeffs[idx.position()]
    }

    pub fn set(&mut self, idx: BasisIndex, value: f64) -> Result<()> {
        self.check(idx)?;
        self.coeffs[idx.position()] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (BasisIndex, f64)> + '_ {
        enumerate_up_to(self.n_max)
            .into_iter()
            .zip(self.coeffs.iter().copied())
    }

    pub fn scale(&self, s: f64) -> Self {
        MonogenicSeries {
            n_max: self.n_max,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Sum of squared coefficients, i.e. `‖f‖²` by orthonormality.
    pub fn coefficient_norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// True when every `m = n + 1` coefficient vanishes, degree 0 included.
    pub fn is_orthogonal_to_hyperholomorphic_constants(&self) -> bool {
        self.iter()
            .all(|(idx, c)| !idx.is_hyperholomorphic_constant() || c == 0.0)
    }

    /// Coefficients divided by the basis norms, ready to multiply
    /// unnormalized basis values.
    fn unnormalized_weights(&self, nt: &NormTable) -> Result<Vec<f64>> {
        if self.n_max > nt.n_max {
            return Err(Error::MissingNorm(BasisIndex::x(self.n_max, 0)));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&nt.entries)
            .map(|(c, e)| c / e.l2_norm)
            .collect())
    }

    /// Bind the series to a norm table for repeated evaluation.
    pub fn evaluator<'a>(&'a self, nt: &NormTable) -> Result<SeriesEvaluator<'a>> {
        Ok(SeriesEvaluator {
            series: self,
            weights: self.unnormalized_weights(nt)?,
        })
    }
}

/// A series with its coefficients pre-divided by the basis norms.
#[derive(Debug, Clone)]
pub struct SeriesEvaluator<'a> {
    series: &'a MonogenicSeries,
    weights: Vec<f64>,
}

impl SeriesEvaluator<'_> {
    pub fn eval(&self, p: Point3) -> ReducedQuaternion {
        let frame = BasisFrame::new(self.series.n_max, p);
        let mut acc = ReducedQuaternion::ZERO;
        for (v, &w) in frame.values().iter().zip(&self.weights) {
            if w != 0.0 {
                acc += v.scale(w);
            }
        }
        acc
    }

    /// The homogeneous component of each degree `0..=n_max` at `p`.
    pub fn eval_by_degree(&self, p: Point3) -> Vec<ReducedQuaternion> {
        let frame = BasisFrame::new(self.series.n_max, p);
        let mut out = vec![ReducedQuaternion::ZERO; self.series.n_max as usize + 1];
        for (k, (v, &w)) in frame.values().iter().zip(&self.weights).enumerate() {
            if w != 0.0 {
                out[BasisIndex::from_position(k).n as usize] += v.scale(w);
            }
        }
        out
    }

    /// `|c_k| · |B*_k(p)|` for every stored term.
    pub fn term_moduli(&self, p: Point3) -> Vec<f64> {
        let frame = BasisFrame::new(self.series.n_max, p);
        frame
            .values()
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| (w * v.norm()).abs())
            .collect()
    }
}

impl FieldFn for SeriesEvaluator<'_> {
    fn eval(&self, p: Point3) -> ReducedQuaternion {
        SeriesEvaluator::eval(self, p)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesEntry {
    family: Family,
    n: u32,
    m: u32,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    n_max: u32,
    entries: Vec<SeriesEntry>,
}

impl Serialize for MonogenicSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .iter()
            .map(|(idx, value)| SeriesEntry {
                family: idx.family,
                n: idx.n,
                m: idx.m,
                value,
            })
            .collect();
        SeriesRepr {
            n_max: self.n_max,
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MonogenicSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SeriesRepr::deserialize(deserializer)?;
        let mut s = MonogenicSeries::zeros(repr.n_max);
        for e in repr.entries {
            s.set(BasisIndex::new(e.family, e.n, e.m), e.value)
                .map_err(D::Error::custom)?;
        }
        Ok(s)
    }
}

pub fn evaluate(s: &MonogenicSeries, nt: &NormTable, p: Point3) -> Result<ReducedQuaternion> {
    Ok(s.evaluator(nt)?.eval(p))
}

/// Coefficients `<B*_k, f>` for all `k` up to degree `n_max`.
pub fn project(
    f: &impl FieldFn,
    n_max: u32,
    nt: &NormTable,
    rule: &BallRule,
) -> Result<MonogenicSeries> {
    rule.require_exactness(2 * n_max)?;
    if n_max > nt.n_max {
        return Err(Error::MissingNorm(BasisIndex::x(n_max, 0)));
    }
    let count = basis_count(n_max);
    let mut acc = vec![CompensatedSum::default(); count];
    for (&p, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fp = f.eval(p);
        let frame = BasisFrame::new(n_max, p);
        for (a, v) in acc.iter_mut().zip(frame.values()) {
            a.add(w * v.dot(&fp));
        }
    }
    let coeffs = acc
        .iter()
        .zip(&nt.entries)
        .map(|(a, e)| a.value() / e.l2_norm)
        .collect();
    MonogenicSeries::from_coefficients(n_max, coeffs)
}

/// `f = f(0) + g + h` with `g` the terms `n ≥ 1, m ≤ n` and `h` the
/// hyperholomorphic constants `n ≥ 1, m = n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub constant: ReducedQuaternion,
    pub main: MonogenicSeries,
    pub hyperholomorphic: MonogenicSeries,
}

pub fn decompose(s: &MonogenicSeries, nt: &NormTable) -> Result<Decomposition> {
    let constant = evaluate(s, nt, Point3::ZERO)?;
    let mut main = MonogenicSeries::zeros(s.n_max);
    let mut hyperholomorphic = MonogenicSeries::zeros(s.n_max);
    for (idx, c) in s.iter() {
        if idx.n == 0 {
            continue;
        }
        if idx.is_hyperholomorphic_constant() {
            hyperholomorphic.set(idx, c)?;
        } else {
            main.set(idx, c)?;
        }
    }
    Ok(Decomposition {
        constant,
        main,
        hyperholomorphic,
    })
}

/// Sampled `M(f, r) = max_{|x| = r} |f(x)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNormEstimate {
    pub value: f64,
    pub n_sphere_samples: usize,
    pub radius: f64,
}

pub fn max_modulus(
    s: &MonogenicSeries,
    nt: &NormTable,
    r: f64,
    n_samples: usize,
) -> Result<SupNormEstimate> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1]")));
    }
    let ev = s.evaluator(nt)?;
    let m = sphere_max(r, n_samples, |p| ev.eval(p).norm());
    Ok(SupNormEstimate {
        value: m.value,
        n_sphere_samples: n_samples,
        radius: r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    None,
    /// All degree-0 coefficients vanish, so `f(0) = 0`.
    ZeroAtOrigin,
    /// Every `m = n + 1` coefficient vanishes (the `e1`, `e2` constants of
    /// degree 0 included); `a_0^0` stays free, so `f(0)` is real.
    OrthogonalToHholo,
}

impl Constraint {
    pub fn allows(&self, idx: BasisIndex) -> bool {
        match self {
            Constraint::None => true,
            Constraint::ZeroAtOrigin => idx.n > 0,
            Constraint::OrthogonalToHholo => !idx.is_hyperholomorphic_constant(),
        }
    }
}

/// Seeded random series, rescaled so that the sampled sup norm on the unit
/// sphere times `1 + SUP_MARGIN` equals `target_sup`.
pub fn sample_random(
    seed: u64,
    n_max: u32,
    constraint: Constraint,
    target_sup: f64,
    nt: &NormTable,
) -> Result<MonogenicSeries> {
    if target_sup.is_nan() || target_sup <= 0.0 {
        return Err(Error::Config(format!(
            "target sup {target_sup} must be positive"
        )));
    }
    let free = enumerate_up_to(n_max)
        .iter()
        .filter(|i| constraint.allows(**i))
        .count();
    if free == 0 {
        return Err(Error::Config(format!(
            "{constraint:?} leaves no free coefficient at degree {n_max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let coeffs: Vec<f64> = enumerate_up_to(n_max)
            .into_iter()
            .map(|idx| {
                let c: f64 = rng.gen_range(-1.0..=1.0);
                if constraint.allows(idx) {
                    c
                } else {
                    0.0
                }
            })
            .collect();
        let s = MonogenicSeries::from_coefficients(n_max, coeffs)?;
        if s.is_zero() {
            continue;
        }
        let sup = max_modulus(&s, nt, 1.0, SUP_SAMPLES)?.value;
        if sup == 0.0 {
            continue;
        }
        return Ok(s.scale(target_sup / (sup * (1.0 + SUP_MARGIN))));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBound {
    pub index: BasisIndex,
    pub coefficient: f64,
    pub bound: f64,
    pub slack: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBoundReport {
    pub a00: f64,
    /// Whether the `m = n + 1` coefficients were verified to vanish.
    pub orthogonality_verified: bool,
    /// Sampled sup norm on the unit sphere, when it was checked.
    pub sup_estimate: Option<f64>,
    pub entries: Vec<CoefficientBound>,
    pub violations: usize,
}

impl CoefficientBoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `|c_k| ≤ max|Sc B_k| ‖B_k‖ / ‖Sc B_k‖² · 2√(π/3) (2√(π/3) - a_0^0)`
/// for `n ≥ 1`, X orders `0..=n` and Y orders `1..=n`.
pub fn coefficient_bound_check(
    s: &MonogenicSeries,
    nt: &NormTable,
    sup_samples: Option<usize>,
) -> Result<CoefficientBoundReport> {
    let c = two_sqrt_pi_over_3();
    let a00 = s.get(BasisIndex::x(0, 0));
    let factor = c * (c - a00);
    let mut entries = Vec::new();
    for (idx, coefficient) in s.iter() {
        if idx.n == 0 || idx.is_hyperholomorphic_constant() {
            continue;
        }
        let e = nt.entry(idx)?;
        let bound = e.sc_max * e.l2_norm / (e.sc_l2_norm * e.sc_l2_norm) * factor;
        let slack = bound - coefficient.abs();
        entries.push(CoefficientBound {
            index: idx,
            coefficient,
            bound,
            slack,
            satisfied: slack >= 0.0,
        });
    }
    let sup_estimate = match sup_samples {
        Some(n) => Some(max_modulus(s, nt, 1.0, n)?.value),
        None => None,
    };
    let violations = entries.iter().filter(|e| !e.satisfied).count();
    Ok(CoefficientBoundReport {
        a00,
        orthogonality_verified: s.is_orthogonal_to_hyperholomorphic_constants(),
        sup_estimate,
        entries,
        violations,
    })
}

/// Exact `(1/2) D̄` of a series. `c B*_{n,m}` maps to
/// `c (n+m+1) ‖B_{n-1,m}‖ / ‖B_{n,m}‖ · B*_{n-1,m}`.
pub fn hyperderivative_series(s: &MonogenicSeries, nt: &NormTable) -> Result<MonogenicSeries> {
    let out_degree = s.n_max.saturating_sub(1);
    let mut out = MonogenicSeries::zeros(out_degree);
    for (idx, c) in s.iter() {
        if c == 0.0 {
            continue;
        }
        if let Hyperderivative::Multiple { factor, lower } =
            crate::basis::exact_hyperderivative(idx)?
        {
            let ratio = nt.l2_norm(lower)? / nt.l2_norm(idx)?;
            let prev = out.get(lower);
            out.set(lower, prev + c * factor * ratio)?;
        }
    }
    Ok(out)
}
