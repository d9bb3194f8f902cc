//! Tensor quadrature on the unit ball, the real inner product
//! `<f, g> = ∫_B Sc(f̄ g) dV`, normalization constants and Gram matrices.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::basis::{basis_count, enumerate_up_to, eval_basis, BasisFrame, BasisIndex, Family};
use crate::error::{Error, Result};
use crate::quaternion::{FieldFn, Point3, Quaternion, ReducedQuaternion};
use crate::sphere::{lattice_angles, lattice_spacing, polish};

pub const DEFAULT_RULE: (usize, usize, usize) = (24, 24, 48);

/// Lattice size used to locate `max |Sc(B)|` on the unit sphere.
pub const SC_MAX_SAMPLES: usize = 20_000;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
            z = 0.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Quadrature rule for `∫_B f dV`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallRule {
    pub nodes: Vec<Point3>,
    pub weights: Vec<f64>,
    /// Polynomials of total degree `≤ exact_degree` are integrated exactly;
    /// negative when not even constants are.
    pub exact_degree: i32,
    pub sizes: (usize, usize, usize),
}

/// Exactness of the tensor rule: `r^{d+2}` needs `2 n_r - 1 ≥ d + 2`, the
/// `cos θ` factor `2 n_t - 1 ≥ d`, the trapezoid in `φ` `n_p - 1 ≥ d`.
pub fn rule_exactness(n_r: usize, n_t: usize, n_p: usize) -> i32 {
    let r = 2 * n_r as i32 - 3;
    let t = 2 * n_t as i32 - 1;
    let p = n_p as i32 - 1;
    r.min(t).min(p)
}

/// Gauss–Legendre in `r ∈ [0, 1]` (weight `r²` folded into the weights),
/// Gauss–Legendre in `cos θ`, uniform trapezoid in `φ`.
pub fn make_ball_rule(n_r: usize, n_t: usize, n_p: usize) -> Result<BallRule> {
    if n_r == 0 || n_t == 0 || n_p == 0 {
        return Err(Error::Config(format!(
            "ball rule sizes must be positive, got {n_r}x{n_t}x{n_p}"
        )));
    }
    let (xr, wr) = gauss_legendre(n_r);
    let (xt, wt) = gauss_legendre(n_t);
    let dphi = 2.0 * PI / n_p as f64;
    let mut nodes = Vec::with_capacity(n_r * n_t * n_p);
    let mut weights = Vec::with_capacity(n_r * n_t * n_p);
    for (&ur, &vr) in xr.iter().zip(&wr) {
        let r = 0.5 * (ur + 1.0);
        let w_r = 0.5 * vr * r * r;
        for (&t, &vt) in xt.iter().zip(&wt) {
            let s = ((1.0 - t) * (1.0 + t)).sqrt();
            for k in 0..n_p {
                let phi = k as f64 * dphi;
                let (sp, cp) = phi.sin_cos();
                nodes.push(Point3::new(r * t, r * s * cp, r * s * sp));
                weights.push(w_r * vt * dphi);
            }
        }
    }
    Ok(BallRule {
        nodes,
        weights,
        exact_degree: rule_exactness(n_r, n_t, n_p),
        sizes: (n_r, n_t, n_p),
    })
}

impl BallRule {
    pub fn default_rule() -> BallRule {
        let (a, b, c) = DEFAULT_RULE;
        make_ball_rule(a, b, c).expect("default sizes are positive")
    }

    /// Smallest rule, at least as fine as the default one, integrating
    /// polynomials of degree `degree` exactly.
    pub fn for_degree(degree: u32) -> BallRule {
        let d = degree as usize;
        let n_r = DEFAULT_RULE.0.max((d + 4).div_ceil(2));
        let n_t = DEFAULT_RULE.1.max((d + 2).div_ceil(2));
        let n_p = DEFAULT_RULE.2.max(d + 2);
        make_ball_rule(n_r, n_t, n_p).expect("sizes are positive")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point3) -> f64) -> f64 {
        let mut acc = CompensatedSum::default();
        for (&p, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(p));
        }
        acc.value()
    }

    pub fn require_exactness(&self, degree: u32) -> Result<()> {
        if self.exact_degree < degree as i32 {
            return Err(Error::Config(format!(
                "quadrature rule {}x{}x{} is exact to degree {}, need {degree}",
                self.sizes.0, self.sizes.1, self.sizes.2, self.exact_degree
            )));
        }
        Ok(())
    }
}

/// Neumaier summation; plain accumulation over ~10⁵ nodes loses about
/// `1e-13` relative.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `Sc(ā b)` for reduced quaternions, i.e. the Euclidean dot product.
pub fn sc_conj_product(a: ReducedQuaternion, b: ReducedQuaternion) -> f64 {
    (Quaternion::from(a).conj() * Quaternion::from(b)).a0
}

/// `∫_B Sc(f̄ g) dV` by the rule.
pub fn inner_product(f: &impl FieldFn, g: &impl FieldFn, rule: &BallRule) -> f64 {
    rule.integrate(|p| sc_conj_product(f.eval(p), g.eval(p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEntry {
    pub family: Family,
    pub n: u32,
    pub m: u32,
    /// `‖B‖` in `L2(B; A; R)`.
    pub l2_norm: f64,
    /// `‖Sc(B)‖` in `L2(B)`.
    pub sc_l2_norm: f64,
    /// `max_B |Sc(B)|`, attained on the unit sphere by homogeneity.
    pub sc_max: f64,
}

impl NormEntry {
    pub fn index(&self) -> BasisIndex {
        BasisIndex::new(self.family, self.n, self.m)
    }
}

/// Norm data of every unnormalized basis polynomial up to `n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    pub n_max: u32,
    pub rule_sizes: (usize, usize, usize),
    pub sc_max_samples: usize,
    pub entries: Vec<NormEntry>,
}

impl NormTable {
    pub fn entry(&self, idx: BasisIndex) -> Result<&NormEntry> {
        if !idx.is_valid() || idx.n > self.n_max {
            return Err(Error::MissingNorm(idx));
        }
        Ok(&self.entries[idx.position()])
    }

    pub fn l2_norm(&self, idx: BasisIndex) -> Result<f64> {
        Ok(self.entry(idx)?.l2_norm)
    }

    /// Normalized basis values at `p` for every index up to `n_max`.
    pub fn normalized_frame(&self, n_max: u32, p: Point3) -> Result<Vec<ReducedQuaternion>> {
        if n_max > self.n_max {
            return Err(Error::MissingNorm(BasisIndex::x(n_max, 0)));
        }
        let frame = BasisFrame::new(n_max, p);
        Ok(frame
            .values()
            .iter()
            .zip(&self.entries)
            .map(|(v, e)| v.scale(1.0 / e.l2_norm))
            .collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("norm table serializes")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Computes `‖B‖`, `‖Sc B‖` by quadrature and `max |Sc B|` on a sphere
/// lattice of [`SC_MAX_SAMPLES`] points with local polish.
pub fn norm_table(n_max: u32, rule: &BallRule) -> Result<NormTable> {
    norm_table_with_samples(n_max, rule, SC_MAX_SAMPLES)
}

pub fn norm_table_with_samples(
    n_max: u32,
    rule: &BallRule,
    sc_samples: usize,
) -> Result<NormTable> {
    rule.require_exactness(2 * n_max + 2)?;
    let count = basis_count(n_max);
    let mut sq = vec![CompensatedSum::default(); count];
    let mut sc_sq = vec![CompensatedSum::default(); count];
    for (&p, &w) in rule.nodes.iter().zip(&rule.weights) {
        let frame = BasisFrame::new(n_max, p);
        for (k, v) in frame.values().iter().enumerate() {
            sq[k].add(w * v.norm_sqr());
            sc_sq[k].add(w * v.x0 * v.x0);
        }
    }

    // lattice pass: best direction per index
    let mut best = vec![(f64::NEG_INFINITY, 0.0, 0.0); count];
    for i in 0..sc_samples {
        let (theta, phi) = lattice_angles(i);
        let frame = BasisFrame::new(n_max, crate::sphere::direction(theta, phi));
        for (k, v) in frame.values().iter().enumerate() {
            let a = v.x0.abs();
            if a > best[k].0 {
                best[k] = (a, theta, phi);
            }
        }
    }
    let spacing = lattice_spacing(sc_samples);
    let entries = enumerate_up_to(n_max)
        .into_iter()
        .enumerate()
        .map(|(k, idx)| {
            let sc_max = if best[k].0 > 0.0 {
                let f = |p: Point3| eval_basis(idx, p).expect("valid index").x0.abs();
                polish(1.0, spacing, best[k], f).0
            } else {
                0.0
            };
            NormEntry {
                family: idx.family,
                n: idx.n,
                m: idx.m,
                l2_norm: sq[k].value().sqrt(),
                sc_l2_norm: sc_sq[k].value().sqrt(),
                sc_max,
            }
        })
        .collect();
    Ok(NormTable {
        n_max,
        rule_sizes: rule.sizes,
        sc_max_samples: sc_samples,
        entries,
    })
}

/// Which real component enters a Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GramPart {
    Full,
    Scalar,
    E1,
    E2,
}

impl GramPart {
    pub const ALL: [GramPart; 4] = [GramPart::Full, GramPart::Scalar, GramPart::E1, GramPart::E2];

    pub fn name(&self) -> &'static str {
        match self {
            GramPart::Full => "full",
            GramPart::Scalar => "scalar",
            GramPart::E1 => "e1",
            GramPart::E2 => "e2",
        }
    }

    fn pair(&self, a: ReducedQuaternion, b: ReducedQuaternion) -> f64 {
        match self {
            GramPart::Full => sc_conj_product(a, b),
            GramPart::Scalar => a.x0 * b.x0,
            GramPart::E1 => a.x1 * b.x1,
            GramPart::E2 => a.x2 * b.x2,
        }
    }
}

/// Symmetric matrix of inner products between normalized basis elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gram {
    pub part: GramPart,
    pub indices: Vec<BasisIndex>,
    pub data: Vec<f64>,
}

impl Gram {
    pub fn size(&self) -> usize {
        self.indices.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size() + j]
    }

    pub fn max_deviation_from_identity(&self) -> f64 {
        let n = self.size();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((self.get(i, j) - target).abs());
            }
        }
        dev
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.size();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    dev = dev.max(self.get(i, j).abs());
                }
            }
        }
        dev
    }

    /// The square block belonging to degree `n`.
    pub fn degree_block(&self, n: u32) -> Vec<Vec<f64>> {
        let rows: Vec<usize> = (0..self.size())
            .filter(|&i| self.indices[i].n == n)
            .collect();
        rows.iter()
            .map(|&i| rows.iter().map(|&j| self.get(i, j)).collect())
            .collect()
    }
}

pub fn gram_matrix(n_max: u32, rule: &BallRule, nt: &NormTable, part: GramPart) -> Result<Gram> {
    rule.require_exactness(2 * n_max + 2)?;
    let indices = enumerate_up_to(n_max);
    let size = indices.len();
    let mut data = vec![0.0; size * size];
    for (&p, &w) in rule.nodes.iter().zip(&rule.weights) {
        let vals = nt.normalized_frame(n_max, p)?;
        for i in 0..size {
            let wi = vals[i];
            for j in i..size {
                data[i * size + j] += w * part.pair(wi, vals[j]);
            }
        }
    }
    for i in 0..size {
        for j in 0..i {
            data[i * size + j] = data[j * size + i];
        }
    }
    Ok(Gram {
        part,
        indices,
        data,
    })
}

/// Largest `|<[B]_i, [B]_j>|` over normalized basis elements and component
/// pairs `i ≠ j`: the coordinates of each basis function are mutually
/// orthogonal in `L2(B)`.
pub fn coordinate_orthogonality(n_max: u32, rule: &BallRule, nt: &NormTable) -> Result<f64> {
    rule.require_exactness(2 * n_max + 2)?;
    let size = basis_count(n_max);
    let mut acc = vec![[0.0f64; 3]; size];
    for (&p, &w) in rule.nodes.iter().zip(&rule.weights) {
        let vals = nt.normalized_frame(n_max, p)?;
        for (a, v) in acc.iter_mut().zip(&vals) {
            a[0] += w * v.x0 * v.x1;
            a[1] += w * v.x0 * v.x2;
            a[2] += w * v.x1 * v.x2;
        }
    }
    Ok(acc.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const VOLUME: f64 = 4.0 * PI / 3.0;

    #[test]
    fn gauss_legendre_small_cases() {
        let (x, w) = gauss_legendre(1);
        assert_eq!(x, vec![0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!((x[2] - 0.6f64.sqrt()).abs() < 1e-15);
        assert!(x[1].abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in [5usize, 12, 24, 40] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for k in 0..2 * n {
                let q: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * xi.powi(k as i32))
                    .sum();
                let exact = if k % 2 == 1 {
                    0.0
                } else {
                    2.0 / (k as f64 + 1.0)
                };
                assert!((q - exact).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn ball_moments() {
        let rule = BallRule::default_rule();
        assert!((rule.integrate(|_| 1.0) - VOLUME).abs() < 1e-13);
        assert!((rule.weights.iter().sum::<f64>() - VOLUME).abs() < 1e-12);
        assert!((rule.integrate(|p| p.x0 * p.x0) - 4.0 * PI / 15.0).abs() < 1e-12);
        assert!(rule.integrate(|p| p.x0).abs() < 1e-13);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
    }

    /// ∫_B x0^a x1^b x2^c dV in closed form (zero unless all exponents even).
    fn monomial_moment(a: u32, b: u32, c: u32) -> f64 {
        if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
            return 0.0;
        }
        // 2 Γ((a+1)/2) Γ((b+1)/2) Γ((c+1)/2) / Γ((a+b+c+3)/2) / (a+b+c+3)
        fn gamma_half(k: u32) -> f64 {
            // Γ(k/2) for positive integer k
            if k % 2 == 0 {
                (1..k / 2).map(|i| i as f64).product()
            } else {
                let mut g = PI.sqrt();
                let mut x = 0.5;
                while x < k as f64 / 2.0 - 0.25 {
                    g *= x;
                    x += 1.0;
                }
                g
            }
        }
        let d = a + b + c;
        2.0 * gamma_half(a + 1) * gamma_half(b + 1) * gamma_half(c + 1)
            / gamma_half(d + 3)
            / (d + 3) as f64
    }

    #[test]
    fn monomials_up_to_exactness() {
        let rule = make_ball_rule(8, 8, 16).unwrap();
        assert_eq!(rule.exact_degree, 13);
        for a in 0..=13u32 {
            for b in 0..=(13 - a) {
                for c in 0..=(13 - a - b) {
                    let q = rule.integrate(|p| {
                        p.x0.powi(a as i32) * p.x1.powi(b as i32) * p.x2.powi(c as i32)
                    });
                    let exact = monomial_moment(a, b, c);
                    assert!((q - exact).abs() < 1e-13, "x^({a},{b},{c}): {q} vs {exact}");
                }
            }
        }
        assert!((monomial_moment(2, 0, 0) - 4.0 * PI / 15.0).abs() < 1e-15);
    }

    #[test]
    fn rule_size_errors() {
        assert!(matches!(make_ball_rule(0, 4, 4), Err(Error::Config(_))));
        let under = make_ball_rule(2, 24, 48).unwrap();
        assert_eq!(under.exact_degree, 1);
        assert!(under.require_exactness(14).is_err());
        assert!(BallRule::for_degree(60).exact_degree >= 60);
    }

    #[test]
    fn inner_product_examples() {
        let rule = BallRule::default_rule();
        let e1 = |_: Point3| ReducedQuaternion::new(0.0, 1.0, 0.0);
        let e2 = |_: Point3| ReducedQuaternion::new(0.0, 0.0, 1.0);
        assert_eq!(inner_product(&e1, &e2, &rule), 0.0);

        let x00 = |p: Point3| eval_basis(BasisIndex::x(0, 0), p).unwrap();
        assert!((inner_product(&x00, &x00, &rule) - PI / 3.0).abs() < 1e-12);

        let a = |p: Point3| eval_basis(BasisIndex::x(2, 1), p).unwrap();
        let b = |p: Point3| eval_basis(BasisIndex::y(3, 1), p).unwrap();
        assert!(inner_product(&a, &b, &rule).abs() < 1e-10);
    }

    #[test]
    fn norm_table_anchors() {
        let rule = BallRule::default_rule();
        let nt = norm_table_with_samples(4, &rule, 2000).unwrap();
        let e = nt.entry(BasisIndex::x(0, 0)).unwrap();
        assert!((e.l2_norm - (PI / 3.0).sqrt()).abs() < 1e-13);
        assert!((0.5 / e.l2_norm - 0.5 * (3.0 / PI).sqrt()).abs() < 1e-13);
        for n in 0..=4 {
            assert_eq!(nt.entry(BasisIndex::x(n, n + 1)).unwrap().sc_max, 0.0);
            assert_eq!(nt.entry(BasisIndex::y(n, n + 1)).unwrap().sc_max, 0.0);
            assert_eq!(nt.entry(BasisIndex::y(n, n + 1)).unwrap().sc_l2_norm, 0.0);
        }
        assert!(nt.entries.iter().all(|e| e.l2_norm > 0.0));
        assert!(matches!(
            nt.entry(BasisIndex::x(5, 0)),
            Err(Error::MissingNorm(_))
        ));
    }

    #[test]
    fn sc_max_matches_legendre_maximum() {
        // Sc(X_n^l) on the unit sphere is (n+l+1)/2 P_n^l(t) cos lφ, so its
        // maximum is (n+l+1)/2 max_t |P_n^l(t)|
        let rule = BallRule::default_rule();
        let nt = norm_table(6, &rule).unwrap();
        for n in 0..=6u32 {
            for l in 0..=n {
                let mut best: f64 = 0.0;
                for i in 0..=200_000 {
                    let t = -1.0 + i as f64 / 100_000.0;
                    best = best.max(crate::special::legendre_p(n, l as i32, t).unwrap().abs());
                }
                let want = 0.5 * (n + l + 1) as f64 * best;
                for idx in [BasisIndex::x(n, l), BasisIndex::y(n, l.max(1))] {
                    if idx.family == Family::Y && l == 0 {
                        continue;
                    }
                    let got = nt.entry(idx).unwrap().sc_max;
                    assert!((got - want).abs() <= 1e-8 * want, "{idx}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn exactness_required() {
        let rule = make_ball_rule(4, 4, 8).unwrap();
        assert!(matches!(norm_table(6, &rule), Err(Error::Config(_))));
    }

    #[test]
    fn gram_small() {
        let rule = BallRule::default_rule();
        let nt = norm_table_with_samples(4, &rule, 500).unwrap();
        let g = gram_matrix(4, &rule, &nt, GramPart::Full).unwrap();
        assert_eq!(g.size(), 35);
        assert!((g.get(0, 0) - 1.0).abs() < 1e-12);
        assert!(g.max_deviation_from_identity() < 1e-10);
        for n in 0..=4 {
            assert_eq!(g.degree_block(n).len(), 2 * n as usize + 3);
        }
        let s = gram_matrix(4, &rule, &nt, GramPart::Scalar).unwrap();
        assert!(s.max_off_diagonal() < 1e-10);
        assert!(coordinate_orthogonality(4, &rule, &nt).unwrap() < 1e-10);
    }

    #[test]
    fn norms_stable_under_refinement() {
        let coarse = BallRule::default_rule();
        let fine = make_ball_rule(48, 48, 96).unwrap();
        let a = norm_table_with_samples(8, &coarse, 100).unwrap();
        let b = norm_table_with_samples(8, &fine, 100).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((x.l2_norm - y.l2_norm).abs() <= 1e-12 * y.l2_norm);
            assert!((x.sc_l2_norm - y.sc_l2_norm).abs() <= 1e-12 * y.sc_l2_norm.max(1e-300));
        }
    }

    #[test]
    fn json_round_trip() {
        let rule = BallRule::default_rule();
        let nt = norm_table_with_samples(2, &rule, 200).unwrap();
        let back = NormTable::from_json(&nt.to_json()).unwrap();
        assert_eq!(back, nt);
    }
}
