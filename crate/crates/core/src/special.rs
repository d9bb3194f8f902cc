//! Associated Legendre functions and Chebyshev angular factors.
//!
//! `P_n^l` is the Ferrers function without the Condon–Shortley phase:
//! `P_n^l(t) = (1 - t²)^{l/2} d^l/dt^l P_n(t)`, so `P_1^1(t) = +√(1 - t²)`.
//! Two extensions are used by the monogenic basis:
//!
//! * `P_n^l ≡ 0` for `l ≥ n + 1`;
//! * `P_n^{-1} = -P_n^1 / (n (n + 1))`, undefined for `n = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign convention for `P_n^l`. Only the phase-free variant yields monogenic
/// basis polynomials; the other one exists to demonstrate that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendreConvention {
    pub condon_shortley_phase: bool,
}

impl LegendreConvention {
    pub const FERRERS: LegendreConvention = LegendreConvention {
        condon_shortley_phase: false,
    };
    pub const CONDON_SHORTLEY: LegendreConvention = LegendreConvention {
        condon_shortley_phase: true,
    };

    fn phase(&self, l: u32) -> f64 {
        if self.condon_shortley_phase && l % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Default for LegendreConvention {
    fn default() -> Self {
        LegendreConvention::FERRERS
    }
}

fn check_args(n: u32, l: i32, t: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!(
            "Legendre argument {t} outside [-1, 1]"
        )));
    }
    if l < -1 {
        return Err(Error::OutOfRange(format!("Legendre order {l} < -1")));
    }
    if n == 0 && l == -1 {
        return Err(Error::UndefinedIndex { n, l });
    }
    Ok(())
}

/// `P_n^l(t)` for `l ≥ 0` by the standard upward recurrence in `n`.
fn legendre_nonneg(n: u32, l: u32, t: f64) -> f64 {
    if l > n {
        return 0.0;
    }
    let s = ((1.0 - t) * (1.0 + t)).sqrt();
    // P_l^l = (2l - 1)!! s^l
    let mut pmm = 1.0;
    for i in 1..=l {
        pmm *= (2 * i - 1) as f64 * s;
    }
    if n == l {
        return pmm;
    }
    let mut prev = pmm;
    let mut cur = t * (2 * l + 1) as f64 * pmm;
    for k in (l + 2)..=n {
        let next = ((2 * k - 1) as f64 * t * cur - (k + l - 1) as f64 * prev) / (k - l) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// Associated Legendre function `P_n^l(t)` under the phase-free convention.
pub fn legendre_p(n: u32, l: i32, t: f64) -> Result<f64> {
    legendre_p_with(LegendreConvention::FERRERS, n, l, t)
}

pub fn legendre_p_with(conv: LegendreConvention, n: u32, l: i32, t: f64) -> Result<f64> {
    check_args(n, l, t)?;
    if l == -1 {
        let p1 = conv.phase(1) * legendre_nonneg(n, 1, t);
        return Ok(-p1 / (n as f64 * (n as f64 + 1.0)));
    }
    let l = l as u32;
    Ok(conv.phase(l) * legendre_nonneg(n, l, t))
}

/// All `P_n^l(t)` with `0 ≤ l ≤ n ≤ n_max` at a single argument.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    n_max: u32,
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(n_max: u32, t: f64) -> Self {
        Self::with_convention(LegendreConvention::FERRERS, n_max, t)
    }

    /// `t` is clamped to `[-1, 1]`; callers pass `x0 / |x|`, which can leave
    /// the interval by one ulp.
    pub fn with_convention(conv: LegendreConvention, n_max: u32, t: f64) -> Self {
        let t = t.clamp(-1.0, 1.0);
        let n_max_us = n_max as usize;
        let mut values = vec![0.0; (n_max_us + 1) * (n_max_us + 2) / 2];
        let s = ((1.0 - t) * (1.0 + t)).sqrt();
        let mut pmm = 1.0;
        for l in 0..=n_max {
            if l > 0 {
                pmm *= (2 * l - 1) as f64 * s;
            }
            let phase = conv.phase(l);
            values[Self::offset(l, l)] = phase * pmm;
            if l == n_max {
                break;
            }
            let mut prev = pmm;
            let mut cur = t * (2 * l + 1) as f64 * pmm;
            values[Self::offset(l + 1, l)] = phase * cur;
            for k in (l + 2)..=n_max {
                let next =
                    ((2 * k - 1) as f64 * t * cur - (k + l - 1) as f64 * prev) / (k - l) as f64;
                prev = cur;
                cur = next;
                values[Self::offset(k, l)] = phase * cur;
            }
        }
        LegendreTable { n_max, values }
    }

    fn offset(n: u32, l: u32) -> usize {
        (n as usize) * (n as usize + 1) / 2 + l as usize
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// `P_n^l` with the zero and `l = -1` extensions. Panics for `n > n_max`
    /// and for the undefined `P_0^{-1}`.
    pub fn get(&self, n: u32, l: i32) -> f64 {
        assert!(
            n <= self.n_max,
            "degree {n} beyond table size {}",
            self.n_max
        );
        match l {
            -1 => {
                assert!(n > 0, "P_0^-1 is undefined");
                -self.values[Self::offset(n, 1)] / (n as f64 * (n as f64 + 1.0))
            }
            l if l < -1 => panic!("Legendre order {l} < -1"),
            l if l as u32 > n => 0.0,
            l => self.values[Self::offset(n, l as u32)],
        }
    }
}

/// `cos(kφ) = T_k(cos φ)`, valid for every integer `k`.
pub fn cheb_cos(k: i32, phi: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    (k as f64 * phi).cos()
}

/// `sin(kφ) = sin φ · U_{k-1}(cos φ)`, valid for every integer `k`.
pub fn cheb_sin(k: i32, phi: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    (k as f64 * phi).sin()
}

/// `(n+1+l)! / (n+1-l)!` for `0 ≤ l ≤ n+1`.
///
/// The product is accumulated in `u128` while it fits, which makes the
/// result correctly rounded; beyond that it continues in `f64`, and in log
/// space once `f64` would overflow.
pub fn factorial_ratio(n: u32, l: u32) -> Result<f64> {
    if l > n + 1 {
        return Err(Error::OutOfRange(format!(
            "factorial_ratio order {l} outside [0, {}]",
            n + 1
        )));
    }
    let lo = (n + 1 - l) as u128 + 1;
    let hi = (n + 1 + l) as u128;
    let mut exact: u128 = 1;
    let mut k = lo;
    while k <= hi {
        match exact.checked_mul(k) {
            Some(v) => exact = v,
            None => break,
        }
        k += 1;
    }
    if k > hi {
        return Ok(exact as f64);
    }
    let mut approx = exact as f64;
    let mut j = k;
    while j <= hi {
        approx *= j as f64;
        j += 1;
    }
    if approx.is_finite() {
        return Ok(approx);
    }
    Ok(ln_factorial_ratio(n, l)?.exp())
}

pub fn ln_factorial_ratio(n: u32, l: u32) -> Result<f64> {
    if l > n + 1 {
        return Err(Error::OutOfRange(format!(
            "factorial_ratio order {l} outside [0, {}]",
            n + 1
        )));
    }
    Ok(((n + 2 - l)..=(n + 1 + l)).map(|k| (k as f64).ln()).sum())
}
