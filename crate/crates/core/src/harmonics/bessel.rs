//! Spherical Bessel functions of the first kind and their positive zeros.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Spherical Bessel function `j_l(x)` for `x >= 0`.
///
/// Power series below `x = 1`, upward recurrence when `l <= x`, and Miller's
/// downward recurrence otherwise (normalized against `j_0` or `j_1`).
pub fn sph_bessel<T: Real>(l: usize, x: T) -> T {
    debug_assert!(x >= T::zero(), "sph_bessel needs x >= 0");
    if x == T::zero() {
        return if l == 0 { T::one() } else { T::zero() };
    }
    if x < T::one() {
        return series(l, x);
    }
    let j0 = x.sin() / x;
    if l == 0 {
        return j0;
    }
    let j1 = (x.sin() / x - x.cos()) / x;
    if l == 1 {
        return j1;
    }
    if T::from_usize_exact(l) <= x {
        let (mut prev, mut cur) = (j0, j1);
        for k in 1..l {
            let next = T::from_usize_exact(2 * k + 1) / x * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    } else {
        miller(l, x, j0, j1)
    }
}

fn series<T: Real>(l: usize, x: T) -> T {
    // x^l / (2l+1)!!, accumulated as a product to stay in range.
    let mut pref = T::one();
    for i in 1..=l {
        pref *= x / T::from_usize_exact(2 * i + 1);
    }
    let y = -x * x / T::lit(2.0);
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..60 {
        term *= y / (T::from_usize_exact(k) * T::from_usize_exact(2 * l + 2 * k + 1));
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    pref * sum
}

fn miller<T: Real>(l: usize, x: T, j0: T, j1: T) -> T {
    let start = l + 20 + (40.0 * l as f64).sqrt() as usize;
    let big = T::max_value().sqrt();
    let mut upper = T::zero();
    let mut cur = T::min_positive_value().sqrt();
    let mut at_l = T::zero();
    let mut f0 = T::zero();
    let mut f1 = T::zero();
    // f_{k-1} = (2k+1)/x f_k - f_{k+1}
    for k in (1..=start).rev() {
        let lower = T::from_usize_exact(2 * k + 1) / x * cur - upper;
        upper = cur;
        cur = lower;
        if cur.abs() > big {
            let s = T::one() / big;
            cur *= s;
            upper *= s;
            at_l *= s;
        }
        if k - 1 == l {
            at_l = cur;
        }
        if k == 1 {
            f1 = upper;
            f0 = cur;
        }
    }
    if j0.abs() >= j1.abs() {
        at_l * (j0 / f0)
    } else {
        at_l * (j1 / f1)
    }
}

/// Derivative `j_l'(x)`.
pub fn sph_bessel_derivative<T: Real>(l: usize, x: T) -> T {
    if x == T::zero() {
        return if l == 1 { T::one() / T::lit(3.0) } else { T::zero() };
    }
    if l == 0 {
        return -sph_bessel(1, x);
    }
    sph_bessel(l - 1, x) - T::from_usize_exact(l + 1) / x * sph_bessel(l, x)
}

/// Table of positive zeros `u_{l,s}` of `j_l`, built by interlacing.
///
/// Row `l` stores `u_{l,1} < u_{l,2} < ...`; the zeros of `j_0` are `s * pi`,
/// and each zero of `j_l` is isolated in the bracket
/// `(u_{l-1,s}, u_{l-1,s+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselZeroTable<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Real> BesselZeroTable<T> {
    /// Table with at least `s_max` zeros in every row `0..=l_max`.
    pub fn new(l_max: usize, s_max: usize) -> Result<Self> {
        let row0_len = s_max + l_max;
        let mut rows = Vec::with_capacity(l_max + 1);
        rows.push((1..=row0_len).map(|s| T::from_usize_exact(s) * T::PI()).collect::<Vec<T>>());
        for l in 1..=l_max {
            let prev: &Vec<T> = &rows[l - 1];
            let mut row = Vec::with_capacity(prev.len().saturating_sub(1));
            for s in 0..prev.len().saturating_sub(1) {
                row.push(zero_in_bracket(l, s + 1, prev[s], prev[s + 1])?);
            }
            rows.push(row);
        }
        Ok(Self { rows })
    }

    /// Table holding every zero `<= upper` for `l = 0..=l_max`.
    pub fn up_to(l_max: usize, upper: T) -> Result<Self> {
        let count = (upper / T::PI()).floor().to_usize().unwrap_or(0);
        Self::new(l_max, count + 1)
    }

    pub fn l_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// Zero `u_{l,s}` with 1-based `s`.
    pub fn zero(&self, l: usize, s: usize) -> Option<T> {
        if s == 0 {
            return None;
        }
        self.rows.get(l).and_then(|r| r.get(s - 1)).copied()
    }

    pub fn row(&self, l: usize) -> &[T] {
        &self.rows[l]
    }
}

/// The `s`-th positive zero of `j_l` (1-based `s`).
pub fn sph_bessel_zero<T: Real>(l: usize, s: usize) -> Result<T> {
    if s == 0 {
        return Err(Error::domain("zero index s must be >= 1"));
    }
    let table = BesselZeroTable::<T>::new(l, s)?;
    table.zero(l, s).ok_or(Error::ZeroBracketing { l, s })
}

/// Safeguarded Newton iteration inside a sign-change bracket.
fn zero_in_bracket<T: Real>(l: usize, s: usize, a: T, b: T) -> Result<T> {
    let (mut lo, mut hi) = (a, b);
    let mut f_lo = sph_bessel(l, lo);
    let f_hi = sph_bessel(l, hi);
    if f_lo == T::zero() || f_hi == T::zero() || (f_lo > T::zero()) == (f_hi > T::zero()) {
        return Err(Error::ZeroBracketing { l, s });
    }
    let mut x = (lo + hi) / T::lit(2.0);
    for _ in 0..200 {
        let f = sph_bessel(l, x);
        if f == T::zero() {
            return Ok(x);
        }
        if (f > T::zero()) == (f_lo > T::zero()) {
            lo = x;
            f_lo = f;
        } else {
            hi = x;
        }
        let df = sph_bessel_derivative(l, x);
        let newton = x - f / df;
        let next = if df != T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / T::lit(2.0)
        };
        let step = (next - x).abs();
        x = next;
        if step <= T::lit(2.0) * T::epsilon() * x || hi - lo <= T::lit(4.0) * T::epsilon() * x {
            return Ok(x);
        }
    }
    Err(Error::ZeroBracketing { l, s })
}
