//! Normalized associated Legendre functions and complex spherical harmonics.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::harmonics::LogFactorial;
use crate::scalar::Real;

/// Polar factors of the spherical harmonics for `m >= 0`:
///
/// `Θ_l^m(θ) = sqrt((2l+1)/(4π) (l-m)!/(l+m)!) P_l^m(cos θ)`
///
/// with the Condon–Shortley phase included in `P_l^m`, so that
/// `Y_l^m(θ, φ) = Θ_l^m(θ) e^{imφ}`. Stored triangularly, see [`Self::get`].
#[derive(Debug, Clone)]
pub struct PolarTable<T> {
    l_max: usize,
    values: Vec<T>,
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl<T: Real> PolarTable<T> {
    /// Evaluates every `Θ_l^m` with `0 <= m <= l <= l_max` at one polar angle.
    ///
    /// `Θ_m^m` comes from its closed form with the factorial ratio taken in
    /// log space; higher degrees follow the upward three-term recurrence.
    pub fn new(l_max: usize, theta: T) -> Self {
        let (s, x) = theta.sin_cos();
        Self::from_cos_sin(l_max, x, s.abs())
    }

    pub fn from_cos_sin(l_max: usize, x: T, s: T) -> Self {
        let lf = LogFactorial::<T>::new(2 * l_max + 1);
        let mut values = vec![T::zero(); tri(l_max, l_max) + 1];
        let four_pi = T::lit(4.0) * T::PI();
        let ln2 = T::LN_2();
        for m in 0..=l_max {
            let mf = T::from_usize_exact(m);
            // sqrt((2m)!) / (2^m m!)
            let log_c = lf.ln(2 * m) / T::lit(2.0) - mf * ln2 - lf.ln(m);
            let mut ymm = (T::from_usize_exact(2 * m + 1) / four_pi).sqrt() * log_c.exp() * s.powi(m as i32);
            if m % 2 == 1 {
                ymm = -ymm;
            }
            values[tri(m, m)] = ymm;
            if m == l_max {
                break;
            }
            let mut prev2 = ymm;
            let mut prev1 = x * T::from_usize_exact(2 * m + 3).sqrt() * ymm;
            values[tri(m + 1, m)] = prev1;
            for l in m + 2..=l_max {
                let lf_ = T::from_usize_exact(l);
                let m2 = mf * mf;
                let a = ((T::lit(4.0) * lf_ * lf_ - T::one()) / (lf_ * lf_ - m2)).sqrt();
                let lm1 = lf_ - T::one();
                let b = ((lm1 * lm1 - m2) / (T::lit(4.0) * lm1 * lm1 - T::one())).sqrt();
                let cur = a * (x * prev1 - b * prev2);
                values[tri(l, m)] = cur;
                prev2 = prev1;
                prev1 = cur;
            }
        }
        Self { l_max, values }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// `Θ_l^m` for any `|m| <= l`; negative orders use
    /// `Θ_l^{-m} = (-1)^m Θ_l^m`.
    #[inline]
    pub fn get(&self, l: usize, m: i64) -> T {
        let am = m.unsigned_abs() as usize;
        let v = self.values[tri(l, am)];
        if m < 0 && am % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

/// Complex spherical harmonic `Y_l^m(θ, φ)` with Condon–Shortley phase.
pub fn sph_harmonic<T: Real>(l: usize, m: i64, theta: T, phi: T) -> Result<Complex<T>> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::domain(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    let table = PolarTable::new(l, theta);
    let p = table.get(l, m);
    let (sin, cos) = (T::from_i64(m).unwrap() * phi).sin_cos();
    Ok(Complex::new(p * cos, p * sin))
}
