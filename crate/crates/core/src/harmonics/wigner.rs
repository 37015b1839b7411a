//! Wigner rotation matrices in the ZYZ Euler convention (active rotations).
//!
//! `D^l_{mk}(α, β, γ) = e^{-imα} d^l_{mk}(β) e^{-ikγ}` where the rotation is
//! `R = Rz(α) Ry(β) Rz(γ)`. With this convention `D(R1) D(R2) = D(R1 R2)` and
//! `Y_l^m(R^T x) = Σ_{m'} D^l_{m'm}(R) Y_l^{m'}(x)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::harmonics::LogFactorial;
use crate::scalar::Real;

/// Largest degree accepted by the explicit factorial-sum formula.
pub const FACTORIAL_SUM_MAX_L: usize = 32;

/// ZYZ Euler angles, reduced to `α, γ ∈ [0, 2π)` and `β ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerAngles<T> {
    alpha: T,
    beta: T,
    gamma: T,
}

fn wrap_two_pi<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let r = x % tau;
    let r = if r < T::zero() { r + tau } else { r };
    if r >= tau {
        T::zero()
    } else {
        r
    }
}

impl<T: Real> WignerAngles<T> {
    pub fn new(alpha: T, beta: T, gamma: T) -> Self {
        let mut b = wrap_two_pi(beta);
        let (mut a, mut g) = (alpha, gamma);
        if b > T::PI() {
            // Ry(-β) = Rz(π) Ry(β) Rz(π)
            b = T::TAU() - b;
            a += T::PI();
            g += T::PI();
        }
        Self { alpha: wrap_two_pi(a), beta: b, gamma: wrap_two_pi(g) }
    }

    pub fn identity() -> Self {
        Self { alpha: T::zero(), beta: T::zero(), gamma: T::zero() }
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn is_identity(&self) -> bool {
        self.beta == T::zero() && wrap_two_pi(self.alpha + self.gamma) == T::zero()
    }

    /// Rotation matrix `Rz(α) Ry(β) Rz(γ)`, row-major.
    pub fn to_matrix(&self) -> [[T; 3]; 3] {
        let rz = |t: T| {
            let (s, c) = t.sin_cos();
            let (o, z) = (T::one(), T::zero());
            [[c, -s, z], [s, c, z], [z, z, o]]
        };
        let (s, c) = self.beta.sin_cos();
        let (o, z) = (T::one(), T::zero());
        let ry = [[c, z, s], [z, o, z], [-s, z, c]];
        matmul3(&matmul3(&rz(self.alpha), &ry), &rz(self.gamma))
    }

    /// ZYZ angles of a proper rotation matrix.
    pub fn from_matrix(r: &[[T; 3]; 3]) -> Self {
        let cb = r[2][2].max(-T::one()).min(T::one());
        let sb = (r[0][2] * r[0][2] + r[1][2] * r[1][2]).sqrt();
        let tiny = T::epsilon() * T::lit(16.0);
        if sb <= tiny {
            if cb > T::zero() {
                // Rz(α + γ)
                Self::new(r[1][0].atan2(r[0][0]), T::zero(), T::zero())
            } else {
                // Rz(α - γ) Ry(π)
                Self::new((-r[1][0]).atan2(-r[0][0]), T::PI(), T::zero())
            }
        } else {
            let alpha = r[1][2].atan2(r[0][2]);
            let gamma = r[2][1].atan2(-r[2][0]);
            Self::new(alpha, sb.atan2(cb), gamma)
        }
    }

    /// Angles of the product rotation `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_matrix(&matmul3(&self.to_matrix(), &other.to_matrix()))
    }
}

pub(crate) fn matmul3<T: Real>(a: &[[T; 3]; 3], b: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn check_indices(l: usize, m: i64, k: i64) -> Result<()> {
    let li = l as i64;
    if m.abs() > li || k.abs() > li {
        return Err(Error::domain(format!("Wigner index (m={m}, k={k}) out of range for l={l}")));
    }
    Ok(())
}

/// One term of the factorial sum, magnitude in log space.
fn factorial_sum_term<T: Real>(lf: &LogFactorial<T>, l: i64, m: i64, k: i64, s: i64, c: T, sn: T) -> T {
    let f = |n: i64| lf.ln(n as usize);
    let log_mag = (f(l + k) + f(l - k) + f(l + m) + f(l - m)) / T::lit(2.0)
        - f(l + k - s)
        - f(s)
        - f(m - k + s)
        - f(l - m - s);
    let mut term = log_mag.exp() * c.powi((2 * l + k - m - 2 * s) as i32) * sn.powi((m - k + 2 * s) as i32);
    if (m - k + s).rem_euclid(2) == 1 {
        term = -term;
    }
    term
}

/// Wigner small-d `d^l_{mk}(β)` from the explicit factorial sum.
///
/// Reference-grade evaluation for `l <= 32`; the alternating sum loses
/// accuracy at high degree, see [`wigner_d_matrices`] for the production path.
pub fn wigner_d_small<T: Real>(l: usize, m: i64, k: i64, beta: T) -> Result<T> {
    check_indices(l, m, k)?;
    if l > FACTORIAL_SUM_MAX_L {
        return Err(Error::domain(format!("factorial-sum Wigner d limited to l <= {FACTORIAL_SUM_MAX_L}, got {l}")));
    }
    let lf = LogFactorial::<T>::new(2 * l + 1);
    let half = beta / T::lit(2.0);
    let (sn, c) = half.sin_cos();
    let li = l as i64;
    let lo = 0.max(k - m);
    let hi = (li + k).min(li - m);
    let mut sum = T::zero();
    for s in lo..=hi {
        sum += factorial_sum_term(&lf, li, m, k, s, c, sn);
    }
    Ok(sum)
}

/// Wigner `D^l_{mk}(α, β, γ) = e^{-imα} d^l_{mk}(β) e^{-ikγ}`.
#[allow(non_snake_case)]
pub fn wigner_D<T: Real>(l: usize, m: i64, k: i64, angles: &WignerAngles<T>) -> Result<Complex<T>> {
    let d = wigner_d_small(l, m, k, angles.beta)?;
    let phase = -(T::from_i64(m).unwrap() * angles.alpha + T::from_i64(k).unwrap() * angles.gamma);
    Ok(Complex::from_polar(d, phase))
}

/// Full `(2l+1) x (2l+1)` Wigner D matrix (factorial-sum route), row-major
/// with row `m + l` and column `k + l`.
#[allow(non_snake_case)]
pub fn wigner_D_matrix<T: Real>(l: usize, angles: &WignerAngles<T>) -> Result<Vec<Complex<T>>> {
    let li = l as i64;
    let mut out = Vec::with_capacity((2 * l + 1) * (2 * l + 1));
    for m in -li..=li {
        for k in -li..=li {
            out.push(wigner_D(l, m, k, angles)?);
        }
    }
    Ok(out)
}

/// Small-d matrices `d^l(β)` for every `l = 0..=l_max`, row-major per degree.
///
/// Each `(m, k)` column is seeded at `l0 = max(|m|, |k|)`, where the
/// factorial sum has a single term, then advanced by the three-term
/// recurrence in `l`. Stable for all supported degrees.
pub fn wigner_d_matrices<T: Real>(l_max: usize, beta: T) -> Vec<Vec<T>> {
    let lf = LogFactorial::<T>::new(2 * l_max + 1);
    let (sn, c) = (beta / T::lit(2.0)).sin_cos();
    let x = beta.cos();
    let mut out: Vec<Vec<T>> = (0..=l_max).map(|l| vec![T::zero(); (2 * l + 1) * (2 * l + 1)]).collect();
    let lm = l_max as i64;
    for m in -lm..=lm {
        for k in -lm..=lm {
            let l0 = m.abs().max(k.abs());
            // the single surviving index of the factorial sum at l0
            let s = 0.max(k - m);
            let mut prev = T::zero();
            let mut cur = factorial_sum_term(&lf, l0, m, k, s, c, sn);
            let put = |out: &mut Vec<Vec<T>>, l: i64, v: T| {
                let dim = 2 * l + 1;
                out[l as usize][((m + l) * dim + (k + l)) as usize] = v;
            };
            put(&mut out, l0, cur);
            for l in l0..lm {
                let next = if l == 0 {
                    x
                } else {
                    let lt = T::from_i64(l).unwrap();
                    let (mt, kt) = (T::from_i64(m).unwrap(), T::from_i64(k).unwrap());
                    let lp = lt + T::one();
                    let lhs = ((lp * lp - mt * mt) * (lp * lp - kt * kt)).sqrt() * lt;
                    let a = T::from_i64(2 * l + 1).unwrap() * (lt * lp * x - mt * kt);
                    let b = lp * ((lt * lt - mt * mt) * (lt * lt - kt * kt)).sqrt();
                    (a * cur - b * prev) / lhs
                };
                prev = cur;
                cur = next;
                put(&mut out, l + 1, cur);
            }
        }
    }
    out
}

/// Wigner D matrices for every `l = 0..=l_max` (recurrence route), row-major.
#[allow(non_snake_case)]
pub fn wigner_D_matrices<T: Real>(l_max: usize, angles: &WignerAngles<T>) -> Vec<Vec<Complex<T>>> {
    let small = wigner_d_matrices(l_max, angles.beta);
    small
        .into_iter()
        .enumerate()
        .map(|(l, d)| {
            let li = l as i64;
            let dim = 2 * l + 1;
            let mut out = Vec::with_capacity(dim * dim);
            for m in -li..=li {
                for k in -li..=li {
                    let v = d[((m + li) * dim as i64 + (k + li)) as usize];
                    let phase = -(T::from_i64(m).unwrap() * angles.alpha + T::from_i64(k).unwrap() * angles.gamma);
                    out.push(Complex::from_polar(v, phase));
                }
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_angles(rng: &mut ChaCha8Rng) -> WignerAngles<f64> {
        WignerAngles::new(
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..2.0 * PI),
        )
    }

    fn matmul(a: &[Complex<f64>], b: &[Complex<f64>], n: usize) -> Vec<Complex<f64>> {
        let mut out = vec![Complex::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|t| a[i * n + t] * b[t * n + j]).sum();
            }
        }
        out
    }

    #[test]
    fn small_d_examples() {
        for l in 0..5usize {
            for m in -(l as i64)..=l as i64 {
                for k in -(l as i64)..=l as i64 {
                    let v = wigner_d_small(l, m, k, 0.0f64).unwrap();
                    let e = if m == k { 1.0 } else { 0.0 };
                    assert!((v - e).abs() < 1e-14);
                }
            }
        }
        for &b in &[0.3f64, 1.1, 2.9] {
            assert!((wigner_d_small(1, 0, 0, b).unwrap() - b.cos()).abs() < 1e-15);
            assert!((wigner_d_small(1, 1, 1, b).unwrap() - (1.0 + b.cos()) / 2.0).abs() < 1e-15);
            assert!((wigner_d_small(1, 1, 0, b).unwrap() + b.sin() / 2f64.sqrt()).abs() < 1e-15);
        }
        assert!(wigner_d_small(2, 3, 0, 0.1f64).is_err());
        assert!(wigner_d_small(33, 0, 0, 0.1f64).is_err());
    }

    #[test]
    fn big_d_trivial_cases() {
        let id = WignerAngles::<f64>::identity();
        assert_eq!(wigner_D(0, 0, 0, &WignerAngles::new(1.0, 2.0, 3.0)).unwrap(), Complex::new(1.0, 0.0));
        for m in -2..=2i64 {
            for k in -2..=2i64 {
                let v = wigner_D(2, m, k, &id).unwrap();
                let e = if m == k { 1.0 } else { 0.0 };
                assert!((v - e).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_angles(&mut rng);
            for l in 0..=8 {
                let n = 2 * l + 1;
                let d = wigner_D_matrix(l, &a).unwrap();
                let dh: Vec<_> = (0..n * n).map(|i| d[(i % n) * n + i / n].conj()).collect();
                let p = matmul(&d, &dh, n);
                for i in 0..n {
                    for j in 0..n {
                        let e = if i == j { 1.0 } else { 0.0 };
                        assert!((p[i * n + j] - e).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn composition_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let r1 = random_angles(&mut rng);
            let r2 = random_angles(&mut rng);
            let r12 = r1.compose(&r2);
            for l in 0..=4 {
                let n = 2 * l + 1;
                let p = matmul(&wigner_D_matrix(l, &r1).unwrap(), &wigner_D_matrix(l, &r2).unwrap(), n);
                let d12 = wigner_D_matrix(l, &r12).unwrap();
                for i in 0..n * n {
                    assert!((p[i] - d12[i]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn recurrence_route_matches_factorial_sum() {
        for &b in &[0.0f64, 0.2, 1.3, PI / 2.0, 2.7, PI] {
            let all = wigner_d_matrices(12, b);
            for l in 0..=12usize {
                let li = l as i64;
                let n = 2 * l + 1;
                for m in -li..=li {
                    for k in -li..=li {
                        let a = all[l][((m + li) * n as i64 + k + li) as usize];
                        let e = wigner_d_small(l, m, k, b).unwrap();
                        // the alternating sum itself carries ~1e-12 error by l = 12
                        assert!((a - e).abs() < 1e-10, "l={l} m={m} k={k} b={b}: {a} vs {e}");
                    }
                }
            }
        }
    }

    #[test]
    fn recurrence_route_matches_high_precision_values() {
        // 40-digit evaluations of the factorial sum (mpmath).
        let all = wigner_d_matrices(12, 1.3f64);
        let n = 25;
        let v = all[12][((-1 + 12) * n + (-3 + 12)) as usize];
        assert!((v - 0.216_152_729_284_589_62).abs() < 1e-14);
    }

    #[test]
    fn recurrence_route_orthogonal_at_high_degree() {
        let all = wigner_d_matrices(64, 1.234f64);
        for l in [20usize, 40, 64] {
            let n = 2 * l + 1;
            let d = &all[l];
            for i in (0..n).step_by(7) {
                for j in (0..n).step_by(5) {
                    let dot: f64 = (0..n).map(|t| d[i * n + t] * d[j * n + t]).sum();
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - e).abs() < 1e-10, "l={l} ({i},{j}) {dot}");
                }
            }
        }
    }

    #[test]
    fn angles_reduce_and_roundtrip_matrix() {
        let a = WignerAngles::new(-0.5f64, 4.0, 7.0);
        assert!(a.alpha() >= 0.0 && a.alpha() < 2.0 * PI);
        assert!(a.beta() >= 0.0 && a.beta() <= PI);
        assert!(a.gamma() >= 0.0 && a.gamma() < 2.0 * PI);
        let raw = {
            let b = WignerAngles { alpha: -0.5f64, beta: 4.0, gamma: 7.0 };
            b.to_matrix()
        };
        let red = a.to_matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert!((raw[i][j] - red[i][j]).abs() < 1e-14);
            }
        }
        let back = WignerAngles::from_matrix(&red).to_matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert!((back[i][j] - red[i][j]).abs() < 1e-13);
            }
        }
        assert!(WignerAngles::<f64>::new(0.0, 0.0, 0.0).is_identity());
    }
}
