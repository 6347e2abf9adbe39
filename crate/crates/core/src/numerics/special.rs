//! q-Pochhammer symbols and the renormalised Jacobi theta function.

use num_complex::Complex;

use super::Scalar;
use crate::error::{QkzError, Result};

/// `q^x` for complex `x` and real base `0 < q < 1`.
#[inline]
pub fn qpow<T: Scalar>(q: T, x: Complex<T>) -> Complex<T> {
    (x * q.ln()).exp()
}

/// `q^x` for real `x`.
#[inline]
pub fn qpow_re<T: Scalar>(q: T, x: T) -> Complex<T> {
    Complex::new(q.powf(x), T::zero())
}

/// Relative size below which a factor `1 - q^j x` is treated as exactly one.
#[inline]
fn tail_cutoff<T: Scalar>() -> T {
    T::epsilon() * T::from_f64(0.05).unwrap()
}

const MAX_FACTORS: usize = 200_000;

/// `(x; q)_inf = prod_{j >= 0} (1 - q^j x)`.
pub fn qpoch<T: Scalar>(x: Complex<T>, q: T) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let cut = tail_cutoff::<T>();
    let mut acc = one;
    let mut t = x;
    for _ in 0..MAX_FACTORS {
        acc *= one - t;
        if t.norm() < cut {
            break;
        }
        t *= q;
    }
    acc
}

/// `(x; q)_N`, the finite product of the first `N` factors.
pub fn qpoch_finite<T: Scalar>(x: Complex<T>, q: T, n: usize) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let mut acc = one;
    let mut t = x;
    for _ in 0..n {
        acc *= one - t;
        t *= q;
    }
    acc
}

/// Product of `(x_i; q)_inf` over a slice.
pub fn qpoch_prod<T: Scalar>(xs: &[Complex<T>], q: T) -> Complex<T> {
    xs.iter()
        .fold(Complex::new(T::one(), T::zero()), |acc, &x| acc * qpoch(x, q))
}

/// `theta(x; q) = (x; q)_inf (q/x; q)_inf`.
pub fn theta<T: Scalar>(x: Complex<T>, q: T) -> Result<Complex<T>> {
    if x.norm() == T::zero() {
        return Err(QkzError::Pole("theta at x = 0".into()));
    }
    Ok(qpoch(x, q) * qpoch(Complex::new(q, T::zero()) / x, q))
}

/// Product of theta functions over a slice.
pub fn theta_prod<T: Scalar>(xs: &[Complex<T>], q: T) -> Result<Complex<T>> {
    let mut acc = Complex::new(T::one(), T::zero());
    for &x in xs {
        acc *= theta(x, q)?;
    }
    Ok(acc)
}

/// Ratio of theta products, failing if the denominator vanishes.
pub fn theta_ratio<T: Scalar>(num: &[Complex<T>], den: &[Complex<T>], q: T) -> Result<Complex<T>> {
    let d = theta_prod(den, q)?;
    if d.norm() == T::zero() {
        return Err(QkzError::Pole("theta denominator vanishes".into()));
    }
    Ok(theta_prod(num, q)? / d)
}

/// Absolute residual of the four-term theta identity
/// `th(x nu, x/nu, la mu, mu/la) - th(x la, x/la, mu nu, mu/nu) + (mu/la) th(x mu, x/mu, la nu, la/nu)`.
pub fn theta_quadruple_identity_residual<T: Scalar>(
    x: Complex<T>,
    nu: Complex<T>,
    la: Complex<T>,
    mu: Complex<T>,
    q: T,
) -> Result<T> {
    let t1 = theta_prod(&[x * nu, x / nu, la * mu, mu / la], q)?;
    let t2 = theta_prod(&[x * la, x / la, mu * nu, mu / nu], q)?;
    let t3 = theta_prod(&[x * mu, x / mu, la * nu, la / nu], q)?;
    Ok((t1 - t2 + mu / la * t3).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn qpoch_trivial_values() {
        assert_eq!(qpoch(c(0.0, 0.0), 0.4), c(1.0, 0.0));
        assert_eq!(qpoch(c(1.0, 0.0), 0.4), c(0.0, 0.0));
    }

    #[test]
    fn qpoch_matches_long_partial_product() {
        let direct = qpoch_finite(c(0.5, 0.0), 0.3, 200);
        assert!((qpoch(c(0.5, 0.0), 0.3) - direct).norm() < 1e-13);
    }

    #[test]
    fn theta_zeros_and_pole() {
        assert!(theta(c(1.0, 0.0), 0.3).unwrap().norm() < 1e-15);
        assert!(theta(c(0.3, 0.0), 0.3).unwrap().norm() < 1e-15);
        assert!(theta(c(0.0, 0.0), 0.3).is_err());
    }

    #[test]
    fn theta_matches_triple_product_sum() {
        // Jacobi triple product: sum_k (-1)^k q^{k(k-1)/2} x^k = (q;q) theta(x;q)
        let (x, q) = (c(2.0, 0.0), 0.5f64);
        let mut s = c(0.0, 0.0);
        for k in -60i32..=60 {
            let kf = k as f64;
            s += c((-1f64).powi(k), 0.0) * q.powf(kf * (kf - 1.0) / 2.0) * x.powi(k);
        }
        let lhs = s / qpoch(c(q, 0.0), q);
        assert!((lhs - theta(x, q).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn theta_identity_degenerate_and_fixed_point() {
        let r = theta_quadruple_identity_residual(c(2.0, 0.0), c(3.0, 0.0), c(3.0, 0.0), c(5.0, 0.0), 0.3)
            .unwrap();
        assert!(r < 1e-9);
        let r = theta_quadruple_identity_residual(c(1.3, 0.0), c(0.7, 0.0), c(1.1, 0.0), c(0.9, 0.0), 0.2)
            .unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn single_precision_is_usable() {
        let v = qpoch(Complex::new(0.5f32, 0.0), 0.3f32);
        let d = qpoch_finite(Complex::new(0.5f32, 0.0), 0.3f32, 60);
        assert!((v - d).norm() < 1e-6);
    }
}
