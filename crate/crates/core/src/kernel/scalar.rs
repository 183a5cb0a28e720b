//! Scalar primitives shared by every module.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `ē(t) = exp(-2πi t)`.
///
/// The argument is reduced modulo one before the exponential so that large
/// arguments keep full phase accuracy.
pub fn ebar(t: f64) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(Error::NonFinite("ebar"));
    }
    Ok(ebar_unchecked(t))
}

/// Infallible `ē` for inner loops; non-finite input yields NaN.
#[inline]
pub fn ebar_unchecked(t: f64) -> Complex64 {
    let frac = t - t.round();
    let (s, c) = (-2.0 * std::f64::consts::PI * frac).sin_cos();
    Complex64::new(c, s)
}

/// The deformation function `η_λ(r) = (e^{2λr} - 1) / (2λ)`, with `η_0(r) = r`.
///
/// Small `|2λr|` goes through a series so the `λ → 0` limit is continuous.
pub fn eta(lambda: f64, r: f64) -> f64 {
    let x = 2.0 * lambda * r;
    if x.abs() < 1e-4 {
        r * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0 + x * x * x * x / 120.0)
    } else {
        x.exp_m1() / (2.0 * lambda)
    }
}

/// Euclidean inner product on `R^n`.
pub fn beta(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(dot(x, y))
}

#[inline]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ebar_values() {
        assert_abs_diff_eq!(ebar(0.0).unwrap().re, 1.0, epsilon = 1e-15);
        let half = ebar(0.5).unwrap();
        assert_abs_diff_eq!(half.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(half.im, 0.0, epsilon = 1e-15);
        let quarter = ebar(0.25).unwrap();
        assert_abs_diff_eq!(quarter.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(quarter.im, -1.0, epsilon = 1e-15);
        assert!(ebar(f64::NAN).is_err());
        assert!(ebar(f64::INFINITY).is_err());
    }

    #[test]
    fn ebar_is_periodic_character() {
        for &(s, t) in &[(0.1, 0.7), (-3.3, 12.25), (1e6 + 0.125, -0.5)] {
            let lhs = ebar(s + t).unwrap();
            let rhs = ebar(s).unwrap() * ebar(t).unwrap();
            assert!((lhs - rhs).norm() < 1e-9);
            assert!((ebar(s + 1.0).unwrap() - ebar(s).unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn eta_values() {
        for lambda in [-2.0, 0.0, 0.5, 1.0] {
            assert_eq!(eta(lambda, 0.0), 0.0);
        }
        assert_eq!(eta(0.0, 1.7), 1.7);
        assert_abs_diff_eq!(eta(0.5, 1.0), std::f64::consts::E - 1.0, epsilon = 1e-14);
        for r in [-2.0, -0.1, 0.3, 4.0] {
            assert_eq!(eta(1.0, r).signum(), f64::signum(r));
        }
    }

    #[test]
    fn eta_continuous_at_zero_lambda() {
        for r in [-1.5, 0.2, 3.0] {
            let mut prev = f64::INFINITY;
            for lambda in [1e-3, 1e-6, 1e-9] {
                let d = (eta(lambda, r) - eta(0.0, r)).abs();
                assert!(d < prev);
                assert!(d <= 2.0 * lambda * r * r + 1e-15);
                prev = d;
            }
        }
        // both branches agree across the switch-over
        let r: f64 = 1.0;
        let lam: f64 = 0.499e-4;
        let direct = (2.0 * lam * r).exp_m1() / (2.0 * lam);
        assert!((eta(lam, r) - direct).abs() < 1e-14);
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(beta(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(beta(&[5.0, -2.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            beta(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
