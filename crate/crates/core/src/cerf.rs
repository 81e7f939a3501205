//! Complex error functions.
//!
//! The workhorse is the Faddeeva function `w(z) = exp(-z^2) erfc(-iz)`, which
//! is entire and bounded in the closed upper half plane. Every physics module
//! goes through `w` rather than composing `exp(-z^2)` with an unscaled `erfc`;
//! the unscaled product overflows long before `w` does.
//!
//! Evaluation regions in the upper half plane:
//!
//! * `|z| < 0.3`: Maclaurin series `sum (iz)^n / Gamma(n/2 + 1)`.
//! * `0.3 <= |z| < 6`: trapezoidal rule applied to `(i/pi) int e^{-t^2}/(z-t) dt`
//!   with step 0.5 and the pole correction term. The node lattice is shifted by
//!   half a step when `Re z` would otherwise land near a node. This is a
//!   rational approximation whose aliasing error is `exp(-pi^2/h^2) ~ 5e-18`.
//! * `|z| >= 6`: Laplace continued fraction, 60 levels, backward evaluation.
//!
//! The lower half plane uses `w(z) = 2 exp(-z^2) - w(-z)`.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};

const SERIES_RADIUS: f64 = 0.3;
const CF_RADIUS: f64 = 6.0;
const CF_DEPTH: usize = 60;
const TRAP_STEP: f64 = 0.5;
const TRAP_HALF_WIDTH: f64 = 7.0;

/// ln(f64::MAX), the largest exponent that `exp` can represent.
const LN_MAX: f64 = 709.782_712_893_384;

/// `1/sqrt(pi)`.
pub(crate) const FRAC_1_SQRT_PI: f64 = 0.5 * FRAC_2_SQRT_PI;

/// Faddeeva function `w(z) = exp(-z^2) erfc(-iz)`.
///
/// Fails with [`Error::Domain`] on non-finite input and with
/// [`Error::Overflow`] deep in the lower half plane where `|w|` exceeds the
/// double range (roughly `Im(z)^2 - Re(z)^2 > 709`).
pub fn faddeeva_w(z: Complex64) -> Result<Complex64> {
    ensure_finite(z, "argument of w")?;
    if z.im >= 0.0 {
        return Ok(w_upper(z));
    }
    // Lower half plane: reflect through the origin.
    let minus_z_sq = -z * z;
    if minus_z_sq.re + std::f64::consts::LN_2 > LN_MAX {
        return Err(Error::Overflow(format!(
            "w({z}) exceeds the double range (exp(-z^2) has log-magnitude {:.1})",
            minus_z_sq.re
        )));
    }
    let value = 2.0 * minus_z_sq.exp() - w_upper(-z);
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(format!("w({z}) is not representable")))
    }
}

/// Derivative `w'(z) = -2z w(z) + 2i/sqrt(pi)`.
pub fn faddeeva_w_prime(z: Complex64) -> Result<Complex64> {
    let w = faddeeva_w(z)?;
    Ok(derivative_from_value(z, w))
}

pub(crate) fn derivative_from_value(z: Complex64, w: Complex64) -> Complex64 {
    -2.0 * z * w + Complex64::new(0.0, FRAC_2_SQRT_PI)
}

/// Complex complementary error function, `erfc(z) = exp(-z^2) w(iz)`.
///
/// The unscaled function grows like `exp(Im(z)^2 - Re(z)^2)`; when that leaves
/// the double range the call fails with [`Error::Overflow`]. Callers that need
/// such arguments should work with [`faddeeva_w`] and carry the exponential
/// factor symbolically.
pub fn erfc_complex(z: Complex64) -> Result<Complex64> {
    ensure_finite(z, "argument of erfc")?;
    if z.re < 0.0 {
        return Ok(Complex64::new(2.0, 0.0) - erfc_right(-z)?);
    }
    erfc_right(z)
}

fn erfc_right(z: Complex64) -> Result<Complex64> {
    let minus_z_sq = -z * z;
    if minus_z_sq.re > LN_MAX {
        return Err(Error::Overflow(format!(
            "erfc({z}) overflows; use the scaled function faddeeva_w instead"
        )));
    }
    // Re z >= 0, so iz lies in the closed upper half plane.
    let w = w_upper(Complex64::new(-z.im, z.re));
    let value = minus_z_sq.exp() * w;
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(format!(
            "erfc({z}) overflows; use the scaled function faddeeva_w instead"
        )))
    }
}

/// Dawson's integral `D(x) = exp(-x^2) int_0^x exp(t^2) dt`.
///
/// Maclaurin series for `|x| < 0.2`, Rybicki's exponentially convergent
/// sampling formula (step 0.2) elsewhere.
pub fn dawson(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("argument of dawson must be finite, got {x}")));
    }
    let ax = x.abs();
    let value = if ax < 0.2 {
        dawson_series(ax)
    } else {
        dawson_rybicki(ax)
    };
    Ok(value.copysign(x))
}

fn dawson_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..40 {
        term *= -2.0 * x2 / (2 * n + 1) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn dawson_rybicki(x: f64) -> f64 {
    const H: f64 = 0.2;
    const TERMS: i64 = 37;
    // n0: even integer nearest x/h
    let n0 = 2.0 * (0.5 * x / H).round();
    let xp = x - n0 * H;
    let mut sum = 0.0;
    let mut k = -TERMS;
    while k <= TERMS {
        // odd offsets only
        let arg = xp - k as f64 * H;
        sum += (-arg * arg).exp() / (k as f64 + n0);
        k += 2;
    }
    sum * FRAC_1_SQRT_PI
}

/// `w` for `Im z >= 0`; `z` must be finite.
pub(crate) fn w_upper(z: Complex64) -> Complex64 {
    debug_assert!(z.im >= 0.0);
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut value = if r < SERIES_RADIUS {
        w_series(z)
    } else if r < CF_RADIUS {
        w_trapezoid(z)
    } else {
        w_continued_fraction(z)
    };
    if z.re == 0.0 {
        // real on the imaginary axis
        value.im = 0.0;
    }
    value
}

fn w_series(z: Complex64) -> Complex64 {
    // a_n = 1/Gamma(n/2 + 1), a_{n+2} = a_n / (n/2 + 1)
    let iz = Complex64::new(-z.im, z.re);
    let mut a_even = 1.0;
    let mut a_odd = FRAC_2_SQRT_PI;
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..60 {
        let a = if n % 2 == 0 { a_even } else { a_odd };
        let term = power * a;
        sum += term;
        if n > 4 && term.norm() < 1e-18 * sum.norm() {
            break;
        }
        if n % 2 == 0 {
            a_even /= n as f64 / 2.0 + 1.0;
        } else {
            a_odd /= n as f64 / 2.0 + 1.0;
        }
        power *= iz;
    }
    sum
}

fn w_trapezoid(z: Complex64) -> Complex64 {
    let h = TRAP_STEP;
    let frac = z.re / h - (z.re / h).floor();
    let offset = if (0.25..=0.75).contains(&frac) { 0.0 } else { 0.5 };
    let n_max = (TRAP_HALF_WIDTH / h).ceil() as i64 + 1;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in -n_max..=n_max {
        let t = (n as f64 + offset) * h;
        sum += (-t * t).exp() / (z - t);
    }
    let theta = Complex64::new(0.0, 2.0 * PI / h) * (z - offset * h);
    let q = theta.exp();
    let correction = 2.0 * (-z * z + theta).exp() / (Complex64::new(1.0, 0.0) - q);
    Complex64::new(0.0, h / PI) * sum - correction
}

fn w_continued_fraction(z: Complex64) -> Complex64 {
    let mut tail = Complex64::new(0.0, 0.0);
    for k in (1..=CF_DEPTH).rev() {
        tail = (0.5 * k as f64) / (z - tail);
    }
    let mut value = Complex64::new(0.0, FRAC_1_SQRT_PI) / (z - tail);
    if z.im == 0.0 {
        // the truncated fraction is purely imaginary on the axis
        value.re = (-z.re * z.re).exp();
    }
    value
}
