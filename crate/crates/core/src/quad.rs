//! Adaptive Gauss-Kronrod (10/21) quadrature on finite intervals.
//!
//! Generic over real and complex integrands. Breakpoints may be supplied to
//! seed the subdivision at known features.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

/// Values that can be integrated: reals and complex numbers.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel, max_intervals: 4000 }
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

fn kronrod<T: Scalar>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> Result<Panel<T>> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = T::zero();
    let mut samples = [T::zero(); 21];
    samples[20] = fc;
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        samples[2 * j] = f1;
        samples[2 * j + 1] = f2;
        k = k + (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            g = g + (f1 + f2) * WG[j / 2];
        }
    }
    if !k.is_finite_value() {
        return Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")));
    }
    let mean = k * 0.5;
    let mut asc = (fc - mean).magnitude() * WGK[10];
    for j in 0..10 {
        asc += WGK[j] * ((samples[2 * j] - mean).magnitude() + (samples[2 * j + 1] - mean).magnitude());
    }
    asc *= h.abs();
    let raw = ((k - g) * h).magnitude();
    let error = if asc > 0.0 && raw > 0.0 {
        asc * (200.0 * raw / asc).powf(1.5).min(1.0)
    } else {
        raw
    };
    Ok(Panel { a, b, value: k * h, error })
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T: Scalar>(f: impl Fn(f64) -> T, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<T>> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the panels
/// delimited by `points` (which must be sorted ascending).
pub fn integrate_with_breaks<T: Scalar>(f: impl Fn(f64) -> T, points: &[f64], tol: Tolerance) -> Result<Estimate<T>> {
    if points.len() < 2 {
        return Err(Error::Domain("quadrature needs at least two points".into()));
    }
    if points.windows(2).any(|p| !(p[1] >= p[0])) {
        return Err(Error::Domain("quadrature breakpoints must be sorted".into()));
    }
    let mut panels = Vec::with_capacity(64);
    for p in points.windows(2) {
        if p[1] > p[0] {
            panels.push(kronrod(&f, p[0], p[1])?);
        }
    }
    loop {
        let (value, error, mass) = panels.iter().fold((T::zero(), 0.0, 0.0), |(v, e, m), p| {
            (v + p.value, e + p.error, m + p.value.magnitude())
        });
        // requests below the rounding floor are capped there
        let target = tol.abs.max(tol.rel * value.magnitude()).max(50.0 * f64::EPSILON * mass);
        if error <= target {
            return Ok(Estimate { value, error, intervals: panels.len() });
        }
        if panels.len() >= tol.max_intervals {
            return Err(Error::Quadrature { estimate: error, tolerance: target, intervals: panels.len() });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            return Err(Error::Quadrature { estimate: error, tolerance: target, intervals: panels.len() + 1 });
        }
        panels.push(kronrod(&f, a, m)?);
        panels.push(kronrod(&f, m, b)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| x.powi(5) - 3.0 * x * x, -1.0, 2.0, Tolerance::new(1e-14, 0.0)).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-13);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate(|x: f64| (-x * x).exp(), -10.0, 10.0, Tolerance::new(1e-14, 1e-14)).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_complex() {
        let t = 30.0;
        let r = integrate(
            |x: f64| Complex64::new(0.0, -x * t).exp(),
            0.0,
            1.0,
            Tolerance::new(1e-13, 0.0),
        )
        .unwrap();
        let exact = (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -t).exp()) / Complex64::new(0.0, t);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_with_breaks() {
        let r = integrate_with_breaks(|x: f64| x.abs().sqrt(), &[-1.0, 0.0, 1.0], Tolerance::new(1e-12, 0.0)).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn budget_exhaustion_reports_diagnostics() {
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-9, 1.0, Tolerance::new(1e-15, 0.0).with_max_intervals(5))
            .unwrap_err();
        match err {
            Error::Quadrature { intervals, estimate, .. } => {
                assert_eq!(intervals, 5);
                assert!(estimate > 1e-15);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unsorted_breaks_rejected() {
        assert!(integrate_with_breaks(|x: f64| x, &[1.0, 0.0], Tolerance::new(1e-10, 0.0)).is_err());
    }
}
