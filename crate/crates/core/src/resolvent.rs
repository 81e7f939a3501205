//! The Stieltjes function `F(z) = int exp(-2x^2) / (z + E x) dx`, its
//! continuation through the cut, and the resolvent built from it.
//!
//! With `zeta = sqrt(2) z / E`,
//!
//! * `Im z > 0`: `F(z) = -(i pi / E) w(zeta)`
//! * `Im z < 0`: `F(z) = (i pi / E) w(-zeta)`
//! * second sheet: `F_ell(z) = -(i pi / E) w(zeta)` for every `z`.

use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cerf::faddeeva_w;
use crate::error::{ensure_finite, Error, Result};
use crate::model::{p0_kernel, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SheetTag {
    Physical,
    SecondSheet,
}

fn zeta(z: Complex64, params: &ModelParams) -> Complex64 {
    z * (SQRT_2 / params.field_strength)
}

fn minus_i_pi_over_e(params: &ModelParams) -> Complex64 {
    Complex64::new(0.0, -PI / params.field_strength)
}

/// `F(z)` on the half plane containing `z`, matching the defining integral.
pub fn f_integral(z: Complex64, params: &ModelParams) -> Result<Complex64> {
    ensure_finite(z, "z")?;
    if z.im == 0.0 {
        return Err(Error::BoundaryValue { z });
    }
    if z.im > 0.0 {
        Ok(minus_i_pi_over_e(params) * faddeeva_w(zeta(z, params))?)
    } else {
        Ok(-minus_i_pi_over_e(params) * faddeeva_w(-zeta(z, params))?)
    }
}

/// `F(xi + i0) - F(xi - i0) = -(2 pi i / E) exp(-2 xi^2 / E^2)`.
pub fn f_jump(xi: f64, params: &ModelParams) -> Complex64 {
    let e = params.field_strength;
    Complex64::new(0.0, -2.0 * PI / e * (-2.0 * xi * xi / (e * e)).exp())
}

/// Continuation of the upper-half-plane branch to the whole plane.
pub fn f_ell(z: Complex64, params: &ModelParams) -> Result<Complex64> {
    ensure_finite(z, "z")?;
    Ok(minus_i_pi_over_e(params) * faddeeva_w(zeta(z, params))?)
}

/// Boundary value `F(xi + i0)` at real energy `xi`.
pub fn f_upper_edge(xi: f64, params: &ModelParams) -> Result<Complex64> {
    f_ell(Complex64::new(xi, 0.0), params)
}

/// Boundary value `F(xi - i0)` at real energy `xi`.
pub fn f_lower_edge(xi: f64, params: &ModelParams) -> Result<Complex64> {
    ensure_finite(Complex64::new(xi, 0.0), "xi")?;
    Ok(-minus_i_pi_over_e(params) * faddeeva_w(Complex64::new(-xi * SQRT_2 / params.field_strength, 0.0))?)
}

fn branch_value(z: Complex64, params: &ModelParams, sheet: SheetTag) -> Result<Complex64> {
    match sheet {
        SheetTag::Physical => f_integral(z, params),
        SheetTag::SecondSheet => f_ell(z, params),
    }
}

fn checked_denominator(z: Complex64, kappa_f: Complex64) -> Result<Complex64> {
    let d = Complex64::new(1.0, 0.0) - kappa_f;
    if d.norm() < 1e-13 * (1.0 + kappa_f.norm()) {
        return Err(Error::PoleProximity { z, denominator: d.norm() });
    }
    Ok(d)
}

/// Resolvent kernel `<x|G(z)|x'>` split into its singular and smooth parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    /// Coefficient of `delta(x - x')`, equal to `1/(z + E x)`.
    pub delta_coefficient: Complex64,
    pub smooth: Complex64,
}

pub fn g_kernel(x: f64, xp: f64, z: Complex64, params: &ModelParams) -> Result<KernelValue> {
    let f = f_integral(z, params)?;
    let kf = params.kappa() * f;
    let d = checked_denominator(z, kf)?;
    let e = params.field_strength;
    let ax = z + e * x;
    let axp = z + e * xp;
    let smooth = params.coupling * p0_kernel(x, xp) / (ax * axp * d);
    Ok(KernelValue { delta_coefficient: 1.0 / ax, smooth })
}

/// `(phi|G(z)|phi) = sqrt(2/pi) F / (1 - lambda sqrt(2/pi) F)` on the chosen sheet.
pub fn phi_g_phi(z: Complex64, params: &ModelParams, sheet: SheetTag) -> Result<Complex64> {
    let f = branch_value(z, params, sheet)?;
    let d = checked_denominator(z, params.kappa() * f)?;
    Ok(FRAC_2_PI.sqrt() * f / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_with_breaks, Tolerance};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(e: f64, l: f64) -> ModelParams {
        ModelParams::new(e, l).unwrap()
    }

    fn f_quadrature(z: Complex64, e: f64) -> Complex64 {
        let pole = (-z.re / e).clamp(-4.6, 4.6);
        integrate_with_breaks(
            |x: f64| (-2.0 * x * x).exp() / (z + e * x),
            &[-4.6, pole, 4.6],
            Tolerance::new(1e-13, 1e-12),
        )
        .unwrap()
        .value
    }

    #[test]
    fn large_imaginary_asymptotics() {
        let f = f_integral(c(0.0, 100.0), &p(1.0, 1.0)).unwrap();
        assert!((f - c(0.0, -0.012_533)).norm() < 1e-4);
    }

    #[test]
    fn matches_quadrature_at_one_plus_i() {
        let z = c(1.0, 1.0);
        let f = f_integral(z, &p(1.0, 1.0)).unwrap();
        assert!((f - f_quadrature(z, 1.0)).norm() / f.norm() < 1e-10);
        let z = c(-0.3, -0.2);
        let f = f_integral(z, &p(1.7, 1.0)).unwrap();
        assert!((f - f_quadrature(z, 1.7)).norm() / f.norm() < 1e-10);
    }

    #[test]
    fn real_argument_is_rejected() {
        assert!(matches!(f_integral(c(0.5, 0.0), &p(1.0, 1.0)), Err(Error::BoundaryValue { .. })));
    }

    #[test]
    fn conjugate_symmetry_at_sample() {
        let z = c(-2.0, 0.5);
        let pp = p(1.0, 2.0);
        let a = f_integral(z.conj(), &pp).unwrap();
        let b = f_integral(z, &pp).unwrap().conj();
        assert!((a - b).norm() <= 1e-15 * b.norm());
    }

    #[test]
    fn jump_values() {
        let pp = p(1.0, 1.0);
        assert!((f_jump(0.0, &pp) - c(0.0, -2.0 * PI)).norm() < 1e-15);
        assert!((f_jump(1.0, &pp) - c(0.0, -2.0 * PI * (-2.0f64).exp())).norm() < 1e-15);
        let eps = 1e-6;
        let num = f_integral(c(0.5, eps), &pp).unwrap() - f_integral(c(0.5, -eps), &pp).unwrap();
        assert!((num - f_jump(0.5, &pp)).norm() / f_jump(0.5, &pp).norm() < 1e-5);
    }

    #[test]
    fn jump_converges_at_first_order() {
        let pp = p(1.3, 1.0);
        let xi = 0.4;
        let errs: Vec<f64> = [1e-4, 1e-5, 1e-6]
            .iter()
            .map(|&eps| {
                let num = f_integral(c(xi, eps), &pp).unwrap() - f_integral(c(xi, -eps), &pp).unwrap();
                (num - f_jump(xi, &pp)).norm()
            })
            .collect();
        assert!(errs[0] < 1e-3);
        assert!(errs[1] < errs[0] / 5.0 && errs[2] < errs[1] / 5.0, "{errs:?}");
    }

    #[test]
    fn spectral_density_sign() {
        let pp = p(0.8, 1.0);
        for i in 0..=200 {
            let xi = -10.0 + 0.1 * i as f64;
            assert!(f_integral(c(xi, 1e-8), &pp).unwrap().im < 0.0);
        }
    }

    #[test]
    fn second_sheet_continuity_and_closed_form() {
        let pp = p(1.0, 1.0);
        let z = c(1.0, 1.0);
        assert_eq!(f_ell(z, &pp).unwrap(), f_integral(z, &pp).unwrap());
        let d = 1e-8;
        let gap = (f_ell(c(0.5, -d), &pp).unwrap() - f_integral(c(0.5, d), &pp).unwrap()).norm();
        assert!(gap < 1e-6);
        // lower branch minus the continued jump
        let z = c(-4.0, -0.1);
        let e = pp.field_strength;
        let composed = f_integral(z, &pp).unwrap()
            - Complex64::new(0.0, 2.0 * PI / e) * (-2.0 * z * z / (e * e)).exp();
        let direct = f_ell(z, &pp).unwrap();
        assert!((composed - direct).norm() / direct.norm() < 1e-10);
    }

    #[test]
    fn second_sheet_is_analytic_across_the_axis() {
        // Taylor extrapolation from samples above the axis
        let pp = p(1.0, 1.0);
        let x0 = c(0.7, 0.05);
        let h = 0.01;
        let f = |z: Complex64| f_ell(z, &pp).unwrap();
        let d1 = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
        let d2 = (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / (h * h);
        let d3 = (f(x0 + 2.0 * h) - 2.0 * f(x0 + h) + 2.0 * f(x0 - h) - f(x0 - 2.0 * h)) / (2.0 * h * h * h);
        let step = c(0.0, -0.06);
        let taylor = f(x0) + d1 * step + d2 * step * step / 2.0 + d3 * step * step * step / 6.0;
        assert!((taylor - f(x0 + step)).norm() < 1e-4 * f(x0).norm());
        // the defining-integral branch is not analytic there
        assert!((f_integral(x0 + step, &pp).unwrap() - f(x0 + step)).norm() > 1.0);
    }

    #[test]
    fn kernel_properties() {
        let z = c(1.0, 1.0);
        let free = g_kernel(0.2, -1.1, z, &p(1.0, 0.0)).unwrap();
        assert_eq!(free.smooth, c(0.0, 0.0));
        let pp = p(1.0, 2.0);
        let a = g_kernel(0.2, -1.1, z, &pp).unwrap().smooth;
        let b = g_kernel(-1.1, 0.2, z, &pp).unwrap().smooth;
        assert!((a - b).norm() <= 1e-15 * a.norm());
    }

    #[test]
    fn kernel_solves_second_resolvent_equation() {
        let pp = p(1.0, 2.0);
        let z = c(0.4, 0.7);
        let (x, xp) = (0.3, -0.5);
        let e = pp.field_strength;
        let smooth = |u: f64| g_kernel(u, xp, z, &pp).unwrap().smooth;
        let conv = integrate_with_breaks(
            |u: f64| p0_kernel(x, u) * smooth(u),
            &[-8.0, -z.re / e, 8.0],
            Tolerance::new(1e-14, 1e-12),
        )
        .unwrap()
        .value;
        let rhs = pp.coupling * p0_kernel(x, xp) / ((z + e * x) * (z + e * xp)) + pp.coupling * conv / (z + e * x);
        let lhs = g_kernel(x, xp, z, &pp).unwrap().smooth;
        assert!((lhs - rhs).norm() / lhs.norm() < 1e-10);
    }

    #[test]
    fn second_sheet_pole_is_flagged() {
        let pp = p(1.0, 2.0);
        let root = c(2.136_648_689_884_37, -0.000_993_408_404_667_008);
        assert!(matches!(
            phi_g_phi(root, &pp, SheetTag::SecondSheet),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn phi_g_phi_limits() {
        let z = c(0.7, 0.3);
        let free = phi_g_phi(z, &p(1.0, 0.0), SheetTag::Physical).unwrap();
        assert_eq!(free, FRAC_2_PI.sqrt() * f_integral(z, &p(1.0, 0.0)).unwrap());
        let far = phi_g_phi(c(0.0, 100.0), &p(1.0, 2.0), SheetTag::Physical).unwrap();
        assert!((far - c(0.0, -0.01)).norm() < 1e-3);
    }

    #[test]
    fn phi_g_phi_matches_double_quadrature() {
        let pp = p(1.0, 2.0);
        let z = c(1.0, 1.0);
        let e = pp.field_strength;
        let phi = crate::model::DefectState;
        let tol = Tolerance::new(1e-13, 1e-11);
        let direct = integrate_with_breaks(|x: f64| phi.eval(x).powi(2) / (z + e * x), &[-7.0, -1.0, 7.0], tol)
            .unwrap()
            .value;
        let inner = |x: f64| {
            integrate_with_breaks(
                |xp: f64| phi.eval(xp) * g_kernel(x, xp, z, &pp).unwrap().smooth,
                &[-7.0, -1.0, 7.0],
                tol,
            )
            .unwrap()
            .value
        };
        let double = integrate_with_breaks(|x: f64| phi.eval(x) * inner(x), &[-7.0, -1.0, 7.0], tol)
            .unwrap()
            .value;
        let expected = direct + double;
        let got = phi_g_phi(z, &pp, SheetTag::Physical).unwrap();
        assert!((got - expected).norm() / got.norm() < 1e-9, "{got} vs {expected}");
    }

    proptest! {
        #[test]
        fn schwarz_reflection(re in -12.0f64..12.0, im in 0.01f64..10.0, e in 0.3f64..3.0) {
            let pp = p(e, 1.0);
            let z = c(re, im);
            let a = f_integral(z.conj(), &pp).unwrap();
            let b = f_integral(z, &pp).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-12 * b.norm());
        }

        #[test]
        fn upper_half_plane_sign(re in -12.0f64..12.0, im in 1e-6f64..10.0, e in 0.3f64..3.0) {
            prop_assert!(f_integral(c(re, im), &p(e, 1.0)).unwrap().im < 0.0);
        }

        #[test]
        fn sheets_agree_above_axis(re in -8.0f64..8.0, im in 0.01f64..8.0, l in -5.0f64..5.0) {
            let pp = p(1.0, l);
            let z = c(re, im);
            let a = phi_g_phi(z, &pp, SheetTag::Physical).unwrap();
            let b = phi_g_phi(z, &pp, SheetTag::SecondSheet).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn edges_are_limits(xi in -6.0f64..6.0, e in 0.5f64..2.0) {
            let pp = p(e, 1.0);
            let up = f_upper_edge(xi, &pp).unwrap();
            let down = f_lower_edge(xi, &pp).unwrap();
            prop_assert!((up - f_integral(c(xi, 1e-9), &pp).unwrap()).norm() < 1e-7);
            prop_assert!((down - f_integral(c(xi, -1e-9), &pp).unwrap()).norm() < 1e-7);
            prop_assert!((up - down - f_jump(xi, &pp)).norm() < 1e-12);
        }
    }
}
