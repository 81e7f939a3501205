use num_complex::Complex64;
use stark_core::laxphillips::{f_below, wave_op_apply, WaveSign};
use stark_core::model::ModelParams;
use stark_core::quad::{integrate_with_breaks, Tolerance};
use stark_core::resolvent::f_integral;

const RESONANCE_X: f64 = -2.136_648_689_884_37;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gaussian(a: f64, s: f64, k: f64) -> impl Fn(f64) -> Complex64 + Sync {
    move |x: f64| c(-(x - a) * (x - a) / (2.0 * s * s), k * x).exp()
}

fn breaks(lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut b = vec![lo, hi];
    for w in [0.0, 1e-3, 1e-2, 1e-1] {
        for side in [-1.0, 1.0] {
            b.push(RESONANCE_X + side * w);
        }
    }
    b.extend_from_slice(extra);
    b.retain(|x| *x >= lo && *x <= hi);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn inner<F1, F2>(f1: &F1, f2: &F2, lo: f64, hi: f64) -> Complex64
where
    F1: Fn(f64) -> Complex64,
    F2: Fn(f64) -> Complex64,
{
    integrate_with_breaks(|x: f64| f1(x).conj() * f2(x), &breaks(lo, hi, &[]), Tolerance::new(1e-10, 0.0))
        .unwrap()
        .value
}

fn mapped<'a>(sign: WaveSign, f: &'a (dyn Fn(f64) -> Complex64 + Sync), p: &'a ModelParams) -> impl Fn(f64) -> Complex64 + 'a {
    move |x: f64| match wave_op_apply(sign, f, &[x], p) { Ok(v) => v[0], Err(e) => panic!("x={x:.17e} {e}") }
}

#[test]
fn wave_operators_preserve_gaussian_inner_products() {
    let p = ModelParams::new(1.0, 2.0).unwrap();
    let pairs = [
        (gaussian(0.0, 1.0, 0.0), gaussian(0.5, 0.8, 0.0)),
        (gaussian(-2.0, 0.5, 0.0), gaussian(-2.2, 0.7, 1.0)),
        (gaussian(-1.0, 1.2, -0.5), gaussian(1.0, 1.0, 0.5)),
        (gaussian(-2.1, 0.3, 0.0), gaussian(-2.1, 0.3, 0.0)),
        (gaussian(1.5, 0.6, 2.0), gaussian(-0.5, 1.5, 0.0)),
    ];
    for sign in [WaveSign::Plus, WaveSign::Minus] {
        for (k, (f1, f2)) in pairs.iter().enumerate() {
            let before = inner(f1, f2, -14.0, 14.0);
            let g1 = mapped(sign, f1, &p);
            let g2 = mapped(sign, f2, &p);
            let after = inner(&g1, &g2, -14.0, 14.0);
            let gap = (after - before).norm();
            assert!(gap <= 1e-6, "{sign:?} pair {k}: {before} -> {after}, gap {gap:.3e}");
        }
    }
}

// Direct evaluation of the kernel with a finite epsilon, Richardson-extrapolated to zero.
fn omega_plus_direct(f: &dyn Fn(f64) -> Complex64, x: f64, p: &ModelParams, eps: f64) -> Complex64 {
    let kappa = p.kappa();
    let e = p.field_strength;
    let integrand = |xp: f64| {
        let den = 1.0 - kappa * f_integral(c(-e * xp, -eps), p).unwrap();
        kappa * (-(x * x + xp * xp)).exp() * f(xp) / (c(e * (x - xp), -eps) * den)
    };
    let mut extra = Vec::new();
    for w in [0.0, 1.0, 10.0, 100.0, 1000.0] {
        extra.push(x - w * eps);
        extra.push(x + w * eps);
    }
    let b = breaks(-12.0, 12.0, &extra);
    let tail = integrate_with_breaks(integrand, &b, Tolerance::new(1e-12, 0.0).with_max_intervals(40_000))
        .unwrap()
        .value;
    f(x) + tail
}

#[test]
fn omega_plus_matches_direct_quadrature_on_hardy_input() {
    let p = ModelParams::new(1.0, 2.0).unwrap();
    // f(x) = int_0^inf e^{ipx} e^{-p} dp
    let hardy = |x: f64| 1.0 / c(1.0, -x);
    for x in [-3.0, -0.7, 0.0, 0.9, 2.5] {
        let pv = wave_op_apply(WaveSign::Plus, &hardy, &[x], &p).unwrap()[0];
        let e1 = omega_plus_direct(&hardy, x, &p, 2e-6);
        let e2 = omega_plus_direct(&hardy, x, &p, 1e-6);
        let direct = 2.0 * e2 - e1;
        assert!((pv - direct).norm() < 1e-6, "x = {x}: {pv} vs {direct}");
    }
}

#[test]
fn lower_boundary_value_is_analytic_from_below() {
    let p = ModelParams::new(1.0, 2.0).unwrap();
    let z = f_integral(c(0.8, -1e-9), &p).unwrap();
    assert!((z - f_below(-0.8, &p).unwrap()).norm() < 1e-7);
}
