//! Resonance poles: zeros of `g(z) = 1 - lambda sqrt(2/pi) F_ell(z)`.
//!
//! `g` is entire and has no zeros in the closed upper half plane (the
//! Hamiltonian is self-adjoint), so every zero is a second-sheet resonance.
//! At a zero `z0`, `g'(z0) = 4 (z0 - lambda) / E^2`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cerf::{dawson, derivative_from_value, faddeeva_w};
use crate::error::{ensure_finite, Error, Result};
use crate::model::ModelParams;
use crate::resolvent::f_ell;

const MAX_ITERATIONS: usize = 200;
const CONVERGED_G: f64 = 1e-12;
const NARROW_RATIO: f64 = 1e-10;
const SCAN_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleMethod {
    NewtonDirect,
    TwoStagePerturbative,
    ArgumentPrinciple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleResult {
    pub z0: Complex64,
    /// Closed-form S-matrix residue, see [`residue_formula`].
    pub residue: Complex64,
    pub iterations: usize,
    pub converged: bool,
    pub final_g_magnitude: f64,
    pub method: PoleMethod,
    /// Set when Newton ended above the axis and the conjugate point was
    /// verified to be a zero.
    pub reflected: bool,
}

/// How the coupling enters the pole condition.
///
/// `AsDerived` is `g = 1 - lambda sqrt(2/pi) F_ell`. `ReferenceCoupling`
/// replaces `lambda` by `-lambda / sqrt(2 pi)`, i.e.
/// `g = 1 - i (lambda/E) w(sqrt(2) z / E)`; it is the only variant found that
/// puts the `lambda/E = 11` root at `Re z0 = -4.446`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleConvention {
    AsDerived,
    ReferenceCoupling,
}

impl PoleConvention {
    pub fn effective(&self, params: &ModelParams) -> ModelParams {
        match self {
            Self::AsDerived => *params,
            Self::ReferenceCoupling => ModelParams {
                field_strength: params.field_strength,
                coupling: -params.coupling / (2.0 * PI).sqrt(),
            },
        }
    }
}

fn zeta(z: Complex64, params: &ModelParams) -> Complex64 {
    z * (SQRT_2 / params.field_strength)
}

/// `g(z) = 1 - lambda sqrt(2/pi) F_ell(z)`.
pub fn g(z: Complex64, params: &ModelParams) -> Result<Complex64> {
    Ok(Complex64::new(1.0, 0.0) - params.kappa() * f_ell(z, params)?)
}

/// `g'(z)`, from `w'(zeta) = -2 zeta w + 2i/sqrt(pi)`.
pub fn g_prime(z: Complex64, params: &ModelParams) -> Result<Complex64> {
    ensure_finite(z, "z")?;
    let zt = zeta(z, params);
    let wp = derivative_from_value(zt, faddeeva_w(zt)?);
    let e = params.field_strength;
    Ok(params.kappa() * Complex64::new(0.0, PI / e) * (SQRT_2 / e) * wp)
}

fn g_and_prime(z: Complex64, params: &ModelParams) -> Result<(Complex64, Complex64)> {
    ensure_finite(z, "z")?;
    let zt = zeta(z, params);
    let w = faddeeva_w(zt)?;
    let e = params.field_strength;
    let a = params.kappa() * Complex64::new(0.0, PI / e);
    Ok((1.0 + a * w, a * (SQRT_2 / e) * derivative_from_value(zt, w)))
}

/// `g` on the real axis through Dawson's function and an explicit Gaussian:
/// `(Re g, Im g, d Re g / dx)`.
pub fn g_on_axis(x: f64, params: &ModelParams) -> Result<(f64, f64, f64)> {
    let e = params.field_strength;
    let z = SQRT_2 * x / e;
    let d = dawson(z)?;
    let a = 2.0 * params.kappa() * PI.sqrt() / e;
    let re = 1.0 - a * d;
    let im = params.kappa() * PI / e * (-z * z).exp();
    let dre = -a * (SQRT_2 / e) * (1.0 - 2.0 * z * d);
    Ok((re, im, dre))
}

fn require_coupling(params: &ModelParams) -> Result<()> {
    if params.coupling == 0.0 {
        Err(Error::NoPole)
    } else {
        Ok(())
    }
}

/// The printed S-matrix residue `(8 pi i / E^3) lambda sqrt(2/pi) exp(-2 z0^2/E^2) / (z0 - lambda)`.
pub fn residue_formula(z0: Complex64, params: &ModelParams) -> Result<Complex64> {
    let diff = z0 - params.coupling;
    if diff.norm() <= 1e-14 * (1.0 + params.coupling.abs()) {
        return Err(Error::DegenerateResidue);
    }
    let e = params.field_strength;
    let gauss = (-2.0 * z0 * z0 / (e * e)).exp();
    Ok(Complex64::new(0.0, 8.0 * PI / (e * e * e)) * params.kappa() * gauss / diff)
}

fn finish(
    z0: Complex64,
    iterations: usize,
    method: PoleMethod,
    reflected: bool,
    params: &ModelParams,
) -> Result<PoleResult> {
    let final_g_magnitude = g(z0, params)?.norm();
    let residue = residue_formula(z0, params).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    Ok(PoleResult {
        z0,
        residue,
        iterations,
        converged: final_g_magnitude <= CONVERGED_G,
        final_g_magnitude,
        method,
        reflected,
    })
}

/// Damped complex Newton iteration from `seed`.
pub fn find_pole(params: &ModelParams, seed: Complex64) -> Result<PoleResult> {
    require_coupling(params)?;
    ensure_finite(seed, "seed")?;
    let search_error = |reason: String, trajectory: Vec<Complex64>| Error::Search { reason, trajectory };
    let mut z = seed;
    let mut trajectory = vec![z];
    let (mut gz, mut gp) = g_and_prime(z, params)?;
    for it in 1..=MAX_ITERATIONS {
        if gz.norm() <= 1e-13 {
            return newton_result(z, it - 1, params, trajectory);
        }
        if gp.norm() == 0.0 {
            return Err(search_error("vanishing derivative".into(), trajectory));
        }
        let step = gz / gp;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let cand = z - lambda * step;
            if let Ok(pair) = g_and_prime(cand, params) {
                if pair.0.norm() < gz.norm() || lambda < 1e-6 {
                    accepted = Some((cand, pair));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((next, pair)) = accepted else {
            return Err(search_error(format!("no descent step from {z}"), trajectory));
        };
        let dz = (next - z).norm();
        z = next;
        (gz, gp) = pair;
        trajectory.push(z);
        if dz <= 1e-14 * (1.0 + z.norm()) {
            return newton_result(z, it, params, trajectory);
        }
    }
    Err(search_error(format!("no convergence after {MAX_ITERATIONS} iterations"), trajectory))
}

fn newton_result(
    z: Complex64,
    iterations: usize,
    params: &ModelParams,
    trajectory: Vec<Complex64>,
) -> Result<PoleResult> {
    if z.im <= 0.0 {
        return finish(z, iterations, PoleMethod::NewtonDirect, false, params);
    }
    let mirrored = z.conj();
    if g(mirrored, params)?.norm() <= CONVERGED_G {
        return finish(mirrored, iterations, PoleMethod::NewtonDirect, true, params);
    }
    Err(Error::Search {
        reason: format!("Newton ended above the axis at {z} and the conjugate point is not a zero"),
        trajectory,
    })
}

/// Root of `Re g` on `[a, b]` given a sign change, by safeguarded Newton.
fn real_root(params: &ModelParams, mut a: f64, mut b: f64) -> Result<f64> {
    let (mut fa, _, _) = g_on_axis(a, params)?;
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (fx, _, dfx) = g_on_axis(x, params)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if (next - x).abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

fn axis_brackets(params: &ModelParams, lo: f64, hi: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let step = (hi - lo) / n as f64;
    let mut prev = g_on_axis(lo, params)?.0;
    for k in 1..=n {
        let x = lo + step * k as f64;
        let cur = g_on_axis(x, params)?.0;
        if (prev < 0.0) != (cur < 0.0) {
            out.push((x - step, x));
        }
        prev = cur;
    }
    Ok(out)
}

fn two_stage_at(params: &ModelParams, x0: f64) -> Result<(Complex64, f64)> {
    let (_, im, dre) = g_on_axis(x0, params)?;
    let width = -im / dre;
    Ok((Complex64::new(x0, width), width))
}

/// Half width of the real-axis seeding window.
pub fn scan_half_width(params: &ModelParams) -> f64 {
    3.0 * params.coupling.abs() + 3.0 * params.field_strength
}

/// Real-axis root of `Re g` followed by one Newton step off the axis.
///
/// Among the sign changes of `Re g` the candidate with the smallest
/// stage-two width is returned.
pub fn find_pole_two_stage(params: &ModelParams) -> Result<PoleResult> {
    require_coupling(params)?;
    let w = scan_half_width(params);
    let brackets = axis_brackets(params, -w, w, SCAN_POINTS)?;
    let mut best: Option<(Complex64, f64)> = None;
    for (a, b) in brackets {
        let x0 = real_root(params, a, b)?;
        let cand = two_stage_at(params, x0)?;
        if best.is_none_or(|(_, bw)| cand.1.abs() < bw.abs()) {
            best = Some(cand);
        }
    }
    let Some((z0, _)) = best else {
        return Err(Error::Search {
            reason: format!("Re g has no sign change on [{}, {}]", -w, w),
            trajectory: Vec::new(),
        });
    };
    finish(z0, 1, PoleMethod::TwoStagePerturbative, false, params)
}

/// Two-stage estimate near a known real part.
pub fn refine_two_stage(params: &ModelParams, x_guess: f64) -> Result<PoleResult> {
    require_coupling(params)?;
    let mut half = 1e-6 * (1.0 + x_guess.abs());
    for _ in 0..40 {
        let (a, b) = (x_guess - half, x_guess + half);
        let fa = g_on_axis(a, params)?.0;
        let fb = g_on_axis(b, params)?.0;
        if (fa < 0.0) != (fb < 0.0) {
            let x0 = real_root(params, a, b)?;
            let (z0, _) = two_stage_at(params, x0)?;
            return finish(z0, 1, PoleMethod::TwoStagePerturbative, false, params);
        }
        half *= 2.0;
    }
    Err(Error::Search {
        reason: format!("Re g has no sign change near {x_guess}"),
        trajectory: Vec::new(),
    })
}

/// Newton from `seed`, switching to the two-stage estimate when the pole is
/// too narrow for complex Newton to resolve.
pub fn locate_resonance(params: &ModelParams, seed: Complex64) -> Result<PoleResult> {
    let newton = find_pole(params, seed)?;
    if newton.z0.im.abs() >= NARROW_RATIO * newton.z0.re.abs() {
        return Ok(newton);
    }
    match refine_two_stage(params, newton.z0.re) {
        Ok(ts) if ts.z0.im.abs() < NARROW_RATIO * ts.z0.re.abs() => Ok(PoleResult {
            iterations: newton.iterations + ts.iterations,
            ..ts
        }),
        _ => Ok(newton),
    }
}

/// Seed from the real-axis scan: the narrowest two-stage candidate.
pub fn default_seed(params: &ModelParams) -> Result<Complex64> {
    Ok(find_pole_two_stage(params)?.z0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub lo: Complex64,
    pub hi: Complex64,
}

impl Rectangle {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self {
            lo: Complex64::new(a.re.min(b.re), a.im.min(b.im)),
            hi: Complex64::new(a.re.max(b.re), a.im.max(b.im)),
        }
    }

    pub fn centered(z: Complex64, half: f64) -> Self {
        Self::new(z - Complex64::new(half, half), z + Complex64::new(half, half))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.lo.re && z.re <= self.hi.re && z.im >= self.lo.im && z.im <= self.hi.im
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            self.lo,
            Complex64::new(self.hi.re, self.lo.im),
            self.hi,
            Complex64::new(self.lo.re, self.hi.im),
        ]
    }

    fn perimeter(&self) -> f64 {
        2.0 * ((self.hi.re - self.lo.re) + (self.hi.im - self.lo.im))
    }
}

const MIN_CONTOUR_G: f64 = 1e-10;
const MAX_CONTOUR_NODES: usize = 1 << 21;

fn winding_sum(params: &ModelParams, rect: &Rectangle, per_unit: f64) -> Result<(f64, f64)> {
    let corners = rect.corners();
    let mut total = Complex64::new(0.0, 0.0);
    let mut max_phase_step: f64 = 0.0;
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        let n = (((b - a).norm() * per_unit).ceil() as usize).max(8);
        let h = (b - a) / n as f64;
        let mut prev: Option<Complex64> = None;
        for j in 0..=n {
            let z = a + h * j as f64;
            let (gz, gp) = g_and_prime(z, params)?;
            if gz.norm() < MIN_CONTOUR_G {
                return Err(Error::Contour(format!(
                    "|g| = {:.2e} at contour node {z}; perturb the rectangle",
                    gz.norm()
                )));
            }
            let weight = if j == 0 || j == n { 0.5 } else { 1.0 };
            total += weight * gp / gz * h;
            if let Some(p) = prev {
                max_phase_step = max_phase_step.max((gz / p).arg().abs());
            }
            prev = Some(gz);
        }
    }
    Ok(((total / Complex64::new(0.0, 2.0 * PI)).re, max_phase_step))
}

/// Number of zeros of `g` inside the rectangle spanned by two corners.
pub fn count_zeros(params: &ModelParams, a: Complex64, b: Complex64) -> Result<i64> {
    ensure_finite(a, "corner")?;
    ensure_finite(b, "corner")?;
    if params.coupling == 0.0 {
        return Ok(0);
    }
    let rect = Rectangle::new(a, b);
    if rect.perimeter() == 0.0 {
        return Err(Error::Contour("degenerate rectangle".into()));
    }
    let mut per_unit = 64.0 / rect.perimeter();
    let mut last: Option<i64> = None;
    loop {
        let (value, phase_step) = winding_sum(params, &rect, per_unit)?;
        let rounded = value.round();
        let resolved = phase_step < PI / 2.0 && (value - rounded).abs() < 0.05;
        if resolved && last == Some(rounded as i64) {
            return Ok(rounded as i64);
        }
        last = if resolved { Some(rounded as i64) } else { None };
        per_unit *= 2.0;
        if per_unit * rect.perimeter() > MAX_CONTOUR_NODES as f64 {
            return Err(Error::Contour(format!(
                "winding number did not stabilize (last estimate {value:.4})"
            )));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedRoot {
    pub pole: PoleResult,
    /// Half side of the square on which the zero count was taken.
    pub certificate_half_size: f64,
    pub certificate_count: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootEnumeration {
    pub window: Rectangle,
    /// The window actually integrated over; the top edge is lifted above the
    /// real axis because `g` has no zeros there.
    pub contour: Rectangle,
    pub total_count: i64,
    pub roots: Vec<CertifiedRoot>,
}

/// Finds and certifies every zero of `g` in `window`.
pub fn enumerate_poles(params: &ModelParams, window: Rectangle) -> Result<RootEnumeration> {
    require_coupling(params)?;
    let mut contour = window;
    if contour.hi.im >= -1e-3 {
        contour.hi.im = contour.hi.im.max(0.0) + 0.05;
    }
    let total_count = count_zeros(params, contour.lo, contour.hi)?;
    let mut found: Vec<PoleResult> = Vec::new();
    subdivide(params, contour, total_count, 0, &mut found)?;
    if found.len() as i64 != total_count {
        return Err(Error::Contour(format!(
            "located {} zeros but the window holds {total_count}",
            found.len()
        )));
    }
    found.sort_by(|a, b| a.z0.re.total_cmp(&b.z0.re));
    let mut roots = Vec::with_capacity(found.len());
    for pole in found {
        let half = 1e-6 * (1.0 + pole.z0.norm());
        let cert = Rectangle::centered(pole.z0, half);
        let count = count_zeros(params, cert.lo, cert.hi)?;
        roots.push(CertifiedRoot { pole, certificate_half_size: half, certificate_count: count });
    }
    Ok(RootEnumeration { window, contour, total_count, roots })
}

fn subdivide(
    params: &ModelParams,
    rect: Rectangle,
    count: i64,
    depth: usize,
    found: &mut Vec<PoleResult>,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if count == 1 {
        let center = 0.5 * (rect.lo + rect.hi);
        if let Ok(pole) = locate_resonance(params, center) {
            if rect.contains(pole.z0) && pole.converged {
                let duplicate = found
                    .iter()
                    .any(|p| (p.z0 - pole.z0).norm() <= 1e-9 * (1.0 + pole.z0.norm()));
                if !duplicate {
                    found.push(pole);
                }
                return Ok(());
            }
        }
    }
    if depth > 40 {
        return Err(Error::Contour(format!("subdivision did not isolate the zeros in {rect:?}")));
    }
    // Off-center splits keep cuts away from symmetric root positions.
    let width = rect.hi.re - rect.lo.re;
    let height = rect.hi.im - rect.lo.im;
    let halves = if width >= height {
        let m = rect.lo.re + 0.4871 * width;
        [
            Rectangle::new(rect.lo, Complex64::new(m, rect.hi.im)),
            Rectangle::new(Complex64::new(m, rect.lo.im), rect.hi),
        ]
    } else {
        let m = rect.lo.im + 0.4871 * height;
        [
            Rectangle::new(rect.lo, Complex64::new(rect.hi.re, m)),
            Rectangle::new(Complex64::new(rect.lo.re, m), rect.hi),
        ]
    };
    let first = count_zeros(params, halves[0].lo, halves[0].hi)?;
    subdivide(params, halves[0], first, depth + 1, found)?;
    subdivide(params, halves[1], count - first, depth + 1, found)
}

/// The root whose real part is nearest `peak`.
pub fn nearest_to_peak(roots: &[CertifiedRoot], peak: f64) -> Option<&CertifiedRoot> {
    roots
        .iter()
        .min_by(|a, b| (a.pole.z0.re - peak).abs().total_cmp(&(b.pole.z0.re - peak).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueReport {
    /// The printed closed form.
    pub formula: Complex64,
    /// `(1/2 pi i) oint S(sigma) d sigma` on a small circle around `z0`, with
    /// `S` continued in the energy variable `sigma = -E x`.
    pub contour: Complex64,
    /// `-(2 pi i lambda sqrt(2/pi) / E) exp(-2 z0^2/E^2) / g'(z0)`.
    pub analytic: Complex64,
    pub relative_discrepancy: f64,
    pub radius: f64,
}

/// Continued S-matrix in the energy variable, minus one:
/// `-(2 pi i lambda sqrt(2/pi)/E) exp(-2 sigma^2/E^2) / g(sigma)`.
pub fn smatrix_continued_minus_one(sigma: Complex64, params: &ModelParams) -> Result<Complex64> {
    let e = params.field_strength;
    let num = Complex64::new(0.0, -2.0 * PI * params.kappa() / e) * (-2.0 * sigma * sigma / (e * e)).exp();
    Ok(num / g(sigma, params)?)
}

/// Residue of the S-matrix at a pole: closed form against contour quadrature.
pub fn residue_at_pole(pole: &PoleResult, params: &ModelParams) -> Result<ResidueReport> {
    residue_at_pole_with_radius(pole, params, 1e-2)
}

pub fn residue_at_pole_with_radius(pole: &PoleResult, params: &ModelParams, radius: f64) -> Result<ResidueReport> {
    let z0 = pole.z0;
    let formula = residue_formula(z0, params)?;
    let e = params.field_strength;
    let gp = g_prime(z0, params)?;
    let analytic = Complex64::new(0.0, -2.0 * PI * params.kappa() / e) * (-2.0 * z0 * z0 / (e * e)).exp() / gp;
    // trapezoid on a circle is spectrally accurate
    let n = 512;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let u = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        sum += smatrix_continued_minus_one(z0 + radius * u, params)? * radius * u;
    }
    let contour = sum / n as f64;
    let relative_discrepancy = (formula - contour).norm() / contour.norm();
    Ok(ResidueReport { formula, contour, analytic, relative_discrepancy, radius })
}

/// Residue of `(phi|G|phi)` at the pole, `1/(lambda g'(z0))`.
pub fn resolvent_residue(pole: &PoleResult, params: &ModelParams) -> Result<Complex64> {
    require_coupling(params)?;
    Ok(1.0 / (params.coupling * g_prime(pole.z0, params)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldScan {
    pub coupling: f64,
    pub field_strengths: Vec<f64>,
    pub poles: Vec<PoleResult>,
    /// Adjacent pairs where `Re z0` fails to decrease.
    pub re_decrease_violations: usize,
    /// Adjacent pairs where `|Im z0|` fails to increase.
    pub width_increase_violations: usize,
}

/// Tracks one pole across ascending field strengths by continuation.
pub fn field_scan(coupling: f64, e_values: &[f64], seed: Option<Complex64>) -> Result<FieldScan> {
    if e_values.is_empty() {
        return Err(Error::Config("field scan needs at least one field strength".into()));
    }
    if e_values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("field strengths must be strictly ascending".into()));
    }
    let mut poles: Vec<PoleResult> = Vec::with_capacity(e_values.len());
    for (k, &e) in e_values.iter().enumerate() {
        let params = ModelParams::new(e, coupling)?;
        require_coupling(&params)?;
        let guess = match k {
            0 => match seed {
                Some(s) => s,
                None => default_seed(&params)?,
            },
            1 => poles[0].z0,
            _ => {
                let (a, b) = (poles[k - 2].z0, poles[k - 1].z0);
                b + (b - a) * ((e - e_values[k - 1]) / (e_values[k - 1] - e_values[k - 2]))
            }
        };
        let pole = locate_resonance(&params, guess)?;
        if k >= 2 {
            let prev_step = (poles[k - 1].z0 - poles[k - 2].z0).norm() / (e_values[k - 1] - e_values[k - 2]);
            let trend = prev_step * (e - e_values[k - 1]);
            let step = (pole.z0 - poles[k - 1].z0).norm();
            if step > 10.0 * trend && step > 1e-12 * (1.0 + pole.z0.norm()) {
                return Err(Error::Tracking { field_strength: e, step, trend });
            }
        }
        poles.push(pole);
    }
    let re_decrease_violations = poles.windows(2).filter(|w| !(w[1].z0.re < w[0].z0.re)).count();
    let width_increase_violations = poles.windows(2).filter(|w| !(w[1].z0.im.abs() > w[0].z0.im.abs())).count();
    Ok(FieldScan {
        coupling,
        field_strengths: e_values.to_vec(),
        poles,
        re_decrease_violations,
        width_increase_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(e: f64, l: f64) -> ModelParams {
        ModelParams::new(e, l).unwrap()
    }

    const BROAD_Z0: Complex64 = Complex64::new(2.136_648_689_884_37, -0.000_993_408_404_667_008);

    #[test]
    fn g_trivial_values() {
        let free = p(1.0, 0.0);
        assert_eq!(g(c(3.0, -1.0), &free).unwrap(), c(1.0, 0.0));
        assert_eq!(g_prime(c(3.0, -1.0), &free).unwrap(), c(0.0, 0.0));
        let pp = p(1.0, 2.0);
        let expected = c(1.0, 0.0) - 2.0 * (2.0 / PI).sqrt() * c(0.0, -PI);
        assert!((g(c(0.0, 0.0), &pp).unwrap() - expected).norm() < 1e-14);
        assert!((g(c(0.0, 1e4), &pp).unwrap() - 1.0).norm() < 1e-3);
    }

    #[test]
    fn g_prime_matches_finite_differences() {
        let pp = p(1.0, 11.0);
        let z = c(-4.0, -1e-3);
        let h = 1e-6;
        let fd = (g(z + h, &pp).unwrap() - g(z - h, &pp).unwrap()) / (2.0 * h);
        let an = g_prime(z, &pp).unwrap();
        assert!((fd - an).norm() / an.norm() < 1e-6);
        let doubled = g_prime(z, &p(1.0, 22.0)).unwrap();
        assert!((doubled - 2.0 * an).norm() <= 1e-14 * doubled.norm());
    }

    #[test]
    fn axis_form_agrees_with_complex_form() {
        let pp = p(1.3, -2.5);
        for i in 0..200 {
            let x = -8.0 + 0.08 * i as f64;
            let (re, im, dre) = g_on_axis(x, &pp).unwrap();
            let gz = g(c(x, 0.0), &pp).unwrap();
            let gp = g_prime(c(x, 0.0), &pp).unwrap();
            assert!((re - gz.re).abs() < 1e-13);
            assert!((im - gz.im).abs() < 1e-13 * (1.0 + im.abs()));
            assert!((dre - gp.re).abs() < 1e-12 * (1.0 + dre.abs()));
        }
    }

    #[test]
    fn zero_coupling_has_no_pole() {
        let free = p(1.0, 0.0);
        assert!(matches!(find_pole(&free, c(1.0, -0.1)), Err(Error::NoPole)));
        assert!(matches!(find_pole_two_stage(&free), Err(Error::NoPole)));
        assert_eq!(count_zeros(&free, c(-5.0, -2.0), c(5.0, 1.0)).unwrap(), 0);
    }

    #[test]
    fn broad_pole() {
        let pp = p(1.0, 2.0);
        let r = find_pole(&pp, c(2.0, -0.1)).unwrap();
        assert!(r.converged);
        assert_eq!(r.method, PoleMethod::NewtonDirect);
        assert!((r.z0 - BROAD_Z0).norm() < 1e-12);
        let gp = g_prime(r.z0, &pp).unwrap();
        assert!((gp - 4.0 * (r.z0 - 2.0)).norm() < 1e-10);
    }

    #[test]
    fn broad_pole_counts() {
        let pp = p(1.0, 2.0);
        assert_eq!(count_zeros(&pp, c(1.5, -0.5), c(2.5, 0.5)).unwrap(), 1);
        assert_eq!(count_zeros(&pp, c(-3.0, 1.0), c(3.0, 4.0)).unwrap(), 0);
        assert_eq!(count_zeros(&pp, c(-5.0, -1.0), c(5.0, 0.05)).unwrap(), 2);
        assert_eq!(count_zeros(&pp, c(-5.0, -1.5), c(5.0, 0.05)).unwrap(), 3);
    }

    #[test]
    fn contour_through_zero_is_rejected() {
        let pp = p(1.0, 2.0);
        let r = count_zeros(&pp, BROAD_Z0, BROAD_Z0 + c(1.0, 1.0));
        assert!(matches!(r, Err(Error::Contour(_))), "{r:?}");
    }

    #[test]
    fn two_stage_narrow_root() {
        let pp = p(1.0, 11.0);
        let r = find_pole_two_stage(&pp).unwrap();
        assert_eq!(r.method, PoleMethod::TwoStagePerturbative);
        assert!(r.converged);
        assert!((r.z0.re - 11.022_774_623_495_573).abs() < 1e-12);
        assert!(r.z0.im < 0.0);
        // width = kappa pi exp(-2 x0^2) / g'(x0), g'(x0) = 4 (x0 - lambda)
        let x0 = r.z0.re;
        let expected = pp.kappa() * PI * (-2.0 * x0 * x0).exp() / (4.0 * (x0 - 11.0));
        assert!((r.z0.im + expected).abs() < 1e-6 * expected);
        // 160-digit Newton oracle
        assert!((r.z0.im + 8.831_957_548_428_577e-104).abs() < 1e-9 * 8.83e-104);
        let newton = find_pole(&pp, c(11.0, -0.01)).unwrap();
        assert!((newton.z0.norm() - r.z0.norm()).abs() <= 1e-10 * r.z0.norm());
    }

    #[test]
    fn reference_coupling_reproduces_negative_root() {
        let pp = PoleConvention::ReferenceCoupling.effective(&p(1.0, 11.0));
        let r = find_pole_two_stage(&pp).unwrap();
        assert!((r.z0.re + 4.446).abs() < 1e-3);
        assert!((r.z0.re + 4.446_115_708_157_991).abs() < 1e-12);
        assert!((r.z0.im + 3.217_786_651_297_224_5e-16).abs() < 1e-8 * 3.2e-16);
    }

    #[test]
    fn locate_switches_to_two_stage_when_narrow() {
        let pp = p(1.0, 11.0);
        let r = locate_resonance(&pp, c(11.0, -0.01)).unwrap();
        assert_eq!(r.method, PoleMethod::TwoStagePerturbative);
        let broad = locate_resonance(&p(1.0, 2.0), c(2.0, -0.1)).unwrap();
        assert_eq!(broad.method, PoleMethod::NewtonDirect);
    }

    #[test]
    fn enumerate_narrow_window() {
        let pp = p(1.0, 11.0);
        let en = enumerate_poles(&pp, Rectangle::new(c(-15.0, -1.0), c(15.0, 0.0))).unwrap();
        assert_eq!(en.total_count, 3);
        assert_eq!(en.roots.len(), 3);
        assert!((en.roots[2].pole.z0.re - 11.022_774_623_495_573).abs() < 1e-12);
        for r in &en.roots {
            assert_eq!(r.certificate_count, 1);
            assert!(r.pole.converged);
            assert!(r.pole.z0.im < 0.0);
        }
    }

    #[test]
    fn residue_formula_and_contour() {
        let pp = p(1.0, 2.0);
        let pole = find_pole(&pp, c(2.0, -0.1)).unwrap();
        let rep = residue_at_pole(&pole, &pp).unwrap();
        assert!((rep.contour - rep.analytic).norm() < 1e-10 * rep.analytic.norm());
        // the printed prefactor differs by -16/E^4
        assert!((rep.formula / rep.analytic - (-16.0)).norm() < 1e-10);
        let pp15 = p(1.5, 2.0);
        let pole15 = locate_resonance(&pp15, default_seed(&pp15).unwrap()).unwrap();
        let rep15 = residue_at_pole(&pole15, &pp15).unwrap();
        assert!((rep15.contour - rep15.analytic).norm() < 1e-9 * rep15.analytic.norm());
        assert!((rep15.formula / rep15.analytic - (-16.0 / 1.5f64.powi(4))).norm() < 1e-9);
    }

    #[test]
    fn residue_degenerate() {
        let pp = p(1.0, 2.0);
        assert!(matches!(residue_formula(c(2.0, 0.0), &pp), Err(Error::DegenerateResidue)));
        let small = p(1.0, 1e-9);
        assert!(residue_formula(c(1.0, -0.5), &small).unwrap().norm() < 1e-8);
    }

    #[test]
    fn resolvent_weight_closed_form() {
        let pp = p(1.0, 2.0);
        let pole = find_pole(&pp, c(2.0, -0.1)).unwrap();
        let cw = resolvent_residue(&pole, &pp).unwrap();
        let expected = 1.0 / (4.0 * 2.0 * (pole.z0 - 2.0));
        assert!((cw - expected).norm() < 1e-10);
    }

    #[test]
    fn field_scan_single_element_is_find_pole() {
        let scan = field_scan(2.0, &[1.0], Some(c(2.0, -0.1))).unwrap();
        let direct = locate_resonance(&p(1.0, 2.0), c(2.0, -0.1)).unwrap();
        assert_eq!(scan.poles[0], direct);
    }

    #[test]
    fn field_scan_negative_coupling_moves_left() {
        let scan = field_scan(-2.0, &[0.5, 0.75, 1.0, 1.5, 2.0], None).unwrap();
        assert_eq!(scan.re_decrease_violations, 0);
        assert_eq!(scan.width_increase_violations, 0);
    }

    #[test]
    fn field_scan_rejects_unsorted() {
        assert!(matches!(field_scan(2.0, &[1.0, 0.5], None), Err(Error::Config(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn no_zeros_above_axis(l in -12.0f64..12.0, e in 0.5f64..2.0, re in -20.0f64..20.0, im in 0.0f64..20.0) {
            prop_assume!(l != 0.0);
            let gz = g(c(re, im), &p(e, l)).unwrap();
            prop_assert!(gz.norm() > 1e-3);
        }

        #[test]
        fn derivative_at_root_is_linear_in_position(l in 1.0f64..6.0, e in 0.6f64..1.6) {
            let pp = p(e, l);
            let r = locate_resonance(&pp, default_seed(&pp).unwrap()).unwrap();
            prop_assume!(r.method == PoleMethod::NewtonDirect);
            let gp = g_prime(r.z0, &pp).unwrap();
            let expected = 4.0 * (r.z0 - l) / (e * e);
            prop_assert!((gp - expected).norm() < 1e-8 * (1.0 + expected.norm()));
        }
    }
}
