//! Lax-Phillips layer: boundary values in the position label `x'`
//! (energy `sigma = -E x'`), the diagonal S-matrix, wave operators, and the
//! resonance state.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::poles::{g, residue_at_pole, PoleResult, ResidueReport};
use crate::quad::{integrate_with_breaks, Tolerance};
use crate::resolvent::{f_lower_edge, f_upper_edge};
use crate::cerf::faddeeva_w;

/// `F(-E x' - i0) = (i pi / E) w(sqrt(2) x')`.
pub fn f_below(xp: f64, params: &ModelParams) -> Result<Complex64> {
    f_lower_edge(-params.field_strength * xp, params)
}

/// `F(-E x' + i0) = F_below(x') - (2 pi i / E) exp(-2 x'^2)`.
pub fn f_above(xp: f64, params: &ModelParams) -> Result<Complex64> {
    f_upper_edge(-params.field_strength * xp, params)
}

/// Sign in front of the on-shell term of `S(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SMatrixSign {
    /// `S = 1 - (2 pi i / E) lambda sqrt(2/pi) exp(-2x^2) / (1 - lambda sqrt(2/pi) F_above)`.
    Minus,
    /// The same with `+`; not unimodular.
    Plus,
}

pub const ADOPTED_SIGN: SMatrixSign = SMatrixSign::Minus;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SMatrixSample {
    pub x: f64,
    pub value: Complex64,
    pub modulus_defect: f64,
}

const AXIS_POLE_TOL: f64 = 1e-13;

pub fn smatrix_with_sign(x: f64, params: &ModelParams, sign: SMatrixSign) -> Result<SMatrixSample> {
    let e = params.field_strength;
    let kappa = params.kappa();
    let den = Complex64::new(1.0, 0.0) - kappa * f_above(x, params)?;
    if den.norm() < AXIS_POLE_TOL {
        return Err(Error::PoleOnAxis { x, denominator: den.norm() });
    }
    let term = Complex64::new(0.0, 2.0 * PI / e) * kappa * (-2.0 * x * x).exp() / den;
    let value = match sign {
        SMatrixSign::Minus => 1.0 - term,
        SMatrixSign::Plus => 1.0 + term,
    };
    Ok(SMatrixSample { x, value, modulus_defect: (value.norm() - 1.0).abs() })
}

/// `S(x)` under the adopted sign.
pub fn smatrix(x: f64, params: &ModelParams) -> Result<SMatrixSample> {
    smatrix_with_sign(x, params, ADOPTED_SIGN)
}

/// `S(x) = (1 - lambda sqrt(2/pi) F_below) / (1 - lambda sqrt(2/pi) F_above)`,
/// an independent form of the adopted sign.
pub fn smatrix_ratio(x: f64, params: &ModelParams) -> Result<Complex64> {
    let k = params.kappa();
    Ok((1.0 - k * f_below(x, params)?) / (1.0 - k * f_above(x, params)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SMatrixScanRow {
    pub sample: SMatrixSample,
    /// Phase of `S`, unwrapped along the scan.
    pub phase: f64,
}

pub fn smatrix_scan(x_min: f64, x_max: f64, samples: usize, params: &ModelParams) -> Result<Vec<SMatrixScanRow>> {
    if samples < 2 || !(x_max > x_min) {
        return Err(Error::Config("smatrix scan needs x_max > x_min and at least two samples".into()));
    }
    let xs: Vec<f64> = (0..samples)
        .map(|k| x_min + (x_max - x_min) * k as f64 / (samples - 1) as f64)
        .collect();
    let values: Result<Vec<SMatrixSample>> = xs.par_iter().map(|&x| smatrix(x, params)).collect();
    let values = values?;
    let mut rows = Vec::with_capacity(samples);
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for s in values {
        let raw = s.value.arg();
        if let Some(p) = prev {
            let jump = raw + offset - p;
            offset -= 2.0 * PI * (jump / (2.0 * PI)).round();
        }
        let phase = raw + offset;
        prev = Some(phase);
        rows.push(SMatrixScanRow { sample: s, phase });
    }
    Ok(rows)
}

/// Continued S-matrix denominator built from the lower boundary value and
/// the continued jump: `1 - lambda sqrt(2/pi) [F_below(-sigma/E) - (2 pi i/E) exp(-2 sigma^2/E^2)]`.
pub fn smatrix_denominator_continued(sigma: Complex64, params: &ModelParams) -> Result<Complex64> {
    let e = params.field_strength;
    let zeta = -sigma * (std::f64::consts::SQRT_2 / e);
    let below = Complex64::new(0.0, PI / e) * faddeeva_w(zeta)?;
    let jump = Complex64::new(0.0, 2.0 * PI / e) * (-2.0 * sigma * sigma / (e * e)).exp();
    Ok(1.0 - params.kappa() * (below - jump))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleCheckReport {
    pub z0: Option<Complex64>,
    /// `|denominator|` at the Wigner-Weisskopf pole.
    pub denominator_at_pole: Option<f64>,
    /// Zero of the continued S-matrix denominator found from `z0`.
    pub smatrix_zero: Option<Complex64>,
    pub identity_gap: Option<f64>,
    pub residue: Option<ResidueReport>,
}

/// Confirms that the continued S-matrix denominator vanishes at the
/// resolvent pole and reports the S-matrix residue.
pub fn smatrix_pole_check(pole: Option<&PoleResult>, params: &ModelParams) -> Result<PoleCheckReport> {
    let Some(pole) = pole.filter(|_| params.coupling != 0.0) else {
        return Ok(PoleCheckReport {
            z0: None,
            denominator_at_pole: None,
            smatrix_zero: None,
            identity_gap: None,
            residue: None,
        });
    };
    if !pole.converged {
        return Err(Error::Ledger(format!("pole at {} is not converged", pole.z0)));
    }
    let d0 = smatrix_denominator_continued(pole.z0, params)?.norm();
    if d0 > 1e-10 {
        return Err(Error::Ledger(format!(
            "continued S denominator is {d0:.3e} at the resolvent pole {}",
            pole.z0
        )));
    }
    // Newton on the continued denominator, derivative by central differences
    let mut z = pole.z0;
    for _ in 0..50 {
        let d = smatrix_denominator_continued(z, params)?;
        if d.norm() == 0.0 {
            break;
        }
        let h = 1e-6 * (1.0 + z.norm());
        let dp = (smatrix_denominator_continued(z + h, params)? - smatrix_denominator_continued(z - h, params)?)
            / (2.0 * h);
        let step = d / dp;
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let gap = (z - pole.z0).norm();
    if gap > 1e-12 * (1.0 + pole.z0.norm()) || g(z, params)?.norm() > 1e-10 {
        return Err(Error::Ledger(format!(
            "S-matrix zero {z} differs from the resolvent pole {} by {gap:.3e}",
            pole.z0
        )));
    }
    let residue = residue_at_pole(pole, params)?;
    Ok(PoleCheckReport {
        z0: Some(pole.z0),
        denominator_at_pole: Some(d0),
        smatrix_zero: Some(z),
        identity_gap: Some(gap),
        residue: Some(residue),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveSign {
    Plus,
    Minus,
}

const WAVE_SUPPORT: f64 = 9.0;

/// `(Omega_pm f)(x) = f(x) + (lambda sqrt(2/pi) / E) e^{-x^2} [PV int h(x')/(x - x') dx' +- i pi h(x)]`
/// with `h(x') = e^{-x'^2} f(x') / (1 - lambda sqrt(2/pi) F(-E x' -+ i0))`.
///
/// The principal value is folded onto `s > 0` as
/// `-int_0^inf (h(x+s) - h(x-s)) / s ds`.
pub fn wave_op_apply(
    sign: WaveSign,
    f: &(dyn Fn(f64) -> Complex64 + Sync),
    grid: &[f64],
    params: &ModelParams,
) -> Result<Vec<Complex64>> {
    grid.par_iter().map(|&x| wave_op_point(sign, f, x, params, 1e-10)).collect()
}

pub(crate) fn wave_op_point(
    sign: WaveSign,
    f: &(dyn Fn(f64) -> Complex64 + Sync),
    x: f64,
    params: &ModelParams,
    tol: f64,
) -> Result<Complex64> {
    let fx = f(x);
    if params.coupling == 0.0 {
        return Ok(fx);
    }
    let kappa = params.kappa();
    let e = params.field_strength;
    let h = |xp: f64| -> Complex64 {
        let edge = match sign {
            WaveSign::Plus => f_below(xp, params),
            WaveSign::Minus => f_above(xp, params),
        };
        match edge {
            Ok(fe) => (-xp * xp).exp() * f(xp) / (1.0 - kappa * fe),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let reach = x.abs() + WAVE_SUPPORT;
    let features = resonance_features(params);
    // below s0 the symmetric difference is rounding noise; use its Taylor limit
    let s0 = 1e-6 * features.iter().map(|f| f.1).fold(1.0, f64::min);
    let mut breaks = vec![s0, reach];
    for feature in features {
        for width in [0.0, 1.0, 10.0, 100.0] {
            for side in [-1.0, 1.0] {
                let s = (feature.0 + side * width * feature.1 - x).abs();
                if s > s0 && s < reach {
                    breaks.push(s);
                }
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let pv = integrate_with_breaks(
        |s: f64| -(h(x + s) - h(x - s)) / s,
        &breaks,
        Tolerance::new(tol, 1e-11).with_max_intervals(20_000),
    )?
    .value
        - (h(x + s0) - h(x - s0));
    let delta = Complex64::new(0.0, PI) * h(x);
    let bracket = match sign {
        WaveSign::Plus => pv + delta,
        WaveSign::Minus => pv - delta,
    };
    let out = fx + kappa / e * (-x * x).exp() * bracket;
    if out.re.is_finite() && out.im.is_finite() {
        Ok(out)
    } else {
        Err(Error::Numeric(format!("wave operator not finite at x = {x}")))
    }
}

/// Positions `x' = -Re z/E` of near-axis zeros of the boundary denominators,
/// paired with their widths `|Im z|/E`.
fn resonance_features(params: &ModelParams) -> Vec<(f64, f64)> {
    let e = params.field_strength;
    let Ok(seed) = crate::poles::default_seed(params) else {
        return Vec::new();
    };
    match crate::poles::locate_resonance(params, seed) {
        Ok(p) => vec![(-p.z0.re / e, (p.z0.im.abs() / e).max(1e-9))],
        Err(_) => vec![(-seed.re / e, (seed.im.abs() / e).max(1e-9))],
    }
}

/// Cauchy profile `|f_out(x)|^2 = norm_constant / ((x - center)^2 + half_width^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceProfile {
    pub center: f64,
    pub half_width: f64,
    pub norm_constant: f64,
}

impl ResonanceProfile {
    pub fn intensity(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.norm_constant / (d * d + self.half_width * self.half_width)
    }

    /// `pi norm_constant / half_width`.
    pub fn mass(&self) -> f64 {
        PI * self.norm_constant / self.half_width
    }

    pub fn fwhm(&self) -> f64 {
        2.0 * self.half_width
    }

    /// `x_k = center + half_width sinh(u_k)` with `u` uniform on `[-14, 14]`.
    ///
    /// Trapezoid sums over this grid carry a relative mass deficit near
    /// `4 e^{-14} / pi` plus an `O(du^2)` discretization term.
    pub fn sample_grid(&self, samples: usize) -> Vec<f64> {
        let n = samples.max(3);
        (0..n)
            .map(|k| {
                let u = -PROFILE_SPAN + 2.0 * PROFILE_SPAN * k as f64 / (n - 1) as f64;
                self.center + self.half_width * u.sinh()
            })
            .collect()
    }
}

const PROFILE_SPAN: f64 = 14.0;

/// Smallest half width, relative to `|center|`, that the sample grid can resolve.
pub const MIN_RELATIVE_WIDTH: f64 = 1e-13;

pub fn resonance_profile(pole: &PoleResult, norm_constant: f64) -> Result<ResonanceProfile> {
    if !pole.converged {
        return Err(Error::Numeric(format!("pole at {} is not converged", pole.z0)));
    }
    if !(pole.z0.im < 0.0) {
        return Err(Error::BoundState(pole.z0));
    }
    if !(norm_constant > 0.0 && norm_constant.is_finite()) {
        return Err(Error::Config(format!("norm_constant must be > 0, got {norm_constant}")));
    }
    Ok(ResonanceProfile { center: pole.z0.re, half_width: -pole.z0.im, norm_constant })
}

/// Translation-representation eigenfunction `f(s) = exp(-i mu s) n` on
/// `s >= 0`, zero for `s < 0`, with `mu = z0` and `n = sqrt(norm_constant)`.
pub fn semigroup_eigenfunction(pole: &PoleResult, s_grid: &[f64], norm_constant: f64) -> Vec<Complex64> {
    let n = norm_constant.sqrt();
    s_grid
        .iter()
        .map(|&s| {
            if s < 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                n * (Complex64::new(0.0, -s) * pole.z0).exp()
            }
        })
        .collect()
}

/// `i n / (x - mu)`, the spectral image of [`semigroup_eigenfunction`].
pub fn outgoing_spectral_form(pole: &PoleResult, x: f64, norm_constant: f64) -> Complex64 {
    Complex64::new(0.0, norm_constant.sqrt()) / (x - pole.z0)
}
