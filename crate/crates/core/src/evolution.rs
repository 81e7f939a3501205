//! Survival amplitude `A(t) = (phi, exp(-iHt) phi)` by three routes:
//! a dense-grid eigendecomposition, a contour integral of the resolvent
//! above the real axis, and the single-pole approximation.

use num_complex::Complex64;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{hamiltonian_grid, DefectState, ModelParams};
use crate::poles::{resolvent_residue, PoleResult};
use crate::quad::{integrate_with_breaks, Tolerance};
use crate::resolvent::{phi_g_phi, SheetTag};

pub use crate::model::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmplitudeMethod {
    Contour,
    PoleApprox,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub method: AmplitudeMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Grid spacing used by [`default_grid`].
pub const DEFAULT_SPACING: f64 = 0.015;

/// `L = 6` when `|lambda| <= 4E`, otherwise `L = max(6, 3 |Re z0| / E)`;
/// spacing 0.015, so `N = 801` at `L = 6`.
pub fn default_grid(params: &ModelParams, re_z0: Option<f64>) -> GridSpec {
    let reach = if params.coupling.abs() <= 4.0 * params.field_strength {
        0.0
    } else {
        re_z0.map_or(0.0, |r| 3.0 * r.abs() / params.field_strength)
    };
    let half_width = reach.max(6.0).max(GridSpec::MIN_HALF_WIDTH);
    let intervals = (2.0 * half_width / DEFAULT_SPACING).round() as usize;
    GridSpec { half_width, points: intervals + 1 }
}

/// Dense eigendecomposition of the discretized Hamiltonian with the overlap
/// weights `|<phi|psi_k>|^2` of the grid-normalized defect state.
pub fn oracle_spectrum(params: &ModelParams, grid: &GridSpec) -> Result<OracleSpectrum> {
    let h = hamiltonian_grid(params, grid)?;
    let n = grid.points;
    let phi = DefectState;
    let mut v = DVector::from_iterator(n, grid.nodes().into_iter().map(|x| phi.eval(x)));
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::Grid("defect state vanishes on the grid".into()));
    }
    v /= norm;
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("symmetric eigensolver did not converge".into()))?;
    let overlaps: DVector<f64> = eig.eigenvectors.tr_mul(&v);
    let mut pairs: Vec<(f64, f64)> = eig
        .eigenvalues
        .iter()
        .zip(overlaps.iter())
        .map(|(&e, &o)| (e, o * o))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pairs.iter().any(|(e, w)| !e.is_finite() || !w.is_finite()) {
        return Err(Error::Numeric("non-finite eigenpair".into()));
    }
    Ok(OracleSpectrum {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPeak {
    pub index: usize,
    pub center: f64,
    /// Mean of the two eigenvalue gaps adjacent to the peak.
    pub local_spacing: f64,
    pub peak_weight: f64,
    /// Total weight within `window` of the center.
    pub window_weight: f64,
    pub window: f64,
}

/// Maximum of the weight density `w_k / spacing_k`.
pub fn spectral_peak(spectrum: &OracleSpectrum, window: f64) -> Result<SpectralPeak> {
    let e = &spectrum.eigenvalues;
    let n = e.len();
    if n < 3 {
        return Err(Error::Grid("spectrum too small for a peak search".into()));
    }
    let spacing = |k: usize| {
        let lo = if k == 0 { e[1] - e[0] } else { e[k] - e[k - 1] };
        let hi = if k + 1 == n { e[n - 1] - e[n - 2] } else { e[k + 1] - e[k] };
        0.5 * (lo + hi)
    };
    let index = (0..n)
        .max_by(|&a, &b| (spectrum.weights[a] / spacing(a)).total_cmp(&(spectrum.weights[b] / spacing(b))))
        .unwrap_or(0);
    let center = e[index];
    let window_weight = e
        .iter()
        .zip(&spectrum.weights)
        .filter(|(x, _)| (*x - center).abs() <= window)
        .map(|(_, w)| w)
        .sum();
    Ok(SpectralPeak {
        index,
        center,
        local_spacing: spacing(index),
        peak_weight: spectrum.weights[index],
        window_weight,
        window,
    })
}

/// `A(t) = sum_k w_k exp(-i e_k t)`.
pub fn survival_oracle(spectrum: &OracleSpectrum, times: &[f64]) -> AmplitudeSeries {
    let values = times
        .par_iter()
        .map(|&t| {
            spectrum
                .eigenvalues
                .iter()
                .zip(&spectrum.weights)
                .map(|(&e, &w)| w * Complex64::new(0.0, -e * t).exp())
                .sum()
        })
        .collect();
    AmplitudeSeries { times: times.to_vec(), values, method: AmplitudeMethod::Oracle }
}

/// Four simple poles `c_j / (z - a_j)` below the axis whose expansion at
/// infinity matches `(phi|G|phi)` through `z^-4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSubtraction {
    pub nodes: [Complex64; 4],
    pub weights: [Complex64; 4],
}

impl MomentSubtraction {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let (l, e) = (params.coupling, params.field_strength);
        let e2 = e * e;
        // moments <phi|H^n|phi>
        let moments = [1.0, l, l * l + e2 / 4.0, l * l * l + l * e2 / 2.0];
        let s = e.max(1.0);
        let nodes: [Complex64; 4] = std::array::from_fn(|j| Complex64::new(l, -s * (j + 1) as f64));
        let a = DMatrix::from_fn(4, 4, |r, c| nodes[c].powu(r as u32));
        let b = DVector::from_iterator(4, moments.iter().map(|&m| Complex64::new(m, 0.0)));
        let sol = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Numeric("singular moment system".into()))?;
        Ok(Self { nodes, weights: std::array::from_fn(|j| sol[j]) })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&a, &c)| c / (z - a)).sum()
    }

    /// `(1/2 pi i) int_C eval(z) exp(-izt) dz` for `t >= 0`.
    pub fn amplitude(&self, t: f64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&a, &c)| c * (Complex64::new(0.0, -1.0) * a * t).exp())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSettings {
    pub height: f64,
    /// Half length of the integration line; chosen automatically when `None`.
    pub cutoff: Option<f64>,
    pub abs_tolerance: f64,
}

impl Default for ContourSettings {
    fn default() -> Self {
        Self { height: 0.1, cutoff: None, abs_tolerance: 1e-10 }
    }
}

const ENDPOINT_BOUND: f64 = 1e-12;

fn residual(
    xi: f64,
    eta: f64,
    params: &ModelParams,
    sub: &MomentSubtraction,
) -> Result<Complex64> {
    let z = Complex64::new(xi, eta);
    Ok(phi_g_phi(z, params, SheetTag::Physical)? - sub.eval(z))
}

/// Contour cutoff: smallest `50 max(1, |lambda|, E) 2^k` at which the
/// subtracted integrand is below `1e-12` at both ends.
pub fn contour_cutoff(params: &ModelParams, eta: f64) -> Result<f64> {
    let sub = MomentSubtraction::new(params)?;
    let mut x = 50.0 * params.coupling.abs().max(params.field_strength).max(1.0);
    for _ in 0..20 {
        let worst = residual(x, eta, params, &sub)?.norm().max(residual(-x, eta, params, &sub)?.norm());
        if worst < ENDPOINT_BOUND {
            return Ok(x);
        }
        x *= 2.0;
    }
    Err(Error::Config("no contour cutoff reaches the endpoint bound".into()))
}

/// Contour quadrature of `(1/2 pi i) int_C (phi|G|phi) exp(-izt) dz` along
/// `Im z = eta`, right to left.
///
/// The integrand is split as `S + R` where `S` is a [`MomentSubtraction`]
/// integrated in closed form and `R = O(z^-5)` is integrated numerically.
pub fn survival_contour(
    params: &ModelParams,
    times: &[f64],
    settings: &ContourSettings,
) -> Result<AmplitudeSeries> {
    let eta = settings.height;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Config(format!("contour height must be > 0, got {eta}")));
    }
    let sub = MomentSubtraction::new(params)?;
    let cutoff = match settings.cutoff {
        Some(x) => {
            let worst = residual(x, eta, params, &sub)?.norm().max(residual(-x, eta, params, &sub)?.norm());
            if !(worst < 1e-10) {
                return Err(Error::Config(format!(
                    "cutoff {x} leaves |integrand| = {worst:.2e} at the endpoints"
                )));
            }
            x
        }
        None => contour_cutoff(params, eta)?,
    };
    let center = 8.0 * params.coupling.abs().max(params.field_strength).max(1.0);
    let mut breaks = vec![-cutoff];
    let steps = 16;
    for k in 0..=steps {
        let x = -center + 2.0 * center * k as f64 / steps as f64;
        if x > -cutoff && x < cutoff {
            breaks.push(x);
        }
    }
    breaks.push(cutoff);
    let tol = Tolerance::new(settings.abs_tolerance, 0.0).with_max_intervals(100_000);
    let values: Result<Vec<Complex64>> = times
        .par_iter()
        .map(|&t| {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("times must be finite and >= 0, got {t}")));
            }
            let growth = (eta * t).exp();
            let integral = integrate_with_breaks(
                |xi: f64| {
                    let r = residual(xi, eta, params, &sub).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                    r * Complex64::new(0.0, -xi * t).exp() * growth
                },
                &breaks,
                tol,
            )?;
            // right-to-left orientation and 1/(2 pi i)
            let line = -integral.value / Complex64::new(0.0, 2.0 * std::f64::consts::PI);
            Ok(sub.amplitude(t) + line)
        })
        .collect();
    Ok(AmplitudeSeries { times: times.to_vec(), values: values?, method: AmplitudeMethod::Contour })
}

/// `A_pole(t) = c exp(-i z0 t)` with `c` the residue of `(phi|G|phi)` at `z0`.
pub fn survival_pole(pole: &PoleResult, params: &ModelParams, times: &[f64]) -> Result<AmplitudeSeries> {
    if !pole.converged {
        return Err(Error::Numeric(format!(
            "pole at {} is not converged (|g| = {:.2e})",
            pole.z0, pole.final_g_magnitude
        )));
    }
    let c = resolvent_residue(pole, params)?;
    let values = times
        .iter()
        .map(|&t| c * (Complex64::new(0.0, -t) * pole.z0).exp())
        .collect();
    Ok(AmplitudeSeries { times: times.to_vec(), values, method: AmplitudeMethod::PoleApprox })
}

fn node(series: &AmplitudeSeries, t: f64) -> Result<Complex64> {
    series
        .times
        .iter()
        .position(|&s| (s - t).abs() <= 1e-12 * (1.0 + t.abs()))
        .map(|k| series.values[k])
        .ok_or_else(|| Error::Grid(format!("time {t} is not a node of the series")))
}

/// `|A(t) A(t') / A(0) - A(t + t')|`.
pub fn semigroup_defect(series: &AmplitudeSeries, t: f64, tp: f64) -> Result<f64> {
    let a0 = node(series, 0.0)?;
    let at = node(series, t)?;
    let atp = node(series, tp)?;
    let asum = node(series, t + tp)?;
    Ok((at * atp / a0 - asum).norm())
}

/// One-sided second-order estimate of `d|A|^2/dt` at `t = 0`.
pub fn short_time_slope(series: &AmplitudeSeries) -> Result<f64> {
    if series.times.len() < 3 {
        return Err(Error::Grid("short-time slope needs three nodes".into()));
    }
    let h = series.times[1] - series.times[0];
    if series.times[0] != 0.0 || !(h > 0.0 && h <= 1e-3) {
        return Err(Error::Grid("short-time slope needs nodes 0, h, 2h with 0 < h <= 1e-3".into()));
    }
    let a1 = node(series, h)?;
    let a2 = node(series, 2.0 * h)?;
    let p = |a: Complex64| a.norm_sqr();
    Ok((-3.0 * p(series.values[0]) + 4.0 * p(a1) - p(a2)) / (2.0 * h))
}

/// Least-squares slope of `ln |A(t)|` over nodes in `[t_lo, t_hi]`.
pub fn decay_fit(series: &AmplitudeSeries, t_lo: f64, t_hi: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(t, _)| **t >= t_lo && **t <= t_hi)
        .map(|(&t, a)| (t, a.norm().ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Grid(format!("fewer than two nodes in [{t_lo}, {t_hi}]")));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Ok(sxy / sxx)
}

/// `0, h, 2h, ..., steps h` with `h = t_max / steps`.
pub fn uniform_times(t_max: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![0.0];
    }
    (0..=steps).map(|k| t_max * k as f64 / steps as f64).collect()
}
