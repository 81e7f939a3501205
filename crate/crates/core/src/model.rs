//! The Stark Hamiltonian `H = -E x + lambda P0` with a rank-one Gaussian
//! projector `P0 = |phi><phi|`, `phi(x) = (2/pi)^{1/4} exp(-x^2)`.

use std::f64::consts::FRAC_2_PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field strength `E > 0` and coupling `lambda`.
///
/// `lambda = 0` is accepted so that the free model can be evaluated; the pole
/// finders reject it with [`Error::NoPole`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub field_strength: f64,
    pub coupling: f64,
}

impl ModelParams {
    pub fn new(field_strength: f64, coupling: f64) -> Result<Self> {
        if !(field_strength.is_finite() && field_strength > 0.0) {
            return Err(Error::Config(format!(
                "field_strength must be finite and > 0, got {field_strength}"
            )));
        }
        if !coupling.is_finite() {
            return Err(Error::Config(format!("coupling must be finite, got {coupling}")));
        }
        Ok(Self { field_strength, coupling })
    }

    /// `lambda sqrt(2/pi)`, the weight of `F` in the pole condition.
    pub fn kappa(&self) -> f64 {
        self.coupling * FRAC_2_PI.sqrt()
    }

    pub fn with_field(&self, field_strength: f64) -> Result<Self> {
        Self::new(field_strength, self.coupling)
    }
}

/// The normalized defect state.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefectState;

impl DefectState {
    pub const AMPLITUDE: f64 = 0.893_243_841_738_002_3; // (2/pi)^{1/4}

    pub fn eval(&self, x: f64) -> f64 {
        Self::AMPLITUDE * (-x * x).exp()
    }
}

/// Uniform position grid on `[-L, L]` with `N` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 16;
    pub const MIN_HALF_WIDTH: f64 = 3.8;

    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        let g = Self { half_width, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < Self::MIN_POINTS {
            return Err(Error::Config(format!(
                "grid needs at least {} points, got {}",
                Self::MIN_POINTS,
                self.points
            )));
        }
        if !(self.half_width.is_finite() && self.half_width >= Self::MIN_HALF_WIDTH) {
            return Err(Error::Config(format!(
                "grid half_width must be >= {} so that exp(-2L^2) < 1e-12, got {}",
                Self::MIN_HALF_WIDTH,
                self.half_width
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.points).map(|m| -self.half_width + m as f64 * dx).collect()
    }
}

/// Position kernel of the projector, `sqrt(2/pi) exp(-(x^2 + x'^2))`.
pub fn p0_kernel(x: f64, xp: f64) -> f64 {
    FRAC_2_PI.sqrt() * (-(x * x + xp * xp)).exp()
}

/// Dense discretization `H[m][n] = -E x_m delta_mn + lambda p0(x_m, x_n) dx`.
pub fn hamiltonian_grid(params: &ModelParams, grid: &GridSpec) -> Result<DMatrix<f64>> {
    grid.validate()?;
    let x = grid.nodes();
    let dx = grid.spacing();
    let n = grid.points;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for m in 0..n {
        for k in m..n {
            let mut v = params.coupling * p0_kernel(x[m], x[k]) * dx;
            if m == k {
                v += -params.field_strength * x[m];
            }
            h[(m, k)] = v;
            h[(k, m)] = v;
        }
    }
    Ok(h)
}
