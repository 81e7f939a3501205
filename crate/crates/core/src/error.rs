use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("boundary value requested on the real axis at {z}; use the one-sided boundary functions instead")]
    BoundaryValue { z: Complex64 },

    #[error("point {z} is within tolerance of a pole (|denominator| = {denominator:.3e})")]
    PoleProximity { z: Complex64, denominator: f64 },

    #[error("no pole: coupling is zero")]
    NoPole,

    #[error("root search failed: {reason}")]
    Search {
        reason: String,
        trajectory: Vec<Complex64>,
    },

    #[error("contour error: {0}")]
    Contour(String),

    #[error("quadrature did not converge: estimated error {estimate:.3e} > tolerance {tolerance:.3e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        tolerance: f64,
        intervals: usize,
    },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("pole tracking lost at E = {field_strength}: step {step:.3e} exceeds 10x the local trend {trend:.3e}")]
    Tracking {
        field_strength: f64,
        step: f64,
        trend: f64,
    },

    #[error("degenerate residue: pole sits on z = coupling")]
    DegenerateResidue,

    #[error("zero-width pole at {0}: bound state, not a resonance")]
    BoundState(Complex64),

    #[error("S-matrix denominator vanishes on the real axis at x = {x} (|denominator| = {denominator:.3e})")]
    PoleOnAxis { x: f64, denominator: f64 },

    #[error("convention check failed: {0}")]
    Ledger(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn ensure_finite(z: Complex64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be finite, got {z}")))
    }
}
