use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;

use super::config::{ConventionName, MethodName, ModelBlock, RunConfig};
use super::output::{write_record, write_table, Table};
use super::CliError;
use crate::error::Error;
use crate::evolution::{
    default_grid, oracle_spectrum, survival_contour, survival_oracle, survival_pole, uniform_times, AmplitudeSeries,
    ContourSettings,
};
use crate::laxphillips::{resonance_profile, smatrix_scan, MIN_RELATIVE_WIDTH};
use crate::ledger::{regenerate, Adjudication};
use crate::model::ModelParams;
use crate::poles::{
    count_zeros, default_seed, enumerate_poles, field_scan, locate_resonance, residue_at_pole, resolvent_residue,
    PoleMethod, PoleResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueRecord {
    pub formula: Cx,
    pub contour: Cx,
    pub analytic: Cx,
    pub relative_discrepancy: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub half_size: f64,
    pub count: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumeratedRoot {
    pub z0: Cx,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerationRecord {
    pub lower_left: Cx,
    pub upper_right: Cx,
    pub total_count: i64,
    pub roots: Vec<EnumeratedRoot>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTarget {
    pub coupling_over_field: f64,
    pub z0: Cx,
    /// `Re z0 - target.re`.
    pub re_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleRecord {
    pub model: ModelBlock,
    pub convention: ConventionName,
    pub z0: Cx,
    pub method: PoleMethod,
    pub iterations: usize,
    pub converged: bool,
    pub final_g_magnitude: f64,
    pub reflected: bool,
    pub residue: ResidueRecord,
    pub resolvent_residue: Cx,
    pub certificate: Option<Certificate>,
    pub enumeration: Option<EnumerationRecord>,
    pub comparison_target: ComparisonTarget,
}

/// Quoted narrow pole at `lambda/E = 11`.
pub const COMPARISON_TARGET: Complex64 = Complex64::new(-4.446, -0.318_96e-15);

fn locate(config: &RunConfig) -> Result<(ModelParams, PoleResult), CliError> {
    let params = config.params()?;
    let eff = config.pole_block().convention.convention().effective(&params);
    if eff.coupling == 0.0 {
        return Err(Error::NoPole.into());
    }
    let seed = match config.seed()? {
        Some(s) => s,
        None => default_seed(&eff)?,
    };
    Ok((eff, locate_resonance(&eff, seed)?))
}

fn certificate(params: &ModelParams, z0: Complex64) -> Option<Certificate> {
    let half = 1e-6 * (1.0 + z0.norm());
    let d = Complex64::new(half, half);
    count_zeros(params, z0 - d, z0 + d).ok().map(|count| Certificate { half_size: half, count })
}

pub fn cmd_pole(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (eff, pole) = locate(config)?;
    let res = residue_at_pole(&pole, &eff)?;
    let enumeration = match config.window()? {
        Some(w) => {
            let e = enumerate_poles(&eff, w)?;
            Some(EnumerationRecord {
                lower_left: e.window.lo.into(),
                upper_right: e.window.hi.into(),
                total_count: e.total_count,
                roots: e
                    .roots
                    .iter()
                    .map(|r| EnumeratedRoot {
                        z0: r.pole.z0.into(),
                        certificate: Certificate { half_size: r.certificate_half_size, count: r.certificate_count },
                    })
                    .collect(),
            })
        }
        None => None,
    };
    let record = PoleRecord {
        model: config.model,
        convention: config.pole_block().convention,
        z0: pole.z0.into(),
        method: pole.method,
        iterations: pole.iterations,
        converged: pole.converged,
        final_g_magnitude: pole.final_g_magnitude,
        reflected: pole.reflected,
        residue: ResidueRecord {
            formula: res.formula.into(),
            contour: res.contour.into(),
            analytic: res.analytic.into(),
            relative_discrepancy: res.relative_discrepancy,
            radius: res.radius,
        },
        resolvent_residue: resolvent_residue(&pole, &eff)?.into(),
        certificate: certificate(&eff, pole.z0),
        enumeration,
        comparison_target: ComparisonTarget {
            coupling_over_field: 11.0,
            z0: COMPARISON_TARGET.into(),
            re_difference: pole.z0.re - COMPARISON_TARGET.re,
        },
    };
    let path = write_record("pole", config, "pole", &record)?;
    if !pole.converged {
        return Err(Error::Search {
            reason: format!("pole search ended at {} with |g| = {:.2e}", pole.z0, pole.final_g_magnitude),
            trajectory: Vec::new(),
        }
        .into());
    }
    Ok(vec![path])
}

pub fn cmd_survival(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let params = config.params()?;
    let block = config.survival_block()?;
    let times = uniform_times(block.t_max, block.t_steps);
    let wants = |m: MethodName| block.methods.contains(&m);

    let explicit_grid = config.oracle_grid()?;
    let needs_pole = wants(MethodName::Pole) || (wants(MethodName::Oracle) && explicit_grid.is_none() && params.coupling != 0.0);
    let pole = if needs_pole {
        if params.coupling == 0.0 {
            return Err(Error::NoPole.into());
        }
        let seed = match config.seed()? {
            Some(s) => s,
            None => default_seed(&params)?,
        };
        Some(locate_resonance(&params, seed)?)
    } else {
        None
    };

    let mut series: Vec<(&str, AmplitudeSeries)> = Vec::new();
    if wants(MethodName::Contour) {
        series.push(("contour", survival_contour(&params, &times, &ContourSettings::default())?));
    }
    if wants(MethodName::Pole) {
        let pole = pole.as_ref().ok_or(Error::NoPole)?;
        series.push(("pole", survival_pole(pole, &params, &times)?));
    }
    if wants(MethodName::Oracle) {
        let grid = explicit_grid.unwrap_or_else(|| default_grid(&params, pole.as_ref().map(|p| p.z0.re)));
        let spectrum = oracle_spectrum(&params, &grid)?;
        series.push(("oracle", survival_oracle(&spectrum, &times)));
    }

    let mut columns = vec!["t".to_string()];
    for (name, _) in &series {
        columns.push(format!("re_{name}"));
        columns.push(format!("im_{name}"));
    }
    for (name, _) in &series {
        columns.push(format!("abs_{name}"));
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(&cols);
    for (k, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        for (_, s) in &series {
            row.push(s.values[k].re);
            row.push(s.values[k].im);
        }
        for (_, s) in &series {
            row.push(s.values[k].norm());
        }
        table.push(row);
    }
    Ok(vec![write_table("survival", config, "survival", &table)?])
}

pub fn cmd_smatrix(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let params = config.params()?;
    let block = config.smatrix_block()?;
    let rows = smatrix_scan(block.x_min, block.x_max, block.samples, &params)?;
    let mut table = Table::new(&["x", "re_S", "im_S", "abs_S", "phase_unwrapped"]);
    for r in rows {
        let s = r.sample;
        table.push(vec![s.x, s.value.re, s.value.im, s.value.norm(), r.phase]);
    }
    Ok(vec![write_table("smatrix", config, "smatrix", &table)?])
}

pub fn cmd_scan(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let params = config.params()?;
    let block = config.scan_block()?;
    let coupling = config.pole_block().convention.convention().effective(&params).coupling;
    if coupling == 0.0 {
        return Err(Error::NoPole.into());
    }
    let scan = field_scan(coupling, &block.e_values, config.seed()?)?;
    let mut table = Table::new(&["E", "re_z0", "im_z0", "re_residue", "im_residue"]);
    for (&e, pole) in scan.field_strengths.iter().zip(&scan.poles) {
        let res = residue_at_pole(pole, &ModelParams::new(e, coupling)?)?;
        table.push(vec![e, pole.z0.re, pole.z0.im, res.analytic.re, res.analytic.im]);
    }
    Ok(vec![write_table("scan", config, "scan", &table)?])
}

pub fn cmd_profile(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let block = config.profile_block()?;
    let (_, pole) = locate(config)?;
    let profile = resonance_profile(&pole, block.norm_constant)?;
    if profile.half_width < MIN_RELATIVE_WIDTH * profile.center.abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "half width {:.3e} is below double-precision resolution at center {}",
            profile.half_width, profile.center
        ))
        .into());
    }
    let mut table = Table::new(&["x", "intensity"]);
    for x in profile.sample_grid(block.samples) {
        table.push(vec![x, profile.intensity(x)]);
    }
    Ok(vec![write_table("profile", config, "profile", &table)?])
}

/// Validates and re-adjudicates the conventions ledger; with a config, also
/// writes the regenerated ledger into the output directory.
pub fn cmd_selftest(config: Option<&RunConfig>) -> Result<(Vec<Adjudication>, Vec<PathBuf>), CliError> {
    let (text, checks) = regenerate()?;
    let mut written = Vec::new();
    if let Some(c) = config {
        std::fs::create_dir_all(&c.output.directory)?;
        let path = c.output.directory.join("conventions.json");
        std::fs::write(&path, text)?;
        written.push(path);
    }
    Ok((checks, written))
}
