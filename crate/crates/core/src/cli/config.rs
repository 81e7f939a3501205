use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{GridSpec, ModelParams};
use crate::poles::{PoleConvention, Rectangle};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole: Option<PoleBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub survival: Option<SurvivalBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smatrix: Option<SMatrixBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileBlock>,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub field_strength: f64,
    pub coupling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionName {
    #[default]
    AsDerived,
    ReferenceCoupling,
}

impl ConventionName {
    pub fn convention(self) -> PoleConvention {
        match self {
            Self::AsDerived => PoleConvention::AsDerived,
            Self::ReferenceCoupling => PoleConvention::ReferenceCoupling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowBlock {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleBlock {
    /// `[re, im]`; the real-axis scan picks one when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowBlock>,
    #[serde(default)]
    pub convention: ConventionName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Contour,
    Pole,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurvivalBlock {
    pub t_max: f64,
    pub t_steps: usize,
    #[serde(default = "all_methods")]
    pub methods: Vec<MethodName>,
}

fn all_methods() -> Vec<MethodName> {
    vec![MethodName::Contour, MethodName::Pole, MethodName::Oracle]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SMatrixBlock {
    pub x_min: f64,
    pub x_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub e_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    pub half_width: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileBlock {
    #[serde(default = "unit")]
    pub norm_constant: f64,
    #[serde(default = "profile_samples")]
    pub samples: usize,
}

fn unit() -> f64 {
    1.0
}

fn profile_samples() -> usize {
    4001
}

impl Default for ProfileBlock {
    fn default() -> Self {
        Self { norm_constant: unit(), samples: profile_samples() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: PathBuf,
    #[serde(default)]
    pub format: Format,
}

fn bad(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!("line {}, column {}: {}", e.line(), e.column(), e))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        ModelParams::new(self.model.field_strength, self.model.coupling).map_err(|e| bad("model", e))
    }

    pub fn pole_block(&self) -> PoleBlock {
        self.pole.unwrap_or_default()
    }

    pub fn seed(&self) -> Result<Option<Complex64>, CliError> {
        match self.pole_block().seed {
            Some([re, im]) if re.is_finite() && im.is_finite() => Ok(Some(Complex64::new(re, im))),
            Some(_) => Err(bad("pole.seed", "must be finite")),
            None => Ok(None),
        }
    }

    pub fn window(&self) -> Result<Option<Rectangle>, CliError> {
        let Some(w) = self.pole_block().window else {
            return Ok(None);
        };
        if !(w.re_min < w.re_max && w.im_min < w.im_max) || ![w.re_min, w.re_max, w.im_min, w.im_max].iter().all(|v| v.is_finite()) {
            return Err(bad("pole.window", "needs finite re_min < re_max and im_min < im_max"));
        }
        Ok(Some(Rectangle::new(Complex64::new(w.re_min, w.im_min), Complex64::new(w.re_max, w.im_max))))
    }

    pub fn survival_block(&self) -> Result<&SurvivalBlock, CliError> {
        let s = self.survival.as_ref().ok_or_else(|| bad("survival", "block missing"))?;
        if !(s.t_max >= 0.0 && s.t_max.is_finite()) {
            return Err(bad("survival.t_max", "must be finite and >= 0"));
        }
        if s.methods.is_empty() {
            return Err(bad("survival.methods", "must name at least one method"));
        }
        Ok(s)
    }

    pub fn smatrix_block(&self) -> Result<SMatrixBlock, CliError> {
        let s = self.smatrix.ok_or_else(|| bad("smatrix", "block missing"))?;
        if !(s.x_min.is_finite() && s.x_max.is_finite() && s.x_max > s.x_min) || s.samples < 2 {
            return Err(bad("smatrix", "needs finite x_min < x_max and samples >= 2"));
        }
        Ok(s)
    }

    pub fn scan_block(&self) -> Result<&ScanBlock, CliError> {
        let s = self.scan.as_ref().ok_or_else(|| bad("scan", "block missing"))?;
        if s.e_values.is_empty() {
            return Err(bad("scan.e_values", "must not be empty"));
        }
        if s.e_values.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(bad("scan.e_values", "field strengths must be finite and > 0"));
        }
        if s.e_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(bad("scan.e_values", "must be strictly ascending"));
        }
        Ok(s)
    }

    pub fn oracle_grid(&self) -> Result<Option<GridSpec>, CliError> {
        match self.oracle {
            Some(o) => GridSpec::new(o.half_width, o.points).map(Some).map_err(|e| bad("oracle", e)),
            None => Ok(None),
        }
    }

    pub fn profile_block(&self) -> Result<ProfileBlock, CliError> {
        let p = self.profile.unwrap_or_default();
        if !(p.norm_constant > 0.0 && p.norm_constant.is_finite()) {
            return Err(bad("profile.norm_constant", "must be finite and > 0"));
        }
        if p.samples < 3 {
            return Err(bad("profile.samples", "must be >= 3"));
        }
        Ok(p)
    }
}
