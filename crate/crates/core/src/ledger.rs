//! Conventions ledger: the convention choices the model leaves open, the
//! alternatives considered, and the test that settles each one.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::sync::LazyLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laxphillips::{smatrix_with_sign, SMatrixSign};
use crate::model::{DefectState, ModelParams};
use crate::poles::{field_scan, find_pole, locate_resonance, residue_at_pole, PoleConvention};
use crate::quad::{integrate, Tolerance};
use crate::resolvent::f_integral;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerEntry {
    pub key: String,
    pub adopted: String,
    pub alternatives: Vec<String>,
    /// `path::test_name`, relative to the crate root.
    pub evidence: String,
    pub anchor: String,
}

pub const SHIPPED: &str = include_str!("../data/conventions.json");

pub const MANDATORY_KEYS: [&str; 4] = ["phi-normalization", "f-branch", "s-matrix-sign", "pole-convention"];

// sources searched for evidence tests
const SOURCES: [(&str, &str); 10] = [
    ("src/model.rs", include_str!("model.rs")),
    ("src/resolvent.rs", include_str!("resolvent.rs")),
    ("src/poles.rs", include_str!("poles.rs")),
    ("src/evolution.rs", include_str!("evolution.rs")),
    ("src/laxphillips.rs", include_str!("laxphillips.rs")),
    ("tests/acceptance.rs", include_str!("../tests/acceptance.rs")),
    ("tests/oracle_adjudication.rs", include_str!("../tests/oracle_adjudication.rs")),
    ("tests/wave_operators.rs", include_str!("../tests/wave_operators.rs")),
    ("tests/resonance_state.rs", include_str!("../tests/resonance_state.rs")),
    ("tests/cli.rs", include_str!("../tests/cli.rs")),
];

static ENTRIES: LazyLock<Vec<LedgerEntry>> =
    LazyLock::new(|| serde_json::from_str(SHIPPED).expect("shipped conventions ledger is valid JSON"));

pub fn ledger() -> &'static [LedgerEntry] {
    &ENTRIES
}

pub fn entry(key: &str) -> Option<&'static LedgerEntry> {
    ledger().iter().find(|e| e.key == key)
}

/// The ledger as written by `selftest`; byte-identical to [`SHIPPED`] when
/// nothing has drifted.
pub fn render(entries: &[LedgerEntry]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(entries).map_err(|e| Error::Ledger(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn evidence_exists(evidence: &str) -> bool {
    let Some((path, name)) = evidence.split_once("::") else {
        return false;
    };
    SOURCES
        .iter()
        .find(|(p, _)| *p == path)
        .is_some_and(|(_, src)| src.contains(&format!("fn {name}(")))
}

/// Unique keys, all mandatory keys present, every evidence test present.
pub fn validate(entries: &[LedgerEntry]) -> Result<()> {
    let mut seen = HashSet::new();
    for e in entries {
        if !seen.insert(e.key.as_str()) {
            return Err(Error::Ledger(format!("duplicate key {}", e.key)));
        }
        if !evidence_exists(&e.evidence) {
            return Err(Error::Ledger(format!("evidence test {} for {} not found", e.evidence, e.key)));
        }
    }
    for k in MANDATORY_KEYS {
        if !seen.contains(k) {
            return Err(Error::Ledger(format!("mandatory key {k} missing")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adjudication {
    pub key: String,
    pub passed: bool,
    pub detail: String,
}

fn check(key: &str, passed: bool, detail: String) -> Adjudication {
    Adjudication { key: key.to_string(), passed, detail }
}

/// Recomputes the numerical facts behind each entry.
pub fn adjudicate() -> Result<Vec<Adjudication>> {
    let mut out = Vec::new();

    let phi = DefectState;
    let mass = integrate(|x: f64| phi.eval(x).powi(2), -12.0, 12.0, Tolerance::new(1e-14, 1e-14))?.value;
    out.push(check("phi-normalization", (mass - 1.0).abs() < 1e-12, format!("<phi|phi> = {mass:.15}")));

    let p = ModelParams::new(1.0, 2.0)?;
    let z = Complex64::new(1.0, 1.0);
    let direct = integrate(
        |x: f64| (-2.0 * x * x).exp() / (z + x),
        -12.0,
        12.0,
        Tolerance::new(1e-13, 1e-13),
    )?
    .value;
    let adopted = f_integral(z, &p)?;
    let printed = Complex64::new(0.0, PI) * crate::cerf::faddeeva_w(-z * std::f64::consts::SQRT_2)?;
    let adopted_gap = (adopted - direct).norm() / direct.norm();
    let printed_gap = (printed - direct).norm() / direct.norm();
    out.push(check(
        "f-branch",
        adopted_gap < 1e-8 && printed_gap > 1e-2,
        format!("at z = 1+i: adopted rel. error {adopted_gap:.2e}, printed form rel. error {printed_gap:.2e}"),
    ));

    let mut worst_minus: f64 = 0.0;
    let mut worst_plus: f64 = 0.0;
    for k in 0..=40 {
        let x = -4.0 + 0.2 * k as f64;
        worst_minus = worst_minus.max(smatrix_with_sign(x, &p, SMatrixSign::Minus)?.modulus_defect);
        worst_plus = worst_plus.max(smatrix_with_sign(x, &p, SMatrixSign::Plus)?.modulus_defect);
    }
    out.push(check(
        "s-matrix-sign",
        worst_minus <= 1e-10 && worst_plus > 1e-2,
        format!("max ||S|-1|: minus {worst_minus:.2e}, plus {worst_plus:.2e}"),
    ));

    let p11 = ModelParams::new(1.0, 11.0)?;
    let derived = locate_resonance(&p11, Complex64::new(11.0, -1e-3))?;
    let reference_params = PoleConvention::ReferenceCoupling.effective(&p11);
    let reference = locate_resonance(&reference_params, Complex64::new(-4.4, -1e-3))?;
    out.push(check(
        "pole-convention",
        (derived.z0.re - 11.022_774_623_495_573).abs() < 1e-9 && (reference.z0.re + 4.446).abs() < 1e-3,
        format!("as derived {:.10e}, reference coupling {:.10e}", derived.z0, reference.z0),
    ));

    let broad = find_pole(&p, Complex64::new(2.0, -0.1))?;
    let res = residue_at_pole(&broad, &p)?;
    let ratio = res.formula / res.contour;
    out.push(check(
        "residue-prefactor",
        (ratio + 16.0).norm() < 1e-6 && (res.analytic - res.contour).norm() < 1e-9 * res.contour.norm(),
        format!("formula {:.6e}, contour {:.6e}, ratio {:.10e}", res.formula, res.contour, ratio),
    ));

    let fields = [0.5, 0.75, 1.0, 1.5, 2.0];
    let negative = field_scan(-2.0, &fields, None)?;
    let positive = field_scan(2.0, &fields, None)?;
    out.push(check(
        "field-dependence",
        negative.re_decrease_violations == 0 && positive.re_decrease_violations > 0,
        format!(
            "lambda = -2: {} violations; lambda = 2: {} violations",
            negative.re_decrease_violations, positive.re_decrease_violations
        ),
    ));

    Ok(out)
}

/// Validates the shipped ledger, re-adjudicates every entry and returns the
/// regenerated file contents.
pub fn regenerate() -> Result<(String, Vec<Adjudication>)> {
    validate(ledger())?;
    let checks = adjudicate()?;
    for e in ledger() {
        if !checks.iter().any(|c| c.key == e.key) {
            return Err(Error::Ledger(format!("no adjudication for {}", e.key)));
        }
    }
    if let Some(bad) = checks.iter().find(|c| !c.passed) {
        return Err(Error::Ledger(format!("{} no longer holds: {}", bad.key, bad.detail)));
    }
    Ok((render(ledger())?, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_ledger_is_valid() {
        validate(ledger()).unwrap();
        assert!(ledger().len() >= 4);
    }

    #[test]
    fn render_round_trips_shipped_bytes() {
        assert_eq!(render(ledger()).unwrap(), SHIPPED);
    }

    #[test]
    fn mandatory_entries() {
        assert!(entry("phi-normalization").unwrap().adopted.starts_with("phi(x) = (2/pi)^{1/4} e^{-x^2}"));
        assert!(entry("s-matrix-sign").unwrap().evidence.contains("unimodular"));
        assert!(entry("pole-convention").unwrap().adopted.starts_with("as derived"));
    }

    #[test]
    fn missing_evidence_is_rejected() {
        let mut entries = ledger().to_vec();
        entries[0].evidence = "src/model.rs::no_such_test".into();
        assert!(matches!(validate(&entries), Err(Error::Ledger(_))));
        let mut entries = ledger().to_vec();
        entries.retain(|e| e.key != "f-branch");
        assert!(validate(&entries).is_err());
        let mut entries = ledger().to_vec();
        entries.push(entries[0].clone());
        assert!(validate(&entries).is_err());
    }

    #[test]
    fn adjudication_holds() {
        let checks = adjudicate().unwrap();
        for c in &checks {
            assert!(c.passed, "{}: {}", c.key, c.detail);
        }
    }
}
