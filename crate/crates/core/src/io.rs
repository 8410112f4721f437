//! JSON documents for modular data, orbifold outputs and restricted S-matrix inputs.
//!
//! Rationals are exact strings (`"p/q"`); complex entries are objects of decimal
//! strings `{"re": "...", "im": "..."}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Complex};
use crate::modular_data::{ModularDatum, ModuleInfo};
use crate::phase::parse_rational;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0".to_string()
}

impl ComplexDoc {
    pub fn parse(&self) -> Result<Complex> {
        let re = parse_decimal(&self.re)?;
        let im = parse_decimal(&self.im)?;
        Ok(Complex::new(re, im))
    }

    pub fn from_complex(z: Complex) -> Self {
        ComplexDoc {
            re: format_f64(z.re),
            im: format_f64(z.im),
        }
    }
}

/// A complex entry may also be given as a bare decimal string (real value).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryDoc {
    Complex(ComplexDoc),
    Real(String),
}

impl EntryDoc {
    pub fn parse(&self) -> Result<Complex> {
        match self {
            EntryDoc::Complex(c) => c.parse(),
            EntryDoc::Real(s) => Ok(Complex::new(parse_decimal(s)?, 0.0)),
        }
    }
}

fn parse_decimal(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid decimal {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite decimal {s:?}")));
    }
    Ok(v)
}

/// Shortest round-trip decimal, with `-0` normalised to `0`.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

/// `%.{sig}g`-style formatting used by the CSV renderer.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    // Take the exponent after rounding, so 9.99… → 10 lands in the right branch.
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, e) = sci.split_once('e').unwrap();
    let e: i32 = e.parse().unwrap();
    if e < -5 || e >= sig as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{e}")
    } else {
        let decimals = (sig as i32 - 1 - e).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleDoc {
    pub label: String,
    pub h: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatumDoc {
    pub central_charge: String,
    pub modules: Vec<ModuleDoc>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<EntryDoc>>,
    /// Present on orbifold outputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbifold: Option<OrbifoldMeta>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OrbifoldMeta {
    pub k: i64,
    pub convention: String,
    pub parent_rank: usize,
    pub parent_central_charge: String,
}

pub fn parse_matrix(rows: &[Vec<EntryDoc>]) -> Result<CMatrix> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged S-matrix".into()));
    }
    let mut data = Vec::with_capacity(n * cols);
    for row in rows {
        for e in row {
            data.push(e.parse()?);
        }
    }
    CMatrix::from_shape_vec((n, cols), data).map_err(|e| Error::Parse(e.to_string()))
}

pub fn matrix_doc(m: &CMatrix) -> Vec<Vec<EntryDoc>> {
    m.rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .map(|z| EntryDoc::Complex(ComplexDoc::from_complex(*z)))
                .collect()
        })
        .collect()
}

impl DatumDoc {
    pub fn to_datum(&self) -> Result<ModularDatum> {
        let c = parse_rational(&self.central_charge)?;
        let modules = self
            .modules
            .iter()
            .map(|m| Ok(ModuleInfo::new(m.label.clone(), parse_rational(&m.h)?)))
            .collect::<Result<Vec<_>>>()?;
        let s = parse_matrix(&self.s)?;
        ModularDatum::new(c, modules, s)
    }

    pub fn from_datum(d: &ModularDatum) -> Self {
        DatumDoc {
            central_charge: d.central_charge().to_string(),
            modules: d
                .modules()
                .iter()
                .map(|m| ModuleDoc {
                    label: m.label.clone(),
                    h: m.weight.to_string(),
                    label_kind: None,
                    params: None,
                })
                .collect(),
            s: matrix_doc(d.s_matrix()),
            orbifold: None,
        }
    }
}

/// Parses a modular datum from its JSON document.
pub fn parse_modular_datum(text: &str) -> Result<ModularDatum> {
    let doc: DatumDoc = serde_json::from_str(text)?;
    doc.to_datum()
}

pub fn datum_to_json(d: &ModularDatum) -> String {
    to_json_pretty(&DatumDoc::from_datum(d))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_modular_datum(path: &Path) -> Result<ModularDatum> {
    parse_modular_datum(&read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::rat;

    #[test]
    fn smallest_document() {
        let d = parse_modular_datum(
            r#"{"central_charge":"8","modules":[{"label":"1","h":"0"}],"S":[["1"]]}"#,
        )
        .unwrap();
        assert_eq!(d.rank(), 1);
        assert_eq!(d.central_charge(), rat(8, 1));
        assert_eq!(d.s(0, 0), Complex::new(1.0, 0.0));
    }

    #[test]
    fn shape_violation_reported() {
        let text = r#"{"central_charge":"1/2",
            "modules":[{"label":"a","h":"0"},{"label":"b","h":"1/2"},{"label":"c","h":"1/16"}],
            "S":[["1","0"],["0","1"]]}"#;
        let err = parse_modular_datum(text).unwrap_err();
        assert!(err.to_string().contains("dimension mismatch"), "{err}");
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(parse_modular_datum("{"), Err(Error::Parse(_))));
        let ragged = r#"{"central_charge":"0","modules":[{"label":"a","h":"0"},{"label":"b","h":"0"}],
            "S":[["1","0"],["0"]]}"#;
        assert!(matches!(parse_modular_datum(ragged), Err(Error::Parse(_))));
        let bad_c = r#"{"central_charge":"x","modules":[{"label":"a","h":"0"}],"S":[["1"]]}"#;
        assert!(matches!(
            parse_modular_datum(bad_c),
            Err(Error::BadRational(_))
        ));
        let bad_entry = r#"{"central_charge":"0","modules":[{"label":"a","h":"0"}],"S":[[{"re":"one","im":"0"}]]}"#;
        assert!(matches!(
            parse_modular_datum(bad_entry),
            Err(Error::Parse(_))
        ));
        let dup = r#"{"central_charge":"0","modules":[{"label":"a","h":"0"},{"label":"a","h":"1"}],"S":[["1","0"],["0","1"]]}"#;
        assert!(matches!(
            parse_modular_datum(dup),
            Err(Error::DuplicateLabel(_))
        ));
        let vac = r#"{"central_charge":"0","modules":[{"label":"a","h":"1/2"}],"S":[["1"]]}"#;
        assert!(matches!(
            parse_modular_datum(vac),
            Err(Error::VacuumWeight(_))
        ));
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.5, 12), "0.5");
        assert_eq!(
            format_sig(-std::f64::consts::FRAC_1_SQRT_2, 12),
            "-0.707106781187"
        );
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(1.2e-17, 12), "1.2e-17");
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(0.99999999999999, 12), "1");
        assert_eq!(format_sig(123456.0, 12), "123456");
    }

    #[test]
    fn negative_zero_is_normalised() {
        assert_eq!(format_f64(-0.0), "0");
        assert_eq!(format_f64(0.125), "0.125");
    }
}
