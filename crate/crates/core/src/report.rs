//! JSON and CSV report files.
//!
//! Floats are written with 17 significant digits; non-finite values become the
//! strings `"neg_infinity"`, `"infinity"` and `"nan"`. Every JSON object carries
//! `schema_version`. Wall-clock fields are written as 0 unless timing is
//! requested, which keeps repeated runs byte-identical.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::equilibrium::EquilibriumResult;
use crate::error::{FreeError, Result};
use crate::inequalities::InequalityReport;
use crate::rmt::{ConvergenceSeries, EnsembleSample};

pub const SCHEMA_VERSION: u32 = 1;

/// A float that serializes non-finite values as sentinel strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "infinity".into()
    } else if v == f64::NEG_INFINITY {
        "neg_infinity".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_real(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "infinity" => Some(f64::INFINITY),
        "neg_infinity" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() { s.serialize_f64(self.0) } else { s.serialize_str(&format_real(self.0)) }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Real;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or a non-finite sentinel")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Real, E> {
                match v {
                    "nan" | "infinity" | "neg_infinity" => Ok(Real(parse_real(v).unwrap())),
                    _ => Err(E::custom(format!("unknown sentinel `{v}`"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Pretty printer that writes every float in `{:.16e}` form.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| FreeError::Io(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn from_json_str<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| FreeError::Parse { msg: e.to_string(), pos: e.column() })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = BufWriter::new(File::create(path).map_err(|e| FreeError::Io(format!("{}: {e}", path.display())))?);
    f.write_all(text.as_bytes())?;
    f.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json_string(value)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityJson {
    pub schema_version: u32,
    pub kind: String,
    pub lhs: Real,
    pub rhs: Real,
    pub deficit: Real,
    pub tolerance: Real,
    pub pass: bool,
    pub inputs: BTreeMap<String, String>,
    pub resolution: usize,
    pub runtime_ms: u64,
    pub seed: u64,
    pub sentinel: Option<String>,
}

impl InequalityJson {
    pub fn new(r: &InequalityReport, seed: u64, timing: bool) -> Self {
        InequalityJson {
            schema_version: SCHEMA_VERSION,
            kind: r.kind.name().into(),
            lhs: Real(r.lhs),
            rhs: Real(r.rhs),
            deficit: Real(r.deficit),
            tolerance: Real(r.tolerance),
            pass: r.pass,
            inputs: r.inputs.clone(),
            resolution: r.resolution,
            runtime_ms: if timing { r.runtime_ms } else { 0 },
            seed,
            sentinel: r.sentinel.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub euler_lagrange: Real,
    pub potential: Real,
    pub schwinger_dyson: Real,
    pub variational_defect: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumJson {
    pub schema_version: u32,
    pub potential: String,
    pub support: [Real; 2],
    pub el_constant: Real,
    pub pressure: Real,
    pub residuals: Residuals,
    pub iterations: usize,
    pub method: String,
    pub resolution: usize,
    pub seed: u64,
    /// `(x, density)` rows on the solver grid.
    pub density: Vec<[Real; 2]>,
}

impl EquilibriumJson {
    pub fn new(r: &EquilibriumResult, seed: u64) -> Self {
        EquilibriumJson {
            schema_version: SCHEMA_VERSION,
            potential: r.potential.clone(),
            support: [Real(r.support_lo), Real(r.support_hi)],
            el_constant: Real(r.el_constant),
            pressure: Real(r.pressure),
            residuals: Residuals {
                euler_lagrange: Real(r.el_residual),
                potential: Real(r.potential_residual),
                schwinger_dyson: Real(r.sd_residual),
                variational_defect: Real(r.variational_defect),
            },
            iterations: r.iterations,
            method: r.method.to_string(),
            resolution: r.measure.len(),
            seed,
            density: r.measure.nodes().iter().zip(r.measure.density()).map(|(&x, &d)| [Real(x), Real(d)]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub schema_version: u32,
    pub label: String,
    pub n_values: Vec<usize>,
    pub statistic: Vec<Real>,
    pub target: Option<Real>,
    pub seed: u64,
}

impl SeriesJson {
    pub fn new(s: &ConvergenceSeries, seed: u64) -> Self {
        SeriesJson {
            schema_version: SCHEMA_VERSION,
            label: s.label.clone(),
            n_values: s.n_values.clone(),
            statistic: s.statistic.iter().map(|&v| Real(v)).collect(),
            target: s.target.map(Real),
            seed,
        }
    }
}

/// Named scalar results for the smaller commands (`w2`, `pressure`, `moment-map`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuesJson {
    pub schema_version: u32,
    pub kind: String,
    pub inputs: BTreeMap<String, String>,
    pub values: BTreeMap<String, Real>,
    pub resolution: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<[Real; 2]>,
}

/// Columns `N,statistic,target`.
pub fn series_csv(s: &ConvergenceSeries) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["N", "statistic", "target"])?;
    let target = s.target.map(format_real).unwrap_or_default();
    for (n, v) in s.n_values.iter().zip(&s.statistic) {
        w.write_record([n.to_string(), format_real(*v), target.clone()])?;
    }
    finish(w)
}

/// Columns `sweep,eig_1,…,eig_N`; `sweep` counts retained sweeps over all chains.
pub fn sample_csv(s: &EnsembleSample) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["sweep".to_string()];
    header.extend((1..=s.n).map(|i| format!("eig_{i}")));
    w.write_record(&header)?;
    for (k, set) in s.eigenvalue_sets.iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(set.iter().map(|&v| format_real(v)));
        w.write_record(&row)?;
    }
    finish(w)
}

/// Columns `kind,inputs,lhs,rhs,deficit,pass`.
pub fn inequality_csv(reports: &[InequalityReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "inputs", "lhs", "rhs", "deficit", "pass"])?;
    for r in reports {
        let inputs = r.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        w.write_record([
            r.kind.name().to_string(),
            inputs,
            format_real(r.lhs),
            format_real(r.rhs),
            format_real(r.deficit),
            r.pass.to_string(),
        ])?;
    }
    finish(w)
}

/// Columns `x,density`, readable back as a `table:` measure.
pub fn density_csv(r: &EquilibriumResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "density"])?;
    for (&x, &d) in r.measure.nodes().iter().zip(r.measure.density()) {
        w.write_record([format_real(x), format_real(d)])?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| FreeError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentinels_round_trip() {
        let j = ValuesJson {
            schema_version: SCHEMA_VERSION,
            kind: "test".into(),
            inputs: BTreeMap::new(),
            values: [("a", -0.1), ("b", f64::NEG_INFINITY), ("c", f64::NAN), ("d", 1e300)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), Real(v)))
                .collect(),
            resolution: 4096,
            seed: 0,
            table: vec![],
        };
        let text = to_json_string(&j).unwrap();
        assert!(text.contains("\"neg_infinity\"") && text.contains("-1.0000000000000001e-1"));
        let back: ValuesJson = from_json_str(&text).unwrap();
        assert_eq!(to_json_string(&back).unwrap(), text);
        assert_eq!(back.values["a"].0.to_bits(), (-0.1f64).to_bits());
    }
}
