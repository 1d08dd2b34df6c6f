//! Reading and writing profile and sweep tables.
//!
//! CSV files have a header row, comma separators, LF line endings and every
//! number written with 17 significant digits, so a written table re-reads to
//! the same bits. Profile columns, in order:
//!
//! ```text
//! x, alpha, dalpha, energy_density, charge_density, bps_residual
//! ```
//!
//! Sweep columns, in order: `kappa, L, E, Q_quad, Q_closed, defect`.
//!
//! JSON documents carry `schema_version` (currently 1) and serialize fields in
//! declaration order.

use serde::{Deserialize, Serialize};

use crate::analysis::EnergyChargeReport;
use crate::error::{Error, Result};
use crate::model::{bps_residual, charge_density, energy_density, KinkSign, ModelParams};
use crate::solvers::{KinkProfile, Provenance};

pub const SCHEMA_VERSION: u32 = 1;

pub const PROFILE_COLUMNS: [&str; 6] = [
    "x",
    "alpha",
    "dalpha",
    "energy_density",
    "charge_density",
    "bps_residual",
];

pub const SWEEP_COLUMNS: [&str; 6] = ["kappa", "L", "E", "Q_quad", "Q_closed", "defect"];

/// One sample of a profile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileRow {
    pub x: f64,
    pub alpha: f64,
    pub dalpha: f64,
    pub energy_density: f64,
    pub charge_density: f64,
    pub bps_residual: f64,
}

impl ProfileRow {
    fn to_array(self) -> [f64; 6] {
        [
            self.x,
            self.alpha,
            self.dalpha,
            self.energy_density,
            self.charge_density,
            self.bps_residual,
        ]
    }

    fn from_array(v: [f64; 6]) -> Self {
        Self {
            x: v[0],
            alpha: v[1],
            dalpha: v[2],
            energy_density: v[3],
            charge_density: v[4],
            bps_residual: v[5],
        }
    }
}

/// Tabulates a profile with its densities and the residual of its own branch.
pub fn profile_rows(profile: &KinkProfile) -> Vec<ProfileRow> {
    let p = &profile.params;
    profile
        .xs()
        .iter()
        .zip(profile.states())
        .map(|(&x, s)| ProfileRow {
            x,
            alpha: s.alpha,
            dalpha: s.dalpha,
            energy_density: energy_density(s, p),
            charge_density: charge_density(s, p),
            bps_residual: bps_residual(s, profile.sign, p),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// `x` in the caller's units with the given `lambda` and `L`.
    Original,
    /// `x / L`, so that `L = 1` and `lambda = kappa`.
    Rescaled,
}

/// JSON form of a profile: parameters, branch and the sample table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    pub schema_version: u32,
    pub units: Units,
    pub lambda: f64,
    #[serde(rename = "L")]
    pub big_l: f64,
    pub kappa: f64,
    pub sign: KinkSign,
    pub vacuum_base: i64,
    pub provenance: Provenance,
    pub rows: Vec<ProfileRow>,
}

impl ProfileDocument {
    pub fn new(profile: &KinkProfile, units: Units) -> Self {
        let p = &profile.params;
        Self {
            schema_version: SCHEMA_VERSION,
            units,
            lambda: p.lambda(),
            big_l: p.big_l(),
            kappa: p.kappa(),
            sign: profile.sign,
            vacuum_base: profile.vacuum_base,
            provenance: profile.provenance,
            rows: profile_rows(profile),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.lambda, self.big_l)
    }
}

/// One line of a coupling sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRow {
    pub kappa: f64,
    #[serde(rename = "L")]
    pub big_l: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "Q_quad")]
    pub charge_quadrature: f64,
    #[serde(rename = "Q_closed")]
    pub charge_closed_form: f64,
    pub defect: f64,
}

impl SweepRow {
    fn to_array(self) -> [f64; 6] {
        [
            self.kappa,
            self.big_l,
            self.energy,
            self.charge_quadrature,
            self.charge_closed_form,
            self.defect,
        ]
    }

    fn from_array(v: [f64; 6]) -> Self {
        Self {
            kappa: v[0],
            big_l: v[1],
            energy: v[2],
            charge_quadrature: v[3],
            charge_closed_form: v[4],
            defect: v[5],
        }
    }
}

impl From<&EnergyChargeReport> for SweepRow {
    fn from(r: &EnergyChargeReport) -> Self {
        Self {
            kappa: r.params.kappa(),
            big_l: r.params.big_l(),
            energy: r.energy,
            charge_quadrature: r.charge_quadrature,
            charge_closed_form: r.charge_closed_form,
            defect: r.bps_defect,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDocument {
    pub schema_version: u32,
    pub units: Units,
    pub rows: Vec<SweepRow>,
}

/// Formats a float with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv<const N: usize>(
    header: &[&str; N],
    rows: impl IntoIterator<Item = [f64; N]>,
) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::Numeric(format!("csv write failed: {e}"));
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| format_f64(v)))
            .map_err(io_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Numeric(format!("csv write failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Numeric(format!("csv write failed: {e}")))
}

fn read_csv<const N: usize>(text: &str, header: &[&str; N]) -> Result<Vec<[f64; N]>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = r.records();
    let parse_err = |line: u64, msg: String| Error::Parse {
        line: line as usize,
        msg,
    };
    let first = match records.next() {
        None => return Err(parse_err(1, "missing header row".into())),
        Some(rec) => rec.map_err(|e| parse_err(1, e.to_string()))?,
    };
    if first.iter().ne(header.iter().copied()) {
        return Err(parse_err(
            1,
            format!(
                "header must be {:?}, got {:?}",
                header,
                first.iter().collect::<Vec<_>>()
            ),
        ));
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != N {
            return Err(parse_err(
                line,
                format!("expected {N} fields, got {}", rec.len()),
            ));
        }
        let mut row = [0.0; N];
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("not a finite number: {field:?}")))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

fn ensure_finite(values: impl IntoIterator<Item = f64>) -> Result<()> {
    match values.into_iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::Numeric(format!(
            "cannot serialize non-finite value {v}"
        ))),
        None => Ok(()),
    }
}

fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)
        .map_err(|e| Error::Numeric(format!("json write failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })
}

fn check_schema(version: u32) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(Error::Parse {
            line: 0,
            msg: format!("unsupported schema_version {version} (expected {SCHEMA_VERSION})"),
        });
    }
    Ok(())
}

pub fn write_profile_csv(rows: &[ProfileRow]) -> Result<String> {
    write_csv(&PROFILE_COLUMNS, rows.iter().map(|r| r.to_array()))
}

pub fn read_profile_csv(text: &str) -> Result<Vec<ProfileRow>> {
    Ok(read_csv(text, &PROFILE_COLUMNS)?
        .into_iter()
        .map(ProfileRow::from_array)
        .collect())
}

pub fn write_profile_json(doc: &ProfileDocument) -> Result<String> {
    ensure_finite(doc.rows.iter().flat_map(|r| r.to_array()))?;
    ensure_finite([doc.lambda, doc.big_l, doc.kappa])?;
    to_json(doc)
}

pub fn read_profile_json(text: &str) -> Result<ProfileDocument> {
    let doc: ProfileDocument = from_json(text)?;
    check_schema(doc.schema_version)?;
    Ok(doc)
}

pub fn write_sweep_csv(rows: &[SweepRow]) -> Result<String> {
    write_csv(&SWEEP_COLUMNS, rows.iter().map(|r| r.to_array()))
}

pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    Ok(read_csv(text, &SWEEP_COLUMNS)?
        .into_iter()
        .map(SweepRow::from_array)
        .collect())
}

pub fn write_sweep_json(doc: &SweepDocument) -> Result<String> {
    ensure_finite(doc.rows.iter().flat_map(|r| r.to_array()))?;
    to_json(doc)
}

pub fn read_sweep_json(text: &str) -> Result<SweepDocument> {
    let doc: SweepDocument = from_json(text)?;
    check_schema(doc.schema_version)?;
    Ok(doc)
}

/// Parses a list of couplings, one per line. Blank lines and lines starting
/// with `#` are skipped; anything else must be a finite positive number.
pub fn parse_kappa_list(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let kappa: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("not a number: {line:?}"),
        })?;
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("kappa must be finite and > 0, got {kappa}"),
            });
        }
        out.push(kappa);
    }
    Ok(out)
}
