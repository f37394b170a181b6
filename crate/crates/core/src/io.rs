//! File formats: trajectories as CSV, fitted densities as JSON, and
//! analysis result tables as CSV or JSON.
//!
//! Trajectory CSV:
//!
//! ```text
//! # rate=30 closed=1
//! t,x,y
//! 0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0
//! ```
//!
//! The metadata line is optional. Without it the rate is inferred from the
//! time column and the path is treated as open.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{EmpiricalModel, EmpiricalPdf, PdfLabel};
use crate::trajectory::{Point2, Trajectory};

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reals with 17 significant digits, enough to round-trip any f64.
fn real(v: f64) -> String {
    format!("{v:.16e}")
}

struct Meta {
    rate: Option<f64>,
    closed: bool,
}

fn parse_meta(line: &str) -> Result<Meta> {
    let mut meta = Meta {
        rate: None,
        closed: false,
    };
    for tok in line.trim_start_matches('#').split_whitespace() {
        let Some((k, v)) = tok.split_once('=') else {
            return Err(parse_err(1, format!("bad metadata token {tok:?}")));
        };
        match k {
            "rate" => {
                let r: f64 = v
                    .parse()
                    .map_err(|_| parse_err(1, format!("bad rate {v:?}")))?;
                meta.rate = Some(r);
            }
            "closed" => {
                meta.closed = match v {
                    "1" | "true" => true,
                    "0" | "false" => false,
                    _ => return Err(parse_err(1, format!("bad closed flag {v:?}"))),
                }
            }
            // unknown keys are left for other tools
            _ => {}
        }
    }
    Ok(meta)
}

/// Parses trajectory CSV text. LF and CRLF line endings are accepted.
pub fn parse_trajectory(text: &str) -> Result<Trajectory> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let (meta, body, offset) = match text.split_once('\n') {
        Some((first, rest)) if first.trim_start().starts_with('#') => {
            (parse_meta(first.trim_end_matches('\r'))?, rest, 1)
        }
        None if text.trim_start().starts_with('#') => (parse_meta(text)?, "", 1),
        _ => (
            Meta {
                rate: None,
                closed: false,
            },
            text,
            0,
        ),
    };

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let mut records = rdr.records();
    let header_line = offset + 1;
    match records.next() {
        Some(Ok(h)) if h.iter().eq(["t", "x", "y"]) => {}
        Some(Ok(h)) => {
            return Err(parse_err(
                header_line,
                format!(
                    "expected header t,x,y, got {:?}",
                    h.iter().collect::<Vec<_>>().join(",")
                ),
            ))
        }
        Some(Err(e)) => return Err(parse_err(header_line, e.to_string())),
        None => return Err(parse_err(header_line, "missing header t,x,y")),
    }

    let mut times = Vec::new();
    let mut points = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line()) + offset;
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line()) + offset;
        if rec.len() != 3 {
            return Err(parse_err(
                line,
                format!("expected 3 fields, got {}", rec.len()),
            ));
        }
        let mut v = [0.0f64; 3];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field
                .parse()
                .map_err(|_| parse_err(line, format!("not a number: {field:?}")))?;
            if !slot.is_finite() {
                return Err(parse_err(line, format!("not finite: {field:?}")));
            }
        }
        if let Some(&prev) = times.last() {
            if v[0] <= prev {
                return Err(Error::Validation(format!(
                    "line {line}: time {} does not increase (previous {prev})",
                    v[0]
                )));
            }
        }
        times.push(v[0]);
        points.push(Point2::new(v[1], v[2]));
    }
    if points.len() < 2 {
        return Err(Error::Validation(format!(
            "trajectory needs at least 2 samples, got {}",
            points.len()
        )));
    }
    let rate = match meta.rate {
        Some(r) => r,
        None => (points.len() - 1) as f64 / (times[times.len() - 1] - times[0]),
    };
    Trajectory::new(points, rate, meta.closed)
}

pub fn format_trajectory(traj: &Trajectory) -> String {
    format_trajectory_tagged(traj, &[])
}

/// As [`format_trajectory`], with extra `key=value` pairs on the metadata
/// line. Readers skip keys they do not know.
pub fn format_trajectory_tagged(traj: &Trajectory, tags: &[(&str, String)]) -> String {
    let mut out = format!(
        "# rate={} closed={}",
        traj.sample_rate_hz(),
        u8::from(traj.is_closed())
    );
    for (k, v) in tags {
        out.push_str(&format!(" {k}={}", v.replace(char::is_whitespace, "_")));
    }
    out.push_str("\nt,x,y\n");
    for (i, p) in traj.samples().iter().enumerate() {
        let t = i as f64 / traj.sample_rate_hz();
        out.push_str(&format!("{},{},{}\n", real(t), real(p.x), real(p.y)));
    }
    out
}

pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Trajectory> {
    parse_trajectory(&fs::read_to_string(path)?)
}

pub fn write_trajectory(traj: &Trajectory, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_trajectory(traj))?;
    Ok(())
}

/// One fitted density as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdfFile {
    pub measure: String,
    pub label: PdfLabel,
    pub bandwidth: f64,
    pub samples: Vec<f64>,
    /// Provenance of the fit; ignored when loading.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<TableMeta>,
}

impl PdfFile {
    pub fn from_pdf(measure: &str, pdf: &EmpiricalPdf) -> Self {
        Self {
            measure: measure.to_string(),
            label: pdf.label(),
            bandwidth: pdf.bandwidth(),
            samples: pdf.samples().to_vec(),
            metadata: None,
        }
    }

    pub fn to_pdf(&self) -> Result<EmpiricalPdf> {
        EmpiricalPdf::from_parts(self.samples.clone(), self.bandwidth, self.label)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(PdfFile),
    Many(Vec<PdfFile>),
}

/// Parses a single density object or an array of them.
pub fn parse_pdfs(text: &str) -> Result<Vec<PdfFile>> {
    Ok(match serde_json::from_str::<OneOrMany>(text)? {
        OneOrMany::One(p) => vec![p],
        OneOrMany::Many(v) => v,
    })
}

pub fn read_pdfs(path: impl AsRef<Path>) -> Result<Vec<PdfFile>> {
    parse_pdfs(&fs::read_to_string(path)?)
}

pub fn format_pdfs(files: &[PdfFile]) -> Result<String> {
    let mut text = serde_json::to_string_pretty(files)?;
    text.push('\n');
    Ok(text)
}

pub fn write_pdfs(files: &[PdfFile], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_pdfs(files)?)?;
    Ok(())
}

pub fn model_to_pdfs(measure: &str, model: &EmpiricalModel) -> Vec<PdfFile> {
    std::iter::once(&model.follow)
        .chain(model.null.as_ref())
        .chain(model.other.as_ref())
        .map(|p| PdfFile::from_pdf(measure, p))
        .collect()
}

/// Assembles an empirical model from stored densities. Exactly one follow
/// density is required; null and other are optional.
pub fn pdfs_to_model(files: &[PdfFile]) -> Result<EmpiricalModel> {
    let pick = |label: PdfLabel| -> Result<Option<EmpiricalPdf>> {
        let mut found = files.iter().filter(|f| f.label == label);
        let first = found.next().map(PdfFile::to_pdf).transpose()?;
        if found.next().is_some() {
            return Err(Error::Config(format!("more than one {label:?} density")));
        }
        Ok(first)
    };
    Ok(EmpiricalModel {
        follow: pick(PdfLabel::Follow)?
            .ok_or_else(|| Error::Config("no follow density in model file".into()))?,
        null: pick(PdfLabel::Null)?,
        other: pick(PdfLabel::Other)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Header attached to every result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, String>,
}

impl TableMeta {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        Self {
            tool: "mocorr".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }
}

#[derive(Serialize)]
struct JsonTable<'a, T> {
    metadata: &'a TableMeta,
    records: &'a [T],
}

/// Writes flat records. CSV output starts with `#` comment lines holding
/// the metadata, followed by a header row named after the record fields.
pub fn write_table<T: Serialize, W: Write>(
    out: &mut W,
    meta: &TableMeta,
    records: &[T],
    format: Format,
) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(
                &mut *out,
                &JsonTable {
                    metadata: meta,
                    records,
                },
            )?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "# tool={} version={}", meta.tool, meta.version)?;
            writeln!(out, "# command={}", meta.command)?;
            match meta.seed {
                Some(s) => writeln!(out, "# seed={s}")?,
                None => writeln!(out, "# seed=none")?,
            }
            for (k, v) in &meta.params {
                writeln!(out, "# {k}={v}")?;
            }
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in records {
                w.serialize(r)
                    .map_err(|e| Error::Validation(e.to_string()))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Like [`write_table`] for records whose columns are only known at run
/// time. `None` cells are written empty in CSV and as `null` in JSON.
/// One row as a JSON object keyed in column order.
struct Record<'a>(&'a [String], &'a [Option<f64>]);

impl Serialize for Record<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

pub fn write_columns<W: Write>(
    out: &mut W,
    meta: &TableMeta,
    columns: &[String],
    rows: &[Vec<Option<f64>>],
    format: Format,
) -> Result<()> {
    if let Some(r) = rows.iter().find(|r| r.len() != columns.len()) {
        return Err(Error::Validation(format!(
            "row has {} cells for {} columns",
            r.len(),
            columns.len()
        )));
    }
    match format {
        Format::Json => {
            let records: Vec<Record<'_>> = rows.iter().map(|r| Record(columns, r)).collect();
            write_table(out, meta, &records, Format::Json)
        }
        Format::Csv => {
            write_table::<(), W>(out, meta, &[], Format::Csv)?;
            let mut w = csv::Writer::from_writer(&mut *out);
            let csv_err = |e: csv::Error| Error::Validation(e.to_string());
            w.write_record(columns).map_err(csv_err)?;
            for r in rows {
                w.write_record(
                    r.iter()
                        .map(|c| c.map(|v| v.to_string()).unwrap_or_default()),
                )
                .map_err(csv_err)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
