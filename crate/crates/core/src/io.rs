//! File formats: p-value input, matrix/constant/solution export, study reports.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so reading
//! a written matrix or vector back yields bit-identical values.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::constants::CriticalVector;
use crate::error::{Error, Result};
use crate::lp::LpSolution;
use crate::matrices::{AssociatedMatrix, ErrorRate, ErrorRateSpec};
use crate::procedures::{AdjustedPValues, DecisionSet, PValueVector};
use crate::sim::SimReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

/// Reads p-values: one decimal per line, or `label,value` pairs. Blank lines
/// and `#` comments are skipped, and a leading `label,value` or `value`
/// header is accepted.
pub fn read_pvalues<R: Read>(reader: R) -> Result<PValueVector> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut any_label = false;
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let (label, raw) = match record.len() {
            1 => (None, &record[0]),
            2 => (Some(&record[0]), &record[1]),
            k => {
                return Err(Error::Parse { line, message: format!("expected 1 or 2 fields, found {k}") })
            }
        };
        if idx == 0 && raw.eq_ignore_ascii_case("value") {
            continue;
        }
        let value: f64 = raw
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("`{raw}` is not a number") })?;
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Parse { line, message: format!("p-value {value} is outside [0, 1]") });
        }
        any_label |= label.is_some();
        labels.push(label.map_or_else(|| (values.len() + 1).to_string(), str::to_owned));
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::Parse { line: 0, message: "no p-values found".into() });
    }
    let p = PValueVector::new(values)?;
    if any_label {
        p.with_labels(labels)
    } else {
        Ok(p)
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// `# spec: rate=.. n=.. k=..|gamma=..` followed by `n` comma-separated rows.
pub fn write_matrix_csv<W: Write>(a: &AssociatedMatrix, mut w: W) -> Result<()> {
    writeln!(w, "# spec: {}", a.spec())?;
    for row in a.rows() {
        writeln!(w, "{}", join(row))?;
    }
    Ok(())
}

fn parse_spec_header(line: &str) -> Result<ErrorRateSpec> {
    let body = line
        .trim()
        .strip_prefix("# spec:")
        .ok_or_else(|| Error::Parse { line: 1, message: "missing `# spec:` header".into() })?;
    let (mut rate, mut n, mut k, mut gamma) = (None, None, None, None);
    let bad = |m: String| Error::Parse { line: 1, message: m };
    for field in body.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| bad(format!("malformed `{field}`")))?;
        match key {
            "rate" => rate = Some(value.parse::<ErrorRate>()?),
            "n" => n = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "k" => k = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "gamma" => gamma = Some(value.parse::<f64>().map_err(|e| bad(e.to_string()))?),
            _ => return Err(bad(format!("unknown header field `{key}`"))),
        }
    }
    let rate = rate.ok_or_else(|| bad("header lacks rate".into()))?;
    let n = n.ok_or_else(|| bad("header lacks n".into()))?;
    ErrorRateSpec::new(rate, n, k, gamma)
}

pub fn read_matrix_csv<R: BufRead>(reader: R) -> Result<AssociatedMatrix> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| Error::Parse { line: 1, message: "empty file".into() })??;
    let spec = parse_spec_header(&header)?;
    let mut rows = Vec::with_capacity(spec.n);
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse { line: idx as u64 + 2, message: e.to_string() })?;
        rows.push(row);
    }
    AssociatedMatrix::from_rows(spec, rows)
}

pub fn write_matrix_json<W: Write>(a: &AssociatedMatrix, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, a)?;
    Ok(())
}

fn constants_header(c: &CriticalVector) -> String {
    let p = c.params();
    let mut out = format!("# family: {} n={}", c.family(), c.len());
    if let Some(parent) = p.parent {
        out.push_str(&format!(" parent={parent}"));
    }
    if let Some(g) = p.gamma {
        out.push_str(&format!(" gamma={g}"));
    }
    if let Some(k) = p.k {
        out.push_str(&format!(" k={k}"));
    }
    if let Some(d) = p.scale {
        out.push_str(&format!(" scale={d}"));
    }
    if let Some(a) = p.alpha {
        out.push_str(&format!(" alpha={a}"));
    }
    out
}

/// Metadata comment, then `i,value` rows with 1-based `i`.
pub fn write_constants_csv<W: Write>(c: &CriticalVector, mut w: W) -> Result<()> {
    writeln!(w, "{}", constants_header(c))?;
    writeln!(w, "i,value")?;
    for (i, v) in c.values().iter().enumerate() {
        writeln!(w, "{},{}", i + 1, v)?;
    }
    Ok(())
}

/// Reads constants from `i,value` rows (as written by [`write_constants_csv`])
/// or from a plain one-value-per-line list.
pub fn read_constants<R: Read>(reader: R) -> Result<CriticalVector> {
    let mut text = String::new();
    let mut reader = reader;
    reader.read_to_string(&mut text)?;
    if text.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(&text)?);
    }
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("i,value") {
            continue;
        }
        let raw = line.rsplit(',').next().unwrap_or(line).trim();
        let v: f64 = raw.parse().map_err(|_| Error::Parse {
            line: idx as u64 + 1,
            message: format!("`{raw}` is not a number"),
        })?;
        values.push(v);
    }
    CriticalVector::custom(values)
}

pub fn write_constants_json<W: Write>(c: &CriticalVector, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, c)?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// Summary comments, then `i,floor,xi` rows.
pub fn write_solution_csv<W: Write>(floor: &CriticalVector, s: &LpSolution, mut w: W) -> Result<()> {
    writeln!(w, "# status: {}", s.status)?;
    writeln!(w, "# F(c)={} F(xi)={} M1={} M2={}", s.floor_objective, s.objective, opt(s.m1), opt(s.m2))?;
    writeln!(w, "i,floor,xi")?;
    for (i, (c, x)) in floor.values().iter().zip(s.xi.values()).enumerate() {
        writeln!(w, "{},{},{}", i + 1, c, x)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SolutionDoc<'a> {
    floor: &'a CriticalVector,
    solution: &'a LpSolution,
}

pub fn write_solution_json<W: Write>(floor: &CriticalVector, s: &LpSolution, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, &SolutionDoc { floor, solution: s })?;
    Ok(())
}

/// Column order of the study report.
pub const SIM_CSV_HEADER: [&str; 8] = ["n", "trueCount", "d", "procedure", "avgPower", "tailFDP", "fdr", "se_power"];

pub fn write_sim_csv<W: Write>(report: &SimReport, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SIM_CSV_HEADER)?;
    for row in &report.rows {
        wtr.write_record([
            row.n.to_string(),
            row.true_count.to_string(),
            row.d.to_string(),
            row.procedure.clone(),
            opt(row.avg_power),
            row.tail_fdp.to_string(),
            row.fdr.to_string(),
            opt(row.se_power),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_sim_json<W: Write>(report: &SimReport, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, report)?;
    Ok(())
}

/// One line of the adjust command's output, in sorted p-value order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionRow {
    pub rank: usize,
    /// 1-based position in the input.
    pub index: usize,
    pub label: String,
    pub pvalue: f64,
    pub adjusted: f64,
    pub rejected: bool,
}

pub fn decision_rows(p: &PValueVector, d: &DecisionSet, adj: &AdjustedPValues) -> Vec<DecisionRow> {
    adj.order
        .iter()
        .zip(&adj.values)
        .enumerate()
        .map(|(rank, (&orig, &a))| DecisionRow {
            rank: rank + 1,
            index: orig + 1,
            label: p.labels().map_or_else(|| (orig + 1).to_string(), |l| l[orig].clone()),
            pvalue: p.values()[orig],
            adjusted: a,
            rejected: d.rejected.contains(&orig),
        })
        .collect()
}

pub fn write_decisions_csv<W: Write>(procedure: &str, rows: &[DecisionRow], rejections: usize, mut w: W) -> Result<()> {
    writeln!(w, "# procedure: {procedure}")?;
    writeln!(w, "# rejections: {rejections}")?;
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub struct DecisionsDoc {
    pub procedure: String,
    pub rejections: usize,
    pub hypotheses: Vec<DecisionRow>,
}

pub fn write_decisions_json<W: Write>(procedure: &str, rows: &[DecisionRow], rejections: usize, w: W) -> Result<()> {
    let doc = DecisionsDoc { procedure: procedure.to_string(), rejections, hypotheses: rows.to_vec() };
    serde_json::to_writer_pretty(w, &doc)?;
    Ok(())
}
