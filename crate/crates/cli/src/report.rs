//! Deterministic report rendering: fixed CSV column order, 12-significant-
//! digit numbers, and a JSON form that round-trips to the same rows.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use mtb_core::bounds::BoundResult;
use mtb_core::compare::{Comparison, SweepPoint};
use mtb_core::risk::{McEstimate, MinimaxBracket};

use crate::scenario::{CliError, Scenario};

/// Likelihood-ratio kurtosis above this value makes the Monte Carlo CI
/// untrustworthy enough to warrant a warning note.
pub const HIGH_KURTOSIS_THRESHOLD: f64 = 100.0;

pub const CSV_HEADER: &str =
    "method,target,value,raw_value,vacuous,lambda_star,reference_label,n,minimax_risk_lower_bound,notes";

/// Formats with at most 12 significant digits, plain decimal notation for
/// moderate exponents, and no trailing zeros — "0.6", "1.44222051019",
/// "100000", "1E-16".
pub fn format_sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let formatted = format!("{x:.11e}");
    let (mantissa, exponent) = formatted
        .split_once('e')
        .expect("{:e} always contains an exponent");
    let exponent: i32 = exponent.parse().expect("valid exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa
        .chars()
        .filter(|c| c.is_ascii_digit())
        .collect::<String>()
        .trim_end_matches('0')
        .into();
    let digits = if digits.is_empty() {
        "0".into()
    } else {
        digits
    };
    let sign = if neg { "-" } else { "" };
    if (-5..=15).contains(&exponent) {
        // decimal point sits after `exponent + 1` digits
        let point = exponent + 1;
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat(-point as usize), digits)
        } else if (point as usize) >= digits.len() {
            format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
        } else {
            format!(
                "{}.{}",
                &digits[..point as usize],
                &digits[point as usize..]
            )
        };
        format!("{sign}{body}")
    } else {
        let head = &digits[..1];
        let tail = &digits[1..];
        if tail.is_empty() {
            format!("{sign}{head}E{exponent}")
        } else {
            format!("{sign}{head}.{tail}E{exponent}")
        }
    }
}

/// The double nearest the 12-significant-digit decimal form of `x`; report
/// rows store this so the CSV text and the JSON number carry the same value.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format_sig12(x).parse().expect("formatted float reparses")
}

/// One report cell: a number, or a marker like "n/a" / "inf".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn num(x: f64) -> Cell {
        if x.is_finite() {
            Cell::Num(round_sig12(x))
        } else {
            Cell::Text(format_sig12(x))
        }
    }

    pub fn na() -> Cell {
        Cell::Text("n/a".into())
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_sig12(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub target: String,
    pub value: Cell,
    pub raw_value: Cell,
    pub vacuous: bool,
    pub lambda_star: Cell,
    pub reference_label: String,
    pub n: usize,
    pub minimax_risk_lower_bound: Cell,
    pub notes: String,
}

impl ReportRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.method,
            self.target,
            self.value.csv(),
            self.raw_value.csv(),
            self.vacuous,
            self.lambda_star.csv(),
            self.reference_label,
            self.n,
            self.minimax_risk_lower_bound.csv(),
            self.notes
        )
    }
}

/// 1 − value clamped to [0, 1]: the minimax-risk display of a success value.
fn risk_cell(value: &Cell) -> Cell {
    match value.as_f64() {
        Some(v) => Cell::num((1.0 - v).clamp(0.0, 1.0)),
        None => Cell::na(),
    }
}

fn note_value(x: f64) -> String {
    format_sig12(x)
}

fn notes_from_pairs(pairs: &[(String, f64)]) -> String {
    if pairs.is_empty() {
        return "n/a".into();
    }
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={}", note_value(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

fn bound_row(b: &BoundResult, n: usize) -> ReportRow {
    let value = Cell::num(b.value);
    ReportRow {
        method: b.method.clone(),
        target: b.target.label().to_string(),
        minimax_risk_lower_bound: risk_cell(&value),
        value,
        raw_value: Cell::num(b.raw_value),
        vacuous: b.vacuous,
        lambda_star: b.lambda_used.map_or_else(Cell::na, Cell::num),
        reference_label: b
            .reference_used
            .as_ref()
            .map_or_else(|| "n/a".into(), |r| r.label()),
        n,
        notes: notes_from_pairs(&b.divergence_inputs),
    }
}

fn exact_bayes_row(exact: f64, via: Option<f64>, reference_label: &str, n: usize) -> ReportRow {
    let value = Cell::num(exact);
    ReportRow {
        method: "exact_bayes".into(),
        target: "bayes_success".into(),
        minimax_risk_lower_bound: risk_cell(&value),
        raw_value: value.clone(),
        value,
        vacuous: false,
        lambda_star: Cell::na(),
        reference_label: reference_label.to_string(),
        n,
        notes: match via {
            Some(v) => format!("via_reference={}", note_value(v)),
            None => "via_reference=n/a".into(),
        },
    }
}

fn mc_row(mc: &McEstimate, reference_label: &str, n: usize) -> ReportRow {
    let value = Cell::num(mc.estimate);
    let mut notes = format!(
        "ci_low={};ci_high={};samples={};seed={};kurtosis={}",
        note_value(mc.ci_low),
        note_value(mc.ci_high),
        mc.samples,
        mc.seed,
        note_value(mc.kurtosis)
    );
    if mc.kurtosis > HIGH_KURTOSIS_THRESHOLD {
        notes.push_str(";high_kurtosis_warning=true");
    }
    ReportRow {
        method: "mc_bayes".into(),
        target: "bayes_success".into(),
        minimax_risk_lower_bound: risk_cell(&value),
        raw_value: value.clone(),
        value,
        vacuous: false,
        lambda_star: Cell::na(),
        reference_label: reference_label.to_string(),
        n,
        notes,
    }
}

fn bracket_rows(bracket: &MinimaxBracket, n: usize) -> Vec<ReportRow> {
    let notes = format!(
        "iterations={};width={}",
        bracket.iterations,
        note_value(bracket.upper - bracket.lower)
    );
    [
        ("minimax_lower", bracket.lower),
        ("minimax_upper", bracket.upper),
    ]
    .into_iter()
    .map(|(method, v)| {
        let value = Cell::num(v);
        ReportRow {
            method: method.into(),
            target: "minimax_success".into(),
            minimax_risk_lower_bound: risk_cell(&value),
            raw_value: value.clone(),
            value,
            vacuous: false,
            lambda_star: Cell::na(),
            reference_label: "n/a".into(),
            n,
            notes: notes.clone(),
        }
    })
    .collect()
}

/// All rows for one comparison: the requested bounds plus the oracle rows
/// (exact or Monte Carlo B̄, and the minimax bracket when available).
pub fn rows_from_comparison(
    comparison: &Comparison,
    reference_label: &str,
    n: usize,
) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    if let Some(exact) = comparison.risk.exact_bayes {
        rows.push(exact_bayes_row(
            exact,
            comparison.risk.via_reference,
            reference_label,
            n,
        ));
    }
    if let Some(mc) = &comparison.risk.mc {
        rows.push(mc_row(mc, reference_label, n));
    }
    if let Some(bracket) = &comparison.risk.bracket {
        rows.extend(bracket_rows(bracket, n));
    }
    rows.extend(comparison.bounds.iter().map(|b| bound_row(b, n)));
    sort_rows(&mut rows);
    rows
}

/// Rows for a tensorized sweep: per n, the exact product B̄ when it was
/// materializable ("n/a" otherwise) and the tensorized bounds.
pub fn rows_from_sweep(points: &[SweepPoint], reference_label: &str) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for point in points {
        match point.exact_bayes {
            Some(exact) => rows.push(exact_bayes_row(exact, None, reference_label, point.n)),
            None => rows.push(ReportRow {
                method: "exact_bayes".into(),
                target: "bayes_success".into(),
                value: Cell::na(),
                raw_value: Cell::na(),
                vacuous: false,
                lambda_star: Cell::na(),
                reference_label: reference_label.to_string(),
                n: point.n,
                minimax_risk_lower_bound: Cell::na(),
                notes: "beyond_product_size_cap=true".into(),
            }),
        }
        rows.extend(point.bounds.iter().map(|b| bound_row(b, point.n)));
    }
    sort_rows(&mut rows);
    rows
}

/// Deterministic order: by n, then method name.
fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| a.n.cmp(&b.n).then_with(|| a.method.cmp(&b.method)));
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JsonReport {
    pub scenario: Scenario,
    pub rows: Vec<ReportRow>,
}

pub fn render_csv(scenario: &Scenario, rows: &[ReportRow]) -> Result<String, CliError> {
    let echo = serde_json::to_string(scenario)
        .map_err(|e| CliError::Io(format!("scenario echo serialization failed: {e}")))?;
    let mut out = String::new();
    out.push_str("# scenario: ");
    out.push_str(&echo);
    out.push('\n');
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    Ok(out)
}

pub fn render_json(scenario: &Scenario, rows: Vec<ReportRow>) -> Result<String, CliError> {
    let report = JsonReport {
        scenario: scenario.clone(),
        rows,
    };
    let mut text = serde_json::to_string(&report)
        .map_err(|e| CliError::Io(format!("report serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Writes via a temporary file in the destination directory plus an atomic
/// rename, so a crashed run never leaves a truncated report.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(|e| CliError::Io(format!("cannot create temporary file: {e}")))?;
    tmp.write_all(content.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write report: {e}")))?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("cannot move report into place: {e}")))?;
    Ok(())
}
