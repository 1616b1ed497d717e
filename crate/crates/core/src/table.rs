//! Fixed-header CSV formats for bound tables, EG sweeps and learning curves.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so parsing a
//! written file and writing it again reproduces it byte for byte.

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundRow, BoundValue};
use crate::error::{Error, Result};
use crate::lab::{EgEstimate, LearningCurve};

pub const BOUNDS_HEADER: [&str; 17] = [
    "loss",
    "nu",
    "B",
    "thm3_lower",
    "thm3_branch",
    "thm3_valid",
    "thm4_lower",
    "thm4_branch",
    "named_lower",
    "named_branch",
    "cor5_lower",
    "cor5_branch",
    "eq4_recipe",
    "eq4_branch",
    "eq3_recipe",
    "eq3_branch",
    "prop2_upper",
];

pub const EG_HEADER: [&str; 11] = [
    "loss",
    "nu",
    "B",
    "beta",
    "worst_zero_one",
    "best_phi_risk",
    "witness_margin_risk",
    "thm3_lower",
    "thm4_lower",
    "prop2_upper",
    "flags",
];

pub const CURVE_HEADER: [&str; 3] = ["n", "mean_zero_one", "stderr"];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, line: usize, col: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {line}, column `{col}`: invalid number `{s}`")))
}

fn parse_opt_f64(s: &str, line: usize, col: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s, line, col).map(Some)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn write_table<const N: usize>(
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Reads records after checking the header; yields `(line, fields)`.
fn read_table<const N: usize>(text: &str, header: [&str; N]) -> Result<Vec<(usize, [String; N])>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let found = r
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Parse(format!(
            "unexpected header `{}`, expected `{}`",
            found.iter().collect::<Vec<_>>().join(","),
            header.join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let line = i + 2;
        if rec.len() != N {
            return Err(Error::Parse(format!(
                "line {line}: expected {N} fields, found {}",
                rec.len()
            )));
        }
        let fields: [String; N] = std::array::from_fn(|j| rec[j].to_string());
        out.push((line, fields));
    }
    Ok(out)
}

/// One flattened bounds-table line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCsvRow {
    pub loss: String,
    pub nu: f64,
    pub b: f64,
    pub thm3_lower: Option<f64>,
    pub thm3_branch: String,
    pub thm3_valid: String,
    pub thm4_lower: f64,
    pub thm4_branch: String,
    pub named_lower: Option<f64>,
    pub named_branch: String,
    pub cor5_lower: Option<f64>,
    pub cor5_branch: String,
    pub eq4_recipe: f64,
    pub eq4_branch: String,
    pub eq3_recipe: f64,
    pub eq3_branch: String,
    pub prop2_upper: Option<f64>,
}

impl From<&BoundRow> for BoundCsvRow {
    fn from(r: &BoundRow) -> Self {
        let branch = |b: &Option<BoundValue>| {
            b.as_ref()
                .map(|v| v.active_branch.as_str().to_string())
                .unwrap_or_default()
        };
        BoundCsvRow {
            loss: r.loss.to_string(),
            nu: r.nu,
            b: r.b,
            thm3_lower: r.thm3_lower.as_ref().map(|v| v.value),
            thm3_branch: branch(&r.thm3_lower),
            thm3_valid: r
                .thm3_lower
                .as_ref()
                .map(|v| v.valid.to_string())
                .unwrap_or_default(),
            thm4_lower: r.thm4_lower.value,
            thm4_branch: r.thm4_lower.active_branch.as_str().into(),
            named_lower: r.named_lower.as_ref().map(|v| v.value),
            named_branch: branch(&r.named_lower),
            cor5_lower: r.cor5_lower.as_ref().map(|v| v.value),
            cor5_branch: branch(&r.cor5_lower),
            eq4_recipe: r.eq4_recipe.value,
            eq4_branch: r.eq4_recipe.active_branch.as_str().into(),
            eq3_recipe: r.eq3_recipe.value,
            eq3_branch: r.eq3_recipe.active_branch.as_str().into(),
            prop2_upper: r.prop2_upper.as_ref().map(|v| v.value),
        }
    }
}

pub fn write_bounds_csv(rows: &[BoundCsvRow]) -> String {
    write_table(
        BOUNDS_HEADER,
        rows.iter().map(|r| {
            [
                r.loss.clone(),
                fmt_f64(r.nu),
                fmt_f64(r.b),
                fmt_opt(r.thm3_lower),
                r.thm3_branch.clone(),
                r.thm3_valid.clone(),
                fmt_f64(r.thm4_lower),
                r.thm4_branch.clone(),
                fmt_opt(r.named_lower),
                r.named_branch.clone(),
                fmt_opt(r.cor5_lower),
                r.cor5_branch.clone(),
                fmt_f64(r.eq4_recipe),
                r.eq4_branch.clone(),
                fmt_f64(r.eq3_recipe),
                r.eq3_branch.clone(),
                fmt_opt(r.prop2_upper),
            ]
        }),
    )
}

pub fn parse_bounds_csv(text: &str) -> Result<Vec<BoundCsvRow>> {
    read_table(text, BOUNDS_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            let h = &BOUNDS_HEADER;
            Ok(BoundCsvRow {
                loss: f[0].clone(),
                nu: parse_f64(&f[1], line, h[1])?,
                b: parse_f64(&f[2], line, h[2])?,
                thm3_lower: parse_opt_f64(&f[3], line, h[3])?,
                thm3_branch: f[4].clone(),
                thm3_valid: f[5].clone(),
                thm4_lower: parse_f64(&f[6], line, h[6])?,
                thm4_branch: f[7].clone(),
                named_lower: parse_opt_f64(&f[8], line, h[8])?,
                named_branch: f[9].clone(),
                cor5_lower: parse_opt_f64(&f[10], line, h[10])?,
                cor5_branch: f[11].clone(),
                eq4_recipe: parse_f64(&f[12], line, h[12])?,
                eq4_branch: f[13].clone(),
                eq3_recipe: parse_f64(&f[14], line, h[14])?,
                eq3_branch: f[15].clone(),
                prop2_upper: parse_opt_f64(&f[16], line, h[16])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgCsvRow {
    pub loss: String,
    pub nu: f64,
    pub b: f64,
    pub beta: f64,
    pub worst_zero_one: f64,
    pub best_phi_risk: f64,
    pub witness_margin_risk: f64,
    pub thm3_lower: f64,
    pub thm4_lower: f64,
    pub prop2_upper: f64,
    /// `;`-separated.
    pub flags: String,
}

pub fn eg_rows(est: &EgEstimate) -> Vec<EgCsvRow> {
    est.per_beta
        .iter()
        .map(|r| EgCsvRow {
            loss: est.loss.to_string(),
            nu: est.nu,
            b: est.b,
            beta: r.beta,
            worst_zero_one: r.worst_zero_one,
            best_phi_risk: r.best_phi_risk,
            witness_margin_risk: r.witness_margin_risk,
            thm3_lower: est.bounds.thm3_lower.value,
            thm4_lower: est.bounds.thm4_lower.value,
            prop2_upper: est.bounds.prop2_upper.value,
            flags: r.flags.join(";"),
        })
        .collect()
}

pub fn write_eg_csv(rows: &[EgCsvRow]) -> String {
    write_table(
        EG_HEADER,
        rows.iter().map(|r| {
            [
                r.loss.clone(),
                fmt_f64(r.nu),
                fmt_f64(r.b),
                fmt_f64(r.beta),
                fmt_f64(r.worst_zero_one),
                fmt_f64(r.best_phi_risk),
                fmt_f64(r.witness_margin_risk),
                fmt_f64(r.thm3_lower),
                fmt_f64(r.thm4_lower),
                fmt_f64(r.prop2_upper),
                r.flags.clone(),
            ]
        }),
    )
}

pub fn parse_eg_csv(text: &str) -> Result<Vec<EgCsvRow>> {
    read_table(text, EG_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            let num = |j: usize| parse_f64(&f[j], line, EG_HEADER[j]);
            Ok(EgCsvRow {
                loss: f[0].clone(),
                nu: num(1)?,
                b: num(2)?,
                beta: num(3)?,
                worst_zero_one: num(4)?,
                best_phi_risk: num(5)?,
                witness_margin_risk: num(6)?,
                thm3_lower: num(7)?,
                thm4_lower: num(8)?,
                prop2_upper: num(9)?,
                flags: f[10].clone(),
            })
        })
        .collect()
}

pub fn write_curve_csv(curve: &LearningCurve) -> String {
    write_table(
        CURVE_HEADER,
        curve
            .points
            .iter()
            .map(|p| [p.n.to_string(), fmt_f64(p.mean_zero_one), fmt_f64(p.stderr)]),
    )
}

pub fn parse_curve_csv(text: &str) -> Result<LearningCurve> {
    let points = read_table(text, CURVE_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok(crate::lab::CurvePoint {
                n: f[0].parse().map_err(|_| {
                    Error::Parse(format!("line {line}, column `n`: invalid count `{}`", f[0]))
                })?,
                mean_zero_one: parse_f64(&f[1], line, CURVE_HEADER[1])?,
                stderr: parse_f64(&f[2], line, CURVE_HEADER[2])?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(LearningCurve { points })
}
