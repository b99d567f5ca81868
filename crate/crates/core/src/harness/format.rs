use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::{CascadeResult, ComparisonTable, GridReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::InvalidOption(format!("unknown format `{s}`"))),
        }
    }
}

pub struct Table {
    pub title: Option<String>,
    pub headers: Vec<&'static str>,
    pub records: Vec<Vec<String>>,
}

/// Reports that print as fixed-width tables, CSV or JSON. CSV and text
/// share the same columns.
pub trait Render: Serialize {
    fn tables(&self) -> Vec<Table>;

    fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, t) in self.tables().iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            if let Some(title) = &t.title {
                out.push_str(title);
                out.push('\n');
            }
            let widths: Vec<usize> = t
                .headers
                .iter()
                .enumerate()
                .map(|(j, h)| t.records.iter().map(|r| r[j].len()).fold(h.len(), usize::max))
                .collect();
            let mut line = |cells: Vec<&str>| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                let _ = writeln!(out, "{}", padded.join("  ").trim_end());
            };
            line(t.headers.clone());
            for r in &t.records {
                line(r.iter().map(String::as_str).collect());
            }
        }
        out
    }

    fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, t) in self.tables().iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.headers).map_err(|e| Error::Output(e.to_string()))?;
            for r in &t.records {
                w.write_record(r).map_err(|e| Error::Output(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Output(e.to_string()))?;
            out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Output(e.to_string()))?);
        }
        Ok(out)
    }

    fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Output(e.to_string()))
    }

    fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Table => Ok(self.to_text()),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json().map(|mut s| {
                s.push('\n');
                s
            }),
        }
    }
}

/// Eleven significant digits.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.10e}")
    } else {
        v.to_string()
    }
}

impl Render for GridReport {
    fn tables(&self) -> Vec<Table> {
        let records = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.method.to_string(),
                    r.global.to_string(),
                    r.termcd.to_string(),
                    r.fcnt.to_string(),
                    r.jcnt.to_string(),
                    r.iter.to_string(),
                    r.message.clone(),
                    num(r.fnorm),
                ]
            })
            .collect();
        vec![Table {
            title: None,
            headers: vec!["Method", "Global", "termcd", "Fcnt", "Jcnt", "Iter", "Message", "Fnorm"],
            records,
        }]
    }
}

impl Render for CascadeResult {
    fn tables(&self) -> Vec<Table> {
        let title = match (&self.winner, self.sumsq()) {
            (Some((m, g)), Some(ss)) => format!("method {m} global {g} termcd 1 sumsq {}", num(ss)),
            _ => "no method/global pair converged".to_string(),
        };
        let records = self
            .trace
            .iter()
            .map(|a| vec![a.method.to_string(), a.global.to_string(), a.termcd.to_string(), num(a.sumsq)])
            .collect();
        vec![Table {
            title: Some(title),
            headers: vec!["Method", "Global", "termcd", "Sumsq"],
            records,
        }]
    }
}

impl Render for ComparisonTable {
    fn tables(&self) -> Vec<Table> {
        let records = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.problem.clone(),
                    r.start.clone(),
                    r.solver.clone(),
                    num(r.sumsq),
                    r.converged.to_string(),
                    r.fevals.to_string(),
                    r.iterations.to_string(),
                    r.message.clone(),
                ]
            })
            .collect();
        let mut tables = vec![Table {
            title: None,
            headers: vec!["Problem", "Start", "Solver", "Sumsq", "Converged", "Fevals", "Iter", "Message"],
            records,
        }];
        if !self.timing.is_empty() {
            let records = self
                .timing
                .iter()
                .map(|t| {
                    vec![
                        t.problem.clone(),
                        t.start.clone(),
                        t.solver.clone(),
                        t.reps.to_string(),
                        num(t.min_us),
                        num(t.mean_us),
                        num(t.max_us),
                    ]
                })
                .collect();
            tables.push(Table {
                title: Some("Timing (microseconds)".into()),
                headers: vec!["Problem", "Start", "Solver", "Reps", "Tmin", "Tmean", "Tmax"],
                records,
            });
        }
        tables
    }
}
