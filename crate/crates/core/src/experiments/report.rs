use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One line of a report. `x = None` marks a supremum over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: u32,
    pub q_n: f64,
    pub x: Option<f64>,
    pub quantity: String,
    pub lhs: f64,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    pub pass: Option<bool>,
}

impl ReportRow {
    pub(crate) fn value(n: u32, q_n: f64, x: Option<f64>, quantity: &str, lhs: f64) -> Self {
        Self {
            n,
            q_n,
            x,
            quantity: quantity.to_string(),
            lhs,
            rhs: None,
            ratio: None,
            pass: None,
        }
    }

    /// A checked inequality `lhs <= rhs`, with slack `rhs (1 + 1e-9) + 1e-12`.
    pub(crate) fn bound(n: u32, q_n: f64, x: Option<f64>, quantity: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            rhs: Some(rhs),
            ratio: Some(lhs / rhs.max(1e-300)),
            pass: Some(lhs <= rhs * (1.0 + 1e-9) + 1e-12),
            ..Self::value(n, q_n, x, quantity, lhs)
        }
    }

    /// A ratio that is reported but not checked.
    pub(crate) fn estimate(n: u32, q_n: f64, x: Option<f64>, quantity: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            rhs: Some(rhs),
            ratio: (rhs > 0.0).then(|| lhs / rhs),
            ..Self::value(n, q_n, x, quantity, lhs)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub max_ratio: Option<f64>,
    pub all_pass: bool,
    /// Result of the trend or stability check, if the experiment has one.
    pub trend_ok: Option<bool>,
    /// Empirical constants by name, per `n` in the order of `n_list`.
    pub estimates: BTreeMap<String, Vec<f64>>,
    /// `max / min` of each estimate sequence.
    pub estimate_spread: BTreeMap<String, f64>,
    /// Grid points skipped because they lie outside the convergence domain.
    pub skipped_points: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: BTreeMap<String, String>,
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

impl ExperimentReport {
    /// Sorts rows by `(n, quantity, x)` with suprema first, and fills
    /// `max_ratio` from the checked rows.
    pub(crate) fn finish(mut self) -> Self {
        self.rows.sort_by(|a, b| {
            a.n.cmp(&b.n)
                .then_with(|| a.quantity.cmp(&b.quantity))
                .then_with(|| match (a.x, b.x) {
                    (None, None) => std::cmp::Ordering::Equal,
                    (None, Some(_)) => std::cmp::Ordering::Less,
                    (Some(_), None) => std::cmp::Ordering::Greater,
                    (Some(p), Some(q)) => p.total_cmp(&q),
                })
        });
        self.summary.max_ratio = self
            .rows
            .iter()
            .filter(|r| r.pass.is_some())
            .filter_map(|r| r.ratio)
            .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.pass == Some(false))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.config {
            writeln!(out, "# {k}={v}").unwrap();
        }
        let s = &self.summary;
        writeln!(out, "# summary.all_pass={}", s.all_pass).unwrap();
        if let Some(m) = s.max_ratio {
            writeln!(out, "# summary.max_ratio={}", format_float(m)).unwrap();
        }
        if let Some(t) = s.trend_ok {
            writeln!(out, "# summary.trend_ok={t}").unwrap();
        }
        for (k, v) in &s.estimates {
            let vals: Vec<String> = v.iter().map(|x| format_float(*x)).collect();
            writeln!(out, "# summary.estimate.{k}={}", vals.join(",")).unwrap();
        }
        for (k, v) in &s.estimate_spread {
            writeln!(out, "# summary.spread.{k}={}", format_float(*v)).unwrap();
        }
        writeln!(out, "# summary.skipped_points={}", s.skipped_points).unwrap();
        for note in &s.notes {
            writeln!(out, "# note: {note}").unwrap();
        }
        out.push_str("n,q_n,x,quantity,lhs,rhs,ratio,pass\n");
        let opt = |v: Option<f64>| v.map_or("nan".to_string(), format_float);
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.n,
                format_float(r.q_n),
                r.x.map_or("sup".to_string(), format_float),
                r.quantity,
                format_float(r.lhs),
                opt(r.rhs),
                opt(r.ratio),
                r.pass.map_or("na", |p| if p { "true" } else { "false" }),
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// C-style `%.15e`: `1.000000000000000e+00`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.15e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}e{exp:+03}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

/// Serializes the report in full before touching the file system, so a
/// failure never leaves a partial file behind.
pub fn write_report(report: &ExperimentReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Json => report.to_json()?,
    };
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut config = BTreeMap::new();
        config.insert("experiment".into(), "demo".into());
        ExperimentReport {
            config,
            rows: vec![
                ReportRow::bound(20, 0.95, Some(0.5), "b", 0.1, 0.2),
                ReportRow::value(10, 0.9, None, "a", 1.5),
                ReportRow::bound(10, 0.9, Some(0.25), "a", 0.3, 0.2),
            ],
            summary: Summary::default(),
        }
        .finish()
    }

    #[test]
    fn float_format() {
        assert_eq!(format_float(1.0), "1.000000000000000e+00");
        assert_eq!(format_float(-0.00125), "-1.250000000000000e-03");
        assert_eq!(format_float(1e100), "1.000000000000000e+100");
        assert_eq!(format_float(0.0), "0.000000000000000e+00");
    }

    #[test]
    fn rows_sorted_and_ratio() {
        let r = sample();
        assert_eq!(r.rows[0].x, None);
        assert_eq!(r.rows[1].x, Some(0.25));
        assert_eq!(r.rows[2].n, 20);
        assert_eq!(r.summary.max_ratio, Some(1.4999999999999998));
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# experiment=demo");
        let header = lines.iter().position(|l| l.starts_with("n,")).unwrap();
        assert!(lines[..header].iter().all(|l| l.starts_with('#')));
        assert_eq!(
            lines[header + 1],
            "10,9.000000000000000e-01,sup,a,1.500000000000000e+00,nan,nan,na"
        );
        assert!(!csv.contains('\r'));
        let empty = ExperimentReport {
            config: BTreeMap::new(),
            rows: vec![],
            summary: Summary::default(),
        };
        assert!(empty.to_csv().ends_with("n,q_n,x,quantity,lhs,rhs,ratio,pass\n"));
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: ExperimentReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
