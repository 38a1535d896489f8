//! Forecast accuracy metrics and report rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzify::ValueScale;
use crate::series::TimeSeries;
use crate::train::Forecast;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("no forecast/actual pairs to evaluate")]
    EmptyInput,
    #[error("actual value is zero at pair {index}; percentage error is undefined")]
    ZeroActual { index: usize },
    #[error("forecast at t = {t} does not align with the series")]
    Alignment { t: i64 },
}

/// Mean squared error over `(forecast, actual)` pairs.
pub fn mse(pairs: &[(f64, f64)]) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    Ok(pairs.iter().map(|(f, a)| (f - a).powi(2)).sum::<f64>() / pairs.len() as f64)
}

/// Mean absolute percentage error, in percent.
pub fn mape(pairs: &[(f64, f64)]) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let mut total = 0.0;
    for (i, (f, a)) in pairs.iter().enumerate() {
        if *a == 0.0 {
            return Err(MetricError::ZeroActual { index: i });
        }
        total += ((f - a) / a).abs();
    }
    Ok(total / pairs.len() as f64 * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub t: i64,
    pub actual: f64,
    /// Full-precision forecast; `None` marks a gap.
    pub forecast: Option<f64>,
    pub rule_label: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rows: Vec<ReportRow>,
    pub scale: ValueScale,
    pub n_evaluated: usize,
    /// Metrics on forecasts at the series' own scale (rounded for integer data).
    pub mse: Option<f64>,
    pub mape: Option<f64>,
    /// Metrics on full-precision forecasts.
    pub mse_raw: Option<f64>,
    pub mape_raw: Option<f64>,
}

impl EvaluationReport {
    /// Forecast as tabulated: rounded when the series is integer-valued.
    pub fn reported(&self, row: &ReportRow) -> Option<f64> {
        row.forecast.map(|f| self.scale.apply(f))
    }

    pub fn reported_pairs(&self) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| self.reported(r).map(|f| (f, r.actual)))
            .collect()
    }

    pub fn gap_times(&self) -> Vec<i64> {
        self.rows
            .iter()
            .filter(|r| r.forecast.is_none())
            .map(|r| r.t)
            .collect()
    }
}

pub fn build_report(
    series: &TimeSeries,
    forecasts: &[Forecast],
) -> Result<EvaluationReport, MetricError> {
    let mut rows: Vec<ReportRow> = series
        .observations()
        .iter()
        .map(|o| ReportRow {
            t: o.t,
            actual: o.value,
            forecast: None,
            rule_label: None,
        })
        .collect();
    for f in forecasts {
        let i = series
            .index_of(f.t)
            .ok_or(MetricError::Alignment { t: f.t })?;
        if rows[i].forecast.is_some() {
            return Err(MetricError::Alignment { t: f.t });
        }
        rows[i].forecast = Some(f.value);
        rows[i].rule_label = Some(f.rule_label);
    }

    let scale = if series.is_integer_valued() {
        ValueScale::Integer
    } else {
        ValueScale::Continuous
    };
    let raw: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.forecast.map(|f| (f, r.actual)))
        .collect();
    let reported: Vec<(f64, f64)> = raw.iter().map(|&(f, a)| (scale.apply(f), a)).collect();

    Ok(EvaluationReport {
        n_evaluated: raw.len(),
        mse: mse(&reported).ok(),
        mape: mape(&reported).ok(),
        mse_raw: mse(&raw).ok(),
        mape_raw: mape(&raw).ok(),
        rows,
        scale,
    })
}

fn fmt_value(x: f64, scale: ValueScale) -> String {
    match scale {
        ValueScale::Integer if x.fract() == 0.0 => format!("{x:.0}"),
        _ => format!("{x}"),
    }
}

fn fmt_metric(m: Option<f64>, precision: usize) -> String {
    m.map_or_else(|| "-".to_string(), |v| format!("{v:.precision$}"))
}

pub fn render_text(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>8}  {:>12}  {:>12}  {:>14}  {:>6}",
        "t", "actual", "forecast", "raw forecast", "rule"
    );
    for r in &report.rows {
        let (rep, raw, rule) = match (report.reported(r), r.forecast, r.rule_label) {
            (Some(rep), Some(raw), Some(rule)) => (
                fmt_value(rep, report.scale),
                format!("{raw:.4}"),
                rule.to_string(),
            ),
            _ => ("-".into(), "-".into(), "-".into()),
        };
        let _ = writeln!(
            out,
            "{:>8}  {:>12}  {:>12}  {:>14}  {:>6}",
            r.t,
            fmt_value(r.actual, report.scale),
            rep,
            raw,
            rule
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "evaluated {} of {} rows",
        report.n_evaluated,
        report.rows.len()
    );
    let _ = writeln!(
        out,
        "MSE   {:>14}   (full precision {})",
        fmt_metric(report.mse, 4),
        fmt_metric(report.mse_raw, 4)
    );
    let _ = writeln!(
        out,
        "MAPE  {:>14}%  (full precision {}%)",
        fmt_metric(report.mape, 4),
        fmt_metric(report.mape_raw, 4)
    );
    out
}

/// CSV with columns `t,actual,forecast,abs_error,pct_error` followed by
/// `MSE` and `MAPE` footer rows. Gap rows leave the forecast columns empty.
pub fn render_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("t,actual,forecast,abs_error,pct_error\n");
    for r in &report.rows {
        let actual = fmt_value(r.actual, report.scale);
        match report.reported(r) {
            Some(f) => {
                let abs = (f - r.actual).abs();
                let pct = if r.actual != 0.0 {
                    format!("{}", abs / r.actual.abs() * 100.0)
                } else {
                    String::new()
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.t,
                    actual,
                    fmt_value(f, report.scale),
                    fmt_value(abs, report.scale),
                    pct
                );
            }
            None => {
                let _ = writeln!(out, "{},{},,,", r.t, actual);
            }
        }
    }
    let metric = |m: Option<f64>| m.map(|v| v.to_string()).unwrap_or_default();
    let _ = writeln!(out, "MSE,{},,,", metric(report.mse));
    let _ = writeln!(out, "MAPE,{},,,", metric(report.mape));
    out
}
