//! Static reference data for the University of Alabama enrollment series
//! (1971–1992): published forecasts of earlier fuzzy time series models, and
//! a published set of trained rule weights. Used to render comparison tables
//! and as test fixtures; none of these models are implemented here.

use std::fmt::Write as _;

use crate::evaluate::{mape, mse, EvaluationReport};
use crate::series::TimeSeries;

pub const ENROLLMENT_START: i64 = 1971;

pub const ENROLLMENT: [f64; 22] = [
    13055.0, 13563.0, 13867.0, 14696.0, 15460.0, 15311.0, 15603.0, 15861.0, 16807.0, 16919.0,
    16388.0, 15433.0, 15497.0, 15145.0, 15163.0, 15984.0, 16859.0, 18150.0, 18970.0, 19328.0,
    19337.0, 18876.0,
];

pub fn enrollment_series() -> TimeSeries {
    TimeSeries::from_values(ENROLLMENT_START, &ENROLLMENT).expect("reference data is valid")
}

pub fn is_enrollment(series: &TimeSeries) -> bool {
    series.start() == ENROLLMENT_START && series.values() == ENROLLMENT
}

/// One model's published forecasts, aligned with [`ENROLLMENT`].
#[derive(Debug, Clone, Copy)]
pub struct ReferenceColumn {
    pub name: &'static str,
    pub forecasts: [Option<f64>; 22],
    pub published_mse: f64,
    pub published_mape: f64,
}

impl ReferenceColumn {
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.forecasts
            .iter()
            .zip(ENROLLMENT)
            .filter_map(|(f, a)| f.map(|f| (f, a)))
            .collect()
    }

    pub fn forecast_at(&self, t: i64) -> Option<f64> {
        let i = usize::try_from(t - ENROLLMENT_START).ok()?;
        self.forecasts.get(i).copied().flatten()
    }

    pub fn forecast_years(&self) -> Vec<i64> {
        (0..22)
            .filter(|&i| self.forecasts[i].is_some())
            .map(|i| ENROLLMENT_START + i as i64)
            .collect()
    }
}

const fn col<const N: usize>(first: usize, vals: [f64; N]) -> [Option<f64>; 22] {
    let mut out = [None; 22];
    let mut i = 0;
    while i < N {
        out[first + i] = Some(vals[i]);
        i += 1;
    }
    out
}

pub const CHEN_ORDER3: ReferenceColumn = ReferenceColumn {
    name: "Chen (order 3)",
    forecasts: col(
        3,
        [
            14500.0, 15500.0, 15500.0, 15500.0, 15500.0, 16500.0, 16500.0, 16500.0, 15500.0,
            15500.0, 15500.0, 15500.0, 15500.0, 16500.0, 18500.0, 18500.0, 19500.0, 19500.0,
            18500.0,
        ],
    ),
    published_mse: 86694.0,
    published_mape: 1.53,
};

pub const LI_CHENG: ReferenceColumn = ReferenceColumn {
    name: "Li and Cheng",
    forecasts: col(
        1,
        [
            13500.0, 13500.0, 14500.0, 15500.0, 15500.0, 15500.0, 15500.0, 16500.0, 16500.0,
            16500.0, 15500.0, 15500.0, 15500.0, 15500.0, 15500.0, 16500.0, 18500.0, 18500.0,
            19500.0, 19500.0, 18500.0,
        ],
    ),
    published_mse: 85040.0,
    published_mape: 1.53,
};

pub const SINGH_ORDER3: ReferenceColumn = ReferenceColumn {
    name: "Sing (order 3)",
    forecasts: col(
        3,
        [
            14750.0, 15750.0, 15500.0, 15500.0, 15500.0, 16500.0, 16500.0, 16500.0, 15500.0,
            15500.0, 15250.0, 15500.0, 15500.0, 16500.0, 18500.0, 18500.0, 19500.0, 19500.0,
            18750.0,
        ],
    ),
    published_mse: 76509.0,
    published_mape: 1.41,
};

pub const STEVENSON_PORTER: ReferenceColumn = ReferenceColumn {
    name: "Stevenson and Porter",
    forecasts: col(
        1,
        [
            13410.0, 13932.0, 14664.0, 15423.0, 15847.0, 15580.0, 15877.0, 16773.0, 16897.0,
            16341.0, 15671.0, 15507.0, 15200.0, 15218.0, 16035.0, 16903.0, 17953.0, 18879.0,
            19303.0, 19432.0, 18966.0,
        ],
    ),
    published_mse: 21575.0,
    published_mape: 0.57,
};

pub const CHEN_HSU: ReferenceColumn = ReferenceColumn {
    name: "Chen and Hsu",
    forecasts: col(
        1,
        [
            13750.0, 13875.0, 14750.0, 15375.0, 15313.0, 15625.0, 15813.0, 16834.0, 16834.0,
            16416.0, 15375.0, 15375.0, 15125.0, 15125.0, 15938.0, 16834.0, 18250.0, 18875.0,
            19250.0, 19250.0, 18875.0,
        ],
    ),
    published_mse: 5611.0,
    published_mape: 0.36,
};

pub const CHEN_CHUNG_ORDER9: ReferenceColumn = ReferenceColumn {
    name: "Chen and Chung (order 9)",
    forecasts: col(
        8,
        [
            16846.0, 16846.0, 16420.0, 15462.0, 15462.0, 15153.0, 15153.0, 15977.0, 16846.0,
            18133.0, 18910.0, 19334.0, 19334.0, 18910.0,
        ],
    ),
    published_mse: 1101.0,
    published_mape: 0.15,
};

pub const KUO_ORDER9: ReferenceColumn = ReferenceColumn {
    name: "Kuo et al (order 9)",
    forecasts: col(
        9,
        [
            16890.0, 16395.0, 15434.0, 15505.0, 15153.0, 15153.0, 15971.0, 16890.0, 18124.0,
            18971.0, 19337.0, 19337.0, 18882.0,
        ],
    ),
    published_mse: 234.0,
    published_mape: 0.014,
};

/// Published integer forecasts of the PSO-weighted set-group rule model.
pub const WEIGHTED_RULES_PUBLISHED: ReferenceColumn = ReferenceColumn {
    name: "PSO-weighted rules (published)",
    forecasts: col(
        2,
        [
            13868.0, 14696.0, 15460.0, 15309.0, 15602.0, 15861.0, 16806.0, 16919.0, 16390.0,
            15434.0, 15497.0, 15143.0, 15163.0, 15982.0, 16859.0, 18150.0, 18971.0, 19328.0,
            19336.0, 18875.0,
        ],
    ),
    published_mse: 1.0,
    published_mape: 0.006,
};

pub const COMPARISON_MODELS: [ReferenceColumn; 7] = [
    CHEN_ORDER3,
    LI_CHENG,
    SINGH_ORDER3,
    STEVENSON_PORTER,
    CHEN_HSU,
    CHEN_CHUNG_ORDER9,
    KUO_ORDER9,
];

/// Published trained weights (4 decimals) for the 20 trainable enrollment
/// rules, keyed by rule label; `weights[i]` applies to lag `i + 1`.
pub const PUBLISHED_WEIGHTS: [(usize, &[f64]); 20] = [
    (1, &[0.6488, 0.3882]),
    (2, &[0.6586, 0.4102]),
    (3, &[0.667, 0.408]),
    (4, &[0.6395, 0.369]),
    (5, &[0.4411, 0.3158, 0.2699]),
    (6, &[0.4638, 0.4645, 0.0978]),
    (7, &[0.6695, 0.3967]),
    (8, &[0.4379, 0.3892, 0.2171]),
    (9, &[0.1604, 0.8137]),
    (10, &[0.5497, 0.3798]),
    (11, &[0.5997, 0.3809]),
    (12, &[0.4151, 0.3966, 0.1582]),
    (13, &[0.6194, 0.3731]),
    (14, &[0.7524, 0.302]),
    (15, &[0.3869, 0.704]),
    (16, &[0.4668, 0.3847, 0.2725]),
    (17, &[0.654, 0.4212]),
    (18, &[0.635, 0.4012]),
    (19, &[0.6202, 0.3874]),
    (20, &[0.5932, 0.3831]),
];

/// Side-by-side table of the reference models and `report`, with MSE and
/// MAPE recomputed for every column by the same metric code.
pub fn render_comparison(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let mut header = format!("{:>6} {:>8}", "year", "actual");
    for m in COMPARISON_MODELS {
        let _ = write!(header, " {:>26}", m.name);
    }
    let _ = write!(header, " {:>12}", "this model");
    let _ = writeln!(out, "{header}");

    for r in &report.rows {
        let _ = write!(out, "{:>6} {:>8}", r.t, r.actual);
        for m in COMPARISON_MODELS {
            let cell = m.forecast_at(r.t).map_or("-".into(), |v| v.to_string());
            let _ = write!(out, " {:>26}", cell);
        }
        let cell = report.reported(r).map_or("-".into(), |v| v.to_string());
        let _ = writeln!(out, " {:>12}", cell);
    }

    let fmt = |m: Option<f64>, p: usize| m.map_or("-".into(), |v| format!("{v:.p$}"));
    let mut mse_line = format!("{:>15}", "MSE");
    let mut mape_line = format!("{:>15}", "MAPE (%)");
    for m in COMPARISON_MODELS {
        let pairs = m.pairs();
        let _ = write!(mse_line, " {:>26}", fmt(mse(&pairs).ok(), 0));
        let _ = write!(mape_line, " {:>26}", fmt(mape(&pairs).ok(), 3));
    }
    let _ = write!(mse_line, " {:>12}", fmt(report.mse, 2));
    let _ = write!(mape_line, " {:>12}", fmt(report.mape, 4));
    let _ = writeln!(out, "{mse_line}");
    let _ = writeln!(out, "{mape_line}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_start_where_expected() {
        assert_eq!(CHEN_ORDER3.forecast_years().len(), 19);
        assert_eq!(CHEN_ORDER3.forecast_at(1974), Some(14500.0));
        assert_eq!(LI_CHENG.forecast_at(1972), Some(13500.0));
        assert_eq!(KUO_ORDER9.forecast_years()[0], 1980);
        assert_eq!(CHEN_CHUNG_ORDER9.forecast_years()[0], 1979);
        assert_eq!(WEIGHTED_RULES_PUBLISHED.forecast_years().len(), 20);
        assert_eq!(WEIGHTED_RULES_PUBLISHED.forecast_at(1992), Some(18875.0));
    }

    #[test]
    fn enrollment_series_is_recognized() {
        let s = enrollment_series();
        assert!(is_enrollment(&s));
        assert_eq!(s.value_at(1973).unwrap(), 13867.0);
        assert_eq!(s.value_at(1992).unwrap(), 18876.0);
        let other = TimeSeries::from_values(1971, &[1.0, 2.0, 3.0]).unwrap();
        assert!(!is_enrollment(&other));
    }

    #[test]
    fn recomputed_errors_track_published_values() {
        // The Chen-Hsu MSE and Kuo MAPE as printed disagree with their own
        // forecast columns (5343.6 and 0.0679 when recomputed).
        for m in COMPARISON_MODELS {
            let got_mse = mse(&m.pairs()).unwrap();
            let got_mape = mape(&m.pairs()).unwrap();
            if m.name != CHEN_HSU.name {
                assert!(
                    (got_mse - m.published_mse).abs() / m.published_mse < 0.01,
                    "{}: {got_mse} vs {}",
                    m.name,
                    m.published_mse
                );
            }
            if m.name != KUO_ORDER9.name {
                assert!(
                    (got_mape - m.published_mape).abs() < 0.005,
                    "{}: {got_mape} vs {}",
                    m.name,
                    m.published_mape
                );
            }
        }
        assert!((mse(&CHEN_HSU.pairs()).unwrap() - 5343.6).abs() < 0.1);
        assert!((mape(&KUO_ORDER9.pairs()).unwrap() - 0.0679).abs() < 1e-4);
    }
}
