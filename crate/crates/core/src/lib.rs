//! Fuzzy time series forecasting with trapezoidal fuzzification,
//! disambiguated fuzzy-set-group rules and per-rule weights tuned by a
//! particle swarm.
//!
//! The pipeline runs [`series`] → [`fuzzify`] → [`rules`] → [`train`] →
//! [`evaluate`]; [`model`] persists trained models and [`cli`] drives the
//! whole chain from the command line.

pub mod cli;
pub mod evaluate;
pub mod fuzzify;
pub mod model;
pub mod pso;
pub mod reference;
pub mod rules;
pub mod series;
pub mod train;

pub use evaluate::{build_report, mape, mse, EvaluationReport, MetricError};
pub use fuzzify::{
    classify, fuzzify, partition_series, FuzzificationStats, FuzzifiedObservation, FuzzifyError,
    Partitioning, TrapezoidalSet, Universe,
};
pub use model::{load_model, save_model, ModelError};
pub use pso::{optimize, PsoConfig, PsoError, SwarmResult};
pub use rules::{
    disambiguate, establish_groups, match_rule, to_rules, ForecastRule, FuzzySetGroup, RuleBase,
    RuleError,
};
pub use series::{Observation, SeriesError, TimeSeries};
pub use train::{
    defuzzify, forecast_in_sample, train_all, Forecast, InSampleForecasts, TrainError,
    TrainedModel, TrainingConfig,
};

use std::time::Duration;

/// Everything derived from a series before training.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub stats: FuzzificationStats,
    pub partitioning: Partitioning,
    pub fuzzified: Vec<FuzzifiedObservation>,
    pub groups: Vec<FuzzySetGroup>,
    pub disambiguated: Vec<FuzzySetGroup>,
    pub rulebase: RuleBase,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Fuzzify(#[from] FuzzifyError),
    #[error(transparent)]
    Rules(#[from] RuleError),
}

/// Partitions and fuzzifies `series`, then builds its untrained rule base.
pub fn prepare(series: &TimeSeries) -> Result<Prepared, PipelineError> {
    let (stats, partitioning) = partition_series(series)?;
    let fuzzified = fuzzify(series, &partitioning)?;
    let groups = establish_groups(&fuzzified)?;
    let disambiguated = disambiguate(groups.clone(), &fuzzified);
    let rulebase = to_rules(&disambiguated, &partitioning.fingerprint());
    Ok(Prepared {
        stats,
        partitioning,
        fuzzified,
        groups,
        disambiguated,
        rulebase,
    })
}

/// Wall-clock time of `f`.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed())
}
