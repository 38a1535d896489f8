//! Per-rule weight training and weighted-sum defuzzification.
//!
//! A rule's forecast is `Σ a_{t-i} · w_i` over its lagged actual values. The
//! weights of every rule are tuned independently by the swarm against the
//! squared error at the rule's anchor(s). Each restart draws its random
//! stream from `(master seed, rule label, restart)` alone, so results do not
//! depend on training order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzify::{fuzzify, FuzzifyError, Partitioning};
use crate::pso::{optimize, PsoConfig, PsoError};
use crate::rules::{match_rule, ForecastRule, RuleBase, RuleError, RuleFit};
use crate::series::TimeSeries;

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("rule {label} has no anchor with an observed target")]
    UntrainableRule { label: usize },
    #[error("weights and actuals differ in length ({weights} vs {actuals})")]
    DimensionMismatch { weights: usize, actuals: usize },
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Pso(#[from] PsoError),
    #[error(transparent)]
    Fuzzify(#[from] FuzzifyError),
}

/// Initial weight for lag `i` (1-based): `max(start − step·(i−1), floor)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightLadder {
    pub start: f64,
    pub step: f64,
    pub floor: f64,
}

impl Default for WeightLadder {
    fn default() -> Self {
        Self {
            start: 0.75,
            step: 0.25,
            floor: 0.05,
        }
    }
}

impl WeightLadder {
    pub fn weights(&self, order: usize) -> Vec<f64> {
        (0..order)
            .map(|i| (self.start - self.step * i as f64).max(self.floor))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub pso: PsoConfig,
    pub initial_weight_ladder: WeightLadder,
    /// Independent restarts per rule; the lowest error wins.
    pub runs: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            pso: PsoConfig::default(),
            initial_weight_ladder: WeightLadder::default(),
            runs: 10,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        self.pso.validate()?;
        if self.runs == 0 {
            return Err(TrainError::Config("runs must be at least 1".into()));
        }
        if self.pso.v_max <= 0.0 {
            return Err(TrainError::Config(
                "v_max must be positive to draw initial velocities".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub partitioning: Partitioning,
    pub rulebase: RuleBase,
    pub config: TrainingConfig,
    pub series_fingerprint: String,
    pub seed: u64,
}

impl TrainedModel {
    pub fn trained_rules(&self) -> impl Iterator<Item = &ForecastRule> {
        self.rulebase.rules.iter().filter(|r| r.is_trained())
    }

    pub fn non_converged(&self) -> impl Iterator<Item = &ForecastRule> {
        self.trained_rules()
            .filter(|r| r.fit.as_ref().is_some_and(|f| !f.converged))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub t: i64,
    pub value: f64,
    pub rule_label: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapReason {
    InsufficientHistory,
    NoMatch,
    AmbiguousMatch,
    Untrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForecastGap {
    pub t: i64,
    pub reason: GapReason,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InSampleForecasts {
    pub forecasts: Vec<Forecast>,
    pub gaps: Vec<ForecastGap>,
}

/// `Σ actuals[i] · weights[i]`, with `actuals` ordered most recent first.
pub fn defuzzify(weights: &[f64], actuals: &[f64]) -> Result<f64, TrainError> {
    if weights.len() != actuals.len() {
        return Err(TrainError::DimensionMismatch {
            weights: weights.len(),
            actuals: actuals.len(),
        });
    }
    Ok(weights.iter().zip(actuals).map(|(w, a)| w * a).sum())
}

pub fn fitness_se(forecast: f64, actual: f64) -> f64 {
    (forecast - actual).powi(2)
}

/// Lagged actuals (most recent first) and the observed target at one anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    pub anchor_t: i64,
    pub lagged: Vec<f64>,
    pub target: f64,
}

pub fn lagged_actuals(series: &TimeSeries, t: i64, order: usize) -> Option<Vec<f64>> {
    (1..=order)
        .map(|lag| series.value_at(t - lag as i64).ok())
        .collect()
}

/// Anchors of `rule` that have both a target and full lagged history.
pub fn training_samples(rule: &ForecastRule, series: &TimeSeries) -> Vec<TrainingSample> {
    rule.anchor_ts
        .iter()
        .filter_map(|&t| {
            let target = series.value_at(t).ok()?;
            let lagged = lagged_actuals(series, t, rule.order())?;
            Some(TrainingSample {
                anchor_t: t,
                lagged,
                target,
            })
        })
        .collect()
}

/// Summed squared error of `weights` over all samples.
pub fn rule_fitness(samples: &[TrainingSample], weights: &[f64]) -> f64 {
    samples
        .iter()
        .map(|s| {
            let y: f64 = weights.iter().zip(&s.lagged).map(|(w, a)| w * a).sum();
            fitness_se(y, s.target)
        })
        .sum()
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, label: usize, restart: usize) -> u64 {
    mix64(mix64(mix64(master) ^ label as u64) ^ restart as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleTraining {
    pub weights: Vec<f64>,
    pub se: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// One swarm run for `rule`. All particles start on the weight ladder with
/// independent velocities drawn from `[0, v_max]`.
pub fn train_rule(
    rule: &ForecastRule,
    series: &TimeSeries,
    config: &TrainingConfig,
    rule_seed: u64,
) -> Result<RuleTraining, TrainError> {
    config.validate()?;
    let samples = training_samples(rule, series);
    if samples.is_empty() {
        return Err(TrainError::UntrainableRule { label: rule.label });
    }
    let dim = rule.order();
    let pso = PsoConfig {
        seed: mix64(rule_seed),
        ..config.pso.clone()
    };
    let start: Vec<f64> = config
        .initial_weight_ladder
        .weights(dim)
        .into_iter()
        .map(|w| w.clamp(pso.pos_min, pso.pos_max))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rule_seed);
    let v_hi = pso.v_max;
    let v_lo = pso.v_min.max(0.0).min(v_hi);
    let velocities = (0..pso.n_particles)
        .map(|_| (0..dim).map(|_| rng.gen_range(v_lo..=v_hi)).collect())
        .collect();

    let result = optimize(
        &pso,
        dim,
        vec![start; pso.n_particles],
        velocities,
        |w: &[f64]| rule_fitness(&samples, w),
    )?;
    Ok(RuleTraining {
        weights: result.best_position,
        se: result.best_fitness,
        converged: result.converged,
        iterations: result.iterations_used,
    })
}

/// Trains every rule with `config.runs` restarts each and keeps the best.
/// Rules without an observed target stay untrained.
pub fn train_all(
    rulebase: &RuleBase,
    partitioning: &Partitioning,
    series: &TimeSeries,
    config: &TrainingConfig,
) -> Result<TrainedModel, TrainError> {
    config.validate()?;
    let master = config.pso.seed;
    let mut trained = rulebase.clone();
    for rule in &mut trained.rules {
        let mut best: Option<(usize, RuleTraining)> = None;
        for restart in 0..config.runs {
            let seed = derive_seed(master, rule.label, restart);
            match train_rule(rule, series, config, seed) {
                Ok(run) => {
                    if best.as_ref().is_none_or(|(_, b)| run.se < b.se) {
                        best = Some((restart, run));
                    }
                }
                Err(TrainError::UntrainableRule { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        match best {
            Some((restart, run)) => {
                rule.fit = Some(RuleFit {
                    se: run.se,
                    converged: run.converged,
                    iterations: run.iterations,
                    restart,
                });
                rule.weights = Some(run.weights);
            }
            None => {
                rule.weights = None;
                rule.fit = None;
            }
        }
    }
    Ok(TrainedModel {
        partitioning: partitioning.clone(),
        rulebase: trained,
        config: config.clone(),
        series_fingerprint: series.fingerprint(),
        seed: master,
    })
}

/// Forecasts every step that has two steps of history, using the matched
/// rule's weights on the actual lagged values.
pub fn forecast_in_sample(
    model: &TrainedModel,
    series: &TimeSeries,
) -> Result<InSampleForecasts, TrainError> {
    let fuzzified = fuzzify(series, &model.partitioning)?;
    let mut out = InSampleForecasts::default();
    for o in series.observations() {
        let t = o.t;
        let gap = |reason| ForecastGap { t, reason };
        let rule = match match_rule(&model.rulebase, &fuzzified, t) {
            Ok(rule) => rule,
            Err(RuleError::InsufficientHistory { .. }) => {
                out.gaps.push(gap(GapReason::InsufficientHistory));
                continue;
            }
            Err(RuleError::AmbiguousMatch { .. }) => {
                out.gaps.push(gap(GapReason::AmbiguousMatch));
                continue;
            }
            Err(_) => {
                out.gaps.push(gap(GapReason::NoMatch));
                continue;
            }
        };
        let Some(weights) = &rule.weights else {
            out.gaps.push(gap(GapReason::Untrained));
            continue;
        };
        let lagged = lagged_actuals(series, t, rule.order())
            .expect("a matched rule has its full history in the series");
        out.forecasts.push(Forecast {
            t,
            value: defuzzify(weights, &lagged)?,
            rule_label: rule.label,
        });
    }
    Ok(out)
}
