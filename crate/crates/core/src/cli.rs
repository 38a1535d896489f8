//! Command-line front end: `fuzzify`, `train`, `evaluate` and `run`.
//!
//! Exit codes are 0 on success, 2 for usage, configuration, input-parsing
//! and fingerprint errors, and 1 for any other failure. Forecast gaps are
//! reported in the output files and are not failures.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::evaluate::{build_report, render_csv, render_text, EvaluationReport, MetricError};
use crate::fuzzify::{FuzzificationStats, FuzzifiedObservation, Partitioning};
use crate::model::{self, ModelError};
use crate::reference;
use crate::rules::{FuzzySetGroup, RuleBase};
use crate::series::{SeriesError, TimeSeries};
use crate::train::{forecast_in_sample, train_all, TrainError, TrainedModel, TrainingConfig};
use crate::{prepare, PipelineError, Prepared};

#[derive(Debug, Parser)]
#[command(
    name = "fts",
    version,
    about = "Fuzzy time series modeling with PSO-tuned rule weights"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition the universe and label every observation.
    Fuzzify(IoArgs),
    /// Build the rule base and train its weights.
    Train {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        training: TrainingArgs,
    },
    /// Forecast in-sample with a saved model and score the forecasts.
    Evaluate {
        #[command(flatten)]
        io: IoArgs,
        /// Model file; defaults to `<out>/model.json`.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Fuzzify, train and evaluate in one go.
    Run {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        training: TrainingArgs,
    },
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Two-column CSV of `t,value` rows; a header row is optional.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Also write group and rule listings.
    #[arg(long)]
    pub emit_intermediate: bool,
}

#[derive(Debug, Args)]
pub struct TrainingArgs {
    /// Master seed for all swarm randomness.
    #[arg(long, env = "FTS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub particles: Option<usize>,
    #[arg(long)]
    pub inertia: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    /// Velocity limit; velocities are clamped to [-vmax, vmax].
    #[arg(long)]
    pub vmax: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Per-rule squared-error target; `inf` stops before the first iteration.
    #[arg(long)]
    pub target_se: Option<f64>,
    /// Independent training restarts per rule.
    #[arg(long)]
    pub restarts: Option<usize>,
}

impl TrainingArgs {
    pub fn to_config(&self) -> Result<TrainingConfig, CliError> {
        let mut config = TrainingConfig::default();
        let pso = &mut config.pso;
        pso.seed = self.seed;
        if let Some(n) = self.particles {
            pso.n_particles = n;
        }
        if let Some(w) = self.inertia {
            pso.inertia = w;
        }
        if let Some(c) = self.c1 {
            pso.c1 = c;
        }
        if let Some(c) = self.c2 {
            pso.c2 = c;
        }
        if let Some(v) = self.vmax {
            pso.v_min = -v;
            pso.v_max = v;
        }
        if let Some(n) = self.max_iter {
            pso.max_iterations = n;
        }
        if let Some(t) = self.target_se {
            pso.target_fitness = t;
        }
        if let Some(r) = self.restarts {
            config.runs = r;
        }
        config
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Input(#[from] SeriesError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_)
            | CliError::Input(_)
            | CliError::Model(ModelError::FingerprintMismatch { .. }) => 2,
            _ => 1,
        }
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Fuzzify(io) => {
            let (series, prepared) = load_and_prepare(io)?;
            write_fuzzification(io, &series, &prepared)?;
            if io.emit_intermediate {
                write_intermediate(&io.out, &prepared, None)?;
            }
            Ok(())
        }
        Command::Train { io, training } => {
            let config = training.to_config()?;
            let (series, prepared) = load_and_prepare(io)?;
            let model = train_and_save(io, &series, &prepared, &config)?;
            if io.emit_intermediate {
                write_intermediate(&io.out, &prepared, Some(&model.rulebase))?;
            }
            Ok(())
        }
        Command::Evaluate { io, model } => {
            let series = TimeSeries::load_csv(&io.input)?;
            let path = model.clone().unwrap_or_else(|| io.out.join("model.json"));
            let model = model::load_model(&path)?;
            model::check_series(&model, &series)?;
            ensure_dir(&io.out)?;
            evaluate_and_write(&io.out, &series, &model)?;
            if io.emit_intermediate {
                let prepared = prepare(&series)?;
                write_intermediate(&io.out, &prepared, Some(&model.rulebase))?;
            }
            Ok(())
        }
        Command::Run { io, training } => {
            let config = training.to_config()?;
            let (series, prepared) = load_and_prepare(io)?;
            write_fuzzification(io, &series, &prepared)?;
            let model = train_and_save(io, &series, &prepared, &config)?;
            evaluate_and_write(&io.out, &series, &model)?;
            if io.emit_intermediate {
                write_intermediate(&io.out, &prepared, Some(&model.rulebase))?;
            }
            Ok(())
        }
    }
}

fn load_and_prepare(io: &IoArgs) -> Result<(TimeSeries, Prepared), CliError> {
    let series = TimeSeries::load_csv(&io.input)?;
    let prepared = prepare(&series)?;
    ensure_dir(&io.out)?;
    Ok((series, prepared))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Output {
        path: path.display().to_string(),
        source,
    })?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Integers print without a fractional part.
fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.0}")
    } else {
        format!("{x}")
    }
}

fn write_fuzzification(io: &IoArgs, series: &TimeSeries, p: &Prepared) -> Result<(), CliError> {
    print_stats(&p.stats, &p.partitioning);
    write_file(
        &io.out.join("partitions.csv"),
        &partitions_csv(&p.partitioning),
    )?;
    write_file(
        &io.out.join("fuzzified.csv"),
        &fuzzified_csv(series, &p.fuzzified),
    )
}

fn print_stats(stats: &FuzzificationStats, p: &Partitioning) {
    println!(
        "average distance {}, std dev {}, revised average distance {}",
        num(stats.avg_distance),
        num(stats.std_dev),
        num(stats.revised_avg_distance)
    );
    println!(
        "universe [{}, {}], {} fuzzy sets",
        num(p.universe.lower),
        num(p.universe.upper),
        p.n_sets
    );
}

pub fn partitions_csv(p: &Partitioning) -> String {
    let mut out = String::from("set,a,b,c,d\n");
    for s in &p.sets {
        let _ = writeln!(
            out,
            "A{},{},{},{},{}",
            s.index,
            num(s.a),
            num(s.b),
            num(s.c),
            num(s.d)
        );
    }
    out
}

pub fn fuzzified_csv(series: &TimeSeries, fuzzified: &[FuzzifiedObservation]) -> String {
    let mut out = String::from("t,value,set,membership,secondary_set,secondary_membership\n");
    for (o, f) in series.observations().iter().zip(fuzzified) {
        let _ = writeln!(
            out,
            "{},{},A{},{},{},{}",
            o.t,
            num(o.value),
            f.primary_set,
            f.membership_primary,
            f.secondary_set.map(|s| format!("A{s}")).unwrap_or_default(),
            f.membership_secondary
                .map(|m| m.to_string())
                .unwrap_or_default()
        );
    }
    out
}

fn train_and_save(
    io: &IoArgs,
    series: &TimeSeries,
    prepared: &Prepared,
    config: &TrainingConfig,
) -> Result<TrainedModel, CliError> {
    let model = train_all(&prepared.rulebase, &prepared.partitioning, series, config)?;
    print!("{}", training_summary(&model));
    for r in model.non_converged() {
        let se = r.fit.as_ref().map_or(f64::NAN, |f| f.se);
        eprintln!(
            "warning: rule {} did not reach the target error (best SE {se})",
            r.label
        );
    }
    let path = io.out.join("model.json");
    model::save_model(&model, &path)?;
    println!("wrote {}", path.display());
    Ok(model)
}

pub fn training_summary(model: &TrainedModel) -> String {
    let mut out = format!(
        "{:>5} {:>5} {:>14} {:>9} {:>10} {:>7}\n",
        "rule", "order", "se", "converged", "iterations", "restart"
    );
    for r in &model.rulebase.rules {
        match &r.fit {
            Some(f) => {
                let _ = writeln!(
                    out,
                    "{:>5} {:>5} {:>14.4} {:>9} {:>10} {:>7}",
                    r.label,
                    r.order(),
                    f.se,
                    if f.converged { "yes" } else { "NO" },
                    f.iterations,
                    f.restart
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "{:>5} {:>5} {:>14} {:>9} {:>10} {:>7}",
                    r.label,
                    r.order(),
                    "untrained",
                    "-",
                    "-",
                    "-"
                );
            }
        }
    }
    let trained = model.trained_rules().count();
    let failed = model.non_converged().count();
    let _ = writeln!(
        out,
        "{} rules, {} trained, {} not converged",
        model.rulebase.rules.len(),
        trained,
        failed
    );
    out
}

fn evaluate_and_write(
    out_dir: &Path,
    series: &TimeSeries,
    model: &TrainedModel,
) -> Result<EvaluationReport, CliError> {
    let forecasts = forecast_in_sample(model, series)?;
    let report = build_report(series, &forecasts.forecasts)?;
    for gap in &forecasts.gaps {
        println!("no forecast at t = {} ({:?})", gap.t, gap.reason);
    }
    let text = render_text(&report);
    print!("{text}");
    write_file(&out_dir.join("report.txt"), &text)?;
    write_file(&out_dir.join("report.csv"), &render_csv(&report))?;
    if reference::is_enrollment(series) {
        write_file(
            &out_dir.join("comparison.txt"),
            &reference::render_comparison(&report),
        )?;
    }
    Ok(report)
}

pub fn groups_listing(groups: &[FuzzySetGroup]) -> String {
    let mut out = String::from("label,group,anchor\n");
    for g in groups {
        let _ = writeln!(out, "{},\"{}\",{}", g.label, g, g.anchor_t);
    }
    out
}

pub fn rules_listing(rulebase: &RuleBase) -> String {
    let mut out = String::from("label,order,condition,anchors,weights\n");
    for r in &rulebase.rules {
        let anchors: Vec<String> = r.anchor_ts.iter().map(|t| t.to_string()).collect();
        let weights: Vec<String> = r
            .weights
            .iter()
            .flatten()
            .map(|w| format!("{w:.4}"))
            .collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.label,
            r.order(),
            r.matching_part(),
            anchors.join(" "),
            weights.join(" ")
        );
    }
    out
}

fn write_intermediate(
    out_dir: &Path,
    prepared: &Prepared,
    trained: Option<&RuleBase>,
) -> Result<(), CliError> {
    write_file(
        &out_dir.join("groups.csv"),
        &groups_listing(&prepared.groups),
    )?;
    write_file(
        &out_dir.join("groups_disambiguated.csv"),
        &groups_listing(&prepared.disambiguated),
    )?;
    write_file(
        &out_dir.join("rules.csv"),
        &rules_listing(trained.unwrap_or(&prepared.rulebase)),
    )
}
