//! Acceptance criteria, one PASS/FAIL line each. A criterion that fails for
//! a documented reason is still printed as FAIL with that reason; only an
//! undocumented failure makes the process exit nonzero.

mod common;

use std::time::Duration;

use common::*;
use fts_pso::evaluate::build_report;
use fts_pso::fuzzify::partition_series;
use fts_pso::model::to_json;
use fts_pso::pso::{PsoConfig, Swarm};
use fts_pso::reference::{CHEN_ORDER3, WEIGHTED_RULES_PUBLISHED};
use fts_pso::rules::match_rule;
use fts_pso::{
    defuzzify, forecast_in_sample, fuzzify, mape, mse, prepare, timed, train_all, TimeSeries,
    TrainedModel, TrainingConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
    documented: Option<&'static str>,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        detail,
        documented: None,
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn criterion_1() -> Outcome {
    let s = TimeSeries::from_values(1971, &FIRST_FOUR).unwrap();
    let (result, elapsed) = timed(|| partition_series(&s));
    let (stats, p) = result.unwrap();
    let a1 = p.set(1).unwrap();
    let ok = stats.avg_distance == 547.0
        && stats.std_dev == 216.0
        && stats.revised_avg_distance == 508.0
        && p.universe.lower == 12547.0
        && p.universe.upper == 15204.0
        && p.n_sets == 2
        && [a1.a, a1.b, a1.c, a1.d] == [12547.0, 13055.0, 13602.0, 14149.0];
    let fast = elapsed < Duration::from_millis(1);
    outcome(
        ok && fast,
        format!(
            "AD {} sigma {} AD_R {} U [{}, {}] n {} A1 ({}, {}, {}, {}) in {:.3} ms",
            stats.avg_distance,
            stats.std_dev,
            stats.revised_avg_distance,
            p.universe.lower,
            p.universe.upper,
            p.n_sets,
            a1.a,
            a1.b,
            a1.c,
            a1.d,
            ms(elapsed)
        ),
    )
}

fn criterion_2() -> Outcome {
    let s = enrollment();
    let (result, elapsed) = timed(|| {
        let (_, p) = partition_series(&s)?;
        let f = fuzzify(&s, &p)?;
        Ok::<_, fts_pso::FuzzifyError>((p, f))
    });
    let (p, f) = result.unwrap();
    let worst = p
        .sets
        .iter()
        .zip(SETS)
        .flat_map(|(set, want)| {
            [set.a, set.b, set.c, set.d]
                .into_iter()
                .zip(want)
                .map(|(g, w)| (g - w).abs())
        })
        .fold(0.0, f64::max);
    let labels: Vec<usize> = f.iter().map(|o| o.primary_set).collect();
    let ok = p.n_sets == 17 && worst <= 1.0 && labels == LABELS;
    outcome(
        ok && elapsed < Duration::from_millis(10),
        format!(
            "{} sets, max breakpoint deviation {worst}, labels {} in {:.3} ms",
            p.n_sets,
            if labels == LABELS { "exact" } else { "differ" },
            ms(elapsed)
        ),
    )
}

fn criterion_3() -> Outcome {
    let p = enrollment_prepared();
    let pairs_ok = p.groups.len() == 21
        && p.groups
            .iter()
            .zip(PAIR_GROUPS)
            .all(|(g, w)| g.pattern == w);
    let extended: Vec<(usize, Vec<usize>)> = p
        .disambiguated
        .iter()
        .filter(|g| g.order() > 2)
        .map(|g| (g.label, g.pattern.clone()))
        .collect();
    let want: Vec<(usize, Vec<usize>)> = EXTENSIONS.iter().map(|(l, g)| (*l, g.to_vec())).collect();
    let rules_ok = p.rulebase.rules.len() == 21
        && p.rulebase
            .rules
            .iter()
            .zip(RULE_CONDITIONS)
            .all(|(r, w)| r.conditions.iter().map(|c| c.set).collect::<Vec<_>>() == w);
    let labels: Vec<usize> = extended.iter().map(|(l, _)| *l).collect();
    outcome(
        pairs_ok && extended == want && rules_ok,
        format!(
            "21 pairwise groups {}, extended {labels:?}, 21 rule conditions {}",
            if pairs_ok { "match" } else { "differ" },
            if rules_ok { "match" } else { "differ" }
        ),
    )
}

fn criterion_4() -> Outcome {
    let y = defuzzify(&[0.6488, 0.3882], &[13563.0, 13055.0]).unwrap();
    let first_ok = (y - 13867.62).abs() < 0.01 && y.round() == 13868.0;

    let series = enrollment();
    let p = enrollment_prepared();
    let model = TrainedModel {
        partitioning: p.partitioning.clone(),
        rulebase: with_published_weights(p),
        config: TrainingConfig::default(),
        series_fingerprint: series.fingerprint(),
        seed: 0,
    };
    let out = forecast_in_sample(&model, &series).unwrap();
    let off: Vec<String> = out
        .forecasts
        .iter()
        .filter_map(|f| {
            let printed = WEIGHTED_RULES_PUBLISHED.forecast_at(f.t)?;
            let d = f.value.round() - printed;
            (d.abs() > 1.0).then(|| format!("{} off by {d}", f.t))
        })
        .collect();
    let column_ok = out.forecasts.len() == 20 && off.is_empty();

    let chen = mse(&CHEN_ORDER3.pairs()).unwrap();
    let chen_ok = (chen - 86694.0).abs() / 86694.0 <= 0.01;

    let detail = format!(
        "Y(1973) = {y:.4}; printed-weight forecasts outside +-1: {}; Chen MSE {chen:.1}",
        if off.is_empty() {
            "none".to_string()
        } else {
            off.join(", ")
        }
    );
    let documented = (first_ok && chen_ok && off.len() == 2).then_some(
        "the printed 4-decimal weights give 16808.65 for 1979 and 15146.11 for 1984, while the \
         printed forecasts are 16806 and 15143",
    );
    Outcome {
        pass: first_ok && column_ok && chen_ok,
        detail,
        documented,
    }
}

fn criterion_5() -> Outcome {
    let series = enrollment();
    let p = enrollment_prepared();
    let config = TrainingConfig::default();
    let (model, elapsed) = timed(|| train_all(&p.rulebase, &p.partitioning, &series, &config));
    let model = model.unwrap();
    let out = forecast_in_sample(&model, &series).unwrap();
    let report = build_report(&series, &out.forecasts).unwrap();
    let non_converged: Vec<usize> = model.non_converged().map(|r| r.label).collect();
    let (m, q) = (report.mse.unwrap(), report.mape.unwrap());
    outcome(
        m <= 3.0 && q <= 0.02 && elapsed < Duration::from_secs(10),
        format!(
            "MSE {m:.3} MAPE {q:.4}% over {} forecasts, {} rules trained, non-converged {:?}, \
             training {:.1} ms",
            report.n_evaluated,
            model.trained_rules().count(),
            non_converged,
            ms(elapsed)
        ),
    )
}

fn membership_props(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for trial in 0..200 {
        let len = rng.gen_range(3..40);
        let integer = rng.gen_bool(0.5);
        let values: Vec<f64> = (0..len)
            .map(|_| {
                let x = rng.gen_range(-1e4..1e4);
                if integer {
                    f64::round(x)
                } else {
                    x
                }
            })
            .collect();
        let s = TimeSeries::from_values(0, &values).unwrap();
        let Ok((_, p)) = partition_series(&s) else {
            continue;
        };
        let (lo, hi) = (p.sets[0].b, p.sets[p.n_sets - 1].c);
        for k in 0..=500 {
            let x = p.universe.lower + (p.universe.upper - p.universe.lower) * k as f64 / 500.0;
            let mut total = 0.0;
            for set in &p.sets {
                let mu = set.membership(x);
                if !(0.0..=1.0).contains(&mu) {
                    return Err(format!("trial {trial}: membership {mu} at {x}"));
                }
                total += mu;
            }
            if (lo..=hi).contains(&x) && (total - 1.0).abs() > 1e-9 {
                return Err(format!("trial {trial}: overlap sum {total} at {x}"));
            }
        }
    }
    Ok(())
}

fn random_pso_config(rng: &mut ChaCha8Rng) -> PsoConfig {
    let v = rng.gen_range(1e-3..2.0);
    let pos_min = rng.gen_range(-5.0..5.0);
    PsoConfig {
        inertia: rng.gen_range(0.0..2.0),
        c1: rng.gen_range(0.0..3.0),
        c2: rng.gen_range(0.0..3.0),
        v_min: -v * rng.gen_range(0.1..1.5),
        v_max: v,
        pos_min,
        pos_max: pos_min + rng.gen_range(0.1..10.0),
        n_particles: rng.gen_range(1..8),
        max_iterations: rng.gen_range(1..60),
        target_fitness: if rng.gen_bool(0.2) {
            0.5
        } else {
            f64::NEG_INFINITY
        },
        seed: rng.gen(),
    }
}

fn pso_props(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for trial in 0..1000 {
        let cfg = random_pso_config(rng);
        let dim = rng.gen_range(1..5);
        let centre: Vec<f64> = (0..dim).map(|_| rng.gen_range(-8.0..8.0)).collect();
        let mut f = |x: &[f64]| {
            x.iter()
                .zip(&centre)
                .map(|(a, c)| (a - c).powi(2))
                .sum::<f64>()
        };
        let positions = (0..cfg.n_particles)
            .map(|_| {
                (0..dim)
                    .map(|_| rng.gen_range(cfg.pos_min..=cfg.pos_max))
                    .collect()
            })
            .collect();
        let velocities = (0..cfg.n_particles)
            .map(|_| {
                (0..dim)
                    .map(|_| rng.gen_range(cfg.v_min..=cfg.v_max))
                    .collect()
            })
            .collect();
        let mut swarm = Swarm::new(cfg.clone(), dim, positions, velocities, &mut f)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        let mut best = swarm.global_best().1;
        while !swarm.is_finished() {
            swarm.step(&mut f);
            let now = swarm.global_best().1;
            if now > best {
                return Err(format!("trial {trial}: global best rose {best} -> {now}"));
            }
            best = now;
            for p in swarm.particles() {
                let pos_ok = p
                    .position
                    .iter()
                    .all(|x| (cfg.pos_min..=cfg.pos_max).contains(x));
                let vel_ok = p
                    .velocity
                    .iter()
                    .all(|v| (cfg.v_min..=cfg.v_max).contains(v));
                if !pos_ok || !vel_ok {
                    return Err(format!("trial {trial}: particle left the box"));
                }
            }
        }
    }
    Ok(())
}

fn rulebase_props(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for trial in 0..300 {
        let len = rng.gen_range(3..60);
        let values: Vec<f64> = (0..len).map(|_| f64::from(rng.gen_range(0..30))).collect();
        let s = TimeSeries::from_values(0, &values).unwrap();
        let Ok(p) = prepare(&s) else {
            continue;
        };
        let mut patterns: Vec<Vec<usize>> = p
            .rulebase
            .rules
            .iter()
            .map(|r| r.conditions.iter().map(|c| c.set).collect())
            .collect();
        let n = patterns.len();
        patterns.sort();
        patterns.dedup();
        if patterns.len() != n {
            return Err(format!("trial {trial}: duplicate rule patterns"));
        }
        for rule in &p.rulebase.rules {
            for &t in rule.anchor_ts.iter().filter(|&&t| t <= s.end()) {
                match match_rule(&p.rulebase, &p.fuzzified, t) {
                    Ok(m) if m.label == rule.label => {}
                    other => {
                        return Err(format!(
                            "trial {trial}: rule {} at t = {t} matched {:?}",
                            rule.label,
                            other.map(|m| m.label)
                        ))
                    }
                }
            }
        }
    }
    Ok(())
}

fn determinism_props() -> Result<(), String> {
    let series = enrollment();
    let p = enrollment_prepared();
    let config = TrainingConfig {
        pso: PsoConfig {
            seed: 2024,
            ..PsoConfig::default()
        },
        ..TrainingConfig::default()
    };
    let run = || {
        let m = train_all(&p.rulebase, &p.partitioning, &series, &config).unwrap();
        to_json(&m).unwrap()
    };
    if run() == run() {
        Ok(())
    } else {
        Err("two runs with one seed produced different model files".into())
    }
}

fn metric_props(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for trial in 0..1000 {
        let n = rng.gen_range(1..30);
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(1.0..1e4), rng.gen_range(1.0..1e4)))
            .collect();
        let k = rng.gen_range(0.01..100.0);
        let scaled: Vec<(f64, f64)> = pairs.iter().map(|&(f, a)| (k * f, k * a)).collect();
        let (m, q) = (mse(&pairs).unwrap(), mape(&pairs).unwrap());
        let (ms_, qs) = (mse(&scaled).unwrap(), mape(&scaled).unwrap());
        if (ms_ - k * k * m).abs() > 1e-9 * (1.0 + k * k * m) || (qs - q).abs() > 1e-9 * (1.0 + q) {
            return Err(format!("trial {trial}: scaling identity broken"));
        }
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let suites: [(&str, Result<(), String>); 5] = [
        ("membership/overlap", membership_props(&mut rng)),
        ("pso bounds/monotone x1000", pso_props(&mut rng)),
        ("rulebase uniqueness/matching", rulebase_props(&mut rng)),
        ("determinism", determinism_props()),
        ("metric identities", metric_props(&mut rng)),
    ];
    let failures: Vec<String> = suites
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    let names: Vec<&str> = suites.iter().map(|(n, _)| *n).collect();
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} suites passed ({})", names.len(), names.join(", "))
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_7() -> Outcome {
    let series = enrollment();
    let p = enrollment_prepared();
    let model = train_all(
        &p.rulebase,
        &p.partitioning,
        &series,
        &TrainingConfig::default(),
    )
    .unwrap();
    let out = forecast_in_sample(&model, &series).unwrap();
    let report = build_report(&series, &out.forecasts).unwrap();
    let ninth_order = series.len() - 9;
    let gaps = report.gap_times();
    outcome(
        report.n_evaluated == 20 && gaps == [1971, 1972] && report.n_evaluated > ninth_order,
        format!(
            "{} of {} years forecast, gaps {gaps:?}, a 9th-order scheme covers {ninth_order}",
            report.n_evaluated,
            report.rows.len()
        ),
    )
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 7] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
    ];
    let mut undocumented = 0;
    let mut passed = 0;
    for (n, check) in criteria {
        let o = check();
        if o.pass {
            passed += 1;
            println!("PASS criterion {n}: {}", o.detail);
        } else if let Some(why) = o.documented {
            println!("FAIL criterion {n}: {} [documented: {why}]", o.detail);
        } else {
            undocumented += 1;
            println!("FAIL criterion {n}: {}", o.detail);
        }
    }
    println!("{passed} of {} criteria passed", criteria.len());
    if undocumented > 0 {
        std::process::exit(1);
    }
}
