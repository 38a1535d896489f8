//! Fuzzy set groups and the forecast rules built from them.
//!
//! Every consecutive pair of labels forms a group that describes the history
//! of the time step right after it. Groups with identical patterns are pushed
//! one step further back in time, round after round, until every pattern is
//! unique or history runs out. Each group then becomes an if-rule whose
//! conditions read most-recent-first.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzify::FuzzifiedObservation;

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("need at least 3 fuzzified observations, got {len}")]
    TooShort { len: usize },
    #[error("t = {t} does not have {needed} steps of fuzzified history")]
    InsufficientHistory { t: i64, needed: usize },
    #[error("no rule matches the history of t = {t}")]
    NoMatch { t: i64 },
    #[error("rules {first} and {second} both match t = {t} at order {order}")]
    AmbiguousMatch {
        t: i64,
        first: usize,
        second: usize,
        order: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzySetGroup {
    pub label: usize,
    /// Set indices, oldest first.
    pub pattern: Vec<usize>,
    /// The time step whose history this group describes.
    pub anchor_t: i64,
}

impl FuzzySetGroup {
    pub fn order(&self) -> usize {
        self.pattern.len()
    }
}

impl fmt::Display for FuzzySetGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<String> = self.pattern.iter().map(|s| format!("A{s}")).collect();
        write!(f, "{{{}}}", sets.join(","))
    }
}

/// `F(t - lag) = A_set`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub lag: usize,
    pub set: usize,
}

/// Outcome of training one rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleFit {
    /// Summed squared error over the rule's anchors at the stored weights.
    pub se: f64,
    pub converged: bool,
    pub iterations: usize,
    pub restart: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRule {
    pub label: usize,
    /// Most recent lag first.
    pub conditions: Vec<Condition>,
    /// `weights[i]` multiplies the actual value at lag `i + 1`.
    pub weights: Option<Vec<f64>>,
    pub anchor_ts: Vec<i64>,
    pub fit: Option<RuleFit>,
}

impl ForecastRule {
    pub fn order(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_trained(&self) -> bool {
        self.weights.is_some()
    }

    /// True when every condition holds against the primary labels.
    pub fn matches(&self, labels: &LabelIndex<'_>, t: i64) -> bool {
        self.conditions
            .iter()
            .all(|c| labels.primary_at(t - c.lag as i64) == Some(c.set))
    }

    /// `if(F(t-1)=A_x ∧ F(t-2)=A_y ...)`
    pub fn matching_part(&self) -> String {
        let parts: Vec<String> = self
            .conditions
            .iter()
            .map(|c| format!("F(t-{})=A{}", c.lag, c.set))
            .collect();
        format!("if({})", parts.join(" ∧ "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleBase {
    pub rules: Vec<ForecastRule>,
    pub partitioning_fingerprint: String,
}

impl RuleBase {
    pub fn get(&self, label: usize) -> Option<&ForecastRule> {
        self.rules.iter().find(|r| r.label == label)
    }

    pub fn get_mut(&mut self, label: usize) -> Option<&mut ForecastRule> {
        self.rules.iter_mut().find(|r| r.label == label)
    }
}

/// Time-indexed view of the primary labels.
#[derive(Debug, Clone, Copy)]
pub struct LabelIndex<'a> {
    fuzzified: &'a [FuzzifiedObservation],
}

impl<'a> LabelIndex<'a> {
    pub fn new(fuzzified: &'a [FuzzifiedObservation]) -> Self {
        Self { fuzzified }
    }

    pub fn start(&self) -> i64 {
        self.fuzzified.first().map_or(0, |o| o.t)
    }

    pub fn primary_at(&self, t: i64) -> Option<usize> {
        let offset = usize::try_from(t.checked_sub(self.start())?).ok()?;
        self.fuzzified.get(offset).map(|o| o.primary_set)
    }
}

/// One order-2 group per consecutive pair, in chronological order. The last
/// group's anchor lies one step past the end of the series.
pub fn establish_groups(
    fuzzified: &[FuzzifiedObservation],
) -> Result<Vec<FuzzySetGroup>, RuleError> {
    if fuzzified.len() < 3 {
        return Err(RuleError::TooShort {
            len: fuzzified.len(),
        });
    }
    Ok(fuzzified
        .windows(2)
        .enumerate()
        .map(|(i, w)| FuzzySetGroup {
            label: i + 1,
            pattern: vec![w[0].primary_set, w[1].primary_set],
            anchor_t: w[1].t + 1,
        })
        .collect())
}

/// Extends colliding groups backwards in time until all patterns are unique
/// or the colliding groups have no earlier history left.
pub fn disambiguate(
    mut groups: Vec<FuzzySetGroup>,
    fuzzified: &[FuzzifiedObservation],
) -> Vec<FuzzySetGroup> {
    let labels = LabelIndex::new(fuzzified);
    loop {
        let mut by_pattern: BTreeMap<&[usize], Vec<usize>> = BTreeMap::new();
        for (i, g) in groups.iter().enumerate() {
            by_pattern.entry(g.pattern.as_slice()).or_default().push(i);
        }
        let colliding: Vec<usize> = by_pattern
            .into_values()
            .filter(|members| members.len() > 1)
            .flatten()
            .collect();

        let mut extended = false;
        for i in colliding {
            let g = &mut groups[i];
            let earlier = g.anchor_t - g.order() as i64 - 1;
            if let Some(set) = labels.primary_at(earlier) {
                g.pattern.insert(0, set);
                extended = true;
            }
        }
        if !extended {
            return groups;
        }
    }
}

/// Converts groups to untrained rules. Groups that still share a pattern are
/// merged into one rule carrying all of their anchors.
pub fn to_rules(groups: &[FuzzySetGroup], partitioning_fingerprint: &str) -> RuleBase {
    let mut rules: Vec<ForecastRule> = Vec::with_capacity(groups.len());
    let mut seen: BTreeMap<&[usize], usize> = BTreeMap::new();
    for g in groups {
        if let Some(&pos) = seen.get(g.pattern.as_slice()) {
            rules[pos].anchor_ts.push(g.anchor_t);
            continue;
        }
        seen.insert(g.pattern.as_slice(), rules.len());
        rules.push(ForecastRule {
            label: g.label,
            conditions: g
                .pattern
                .iter()
                .rev()
                .enumerate()
                .map(|(i, &set)| Condition { lag: i + 1, set })
                .collect(),
            weights: None,
            anchor_ts: vec![g.anchor_t],
            fit: None,
        });
    }
    RuleBase {
        rules,
        partitioning_fingerprint: partitioning_fingerprint.to_string(),
    }
}

/// The highest-order rule whose conditions all hold at `t`.
pub fn match_rule<'r>(
    rulebase: &'r RuleBase,
    fuzzified: &[FuzzifiedObservation],
    t: i64,
) -> Result<&'r ForecastRule, RuleError> {
    let labels = LabelIndex::new(fuzzified);
    if labels.primary_at(t - 1).is_none() || labels.primary_at(t - 2).is_none() {
        return Err(RuleError::InsufficientHistory { t, needed: 2 });
    }
    let mut best: Option<&ForecastRule> = None;
    let mut clash: Option<&ForecastRule> = None;
    for rule in rulebase.rules.iter().filter(|r| r.matches(&labels, t)) {
        match best {
            Some(b) if rule.order() < b.order() => {}
            Some(b) if rule.order() == b.order() => clash = clash.or(Some(rule)),
            _ => {
                best = Some(rule);
                clash = None;
            }
        }
    }
    match (best, clash) {
        (None, _) => Err(RuleError::NoMatch { t }),
        (Some(b), Some(c)) => Err(RuleError::AmbiguousMatch {
            t,
            first: b.label,
            second: c.label,
            order: b.order(),
        }),
        (Some(b), None) => Ok(b),
    }
}
