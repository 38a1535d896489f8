//! Published enrollment-model tables used as fixtures.
#![allow(dead_code)]

use fts_pso::reference::{ENROLLMENT, ENROLLMENT_START, PUBLISHED_WEIGHTS};
use fts_pso::{prepare, Prepared, TimeSeries};

pub const FIRST_FOUR: [f64; 4] = [13055.0, 13563.0, 13867.0, 14696.0];

/// Trapezoid breakpoints `(a, b, c, d)` of the 17 enrollment sets.
pub const SETS: [[f64; 4]; 17] = [
    [12861.0, 13055.0, 13245.0, 13436.0],
    [13245.0, 13436.0, 13626.0, 13816.0],
    [13626.0, 13816.0, 14007.0, 14197.0],
    [14007.0, 14197.0, 14388.0, 14578.0],
    [14388.0, 14578.0, 14768.0, 14959.0],
    [14768.0, 14959.0, 15149.0, 15339.0],
    [15149.0, 15339.0, 15530.0, 15720.0],
    [15530.0, 15720.0, 15910.0, 16101.0],
    [15910.0, 16101.0, 16291.0, 16482.0],
    [16291.0, 16482.0, 16672.0, 16862.0],
    [16672.0, 16862.0, 17053.0, 17243.0],
    [17053.0, 17243.0, 17433.0, 17624.0],
    [17433.0, 17624.0, 17814.0, 18004.0],
    [17814.0, 18004.0, 18195.0, 18385.0],
    [18195.0, 18385.0, 18576.0, 18766.0],
    [18576.0, 18766.0, 18956.0, 19147.0],
    [18956.0, 19147.0, 19337.0, 19531.0],
];

/// Fuzzified label of each year, 1971 to 1992.
pub const LABELS: [usize; 22] = [
    1, 2, 3, 5, 7, 7, 7, 8, 11, 11, 10, 7, 7, 6, 6, 8, 11, 14, 16, 17, 17, 16,
];

/// Pairwise groups `{F(t-2), F(t-1)}`, labels 1 to 21.
pub const PAIR_GROUPS: [[usize; 2]; 21] = [
    [1, 2],
    [2, 3],
    [3, 5],
    [5, 7],
    [7, 7],
    [7, 7],
    [7, 8],
    [8, 11],
    [11, 11],
    [11, 10],
    [10, 7],
    [7, 7],
    [7, 6],
    [6, 6],
    [6, 8],
    [8, 11],
    [11, 14],
    [14, 16],
    [16, 17],
    [17, 17],
    [17, 16],
];

/// The ambiguous groups and their extended patterns, oldest set first.
pub const EXTENSIONS: [(usize, [usize; 3]); 5] = [
    (5, [5, 7, 7]),
    (6, [7, 7, 7]),
    (8, [7, 8, 11]),
    (12, [10, 7, 7]),
    (16, [6, 8, 11]),
];

/// Rule conditions as `F(t-1), F(t-2), ...` per rule label 1 to 21.
pub const RULE_CONDITIONS: [&[usize]; 21] = [
    &[2, 1],
    &[3, 2],
    &[5, 3],
    &[7, 5],
    &[7, 7, 5],
    &[7, 7, 7],
    &[8, 7],
    &[11, 8, 7],
    &[11, 11],
    &[10, 11],
    &[7, 10],
    &[7, 7, 10],
    &[6, 7],
    &[6, 6],
    &[8, 6],
    &[11, 8, 6],
    &[14, 11],
    &[16, 14],
    &[17, 16],
    &[17, 17],
    &[16, 17],
];

pub fn enrollment() -> TimeSeries {
    TimeSeries::from_values(ENROLLMENT_START, &ENROLLMENT).unwrap()
}

pub fn enrollment_prepared() -> Prepared {
    prepare(&enrollment()).unwrap()
}

/// Rule base with the published weights injected.
pub fn with_published_weights(mut p: Prepared) -> fts_pso::RuleBase {
    for (label, w) in PUBLISHED_WEIGHTS {
        p.rulebase.get_mut(label).unwrap().weights = Some(w.to_vec());
    }
    p.rulebase
}
