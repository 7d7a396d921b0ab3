//! Aggregation of per-point identity residuals into pass/fail reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar_field::Point;

/// Named residuals measured at one point.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointResiduals {
    pub point: Option<Point>,
    pub values: BTreeMap<String, f64>,
}

impl PointResiduals {
    pub fn at(point: Point) -> Self {
        PointResiduals {
            point: Some(point),
            values: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn extend(&mut self, other: &PointResiduals) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), *v);
        }
    }
}

/// Distribution summary of one residual over a point sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub max: f64,
    pub p95: f64,
    pub worst_point: Option<Point>,
    pub samples: usize,
}

/// Per-identity maxima against a single tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub tolerance: f64,
    pub residuals: BTreeMap<String, ResidualStats>,
    pub passed: bool,
}

impl IdentityReport {
    pub fn from_samples(tolerance: f64, samples: &[PointResiduals]) -> Self {
        let mut columns: BTreeMap<&str, Vec<(f64, Option<Point>)>> = BTreeMap::new();
        for s in samples {
            for (k, v) in &s.values {
                columns.entry(k.as_str()).or_default().push((*v, s.point));
            }
        }
        let residuals: BTreeMap<String, ResidualStats> = columns
            .into_iter()
            .map(|(name, col)| (name.to_string(), summarize(&col)))
            .collect();
        let passed = residuals.values().all(|r| r.max < tolerance);
        IdentityReport {
            tolerance,
            residuals,
            passed,
        }
    }

    pub fn max(&self, name: &str) -> Option<f64> {
        self.residuals.get(name).map(|r| r.max)
    }

    /// Largest residual over all identities in the report.
    pub fn worst(&self) -> f64 {
        self.residuals
            .values()
            .fold(0.0_f64, |acc, r| nan_max(acc, r.max))
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn summarize(col: &[(f64, Option<Point>)]) -> ResidualStats {
    let mut max = f64::NEG_INFINITY;
    let mut worst_point = None;
    for &(v, p) in col {
        // A NaN residual poisons the maximum so that it can never pass.
        if v.is_nan() {
            max = f64::NAN;
            worst_point = p;
            break;
        }
        if v > max {
            max = v;
            worst_point = p;
        }
    }
    let mut sorted: Vec<f64> = col.iter().map(|c| c.0).filter(|v| !v.is_nan()).collect();
    sorted.sort_by(f64::total_cmp);
    let p95 = if sorted.is_empty() {
        f64::NAN
    } else {
        let rank = ((0.95 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        sorted[rank - 1]
    };
    ResidualStats {
        max,
        p95,
        worst_point,
        samples: col.len(),
    }
}
