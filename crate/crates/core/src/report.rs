//! Inequality-chain reports shared by the weight checks and the experiments.

use std::collections::BTreeMap;

use serde::Serialize;

/// Absolute slack allowed when an inequality is compared in log domain.
pub const CHAIN_TOL: f64 = 1e-9;

/// Default divergence threshold, `10^6` in linear scale.
pub const DEFAULT_THRESHOLD: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Param {
    Int(i64),
    Real(f64),
    Text(String),
    List(Vec<f64>),
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Real(v)
    }
}
impl From<i64> for Param {
    fn from(v: i64) -> Self {
        Param::Int(v)
    }
}
impl From<usize> for Param {
    fn from(v: usize) -> Self {
        Param::Int(v as i64)
    }
}
impl From<u64> for Param {
    fn from(v: u64) -> Self {
        Param::Int(v as i64)
    }
}
impl From<&str> for Param {
    fn from(v: &str) -> Self {
        Param::Text(v.to_string())
    }
}
impl From<String> for Param {
    fn from(v: String) -> Self {
        Param::Text(v)
    }
}
impl From<Vec<f64>> for Param {
    fn from(v: Vec<f64>) -> Self {
        Param::List(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// `lhs <= rhs + tol`
    Le,
    /// `|lhs - rhs| <= tol * max(1, |rhs|)`
    Close,
    /// Verdict comes from exact arithmetic; the sides are informational.
    Exact,
}

/// One inequality `lhs <= rhs + tol`, both sides in log domain (or plain
/// reals where the inequality is additive).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub holds: bool,
}

impl Check {
    pub fn le(name: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Check {
            name: name.to_string(),
            kind: CheckKind::Le,
            lhs,
            rhs,
            tol,
            holds: lhs <= rhs + tol,
        }
    }

    /// `|lhs - rhs| <= tol * max(1, |rhs|)`.
    pub fn close(name: &str, lhs: f64, rhs: f64, rel_tol: f64) -> Self {
        let holds = (lhs - rhs).abs() <= rel_tol * rhs.abs().max(1.0);
        Check {
            name: name.to_string(),
            kind: CheckKind::Close,
            lhs,
            rhs,
            tol: rel_tol,
            holds,
        }
    }

    /// Exact equality of two computed quantities (stored for the record).
    pub fn exact(name: &str, lhs: f64, rhs: f64, equal: bool) -> Self {
        Check {
            name: name.to_string(),
            kind: CheckKind::Exact,
            lhs,
            rhs,
            tol: 0.0,
            holds: equal,
        }
    }

    /// Recomputes the verdict from the stored sides. Exact checks carry
    /// their verdict from the exact arithmetic that produced them.
    pub fn reverify(&self) -> bool {
        match self.kind {
            CheckKind::Le => self.holds == (self.lhs <= self.rhs + self.tol),
            CheckKind::Close => {
                self.holds == ((self.lhs - self.rhs).abs() <= self.tol * self.rhs.abs().max(1.0))
            }
            CheckKind::Exact => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainRow {
    pub index: u64,
    /// Factor values aligned with [`ChainReport::columns`].
    pub values: Vec<f64>,
    pub checks: Vec<Check>,
}

impl ChainRow {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn value(&self, columns: &[String], name: &str) -> Option<f64> {
        columns
            .iter()
            .position(|c| c == name)
            .map(|i| self.values[i])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub all_hold: bool,
    pub violations: usize,
    /// `Some` when the experiment tracks a divergent lower bound.
    pub diverged: Option<bool>,
    pub first_crossing_index: Option<u64>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.all_hold && self.diverged.unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub experiment: String,
    pub params: BTreeMap<String, Param>,
    pub columns: Vec<String>,
    pub rows: Vec<ChainRow>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl ChainReport {
    pub fn new(experiment: &str, columns: &[&str]) -> Self {
        ChainReport {
            experiment: experiment.to_string(),
            params: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdict: Verdict {
                all_hold: true,
                violations: 0,
                diverged: None,
                first_crossing_index: None,
            },
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Param>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// Sorts rows by index and recomputes the inequality part of the verdict.
    pub fn finish_rows(&mut self, rows: Vec<ChainRow>) {
        let mut rows = rows;
        rows.sort_by_key(|r| r.index);
        self.verdict.violations = rows.iter().filter(|r| !r.holds()).count();
        self.verdict.all_hold = self.verdict.violations == 0;
        self.rows = rows;
    }

    /// Marks divergence by the first row whose `column` exceeds `log_threshold`.
    pub fn mark_divergence(&mut self, column: &str, log_threshold: f64) {
        let idx = self.columns.iter().position(|c| c == column);
        let first = idx.and_then(|i| {
            self.rows
                .iter()
                .find(|r| r.values[i] > log_threshold)
                .map(|r| r.index)
        });
        self.verdict.diverged = Some(first.is_some());
        self.verdict.first_crossing_index = first;
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    /// Every stored check re-derives its verdict from its stored sides.
    pub fn reverify(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.checks.iter().all(Check::reverify))
    }

    /// Names of all check columns, in first-seen order.
    pub fn check_names(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for r in &self.rows {
            for c in &r.checks {
                if !names.contains(&c.name) {
                    names.push(c.name.clone());
                }
            }
        }
        names
    }
}
