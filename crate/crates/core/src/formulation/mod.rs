//! The three models over the segment variables `x_s` (one per candidate
//! segment, indexed by segment ordinal):
//!
//! * [`ConstrainedModel`]: quadratic triplet objective with exactly-one
//!   in/out degree equalities.
//! * [`QuboModel`]: the same objective with the equalities moved into
//!   squared penalties weighted by `gamma`.
//! * [`LinearModel`]: the objective linearised with one product variable per
//!   triplet and the three standard product rows.

mod blp;
mod qcbm;
mod qubo;

pub use blp::{build_blp, LinearModel, LinearRow, Sense, Var};
pub use qcbm::{build_qcbm, ConstrainedModel};
pub use qubo::{build_qubm, QuboModel};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;

pub const DEFAULT_ALPHA: f64 = 100.0;
pub const DEFAULT_GAMMA: f64 = 1.0;

/// One `coefficient * x_first * x_second` term, tied to a triplet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticTerm {
    pub first: usize,
    pub second: usize,
    pub coefficient: f64,
}

/// Exactly-one constraint: the variables in `vars` must sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeConstraint {
    pub hit: usize,
    pub vars: Vec<usize>,
}

/// The receive family (hits on layers 2..L) and the send family (hits on
/// layers 1..L-1).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DegreeConstraints {
    pub receive: Vec<DegreeConstraint>,
    pub send: Vec<DegreeConstraint>,
}

impl DegreeConstraints {
    pub fn from_instance(instance: &Instance) -> Result<Self> {
        instance.check_structure()?;
        let mut out = Self::default();
        for h in 0..instance.num_hits() {
            if instance.must_receive(h) {
                out.receive.push(DegreeConstraint {
                    hit: h,
                    vars: instance.in_segments(h).to_vec(),
                });
            }
            if instance.must_send(h) {
                out.send.push(DegreeConstraint {
                    hit: h,
                    vars: instance.out_segments(h).to_vec(),
                });
            }
        }
        Ok(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = &DegreeConstraint> {
        self.receive.iter().chain(self.send.iter())
    }

    pub fn is_satisfied(&self, x: &[bool]) -> bool {
        self.iter()
            .all(|c| c.vars.iter().filter(|&&v| x[v]).count() == 1)
    }

    /// `sum over constraints of (1 - sum x)^2`.
    pub fn squared_violation(&self, x: &[bool]) -> f64 {
        self.iter()
            .map(|c| {
                let s = c.vars.iter().filter(|&&v| x[v]).count() as f64;
                (1.0 - s) * (1.0 - s)
            })
            .sum()
    }
}

/// Terms for every candidate triplet, scaled by `alpha`. Two triplets on the
/// same variable pair indicate corrupted input.
pub(crate) fn triplet_terms(instance: &Instance, alpha: f64) -> Result<Vec<QuadraticTerm>> {
    let mut seen = std::collections::HashSet::with_capacity(instance.triplets().len());
    let mut terms = Vec::with_capacity(instance.triplets().len());
    for t in instance.triplets() {
        let key = (t.first.min(t.second), t.first.max(t.second));
        if !seen.insert(key) {
            return Err(Error::DuplicatePair(key.0, key.1));
        }
        terms.push(QuadraticTerm {
            first: t.first,
            second: t.second,
            coefficient: alpha * t.cost,
        });
    }
    Ok(terms)
}

pub(crate) fn check_len(expected: usize, x: &[bool]) -> Result<()> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual: x.len() })
    }
}

pub(crate) fn check_weight(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must be positive, got {value}")))
    }
}

/// Per-hit degrees of an assignment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub in_degree: Vec<usize>,
    pub out_degree: Vec<usize>,
    /// Hits whose mandatory in- or out-degree differs from 1.
    pub violations: Vec<usize>,
    pub feasible: bool,
}

/// Degree check of an assignment against the exactly-one constraints.
/// A length mismatch is reported as infeasible with no degrees counted.
pub fn check_feasible(instance: &Instance, x: &[bool]) -> FeasibilityReport {
    let n = instance.num_hits();
    let mut in_degree = vec![0; n];
    let mut out_degree = vec![0; n];
    if x.len() != instance.segments().len() {
        return FeasibilityReport {
            in_degree,
            out_degree,
            violations: (0..n).collect(),
            feasible: false,
        };
    }
    for (s, seg) in instance.segments().iter().enumerate() {
        if x[s] {
            out_degree[seg.from] += 1;
            in_degree[seg.to] += 1;
        }
    }
    let violations: Vec<usize> = (0..n)
        .filter(|&h| {
            (instance.must_receive(h) && in_degree[h] != 1)
                || (instance.must_send(h) && out_degree[h] != 1)
        })
        .collect();
    FeasibilityReport {
        feasible: violations.is_empty(),
        in_degree,
        out_degree,
        violations,
    }
}

/// `alpha * sum of selected triplet costs`; the objective used for gaps.
pub fn track_objective(instance: &Instance, alpha: f64, x: &[bool]) -> f64 {
    alpha
        * instance
            .triplets()
            .iter()
            .filter(|t| x[t.first] && x[t.second])
            .map(|t| t.cost)
            .sum::<f64>()
}
