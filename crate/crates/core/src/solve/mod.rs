//! Solvers over an [`Instance`](crate::instance::Instance): simulated
//! annealing on the penalty model, an exact branch-and-bound search, a
//! greedy baseline, and helpers to repair and decode assignments.

mod anneal;
mod decode;
mod exact;
mod greedy;
mod repair;

pub use anneal::{
    anneal, anneal_instance, simulated_annealing, AnnealOutcome, AnnealSchedule, Temperature,
};
pub use decode::decode_tracks;
pub use exact::{exact_search, exact_search_with, ExactOptions, DEFAULT_EXACT_CAP};
pub use greedy::greedy_baseline;
pub use repair::repair;

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome of one solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub method: String,
    pub assignment: Vec<bool>,
    /// `alpha * sum` of the costs of selected triplets.
    pub objective: f64,
    /// Model energy of `assignment`; equals `objective` for feasible
    /// assignments.
    pub energy: f64,
    pub feasible: bool,
    /// Decoded tracks (0-based hit ids), present iff feasible.
    pub tracks: Option<Vec<Vec<usize>>>,
    /// Seconds.
    pub wall_time: f64,
    pub seed: Option<u64>,
    /// Annealer state before repair.
    pub raw: Option<RawAnneal>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawAnneal {
    pub energy: f64,
    pub objective: f64,
    pub feasible: bool,
    pub repaired: bool,
}

pub(crate) fn check_deadline(deadline: Option<Instant>) -> Result<()> {
    match deadline {
        Some(d) if Instant::now() >= d => Err(Error::Timeout),
        _ => Ok(()),
    }
}
