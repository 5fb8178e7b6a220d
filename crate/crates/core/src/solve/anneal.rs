use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulation::{check_feasible, track_objective, QuboModel};
use crate::instance::Instance;

use super::{check_deadline, decode_tracks, repair, RawAnneal, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Temperature {
    /// Largest single-flip energy change from the all-zero state.
    Auto,
    Fixed(f64),
}

/// Geometric cooling from `initial` to `final_temperature` over `sweeps`
/// temperature steps of `num_vars` flip attempts each, repeated `restarts`
/// times. Restart `r` draws from seed `seed + r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnealSchedule {
    pub initial: Temperature,
    /// `None` means `1e-3 * initial`.
    pub final_temperature: Option<f64>,
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            initial: Temperature::Auto,
            final_temperature: None,
            sweeps: 100,
            restarts: 10,
            seed: 0,
        }
    }
}

impl AnnealSchedule {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.sweeps == 0 {
            return bad("sweeps must be at least 1");
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if let Temperature::Fixed(t) = self.initial {
            if !(t > 0.0 && t.is_finite()) {
                return bad("initial temperature must be positive");
            }
        }
        if let Some(t) = self.final_temperature {
            if !(t > 0.0 && t.is_finite()) {
                return bad("final temperature must be positive");
            }
            if let Temperature::Fixed(t0) = self.initial {
                if t >= t0 {
                    return bad("final temperature must be below the initial temperature");
                }
            }
        }
        Ok(())
    }

    /// Resolve `(initial, final)` temperatures for `model`.
    pub fn temperatures(&self, model: &QuboModel) -> (f64, f64) {
        let t0 = match self.initial {
            Temperature::Fixed(t) => t,
            Temperature::Auto => {
                let m = model.linear().iter().fold(0.0f64, |m, l| m.max(l.abs()));
                if m > 0.0 {
                    m
                } else {
                    let q = model.quadratic().values().fold(0.0f64, |m, q| m.max(q.abs()));
                    if q > 0.0 {
                        q
                    } else {
                        1.0
                    }
                }
            }
        };
        let t1 = self.final_temperature.unwrap_or(1e-3 * t0).min(t0);
        (t0, t1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealOutcome {
    pub assignment: Vec<bool>,
    pub energy: f64,
    /// Best energy of each restart, in restart order.
    pub restart_energies: Vec<f64>,
}

/// Single-flip Metropolis annealing over `model`. Restarts run in parallel;
/// the lowest-energy restart wins, earliest restart on ties.
pub fn anneal(
    model: &QuboModel,
    schedule: &AnnealSchedule,
    deadline: Option<Instant>,
) -> Result<AnnealOutcome> {
    schedule.validate()?;
    let (t0, t1) = schedule.temperatures(model);
    let runs: Vec<(Vec<bool>, f64)> = (0..schedule.restarts)
        .into_par_iter()
        .map(|r| {
            let seed = schedule.seed.wrapping_add(r as u64);
            run_restart(model, t0, t1, schedule.sweeps, seed, deadline)
        })
        .collect::<Result<_>>()?;

    let restart_energies: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let mut best = 0;
    for (r, &e) in restart_energies.iter().enumerate() {
        if e < restart_energies[best] {
            best = r;
        }
    }
    let (assignment, energy) = runs.into_iter().nth(best).expect("at least one restart");
    Ok(AnnealOutcome { assignment, energy, restart_energies })
}

struct State<'a> {
    model: &'a QuboModel,
    x: Vec<bool>,
    field: Vec<f64>,
    energy: f64,
}

impl<'a> State<'a> {
    fn new(model: &'a QuboModel, x: Vec<bool>) -> Result<Self> {
        let field = (0..model.num_vars()).map(|v| model.local_field(&x, v)).collect();
        let energy = model.energy(&x)?;
        Ok(Self { model, x, field, energy })
    }

    fn delta(&self, v: usize) -> f64 {
        if self.x[v] {
            -self.field[v]
        } else {
            self.field[v]
        }
    }

    fn flip(&mut self, v: usize, delta: f64) {
        let sign = if self.x[v] { -1.0 } else { 1.0 };
        self.x[v] = !self.x[v];
        self.energy += delta;
        for &(u, q) in self.model.neighbors(v) {
            self.field[u] += sign * q;
        }
    }
}

fn run_restart(
    model: &QuboModel,
    t0: f64,
    t1: f64,
    sweeps: usize,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<(Vec<bool>, f64)> {
    let n = model.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n == 0 {
        return Ok((Vec::new(), model.offset()));
    }
    let start: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut state = State::new(model, start)?;
    let mut best = state.x.clone();
    let mut best_energy = state.energy;

    let ratio = t1 / t0;
    for step in 0..sweeps {
        let t = if sweeps == 1 {
            t1
        } else {
            t0 * ratio.powf(step as f64 / (sweeps - 1) as f64)
        };
        for v in 0..n {
            let d = state.delta(v);
            if d <= 0.0 || rng.gen::<f64>() < (-d / t).exp() {
                state.flip(v, d);
            }
        }
        if state.energy < best_energy {
            best_energy = state.energy;
            best.clone_from(&state.x);
        }
        check_deadline(deadline)?;
    }

    // zero-temperature descent to the nearest local minimum
    loop {
        let mut improved = false;
        for v in 0..n {
            let d = state.delta(v);
            if d < -1e-12 {
                state.flip(v, d);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    if state.energy < best_energy {
        best = state.x;
    }
    let energy = model.energy(&best)?;
    Ok((best, energy))
}

/// Anneal a bare model. Objective and feasibility come from the triplet terms
/// and constraints the model was built from; no repair, no decoding.
pub fn simulated_annealing(model: &QuboModel, schedule: &AnnealSchedule) -> Result<SolveReport> {
    let start = Instant::now();
    let out = anneal(model, schedule, None)?;
    Ok(SolveReport {
        method: "sa".into(),
        objective: model.cost_part(&out.assignment)?,
        feasible: model.is_feasible(&out.assignment)?,
        energy: out.energy,
        assignment: out.assignment,
        tracks: None,
        wall_time: start.elapsed().as_secs_f64(),
        seed: Some(schedule.seed),
        raw: None,
    })
}

/// Anneal the penalty model of `instance`, repair the result if needed and
/// decode it. Segments outside [`Instance::usable_segments`] are held at
/// zero. The raw annealer figures are kept in `raw`.
pub fn anneal_instance(
    instance: &Instance,
    model: &QuboModel,
    schedule: &AnnealSchedule,
    deadline: Option<Instant>,
) -> Result<SolveReport> {
    let start = Instant::now();
    let usable = instance.usable_segments();
    let out = if usable.iter().all(|&u| u) {
        anneal(model, schedule, deadline)?
    } else {
        // segments no feasible assignment can use stay at zero
        let (reduced, kept) = model.restrict(&usable)?;
        let out = anneal(&reduced, schedule, deadline)?;
        let mut x = vec![false; model.num_vars()];
        for (i, &v) in kept.iter().enumerate() {
            x[v] = out.assignment[i];
        }
        AnnealOutcome { assignment: x, ..out }
    };
    let alpha = model.alpha();
    let raw_feasible = check_feasible(instance, &out.assignment).feasible;
    let raw = RawAnneal {
        energy: out.energy,
        objective: track_objective(instance, alpha, &out.assignment),
        feasible: raw_feasible,
        repaired: false,
    };
    let (assignment, raw) = if raw_feasible {
        (out.assignment, raw)
    } else {
        match repair(instance, &out.assignment) {
            Ok(fixed) => (fixed, RawAnneal { repaired: true, ..raw }),
            Err(Error::RepairFailed) => (out.assignment, raw),
            Err(e) => return Err(e),
        }
    };
    let feasible = check_feasible(instance, &assignment).feasible;
    Ok(SolveReport {
        method: "sa".into(),
        objective: track_objective(instance, alpha, &assignment),
        energy: model.energy(&assignment)?,
        feasible,
        tracks: if feasible { Some(decode_tracks(instance, &assignment)?) } else { None },
        assignment,
        wall_time: start.elapsed().as_secs_f64(),
        seed: Some(schedule.seed),
        raw: Some(raw),
    })
}
