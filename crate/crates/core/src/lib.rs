//! Track finding as combinatorial optimisation.
//!
//! Hits on layered detectors are joined by candidate segments; consecutive
//! segment pairs (triplets) carry a cost that rewards straight, short
//! continuations. Choosing one incoming and one outgoing segment per hit so
//! as to minimise total triplet cost reconstructs the tracks.
//!
//! * [`formulation`] builds the constrained, penalty and linearised models.
//! * [`solve`] has simulated annealing, an exact search and a greedy baseline.
//! * [`generate`] and [`io`] produce and persist instances.
//! * [`bench`] runs the methods over a suite and reports gaps and times.

pub mod bench;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod formulation;
pub mod generate;
pub mod geometry;
pub mod instance;
pub mod io;
pub mod solve;

pub use error::{Error, Result};
pub use geometry::{cos_beta, segment_length, triplet_cost, Hit, Point, Segment, Triplet};
pub use instance::{Instance, TripletSpec};
