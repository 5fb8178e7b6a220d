//! Hits, segments, triplets and the angle/length cost that scores a pair of
//! consecutive segments.
//!
//! Coordinates are micrometers. A triplet `(i, j, k)` is scored by
//! `-cos(beta) / (d_ij + d_jk)` where `beta` is the turning angle between the
//! direction `j - i` and the direction `k - j`, so a straight continuation has
//! `cos(beta) = 1` and the most negative cost for given lengths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 3];

/// A detector measurement. `id` is the 0-based position in the ordered hit
/// list; layers are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub id: usize,
    pub layer: usize,
    pub position: Point,
}

impl Hit {
    pub fn new(id: usize, layer: usize, position: Point) -> Self {
        Self { id, layer, position }
    }

    /// Hits read from tuple-only files carry no coordinates.
    pub fn has_position(&self) -> bool {
        self.position.iter().all(|c| c.is_finite())
    }
}

/// A directed candidate segment between hits on two different layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub from: usize,
    pub to: usize,
    /// Euclidean length; NaN when the endpoints carry no coordinates.
    pub length: f64,
}

/// Two consecutive segments `(i, j)` and `(j, k)` sharing the middle hit `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triplet {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// Ordinal of segment `(i, j)` in the instance's segment list.
    pub first: usize,
    /// Ordinal of segment `(j, k)`.
    pub second: usize,
    pub cos_beta: f64,
    pub cost: f64,
}

fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

/// Euclidean distance between two hits.
pub fn segment_length(a: &Hit, b: &Hit) -> Result<f64> {
    let d = norm(&sub(&b.position, &a.position));
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::DegenerateSegment { from: a.id, to: b.id })
    }
}

/// Cosine of the turning angle at `j`, clamped to `[-1, 1]`.
pub fn cos_beta(i: &Hit, j: &Hit, k: &Hit) -> Result<f64> {
    let u = sub(&j.position, &i.position);
    let v = sub(&k.position, &j.position);
    let (nu, nv) = (norm(&u), norm(&v));
    if !(nu > 0.0) {
        return Err(Error::DegenerateSegment { from: i.id, to: j.id });
    }
    if !(nv > 0.0) {
        return Err(Error::DegenerateSegment { from: j.id, to: k.id });
    }
    Ok((dot(&u, &v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Cost of the cosine/length pair alone; shared by [`triplet_cost`] and the
/// file reader, which only knows the lengths.
pub fn cost_from_parts(cos_beta: f64, first_length: f64, second_length: f64) -> f64 {
    -cos_beta / (first_length + second_length)
}

/// `-cos(beta_ijk) / (d_ij + d_jk)`.
pub fn triplet_cost(i: &Hit, j: &Hit, k: &Hit) -> Result<f64> {
    let c = cos_beta(i, j, k)?;
    Ok(cost_from_parts(
        c,
        segment_length(i, j)?,
        segment_length(j, k)?,
    ))
}

/// Angle in radians between the segment `a -> b` and the layer axis (`z`).
pub(crate) fn axis_angle(a: &Hit, b: &Hit) -> f64 {
    let d = sub(&b.position, &a.position);
    let n = norm(&d);
    if n > 0.0 {
        (d[2] / n).clamp(-1.0, 1.0).acos()
    } else {
        0.0
    }
}
