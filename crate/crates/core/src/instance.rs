//! The validated problem instance: hits, candidate segments, scored triplets
//! and (optionally) the generating track partition.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{cos_beta, segment_length, triplet_cost, Hit, Segment, Triplet};

/// Segments may jump over at most two empty layers.
pub const MAX_LAYER_GAP: usize = 3;

/// A triplet as supplied to [`Instance::new`]. When `cost` is `None` it is
/// computed from hit geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletSpec {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub cost: Option<f64>,
}

impl TripletSpec {
    pub fn new(i: usize, j: usize, k: usize) -> Self {
        Self { i, j, k, cost: None }
    }

    pub fn with_cost(i: usize, j: usize, k: usize, cost: f64) -> Self {
        Self { i, j, k, cost: Some(cost) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    num_layers: usize,
    hits: Vec<Hit>,
    segments: Vec<Segment>,
    triplets: Vec<Triplet>,
    truth: Option<Vec<Vec<usize>>>,
    segment_index: HashMap<(usize, usize), usize>,
    triplet_index: HashMap<(usize, usize), usize>,
    out_segments: Vec<Vec<usize>>,
    in_segments: Vec<Vec<usize>>,
}

impl Instance {
    pub fn new(
        num_layers: usize,
        hits: Vec<Hit>,
        segments: Vec<(usize, usize)>,
        triplets: Vec<TripletSpec>,
        truth: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidInstance(msg));
        if num_layers == 0 {
            return invalid("at least one layer is required".into());
        }
        for (idx, h) in hits.iter().enumerate() {
            if h.id != idx {
                return invalid(format!("hit at position {idx} has id {}", h.id));
            }
            if h.layer == 0 || h.layer > num_layers {
                return invalid(format!("hit {idx} on layer {} outside 1..={num_layers}", h.layer));
            }
        }

        let n = hits.len();
        let mut segment_index = HashMap::with_capacity(segments.len());
        let mut out_segments = vec![Vec::new(); n];
        let mut in_segments = vec![Vec::new(); n];
        let mut built = Vec::with_capacity(segments.len());
        for (ord, &(from, to)) in segments.iter().enumerate() {
            if from >= n || to >= n {
                return invalid(format!("segment ({from}, {to}) references an unknown hit"));
            }
            let (a, b) = (&hits[from], &hits[to]);
            if a.layer >= b.layer || b.layer - a.layer > MAX_LAYER_GAP {
                return invalid(format!(
                    "segment ({from}, {to}) joins layers {} and {}",
                    a.layer, b.layer
                ));
            }
            if segment_index.insert((from, to), ord).is_some() {
                return invalid(format!("duplicate segment ({from}, {to})"));
            }
            let length = if a.has_position() && b.has_position() {
                segment_length(a, b)?
            } else {
                f64::NAN
            };
            out_segments[from].push(ord);
            in_segments[to].push(ord);
            built.push(Segment { from, to, length });
        }

        let mut triplet_index = HashMap::with_capacity(triplets.len());
        let mut scored = Vec::with_capacity(triplets.len());
        for spec in &triplets {
            let TripletSpec { i, j, k, cost } = *spec;
            let (Some(&first), Some(&second)) =
                (segment_index.get(&(i, j)), segment_index.get(&(j, k)))
            else {
                return invalid(format!("triplet ({i}, {j}, {k}) uses a missing segment"));
            };
            let located = hits[i].has_position() && hits[j].has_position() && hits[k].has_position();
            let cos = if located {
                cos_beta(&hits[i], &hits[j], &hits[k])?
            } else {
                f64::NAN
            };
            let cost = match cost {
                Some(c) => c,
                None if located => triplet_cost(&hits[i], &hits[j], &hits[k])?,
                None => return invalid(format!("triplet ({i}, {j}, {k}) has no cost and no geometry")),
            };
            if triplet_index.insert((first, second), scored.len()).is_some() {
                return invalid(format!("duplicate triplet ({i}, {j}, {k})"));
            }
            scored.push(Triplet { i, j, k, first, second, cos_beta: cos, cost });
        }

        if let Some(tracks) = &truth {
            let mut seen = vec![false; n];
            for track in tracks {
                if track.len() != num_layers {
                    return invalid(format!("truth track has {} hits for {num_layers} layers", track.len()));
                }
                for (pos, &h) in track.iter().enumerate() {
                    if h >= n {
                        return invalid(format!("truth references unknown hit {h}"));
                    }
                    if hits[h].layer != pos + 1 {
                        return invalid(format!("truth hit {h} is not on layer {}", pos + 1));
                    }
                    if std::mem::replace(&mut seen[h], true) {
                        return invalid(format!("hit {h} appears in two truth tracks"));
                    }
                }
            }
            if let Some(missing) = seen.iter().position(|s| !s) {
                return invalid(format!("hit {missing} is on no truth track"));
            }
        }

        Ok(Self {
            num_layers,
            hits,
            segments: built,
            triplets: scored,
            truth,
            segment_index,
            triplet_index,
            out_segments,
            in_segments,
        })
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    pub fn hits(&self) -> &[Hit] {
        &self.hits
    }

    pub fn num_hits(&self) -> usize {
        self.hits.len()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    pub fn truth(&self) -> Option<&[Vec<usize>]> {
        self.truth.as_deref()
    }

    pub fn segment_ordinal(&self, from: usize, to: usize) -> Option<usize> {
        self.segment_index.get(&(from, to)).copied()
    }

    /// Triplet joining two segment ordinals, if it is a candidate.
    pub fn triplet_for(&self, first: usize, second: usize) -> Option<&Triplet> {
        self.triplet_index.get(&(first, second)).map(|&t| &self.triplets[t])
    }

    pub fn out_segments(&self, hit: usize) -> &[usize] {
        &self.out_segments[hit]
    }

    pub fn in_segments(&self, hit: usize) -> &[usize] {
        &self.in_segments[hit]
    }

    /// A hit must receive exactly one segment unless it sits on layer 1.
    pub fn must_receive(&self, hit: usize) -> bool {
        self.hits[hit].layer > 1
    }

    /// A hit must send exactly one segment unless it sits on the last layer.
    pub fn must_send(&self, hit: usize) -> bool {
        self.hits[hit].layer < self.num_layers
    }

    pub fn hits_per_layer(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_layers];
        for h in &self.hits {
            counts[h.layer - 1] += 1;
        }
        counts
    }

    /// Every layer holds the same number of hits. Feasible assignments of
    /// such instances only use segments between adjacent layers.
    pub fn has_equal_layers(&self) -> bool {
        let counts = self.hits_per_layer();
        counts.windows(2).all(|w| w[0] == w[1])
    }

    /// Segments that can appear in a feasible assignment as far as the layer
    /// counts tell: all of them, or only adjacent-layer ones when every layer
    /// holds the same number of hits.
    pub fn usable_segments(&self) -> Vec<bool> {
        let adjacent_only = self.has_equal_layers();
        self.segments
            .iter()
            .map(|s| !adjacent_only || self.hits[s.to].layer == self.hits[s.from].layer + 1)
            .collect()
    }

    /// Fails when some hit has no candidate for a mandatory in- or out-segment.
    pub fn check_structure(&self) -> Result<()> {
        for h in 0..self.hits.len() {
            if self.must_receive(h) && self.in_segments[h].is_empty() {
                return Err(Error::StructurallyInfeasible(format!(
                    "hit {} has no incoming candidate",
                    h + 1
                )));
            }
            if self.must_send(h) && self.out_segments[h].is_empty() {
                return Err(Error::StructurallyInfeasible(format!(
                    "hit {} has no outgoing candidate",
                    h + 1
                )));
            }
        }
        Ok(())
    }

    /// Sum of the triplet costs along every truth track, taken from geometry.
    pub fn true_cost(&self) -> Result<f64> {
        let tracks = self.truth.as_ref().ok_or(Error::NoGroundTruth)?;
        let mut total = 0.0;
        for track in tracks {
            for w in track.windows(3) {
                total += triplet_cost(&self.hits[w[0]], &self.hits[w[1]], &self.hits[w[2]])?;
            }
        }
        Ok(total)
    }

    /// Bit-vector selecting exactly the segments along `tracks`.
    pub fn encode_tracks(&self, tracks: &[Vec<usize>]) -> Result<Vec<bool>> {
        let mut x = vec![false; self.segments.len()];
        for track in tracks {
            for w in track.windows(2) {
                let s = self.segment_ordinal(w[0], w[1]).ok_or_else(|| {
                    Error::InvalidInstance(format!("({}, {}) is not a candidate segment", w[0], w[1]))
                })?;
                x[s] = true;
            }
        }
        Ok(x)
    }

    /// Truth tracks as an assignment, when every truth step is a candidate.
    pub fn truth_assignment(&self) -> Result<Vec<bool>> {
        let tracks = self.truth.as_ref().ok_or(Error::NoGroundTruth)?;
        self.encode_tracks(tracks)
    }
}
