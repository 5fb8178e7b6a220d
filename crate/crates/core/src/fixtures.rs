//! Small hand-built instances with complete adjacent-layer candidate sets.
//! Used by tests, examples and the Python smoke test.

use crate::geometry::{Hit, Point};
use crate::instance::{Instance, TripletSpec};

/// Instance whose hits are `layers[l]` on layer `l + 1`, with every
/// adjacent-layer segment and every triplet as candidates. `truth`, when
/// given, lists for each track the index of its hit within each layer.
pub fn complete(layers: &[Vec<Point>], truth: Option<&[Vec<usize>]>) -> Instance {
    let mut hits = Vec::new();
    let mut ids = Vec::with_capacity(layers.len());
    for (l, points) in layers.iter().enumerate() {
        let mut row = Vec::with_capacity(points.len());
        for p in points {
            row.push(hits.len());
            hits.push(Hit::new(hits.len(), l + 1, *p));
        }
        ids.push(row);
    }
    let mut segments = Vec::new();
    for w in ids.windows(2) {
        for &a in &w[0] {
            for &b in &w[1] {
                segments.push((a, b));
            }
        }
    }
    let mut triplets = Vec::new();
    for w in ids.windows(3) {
        for &j in &w[1] {
            for &i in &w[0] {
                for &k in &w[2] {
                    triplets.push(TripletSpec::new(i, j, k));
                }
            }
        }
    }
    let truth = truth.map(|tracks| {
        tracks
            .iter()
            .map(|t| t.iter().enumerate().map(|(l, &idx)| ids[l][idx]).collect())
            .collect()
    });
    Instance::new(layers.len(), hits, segments, triplets, truth).expect("fixture is valid")
}

/// `n_tracks` straight tracks parallel to the layer axis, `pitch` apart,
/// crossing layers spaced by `spacing`.
pub fn parallel_tracks(n_tracks: usize, n_layers: usize, spacing: f64, pitch: f64) -> Instance {
    let layers: Vec<Vec<Point>> = (0..n_layers)
        .map(|l| {
            (0..n_tracks)
                .map(|t| [t as f64 * pitch, 0.0, (l + 1) as f64 * spacing])
                .collect()
        })
        .collect();
    let truth: Vec<Vec<usize>> = (0..n_tracks).map(|t| vec![t; n_layers]).collect();
    complete(&layers, Some(&truth))
}

/// Tightly packed, slightly wobbling tracks: every adjacent-layer pair is a
/// candidate and many crossings look almost as good as the truth.
pub fn crossing_grid(n_tracks: usize, n_layers: usize) -> Instance {
    let layers: Vec<Vec<Point>> = (0..n_layers)
        .map(|l| {
            (0..n_tracks)
                .map(|t| {
                    let wobble = if (t + l) % 2 == 0 { 6.0 } else { -6.0 };
                    [t as f64 * 20.0 + wobble, 0.5 * t as f64, (l + 1) as f64 * 100.0]
                })
                .collect()
        })
        .collect();
    let truth: Vec<Vec<usize>> = (0..n_tracks).map(|t| vec![t; n_layers]).collect();
    complete(&layers, Some(&truth))
}
