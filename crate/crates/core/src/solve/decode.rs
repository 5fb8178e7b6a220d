use crate::error::{Error, Result};
use crate::formulation::check_feasible;
use crate::instance::Instance;

/// Follow the selected out-segment from every first-layer hit. Tracks come
/// out ordered by their first hit.
pub fn decode_tracks(instance: &Instance, x: &[bool]) -> Result<Vec<Vec<usize>>> {
    if !check_feasible(instance, x).feasible {
        return Err(Error::DecodeInfeasible);
    }
    let next = |h: usize| {
        instance
            .out_segments(h)
            .iter()
            .find(|&&s| x[s])
            .map(|&s| instance.segments()[s].to)
    };
    let tracks = instance
        .hits()
        .iter()
        .filter(|h| h.layer == 1)
        .map(|start| {
            let mut track = vec![start.id];
            let mut cur = start.id;
            while let Some(n) = next(cur) {
                track.push(n);
                cur = n;
            }
            track
        })
        .collect();
    Ok(tracks)
}
