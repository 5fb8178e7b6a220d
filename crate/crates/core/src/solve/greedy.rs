use std::time::Instant;

use crate::error::Result;
use crate::formulation::{check_feasible, check_weight, track_objective};
use crate::instance::Instance;

use super::{decode_tracks, SolveReport};

/// Grow one track from every first-layer hit, one layer at a time. Each
/// track in turn takes the free next-layer hit with the cheapest triplet
/// through its current end; the first step takes the shortest segment.
/// Ties go to the lowest segment ordinal. A track with no free candidate
/// stops, leaving the result infeasible.
pub fn greedy_baseline(instance: &Instance, alpha: f64) -> Result<SolveReport> {
    let start = Instant::now();
    check_weight("alpha", alpha)?;
    let hits = instance.hits();
    let mut taken = vec![false; instance.num_hits()];
    let mut assignment = vec![false; instance.segments().len()];
    // (last hit, segment into it)
    let mut ends: Vec<Option<(usize, Option<usize>)>> = hits
        .iter()
        .filter(|h| h.layer == 1)
        .map(|h| Some((h.id, None)))
        .collect();

    for _ in 1..instance.num_layers() {
        for end in ends.iter_mut() {
            let Some((last, into)) = *end else { continue };
            let mut pick: Option<(f64, usize)> = None;
            for &s in instance.out_segments(last) {
                let seg = &instance.segments()[s];
                if taken[seg.to] || hits[seg.to].layer != hits[last].layer + 1 {
                    continue;
                }
                let score = match into {
                    Some(e) => instance.triplet_for(e, s).map_or(0.0, |t| alpha * t.cost),
                    None => seg.length,
                };
                if pick.is_none_or(|(b, _)| score < b) {
                    pick = Some((score, s));
                }
            }
            *end = pick.map(|(_, s)| {
                let to = instance.segments()[s].to;
                taken[to] = true;
                assignment[s] = true;
                (to, Some(s))
            });
        }
    }

    let feasible = check_feasible(instance, &assignment).feasible;
    let objective = track_objective(instance, alpha, &assignment);
    Ok(SolveReport {
        method: "greedy".into(),
        tracks: if feasible { Some(decode_tracks(instance, &assignment)?) } else { None },
        assignment,
        objective,
        energy: objective,
        feasible,
        wall_time: start.elapsed().as_secs_f64(),
        seed: None,
        raw: None,
    })
}
