//! Exact minimisation of the constrained model by depth-first branch and
//! bound.
//!
//! Hits that must send a segment are visited in layer order and each picks
//! one outgoing segment to a hit that has not received one yet, so every
//! leaf is a set of tracks. Picking the out-segment of hit `j` fixes the
//! triplet through `j`, whose cost is added to the running total. A branch
//! is cut when the total plus the cheapest possible contribution of every
//! unvisited middle hit cannot beat the incumbent, or when some hit can no
//! longer receive a segment.
//!
//! The candidate graph is split into connected components first; they share
//! no variables, constraints or triplets, so their optima add up. When every
//! layer holds the same number of hits, segments that skip a layer can never
//! be selected (the skipped layer would be left short of incoming segments)
//! and are dropped before the split.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::formulation::{check_feasible, check_weight, track_objective};
use crate::instance::Instance;

use super::{check_deadline, decode_tracks, SolveReport};

pub const DEFAULT_EXACT_CAP: usize = 8;

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    /// Largest number of hits a component may hold on a single layer.
    pub max_hits_per_layer: usize,
    /// Disable to enumerate every matching; used to cross-check the bounds.
    pub prune: bool,
    pub deadline: Option<Instant>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            max_hits_per_layer: DEFAULT_EXACT_CAP,
            prune: true,
            deadline: None,
        }
    }
}

pub fn exact_search(instance: &Instance, alpha: f64) -> Result<SolveReport> {
    exact_search_with(instance, alpha, &ExactOptions::default())
}

pub fn exact_search_with(instance: &Instance, alpha: f64, options: &ExactOptions) -> Result<SolveReport> {
    let start = Instant::now();
    check_weight("alpha", alpha)?;
    instance.check_structure()?;

    let n = instance.num_hits();
    let usable = instance.usable_segments();

    for h in 0..n {
        let has_in = instance.in_segments(h).iter().any(|&s| usable[s]);
        if instance.must_receive(h) && !has_in {
            return Err(Error::Infeasible);
        }
    }

    let components = components(instance, &usable);
    let mut assignment = vec![false; instance.segments().len()];
    for hits in &components {
        let mut per_layer = vec![0; instance.num_layers()];
        for &h in hits {
            per_layer[instance.hits()[h].layer - 1] += 1;
        }
        let widest = per_layer.iter().copied().max().unwrap_or(0);
        if widest > options.max_hits_per_layer {
            return Err(Error::TooLarge { hits: widest, cap: options.max_hits_per_layer });
        }
        let chosen = Search::new(instance, alpha, &usable, hits, options).run()?;
        for s in chosen {
            assignment[s] = true;
        }
    }

    let report = check_feasible(instance, &assignment);
    debug_assert!(report.feasible);
    let objective = track_objective(instance, alpha, &assignment);
    Ok(SolveReport {
        method: "exact".into(),
        tracks: Some(decode_tracks(instance, &assignment)?),
        assignment,
        objective,
        energy: objective,
        feasible: report.feasible,
        wall_time: start.elapsed().as_secs_f64(),
        seed: None,
        raw: None,
    })
}

/// Hit sets of the connected components of the usable-segment graph, each
/// sorted by `(layer, id)`, ordered by their first hit id.
fn components(instance: &Instance, usable: &[bool]) -> Vec<Vec<usize>> {
    let n = instance.num_hits();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for (s, seg) in instance.segments().iter().enumerate() {
        if usable[s] {
            let (a, b) = (find(&mut parent, seg.from), find(&mut parent, seg.to));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for h in 0..n {
        let root = find(&mut parent, h);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(h);
    }
    for g in &mut groups {
        g.sort_by_key(|&h| (instance.hits()[h].layer, h));
    }
    groups
}

struct Search<'a> {
    instance: &'a Instance,
    alpha: f64,
    prune: bool,
    deadline: Option<Instant>,
    /// Hits that must send, in visiting order.
    senders: Vec<usize>,
    /// Usable `(segment, target)` choices per sender, by segment ordinal.
    options: Vec<Vec<(usize, usize)>>,
    /// Hits of the component that must receive.
    receivers: Vec<usize>,
    /// `suffix_bound[p]`: cheapest total the senders from `p` on can add.
    suffix_bound: Vec<f64>,
    incoming: Vec<Option<usize>>,
    /// Unvisited senders that could still supply each hit.
    supply: Vec<usize>,
    current: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(instance: &'a Instance, alpha: f64, usable: &[bool], hits: &[usize], options: &ExactOptions) -> Self {
        let n = instance.num_hits();
        let senders: Vec<usize> = hits.iter().copied().filter(|&h| instance.must_send(h)).collect();
        let receivers = hits.iter().copied().filter(|&h| instance.must_receive(h)).collect();
        let choices: Vec<Vec<(usize, usize)>> = senders
            .iter()
            .map(|&h| {
                instance
                    .out_segments(h)
                    .iter()
                    .filter(|&&s| usable[s])
                    .map(|&s| (s, instance.segments()[s].to))
                    .collect()
            })
            .collect();

        let mut supply = vec![0; n];
        for opts in &choices {
            for &(_, t) in opts {
                supply[t] += 1;
            }
        }

        // cheapest triplet through each middle hit; a hit may also end up
        // with no candidate triplet, which contributes nothing
        let mut cheapest = vec![0.0f64; n];
        for t in instance.triplets() {
            if usable[t.first] && usable[t.second] {
                cheapest[t.j] = cheapest[t.j].min(alpha * t.cost);
            }
        }
        let mut suffix_bound = vec![0.0; senders.len() + 1];
        for p in (0..senders.len()).rev() {
            suffix_bound[p] = suffix_bound[p + 1] + cheapest[senders[p]];
        }

        Self {
            instance,
            alpha,
            prune: options.prune,
            deadline: options.deadline,
            options: choices,
            receivers,
            suffix_bound,
            incoming: vec![None; n],
            supply,
            current: Vec::with_capacity(senders.len()),
            senders,
            best: None,
            nodes: 0,
        }
    }

    fn run(mut self) -> Result<Vec<usize>> {
        self.descend(0, 0.0)?;
        self.best.map(|(_, segs)| segs).ok_or(Error::Infeasible)
    }

    fn beaten(&self, lower_bound: f64) -> bool {
        match &self.best {
            Some((best, _)) => lower_bound > best + 1e-9 * best.abs().max(1.0),
            None => false,
        }
    }

    fn descend(&mut self, pos: usize, partial: f64) -> Result<()> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) {
            check_deadline(self.deadline)?;
        }
        if pos == self.senders.len() {
            if self.receivers.iter().all(|&h| self.incoming[h].is_some())
                && self.best.as_ref().is_none_or(|(b, _)| partial < *b)
            {
                self.best = Some((partial, self.current.clone()));
            }
            return Ok(());
        }

        let hit = self.senders[pos];
        let into = self.incoming[hit];
        if self.prune && self.instance.must_receive(hit) && into.is_none() {
            return Ok(());
        }
        for &(_, t) in &self.options[pos] {
            self.supply[t] -= 1;
        }

        for c in 0..self.options[pos].len() {
            let (seg, target) = self.options[pos][c];
            if self.incoming[target].is_some() {
                continue;
            }
            let gain = into
                .and_then(|e| self.instance.triplet_for(e, seg))
                .map_or(0.0, |t| self.alpha * t.cost);
            let total = partial + gain;
            if self.prune {
                if self.beaten(total + self.suffix_bound[pos + 1]) {
                    continue;
                }
                let stranded = self.options[pos].iter().any(|&(_, t)| {
                    t != target
                        && self.supply[t] == 0
                        && self.incoming[t].is_none()
                        && self.instance.must_receive(t)
                });
                if stranded {
                    continue;
                }
            }
            self.incoming[target] = Some(seg);
            self.current.push(seg);
            let r = self.descend(pos + 1, total);
            self.current.pop();
            self.incoming[target] = None;
            if let Err(e) = r {
                for &(_, t) in &self.options[pos] {
                    self.supply[t] += 1;
                }
                return Err(e);
            }
        }

        for &(_, t) in &self.options[pos] {
            self.supply[t] += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formulation::build_qcbm;

    /// Minimum of the constrained objective over all 2^m assignments.
    fn brute_force(inst: &Instance, alpha: f64) -> (f64, Vec<bool>) {
        let m = build_qcbm(inst, alpha).unwrap();
        let n = m.num_vars;
        assert!(n <= 20);
        let mut best: Option<(f64, Vec<bool>)> = None;
        for bits in 0u32..(1 << n) {
            let x: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
            if !m.is_feasible(&x).unwrap() {
                continue;
            }
            let o = m.objective(&x).unwrap();
            if best.as_ref().is_none_or(|(b, _)| o < *b - 1e-12) {
                best = Some((o, x));
            }
        }
        best.unwrap()
    }

    #[test]
    fn single_track() {
        let inst = fixtures::parallel_tracks(1, 5, 100.0, 0.0);
        let r = exact_search(&inst, 100.0).unwrap();
        assert!(r.feasible);
        assert!((r.objective - 100.0 * inst.true_cost().unwrap()).abs() < 1e-12);
        assert_eq!(r.tracks.as_deref(), inst.truth());
    }

    #[test]
    fn straight_tracks_beat_crossings() {
        let inst = fixtures::parallel_tracks(2, 4, 100.0, 30.0);
        let r = exact_search(&inst, 100.0).unwrap();
        let (best, x) = brute_force(&inst, 100.0);
        assert!((r.objective - best).abs() < 1e-12);
        assert_eq!(r.assignment, x);
        assert_eq!(r.tracks.as_deref(), inst.truth());
    }

    #[test]
    fn matches_brute_force_on_grid() {
        let inst = fixtures::crossing_grid(2, 5);
        let r = exact_search(&inst, 100.0).unwrap();
        let (best, _) = brute_force(&inst, 100.0);
        assert!((r.objective - best).abs() < 1e-12);
    }

    #[test]
    fn pruning_does_not_change_result() {
        let inst = fixtures::crossing_grid(4, 4);
        let on = exact_search(&inst, 100.0).unwrap();
        let off = exact_search_with(&inst, 100.0, &ExactOptions { prune: false, ..Default::default() }).unwrap();
        assert_eq!(on.objective, off.objective);
        assert_eq!(on.assignment, off.assignment);
    }

    #[test]
    fn cap_is_enforced() {
        let inst = fixtures::crossing_grid(3, 3);
        let opts = ExactOptions { max_hits_per_layer: 2, ..Default::default() };
        assert!(matches!(
            exact_search_with(&inst, 100.0, &opts),
            Err(Error::TooLarge { hits: 3, cap: 2 })
        ));
    }

    #[test]
    fn separate_components_are_solved_independently() {
        // far apart tracks only get their own segments
        let inst = fixtures::parallel_tracks(1, 4, 100.0, 0.0);
        let r = exact_search(&inst, 1.0).unwrap();
        assert_eq!(r.tracks.unwrap().len(), 1);
    }
}
