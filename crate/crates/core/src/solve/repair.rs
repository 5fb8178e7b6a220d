use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::formulation::check_feasible;
use crate::instance::Instance;

/// Turn an arbitrary assignment into a feasible one.
///
/// Hits with too many selected segments keep the one with the cheapest
/// triplets against the current selection; hits with none then take the
/// cheapest segment to a hit that still lacks an incoming one. Whatever is
/// left is completed by augmenting paths over the sender/receiver bipartite
/// graph, which succeeds whenever any completion exists.
pub fn repair(instance: &Instance, x: &[bool]) -> Result<Vec<bool>> {
    let mut x = x.to_vec();
    if x.len() != instance.segments().len() {
        return Err(Error::Dimension { expected: instance.segments().len(), actual: x.len() });
    }
    if check_feasible(instance, &x).feasible {
        return Ok(x);
    }
    let n = instance.num_hits();
    let segs = instance.segments();

    for h in 0..n {
        trim(instance, &mut x, instance.out_segments(h));
    }
    for h in 0..n {
        trim(instance, &mut x, instance.in_segments(h));
    }

    let mut order: Vec<usize> = (0..n).filter(|&h| instance.must_send(h)).collect();
    order.sort_by_key(|&h| (instance.hits()[h].layer, h));
    let mut has_in: Vec<bool> = (0..n).map(|h| instance.in_segments(h).iter().any(|&s| x[s])).collect();
    for &h in &order {
        if instance.out_segments(h).iter().any(|&s| x[s]) {
            continue;
        }
        let pick = cheapest(
            instance,
            &x,
            instance
                .out_segments(h)
                .iter()
                .copied()
                .filter(|&s| !has_in[segs[s].to] && instance.must_receive(segs[s].to)),
        );
        if let Some(s) = pick {
            x[s] = true;
            has_in[segs[s].to] = true;
        }
    }

    if !check_feasible(instance, &x).feasible {
        augment(instance, &mut x);
    }
    if check_feasible(instance, &x).feasible {
        Ok(x)
    } else {
        Err(Error::RepairFailed)
    }
}

/// Triplet cost a segment contributes next to the current selection.
fn local_score(instance: &Instance, x: &[bool], s: usize) -> f64 {
    let seg = &instance.segments()[s];
    let before: f64 = instance
        .in_segments(seg.from)
        .iter()
        .filter(|&&e| x[e])
        .filter_map(|&e| instance.triplet_for(e, s))
        .map(|t| t.cost)
        .sum();
    let after: f64 = instance
        .out_segments(seg.to)
        .iter()
        .filter(|&&f| x[f])
        .filter_map(|&f| instance.triplet_for(s, f))
        .map(|t| t.cost)
        .sum();
    before + after
}

fn cheapest(instance: &Instance, x: &[bool], candidates: impl Iterator<Item = usize>) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for s in candidates {
        let score = local_score(instance, x, s);
        if best.is_none_or(|(b, _)| score < b) {
            best = Some((score, s));
        }
    }
    best.map(|(_, s)| s)
}

fn trim(instance: &Instance, x: &mut [bool], group: &[usize]) {
    let selected: Vec<usize> = group.iter().copied().filter(|&s| x[s]).collect();
    if selected.len() <= 1 {
        return;
    }
    let keep = cheapest(instance, x, selected.iter().copied()).expect("non-empty");
    for s in selected {
        x[s] = s == keep;
    }
}

/// Grow the sender/receiver matching held in `x` along shortest augmenting
/// paths.
fn augment(instance: &Instance, x: &mut [bool]) {
    let n = instance.num_hits();
    let segs = instance.segments();
    // receiver -> segment matched into it
    let mut matched_in: Vec<Option<usize>> = vec![None; n];
    let mut matched_out: Vec<Option<usize>> = vec![None; n];
    for (s, seg) in segs.iter().enumerate() {
        if x[s] {
            matched_in[seg.to] = Some(s);
            matched_out[seg.from] = Some(s);
        }
    }
    for root in 0..n {
        if !instance.must_send(root) || matched_out[root].is_some() {
            continue;
        }
        // BFS over senders; parent[sender] = segment used to reach it
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut end = None;
        'bfs: while let Some(a) = queue.pop_front() {
            for &s in instance.out_segments(a) {
                let b = segs[s].to;
                if !instance.must_receive(b) || matched_in[b] == Some(s) {
                    continue;
                }
                match matched_in[b] {
                    None => {
                        end = Some(s);
                        break 'bfs;
                    }
                    Some(m) => {
                        let a2 = segs[m].from;
                        if !seen[a2] {
                            seen[a2] = true;
                            parent[a2] = Some(s);
                            queue.push_back(a2);
                        }
                    }
                }
            }
        }
        // flip the path back to the root
        let mut next = end;
        while let Some(s) = next {
            let (a, b) = (segs[s].from, segs[s].to);
            if let Some(old) = matched_in[b] {
                x[old] = false;
            }
            x[s] = true;
            matched_in[b] = Some(s);
            matched_out[a] = Some(s);
            next = if a == root { None } else { parent[a] };
        }
    }
}
