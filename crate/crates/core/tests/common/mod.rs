#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trackfind::fixtures;
use trackfind::{Instance, Point};

/// `n_tracks` noisy, roughly straight tracks over `n_layers` layers 100 apart,
/// every adjacent-layer segment a candidate.
pub fn noisy_tracks(seed: u64, n_tracks: usize, n_layers: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<(f64, f64, f64, f64)> = (0..n_tracks)
        .map(|_| (rng.gen_range(0.0..60.0), rng.gen_range(0.0..60.0), rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)))
        .collect();
    let layers: Vec<Vec<Point>> = (0..n_layers)
        .map(|l| {
            let z = 100.0 * (l + 1) as f64;
            starts
                .iter()
                .map(|&(x, y, tx, ty)| {
                    [x + tx * z + rng.gen_range(-8.0..8.0), y + ty * z + rng.gen_range(-8.0..8.0), z]
                })
                .collect()
        })
        .collect();
    let truth: Vec<Vec<usize>> = (0..n_tracks).map(|t| vec![t; n_layers]).collect();
    fixtures::complete(&layers, Some(&truth))
}

/// Random instance with at most `max_vars` segments and uneven layer counts.
pub fn tiny_instance(seed: u64, max_vars: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n_layers = rng.gen_range(3..=4);
        let counts: Vec<usize> = (0..n_layers).map(|_| rng.gen_range(1..=3)).collect();
        let vars: usize = counts.windows(2).map(|w| w[0] * w[1]).sum();
        if vars > max_vars {
            continue;
        }
        let layers: Vec<Vec<Point>> = counts
            .iter()
            .enumerate()
            .map(|(l, &c)| {
                (0..c)
                    .map(|_| [rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0), 100.0 * (l + 1) as f64])
                    .collect()
            })
            .collect();
        return fixtures::complete(&layers, None);
    }
}

/// Every assignment of `n` bits, as a vector.
pub fn all_assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |m| (0..n).map(|b| m >> b & 1 == 1).collect())
}

/// Random hits on 3 or 4 layers with a random forward subset of at most
/// `max_vars` segments (layer gaps up to 3) and every consecutive pair as a
/// triplet. Retried until some assignment is feasible.
pub fn sparse_instance(seed: u64, max_vars: usize) -> Instance {
    use trackfind::formulation::check_feasible;
    use trackfind::{Hit, TripletSpec};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n_layers = rng.gen_range(3..=4);
        let mut hits = Vec::new();
        for l in 1..=n_layers {
            for _ in 0..rng.gen_range(1..=3) {
                let p = [rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0), 100.0 * l as f64];
                hits.push(Hit::new(hits.len(), l, p));
            }
        }
        let mut all: Vec<(usize, usize)> = Vec::new();
        for a in &hits {
            for b in &hits {
                if b.layer > a.layer && b.layer - a.layer <= 3 {
                    all.push((a.id, b.id));
                }
            }
        }
        let mut segments: Vec<(usize, usize)> = all.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
        segments.truncate(max_vars);
        let mut triplets = Vec::new();
        for &(i, j) in &segments {
            for &(j2, k) in &segments {
                if j2 == j {
                    triplets.push(TripletSpec::new(i, j, k));
                }
            }
        }
        let Ok(inst) = Instance::new(n_layers, hits, segments, triplets, None) else { continue };
        let n = inst.segments().len();
        if n > 0 && all_assignments(n).any(|x| check_feasible(&inst, &x).feasible) {
            return inst;
        }
    }
}
