mod common;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trackfind::bench::gap;
use trackfind::fixtures;
use trackfind::formulation::{build_blp, build_qcbm, build_qubm, check_feasible};
use trackfind::generate::{generate_event, GeneratorConfig};
use trackfind::solve::{
    anneal_instance, decode_tracks, exact_search, exact_search_with, simulated_annealing, AnnealSchedule,
    ExactOptions,
};
use trackfind::{triplet_cost, Hit, Point};

fn point() -> impl Strategy<Value = Point> {
    [-1e3f64..1e3, -1e3f64..1e3, -1e3f64..1e3]
}

fn hits(p: [Point; 3]) -> [Hit; 3] {
    [Hit::new(0, 1, p[0]), Hit::new(1, 2, p[1]), Hit::new(2, 3, p[2])]
}

fn shift(p: Point, by: Point) -> Point {
    [p[0] + by[0], p[1] + by[1], p[2] + by[2]]
}

fn far_enough(p: &[Point; 3]) -> bool {
    let d = |a: Point, b: Point| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    d(p[0], p[1]) > 1e-3 && d(p[1], p[2]) > 1e-3
}

proptest! {
    #[test]
    fn cost_is_translation_invariant(p in [point(), point(), point()], by in point()) {
        prop_assume!(far_enough(&p));
        let [a, b, c] = hits(p);
        let [a2, b2, c2] = hits([shift(p[0], by), shift(p[1], by), shift(p[2], by)]);
        let c1 = triplet_cost(&a, &b, &c).unwrap();
        let c2 = triplet_cost(&a2, &b2, &c2).unwrap();
        prop_assert!((c1 - c2).abs() <= 1e-9 * c1.abs().max(1e-6));
    }

    #[test]
    fn cost_scales_inversely(p in [point(), point(), point()], s in 0.01f64..100.0) {
        prop_assume!(far_enough(&p));
        let scale = |q: Point| [q[0] * s, q[1] * s, q[2] * s];
        let [a, b, c] = hits(p);
        let [a2, b2, c2] = hits([scale(p[0]), scale(p[1]), scale(p[2])]);
        let c1 = triplet_cost(&a, &b, &c).unwrap();
        let c2 = triplet_cost(&a2, &b2, &c2).unwrap();
        prop_assert!((c2 - c1 / s).abs() <= 1e-9 * (c1 / s).abs().max(1e-9));
    }

    #[test]
    fn cost_sign_follows_turn(p in [point(), point(), point()]) {
        prop_assume!(far_enough(&p));
        let [a, b, c] = hits(p);
        let cos = trackfind::cos_beta(&a, &b, &c).unwrap();
        let cost = triplet_cost(&a, &b, &c).unwrap();
        prop_assert!((-1.0..=1.0).contains(&cos));
        if cos > 0.0 {
            prop_assert!(cost < 0.0);
        } else if cos < 0.0 {
            prop_assert!(cost > 0.0);
        }
    }

    #[test]
    fn gap_sign_matches_difference(reference in -1e4f64..-1e-3, computed in -1e4f64..1e4) {
        let g = gap(computed, reference).unwrap();
        prop_assert_eq!(gap(reference, reference).unwrap(), 0.0);
        prop_assert_eq!(g > 0.0, computed > reference);
        prop_assert_eq!(g < 0.0, computed < reference);
    }

    #[test]
    fn models_agree_on_tiny_instances(seed in any::<u64>(), alpha in 0.5f64..200.0, gamma in 0.5f64..5.0) {
        let inst = common::tiny_instance(seed, 10);
        let q = build_qubm(&inst, alpha, gamma).unwrap();
        let c = build_qcbm(&inst, alpha).unwrap();
        let l = build_blp(&inst, alpha).unwrap();
        for x in common::all_assignments(q.num_vars()) {
            let pen = q.penalty_part(&x).unwrap();
            let feasible = c.is_feasible(&x).unwrap();
            prop_assert!(pen >= -1e-12);
            prop_assert_eq!(pen.abs() < 1e-12, feasible);
            prop_assert_eq!(check_feasible(&inst, &x).feasible, feasible);
            let obj = c.objective(&x).unwrap();
            let z = l.products_of(&x).unwrap();
            prop_assert_eq!(l.objective_value(&z).unwrap(), obj);
            if feasible {
                prop_assert!((q.energy(&x).unwrap() - obj).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn incremental_delta_matches_reevaluation() {
    let inst = common::noisy_tracks(3, 4, 5);
    let q = build_qubm(&inst, 100.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut x: Vec<bool> = (0..q.num_vars()).map(|_| rng.gen()).collect();
    let mut e = q.energy(&x).unwrap();
    for _ in 0..1000 {
        let v = rng.gen_range(0..q.num_vars());
        let d = q.flip_delta(&x, v);
        x[v] = !x[v];
        e += d;
        assert_relative_eq!(e, q.energy(&x).unwrap(), epsilon = 1e-9);
    }
}

#[test]
fn truth_round_trips_through_assignment() {
    for seed in 0..20 {
        let inst = generate_event(&GeneratorConfig::new(6, seed)).unwrap();
        let x = inst.truth_assignment().unwrap();
        assert!(check_feasible(&inst, &x).feasible);
        let tracks = decode_tracks(&inst, &x).unwrap();
        assert_eq!(tracks, inst.truth().unwrap());
        assert_eq!(inst.encode_tracks(&tracks).unwrap(), x);
    }
}

#[test]
fn annealing_is_deterministic_per_seed() {
    let inst = fixtures::crossing_grid(4, 5);
    let q = build_qubm(&inst, 100.0, 1.0).unwrap();
    let a = simulated_annealing(&q, &AnnealSchedule::with_seed(9)).unwrap();
    let b = simulated_annealing(&q, &AnnealSchedule::with_seed(9)).unwrap();
    assert_eq!(a.assignment, b.assignment);
    assert_eq!(a.energy, b.energy);
    let r1 = anneal_instance(&inst, &q, &AnnealSchedule::with_seed(9), None).unwrap();
    let r2 = anneal_instance(&inst, &q, &AnnealSchedule::with_seed(9), None).unwrap();
    assert_eq!(r1.assignment, r2.assignment);
}

#[test]
fn scaling_positions_keeps_the_exact_argmin() {
    for seed in 0..10 {
        let base = common::noisy_tracks(seed, 3, 4);
        let layers = |s: f64| -> Vec<Vec<Point>> {
            (1..=base.num_layers())
                .map(|l| {
                    base.hits()
                        .iter()
                        .filter(|h| h.layer == l)
                        .map(|h| [h.position[0] * s, h.position[1] * s, h.position[2] * s])
                        .collect()
                })
                .collect()
        };
        let a = exact_search(&fixtures::complete(&layers(1.0), None), 100.0).unwrap();
        let b = exact_search(&fixtures::complete(&layers(7.5), None), 100.0).unwrap();
        assert_eq!(a.assignment, b.assignment);
        assert_relative_eq!(b.objective, a.objective / 7.5, max_relative = 1e-9);
    }
}

#[test]
fn pruning_never_changes_the_optimum() {
    for seed in 0..15 {
        let inst = common::noisy_tracks(100 + seed, 3, 4);
        let on = exact_search(&inst, 100.0).unwrap();
        let off = exact_search_with(&inst, 100.0, &ExactOptions { prune: false, ..Default::default() }).unwrap();
        assert_eq!(on.assignment, off.assignment);
        assert_eq!(on.objective, off.objective);
    }
}

/// Regression guard: on small generated events the default schedule finds
/// the optimum almost always.
#[test]
fn annealing_finds_small_optima() {
    let mut found = 0;
    for seed in 0..100u64 {
        let mut config = GeneratorConfig::new(2 + (seed % 3) as usize, seed);
        config.num_layers = 4;
        let inst = generate_event(&config).unwrap();
        let best = exact_search(&inst, 100.0).unwrap();
        let q = build_qubm(&inst, 100.0, 1.0).unwrap();
        let r = anneal_instance(&inst, &q, &AnnealSchedule::with_seed(seed), None).unwrap();
        if r.feasible && (r.objective - best.objective).abs() <= 1e-9 * best.objective.abs().max(1.0) {
            found += 1;
        }
    }
    assert!(found >= 95, "optimum reached in {found}/100 runs");
}
