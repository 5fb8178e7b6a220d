//! Synthetic events: near-straight tracks crossing planar layers stacked
//! along `z`, one hit per track per layer, plus the segment and triplet
//! candidate filters.
//!
//! Straighter tracks stand in for high-momentum particles, so the per-layer
//! direction change (`curvature`) plays the role of a momentum cut.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{axis_angle, cos_beta, triplet_cost, Hit, Point};
use crate::instance::{Instance, TripletSpec};

/// Track-count ranges of the three benchmark scales (seven layers each).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Small,
    Medium,
    Large,
}

impl Preset {
    pub fn track_counts(self) -> Vec<usize> {
        match self {
            Preset::Small => (1..=10).map(|i| 10 * i).collect(),
            Preset::Medium => (0..10).map(|i| 125 + 25 * i).collect(),
            Preset::Large => (0..10).map(|i| 375 + 25 * i).collect(),
        }
    }

    pub fn draw(self, rng: &mut impl Rng) -> usize {
        let counts = self.track_counts();
        counts[rng.gen_range(0..counts.len())]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Number of layers a segment may jump over, 0 to 2.
    pub max_skip: usize,
    /// Largest turning angle (radians) admitted into a triplet.
    pub max_turning_angle: f64,
    /// Segments must advance along the layer axis.
    pub forward_only: bool,
    /// Largest angle (radians) between a segment and the layer axis; keeps
    /// segments pointing through the layer stack rather than across it.
    pub max_axis_angle: Option<f64>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            max_skip: 2,
            max_turning_angle: 0.35,
            forward_only: true,
            max_axis_angle: Some(0.35),
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_skip > 2 {
            return Err(Error::InvalidConfig(format!("max skip {} exceeds 2", self.max_skip)));
        }
        if !(self.max_turning_angle >= 0.0) {
            return Err(Error::InvalidConfig("max turning angle must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub num_tracks: usize,
    pub num_layers: usize,
    /// Distance between consecutive layer planes, micrometers.
    pub layer_spacing: f64,
    /// Largest direction change per layer, radians.
    pub curvature: f64,
    /// Half-width of the uniform transverse measurement error, micrometers.
    pub jitter: f64,
    /// Largest initial angle between a track and the layer axis, radians.
    pub max_polar_angle: f64,
    /// Transverse area of the first layer per track, square micrometers.
    pub area_per_track: f64,
    /// Closest two hits may lie on one layer, micrometers.
    pub min_separation: f64,
    pub seed: u64,
    pub preset: Option<Preset>,
    pub filter: FilterConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            num_tracks: 10,
            num_layers: 7,
            layer_spacing: 100.0,
            curvature: 0.05,
            jitter: 0.0,
            max_polar_angle: 0.05,
            area_per_track: 40_000.0,
            min_separation: 5.0,
            seed: 0,
            preset: None,
            filter: FilterConfig::default(),
        }
    }
}

const MAX_PLACEMENT_TRIES: usize = 1000;

impl GeneratorConfig {
    pub fn new(num_tracks: usize, seed: u64) -> Self {
        Self { num_tracks, seed, ..Self::default() }
    }

    /// Track count drawn from the preset's range with `seed`.
    pub fn from_preset(preset: Preset, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed0f_7261_636b);
        Self {
            num_tracks: preset.draw(&mut rng),
            seed,
            preset: Some(preset),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.num_tracks == 0 {
            return bad("at least one track is required".into());
        }
        if self.num_layers < 3 {
            return bad(format!("{} layers; at least 3 are required", self.num_layers));
        }
        if !(self.layer_spacing > 0.0) {
            return bad("layer spacing must be positive".into());
        }
        if !(self.curvature >= 0.0) || self.curvature >= PI / 2.0 {
            return bad("curvature must lie in [0, pi/2)".into());
        }
        if !(self.jitter >= 0.0) || !(self.min_separation >= 0.0) {
            return bad("jitter and separation must be non-negative".into());
        }
        if !(self.max_polar_angle >= 0.0) || self.max_polar_angle >= PI / 2.0 {
            return bad("polar angle must lie in [0, pi/2)".into());
        }
        if !(self.area_per_track > 0.0) {
            return bad("area per track must be positive".into());
        }
        self.filter.validate()
    }
}

fn normalize(v: Point) -> Point {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Tilt `d` by `angle` towards a random perpendicular direction.
fn tilt(d: Point, angle: f64, rng: &mut impl Rng) -> Point {
    let helper = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize(cross(d, helper));
    let e2 = cross(d, e1);
    let psi = rng.gen_range(0.0..2.0 * PI);
    let (s, c) = (angle.sin(), angle.cos());
    let w = [
        psi.cos() * e1[0] + psi.sin() * e2[0],
        psi.cos() * e1[1] + psi.sin() * e2[1],
        psi.cos() * e1[2] + psi.sin() * e2[2],
    ];
    normalize([c * d[0] + s * w[0], c * d[1] + s * w[1], c * d[2] + s * w[2]])
}

fn sample_track(config: &GeneratorConfig, width: f64, rng: &mut impl Rng) -> Option<Vec<Point>> {
    let spacing = config.layer_spacing;
    let mut p = [rng.gen_range(0.0..width), rng.gen_range(0.0..width), spacing];
    let theta = rng.gen_range(0.0..=config.max_polar_angle);
    let phi = rng.gen_range(0.0..2.0 * PI);
    let mut d = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let mut ideal = vec![p];
    for layer in 2..=config.num_layers {
        if layer > 2 && config.curvature > 0.0 {
            d = tilt(d, rng.gen_range(0.0..=config.curvature), rng);
        }
        if d[2] <= 1e-6 {
            return None;
        }
        let step = spacing / d[2];
        p = [p[0] + d[0] * step, p[1] + d[1] * step, layer as f64 * spacing];
        ideal.push(p);
    }
    if config.jitter > 0.0 {
        for q in &mut ideal {
            q[0] += rng.gen_range(-config.jitter..=config.jitter);
            q[1] += rng.gen_range(-config.jitter..=config.jitter);
        }
    }
    Some(ideal)
}

/// One event with truth. Tracks start uniformly over a square first-layer
/// patch sized by `area_per_track`; a track that lands too close to an
/// earlier one on any layer is redrawn.
pub fn generate_event(config: &GeneratorConfig) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let width = (config.num_tracks as f64 * config.area_per_track).sqrt();
    let min_sq = config.min_separation * config.min_separation;

    let mut tracks: Vec<Vec<Point>> = Vec::with_capacity(config.num_tracks);
    for t in 0..config.num_tracks {
        let placed = (0..MAX_PLACEMENT_TRIES).find_map(|_| {
            let cand = sample_track(config, width, &mut rng)?;
            let clear = tracks.iter().all(|other| {
                other.iter().zip(&cand).all(|(a, b)| {
                    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
                    dx * dx + dy * dy >= min_sq
                })
            });
            clear.then_some(cand)
        });
        match placed {
            Some(p) => tracks.push(p),
            None => {
                return Err(Error::InvalidConfig(format!(
                    "could not place track {} without collisions after {MAX_PLACEMENT_TRIES} tries",
                    t + 1
                )))
            }
        }
    }

    // order hits by layer, then transverse position, so ids carry no truth
    let mut order: Vec<(usize, usize)> = (0..config.num_layers)
        .flat_map(|l| (0..config.num_tracks).map(move |t| (l, t)))
        .collect();
    order.sort_by(|&(la, ta), &(lb, tb)| {
        let (pa, pb) = (tracks[ta][la], tracks[tb][lb]);
        la.cmp(&lb)
            .then(pa[0].total_cmp(&pb[0]))
            .then(pa[1].total_cmp(&pb[1]))
    });
    let mut truth = vec![vec![0; config.num_layers]; config.num_tracks];
    let hits: Vec<Hit> = order
        .iter()
        .enumerate()
        .map(|(id, &(l, t))| {
            truth[t][l] = id;
            Hit::new(id, l + 1, tracks[t][l])
        })
        .collect();
    truth.sort_by_key(|t| t[0]);

    let segments = build_segments(&hits, &config.filter);
    let triplets = build_triplets(&hits, &segments, &config.filter)?;
    Instance::new(config.num_layers, hits, segments, triplets, Some(truth))
}

/// Candidate segments `(from, to)`, sorted, subject to the layer-gap,
/// direction and axis-angle rules.
pub fn build_segments(hits: &[Hit], filter: &FilterConfig) -> Vec<(usize, usize)> {
    let max_layer = hits.iter().map(|h| h.layer).max().unwrap_or(0);
    let mut by_layer: Vec<Vec<usize>> = vec![Vec::new(); max_layer + 1];
    for h in hits {
        by_layer[h.layer].push(h.id);
    }
    let mut out = Vec::new();
    for a in hits {
        let last = (a.layer + 1 + filter.max_skip).min(max_layer);
        for layer in a.layer + 1..=last {
            for &b in &by_layer[layer] {
                let hb = &hits[b];
                if filter.forward_only && !(hb.position[2] > a.position[2]) {
                    continue;
                }
                if let Some(max) = filter.max_axis_angle {
                    if axis_angle(a, hb) > max {
                        continue;
                    }
                }
                out.push((a.id, b));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Every pair of segments meeting at a middle hit whose turning angle is
/// within the cutoff, with its cost.
pub fn build_triplets(
    hits: &[Hit],
    segments: &[(usize, usize)],
    filter: &FilterConfig,
) -> Result<Vec<TripletSpec>> {
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); hits.len()];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); hits.len()];
    for &(a, b) in segments {
        outgoing[a].push(b);
        incoming[b].push(a);
    }
    let mut out = Vec::new();
    for j in 0..hits.len() {
        for &i in &incoming[j] {
            for &k in &outgoing[j] {
                let c = cos_beta(&hits[i], &hits[j], &hits[k])?;
                if c.acos() <= filter.max_turning_angle {
                    let cost = triplet_cost(&hits[i], &hits[j], &hits[k])?;
                    out.push(TripletSpec::with_cost(i, j, k, cost));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layered(points: &[(usize, Point)]) -> Vec<Hit> {
        points.iter().enumerate().map(|(id, &(l, p))| Hit::new(id, l, p)).collect()
    }

    #[test]
    fn ten_tracks_seven_layers() {
        let inst = generate_event(&GeneratorConfig::new(10, 1)).unwrap();
        assert_eq!(inst.num_hits(), 70);
        assert!(inst.hits_per_layer().iter().all(|&c| c == 10));
    }

    #[test]
    fn straight_tracks_have_unit_cosines() {
        let cfg = GeneratorConfig { curvature: 0.0, ..GeneratorConfig::new(6, 3) };
        let inst = generate_event(&cfg).unwrap();
        for track in inst.truth().unwrap() {
            for w in track.windows(3) {
                let h = inst.hits();
                let c = cos_beta(&h[w[0]], &h[w[1]], &h[w[2]]).unwrap();
                assert!((c - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn same_seed_same_event() {
        let a = generate_event(&GeneratorConfig::new(20, 8)).unwrap();
        let b = generate_event(&GeneratorConfig::new(20, 8)).unwrap();
        assert_eq!(a, b);
        let c = generate_event(&GeneratorConfig::new(20, 9)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn skip_rule() {
        let pts: Vec<(usize, Point)> = (1..=5).map(|l| (l, [0.0, 0.0, 100.0 * l as f64])).collect();
        let hits = layered(&pts);
        let segs = build_segments(&hits, &FilterConfig::default());
        assert!(segs.contains(&(0, 3)));
        assert!(!segs.contains(&(0, 4)));
        let tight = FilterConfig { max_skip: 0, ..FilterConfig::default() };
        assert_eq!(build_segments(&hits, &tight), vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn two_per_layer_bound() {
        let mut pts = Vec::new();
        for l in 1..=3 {
            pts.push((l, [0.0, 0.0, 100.0 * l as f64]));
            pts.push((l, [10.0, 0.0, 100.0 * l as f64]));
        }
        let hits = layered(&pts);
        let f = FilterConfig { max_skip: 0, ..FilterConfig::default() };
        assert!(build_segments(&hits, &f).len() <= 8);
    }

    #[test]
    fn forward_rule() {
        // layer 2 hit sits behind layer 1 along z
        let hits = layered(&[(1, [0.0, 0.0, 200.0]), (2, [0.0, 0.0, 100.0])]);
        let f = FilterConfig { max_axis_angle: None, ..FilterConfig::default() };
        assert!(build_segments(&hits, &f).is_empty());
        let lax = FilterConfig { forward_only: false, ..f };
        assert_eq!(build_segments(&hits, &lax), vec![(0, 1)]);
    }

    #[test]
    fn triplet_angle_cut() {
        let hits = layered(&[
            (1, [0.0, 0.0, 0.0]),
            (2, [0.0, 0.0, 100.0]),
            (3, [0.0, 0.0, 200.0]),
            (3, [100.0, 0.0, 100.0]),
        ]);
        let f = FilterConfig::default();
        let trips = build_triplets(&hits, &[(0, 1), (1, 2), (1, 3)], &f).unwrap();
        assert_eq!(trips.len(), 1);
        assert_eq!((trips[0].i, trips[0].j, trips[0].k), (0, 1, 2));
        assert!((trips[0].cost.unwrap() + 0.005).abs() < 1e-15);
    }

    #[test]
    fn truth_survives_filters() {
        for seed in 0..5 {
            let inst = generate_event(&GeneratorConfig::new(30, seed)).unwrap();
            for track in inst.truth().unwrap() {
                for w in track.windows(2) {
                    assert!(inst.segment_ordinal(w[0], w[1]).is_some());
                }
                for w in track.windows(3) {
                    let a = inst.segment_ordinal(w[0], w[1]).unwrap();
                    let b = inst.segment_ordinal(w[1], w[2]).unwrap();
                    assert!(inst.triplet_for(a, b).is_some());
                }
            }
        }
    }

    #[test]
    fn preset_ranges() {
        assert_eq!(Preset::Small.track_counts(), vec![10, 20, 30, 40, 50, 60, 70, 80, 90, 100]);
        assert_eq!(Preset::Medium.track_counts().first(), Some(&125));
        assert_eq!(Preset::Medium.track_counts().last(), Some(&350));
        assert_eq!(Preset::Large.track_counts().first(), Some(&375));
        assert_eq!(Preset::Large.track_counts().last(), Some(&600));
        for seed in 0..20 {
            let cfg = GeneratorConfig::from_preset(Preset::Small, seed);
            assert!(Preset::Small.track_counts().contains(&cfg.num_tracks));
        }
    }

    #[test]
    fn config_validation() {
        assert!(GeneratorConfig { num_layers: 2, ..Default::default() }.validate().is_err());
        assert!(GeneratorConfig { layer_spacing: 0.0, ..Default::default() }.validate().is_err());
        assert!(GeneratorConfig { curvature: -0.1, ..Default::default() }.validate().is_err());
        let f = FilterConfig { max_skip: 3, ..Default::default() };
        assert!(GeneratorConfig { filter: f, ..Default::default() }.validate().is_err());
    }
}
