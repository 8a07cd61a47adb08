//! The tetrahedral analogue on the unit sphere.
//!
//! A regular tetrahedron with insphere of radius 1 has vertices at distance 3
//! from the center. A point of the sphere is projected along the line through
//! its nearest vertex to the second intersection with the sphere. The four
//! face tangency points `-v_j / 3` are fixed, and orbits linger near them.
//!
//! [`simulate_histogram`] runs the map from seeded random starts and bins the
//! visits on an equal-area grid. The work is split into a fixed number of
//! independent random streams, so the result is the same for any worker count.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::chord_project;

/// Angular radii of the caps counted around each touch point.
pub const CAP_RADII: [f64; 3] = [0.2, 0.1, 0.05];

/// Largest tolerated `| |T z| - 1 |` before renormalization.
pub const MAX_DRIFT: f64 = 1e-6;

pub type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Vertices of the tetrahedron and the touch points of its faces.
///
/// `touch_points[j]` lies on the face opposite `vertices[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TetraConfig {
    pub vertices: [Vec3; 4],
    pub touch_points: [Vec3; 4],
}

impl TetraConfig {
    /// `P_1 = (0, 0, 3)`; the other vertices sit at height -1, 120 degrees apart.
    pub fn new() -> Self {
        let r = 8f64.sqrt();
        let mut vertices = [[0.0, 0.0, 3.0]; 4];
        for (j, v) in vertices.iter_mut().enumerate().skip(1) {
            let theta = 2.0 * PI * (j - 1) as f64 / 3.0;
            *v = [r * theta.cos(), r * theta.sin(), -1.0];
        }
        let touch_points = vertices.map(|v| v.map(|x| -x / 3.0));
        Self {
            vertices,
            touch_points,
        }
    }
}

impl Default for TetraConfig {
    fn default() -> Self {
        Self::new()
    }
}

/// A point of the unit sphere, stored in Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint(Vec3);

impl SpherePoint {
    /// Projects any nonzero vector onto the sphere.
    pub fn new(v: Vec3) -> Self {
        let r = norm(v);
        Self(v.map(|x| x / r))
    }

    /// Wraps a vector without renormalizing it.
    pub fn from_raw(v: Vec3) -> Self {
        Self(v)
    }

    /// `((2u, 2v, 1 - u^2 - v^2)) / (1 + u^2 + v^2)`.
    pub fn from_chart(u: f64, v: f64) -> Self {
        let r2 = u * u + v * v;
        let s = 1.0 + r2;
        Self([2.0 * u / s, 2.0 * v / s, (1.0 - r2) / s])
    }

    /// Chart coordinates, undefined at the south pole.
    pub fn to_chart(self) -> Option<(f64, f64)> {
        let [x, y, z] = self.0;
        let den = 1.0 + z;
        (den > 0.0).then(|| (x / den, y / den))
    }

    pub fn coords(self) -> Vec3 {
        self.0
    }

    pub fn norm(self) -> f64 {
        norm(self.0)
    }

    /// Angle between two unit vectors.
    pub fn angle_to(self, other: Self) -> f64 {
        let c = dot(self.0, other.0).clamp(-1.0, 1.0);
        let s = {
            let [a, b, d] = self.0;
            let [e, f, g] = other.0;
            norm([b * g - d * f, d * e - a * g, a * f - b * e])
        };
        s.atan2(c)
    }
}

/// Index `j` in `1..=4` of the vertex nearest to `z`; ties go to the lowest index.
pub fn region_of(z: SpherePoint, cfg: &TetraConfig) -> usize {
    let mut best = 0;
    let mut best_dot = dot(z.0, cfg.vertices[0]);
    for (j, &v) in cfg.vertices.iter().enumerate().skip(1) {
        let d = dot(z.0, v);
        if d > best_dot {
            best = j;
            best_dot = d;
        }
    }
    best + 1
}

/// Second intersection of the line through `z` and its nearest vertex with the sphere.
pub fn sphere_map(z: SpherePoint, cfg: &TetraConfig) -> SpherePoint {
    let vertex = cfg.vertices[region_of(z, cfg) - 1];
    SpherePoint(chord_project(z.0, vertex))
}

/// The map in region 1, in chart coordinates: `(u, v) / (2 (u^2 + v^2))`.
pub fn chart_q(u: f64, v: f64) -> Result<(f64, f64)> {
    let r2 = u * u + v * v;
    if r2 == 0.0 {
        return Err(Error::Pole { t: 0.0 });
    }
    Ok((u / (2.0 * r2), v / (2.0 * r2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationParams {
    pub seed: u64,
    pub iterations: u64,
    /// Total bin count; must be a perfect square.
    pub bins: usize,
    pub burn_in: u64,
    pub workers: usize,
    /// Independent random streams. Results depend on this, never on `workers`.
    pub streams: usize,
}

impl Default for SimulationParams {
    fn default() -> Self {
        Self {
            seed: 42,
            iterations: 10_000_000,
            bins: 400,
            burn_in: 1000,
            workers: 1,
            streams: 16,
        }
    }
}

impl SimulationParams {
    pub fn validate(&self) -> Result<usize> {
        let side = (self.bins as f64).sqrt().round() as usize;
        if self.bins == 0 || side * side != self.bins {
            return Err(Error::InvalidSimulation(format!(
                "bins must be a positive perfect square, got {}",
                self.bins
            )));
        }
        if self.iterations < 10_000 {
            return Err(Error::InvalidSimulation(format!(
                "need at least 10000 iterations, got {}",
                self.iterations
            )));
        }
        if self.burn_in > self.iterations {
            return Err(Error::InvalidSimulation(format!(
                "burn-in {} exceeds iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.workers == 0 || self.streams == 0 {
            return Err(Error::InvalidSimulation("workers and streams must be positive".into()));
        }
        Ok(side)
    }

    /// `(iterations, burn_in)` for stream `i`, spreading remainders over the first streams.
    fn share(&self, i: usize) -> (u64, u64) {
        let s = self.streams as u64;
        let i = i as u64;
        let split = |total: u64| total / s + u64::from(i < total % s);
        (split(self.iterations), split(self.burn_in))
    }
}

/// Visit counts on an equal-area grid of `bands` z-bands by `azimuth_bins` sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereHistogram {
    pub bands: usize,
    pub azimuth_bins: usize,
    /// Band-major: `counts[band * azimuth_bins + sector]`.
    pub counts: Vec<u64>,
    pub total: u64,
    pub discarded: u64,
    /// Visits within each of [`CAP_RADII`] of each touch point.
    pub cap_counts: [[u64; 3]; 4],
    pub max_drift: f64,
    pub params: SimulationParams,
}

impl SphereHistogram {
    fn empty(side: usize, params: SimulationParams) -> Self {
        Self {
            bands: side,
            azimuth_bins: side,
            counts: vec![0; side * side],
            total: 0,
            discarded: 0,
            cap_counts: [[0; 3]; 4],
            max_drift: 0.0,
            params,
        }
    }

    fn merge(&mut self, other: &Self) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        self.discarded += other.discarded;
        for (a, b) in self.cap_counts.iter_mut().zip(&other.cap_counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.max_drift = self.max_drift.max(other.max_drift);
    }

    pub fn bin_area(&self) -> f64 {
        4.0 * PI / (self.bands * self.azimuth_bins) as f64
    }

    pub fn bin_of(&self, z: SpherePoint) -> usize {
        let [x, y, h] = z.0;
        let band = (((h + 1.0) / 2.0 * self.bands as f64) as usize).min(self.bands - 1);
        let phi = y.atan2(x).rem_euclid(2.0 * PI);
        let sector = ((phi / (2.0 * PI) * self.azimuth_bins as f64) as usize).min(self.azimuth_bins - 1);
        band * self.azimuth_bins + sector
    }

    pub fn count(&self, band: usize, sector: usize) -> u64 {
        self.counts[band * self.azimuth_bins + sector]
    }

    pub fn binned(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Visits per unit area in the caps of radius `CAP_RADII[i]`, pooled over all touch points.
    pub fn cap_density(&self, i: usize) -> f64 {
        let visits: u64 = self.cap_counts.iter().map(|c| c[i]).sum();
        let area = 4.0 * 2.0 * PI * (1.0 - CAP_RADII[i].cos());
        visits as f64 / area
    }

    /// Rank (0 = most visited) of the bin containing each touch point.
    pub fn touch_bin_ranks(&self, cfg: &TetraConfig) -> [usize; 4] {
        let mut order: Vec<usize> = (0..self.counts.len()).collect();
        order.sort_by(|&a, &b| self.counts[b].cmp(&self.counts[a]).then(a.cmp(&b)));
        let mut rank = vec![0; self.counts.len()];
        for (r, &bin) in order.iter().enumerate() {
            rank[bin] = r;
        }
        cfg.touch_points.map(|p| rank[self.bin_of(SpherePoint(p))])
    }
}

fn random_start(rng: &mut ChaCha8Rng) -> SpherePoint {
    let h: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = (1.0 - h * h).max(0.0).sqrt();
    SpherePoint([r * phi.cos(), r * phi.sin(), h])
}

fn run_stream(id: usize, params: &SimulationParams, side: usize, cfg: &TetraConfig) -> Result<SphereHistogram> {
    let (iterations, burn_in) = params.share(id);
    let mut hist = SphereHistogram::empty(side, *params);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(id as u64);
    let cos_caps = CAP_RADII.map(f64::cos);
    let mut z = random_start(&mut rng);
    for i in 0..iterations {
        let w = sphere_map(z, cfg);
        let r = w.norm();
        let drift = (r - 1.0).abs();
        hist.max_drift = hist.max_drift.max(drift);
        if drift > MAX_DRIFT {
            return Err(Error::NormDrift { drift });
        }
        z = SpherePoint(w.0.map(|x| x / r));
        hist.total += 1;
        if i < burn_in {
            hist.discarded += 1;
            continue;
        }
        let bin = hist.bin_of(z);
        hist.counts[bin] += 1;
        for (j, &p) in cfg.touch_points.iter().enumerate() {
            let c = dot(z.0, p);
            for (slot, &limit) in hist.cap_counts[j].iter_mut().zip(&cos_caps) {
                if c > limit {
                    *slot += 1;
                }
            }
        }
    }
    Ok(hist)
}

/// Iterates the sphere map over `params.streams` seeded orbits and bins the visits.
pub fn simulate_histogram(params: &SimulationParams, cfg: &TetraConfig) -> Result<SphereHistogram> {
    let side = params.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.workers)
        .build()
        .map_err(|e| Error::InvalidSimulation(e.to_string()))?;
    let parts: Vec<SphereHistogram> = pool.install(|| {
        (0..params.streams)
            .into_par_iter()
            .map(|id| run_stream(id, params, side, cfg))
            .collect::<Result<_>>()
    })?;
    let mut hist = SphereHistogram::empty(side, *params);
    for part in &parts {
        hist.merge(part);
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tetra_invariants() {
        let cfg = TetraConfig::new();
        for i in 0..4 {
            assert!((norm(cfg.vertices[i]) - 3.0).abs() < 1e-14);
            assert!((norm(cfg.touch_points[i]) - 1.0).abs() < 1e-15);
            for j in 0..4 {
                if i != j {
                    assert!((dot(cfg.vertices[i], cfg.vertices[j]) + 3.0).abs() < 1e-13);
                }
            }
            // Equidistant from the three vertices of its own face.
            let d: Vec<f64> = (0..4)
                .filter(|&j| j != i)
                .map(|j| {
                    let v = cfg.vertices[j];
                    let p = cfg.touch_points[i];
                    norm([v[0] - p[0], v[1] - p[1], v[2] - p[2]])
                })
                .collect();
            assert!((d[0] - d[1]).abs() < 1e-14 && (d[1] - d[2]).abs() < 1e-14);
        }
        assert_eq!(cfg.touch_points[0], [0.0, 0.0, -1.0].map(|x: f64| x + 0.0));
    }

    #[test]
    fn region_examples() {
        let cfg = TetraConfig::new();
        assert_eq!(region_of(SpherePoint([0.0, 0.0, 1.0]), &cfg), 1);
        assert_eq!(region_of(SpherePoint([0.0, 0.0, -1.0]), &cfg), 2);
        let v2 = cfg.vertices[1];
        let nudged = SpherePoint::new([v2[0] * 1e-3, v2[1] * 1e-3, -1.0]);
        assert_eq!(region_of(nudged, &cfg), 2);
    }

    #[test]
    fn map_examples() {
        let cfg = TetraConfig::new();
        for p in cfg.touch_points {
            let image = sphere_map(SpherePoint(p), &cfg).coords();
            for i in 0..3 {
                assert!((image[i] - p[i]).abs() < 1e-12);
            }
        }
        let south = sphere_map(SpherePoint([0.0, 0.0, 1.0]), &cfg).coords();
        assert_eq!(south, [0.0, 0.0, -1.0]);
        assert!(chart_q(0.0, 0.0).is_err());
    }

    #[test]
    fn chart_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let z = random_start(&mut rng);
            if z.0[2] < -0.99 {
                continue;
            }
            let (u, v) = z.to_chart().unwrap();
            let back = SpherePoint::from_chart(u, v).coords();
            for (b, x) in back.iter().zip(z.0) {
                assert!((b - x).abs() < 1e-12);
            }
        }
        assert_eq!(SpherePoint([0.0, 0.0, -1.0]).to_chart(), None);
    }

    #[test]
    fn chart_circle_is_fixed() {
        let cfg = TetraConfig::new();
        let r = 0.5f64.sqrt();
        for i in 0..360 {
            let a = i as f64 * PI / 180.0;
            let (u, v) = (r * a.cos(), r * a.sin());
            let (qu, qv) = chart_q(u, v).unwrap();
            assert!((qu - u).abs() < 1e-12 && (qv - v).abs() < 1e-12);
            let z = SpherePoint::from_chart(u, v);
            assert!((z.0[2] - 1.0 / 3.0).abs() < 1e-15);
            if region_of(z, &cfg) == 1 {
                assert!(sphere_map(z, &cfg).angle_to(z) < 1e-12, "angle {i}");
            }
        }
    }

    #[test]
    fn chart_agrees_with_cartesian_in_region_one() {
        let cfg = TetraConfig::new();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 10_000 {
            let z = random_start(&mut rng);
            if region_of(z, &cfg) != 1 {
                continue;
            }
            let (u, v) = z.to_chart().unwrap();
            let (qu, qv) = chart_q(u, v).unwrap();
            let via_chart = SpherePoint::from_chart(qu, qv).coords();
            let direct = sphere_map(z, &cfg).coords();
            for i in 0..3 {
                assert!((via_chart[i] - direct[i]).abs() < 1e-10);
            }
            checked += 1;
        }
    }

    #[test]
    fn params_validation() {
        let ok = SimulationParams {
            iterations: 10_000,
            ..Default::default()
        };
        assert_eq!(ok.validate().unwrap(), 20);
        for bad in [
            SimulationParams { bins: 10, ..ok },
            SimulationParams { iterations: 9999, burn_in: 0, ..ok },
            SimulationParams { burn_in: 10_001, ..ok },
            SimulationParams { workers: 0, ..ok },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidSimulation(_))));
        }
    }

    #[test]
    fn burn_in_only_run_is_empty() {
        let cfg = TetraConfig::new();
        let params = SimulationParams {
            iterations: 20_000,
            burn_in: 20_000,
            bins: 16,
            ..Default::default()
        };
        let h = simulate_histogram(&params, &cfg).unwrap();
        assert_eq!(h.total, 20_000);
        assert_eq!(h.binned(), 0);
        assert_eq!(h.discarded, 20_000);
    }

    #[test]
    fn counts_balance_and_runs_repeat() {
        let cfg = TetraConfig::new();
        let params = SimulationParams {
            iterations: 100_003,
            burn_in: 101,
            bins: 64,
            ..Default::default()
        };
        let a = simulate_histogram(&params, &cfg).unwrap();
        assert_eq!(a.binned() + a.discarded, a.total);
        assert_eq!(a.total, 100_003);
        let b = simulate_histogram(&params, &cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate_histogram(&SimulationParams { workers: 3, ..params }, &cfg).unwrap();
        assert_eq!(a.counts, c.counts);
        assert_eq!(a.cap_counts, c.cap_counts);
    }
}
