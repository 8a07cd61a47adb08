//! Polygon constants, the stereographic chart, and the direct circle map.
//!
//! Points of the unit circle are written `z = (sin phi, cos phi)`, so `phi` is
//! measured clockwise from the north pole `(0, 1)`. The chart coordinate is
//! `t = tan(phi / 2)`, which gives `z = (2t / (1 + t^2), (1 - t^2) / (1 + t^2))`.
//!
//! The polygon has vertex `P_1` on the positive vertical axis at distance
//! `1 / cos(pi / n)`, and vertex `P_j` at angle `2 pi (j - 1) / n`. The arc
//! projected through `P_1` is `phi in [-pi/n, pi/n]`, i.e. `t in [-t*, t*]`
//! with `t* = tan(pi / 2n)`; its endpoints are the tangency points. Every
//! other arc is an exact rotation of this fundamental one.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::moebius::Moebius;

/// An angle on the circle, reduced to `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AnglePoint(f64);

impl AnglePoint {
    pub fn new(phi: f64) -> Self {
        if (-PI..PI).contains(&phi) {
            return Self(phi);
        }
        let mut x = phi.rem_euclid(2.0 * PI);
        if x >= PI {
            x -= 2.0 * PI;
        }
        Self(x)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn rotated(self, delta: f64) -> Self {
        Self::new(self.0 + delta)
    }

    /// Length of the shorter arc between two angles.
    pub fn distance(self, other: Self) -> f64 {
        let d = (self.0 - other.0).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    }

    pub fn to_cartesian(self) -> [f64; 2] {
        [self.0.sin(), self.0.cos()]
    }

    pub fn from_cartesian(z: [f64; 2]) -> Self {
        Self::new(z[0].atan2(z[1]))
    }
}

/// Every `n`-dependent constant of the finite Gauss map, computed once.
///
/// Branches are indexed `k = 1..=n-1`. Branch `k` covers
/// `[branch_lo(k), branch_hi(k)]`; `k = 1` is the rightmost branch, ending at
/// `t*`, and `k = n - 1` the leftmost, starting at `-t*`.
#[derive(Debug, Clone)]
pub struct PolygonConfig {
    n: usize,
    t_star: f64,
    tan_pi_n: f64,
    vertex_radius: f64,
    rot_cos: Vec<f64>,
    rot_sin: Vec<f64>,
    /// Descending cut points: `cuts[0] = t*`, `cuts[n-1] = -t*`.
    cuts: Vec<f64>,
    vertices: Vec<[f64; 2]>,
    q: Moebius<f64>,
    rotations: Vec<Moebius<f64>>,
    branches: Vec<Moebius<f64>>,
    inverse_branches: Vec<Moebius<f64>>,
    conjugacy: Moebius<f64>,
    /// Ascending interior cut points of the oriented chart.
    oriented_cuts: Vec<f64>,
    oriented_branches: Vec<Moebius<f64>>,
}

impl PolygonConfig {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewSides(n));
        }
        let nf = n as f64;
        let t_star = (PI / (2.0 * nf)).tan();
        let ts2 = t_star * t_star;
        let tan_pi_n = 2.0 * t_star / (1.0 - ts2);

        let (rot_cos, rot_sin): (Vec<f64>, Vec<f64>) = (1..n)
            .map(|k| {
                if 2 * k == n {
                    (0.0, 1.0)
                } else {
                    let x = PI * k as f64 / nf;
                    (x.cos(), x.sin())
                }
            })
            .unzip();

        // cuts[j] = Q^{-1}(tan(pi (2j + 1) / 2n)) = t*^2 cot(pi (2j + 1) / 2n).
        let mut cuts = vec![0.0; n];
        for j in 0..n.div_ceil(2) {
            let value = if j == 0 {
                t_star
            } else if 2 * j + 1 == n {
                0.0
            } else {
                let x = PI * (2 * j + 1) as f64 / (2.0 * nf);
                ts2 * x.cos() / x.sin()
            };
            cuts[j] = value;
            cuts[n - 1 - j] = -value;
        }

        let radius = 1.0 / (PI / nf).cos();
        let vertices = (0..n)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / nf;
                [radius * theta.sin(), radius * theta.cos()]
            })
            .collect();

        let q = Moebius::new(0.0, ts2, 1.0, 0.0)?;
        let mut rotations = Vec::with_capacity(n - 1);
        let mut branches = Vec::with_capacity(n - 1);
        let mut inverse_branches = Vec::with_capacity(n - 1);
        for (&a, &b) in rot_cos.iter().zip(&rot_sin) {
            rotations.push(Moebius::new(a, -b, b, a)?);
            branches.push(Moebius::new(-b, a * ts2, a, b * ts2)?);
            inverse_branches.push(Moebius::new(b * ts2, -a * ts2, -a, -b)?);
        }

        // s -> (t* - s) / (1 + t* s): rotation by pi/n composed with a reflection.
        // An involution carrying [-t*, t*] onto [0, tan(pi/n)].
        let conjugacy = Moebius::new(-1.0, t_star, t_star, 1.0)?;
        // h reverses orientation, so descending cuts come out ascending.
        let oriented_cuts: Vec<f64> = cuts[1..n - 1].iter().map(|&c| conjugacy.eval(c)).collect();
        let oriented_branches = branches
            .iter()
            .map(|f| conjugacy.compose(f).compose(&conjugacy))
            .collect();

        Ok(Self {
            n,
            t_star,
            tan_pi_n,
            vertex_radius: radius,
            rot_cos,
            rot_sin,
            cuts,
            vertices,
            q,
            rotations,
            branches,
            inverse_branches,
            conjugacy,
            oriented_cuts,
            oriented_branches,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    /// Length of the oriented chart interval, `tan(pi / n)`.
    pub fn tan_pi_n(&self) -> f64 {
        self.tan_pi_n
    }

    pub fn vertex_radius(&self) -> f64 {
        self.vertex_radius
    }

    pub fn branch_count(&self) -> usize {
        self.n - 1
    }

    fn check_k(&self, k: usize) -> Result<usize> {
        if (1..self.n).contains(&k) {
            Ok(k - 1)
        } else {
            Err(Error::InvalidSymbol { k, max: self.n - 1 })
        }
    }

    /// `cos(pi k / n)`.
    pub fn rot_cos(&self, k: usize) -> f64 {
        self.rot_cos[k - 1]
    }

    /// `sin(pi k / n)`.
    pub fn rot_sin(&self, k: usize) -> f64 {
        self.rot_sin[k - 1]
    }

    pub fn branch_lo(&self, k: usize) -> f64 {
        self.cuts[k]
    }

    pub fn branch_hi(&self, k: usize) -> f64 {
        self.cuts[k - 1]
    }

    /// Interior cut points, descending.
    pub fn interior_cuts(&self) -> &[f64] {
        &self.cuts[1..self.n - 1]
    }

    /// Vertex `P_{j+1}` in Cartesian coordinates, for `j = 0..n`.
    pub fn vertex(&self, j: usize) -> [f64; 2] {
        self.vertices[j]
    }

    /// `Q(t) = t*^2 / t`.
    pub fn q(&self) -> &Moebius<f64> {
        &self.q
    }

    /// Rotation `R_k`, angle `-2 pi k / n` in the chart.
    pub fn rotation(&self, k: usize) -> Result<&Moebius<f64>> {
        Ok(&self.rotations[self.check_k(k)?])
    }

    /// `F_k = R_k ∘ Q`.
    pub fn branch(&self, k: usize) -> Result<&Moebius<f64>> {
        Ok(&self.branches[self.check_k(k)?])
    }

    pub fn inverse_branch(&self, k: usize) -> Result<&Moebius<f64>> {
        Ok(&self.inverse_branches[self.check_k(k)?])
    }

    /// The involution `h` from centered to oriented coordinates.
    pub fn conjugacy(&self) -> &Moebius<f64> {
        &self.conjugacy
    }

    /// Ascending interior cut points of the oriented chart.
    pub fn oriented_cuts(&self) -> &[f64] {
        &self.oriented_cuts
    }

    pub fn oriented_branch(&self, k: usize) -> Result<&Moebius<f64>> {
        Ok(&self.oriented_branches[self.check_k(k)?])
    }
}

/// Chart coordinate of an angle, `t = tan(phi / 2)`.
pub fn t_from_angle(phi: AnglePoint) -> Result<f64> {
    if phi.value() == -PI {
        return Err(Error::ChartSingularity { phi: phi.value() });
    }
    Ok((phi.value() / 2.0).tan())
}

pub fn angle_from_t(t: f64) -> AnglePoint {
    AnglePoint::new(2.0 * t.atan())
}

/// Second intersection of the line through `p` and `z` with the unit sphere.
///
/// `z` must be a unit vector. Returns `z` itself when the line is tangent.
pub fn chord_project<const D: usize>(z: [f64; D], p: [f64; D]) -> [f64; D] {
    let mut diff = [0.0; D];
    let mut dist2 = 0.0;
    let mut dot = 0.0;
    for i in 0..D {
        diff[i] = z[i] - p[i];
        dist2 += diff[i] * diff[i];
        dot += z[i] * (p[i] - z[i]);
    }
    let tau = 2.0 * dot / dist2;
    let mut out = z;
    for i in 0..D {
        out[i] += tau * diff[i];
    }
    out
}

/// Index `j` (0-based) of the vertex whose arc contains `phi`.
///
/// Points exactly on an arc boundary go to the lower vertex index.
pub fn arc_of(phi: AnglePoint, cfg: &PolygonConfig) -> usize {
    let n = cfg.n();
    let x = phi.value() * n as f64 / (2.0 * PI);
    let floor = x.floor();
    let frac = x - floor;
    let wrap = |i: f64| (i as i64).rem_euclid(n as i64) as usize;
    if frac < 0.5 {
        wrap(floor)
    } else if frac > 0.5 {
        wrap(floor + 1.0)
    } else {
        wrap(floor).min(wrap(floor + 1.0))
    }
}

/// The finite Gauss circle map: project `z` through the vertex of its arc.
pub fn circle_map(z: AnglePoint, cfg: &PolygonConfig) -> AnglePoint {
    AnglePoint::from_cartesian(circle_map_cartesian(z, cfg))
}

/// [`circle_map`] before converting back to an angle.
pub fn circle_map_cartesian(z: AnglePoint, cfg: &PolygonConfig) -> [f64; 2] {
    let vertex = cfg.vertex(arc_of(z, cfg));
    chord_project(z.to_cartesian(), vertex)
}

/// Rotates `phi` by `-2 pi k / n`, undoing `k` arc steps.
pub fn rotate_back(phi: AnglePoint, k: usize, cfg: &PolygonConfig) -> AnglePoint {
    phi.rotated(-2.0 * PI * k as f64 / cfg.n() as f64)
}

/// Angles of the tangency points `A_j`, `pi (2j - 1) / n` for `j = 1..=n`.
pub fn tangency_angles(cfg: &PolygonConfig) -> Vec<AnglePoint> {
    let n = cfg.n() as f64;
    (1..=cfg.n())
        .map(|j| AnglePoint::new(PI * (2 * j - 1) as f64 / n))
        .collect()
}
