//! Invariant densities and the analytic checks that they are invariant.
//!
//! Densities are reported as magnitudes: `2 t* / (t*^2 - t^2)` on the interval
//! and `|sin(pi/n) / (cos(pi/n) - cos phi)|` on the circle, with `phi` reduced
//! to its arc. The measure of `[a, b]` has the closed form
//! `ln[((t* - a)(t* + b)) / ((t* + a)(t* - b))] = 2 (atanh(b/t*) - atanh(a/t*))`,
//! which is infinite as soon as an endpoint reaches a tangency point.
//!
//! The residual functions return relative errors of the identities that make
//! these densities invariant. They are cheap enough to sweep over thousands of
//! sample points.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{AnglePoint, PolygonConfig};
use crate::interval_map::{inverse_branch, TriangleParam};

/// Value of a density, with the poles flagged explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub value: f64,
    pub at_singularity: bool,
}

impl DensityValue {
    pub fn finite(value: f64) -> Self {
        Self {
            value,
            at_singularity: false,
        }
    }

    pub fn singular() -> Self {
        Self {
            value: f64::INFINITY,
            at_singularity: true,
        }
    }
}

/// Mass of an interval under the invariant measure. May be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MeasureValue {
    pub mass: f64,
}

impl MeasureValue {
    pub fn is_infinite(self) -> bool {
        self.mass.is_infinite()
    }
}

fn check_centered(t: f64, cfg: &PolygonConfig) -> Result<()> {
    let ts = cfg.t_star();
    if t >= -ts && t <= ts {
        Ok(())
    } else {
        Err(Error::OutOfInterval { t, lo: -ts, hi: ts })
    }
}

fn check_open(t: f64, cfg: &PolygonConfig) -> Result<()> {
    check_centered(t, cfg)?;
    if t.abs() == cfg.t_star() {
        Err(Error::Singularity { t })
    } else {
        Ok(())
    }
}

/// `2 t* / ((t* - t)(t* + t))`, factored to keep precision near the poles.
fn rho(t: f64, ts: f64) -> f64 {
    2.0 * ts / ((ts - t) * (ts + t))
}

pub fn density_t(t: f64, cfg: &PolygonConfig) -> Result<DensityValue> {
    check_centered(t, cfg)?;
    if t.abs() == cfg.t_star() {
        return Ok(DensityValue::singular());
    }
    Ok(DensityValue::finite(rho(t, cfg.t_star())))
}

/// Offset of `phi` from the nearest arc center, in `[-pi/n, pi/n]`.
pub fn reduce_to_arc(phi: AnglePoint, cfg: &PolygonConfig) -> f64 {
    let width = 2.0 * PI / cfg.n() as f64;
    let j = (phi.value() / width).round();
    phi.value() - j * width
}

pub fn density_angle(phi: AnglePoint, cfg: &PolygonConfig) -> DensityValue {
    let half = PI / cfg.n() as f64;
    let reduced = reduce_to_arc(phi, cfg);
    let gap = half - reduced.abs();
    if gap <= 16.0 * f64::EPSILON * PI {
        return DensityValue::singular();
    }
    // cos(pi/n) - cos(phi) as a product, so the pole is approached without cancellation.
    let den = 2.0 * ((half + reduced.abs()) / 2.0).sin() * (gap / 2.0).sin();
    DensityValue::finite(half.sin() / den)
}

/// `2 atanh(t / t*)`, the antiderivative of the density.
fn potential(t: f64, ts: f64) -> f64 {
    2.0 * (t / ts).atanh()
}

pub fn measure_interval(a: f64, b: f64, cfg: &PolygonConfig) -> Result<MeasureValue> {
    if a > b {
        return Err(Error::InvertedInterval { a, b });
    }
    check_centered(a, cfg)?;
    check_centered(b, cfg)?;
    if a == b {
        return Ok(MeasureValue { mass: 0.0 });
    }
    let ts = cfg.t_star();
    if a == -ts || b == ts {
        return Ok(MeasureValue { mass: f64::INFINITY });
    }
    Ok(MeasureValue {
        mass: potential(b, ts) - potential(a, ts),
    })
}

/// Relative residual of `rho(t) = sum_k rho(F_k^{-1} t) |(F_k^{-1})'(t)|`.
pub fn transfer_operator_residual(t: f64, cfg: &PolygonConfig) -> Result<f64> {
    check_open(t, cfg)?;
    let ts = cfg.t_star();
    let ts2 = ts * ts;
    let sum: f64 = (1..cfg.n())
        .map(|k| {
            let (a, b) = (cfg.rot_cos(k), cfg.rot_sin(k));
            let den = a * t + b;
            let x = ts2 * (b * t - a) / -den;
            rho(x, ts) * ts2 / (den * den)
        })
        .sum();
    let target = rho(t, ts);
    Ok((sum - target).abs() / target)
}

/// `prod_k (F_k^{-1}(t) - t*) / (F_k^{-1}(t) + t*)`.
pub fn telescoping_product(t: f64, cfg: &PolygonConfig) -> Result<f64> {
    check_open(t, cfg)?;
    let ts = cfg.t_star();
    let ts2 = ts * ts;
    Ok((1..cfg.n())
        .map(|k| {
            let (a, b) = (cfg.rot_cos(k), cfg.rot_sin(k));
            let x = ts2 * (b * t - a) / -(a * t + b);
            (x - ts) / (x + ts)
        })
        .product())
}

/// The value the product actually telescopes to, `(-1)^n (t + t*) / (t - t*)`.
pub fn telescoping_closed_form(t: f64, cfg: &PolygonConfig) -> f64 {
    let ts = cfg.t_star();
    let sign = if cfg.n() % 2 == 0 { 1.0 } else { -1.0 };
    sign * (t + ts) / (t - ts)
}

/// Relative deviation of [`telescoping_product`] from [`telescoping_closed_form`].
///
/// Both sides have logarithmic derivative `-rho`, which is what the invariance
/// argument needs once the inverse branches are known to be decreasing.
pub fn telescoping_residual(t: f64, cfg: &PolygonConfig) -> Result<f64> {
    let target = telescoping_closed_form(t, cfg);
    Ok((telescoping_product(t, cfg)? - target).abs() / target.abs())
}

/// `|prod - (t - t*) / (t + t*)|`.
pub fn reciprocal_telescoping_residual(t: f64, cfg: &PolygonConfig) -> Result<f64> {
    let ts = cfg.t_star();
    Ok((telescoping_product(t, cfg)? - (t - ts) / (t + ts)).abs())
}

/// `prod_k (1 - t* tan(pi k/n)) / (1 + t* tan(pi k/n))`.
///
/// Evaluated by pairing `k` with `n - k`, whose tangents are negatives of each
/// other. Each pair cancels; for even `n` the unpaired factor `k = n/2` has
/// `tan = inf` and contributes its limit `-1`. For odd `n` the pair around
/// `k = n/2` is `0 * inf` taken term by term, so pairing is the only way to
/// give the product a value.
pub fn auxiliary_product(cfg: &PolygonConfig) -> f64 {
    let n = cfg.n();
    let ts = cfg.t_star();
    let mut prod = 1.0;
    for k in 1..n {
        let partner = n - k;
        if k > partner {
            break;
        }
        if k == partner {
            prod *= -1.0;
            continue;
        }
        let tau = (PI * k as f64 / n as f64).tan();
        let (u, v) = (1.0 - ts * tau, 1.0 + ts * tau);
        // Partner factor (1 + t* tau) / (1 - t* tau) with tau_{n-k} = -tau_k.
        // Cross-multiplied so the pair cancels exactly.
        if u != 0.0 && v != 0.0 {
            #[allow(clippy::eq_op)]
            let pair = (u * v) / (v * u);
            prod *= pair;
        }
    }
    prod
}

/// Relative gap between the mass of `[a, b]` and the mass of its full preimage.
pub fn preimage_measure_residual(a: f64, b: f64, cfg: &PolygonConfig) -> Result<f64> {
    if a > b {
        return Err(Error::InvertedInterval { a, b });
    }
    check_open(a, cfg)?;
    check_open(b, cfg)?;
    let target = measure_interval(a, b, cfg)?.mass;
    let mut total = 0.0;
    for k in 1..cfg.n() {
        let x = inverse_branch(a, k, cfg)?;
        let y = inverse_branch(b, k, cfg)?;
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        total += measure_interval(lo, hi, cfg)?.mass;
    }
    if target == 0.0 {
        return Ok(total.abs());
    }
    Ok((total - target).abs() / target)
}

/// `|1 / (t^2 - 1)|` on `[-1, 1]`.
pub fn triangle_density(t: f64) -> Result<DensityValue> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::OutOfInterval { t, lo: -1.0, hi: 1.0 });
    }
    if t.abs() == 1.0 {
        return Ok(DensityValue::singular());
    }
    Ok(DensityValue::finite(1.0 / ((1.0 - t) * (1.0 + t))))
}

/// Relative residual of the transfer identity for `T_a` with density `|1/(t^2 - 1)|`.
///
/// The identity holds only for `a = 3`.
pub fn triangle_density_residual(t: f64, p: TriangleParam) -> Result<f64> {
    if t.abs() >= 1.0 {
        return Err(Error::Singularity { t });
    }
    let a = p.a();
    // |(L^{-1})'(y)| = 2 (a - 1) / ((a - 2) y - a)^2, and R^{-1}(y) = -L^{-1}(-y).
    let deriv = |y: f64| {
        let den = (a - 2.0) * y - a;
        2.0 * (a - 1.0) / (den * den)
    };
    let dens = |x: f64| 1.0 / ((1.0 - x) * (1.0 + x));
    let left = dens(p.left_inverse(t)) * deriv(t);
    let right = dens(p.right_inverse(t)) * deriv(-t);
    let target = dens(t);
    Ok((left + right - target).abs() / target)
}
