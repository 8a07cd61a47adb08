//! The branch map `F = R_k ∘ Q` on `[-t*, t*]` and its relatives.
//!
//! Besides the centered map this module holds the oriented chart, where a
//! tangency point sits at the origin and the `n = 4` map has integer
//! coefficients, and the two-branch triangle family `T_a` on `[-1, 1]`.
//!
//! Conventions for the centered map:
//!
//! * A boundary point between two branches belongs to the lower index.
//! * `-t*` and `t*` are the same point of the circle. Every output within
//!   `1e-15` of `-t*` is reported as `t*`, so `t*` is a fixed point.
//!
//! In oriented coordinates the conjugacy reverses orientation, so the same
//! boundary rule makes branch intervals closed on the right.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{angle_from_t, AnglePoint, PolygonConfig};
use crate::moebius::{Moebius, Projective, Scalar};

/// Points this close to a cut point stop symbolic encoding.
pub const BOUNDARY_EPS: f64 = 1e-15;

/// A finite word over the branch alphabet `{1, ..., n - 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SymbolSequence(Vec<usize>);

impl SymbolSequence {
    /// Validates every symbol against `cfg`.
    pub fn new(word: Vec<usize>, cfg: &PolygonConfig) -> Result<Self> {
        Self::with_alphabet(word, cfg.branch_count())
    }

    /// Validates every symbol against `{1, ..., max}`.
    pub fn with_alphabet(word: Vec<usize>, max: usize) -> Result<Self> {
        if let Some(&k) = word.iter().find(|&&k| k == 0 || k > max) {
            return Err(Error::InvalidSymbol { k, max });
        }
        Ok(Self(word))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, k: usize) {
        self.0.push(k);
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// The word rotated left by `r` places.
    pub fn rotated(&self, r: usize) -> Self {
        let mut w = self.0.clone();
        if !w.is_empty() {
            let len = w.len();
            w.rotate_left(r % len);
        }
        Self(w)
    }
}

impl std::fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// An orbit with its branch symbols.
///
/// `points[i + 1]` is the image of `points[i]` under the branch `symbols[i]`.
/// `escaped_at` is the index of the point that stopped the iteration early.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord<T = f64> {
    pub points: Vec<T>,
    pub symbols: SymbolSequence,
    pub escaped_at: Option<usize>,
}

impl OrbitRecord<f64> {
    /// Positions of the orbit on the circle, in the fundamental arc.
    pub fn shadows(&self) -> Vec<AnglePoint> {
        self.points.iter().map(|&t| angle_from_t(t)).collect()
    }
}

fn check_interval(t: f64, lo: f64, hi: f64) -> Result<()> {
    if t >= lo && t <= hi {
        Ok(())
    } else {
        Err(Error::OutOfInterval { t, lo, hi })
    }
}

fn check_centered(t: f64, cfg: &PolygonConfig) -> Result<()> {
    check_interval(t, -cfg.t_star(), cfg.t_star())
}

/// `Q(t) = t*^2 / t`, with `Q(0) = ∞` and `Q(∞) = 0`.
pub fn q_map(t: &Projective<f64>, cfg: &PolygonConfig) -> Projective<f64> {
    cfg.q().apply(t)
}

pub fn branch_index(t: f64, cfg: &PolygonConfig) -> Result<usize> {
    check_centered(t, cfg)?;
    Ok((1..cfg.n())
        .find(|&k| t >= cfg.branch_lo(k))
        .unwrap_or(cfg.n() - 1))
}

/// One step of the branch map. Returns the image and the branch used.
pub fn step_f(t: f64, cfg: &PolygonConfig) -> Result<(f64, usize)> {
    let k = branch_index(t, cfg)?;
    let ts = cfg.t_star();
    let y = cfg.branch(k)?.eval(t);
    let y = if (y + ts).abs() <= BOUNDARY_EPS { ts } else { y.clamp(-ts, ts) };
    Ok((y, k))
}

/// The preimage of `t` in the domain of branch `k`.
pub fn inverse_branch(t: f64, k: usize, cfg: &PolygonConfig) -> Result<f64> {
    check_centered(t, cfg)?;
    let x = cfg.inverse_branch(k)?.eval(t);
    Ok(x.clamp(cfg.branch_lo(k), cfg.branch_hi(k)))
}

/// Distance from `t` to the nearest interior cut point.
pub fn distance_to_cut(t: f64, cfg: &PolygonConfig) -> f64 {
    cfg.interior_cuts()
        .iter()
        .map(|c| (t - c).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Iterates [`step_f`] up to `steps` times, recording the branch symbols.
///
/// Stops at the first point within [`BOUNDARY_EPS`] of an interior cut point.
pub fn encode_orbit(t0: f64, steps: usize, cfg: &PolygonConfig) -> Result<OrbitRecord> {
    check_centered(t0, cfg)?;
    let mut points = vec![t0];
    let mut symbols = SymbolSequence::default();
    let mut escaped_at = None;
    let mut t = t0;
    for i in 0..steps {
        if distance_to_cut(t, cfg) <= BOUNDARY_EPS {
            escaped_at = Some(i);
            break;
        }
        let (next, k) = step_f(t, cfg)?;
        symbols.push(k);
        points.push(next);
        t = next;
    }
    Ok(OrbitRecord {
        points,
        symbols,
        escaped_at,
    })
}

/// The interval of points whose first `word.len()` symbols are `word`.
pub fn cylinder_interval(word: &SymbolSequence, cfg: &PolygonConfig) -> Result<(f64, f64)> {
    let (&last, prefix) = word.as_slice().split_last().ok_or(Error::EmptyWord)?;
    cfg.branch(last)?;
    let mut lo = cfg.branch_lo(last);
    let mut hi = cfg.branch_hi(last);
    for &k in prefix.iter().rev() {
        let x = inverse_branch(lo, k, cfg)?;
        let y = inverse_branch(hi, k, cfg)?;
        (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    }
    Ok((lo, hi))
}

/// Branch of the oriented map containing `t`; boundaries go to the lower index.
pub fn oriented_branch_index(t: f64, cfg: &PolygonConfig) -> Result<usize> {
    check_interval(t, 0.0, cfg.tan_pi_n())?;
    Ok(cfg
        .oriented_cuts()
        .iter()
        .position(|&c| t <= c)
        .map_or(cfg.n() - 1, |i| i + 1))
}

/// The branch map in oriented coordinates on `[0, tan(pi/n)]`.
///
/// Equal to `h ∘ F ∘ h` where `h` is [`PolygonConfig::conjugacy`].
pub fn oriented_map(t: f64, cfg: &PolygonConfig) -> Result<f64> {
    oriented_step(t, cfg).map(|(y, _)| y)
}

pub fn oriented_step(t: f64, cfg: &PolygonConfig) -> Result<(f64, usize)> {
    let k = oriented_branch_index(t, cfg)?;
    let y = cfg.oriented_branch(k)?.eval(t);
    Ok((y.clamp(0.0, cfg.tan_pi_n()), k))
}

/// Iterates [`oriented_map`], stopping near cut points like [`encode_orbit`].
pub fn oriented_orbit(t0: f64, steps: usize, cfg: &PolygonConfig) -> Result<OrbitRecord> {
    check_interval(t0, 0.0, cfg.tan_pi_n())?;
    let mut points = vec![t0];
    let mut symbols = SymbolSequence::default();
    let mut escaped_at = None;
    let mut t = t0;
    for i in 0..steps {
        let near_cut = cfg.oriented_cuts().iter().any(|c| (t - c).abs() <= BOUNDARY_EPS);
        if near_cut {
            escaped_at = Some(i);
            break;
        }
        let (next, k) = oriented_step(t, cfg)?;
        symbols.push(k);
        points.push(next);
        t = next;
    }
    Ok(OrbitRecord {
        points,
        symbols,
        escaped_at,
    })
}

/// Integer matrices of the three `n = 4` oriented branches.
///
/// `(3t - 1)/(t - 1)` on `[0, 1/3]`, `1/t - 2` on `(1/3, 1/2]`,
/// `(t - 1)/(1 - 3t)` on `(1/2, 1]`.
pub const SQUARE_BRANCHES: [[i64; 4]; 3] = [[3, -1, 1, -1], [-2, 1, 1, 0], [1, -1, -3, 1]];

pub fn square_branch<T: Scalar>(k: usize) -> Result<Moebius<T>> {
    let m = SQUARE_BRANCHES
        .get(k.wrapping_sub(1))
        .ok_or(Error::InvalidSymbol { k, max: 3 })?;
    let [a, b, c, d] = m.map(|x| T::from_f64(x as f64));
    Moebius::new(a, b, c, d)
}

/// Branch of the `n = 4` square map containing `t`.
pub fn square_branch_index<T: Scalar>(t: &T) -> Result<usize> {
    let one = T::one();
    let two = one.clone() + one.clone();
    let three = two.clone() + one.clone();
    if *t < T::zero() || *t > one {
        return Err(Error::OutOfInterval {
            t: t.to_f64(),
            lo: 0.0,
            hi: 1.0,
        });
    }
    // t <= 1/3 and t <= 1/2, without dividing.
    Ok(if three * t.clone() <= one {
        1
    } else if two * t.clone() <= one {
        2
    } else {
        3
    })
}

/// The `n = 4` oriented map over any scalar backend.
pub fn square_map<T: Scalar>(t: &T) -> Result<(T, usize)> {
    let k = square_branch_index(t)?;
    let y = square_branch::<T>(k)?
        .apply_finite(t)
        .into_finite()
        .ok_or(Error::Pole { t: t.to_f64() })?;
    Ok((y, k))
}

/// Exact orbit of the `n = 4` oriented map. Never stops early.
pub fn square_orbit_exact(t0: &BigRational, steps: usize) -> Result<OrbitRecord<BigRational>> {
    let mut points = vec![t0.clone()];
    let mut symbols = SymbolSequence::default();
    let mut t = t0.clone();
    for _ in 0..steps {
        let (next, k) = square_map(&t)?;
        symbols.push(k);
        points.push(next.clone());
        t = next;
    }
    Ok(OrbitRecord {
        points,
        symbols,
        escaped_at: None,
    })
}

/// Parameter of the triangle family `T_a`.
///
/// The left branch `(a t + 1) / ((a - 2) t - 1)` has its pole at
/// `1 / (a - 2)`, which lies in `[-1, 0]` exactly when `a <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TriangleParam(f64);

impl TriangleParam {
    pub fn new(a: f64) -> Result<Self> {
        if a.is_finite() && a > 1.0 {
            Ok(Self(a))
        } else {
            Err(Error::InvalidTriangleParam(a))
        }
    }

    pub fn a(self) -> f64 {
        self.0
    }

    pub fn left_branch(self) -> Moebius<f64> {
        let a = self.0;
        Moebius::new(a, 1.0, a - 2.0, -1.0).expect("det = 1 - a is nonzero")
    }

    /// Right branch, `t -> -L(-t)`.
    pub fn right_branch(self) -> Moebius<f64> {
        let a = self.0;
        Moebius::new(a, -1.0, -(a - 2.0), -1.0).expect("det = a - 1 is nonzero")
    }

    /// Preimage of `y` in `[-1, 0]`.
    pub fn left_inverse(self, y: f64) -> f64 {
        let a = self.0;
        ((y + 1.0) / ((a - 2.0) * y - a)).clamp(-1.0, 0.0)
    }

    /// Preimage of `y` in `[0, 1]`.
    pub fn right_inverse(self, y: f64) -> f64 {
        -self.left_inverse(-y)
    }
}

/// `T_a(t)`; `t = 0` uses the left branch.
pub fn triangle_map(t: f64, p: TriangleParam) -> Result<f64> {
    check_interval(t, -1.0, 1.0)?;
    let a = p.a();
    let y = if t <= 0.0 {
        (a * t + 1.0) / ((a - 2.0) * t - 1.0)
    } else {
        (a * t - 1.0) / (-(a - 2.0) * t - 1.0)
    };
    Ok(y.clamp(-1.0, 1.0))
}

/// Exact rational from a float, for seeding exact orbits.
pub fn exact_from_f64(t: f64) -> Option<BigRational> {
    BigRational::from_float(t)
}

/// `p / q` as an exact rational in `[0, 1]`, clamped.
pub fn unit_rational(p: u64, q: u64) -> BigRational {
    let r = BigRational::new(p.into(), q.max(1).into());
    if r > BigRational::one() {
        BigRational::one()
    } else if r < BigRational::zero() {
        BigRational::zero()
    } else {
        r
    }
}
