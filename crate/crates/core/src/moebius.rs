//! Fractional-linear maps `t -> (a t + b) / (c t + d)` on the projective line.
//!
//! [`Moebius`] is generic over a [`Scalar`] backend:
//!
//! * `f64`: coefficients rescaled to unit Frobenius norm after every
//!   composition so that long products never overflow.
//! * [`TwoFloat`]: the same normalization at roughly 106 bits of precision.
//! * [`BigRational`]: exact arithmetic. Matrices are kept as primitive integer
//!   matrices, so fixed points come with an integer quadratic certificate.
//!
//! All backends canonicalize the sign so that the first nonzero coefficient is
//! positive. Two matrices that differ by a scalar factor therefore compare
//! equal after construction (exactly for rationals, up to rounding otherwise).

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Coefficient field of a [`Moebius`] map.
pub trait Scalar:
    Clone + PartialEq + PartialOrd + fmt::Debug + Num + Neg<Output = Self> + Send + Sync
{
    /// Rescales a coefficient matrix `[a, b, c, d]` to its canonical representative.
    fn canonicalize(m: [Self; 4]) -> [Self; 4];

    /// Whether `det` is zero relative to the size of `m`.
    fn is_singular(det: &Self, m: &[Self; 4]) -> bool;

    fn to_f64(&self) -> f64;

    fn from_f64(x: f64) -> Self;

    /// `self / rhs` at the full precision of the backend.
    fn quotient(self, rhs: Self) -> Self {
        self / rhs
    }
}

fn frobenius_f64(m: &[f64; 4]) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn leading_sign<T: Scalar>(m: &[T; 4]) -> bool {
    m.iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| *x < T::zero())
}

impl Scalar for f64 {
    fn canonicalize(m: [f64; 4]) -> [f64; 4] {
        let norm = frobenius_f64(&m);
        let scale = if leading_sign(&m) { -1.0 / norm } else { 1.0 / norm };
        m.map(|x| x * scale)
    }

    // Written negated so a NaN determinant counts as singular.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn is_singular(det: &f64, m: &[f64; 4]) -> bool {
        let norm = frobenius_f64(m);
        !(det.abs() > 1e-14 * norm * norm)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Scalar for TwoFloat {
    fn canonicalize(m: [TwoFloat; 4]) -> [TwoFloat; 4] {
        let norm_sq = m.iter().fold(TwoFloat::from(0.0), |acc, x| acc + *x * *x);
        let norm = norm_sq.sqrt();
        let norm = if leading_sign(&m) { -norm } else { norm };
        m.map(|x| x.quotient(norm))
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn is_singular(det: &TwoFloat, m: &[TwoFloat; 4]) -> bool {
        let hi = m.map(|x| x.hi());
        let norm = frobenius_f64(&hi);
        !(det.hi().abs() > 1e-28 * norm * norm)
    }

    fn to_f64(&self) -> f64 {
        self.hi() + self.lo()
    }

    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }

    /// twofloat 0.8 divides two double-doubles to f64 accuracy only, so the
    /// quotient gets one correction step from the exact residual.
    fn quotient(self, rhs: Self) -> Self {
        let q = self / rhs;
        let r = self - q * rhs;
        q + r / rhs.hi()
    }
}

impl Scalar for BigRational {
    fn canonicalize(m: [BigRational; 4]) -> [BigRational; 4] {
        let lcm = m
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = m
            .iter()
            .map(|x| x.numer() * (&lcm / x.denom()))
            .collect();
        let mut gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if gcd.is_zero() {
            return m;
        }
        if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            gcd = -gcd;
        }
        let mut out = ints.into_iter().map(|x| BigRational::from_integer(x / &gcd));
        [
            out.next().unwrap(),
            out.next().unwrap(),
            out.next().unwrap(),
            out.next().unwrap(),
        ]
    }

    fn is_singular(det: &BigRational, _m: &[BigRational; 4]) -> bool {
        det.is_zero()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }
}

/// A point of the projective line.
#[derive(Debug, Clone, PartialEq)]
pub enum Projective<T> {
    Finite(T),
    Infinity,
}

impl<T> Projective<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Projective::Infinity)
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Projective::Finite(t) => Some(t),
            Projective::Infinity => None,
        }
    }

    pub fn into_finite(self) -> Option<T> {
        match self {
            Projective::Finite(t) => Some(t),
            Projective::Infinity => None,
        }
    }
}

impl Projective<f64> {
    /// Maps any non-finite float to the point at infinity.
    pub fn from_f64(t: f64) -> Self {
        if t.is_finite() {
            Projective::Finite(t)
        } else {
            Projective::Infinity
        }
    }

    /// Collapses to a float, with `+inf` standing for the point at infinity.
    pub fn to_f64(&self) -> f64 {
        match self {
            Projective::Finite(t) => *t,
            Projective::Infinity => f64::INFINITY,
        }
    }
}

impl<T: Scalar> Projective<T> {
    pub fn approx(&self) -> Projective<f64> {
        match self {
            Projective::Finite(t) => Projective::from_f64(t.to_f64()),
            Projective::Infinity => Projective::Infinity,
        }
    }
}

/// The map `t -> (a t + b) / (c t + d)`, stored as a canonical 2x2 matrix.
#[derive(Clone, PartialEq)]
pub struct Moebius<T> {
    m: [T; 4],
}

impl<T: fmt::Debug> fmt::Debug for Moebius<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.m;
        write!(f, "Moebius[[{a:?}, {b:?}], [{c:?}, {d:?}]]")
    }
}

impl<T: Scalar> Moebius<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let m = [a, b, c, d];
        let det = m[0].clone() * m[3].clone() - m[1].clone() * m[2].clone();
        if T::is_singular(&det, &m) {
            return Err(Error::SingularMatrix { det: det.to_f64() });
        }
        Ok(Self { m: T::canonicalize(m) })
    }

    pub fn identity() -> Self {
        Self {
            m: T::canonicalize([T::one(), T::zero(), T::zero(), T::one()]),
        }
    }

    /// Coefficients `[a, b, c, d]` of the canonical representative.
    pub fn coeffs(&self) -> &[T; 4] {
        &self.m
    }

    pub fn det(&self) -> T {
        let [a, b, c, d] = &self.m;
        a.clone() * d.clone() - b.clone() * c.clone()
    }

    pub fn trace(&self) -> T {
        self.m[0].clone() + self.m[3].clone()
    }

    pub fn is_identity(&self) -> bool {
        let [a, b, c, d] = &self.m;
        b.is_zero() && c.is_zero() && a == d
    }

    pub fn apply(&self, t: &Projective<T>) -> Projective<T> {
        let [a, b, c, d] = &self.m;
        match t {
            Projective::Infinity => {
                if c.is_zero() {
                    Projective::Infinity
                } else {
                    Projective::Finite(a.clone().quotient(c.clone()))
                }
            }
            Projective::Finite(t) => {
                let den = c.clone() * t.clone() + d.clone();
                if den.is_zero() {
                    Projective::Infinity
                } else {
                    Projective::Finite((a.clone() * t.clone() + b.clone()).quotient(den))
                }
            }
        }
    }

    pub fn apply_finite(&self, t: &T) -> Projective<T> {
        self.apply(&Projective::Finite(t.clone()))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let [a1, b1, c1, d1] = &self.m;
        let [a2, b2, c2, d2] = &other.m;
        let prod = [
            a1.clone() * a2.clone() + b1.clone() * c2.clone(),
            a1.clone() * b2.clone() + b1.clone() * d2.clone(),
            c1.clone() * a2.clone() + d1.clone() * c2.clone(),
            c1.clone() * b2.clone() + d1.clone() * d2.clone(),
        ];
        Self {
            m: T::canonicalize(prod),
        }
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = &self.m;
        Self {
            m: T::canonicalize([d.clone(), -b.clone(), -c.clone(), a.clone()]),
        }
    }

    /// `(ad - bc) / (ct + d)^2`.
    pub fn derivative(&self, t: &T) -> Result<T> {
        let [_, _, c, d] = &self.m;
        let den = c.clone() * t.clone() + d.clone();
        if den.is_zero() {
            return Err(Error::Pole { t: t.to_f64() });
        }
        Ok(self.det().quotient(den.clone() * den))
    }

    /// Coefficients `[c, d - a, -b]` of the fixed-point equation `c t^2 + (d - a) t - b = 0`.
    pub fn fixed_point_polynomial(&self) -> [T; 3] {
        let [a, b, c, d] = &self.m;
        [c.clone(), d.clone() - a.clone(), -b.clone()]
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Moebius<U> {
        Moebius {
            m: U::canonicalize(self.m.clone().map(|x| f(&x))),
        }
    }

    pub fn to_f64(&self) -> Moebius<f64> {
        self.map_scalar(|x| x.to_f64())
    }
}

/// Real roots of `a x^2 + b x + c`, computed without cancellation.
///
/// Degenerates to the linear case when `a == 0`. Returns roots in ascending order.
pub fn real_quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        let r = (-c / a).sqrt();
        (-r, r)
    } else {
        (q / a, c / q)
    };
    if r1 <= r2 {
        vec![r1, r2]
    } else {
        vec![r2, r1]
    }
}

/// Fixed points of a float map together with the discriminant `(d - a)^2 + 4bc`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoints {
    pub points: Vec<Projective<f64>>,
    pub discriminant: f64,
}

impl Moebius<f64> {
    /// Evaluates at a float, with `+inf` standing in for the point at infinity
    /// on both input and output. Never returns NaN.
    pub fn eval(&self, t: f64) -> f64 {
        self.apply(&Projective::from_f64(t)).to_f64()
    }

    pub fn is_near_identity(&self, tol: f64) -> bool {
        let [a, b, c, d] = self.m;
        b.abs() <= tol && c.abs() <= tol && (a - d).abs() <= tol
    }

    pub fn fixed_points(&self) -> Result<FixedPoints> {
        if self.is_near_identity(1e-14) {
            return Err(Error::IdentityMap);
        }
        let [a, b, c, d] = self.m;
        let discriminant = (d - a) * (d - a) + 4.0 * b * c;
        // A parabolic map rounds to a discriminant of either sign; keep its double root.
        let scale = a * a + b * b + c * c + d * d;
        let roots = if discriminant < 0.0 && -discriminant <= 1e-12 * scale && c != 0.0 {
            vec![-(d - a) / (2.0 * c)]
        } else {
            real_quadratic_roots(c, d - a, -b)
        };
        let mut points: Vec<Projective<f64>> = roots.into_iter().map(Projective::Finite).collect();
        if c == 0.0 {
            points.push(Projective::Infinity);
        }
        Ok(FixedPoints {
            points,
            discriminant,
        })
    }
}

impl Moebius<BigRational> {
    pub fn from_integers(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let r = |x: i64| BigRational::from_integer(BigInt::from(x));
        Self::new(r(a), r(b), r(c), r(d))
    }

    /// The primitive integer matrix representing this map.
    pub fn integer_coeffs(&self) -> [BigInt; 4] {
        self.m.clone().map(|x| x.to_integer())
    }

    /// The fixed-point equation as a primitive integer polynomial.
    pub fn fixed_point_quadratic(&self) -> IntQuadratic {
        let [c2, c1, c0] = self.fixed_point_polynomial().map(|x| x.to_integer());
        IntQuadratic::new(c2, c1, c0)
    }

    pub fn fixed_points_exact(&self) -> Result<ExactFixedPoints> {
        if self.is_identity() {
            return Err(Error::IdentityMap);
        }
        let polynomial = self.fixed_point_quadratic();
        let discriminant = polynomial.discriminant();
        let mut rational_roots: Vec<Projective<BigRational>> = polynomial
            .rational_roots()
            .into_iter()
            .map(Projective::Finite)
            .collect();
        let mut approx_roots: Vec<Projective<f64>> = polynomial
            .real_roots_f64()
            .into_iter()
            .map(Projective::Finite)
            .collect();
        if self.m[2].is_zero() {
            rational_roots.push(Projective::Infinity);
            approx_roots.push(Projective::Infinity);
        }
        Ok(ExactFixedPoints {
            polynomial,
            discriminant,
            rational_roots,
            approx_roots,
        })
    }
}

/// Exact fixed-point data of an integer Moebius map.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactFixedPoints {
    pub polynomial: IntQuadratic,
    pub discriminant: BigInt,
    /// Present only when the discriminant is a perfect square.
    pub rational_roots: Vec<Projective<BigRational>>,
    pub approx_roots: Vec<Projective<f64>>,
}

/// A primitive integer polynomial `c2 t^2 + c1 t + c0` of degree at most 2.
///
/// Stored with coprime coefficients and a positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntQuadratic {
    coeffs: [BigInt; 3],
}

impl IntQuadratic {
    pub fn new(c2: BigInt, c1: BigInt, c0: BigInt) -> Self {
        let mut coeffs = [c2, c1, c0];
        let mut content = coeffs.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !content.is_zero() {
            if coeffs.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                content = -content;
            }
            for c in coeffs.iter_mut() {
                *c = &*c / &content;
            }
        }
        Self { coeffs }
    }

    /// The monic-up-to-content linear annihilator `q t - p` of `p / q`.
    pub fn linear_annihilator(root: &BigRational) -> Self {
        Self::new(BigInt::zero(), root.denom().clone(), -root.numer().clone())
    }

    /// Coefficients `[c2, c1, c0]`.
    pub fn coeffs(&self) -> &[BigInt; 3] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| 2 - i)
    }

    pub fn discriminant(&self) -> BigInt {
        let [a, b, c] = &self.coeffs;
        b * b - BigInt::from(4) * a * c
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let [a, b, c] = self.coeffs.clone().map(|x| x.to_f64().unwrap_or(f64::NAN));
        (a * t + b) * t + c
    }

    pub fn eval_rational(&self, t: &BigRational) -> BigRational {
        let [a, b, c] = self.coeffs.clone().map(BigRational::from_integer);
        (a * t + b) * t + c
    }

    /// Residual of `self` at `t`, scaled by the coefficient size.
    pub fn relative_residual(&self, t: f64) -> f64 {
        let scale = self
            .coeffs
            .iter()
            .zip([t * t, t.abs(), 1.0])
            .map(|(c, w)| c.to_f64().unwrap_or(f64::INFINITY).abs() * w)
            .sum::<f64>();
        if scale == 0.0 {
            0.0
        } else {
            self.eval_f64(t).abs() / scale
        }
    }

    /// Exact rational roots, available when the polynomial splits over Q.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let [a, b, c] = &self.coeffs;
        match self.degree() {
            Some(1) => vec![BigRational::new(-c.clone(), b.clone())],
            Some(2) => {
                let disc = self.discriminant();
                if disc.is_negative() {
                    return Vec::new();
                }
                let root = disc.sqrt();
                if &root * &root != disc {
                    return Vec::new();
                }
                let two_a = BigInt::from(2) * a;
                let mut roots = vec![
                    BigRational::new(-b - &root, two_a.clone()),
                    BigRational::new(-b + &root, two_a),
                ];
                roots.sort();
                roots.dedup();
                roots
            }
            _ => Vec::new(),
        }
    }

    pub fn real_roots_f64(&self) -> Vec<f64> {
        let [a, b, c] = self.coeffs.clone().map(|x| x.to_f64().unwrap_or(f64::NAN));
        if self.degree() == Some(0) || self.degree().is_none() {
            return Vec::new();
        }
        real_quadratic_roots(a, b, c)
    }

    /// Degree 2 with a non-square discriminant: roots are quadratic irrationals.
    pub fn is_irreducible_quadratic(&self) -> bool {
        self.degree() == Some(2) && self.rational_roots().is_empty()
    }

    /// The minimal polynomial of `root`, which must be a root of `self`.
    pub fn minimal_polynomial_of(&self, root: &Projective<BigRational>) -> Self {
        match root {
            Projective::Finite(r) if self.degree() == Some(2) && !self.is_irreducible_quadratic() => {
                Self::linear_annihilator(r)
            }
            _ => self.clone(),
        }
    }
}

impl fmt::Display for IntQuadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .zip(["t^2", "t", ""])
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, x)| match (c.to_i8(), x.is_empty()) {
                (Some(1), false) => x.to_string(),
                (Some(-1), false) => format!("-{x}"),
                _ => format!("{c}{x}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + ").replace("+ -", "- "))
        }
    }
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rational_from_usize(x: usize) -> BigRational {
    BigRational::from_usize(x).expect("usize fits a bigint")
}
