//! Fixed points, periodic orbits, and their quadratic certificates.
//!
//! A periodic orbit with branch word `k_1 ... k_m` is a fixed point of the
//! composite `F_{k_m} ∘ ... ∘ F_{k_1}`. The composite is expanding on its
//! cylinder, so the point is found as the attracting fixed point of the
//! inverse composite and the orbit is rebuilt backwards through the
//! contracting inverse branches. Forward iteration is only used one step at a
//! time, to check that the orbit really follows its word.
//!
//! For `n = 4` in oriented coordinates every branch is an integer matrix, so the
//! composite is too and its fixed-point equation `c t^2 + (d - a) t - b = 0`
//! certifies each periodic point as rational or quadratic irrational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{circle_map, AnglePoint, PolygonConfig};
use crate::interval_map::{
    oriented_step, square_branch, square_orbit_exact, step_f, SymbolSequence,
};
use crate::moebius::{IntQuadratic, Moebius, Projective};

/// Longest word accepted by the periodic-point search.
pub const MAX_WORD_LEN: usize = 8;

/// Tolerance for "this point is a tangency point".
/// Parabolic fixed points are only located to about `sqrt(eps)`.
const PARABOLIC_TOL: f64 = 1e-6;

/// One-step residual above which a candidate orbit is rejected.
const STEP_TOL: f64 = 1e-10;

/// Coordinates in which words are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Chart {
    /// `[-t*, t*]` with tangency points at the ends, identified with each other.
    #[default]
    Centered,
    /// `[0, tan(pi/n)]` with no identification of the endpoints.
    Oriented,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPointReport {
    pub word: SymbolSequence,
    pub point: f64,
    /// The orbit, starting at `point`, one entry per symbol.
    pub orbit: Vec<f64>,
    /// Forward composite of the branch matrices along the word.
    pub matrix: Moebius<f64>,
    /// The same composite as a primitive integer matrix, in exact mode.
    pub integer_matrix: Option<[BigInt; 4]>,
    /// Integer annihilator of `point` of degree at most 2, in exact mode.
    pub min_poly: Option<IntQuadratic>,
    /// Present when `point` is rational and certified exactly.
    pub exact_point: Option<BigRational>,
    /// Period of the corresponding point of the circle map.
    pub circle_period: usize,
    /// Largest `|F(x_i) - x_{i+1}|` along the orbit.
    pub step_residual: f64,
    pub chart: Chart,
}

/// Result of [`enumerate_periodic`].
///
/// Orbits through a tangency point are kept apart from the interior ones.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeriodicTable {
    pub orbits: Vec<PeriodicPointReport>,
    pub parabolic: Vec<PeriodicPointReport>,
}

/// Measured circle period of a branch fixed point, next to both candidate formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CirclePeriodReport {
    pub k: usize,
    pub detected: usize,
    pub gcd: usize,
    pub n_over_gcd: usize,
}

impl CirclePeriodReport {
    pub fn matches_gcd(&self) -> bool {
        self.detected == self.gcd
    }

    pub fn matches_n_over_gcd(&self) -> bool {
        self.detected == self.n_over_gcd
    }
}

/// Options for [`periodic_points_with`] and [`enumerate_periodic_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchOptions {
    pub chart: Chart,
    /// Integer certificates; only available for `n = 4` in oriented coordinates.
    pub exact: bool,
}

/// The branch map in one chart, as seen by the search.
struct Dynamics<'a> {
    cfg: &'a PolygonConfig,
    chart: Chart,
}

impl Dynamics<'_> {
    fn domain(&self) -> (f64, f64) {
        match self.chart {
            Chart::Centered => (-self.cfg.t_star(), self.cfg.t_star()),
            Chart::Oriented => (0.0, self.cfg.tan_pi_n()),
        }
    }

    fn branch_domain(&self, k: usize) -> (f64, f64) {
        match self.chart {
            Chart::Centered => (self.cfg.branch_lo(k), self.cfg.branch_hi(k)),
            Chart::Oriented => {
                let cuts = self.cfg.oriented_cuts();
                let lo = if k == 1 { 0.0 } else { cuts[k - 2] };
                let hi = if k == self.cfg.n() - 1 { self.cfg.tan_pi_n() } else { cuts[k - 1] };
                (lo, hi)
            }
        }
    }

    fn branch(&self, k: usize) -> Result<&Moebius<f64>> {
        match self.chart {
            Chart::Centered => self.cfg.branch(k),
            Chart::Oriented => self.cfg.oriented_branch(k),
        }
    }

    fn step(&self, t: f64) -> Result<(f64, usize)> {
        match self.chart {
            Chart::Centered => step_f(t, self.cfg),
            Chart::Oriented => oriented_step(t, self.cfg),
        }
    }

    fn inverse(&self, y: f64, k: usize) -> Result<f64> {
        let x = self.branch(k)?.inverse().eval(y);
        let (lo, hi) = self.branch_domain(k);
        Ok(x.clamp(lo, hi))
    }

    fn is_parabolic(&self, t: f64) -> bool {
        let (lo, hi) = self.domain();
        (t - lo).abs() < PARABOLIC_TOL || (t - hi).abs() < PARABOLIC_TOL
    }

    fn snap_parabolic(&self, t: f64) -> f64 {
        let (lo, hi) = self.domain();
        if (t - lo).abs() < PARABOLIC_TOL {
            lo
        } else if (t - hi).abs() < PARABOLIC_TOL {
            hi
        } else {
            t
        }
    }

    fn composite(&self, word: &[usize]) -> Result<Moebius<f64>> {
        let mut m = Moebius::identity();
        for &k in word {
            m = self.branch(k)?.compose(&m);
        }
        Ok(m)
    }

    /// Orbit `x_0, ..., x_{m-1}` built backwards from a fixed point of the composite.
    fn orbit_from(&self, x0: f64, word: &[usize]) -> Result<Vec<f64>> {
        let m = word.len();
        let mut orbit = vec![0.0; m];
        let mut y = x0;
        for i in (0..m).rev() {
            y = self.inverse(y, word[i])?;
            orbit[i] = y;
        }
        Ok(orbit)
    }

    /// The periodic point of `word`, if the word is realized by an orbit.
    fn candidate(&self, word: &[usize]) -> Result<Option<(f64, Moebius<f64>)>> {
        let forward = self.composite(word)?;
        let backward = forward.inverse();
        let Ok(fixed) = backward.fixed_points() else {
            return Ok(None);
        };
        let (lo, hi) = self.domain();
        let best = fixed
            .points
            .iter()
            .filter_map(|p| p.finite().copied())
            .filter(|&x| x >= lo - PARABOLIC_TOL && x <= hi + PARABOLIC_TOL)
            .filter_map(|x| backward.derivative(&x).ok().map(|d| (x.clamp(lo, hi), d.abs())))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((mut x, slope)) = best else {
            return Ok(None);
        };
        if slope > 1.0 + 1e-9 {
            return Ok(None);
        }
        for _ in 0..3 {
            let orbit = self.orbit_from(x, word)?;
            x = orbit[0];
        }
        Ok(Some((x + 0.0, forward)))
    }

    /// Symbols and one-step residuals along the orbit.
    fn admissible(&self, orbit: &[f64], word: &[usize]) -> Result<Option<f64>> {
        let m = word.len();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            let (y, k) = self.step(orbit[i])?;
            if k != word[i] {
                return Ok(None);
            }
            worst = worst.max((y - orbit[(i + 1) % m]).abs());
        }
        Ok((worst < STEP_TOL).then_some(worst))
    }
}

fn circle_period_of_word(word: &[usize], n: usize) -> usize {
    let sum: usize = word.iter().sum();
    word.len() * n / sum.gcd(&n)
}

fn check_word(word: &SymbolSequence, cfg: &PolygonConfig) -> Result<()> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    if word.len() > MAX_WORD_LEN {
        return Err(Error::WordTooLong {
            len: word.len(),
            max: MAX_WORD_LEN,
        });
    }
    SymbolSequence::new(word.as_slice().to_vec(), cfg).map(|_| ())
}

/// The `n - 1` fixed points `s_k`, one per branch.
pub fn fixed_points_of_f(cfg: &PolygonConfig) -> Result<Vec<PeriodicPointReport>> {
    (1..cfg.n())
        .map(|k| {
            let branch = cfg.branch(k)?;
            let (lo, hi) = (cfg.branch_lo(k), cfg.branch_hi(k));
            let roots: Vec<f64> = branch
                .fixed_points()?
                .points
                .iter()
                .filter_map(|p| p.finite().copied())
                .filter(|&x| x >= lo - 1e-12 && x <= hi + 1e-12)
                .map(|x| x.clamp(lo, hi) + 0.0)
                .collect();
            let point = match roots[..] {
                [x] => x,
                [] => return Err(Error::NoFixedPointInBranch { k }),
                [x, y, ..] => return Err(Error::AmbiguousFixedPoint { k, roots: [x, y] }),
            };
            let (y, _) = step_f(point, cfg)?;
            Ok(PeriodicPointReport {
                word: SymbolSequence::new(vec![k], cfg)?,
                point,
                orbit: vec![point],
                matrix: branch.clone(),
                integer_matrix: None,
                min_poly: None,
                exact_point: None,
                circle_period: circle_period_of_word(&[k], cfg.n()),
                step_residual: (y - point).abs(),
                chart: Chart::Centered,
            })
        })
        .collect()
}

/// Iterates the circle map from the circle point of `s_k` until it returns.
///
/// The multiplier of `s_k` reaches `1e20` over `n` steps for `n = 12`, so the
/// orbit is re-anchored: each step applies [`circle_map`] once, checks that
/// the image is the current point rotated by `2 pi k / n`, and continues from
/// the rotated point.
pub fn circle_period(k: usize, cfg: &PolygonConfig) -> Result<CirclePeriodReport> {
    let fixed = fixed_points_of_f(cfg)?;
    let s = fixed
        .get(k.wrapping_sub(1))
        .ok_or(Error::InvalidSymbol { k, max: cfg.n() - 1 })?;
    let n = cfg.n();
    let g = k.gcd(&n);
    let turn = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
    let start = crate::geometry::angle_from_t(s.point);
    let mut z = start;
    for p in 1..=n {
        let image = circle_map(z, cfg);
        z = z.rotated(turn);
        if image.distance(z) > 1e-9 {
            break;
        }
        if z.distance(start) < 1e-9 {
            return Ok(CirclePeriodReport {
                k,
                detected: p,
                gcd: g,
                n_over_gcd: n / g,
            });
        }
    }
    Err(Error::NoReturn { k, n })
}

/// Periodic point of `word` in centered coordinates, if the word is admissible.
pub fn periodic_points(word: &SymbolSequence, cfg: &PolygonConfig) -> Result<Option<PeriodicPointReport>> {
    periodic_points_with(word, cfg, SearchOptions::default())
}

pub fn periodic_points_with(
    word: &SymbolSequence,
    cfg: &PolygonConfig,
    opts: SearchOptions,
) -> Result<Option<PeriodicPointReport>> {
    check_word(word, cfg)?;
    if opts.exact && (cfg.n() != 4 || opts.chart != Chart::Oriented) {
        return Err(Error::ExactUnavailable(cfg.n()));
    }
    let dynamics = Dynamics {
        cfg,
        chart: opts.chart,
    };
    let w = word.as_slice();
    let Some((point, matrix)) = dynamics.candidate(w)? else {
        return Ok(None);
    };
    let mut orbit = dynamics.orbit_from(point, w)?;
    if orbit.iter().any(|&x| dynamics.is_parabolic(x)) {
        orbit = orbit.into_iter().map(|x| dynamics.snap_parabolic(x)).collect();
    }
    let point = orbit[0];
    let Some(step_residual) = dynamics.admissible(&orbit, w)? else {
        return Ok(None);
    };
    let parabolic = orbit.iter().any(|&x| dynamics.is_parabolic(x));
    let mut report = PeriodicPointReport {
        word: word.clone(),
        point,
        orbit,
        matrix,
        integer_matrix: None,
        min_poly: None,
        exact_point: None,
        circle_period: if parabolic { 1 } else { circle_period_of_word(w, cfg.n()) },
        step_residual,
        chart: opts.chart,
    };
    if opts.exact {
        certify_square(&mut report)?;
    }
    Ok(Some(report))
}

/// Attaches integer certificates to an `n = 4` oriented report.
fn certify_square(report: &mut PeriodicPointReport) -> Result<()> {
    let mut exact = Moebius::<BigRational>::identity();
    for &k in report.word.as_slice() {
        exact = square_branch::<BigRational>(k)?.compose(&exact);
    }
    let fixed = exact.fixed_points_exact()?;
    let rational = fixed.rational_roots.iter().find_map(|p| match p {
        Projective::Finite(r) => {
            let close = (crate::moebius::Scalar::to_f64(r) - report.point).abs() < 1e-9;
            close.then(|| r.clone())
        }
        Projective::Infinity => None,
    });
    if let Some(r) = rational {
        let orbit = square_orbit_exact(&r, report.word.len())?;
        if orbit.symbols == report.word && orbit.points.last() == Some(&r) {
            report.exact_point = Some(r.clone());
        }
        report.min_poly = Some(IntQuadratic::linear_annihilator(&r));
    } else {
        report.min_poly = Some(fixed.polynomial);
    }
    report.integer_matrix = Some(exact.integer_coeffs());
    Ok(())
}

/// Lyndon words of length `1..=max_len` over `{1, ..., alphabet}`, in lexicographic order.
///
/// Each periodic orbit is listed exactly once: by its primitive word, rotated
/// to be lexicographically least.
pub fn lyndon_words(alphabet: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if alphabet == 0 || max_len == 0 {
        return out;
    }
    let mut w = vec![1];
    while !w.is_empty() {
        out.push(w.clone());
        let m = w.len();
        while w.len() < max_len {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&alphabet) {
            w.pop();
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out
}

/// All admissible periodic orbits with words up to `max_len`, in centered coordinates.
pub fn enumerate_periodic(max_len: usize, cfg: &PolygonConfig) -> Result<PeriodicTable> {
    enumerate_periodic_with(max_len, cfg, SearchOptions::default())
}

pub fn enumerate_periodic_with(
    max_len: usize,
    cfg: &PolygonConfig,
    opts: SearchOptions,
) -> Result<PeriodicTable> {
    if max_len > MAX_WORD_LEN {
        return Err(Error::WordTooLong {
            len: max_len,
            max: MAX_WORD_LEN,
        });
    }
    let words = lyndon_words(cfg.branch_count(), max_len);
    let reports: Vec<Option<PeriodicPointReport>> = words
        .into_par_iter()
        .map(|w| periodic_points_with(&SymbolSequence::new(w, cfg)?, cfg, opts))
        .collect::<Result<_>>()?;
    let dynamics = Dynamics {
        cfg,
        chart: opts.chart,
    };
    let mut table = PeriodicTable::default();
    for report in reports.into_iter().flatten() {
        if report.orbit.iter().any(|&x| dynamics.is_parabolic(x)) {
            table.parabolic.push(report);
        } else {
            table.orbits.push(report);
        }
    }
    if opts.chart == Chart::Centered && max_len >= 1 {
        table.parabolic.insert(0, tangency_report(cfg)?);
    }
    Ok(table)
}

/// The tangency point `t*`, fixed by branch 1 once `-t*` and `t*` are identified.
pub fn tangency_report(cfg: &PolygonConfig) -> Result<PeriodicPointReport> {
    let ts = cfg.t_star();
    let (y, k) = step_f(ts, cfg)?;
    Ok(PeriodicPointReport {
        word: SymbolSequence::new(vec![k], cfg)?,
        point: ts,
        orbit: vec![ts],
        matrix: cfg.branch(k)?.clone(),
        integer_matrix: None,
        min_poly: None,
        exact_point: None,
        circle_period: 1,
        step_residual: (y - ts).abs(),
        chart: Chart::Centered,
    })
}

/// Angle of a report's point on the circle, for plotting.
pub fn report_angle(report: &PeriodicPointReport, cfg: &PolygonConfig) -> AnglePoint {
    let t = match report.chart {
        Chart::Centered => report.point,
        Chart::Oriented => cfg.conjugacy().eval(report.point),
    };
    crate::geometry::angle_from_t(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::rational;

    fn cfg(n: usize) -> PolygonConfig {
        PolygonConfig::new(n).unwrap()
    }

    fn word(v: &[usize], c: &PolygonConfig) -> SymbolSequence {
        SymbolSequence::new(v.to_vec(), c).unwrap()
    }

    const EXACT: SearchOptions = SearchOptions {
        chart: Chart::Oriented,
        exact: true,
    };

    #[test]
    fn fixed_point_examples() {
        let f3 = fixed_points_of_f(&cfg(3)).unwrap();
        assert_eq!(f3.len(), 2);
        assert!((f3[0].point - 0.136_293_910_356_554_1).abs() < 1e-15);
        let f4 = fixed_points_of_f(&cfg(4)).unwrap();
        assert_eq!(f4[1].point, 0.0);
    }

    #[test]
    fn fixed_points_count_and_symmetry() {
        for n in 3..=12 {
            let c = cfg(n);
            let f = fixed_points_of_f(&c).unwrap();
            assert_eq!(f.len(), n - 1);
            for (i, r) in f.iter().enumerate() {
                assert!(r.step_residual < 1e-10, "n={n} k={}", i + 1);
                assert!((r.point + f[n - 2 - i].point).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn circle_period_examples() {
        assert_eq!(circle_period(2, &cfg(4)).unwrap().detected, 2);
        let r = circle_period(1, &cfg(4)).unwrap();
        assert_eq!(r.detected, 4);
        assert!(r.matches_n_over_gcd() && !r.matches_gcd());
        assert_eq!(circle_period(3, &cfg(6)).unwrap().detected, 2);
        for n in 3..=12 {
            let c = cfg(n);
            for k in 1..n {
                let r = circle_period(k, &c).unwrap();
                assert_eq!(n % r.detected, 0);
                assert!(r.matches_n_over_gcd(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn single_letter_words_match_fixed_points() {
        for n in 3..=8 {
            let c = cfg(n);
            let f = fixed_points_of_f(&c).unwrap();
            for k in 1..n {
                let r = periodic_points(&word(&[k], &c), &c).unwrap().unwrap();
                assert!((r.point - f[k - 1].point).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn word_length_is_capped() {
        let c = cfg(3);
        assert!(matches!(
            periodic_points(&word(&[1; 9], &c), &c),
            Err(Error::WordTooLong { len: 9, max: 8 })
        ));
        assert_eq!(periodic_points(&SymbolSequence::default(), &c), Err(Error::EmptyWord));
        assert!(enumerate_periodic(9, &c).is_err());
        assert_eq!(
            periodic_points_with(&word(&[1], &c), &c, EXACT),
            Err(Error::ExactUnavailable(3))
        );
    }

    #[test]
    fn lyndon_words_small_cases() {
        assert_eq!(
            lyndon_words(2, 3),
            vec![vec![1], vec![1, 1, 2], vec![1, 2], vec![1, 2, 2], vec![2]]
        );
        // Necklace-counting: 3 + 3 + 8 + 18 primitive words of length 1..4 over 3 letters.
        assert_eq!(lyndon_words(3, 4).len(), 32);
    }

    #[test]
    fn n3_short_words() {
        let c = cfg(3);
        // F_2 ∘ F_1 is parabolic with its double fixed point at t*, the tangency.
        assert_eq!(periodic_points(&word(&[1, 2], &c), &c).unwrap(), None);
        let table = enumerate_periodic(3, &c).unwrap();
        let words: Vec<&[usize]> = table.orbits.iter().map(|r| r.word.as_slice()).collect();
        assert!(words.contains(&&[1][..]) && words.contains(&&[2][..]));
        assert!(!words.contains(&&[1, 2][..]));
        for r in &table.orbits {
            let mut x = r.point;
            for _ in 0..2 * r.word.len() {
                x = step_f(x, &c).unwrap().0;
            }
            assert!((x - r.point).abs() < 1e-8, "{}", r.word);
        }
        assert_eq!(table.parabolic.len(), 1);
        assert_eq!(table.parabolic[0].point, c.t_star());
    }

    #[test]
    fn rotated_words_give_one_orbit() {
        let c = cfg(4);
        let a = periodic_points(&word(&[1, 2], &c), &c).unwrap().unwrap();
        let b = periodic_points(&word(&[2, 1], &c), &c).unwrap().unwrap();
        assert!((a.orbit[1] - b.point).abs() < 1e-12);
        let table = enumerate_periodic(2, &c).unwrap();
        let count = table.orbits.iter().filter(|r| r.word.len() == 2 && r.word.as_slice().contains(&1) && r.word.as_slice().contains(&2)).count();
        assert_eq!(count, 1);
    }

    #[test]
    fn max_len_one_gives_the_fixed_points() {
        for n in 3..=8 {
            let c = cfg(n);
            assert_eq!(enumerate_periodic(1, &c).unwrap().orbits.len(), n - 1);
        }
    }

    #[test]
    fn square_two_cycle_is_rational() {
        let c = cfg(4);
        let r = periodic_points_with(&word(&[1, 3], &c), &c, EXACT).unwrap().unwrap();
        assert_eq!(r.point, 0.0);
        assert_eq!(r.orbit, vec![0.0, 1.0]);
        assert_eq!(r.exact_point, Some(rational(0, 1)));
        assert_eq!(r.min_poly.as_ref().unwrap().degree(), Some(1));
        let table = enumerate_periodic_with(2, &c, EXACT).unwrap();
        assert_eq!(table.parabolic.len(), 1);
        assert_eq!(table.parabolic[0].word.as_slice(), &[1, 3]);
    }

    #[test]
    fn square_fixed_point_is_quadratic() {
        let c = cfg(4);
        let r = periodic_points_with(&word(&[1], &c), &c, EXACT).unwrap().unwrap();
        let p = r.min_poly.unwrap();
        // (3t - 1)/(t - 1) = t  <=>  t^2 - 4t + 1 = 0.
        assert_eq!(p.to_string(), "t^2 - 4t + 1");
        assert!((r.point - (2.0 - 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn square_irrational_two_cycle() {
        let c = cfg(4);
        let table = enumerate_periodic_with(2, &c, EXACT).unwrap();
        let r = table
            .orbits
            .iter()
            .find(|r| r.word.len() == 2 && r.min_poly.as_ref().unwrap().degree() == Some(2))
            .expect("an irrational 2-cycle");
        let p = r.min_poly.as_ref().unwrap();
        assert!(p.discriminant() > BigInt::from(0));
        assert!(p.relative_residual(r.point) < 1e-9);
    }

    #[test]
    fn oriented_and_centered_tables_agree() {
        for n in [3, 4, 5] {
            let c = cfg(n);
            let centered = enumerate_periodic(4, &c).unwrap();
            let oriented = enumerate_periodic_with(
                4,
                &c,
                SearchOptions {
                    chart: Chart::Oriented,
                    exact: false,
                },
            )
            .unwrap();
            let a: Vec<_> = centered.orbits.iter().map(|r| r.word.clone()).collect();
            let b: Vec<_> = oriented.orbits.iter().map(|r| r.word.clone()).collect();
            assert_eq!(a, b, "n={n}");
            for (x, y) in centered.orbits.iter().zip(&oriented.orbits) {
                assert!((c.conjugacy().eval(x.point) - y.point).abs() < 1e-10);
            }
        }
    }
}
