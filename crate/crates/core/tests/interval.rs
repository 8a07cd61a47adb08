use finite_gauss::interval_map::{
    distance_to_cut, exact_from_f64, oriented_step, square_map, square_orbit_exact, unit_rational,
};
use finite_gauss::*;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg(n: usize) -> PolygonConfig {
    PolygonConfig::new(n).unwrap()
}

#[test]
fn oriented_map_is_conjugate_to_branch_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for n in 3..=8 {
        let c = cfg(n);
        let h = c.conjugacy();
        for _ in 0..1000 {
            let s = rng.gen_range(0.0..c.tan_pi_n());
            let t = h.eval(s);
            if distance_to_cut(t, &c) < 1e-12 {
                continue;
            }
            let direct = oriented_map(s, &c).unwrap();
            let via = h.eval(step_f(t, &c).unwrap().0);
            assert!((direct - via).abs() < 1e-10, "n={n} s={s}");
        }
    }
}

#[test]
fn inverse_branch_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    for n in 3..=12 {
        let c = cfg(n);
        let ts = c.t_star();
        for _ in 0..10_000 {
            let t = rng.gen_range(-ts..=ts);
            let (y, k) = step_f(t, &c).unwrap();
            assert!((inverse_branch(y, k, &c).unwrap() - t).abs() < 1e-10);
        }
    }
}

#[test]
fn square_map_matches_branch_formulas() {
    let c = cfg(4);
    let formulas: [fn(f64) -> f64; 3] = [
        |t| (3.0 * t - 1.0) / (t - 1.0),
        |t| 1.0 / t - 2.0,
        |t| (t - 1.0) / (1.0 - 3.0 * t),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..1000 {
        let s: f64 = rng.gen_range(0.0..=1.0);
        let (y, k) = oriented_step(s, &c).unwrap();
        assert!((y - formulas[k - 1](s)).abs() < 1e-12, "s={s} k={k}");
    }
}

#[test]
fn rational_orbits_stay_rational() {
    let start = unit_rational(3, 5);
    let orbit = square_orbit_exact(&start, 6).unwrap();
    let expected = [(3, 5), (1, 2), (0, 1), (1, 1), (0, 1), (1, 1), (0, 1)].map(|(p, q)| unit_rational(p, q));
    assert_eq!(orbit.points, expected);
    assert_eq!(orbit.symbols.as_slice(), &[3, 2, 1, 3, 1, 3]);
}

#[test]
fn float_and_exact_square_orbits_agree_for_fifty_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    let mut worst = 0.0f64;
    let mut disagreeing = 0;
    for _ in 0..100 {
        let q = rng.gen_range(1..=10_000u64);
        let p = rng.gen_range(0..=q);
        let exact = square_orbit_exact(&unit_rational(p, q), 50).unwrap();
        let mut x = p as f64 / q as f64;
        let mut gap = 0.0f64;
        for e in &exact.points[1..] {
            x = square_map(&x).unwrap().0;
            gap = gap.max((x - Scalar::to_f64(e)).abs());
        }
        worst = worst.max(gap);
        disagreeing += usize::from(gap >= 1e-9);
    }
    assert!(worst < 1e-9, "{disagreeing} of 100 orbits disagree, worst gap {worst:e}");
}

#[test]
fn cylinders_nest_and_contain_their_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(204);
    for n in 3..=8 {
        let c = cfg(n);
        let ts = c.t_star();
        for _ in 0..200 {
            let t = rng.gen_range(-ts..ts);
            let rec = encode_orbit(t, 12, &c).unwrap();
            let mut prev = (-ts, ts);
            for m in 1..=rec.symbols.len() {
                let word = SymbolSequence::new(rec.symbols.as_slice()[..m].to_vec(), &c).unwrap();
                let (lo, hi) = cylinder_interval(&word, &c).unwrap();
                assert!(lo - 1e-12 <= t && t <= hi + 1e-12, "n={n} t={t} m={m}");
                assert!(hi - lo <= prev.1 - prev.0 + 1e-15, "n={n} t={t} m={m}");
                prev = (lo, hi);
            }
        }
    }
}

#[test]
fn depth_twenty_square_cylinders_are_narrow() {
    let c = cfg(4);
    let ts = c.t_star();
    let mut rng = ChaCha8Rng::seed_from_u64(205);
    let mut wide = Vec::new();
    for _ in 0..1000 {
        let t = rng.gen_range(-ts..ts);
        let rec = encode_orbit(t, 20, &c).unwrap();
        let word = SymbolSequence::new(rec.symbols.into_vec(), &c).unwrap();
        let (lo, hi) = cylinder_interval(&word, &c).unwrap();
        if hi - lo >= 1e-3 {
            wide.push((t, hi - lo));
        }
    }
    assert!(wide.is_empty(), "{} of 1000 cylinders are wider than 1e-3, e.g. {:?}", wide.len(), &wide[..wide.len().min(3)]);
}

#[test]
fn exact_conversion_is_lossless() {
    let x = 0.1f64;
    let r: BigRational = exact_from_f64(x).unwrap();
    assert_eq!(Scalar::to_f64(&r), x);
    assert!(exact_from_f64(f64::NAN).is_none());
}

proptest! {
    #[test]
    fn step_stays_in_domain(n in 3usize..=12, u in -1.0f64..=1.0) {
        let c = cfg(n);
        let t = u * c.t_star();
        let (y, k) = step_f(t, &c).unwrap();
        prop_assert!(y.abs() <= c.t_star());
        prop_assert!((1..n).contains(&k));
        prop_assert!(c.branch_lo(k) <= t && t <= c.branch_hi(k));
    }

    #[test]
    fn triangle_map_stays_in_unit_interval(a in 1.01f64..50.0, t in -1.0f64..=1.0) {
        let p = TriangleParam::new(a).unwrap();
        let y = triangle_map(t, p).unwrap();
        prop_assert!((-1.0..=1.0).contains(&y));
    }
}
