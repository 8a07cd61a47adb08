use std::path::Path;

use finite_gauss::interval_map::{distance_to_cut, oriented_orbit};
use finite_gauss::measure::{
    density_angle, density_t, preimage_measure_residual, telescoping_residual, transfer_operator_residual,
    triangle_density_residual,
};
use finite_gauss::periodic::{enumerate_periodic_with, Chart, SearchOptions};
use finite_gauss::sphere3d::{simulate_histogram, sphere_map, CAP_RADII};
use finite_gauss::*;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{fmt_float, num, nums, write_csv, RunReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] finite_gauss::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Library(e) => match e {
                Error::NormDrift { .. }
                | Error::NoReturn { .. }
                | Error::NoFixedPointInBranch { .. }
                | Error::AmbiguousFixedPoint { .. } => 1,
                _ => 2,
            },
            CliError::Io(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;
type Outcome = CliResult<Run>;

/// A finished command: the report plus lines for the human summary.
pub struct Run {
    pub report: RunReport,
    pub summary: Vec<String>,
    /// CSV went to stdout, so the summary belongs on stderr.
    pub csv_on_stdout: bool,
}

impl Run {
    fn new(report: RunReport, summary: Vec<String>) -> Self {
        Self {
            report,
            summary,
            csv_on_stdout: false,
        }
    }
}

/// Writes CSV to `out`, or to stdout unless the JSON report owns it.
fn emit_csv(
    run: &mut Run,
    out: Option<&Path>,
    json: bool,
    header: &[&str],
    rows: &[Vec<String>],
) -> CliResult<()> {
    if let Some(path) = out {
        write_csv(Some(path), header, rows)?;
        run.report.outputs.push(path.display().to_string());
    } else if !json {
        write_csv(None, header, rows)?;
        run.csv_on_stdout = true;
    }
    Ok(())
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

fn need_positive(name: &str, value: usize) -> CliResult<()> {
    if value == 0 {
        return Err(CliError::Usage(format!("--{name} must be positive")));
    }
    Ok(())
}

pub fn verify(n: usize, samples: usize, tol: f64, seed: u64) -> Outcome {
    need_positive("samples", samples)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let cfg = PolygonConfig::new(n)?;
    let ts = cfg.t_star();
    let edge = 0.999 * ts;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<f64> = (0..samples).map(|_| rng.gen_range(-edge..edge)).collect();
    let intervals: Vec<(f64, f64)> = (0..samples)
        .map(|_| {
            let (x, y) = (rng.gen_range(-edge..edge), rng.gen_range(-edge..edge));
            if x <= y { (x, y) } else { (y, x) }
        })
        .collect();
    let oriented: Vec<f64> = (0..samples).map(|_| rng.gen_range(0.0..=cfg.tan_pi_n())).collect();

    let transfer: Vec<f64> = points
        .par_iter()
        .map(|&t| transfer_operator_residual(t, &cfg))
        .collect::<Result<_>>()?;
    let telescoping: Vec<f64> = points
        .par_iter()
        .map(|&t| telescoping_residual(t, &cfg))
        .collect::<Result<_>>()?;
    let preimage: Vec<f64> = intervals
        .par_iter()
        .map(|&(a, b)| preimage_measure_residual(a, b, &cfg))
        .collect::<Result<_>>()?;
    let h = cfg.conjugacy();
    let conjugacy: Vec<f64> = oriented
        .par_iter()
        .filter(|&&s| distance_to_cut(h.eval(s), &cfg) > 1e-12)
        .map(|&s| Ok((oriented_map(s, &cfg)? - h.eval(step_f(h.eval(s), &cfg)?.0)).abs()))
        .collect::<Result<_>>()?;

    let mut report = RunReport::new("verify");
    report.param("n", n);
    report.param("samples", samples);
    report.param("tol", tol);
    report.param("seed", seed);
    report.check("transfer", max_of(transfer), tol);
    report.check("telescoping", max_of(telescoping), tol);
    report.check("preimage-measure", max_of(preimage), tol);
    report.check("conjugacy", max_of(conjugacy), tol);
    let summary = vec![format!("n = {n}, t* = {}, {samples} samples, seed {seed}", fmt_float(ts))];
    Ok(Run::new(report, summary))
}

pub fn orbit(n: usize, t0: f64, steps: usize, oriented: bool, out: Option<&Path>, json: bool) -> Outcome {
    let cfg = PolygonConfig::new(n)?;
    let rec = if oriented {
        oriented_orbit(t0, steps, &cfg)?
    } else {
        encode_orbit(t0, steps, &cfg)?
    };
    let symbols = rec.symbols.as_slice();
    let rows: Vec<Vec<String>> = rec
        .points
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let symbol = symbols.get(i).map_or(String::new(), |k| k.to_string());
            vec![i.to_string(), fmt_float(t), symbol]
        })
        .collect();

    let mut report = RunReport::new("orbit");
    report.param("n", n);
    report.param("t0", t0);
    report.param("steps", steps);
    report.param("oriented", oriented);
    if !oriented {
        let round_trip = symbols
            .iter()
            .zip(rec.points.windows(2))
            .map(|(&k, w)| inverse_branch(w[1], k, &cfg).map(|x| (x - w[0]).abs()))
            .collect::<Result<Vec<f64>>>()?;
        report.check("round-trip", max_of(round_trip), 1e-10);
    }
    report.results = json!({
        "points": nums(&rec.points),
        "symbols": symbols,
        "escaped_at": rec.escaped_at,
    });
    let mut summary = Vec::new();
    if out.is_some() {
        summary.push(format!("{} points written", rec.points.len()));
    }
    if let Some(i) = rec.escaped_at {
        summary.push(format!("stopped at step {i}: point lies on a branch boundary"));
    }
    let mut run = Run::new(report, summary);
    emit_csv(&mut run, out, json, &["step", "t", "symbol"], &rows)?;
    Ok(run)
}

pub fn encode(n: usize, t0: f64, digits: usize) -> Outcome {
    need_positive("digits", digits)?;
    let cfg = PolygonConfig::new(n)?;
    let rec = encode_orbit(t0, digits, &cfg)?;
    let mut report = RunReport::new("encode");
    report.param("n", n);
    report.param("t0", t0);
    report.param("digits", digits);
    let mut summary = vec![format!("symbols: {}", rec.symbols)];
    let mut results = json!({
        "symbols": rec.symbols.as_slice(),
        "escaped_at": rec.escaped_at,
    });
    if !rec.symbols.is_empty() {
        let (lo, hi) = cylinder_interval(&rec.symbols, &cfg)?;
        let outside = (lo - t0).max(t0 - hi).max(0.0);
        report.check("cylinder-contains-t0", outside, 1e-12);
        summary.push(format!("cylinder: [{}, {}], width {}", fmt_float(lo), fmt_float(hi), fmt_float(hi - lo)));
        results["cylinder"] = nums(&[lo, hi]);
    }
    if let Some(i) = rec.escaped_at {
        summary.push(format!("expansion ends after {i} digits: point lies on a branch boundary"));
    }
    report.results = results;
    Ok(Run::new(report, summary))
}

fn big_json(x: &num_bigint::BigInt) -> Value {
    i64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

fn rational_json(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

fn report_json(r: &PeriodicPointReport) -> Value {
    json!({
        "word": r.word.as_slice(),
        "point": num(r.point),
        "orbit": nums(&r.orbit),
        "matrix": nums(r.matrix.coeffs()),
        "integer_matrix": r.integer_matrix.as_ref().map(|m| m.iter().map(big_json).collect::<Vec<_>>()),
        "min_poly": r.min_poly.as_ref().map(|p| json!({
            "coeffs": p.coeffs().iter().map(big_json).collect::<Vec<_>>(),
            "text": p.to_string(),
        })),
        "exact_point": r.exact_point.as_ref().map(rational_json),
        "circle_period": r.circle_period,
        "step_residual": num(r.step_residual),
        "chart": match r.chart {
            Chart::Centered => "centered",
            Chart::Oriented => "oriented",
        },
    })
}

fn report_line(r: &PeriodicPointReport) -> String {
    let mut line = format!(
        "{:<12} {}  circle period {}",
        r.word.to_string(),
        fmt_float(r.point),
        r.circle_period
    );
    if let Some(p) = &r.min_poly {
        line.push_str(&format!("  {p} = 0"));
    }
    line
}

pub fn periodic(n: usize, max_len: usize, oriented: bool, exact: bool) -> Outcome {
    need_positive("max-len", max_len)?;
    let cfg = PolygonConfig::new(n)?;
    let opts = SearchOptions {
        chart: if oriented { Chart::Oriented } else { Chart::Centered },
        exact,
    };
    let table = enumerate_periodic_with(max_len, &cfg, opts)?;
    let mut report = RunReport::new("periodic");
    report.param("n", n);
    report.param("max_len", max_len);
    report.param("oriented", oriented);
    report.param("exact", exact);
    let all = || table.orbits.iter().chain(&table.parabolic);
    report.check("periodic-step", max_of(all().map(|r| r.step_residual)), 1e-10);
    if exact {
        let certificate = max_of(all().map(|r| match &r.min_poly {
            Some(p) if p.degree().is_some_and(|d| d <= 2) => p.relative_residual(r.point),
            _ => f64::INFINITY,
        }));
        report.check("quadratic-certificate", certificate, 1e-9);
    }
    report.results = json!({
        "orbits": table.orbits.iter().map(report_json).collect::<Vec<_>>(),
        "parabolic": table.parabolic.iter().map(report_json).collect::<Vec<_>>(),
    });
    let mut summary = vec![format!(
        "{} orbits, {} through a tangency point",
        table.orbits.len(),
        table.parabolic.len()
    )];
    summary.extend(table.orbits.iter().map(report_line));
    if !table.parabolic.is_empty() {
        summary.push("through a tangency point:".into());
        summary.extend(table.parabolic.iter().map(report_line));
    }
    Ok(Run::new(report, summary))
}

pub fn triangle(a: f64, samples: usize, seed: u64) -> Outcome {
    need_positive("samples", samples)?;
    let p = TriangleParam::new(a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<f64> = (0..samples).map(|_| rng.gen_range(-0.999..0.999)).collect();
    let residuals = points
        .iter()
        .map(|&t| triangle_density_residual(t, p))
        .collect::<Result<Vec<f64>>>()?;
    let excursion = points
        .iter()
        .map(|&t| triangle_map(t, p).map(|y| (y.abs() - 1.0).max(0.0)))
        .collect::<Result<Vec<f64>>>()?;
    let mut report = RunReport::new("triangle");
    report.param("a", a);
    report.param("samples", samples);
    report.param("seed", seed);
    report.check("stays-in-interval", max_of(excursion), 1e-15);
    report.check("invariant-density", max_of(residuals.iter().copied()), 1e-10);
    let mean = residuals.iter().sum::<f64>() / samples as f64;
    report.results = json!({ "mean_residual": num(mean) });
    let summary = vec![format!("a = {a}, density |1/(t^2 - 1)|, mean residual {}", fmt_float(mean))];
    Ok(Run::new(report, summary))
}

pub fn sphere(
    iterations: u64,
    bins: usize,
    burn_in: u64,
    seed: u64,
    workers: usize,
    out: Option<&Path>,
    json: bool,
) -> Outcome {
    let tetra = TetraConfig::new();
    let params = SimulationParams {
        seed,
        iterations,
        bins,
        burn_in,
        workers,
        ..Default::default()
    };
    let hist = simulate_histogram(&params, &tetra)?;
    let area = hist.bin_area();
    let rows: Vec<Vec<String>> = (0..hist.bands)
        .flat_map(|band| (0..hist.azimuth_bins).map(move |sector| (band, sector)))
        .map(|(band, sector)| {
            vec![
                band.to_string(),
                sector.to_string(),
                hist.count(band, sector).to_string(),
                fmt_float(area),
            ]
        })
        .collect();
    let fixed = max_of(tetra.touch_points.iter().map(|&p| {
        let w = sphere_map(SpherePoint::from_raw(p), &tetra).coords();
        (0..3).map(|i| (w[i] - p[i]).abs()).fold(0.0, f64::max)
    }));
    let caps: Vec<f64> = (0..CAP_RADII.len()).map(|i| hist.cap_density(i)).collect();
    let cap_ratio = max_of(caps.windows(2).map(|w| w[0] / w[1]));

    let mut report = RunReport::new("sphere");
    report.param("iterations", iterations);
    report.param("bins", bins);
    report.param("burn_in", burn_in);
    report.param("seed", seed);
    report.param("workers", workers);
    report.param("streams", params.streams);
    report.check("norm-drift", hist.max_drift, 1e-6);
    report.check("touch-points-fixed", fixed, 1e-12);
    report.check("cap-density-increases", cap_ratio, 1.0);
    report.results = json!({
        "total": hist.total,
        "discarded": hist.discarded,
        "binned": hist.binned(),
        "max_drift": num(hist.max_drift),
        "cap_radii": CAP_RADII,
        "cap_densities": nums(&caps),
        "touch_bin_ranks": hist.touch_bin_ranks(&tetra),
    });
    let summary = vec![
        format!("{} steps, {} binned after burn-in", hist.total, hist.binned()),
        format!(
            "cap densities at radii {CAP_RADII:?}: {}",
            caps.iter().map(|&d| fmt_float(d)).collect::<Vec<_>>().join(", ")
        ),
    ];
    let mut run = Run::new(report, summary);
    emit_csv(&mut run, out, json, &["band", "azimuth_bin", "count", "bin_area"], &rows)?;
    Ok(run)
}

pub fn density(n: usize, grid: usize, out: Option<&Path>, json: bool) -> Outcome {
    if grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let cfg = PolygonConfig::new(n)?;
    let ts = cfg.t_star();
    let mut rows = Vec::with_capacity(grid);
    let mut jacobian = Vec::new();
    let mut samples = Vec::with_capacity(grid);
    for i in 0..grid {
        let t = if i + 1 == grid { ts } else { -ts + 2.0 * ts * i as f64 / (grid - 1) as f64 };
        let rho_t = density_t(t, &cfg)?.value;
        let phi = angle_from_t(t);
        let rho_phi = density_angle(phi, &cfg).value;
        if rho_t.is_finite() && rho_phi.is_finite() {
            let expected = rho_t * (1.0 + t * t) / 2.0;
            jacobian.push((rho_phi - expected).abs() / expected);
        }
        rows.push(vec![fmt_float(t), fmt_float(rho_t), fmt_float(phi.value()), fmt_float(rho_phi)]);
        samples.push(json!({ "t": num(t), "rho_t": num(rho_t), "phi": num(phi.value()), "rho_phi": num(rho_phi) }));
    }
    let mut report = RunReport::new("density");
    report.param("n", n);
    report.param("grid", grid);
    report.check("chart-jacobian", max_of(jacobian), 1e-12);
    report.results = json!({ "samples": samples });
    let mut run = Run::new(report, Vec::new());
    emit_csv(&mut run, out, json, &["t", "rho_t", "phi", "rho_phi"], &rows)?;
    Ok(run)
}
