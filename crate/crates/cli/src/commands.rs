//! The four subcommands. Each takes resolved [`CommonArgs`] plus writers for
//! standard output and standard error, so they can be driven from tests.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use eppm_core::analysis::{bound_curve, frontier_schemes, spectral_efficiency_frontier, FrontierPoint, SchemeSpec};
use eppm_core::channel::{db_to_linear, run_ber_sweep, BerEstimate, MonteCarloConfig};
use eppm_core::constellation::{build_eppm, Scheme};
use eppm_core::design::{
    brute_force_search, cyclic_design_for_length, load_difference_set, BibdParams, DifferenceSet,
    DEFAULT_SEARCH_BUDGET,
};
use serde::{Deserialize, Serialize};

use crate::config::{CommonArgs, GammaGrid, Preset, SchemeArg};
use crate::plot::{Plot, Series, Style};
use crate::CliError;

/// Version of the CSV layouts below; bumped on any column change.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_FRONTIER_BER: f64 = 1e-5;
const DEFAULT_GRID: (f64, f64, f64) = (0.0, 16.0, 1.0);

/// One row of `bounds` or `simulate` output. Columns that do not apply are
/// left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub scheme: String,
    pub q: Option<usize>,
    pub k: Option<usize>,
    pub lambda: Option<usize>,
    pub m: usize,
    pub gamma_db: f64,
    pub eta: f64,
    pub ser_bound: Option<f64>,
    pub ber_bound: Option<f64>,
    pub trials: Option<u64>,
    pub symbol_errors: Option<u64>,
    pub bit_errors: Option<u64>,
    pub ser_sim: Option<f64>,
    pub ber_sim: Option<f64>,
    pub ci95: Option<f64>,
}

impl CurveRow {
    fn bound(spec: &SchemeSpec, gamma_db: f64) -> Self {
        let g = db_to_linear(gamma_db);
        Self {
            scheme: spec.scheme().name().to_string(),
            q: Some(spec.q()),
            k: Some(spec.k()),
            lambda: spec.lambda(),
            m: spec.m(),
            gamma_db,
            eta: spec.eta(),
            ser_bound: Some(spec.ser_bound(g)),
            ber_bound: Some(spec.ber_bound(g)),
            trials: None,
            symbol_errors: None,
            bit_errors: None,
            ser_sim: None,
            ber_sim: None,
            ci95: None,
        }
    }

    fn with_estimate(mut self, est: &BerEstimate) -> Self {
        self.trials = Some(est.trials);
        self.symbol_errors = Some(est.symbol_errors);
        self.bit_errors = Some(est.bit_errors);
        self.ser_sim = Some(est.ser);
        self.ber_sim = Some(est.ber);
        self.ci95 = Some(est.ci95_halfwidth);
        self
    }
}

/// One row of `frontier` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub scheme: String,
    pub q: Option<usize>,
    pub k: Option<usize>,
    pub lambda: Option<usize>,
    pub m: usize,
    pub eta: f64,
    pub target_ber: f64,
    pub required_gamma_db: f64,
}

impl FrontierRow {
    fn new(p: &FrontierPoint, target_ber: f64) -> Self {
        Self {
            scheme: p.spec.scheme().name().to_string(),
            q: Some(p.spec.q()),
            k: Some(p.spec.k()),
            lambda: p.spec.lambda(),
            m: p.spec.m(),
            eta: p.eta,
            target_ber,
            required_gamma_db: p.required_gamma_db,
        }
    }
}

/// A scheme to evaluate, with the difference set backing EPPM/AEPPM.
#[derive(Debug, Clone)]
pub struct Target {
    pub spec: SchemeSpec,
    pub design: Option<DifferenceSet>,
}

/// Built-in construction for `q`, or a search when `(k, λ)` is given and
/// the built-in family does not produce it.
pub fn find_design(q: usize, k: Option<usize>, lambda: Option<usize>) -> Result<DifferenceSet, CliError> {
    match (k, lambda) {
        (None, None) => Ok(cyclic_design_for_length(q)?),
        (Some(k), Some(lambda)) => {
            let params = BibdParams::new(q, k, lambda)?;
            if let Ok(ds) = cyclic_design_for_length(q) {
                if ds.params() == params {
                    return Ok(ds);
                }
            }
            Ok(brute_force_search(params, DEFAULT_SEARCH_BUDGET)?)
        }
        _ => Err(CliError::Usage("--k and --lambda must be given together".into())),
    }
}

fn read_design(path: &Path) -> Result<DifferenceSet, CliError> {
    let file = File::open(path).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(load_difference_set(BufReader::new(file))?)
}

fn require(v: Option<usize>, flag: &str, scheme: &str) -> Result<usize, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{scheme} needs --{flag}")))
}

fn preset_targets(preset: Preset) -> Result<Vec<Target>, CliError> {
    let (ppm_q, design_q, eppm_m) = match preset {
        Preset::Small => (8, 11, None),
        Preset::Large => (64, 67, Some(64)),
    };
    let ds = cyclic_design_for_length(design_q)?;
    let p = ds.params();
    Ok(vec![
        Target { spec: SchemeSpec::ppm(ppm_q)?, design: None },
        Target { spec: SchemeSpec::mppm(12, 2, Some(64))?, design: None },
        Target { spec: SchemeSpec::eppm(p, eppm_m)?, design: Some(ds.clone()) },
        Target { spec: SchemeSpec::aeppm(p, None)?, design: Some(ds) },
    ])
}

/// Schemes selected by `--preset` or `--scheme` and its parameters.
pub fn resolve_targets(args: &CommonArgs) -> Result<Vec<Target>, CliError> {
    match (args.preset, args.scheme) {
        (Some(_), Some(_)) => Err(CliError::Usage("--preset and --scheme are mutually exclusive".into())),
        (None, None) => Err(CliError::Usage("one of --scheme or --preset is required".into())),
        (Some(p), None) => preset_targets(p),
        (None, Some(s)) => Ok(vec![scheme_target(s, args)?]),
    }
}

fn scheme_target(s: SchemeArg, args: &CommonArgs) -> Result<Target, CliError> {
    Ok(match s {
        SchemeArg::Ook => Target { spec: SchemeSpec::Ook, design: None },
        SchemeArg::Ppm => {
            let q = require(args.q, "q", "ppm")?;
            if let Some(m) = args.m {
                if m != SchemeSpec::ppm(q)?.m() {
                    return Err(CliError::Usage(format!("PPM with q={q} maps {} symbols", SchemeSpec::ppm(q)?.m())));
                }
            }
            Target { spec: SchemeSpec::ppm(q)?, design: None }
        }
        SchemeArg::Mppm => {
            let q = require(args.q, "q", "mppm")?;
            let k = require(args.k, "k", "mppm")?;
            Target { spec: SchemeSpec::mppm(q, k, args.m)?, design: None }
        }
        SchemeArg::Eppm | SchemeArg::Aeppm => {
            let ds = match args.design_file() {
                Some(path) => {
                    let ds = read_design(path)?;
                    let p = ds.params();
                    let given = [(args.q, p.q(), "q"), (args.k, p.k(), "k"), (args.lambda, p.lambda(), "lambda")];
                    for (flag, actual, name) in given {
                        if flag.is_some_and(|v| v != actual) {
                            return Err(CliError::Usage(format!("--{name} disagrees with design file ({p})")));
                        }
                    }
                    ds
                }
                None => find_design(require(args.q, "q", "eppm")?, args.k, args.lambda)?,
            };
            let spec = if s == SchemeArg::Eppm {
                SchemeSpec::eppm(ds.params(), args.m)?
            } else {
                SchemeSpec::aeppm(ds.params(), args.m)?
            };
            Target { spec, design: Some(ds) }
        }
    })
}

fn grid(args: &CommonArgs) -> Result<Vec<f64>, CliError> {
    let (start, stop, step) = DEFAULT_GRID;
    let g = GammaGrid::new(
        args.gamma_start_db.unwrap_or(start),
        args.gamma_stop_db.unwrap_or(stop.max(args.gamma_start_db.unwrap_or(start))),
        args.gamma_step_db.unwrap_or(step),
    )?;
    Ok(g.points())
}

fn write_csv<T: Serialize>(rows: &[T], args: &CommonArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    match &args.out {
        Some(path) => std::fs::write(path, &buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

fn write_svg(plot: &Plot, args: &CommonArgs) -> Result<(), CliError> {
    if let Some(path) = &args.svg {
        std::fs::write(path, plot.render())?;
    }
    Ok(())
}

/// `design`: construct, verify, and print a difference set.
pub fn cmd_design(args: &CommonArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let ds = match args.design_file() {
        Some(path) => read_design(path)?,
        None => find_design(
            args.q.ok_or_else(|| CliError::Usage("design needs --q or --design-file".into()))?,
            args.k,
            args.lambda,
        )?,
    };
    let report = ds.verify();
    if !report.passed() {
        return Err(CliError::Construction(report.to_string()));
    }
    let c = build_eppm(&ds.expand());
    let distances: Vec<usize> =
        (0..c.m()).flat_map(|i| (i + 1..c.m()).map(move |j| (i, j))).map(|(i, j)| c.hamming(i, j)).collect();
    let (lo, hi) = (distances.iter().min().copied().unwrap_or(0), distances.iter().max().copied().unwrap_or(0));

    let line = format!("{ds}\n");
    match &args.out {
        Some(path) => std::fs::write(path, &line)?,
        None => stdout.write_all(line.as_bytes())?,
    }
    writeln!(stdout, "# verification: {report}")?;
    if lo == hi {
        writeln!(stdout, "# pairwise distance: {lo} (all {} pairs)", distances.len())?;
    } else {
        writeln!(stdout, "# pairwise distance: {lo}..{hi}")?;
    }
    Ok(())
}

/// Analytic bound rows for every target over the grid.
pub fn bound_rows(targets: &[Target], gamma_db: &[f64]) -> Vec<CurveRow> {
    targets
        .iter()
        .flat_map(|t| bound_curve(t.spec, gamma_db).points.into_iter().map(move |p| CurveRow::bound(&t.spec, p.gamma_db)))
        .collect()
}

fn curve_plot(title: &str, targets: &[Target], rows: &[CurveRow], simulated: bool) -> Plot {
    let mut series = Vec::new();
    for (i, t) in targets.iter().enumerate() {
        let name = t.spec.to_string();
        let mine: Vec<&CurveRow> = rows.iter().filter(|r| r.m == t.spec.m() && r.scheme == t.spec.scheme().name() && r.q == Some(t.spec.q())).collect();
        series.push(Series {
            name: format!("{name} bound"),
            points: mine.iter().map(|r| (r.gamma_db, r.ber_bound.unwrap_or(f64::NAN))).collect(),
            style: Style::Line,
            color: i,
        });
        if simulated {
            series.push(Series {
                name: format!("{name} sim"),
                points: mine.iter().map(|r| (r.gamma_db, r.ber_sim.unwrap_or(f64::NAN))).collect(),
                style: Style::Markers,
                color: i,
            });
        }
    }
    Plot { title: title.into(), x_label: "γ (dB)".into(), y_label: "BER".into(), log_y: true, series }
}

/// `bounds`: union-bound SER/BER curves as CSV.
pub fn cmd_bounds(args: &CommonArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let targets = resolve_targets(args)?;
    let gamma_db = grid(args)?;
    let rows = bound_rows(&targets, &gamma_db);
    write_csv(&rows, args, stdout)?;
    write_svg(&curve_plot("Union bounds", &targets, &rows, false), args)
}

pub fn monte_carlo_config(args: &CommonArgs) -> Result<MonteCarloConfig, CliError> {
    let defaults = MonteCarloConfig::default();
    let cfg = MonteCarloConfig {
        seed: args.seed.unwrap_or(DEFAULT_SEED),
        min_trials: 0,
        max_trials: args.max_trials.unwrap_or(defaults.max_trials),
        target_errors: args.target_errors.unwrap_or(defaults.target_errors),
        target_ber: args.target_ber,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Simulated rows with the matching bound columns, in grid order per target.
pub fn simulate_rows(targets: &[Target], gamma_db: &[f64], cfg: &MonteCarloConfig) -> Result<Vec<CurveRow>, CliError> {
    let mut rows = Vec::new();
    for t in targets {
        let c = t.spec.build(t.design.as_ref())?;
        let est = run_ber_sweep(&c, gamma_db, cfg)?;
        rows.extend(gamma_db.iter().zip(&est).map(|(&db, e)| CurveRow::bound(&t.spec, db).with_estimate(e)));
    }
    Ok(rows)
}

/// `simulate`: Monte-Carlo BER sweep joined with bound columns.
pub fn cmd_simulate(args: &CommonArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let targets = resolve_targets(args)?;
    let gamma_db = grid(args)?;
    let cfg = monte_carlo_config(args)?;
    if args.workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    if targets.iter().any(|t| t.spec.scheme() == Scheme::Mppm) {
        writeln!(
            stderr,
            "note: MPPM uses natural-binary labels; its ber_bound column is the best-case P_s/log2(M)"
        )?;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let rows = pool.install(|| simulate_rows(&targets, &gamma_db, &cfg))?;
    write_csv(&rows, args, stdout)?;
    write_svg(&curve_plot("Simulated BER and union bounds", &targets, &rows, true), args)
}

/// Frontier rows for the default scheme families.
pub fn frontier_rows(target_ber: f64) -> Result<Vec<FrontierRow>, CliError> {
    if !(target_ber > 0.0 && target_ber < 0.5) {
        return Err(CliError::Usage(format!("target BER must be in (0, 0.5), got {target_ber}")));
    }
    let points = spectral_efficiency_frontier(&frontier_schemes()?, target_ber)?;
    Ok(points.iter().map(|p| FrontierRow::new(p, target_ber)).collect())
}

/// `frontier`: spectral efficiency against required γ at a target BER.
pub fn cmd_frontier(args: &CommonArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let target = args.target_ber.unwrap_or(DEFAULT_FRONTIER_BER);
    let rows = frontier_rows(target)?;
    write_csv(&rows, args, stdout)?;
    let mut series: Vec<Series> = Vec::new();
    for r in &rows {
        let name = r.scheme.clone();
        match series.iter_mut().find(|s| s.name == name) {
            Some(s) => s.points.push((r.required_gamma_db, r.eta)),
            None => {
                let color = series.len();
                let style = if name == "OOK" { Style::Markers } else { Style::LineMarkers };
                series.push(Series { name, points: vec![(r.required_gamma_db, r.eta)], style, color });
            }
        }
    }
    let plot = Plot {
        title: format!("Spectral efficiency at BER {target:e}"),
        x_label: "required γ (dB)".into(),
        y_label: "η (bit/slot)".into(),
        log_y: false,
        series,
    };
    write_svg(&plot, args)
}
