//! The four subcommands, mapped onto the library and the exit-code
//! contract: input-side problems are usage errors (exit 1), analysis and
//! output failures are runtime errors (exit 2).

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use metafib::csvio;
use metafib::dsl::{parse, validate, ValidatedSpec};
use metafib::eval::{compile, run, History, RunConfig, RunOutcome, RunStatus};
use metafib::families::Family;
use metafib::genstats::{alpha_series, deviations, Deviation, GenerationScheme, StatsError};
use metafib::mortality::{sweep, SweepConfig};
use metafib::plot::{render, PlotError, PlotSpec, Series};

use crate::args::{Cli, Command, EvalArgs, PlotArgs, PointSource, StatsArgs, SweepArgs};

/// Parallel sweeps must opt into large budgets one flag at a time: refuse
/// configurations whose worst case tops this many bytes across workers.
const GLOBAL_BUDGET_LIMIT: u64 = 16 << 30;

/// Series are subsampled to at most this many points unless --stride says
/// otherwise.
const MAX_POINTS_PER_SERIES: u64 = 100_000;

#[derive(Debug)]
pub enum CliError {
    /// Arguments or input files are unusable; exit code 1.
    Usage(String),
    /// The analysis or its output failed; exit code 2.
    Runtime(String),
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn runtime(message: impl Into<String>) -> CliError {
    CliError::Runtime(message.into())
}

/// Loads a rule from a preset name or a rule file.
fn load_spec(preset: Option<&str>, rule_file: Option<&Path>) -> Result<ValidatedSpec, CliError> {
    match (preset, rule_file) {
        (Some(name), None) => {
            let family: Family = name.parse().map_err(|e| usage(format!("{e}")))?;
            family.spec().map_err(|e| usage(format!("{e}")))
        }
        (None, Some(path)) => {
            let source = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let spec = parse(&source).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            validate(&spec).map_err(|diagnostics| {
                let lines: Vec<String> = diagnostics.iter().map(|d| format!("  - {d}")).collect();
                usage(format!(
                    "{} failed validation:\n{}",
                    path.display(),
                    lines.join("\n")
                ))
            })
        }
        _ => unreachable!("clap enforces exactly one rule source"),
    }
}

fn preset_spec(name: &str) -> Result<ValidatedSpec, CliError> {
    load_spec(Some(name), None)
}

/// Runs a validated spec after checking the cap actually allows stepping.
fn run_spec(
    spec: &ValidatedSpec,
    cap: u64,
    budget: u64,
    width: crate::args::WidthArg,
) -> Result<(History, RunOutcome), CliError> {
    if cap <= spec.start_after() {
        return Err(usage(format!(
            "--cap {cap} does not exceed the rule's threshold {}",
            spec.start_after()
        )));
    }
    let config = RunConfig {
        cap_n: cap,
        budget_bytes: usize::try_from(budget)
            .map_err(|_| usage(format!("--budget {budget} does not fit this platform")))?,
        width: width.into(),
    };
    Ok(run(&compile(spec), spec.init(), &config))
}

fn create_out(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn write_failed(path: &Path, e: std::io::Error) -> CliError {
    runtime(format!("writing {} failed: {e}", path.display()))
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let spec = load_spec(args.preset.as_deref(), args.rule_file.as_deref())?;
    let (history, outcome) = run_spec(&spec, args.cap, args.budget, args.width)?;

    let mut out = create_out(&args.out)?;
    csvio::write_terms(&mut out, &history).map_err(|e| write_failed(&args.out, e))?;
    out.flush().map_err(|e| write_failed(&args.out, e))?;

    let max_term = history.iter().max().unwrap_or(0);
    let died_at = outcome
        .died_at
        .map_or_else(|| "null".to_string(), |n| n.to_string());
    println!(
        "{{\"status\":\"{}\",\"length\":{},\"died_at\":{died_at},\"max_term\":{max_term}}}",
        outcome.status, outcome.final_length
    );
    match outcome.status {
        RunStatus::Died | RunStatus::CapReached => Ok(()),
        status => Err(runtime(format!("run ended early: {status}"))),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let (k_first, k_last) = args.k;
    let total_budget = (args.jobs as u64).saturating_mul(args.budget);
    if total_budget > GLOBAL_BUDGET_LIMIT {
        return Err(usage(format!(
            "{} jobs x {} bytes budget = {total_budget} bytes exceeds the {GLOBAL_BUDGET_LIMIT}-byte limit; lower --jobs or --budget",
            args.jobs, args.budget
        )));
    }
    if args.cap <= k_last {
        return Err(usage(format!(
            "--cap {} does not exceed the largest threshold k={k_last}",
            args.cap
        )));
    }
    let config = SweepConfig {
        k_first,
        k_last,
        run: RunConfig {
            cap_n: args.cap,
            budget_bytes: usize::try_from(args.budget)
                .map_err(|_| usage("--budget does not fit this platform"))?,
            width: args.width.into(),
        },
        workers: args.jobs,
        measure_time: !args.no_timing,
    };
    let records = sweep(&config).map_err(|e| usage(format!("{e}")))?;

    let mut out = create_out(&args.out)?;
    csvio::write_mortality(&mut out, &records).map_err(|e| write_failed(&args.out, e))?;
    out.flush().map_err(|e| write_failed(&args.out, e))?;

    let longest = records
        .iter()
        .filter(|r| r.status == RunStatus::Died)
        .max_by_key(|r| r.l);
    match longest {
        Some(r) => println!(
            "{} rows -> {}; max L = {} at k = {}",
            records.len(),
            args.out.display(),
            r.l.expect("died rows carry a length"),
            r.k
        ),
        None => println!(
            "{} rows -> {}; no deaths up to cap {}",
            records.len(),
            args.out.display(),
            args.cap
        ),
    }
    let failed: Vec<u64> = records
        .iter()
        .filter(|r| r.l.is_none())
        .map(|r| r.k)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(runtime(format!(
            "{} run(s) failed (budget or overflow) at k = {failed:?}",
            failed.len()
        )))
    }
}

/// Rebuilds a history from an eval CSV so stats can run offline.
fn history_from_csv(path: &Path) -> Result<History, CliError> {
    let file =
        File::open(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let values = csvio::read_terms(BufReader::new(file))
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let budget = (values.len() * 8).max(1 << 16) * 2;
    let mut history = History::new(metafib::eval::ElementWidth::W64, budget);
    for v in values {
        history
            .push(v)
            .map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(history)
}

fn stats_error(e: StatsError) -> CliError {
    match e {
        StatsError::ZeroStart | StatsError::EmptyScheme | StatsError::BoundariesNotIncreasing => {
            usage(format!("{e}"))
        }
        _ => runtime(format!("{e}")),
    }
}

fn cmd_stats(args: StatsArgs) -> Result<(), CliError> {
    let history = match (&args.preset, &args.input) {
        (Some(name), None) => {
            let cap = args
                .cap
                .ok_or_else(|| usage("--preset needs --cap to know how far to evaluate"))?;
            let spec = preset_spec(name)?;
            let (history, outcome) = run_spec(&spec, cap, args.budget, args.width)?;
            if let RunStatus::BudgetExceeded | RunStatus::Overflow = outcome.status {
                return Err(runtime(format!(
                    "evaluating {name} ended early: {} after {} terms",
                    outcome.status, outcome.final_length
                )));
            }
            history
        }
        (None, Some(path)) => history_from_csv(path)?,
        _ => unreachable!("clap enforces exactly one terms source"),
    };

    let scheme = match &args.boundaries {
        Some(boundaries) => GenerationScheme::Explicit {
            boundaries: boundaries.clone(),
        },
        None => GenerationScheme::Geometric {
            n0: args.n0,
            n_max: args.nmax.unwrap_or_else(|| history.len()),
        },
    };
    let windows = scheme.segment().map_err(stats_error)?;
    let (lo, hi) = (windows[0].lo + 1, windows[windows.len() - 1].hi);
    let devs = deviations(&history, lo, hi).map_err(stats_error)?;
    let stats = metafib::genstats::moments(&devs, &windows).map_err(stats_error)?;
    let alphas = alpha_series(&stats);

    if let Some(path) = &args.out {
        let mut out = create_out(path)?;
        csvio::write_stats(&mut out, &stats, &alphas).map_err(|e| write_failed(path, e))?;
        out.flush().map_err(|e| write_failed(path, e))?;
    }
    for a in &alphas {
        match a.alpha {
            Some(v) => println!("alpha({}) = {v}", a.t),
            None => println!(
                "alpha({}) undefined: generation {} has zero spread",
                a.t,
                a.t - 1
            ),
        }
    }
    for note in &stats.notes {
        println!("note: {note}");
    }
    Ok(())
}

/// Applies the window and stride to raw points.
fn sample(points: Vec<(f64, f64)>, stride: Option<u64>) -> Vec<(f64, f64)> {
    let stride = stride
        .unwrap_or_else(|| (points.len() as u64).div_ceil(MAX_POINTS_PER_SERIES))
        .max(1);
    points.into_iter().step_by(stride as usize).collect()
}

fn series_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_plot(args: PlotArgs) -> Result<(), CliError> {
    if args.inputs.is_empty() && args.preset.is_none() {
        return Err(usage("nothing to plot: pass --in files and/or --preset"));
    }
    let in_window = |x: f64| x >= args.nmin as f64 && args.nmax.is_none_or(|m| x <= m as f64);

    let mut series = Vec::new();
    for path in &args.inputs {
        let file =
            File::open(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let points = csvio::read_points(BufReader::new(file))
            .map_err(|e| usage(format!("{}: {e}", path.display())))?
            .into_iter()
            .filter(|&(x, _)| in_window(x))
            .collect();
        series.push(Series {
            label: series_label(path),
            points: sample(points, args.stride),
        });
    }

    if let Some(name) = &args.preset {
        let cap = args.cap.or(args.nmax).ok_or_else(|| {
            usage("a preset series needs --cap or --nmax to know how far to evaluate")
        })?;
        let spec = preset_spec(name)?;
        // The store width is not worth a flag here: plot caps are small and
        // the points end up as f64 regardless.
        let (history, outcome) = run_spec(&spec, cap, args.budget, crate::args::WidthArg::W64)?;
        if let RunStatus::BudgetExceeded | RunStatus::Overflow = outcome.status {
            return Err(runtime(format!(
                "evaluating {name} ended early: {} after {} terms",
                outcome.status, outcome.final_length
            )));
        }
        let hi = args
            .nmax
            .unwrap_or_else(|| history.len())
            .min(history.len());
        let lo = args.nmin.max(1);
        let (label, points) = match args.points {
            PointSource::Terms => (
                name.clone(),
                (lo..=hi)
                    .filter_map(|n| history.term(n).map(|v| (n as f64, v as f64)))
                    .collect(),
            ),
            PointSource::Deviations => {
                let devs: Vec<Deviation> = if lo <= hi {
                    deviations(&history, lo, hi).map_err(stats_error)?
                } else {
                    Vec::new()
                };
                (
                    format!("{name} S(n)"),
                    devs.iter().map(|d| (d.n as f64, d.s())).collect(),
                )
            }
        };
        series.push(Series {
            label,
            points: sample(points, args.stride),
        });
    }

    let point_total: usize = series.iter().map(|s| s.points.len()).sum();
    let spec = PlotSpec {
        series,
        x_range: args.xrange,
        y_range: args.yrange,
        width: args.width,
        height: args.height,
        point_radius: args.point_size,
    };
    let svg = render(&spec).map_err(|e| match e {
        PlotError::NoSeries => usage(format!("{e}")),
        _ => runtime(format!("{e}")),
    })?;
    std::fs::write(&args.out, svg).map_err(|e| write_failed(&args.out, e))?;
    println!(
        "{} series, {point_total} points -> {}",
        spec.series.len(),
        args.out.display()
    );
    Ok(())
}
