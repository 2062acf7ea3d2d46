//! Command-line front end: builtin scenarios, JSON configs and report emission.

mod config;
mod custom;
mod report;
mod scenarios;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{
    build_action, build_manifold, ActionSpec, AlgebraSpec, Format, GridSizes, InvariantSpec, ManifoldSpec, OutputSpec, PathSpec,
    ResolvedConfig, ScenarioConfig, DEFAULT_SEED,
};
pub use custom::{plot_series, run_custom};
pub use report::{fmt_f64, plot_csv, PlotSeries, Report, ReportRecord, CSV_HEADER};
pub use scenarios::{
    endpoint_identity_residual, groupoid_axiom_residual, integral_spread, jacobi_residual, lookup,
    multiplicativity_residuals, random_path_pairs, random_skew, run_builtin, scenario_names, torus_loop, Recorder,
    ScenarioInfo, HEISENBERG_COCYCLE, SCENARIOS,
};

use crate::{Error, Result};

/// Environment variable overriding the output directory.
pub const OUT_ENV: &str = "POISSONSYM_OUT";

#[derive(Debug, Parser)]
#[command(name = "poissonsym", version, about = "Verification scenarios for Poisson manifolds with symmetry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List builtin scenarios with their topics.
    List,
    /// Run a builtin scenario (or `all`), a config file, or both.
    Scenario(ScenarioArgs),
    /// Emit `(t, value)` integrand samples along the paths of a config.
    PlotData(PlotArgs),
}

#[derive(Debug, clap::Args)]
pub struct ScenarioArgs {
    /// Scenario name, or `all`; defaults to the config's `scenario` field.
    pub name: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for `<scenario>.json|csv`; stdout when absent.
    #[arg(long, env = OUT_ENV)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write zero runtimes, making reports byte-comparable across runs.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, clap::Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, env = OUT_ENV)]
    pub out: Option<PathBuf>,
}

/// Runs the named builtins (`all` for every one) followed by the config's
/// custom sections. Several builtins run on separate threads; records keep
/// registry order.
pub fn run_scenario(name: Option<&str>, cfg: &ScenarioConfig) -> Result<Report> {
    let names: Vec<&str> = match name.or(cfg.scenario.as_deref()) {
        Some("all") => scenario_names(),
        Some(n) => vec![lookup(n)?.name],
        None if cfg.has_custom_sections() => Vec::new(),
        None => {
            return Err(Error::Config(format!(
                "no scenario given; available: {}, all",
                scenario_names().join(", ")
            )))
        }
    };
    let mut records = Vec::new();
    let results: Vec<Result<Vec<ReportRecord>>> = if names.len() > 1 {
        std::thread::scope(|s| {
            let handles: Vec<_> = names.iter().map(|n| s.spawn(move || run_builtin(n, cfg))).collect();
            handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
        })
    } else {
        names.iter().map(|n| run_builtin(n, cfg)).collect()
    };
    for r in results {
        records.extend(r?);
    }
    if cfg.has_custom_sections() {
        records.extend(run_custom(cfg)?);
    }
    Ok(Report { records })
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig> {
    match path {
        Some(p) => ScenarioConfig::from_file(p),
        None => Ok(ScenarioConfig::default()),
    }
}

fn output_target(out: Option<PathBuf>, cfg: &ScenarioConfig) -> Option<PathBuf> {
    out.or_else(|| cfg.output.dir.clone())
}

fn write_output(dir: Option<&Path>, file: &str, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            std::fs::write(d.join(file), text)?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Executes a parsed command; returns the process exit code
/// (0 all checks pass, 1 some check failed).
pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::List => {
            for s in SCENARIOS {
                writeln!(stdout, "{:<18} {}  [{}]", s.name, s.summary, s.anchors.join(", "))?;
            }
            Ok(0)
        }
        Command::Scenario(args) => {
            let mut cfg = load_config(args.config.as_deref())?;
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            let format = args.format.or(cfg.output.format).unwrap_or(Format::Json);
            let mut report = run_scenario(args.name.as_deref(), &cfg)?;
            if args.no_timing {
                report = report.without_timing();
            }
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            let stem = args.name.as_deref().or(cfg.scenario.as_deref()).unwrap_or("custom");
            let ext = match format {
                Format::Json => "json",
                Format::Csv => "csv",
            };
            write_output(output_target(args.out, &cfg).as_deref(), &format!("{stem}.{ext}"), &text, stdout)?;
            let failed: Vec<&ReportRecord> = report.failures().collect();
            for r in &failed {
                writeln!(
                    stderr,
                    "FAIL {}/{}: residual {} > tolerance {}",
                    r.scenario,
                    r.check,
                    fmt_f64(r.residual),
                    fmt_f64(r.tolerance)
                )?;
            }
            writeln!(stderr, "{} checks, {} failed", report.records.len(), failed.len())?;
            Ok(i32::from(!failed.is_empty()))
        }
        Command::PlotData(args) => {
            let cfg = ScenarioConfig::from_file(&args.config)?;
            let series = plot_series(&cfg.resolve()?)?;
            write_output(output_target(args.out, &cfg).as_deref(), "plot-data.csv", &plot_csv(&series), stdout)?;
            Ok(0)
        }
    }
}

/// Parses `std::env::args`, runs, and maps errors to exit code 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
