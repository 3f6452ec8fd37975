//! Command-line harness: job-file driven analyses of skew-evolution systems
//! with structured reports and CSV output.

use skewflow_cli::{csv, job, report, runner};

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use skewflow_core::corpus::{
    builtin, default_states, random_triples, BuiltinName, BuiltinParams, CeVariant,
};
use skewflow_core::criteria::{estimate_exponent, ExponentDirection, ExponentSearch};
use skewflow_core::{Horizon, VerdictConfig};

#[derive(Parser)]
#[command(name = "skewflow", version, about = "certificates for asymptotic behavior of discrete linear cocycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BuiltinArgs {
    /// Built-in fixture name (see `skewflow list-builtins`)
    #[arg(long)]
    builtin: String,
    /// Fixture variant where applicable: paper | corrected
    #[arg(long)]
    variant: Option<String>,
    /// Discrete horizon
    #[arg(long, default_value_t = 50)]
    n_max: u32,
    /// Number of sampled base points
    #[arg(long, default_value_t = 4)]
    states: usize,
    /// Number of random unit vectors on top of the coordinate ones
    #[arg(long, default_value_t = 8)]
    vectors: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Run every analysis requested by a job file
    Analyze {
        job: PathBuf,
        /// Redirect outputs: report to OUT/report.txt, CSVs to OUT/csv
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Unknown job keys are errors (default)
        #[arg(long, overrides_with = "lenient")]
        strict: bool,
        /// Ignore unknown job keys
        #[arg(long)]
        lenient: bool,
    },
    /// Verify the semiflow and cocycle axioms of a built-in fixture
    CheckAxioms {
        #[command(flatten)]
        fixture: BuiltinArgs,
        /// Number of random triples t >= s >= t0
        #[arg(long, default_value_t = 50)]
        triples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Bisect for the sharpest stable or instable exponent
    Estimate {
        #[command(flatten)]
        fixture: BuiltinArgs,
        /// stable | instable
        #[arg(long)]
        direction: String,
        #[arg(long, default_value_t = 0.05)]
        lo: f64,
        #[arg(long, default_value_t = 8.0)]
        hi: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// List the built-in fixtures with their expected classifications
    ListBuiltins,
    /// Regenerate the CSV files from a saved structured report
    EmitCsv {
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn build_fixture(args: &BuiltinArgs) -> Result<(skewflow_core::SkewEvolutionSystem, Horizon)> {
    let name = BuiltinName::from_str(&args.builtin)?;
    let variant = match &args.variant {
        Some(v) => CeVariant::from_str(v)?,
        None => CeVariant::Corrected,
    };
    let params = BuiltinParams {
        variant,
        norm: None,
        t_max: 130.0_f64.max(args.n_max as f64 + 10.0),
    };
    let (system, _) = builtin(name, &params)?;
    let horizon = Horizon::with_default_vectors(
        args.n_max,
        system.dim(),
        system.norm_kind(),
        args.vectors,
        args.seed,
        default_states(&system, args.states),
    )?;
    Ok((system, horizon))
}

fn cmd_analyze(
    job_path: &PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    lenient: bool,
) -> Result<ExitCode> {
    let text = fs::read_to_string(job_path)
        .with_context(|| format!("reading job file {}", job_path.display()))?;
    let mut parsed = match job::parse_job(&text, !lenient) {
        Ok(j) => j,
        Err(errors) => {
            eprintln!("job file {} is invalid:", job_path.display());
            for e in errors {
                eprintln!("  {e}");
            }
            return Ok(ExitCode::from(2));
        }
    };
    if let Some(s) = seed {
        parsed.seed = s;
    }
    if let Some(t) = tolerance {
        if t <= 0.0 {
            return Err(anyhow!("--tolerance must be > 0"));
        }
        parsed.tolerance = t;
    }
    if let Some(dir) = &out {
        parsed.output.report = Some(dir.join("report.txt").to_string_lossy().into_owned());
        parsed.output.csv_dir = Some(dir.join("csv").to_string_lossy().into_owned());
    }
    let report = runner::run(&parsed)?;
    let rendered = report.render();
    match &parsed.output.report {
        Some(path) => {
            let path = PathBuf::from(path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(&path, &rendered)
                .with_context(|| format!("writing report {}", path.display()))?;
            println!("report written to {}", path.display());
        }
        None => print!("{rendered}"),
    }
    if let Some(dir) = &parsed.output.csv_dir {
        let files = csv::emit_csv(&report, &PathBuf::from(dir))?;
        println!("{} CSV files written to {dir}", files.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check_axioms(fixture: &BuiltinArgs, triples: usize, tolerance: f64) -> Result<ExitCode> {
    let (system, horizon) = build_fixture(fixture)?;
    let grid = random_triples(
        fixture.seed,
        triples,
        fixture.n_max as f64,
        system.discrete_only(),
    );
    let report = system.verify_axioms(&grid, &horizon.states, tolerance)?;
    println!("fixture            {}", fixture.builtin);
    println!("triples            {}", grid.len());
    println!("identity residual  {:.3e}", report.max_identity_residual);
    println!("cocycle residual   {:.3e} (relative)", report.max_cocycle_residual_rel);
    println!("semiflow residual  {:.3e}", report.max_semiflow_residual);
    println!("tolerance          {:.3e}", tolerance);
    println!("axioms             {}", if report.passes { "PASS" } else { "FAIL" });
    Ok(if report.passes {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_estimate(fixture: &BuiltinArgs, direction: &str, lo: f64, hi: f64, tol: f64) -> Result<ExitCode> {
    let (system, horizon) = build_fixture(fixture)?;
    let dir = match direction {
        "stable" => ExponentDirection::Stable,
        "instable" => ExponentDirection::Instable,
        other => return Err(anyhow!("direction must be stable|instable, got `{other}`")),
    };
    let est = estimate_exponent(
        &system,
        dir,
        &horizon,
        ExponentSearch::new(lo, hi, tol)?,
        &VerdictConfig::default(),
    )?;
    match est.value {
        Some(v) => println!("sharpest {direction} exponent: {v}"),
        None => println!("no positive {direction} exponent ({})", est.note),
    }
    println!("probes: {}", est.probes.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_list_builtins() -> Result<ExitCode> {
    let params = BuiltinParams::default();
    for name in BuiltinName::all() {
        let (system, desc) = builtin(*name, &params)?;
        println!("{:<14} dim {}  {}", desc.name, system.dim(), desc.parameters);
        println!("{:<14} expected: {}", "", desc.expected);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_emit_csv(report_path: &PathBuf, out: &PathBuf) -> Result<ExitCode> {
    let text = fs::read_to_string(report_path)
        .with_context(|| format!("reading report {}", report_path.display()))?;
    let report = report::Report::parse(&text).map_err(|e| anyhow!("{e}"))?;
    let files = csv::emit_csv(&report, out)?;
    println!("{} CSV files written to {}", files.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze {
            job,
            out,
            seed,
            tolerance,
            lenient,
            ..
        } => cmd_analyze(job, out.clone(), *seed, *tolerance, *lenient),
        Command::CheckAxioms {
            fixture,
            triples,
            tolerance,
        } => cmd_check_axioms(fixture, *triples, *tolerance),
        Command::Estimate {
            fixture,
            direction,
            lo,
            hi,
            tol,
        } => cmd_estimate(fixture, direction, *lo, *hi, *tol),
        Command::ListBuiltins => cmd_list_builtins(),
        Command::EmitCsv { report, out } => cmd_emit_csv(report, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
