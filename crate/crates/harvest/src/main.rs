use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use harvest::config::{parse_assignment, RunConfig};
use harvest::emit::{emit, Destination, EmitOptions, Format};
use harvest::sweep::run_sweep_with_threads;
use harvest::{presets, selftest, CliError, CliResult, SweepSpec};

#[derive(Parser)]
#[command(name = "harvest", version, about = "Entanglement harvesting sweeps for smeared detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep.
    Sweep(SweepArgs),
    /// Run a named figure preset.
    Preset(PresetArgs),
    /// Run the fast invariant suite.
    Selftest,
}

#[derive(Args)]
struct OutputArgs {
    /// Relative tolerance of every integral.
    #[arg(long)]
    tol: Option<f64>,
    /// Also compute the brute-force oracle for every row.
    #[arg(long)]
    audit: bool,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scale probabilities by the squared coupling of this mass (Planck units).
    #[arg(long)]
    mass_planck: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Read settings from a key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    /// Fixed parameter, `name=value`. Repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
    /// `name:start:stop:count[:log]`.
    #[arg(long)]
    axis: Option<String>,
    /// `name=v1,v2,...`. Repeatable.
    #[arg(long)]
    overlay: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PresetArgs {
    /// Preset id.
    #[arg(required_unless_present = "list")]
    id: Option<String>,
    /// List the presets and exit.
    #[arg(long)]
    list: bool,
    #[command(flatten)]
    output: OutputArgs,
}

impl OutputArgs {
    fn as_config(&self) -> RunConfig {
        RunConfig {
            tol: self.tol,
            audit: self.audit.then_some(true),
            format: self.format.clone(),
            out: self.out.clone(),
            mass_planck: self.mass_planck,
            ..Default::default()
        }
    }
}

fn threads() -> CliResult<Option<usize>> {
    match std::env::var("HARVEST_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .map(Some)
            .ok_or_else(|| CliError::config(format!("HARVEST_THREADS must be a positive integer, got `{s}`"))),
    }
}

fn execute(spec: &SweepSpec, format: Format, dest: &Destination, opts: EmitOptions) -> CliResult<ExitCode> {
    let table = run_sweep_with_threads(spec, threads()?)?;
    emit(&table, format, dest, opts)?;
    let flagged = table.flagged();
    if flagged > 0 {
        eprintln!("harvest: {flagged} of {} rows flagged", table.rows.len());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: SweepArgs) -> CliResult<ExitCode> {
    let base = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let flags = RunConfig {
        scenario: args.scenario.clone(),
        set: args.set.iter().map(|s| parse_assignment(s)).collect::<CliResult<_>>()?,
        axis: args.axis.clone(),
        overlays: args.overlay.clone(),
        ..args.output.as_config()
    };
    let r = base.merged(flags).resolve()?;
    execute(&r.spec, r.format, &r.dest, r.emit)
}

fn preset(args: PresetArgs) -> CliResult<ExitCode> {
    if args.list {
        for p in presets::PRESETS {
            println!("{:<36} {}", p.id, p.description);
        }
        return Ok(ExitCode::SUCCESS);
    }
    let id = args.id.as_deref().unwrap_or_default();
    let mut spec = presets::find(id)?.spec();
    let o = args.output.as_config();
    if let Some(t) = o.tol {
        spec.rel_tol = t;
    }
    spec.audit |= args.output.audit;
    // Resolve output settings through the same path as `sweep`.
    let r = RunConfig { scenario: Some(spec.scenario.id().to_string()), ..o }.resolve()?;
    execute(&spec, r.format, &r.dest, r.emit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Preset(a) => preset(a),
        Command::Selftest => {
            let mut out = std::io::stdout().lock();
            selftest::report(&mut out).map(|ok| if ok { ExitCode::SUCCESS } else { ExitCode::from(1) }).map_err(CliError::from)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("harvest: {e}");
            ExitCode::from(2)
        }
    }
}
