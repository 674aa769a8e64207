//! `mzwigner`: run the two measurement contexts or a circuit file, verify the
//! scenario's properties, and sample detector shots.
//!
//! Exit codes: 0 success, 1 I/O or runtime failure (including failed checks),
//! 2 usage or parse error.

mod numfmt;
mod report;
mod verify;

use std::io::{self, Read, Write};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _};
use clap::{ArgGroup, Args, Parser, Subcommand};
use mzwigner::bases::BasisRegistry;
use mzwigner::checks::CheckRegistry;
use mzwigner::dsl::{self, Circuit};
use mzwigner::measure::{sample, sample_parallel};
use mzwigner::scenario::{check_property, pipeline_table, ContextId, PropertyId, Scope};

use report::{Format, RunReport, Source};

#[derive(Parser)]
#[command(name = "mzwigner", version, about = "Single-photon Wigner's-friend interferometer simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Probability table of a context or circuit, optionally with shots.
    Run(RunArgs),
    /// Run named checks against their expected outcomes.
    Verify(VerifyArgs),
    /// Print a circuit in canonical form.
    Fmt(FmtArgs),
    /// List the named measurement bases.
    Bases,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["circuit", "context"])))]
struct RunArgs {
    /// Circuit file, or `-` for standard input.
    circuit: Option<String>,
    /// Built-in context: 1 (memory erased) or 2 (memory kept).
    #[arg(long, value_parser = clap::value_parser!(ContextArg))]
    context: Option<ContextArg>,
    /// Number of detector shots; 0 prints the analytic table only.
    #[arg(long, default_value_t = 0)]
    shots: u64,
    /// Sampling seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Sampling threads; 1 uses the sequential stream.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    #[arg(long, value_enum, env = "MZWIGNER_FORMAT", default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Every registered check.
    #[arg(long)]
    all: bool,
    /// P1, P2 or P3; every scope unless --context is given.
    #[arg(long, value_parser = parse_property)]
    property: Option<PropertyId>,
    /// 1, 2 or pre-wigner.
    #[arg(long, requires = "property", value_parser = verify::parse_scope)]
    context: Option<Scope>,
    #[arg(long)]
    commutators: bool,
    #[arg(long)]
    memory_equivalence: bool,
    /// A check by name; repeatable.
    #[arg(long = "check", value_name = "NAME")]
    checks: Vec<String>,
    /// List check names and exit.
    #[arg(long)]
    list: bool,
    #[arg(long, value_enum, env = "MZWIGNER_FORMAT", default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct FmtArgs {
    /// Circuit file, or `-` for standard input.
    circuit: String,
    /// Exit 1 instead of printing when the input is not canonical.
    #[arg(long)]
    check: bool,
}

#[derive(Clone, Copy)]
struct ContextArg(ContextId);

impl std::str::FromStr for ContextArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(ContextArg)
    }
}

fn parse_property(s: &str) -> Result<PropertyId, String> {
    s.parse()
}

/// An error with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: anyhow::Error) -> Self {
        Self { code: 2, error }
    }

    fn runtime(error: anyhow::Error) -> Self {
        Self { code: 1, error }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Self::runtime(error)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Fmt(args) => cmd_fmt(args),
        Command::Bases => cmd_bases(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    if path == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .context("reading standard input")?;
    } else {
        text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    }
    Ok(text)
}

fn load_circuit(path: &str) -> Result<Circuit, Failure> {
    let text = read_input(path)?;
    dsl::parse_with(&text, &BasisRegistry::builtin())
        .map_err(|e| Failure::usage(anyhow!("{path}: {e}")))
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .context("writing standard output")?;
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<u8, Failure> {
    let (source, dist, properties) = match (&args.circuit, args.context) {
        (Some(path), _) => {
            let circuit = load_circuit(path)?;
            let dist = circuit.run().map_err(|e| anyhow!("{path}: {e}"))?;
            (Source::Circuit { path: path.clone() }, dist, Vec::new())
        }
        (None, Some(ContextArg(ctx))) => {
            let dist = pipeline_table(ctx).map_err(|e| anyhow!(e))?;
            let properties = PropertyId::ALL
                .iter()
                .map(|p| check_property(*p, Scope::Context(ctx)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| anyhow!(e))?;
            (Source::Context { id: ctx.name().into() }, dist, properties)
        }
        (None, None) => unreachable!("clap requires a target"),
    };
    let histogram = if args.shots == 0 {
        None
    } else {
        let seed = args.seed.unwrap_or(0);
        let h = if args.workers == 1 {
            sample(&dist, args.shots, seed)
        } else {
            sample_parallel(&dist, args.shots, seed, args.workers)
        };
        Some(h.map_err(|e| anyhow!(e))?)
    };
    let report = RunReport::new(source, &dist, properties, histogram);
    emit(&report.render(args.format)?)?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let reg = CheckRegistry::builtin();
    if args.list {
        let mut text = String::new();
        for c in reg.iter() {
            text.push_str(&format!("{}\t{}\n", c.name(), c.description()));
        }
        emit(&text)?;
        return Ok(0);
    }
    let sel = verify::Selection {
        all: args.all,
        property: args.property,
        scope: args.context,
        commutators: args.commutators,
        memory_equivalence: args.memory_equivalence,
        names: args.checks,
    };
    let names = verify::resolve(&sel, &reg)
        .map_err(|bad| Failure::usage(anyhow!("unknown check `{bad}` (see `verify --list`)")))?;
    if names.is_empty() {
        return Err(Failure::usage(anyhow!(
            "nothing to verify: pass --all, --property, --commutators, --memory-equivalence or --check"
        )));
    }
    let outcomes = verify::run(&names, &reg);
    let text = match args.format {
        Format::Table => verify::render_lines(&outcomes),
        Format::Json => serde_json::to_string_pretty(&outcomes).map_err(anyhow::Error::from)? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for o in &outcomes {
                w.serialize(o).map_err(anyhow::Error::from)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?).map_err(anyhow::Error::from)?
        }
    };
    emit(&text)?;
    Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 1 })
}

fn cmd_fmt(args: FmtArgs) -> Result<u8, Failure> {
    let text = read_input(&args.circuit)?;
    let circuit = dsl::parse_with(&text, &BasisRegistry::builtin())
        .map_err(|e| Failure::usage(anyhow!("{}: {e}", args.circuit)))?;
    let canonical = dsl::format(&circuit);
    if args.check {
        if canonical == text {
            return Ok(0);
        }
        eprintln!("{}: not in canonical form", args.circuit);
        return Ok(1);
    }
    emit(&canonical)?;
    Ok(0)
}

fn cmd_bases() -> Result<u8, Failure> {
    let reg = BasisRegistry::builtin();
    let mut text = String::new();
    for b in reg.iter() {
        let basis = b.build();
        let factors: Vec<&str> = basis.measured_factors().iter().map(|f| f.name()).collect();
        let labels: Vec<&str> = basis.labels().collect();
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            b.name(),
            factors.join(","),
            labels.join(" "),
            b.description()
        ));
    }
    emit(&text)?;
    Ok(0)
}
