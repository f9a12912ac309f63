use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use selflink::invariant::DEFAULT_SEED;
use selflink::knotmodel::{detect_format, parse_knot, InputFormat, Topology};
use selflink::report::{prepare, report_quadrisecants, run_prepared, Method, RunConfig, DEFAULT_SAMPLES};
use selflink::Error;

/// Exit status for usage and I/O problems (library errors use their own codes).
const EXIT_USAGE: u8 = 1;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Poly,
    Trig,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => InputFormat::Json,
            FormatArg::Csv => InputFormat::Csv,
            FormatArg::Poly => InputFormat::Poly,
            FormatArg::Trig => InputFormat::Trig,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TopologyArg {
    Closed,
    Long,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum MethodArg {
    Quadrisecant,
    Linking,
    Gauss,
    All,
}

/// Compute the degree-two Vassiliev invariant (c2) of a knot by several
/// independent methods and check that they agree.
#[derive(Debug, Parser)]
#[command(name = "selflink", version)]
struct Cli {
    /// Input file (also accepted as a positional argument; `-` reads stdin).
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,

    #[arg(value_name = "INPUT", conflicts_with = "input")]
    positional: Option<PathBuf>,

    /// Input format; guessed from the extension and contents when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Topology of a polygon; for trig curves `long` takes the arc from the
    /// lowest to the highest point.
    #[arg(long, value_enum)]
    topology: Option<TopologyArg>,

    /// Methods to run, comma separated. `all` runs every method that applies
    /// to the input.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "quadrisecant")]
    method: Vec<MethodArg>,

    /// Seed for perturbations and projection directions.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Relative size of the perturbation applied when a polygon is degenerate.
    #[arg(long, value_name = "REAL", default_value_t = RunConfig::default().perturb)]
    perturb: f64,

    /// Relative degeneracy tolerance.
    #[arg(long, value_name = "REAL", default_value_t = RunConfig::default().tolerance)]
    tolerance: f64,

    /// Polygon edges used to sample smooth (poly, trig) inputs.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,

    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,

    /// Write every quadrisecant of the polygon as JSON.
    #[arg(long, value_name = "PATH")]
    dump_quadrisecants: Option<PathBuf>,
}

enum Failure {
    Library(Error),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).context("reading stdin")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_output(path: &PathBuf, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))
}

fn methods(args: &[MethodArg]) -> (Vec<Method>, bool) {
    if args.contains(&MethodArg::All) {
        return (Method::ALL.to_vec(), true);
    }
    let m = args
        .iter()
        .map(|a| match a {
            MethodArg::Quadrisecant => Method::Quadrisecant,
            MethodArg::Linking => Method::Linking,
            MethodArg::Gauss => Method::Gauss,
            MethodArg::All => unreachable!(),
        })
        .collect();
    (m, false)
}

fn execute(cli: Cli) -> Result<bool, Failure> {
    let path = cli
        .input
        .or(cli.positional)
        .ok_or_else(|| anyhow::anyhow!("no input given (use --input PATH or a positional path)"))?;
    let text = read_input(&path)?;
    let label = path.display().to_string();
    let format = cli
        .format
        .map(InputFormat::from)
        .unwrap_or_else(|| detect_format(&label, &text));
    let topology = cli.topology.map(|t| match t {
        TopologyArg::Closed => Topology::Closed,
        TopologyArg::Long => Topology::Long,
    });
    let (methods, skip_inapplicable) = methods(&cli.method);
    let config = RunConfig {
        input: label,
        format,
        topology,
        methods,
        skip_inapplicable,
        seed: cli.seed,
        perturb: cli.perturb,
        tolerance: cli.tolerance,
        samples: cli.samples,
        ..RunConfig::default()
    };
    let prepared = prepare(parse_knot(&text, format, topology)?, topology, config.samples)?;
    let report = run_prepared(&prepared, &config)?;
    if let Some(p) = &cli.dump_quadrisecants {
        let dump = report_quadrisecants(&prepared.polygon, &config.eval_options())?;
        write_output(p, &dump.to_json())?;
    }
    let json = report.to_json();
    match &cli.report {
        Some(p) => write_output(p, &json)?,
        None => println!("{json}"),
    }
    Ok(report.agree)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { EXIT_USAGE } else { 0 });
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            let e = Error::Disagreement("selected methods returned different values".into());
            eprintln!("selflink: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Library(e)) => {
            eprintln!("selflink: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Other(e)) => {
            eprintln!("selflink: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
