use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use packetlab::pencil::Family;
use packetlab::run::{Command, ModulusKind, OutputFormat, Params, RunConfig};

const COLUMNS: &str = "\
CSV columns (frozen):
  css, moments   meanL,varL,meanCos,varCos,meanSin,varSin,deltaPhiP,gammaStar,deltaPhiCombined
  pencil         re,im,imagAxisDistance,tailMass,residual,physical
  scan           alpha,minImagDistance,floor,flag
  floor          alpha,floor,vertexFloor
  phase-min      winding,deltaL,meanL,deltaLLinear,fitResidual,firstIntegralDefect,converged
  f-scan         deltaPhiP,f,converged
  relations      index,relation,lhs,rhs,satisfied

Exit codes: 0 success, 2 invalid input, 3 numerical failure (partial output still written).
PACKETLAB_THREADS caps the worker threads used by scan and f-scan.";

#[derive(Parser)]
#[command(name = "packetlab", version, about = "Angular wave packets, squeezed states and quantization scans", after_help = COLUMNS)]
struct Cli {
    /// Mode truncation M.
    #[arg(long, global = true, default_value_t = 64)]
    truncation: usize,
    /// Grid size G (power of two).
    #[arg(long, global = true, default_value_t = 512)]
    grid: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Circle,
    Oscillator,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModulusArg {
    Uniform,
    Random,
    Css,
}

#[derive(Subcommand)]
enum Cmd {
    /// Circular squeezed state and its moments.
    Css(CssArgs),
    /// Moment report of a state file or a seeded random state.
    Moments(StateArgs),
    /// Solve the squeezed-state pencil at one alpha.
    Pencil(PencilArgs),
    /// Quantization scan over an alpha grid.
    Scan(ScanArgs),
    /// Smallest spread of A at fixed mean alpha.
    Floor(FloorArgs),
    /// Minimize the angular-momentum spread over the phase at fixed modulus.
    PhaseMin(PhaseArgs),
    /// Tabulate f against the phi_p spread.
    FScan(FScanArgs),
    /// Uncertainty-relation margins of states.
    Relations(RelationArgs),
}

#[derive(Args)]
struct CssArgs {
    #[arg(long = "S", default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ell: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    center: f64,
}

#[derive(Args)]
struct StateArgs {
    /// JSON state file (as written by `css`); random when absent.
    #[arg(long)]
    state: Option<PathBuf>,
}

#[derive(Args)]
struct PencilArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Circle)]
    family: FamilyArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Circle)]
    family: FamilyArg,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    alpha_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    alpha_max: f64,
    #[arg(long, default_value_t = 0.1)]
    alpha_step: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
}

#[derive(Args)]
struct FloorArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Circle)]
    family: FamilyArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
}

#[derive(Args)]
struct PhaseArgs {
    /// Integer or half-integer winding.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    winding: f64,
    #[arg(long, value_enum, default_value_t = ModulusArg::Uniform)]
    modulus: ModulusArg,
    /// Squeezing of the `css` modulus.
    #[arg(long = "S", default_value_t = 1.0)]
    s: f64,
}

#[derive(Args)]
struct FScanArgs {
    /// Comma-separated targets; a built-in grid when absent.
    #[arg(long, value_delimiter = ',')]
    target_dphi: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    winding: f64,
}

#[derive(Args)]
struct RelationArgs {
    #[arg(long)]
    state: Option<PathBuf>,
    /// Number of seeded random states.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// f-table JSON from `f-scan --output json`, enables the modified relation.
    #[arg(long)]
    f_table: Option<PathBuf>,
}

fn family(f: FamilyArg) -> Family {
    match f {
        FamilyArg::Circle => Family::Circle,
        FamilyArg::Oscillator => Family::Oscillator,
    }
}

fn config(cli: &Cli) -> RunConfig {
    let mut p = Params::default();
    let command = match &cli.command {
        Cmd::Css(a) => {
            (p.s, p.ell, p.center) = (a.s, a.ell, a.center);
            Command::Css
        }
        Cmd::Moments(a) => {
            p.state = a.state.clone();
            Command::Moments
        }
        Cmd::Pencil(a) => {
            (p.family, p.alpha, p.beta) = (family(a.family), a.alpha, a.beta);
            Command::Pencil
        }
        Cmd::Scan(a) => {
            p.family = family(a.family);
            (p.alpha_min, p.alpha_max, p.alpha_step, p.beta) =
                (a.alpha_min, a.alpha_max, a.alpha_step, a.beta);
            Command::Scan
        }
        Cmd::Floor(a) => {
            (p.family, p.alpha) = (family(a.family), a.alpha);
            Command::Floor
        }
        Cmd::PhaseMin(a) => {
            p.winding = a.winding;
            p.s = a.s;
            p.modulus = match a.modulus {
                ModulusArg::Uniform => ModulusKind::Uniform,
                ModulusArg::Random => ModulusKind::Random,
                ModulusArg::Css => ModulusKind::Css,
            };
            Command::PhaseMin
        }
        Cmd::FScan(a) => {
            p.target_dphi = a.target_dphi.clone();
            p.winding = a.winding;
            Command::FScan
        }
        Cmd::Relations(a) => {
            p.state = a.state.clone();
            p.count = a.count;
            p.f_table = a.f_table.clone();
            Command::Relations
        }
    };
    RunConfig {
        command,
        truncation: cli.truncation,
        grid: cli.grid,
        output: match cli.output {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        },
        seed: cli.seed,
        params: p,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("PACKETLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let outcome = packetlab::run(&config(&cli));
    if !outcome.artifact.is_empty() {
        let written = match &cli.out {
            Some(path) => std::fs::write(path, &outcome.artifact),
            None => std::io::stdout().write_all(outcome.artifact.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("packetlab: cannot write output: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(msg) = &outcome.message {
        eprintln!("packetlab: {msg}");
    }
    ExitCode::from(outcome.code as u8)
}
