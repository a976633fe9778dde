//! Command dispatch shared by the `packetlab` binary and the examples.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::css::{css_moments, css_state, CssParams};
use crate::error::{Error, Result};
use crate::moments::{fmt_float, moments, relation_margins, MomentReport, RelationMargin};
use crate::operators::build;
use crate::pencil::{
    alpha_grid, floor_by_vertices, quantization_scan, solve_pencil, uncertainty_floor, Family,
    PencilProblem,
};
use crate::phase::{default_f_grid, f_table, minimize_phase, FTable, ModulusProfile};
use crate::state::{AngularState, ModeWindow, DEFAULT_GRID, DEFAULT_TRUNCATION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Css,
    Moments,
    Pencil,
    Scan,
    Floor,
    PhaseMin,
    FScan,
    Relations,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulusKind {
    #[default]
    Uniform,
    /// Seeded smooth positive profile.
    Random,
    /// `r ∝ e^{S cos φ}`, the squeezed-state modulus.
    Css,
}

/// Per-command parameters; each command reads only the fields it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Params {
    #[serde(rename = "S")]
    pub s: f64,
    pub ell: f64,
    pub center: f64,
    pub alpha: f64,
    pub beta: f64,
    pub family: Family,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub winding: f64,
    pub target_dphi: Vec<f64>,
    pub modulus: ModulusKind,
    /// JSON state file; a seeded Haar-random state when absent.
    pub state: Option<PathBuf>,
    /// Number of random states for `relations`.
    pub count: usize,
    /// f-table JSON written by `f-scan --output json`.
    pub f_table: Option<PathBuf>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            s: 1.0,
            ell: 0.0,
            center: 0.0,
            alpha: 0.0,
            beta: 0.0,
            family: Family::Circle,
            alpha_min: -2.0,
            alpha_max: 2.0,
            alpha_step: 0.1,
            winding: 0.0,
            target_dphi: Vec::new(),
            modulus: ModulusKind::Uniform,
            state: None,
            count: 1,
            f_table: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: Command,
    pub truncation: usize,
    pub grid: usize,
    pub output: OutputFormat,
    pub seed: u64,
    pub params: Params,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            truncation: DEFAULT_TRUNCATION,
            grid: DEFAULT_GRID,
            output: OutputFormat::Json,
            seed: 0,
            params: Params::default(),
        }
    }
}

/// Process exit status and the emitted artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub code: i32,
    pub artifact: String,
    /// Diagnostic for stderr.
    pub message: Option<String>,
}

impl RunOutcome {
    fn ok(artifact: String) -> Self {
        RunOutcome {
            code: 0,
            artifact,
            message: None,
        }
    }

    fn flagged(artifact: String, ok: bool, message: &str) -> Self {
        if ok {
            Self::ok(artifact)
        } else {
            RunOutcome {
                code: 3,
                artifact,
                message: Some(message.to_string()),
            }
        }
    }
}

/// 3 for numerical failures, 2 for everything the caller can fix.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::EigenNoConvergence
        | Error::NoConvergence(_)
        | Error::PencilResidual { .. }
        | Error::NegativeVariance(_) => 3,
        _ => 2,
    }
}

pub fn run(config: &RunConfig) -> RunOutcome {
    match dispatch(config) {
        Ok(outcome) => outcome,
        Err(e) => RunOutcome {
            code: exit_code(&e),
            artifact: String::new(),
            message: Some(e.to_string()),
        },
    }
}

fn dispatch(c: &RunConfig) -> Result<RunOutcome> {
    if !c.grid.is_power_of_two() {
        return Err(Error::GridNotPowerOfTwo(c.grid));
    }
    match c.command {
        Command::Css => run_css(c),
        Command::Moments => run_moments(c),
        Command::Pencil => run_pencil(c),
        Command::Scan => run_scan(c),
        Command::Floor => run_floor(c),
        Command::PhaseMin => run_phase_min(c),
        Command::FScan => run_f_scan(c),
        Command::Relations => run_relations(c),
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn report_csv(r: &MomentReport) -> String {
    format!("{}\n{}\n", MomentReport::CSV_HEADER, r.csv_row())
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))
}

fn input_states(c: &RunConfig, count: usize) -> Result<Vec<AngularState>> {
    match &c.params.state {
        Some(path) => Ok(vec![AngularState::from_json(&read_file(path)?)?]),
        None => {
            let window = ModeWindow::symmetric(c.truncation)?;
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            (0..count)
                .map(|_| AngularState::haar_random(window, &mut rng))
                .collect()
        }
    }
}

fn run_css(c: &RunConfig) -> Result<RunOutcome> {
    let p = CssParams::new(c.params.s, c.params.ell, c.params.center);
    let state = css_state(p, ModeWindow::symmetric(c.truncation)?)?;
    let report = moments(&state)?;
    Ok(RunOutcome::ok(match c.output {
        OutputFormat::Csv => report_csv(&report),
        OutputFormat::Json => pretty(&json!({
            "params": p,
            "state": state,
            "moments": report,
            "analytic": css_moments(p)?,
        })),
    }))
}

fn run_moments(c: &RunConfig) -> Result<RunOutcome> {
    let state = input_states(c, 1)?.remove(0);
    let report = moments(&state)?;
    Ok(RunOutcome::ok(match c.output {
        OutputFormat::Csv => report_csv(&report),
        OutputFormat::Json => pretty(&report),
    }))
}

fn run_pencil(c: &RunConfig) -> Result<RunOutcome> {
    let window = c.params.family.window(c.truncation)?;
    let problem =
        PencilProblem::for_family(c.params.family, window, c.params.alpha, c.params.beta)?;
    let sol = solve_pencil(&problem)?;
    let artifact = match c.output {
        OutputFormat::Csv => {
            let mut out = String::from("re,im,imagAxisDistance,tailMass,residual,physical\n");
            for p in &sol.pairs {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt_float(p.lambda.re),
                    fmt_float(p.lambda.im),
                    fmt_float(p.imag_axis_distance),
                    fmt_float(p.tail_mass),
                    fmt_float(p.residual),
                    p.physical
                );
            }
            out
        }
        OutputFormat::Json => pretty(&json!({
            "family": c.params.family,
            "window": window,
            "alpha": c.params.alpha,
            "beta": c.params.beta,
            "solution": sol,
            "smallestPhysical": sol.smallest_physical().map(|p| &p.vector),
        })),
    };
    Ok(RunOutcome::flagged(
        artifact,
        sol.check_residuals().is_ok(),
        "pencil residual bound violated",
    ))
}

fn run_scan(c: &RunConfig) -> Result<RunOutcome> {
    let p = &c.params;
    let window = p.family.window(c.truncation)?;
    let alphas = alpha_grid(p.alpha_min, p.alpha_max, p.alpha_step)?;
    let scan = quantization_scan(p.family, &alphas, p.beta, window)?;
    let artifact = match c.output {
        OutputFormat::Csv => scan.to_csv(),
        OutputFormat::Json => scan.to_json() + "\n",
    };
    Ok(RunOutcome::flagged(
        artifact,
        !scan.has_failures(),
        "scan has points that failed to solve or broke the residual bound",
    ))
}

fn run_floor(c: &RunConfig) -> Result<RunOutcome> {
    let family = c.params.family;
    let a = build(family.operators().0, family.window(c.truncation)?)?;
    let alpha = c.params.alpha;
    let (floor, argmin) = uncertainty_floor(&a, alpha)?;
    let vertex = floor_by_vertices(&a, alpha)?;
    let artifact = match c.output {
        OutputFormat::Csv => format!(
            "alpha,floor,vertexFloor\n{},{},{}\n",
            fmt_float(alpha),
            fmt_float(floor),
            fmt_float(vertex)
        ),
        OutputFormat::Json => pretty(&json!({
            "alpha": alpha,
            "floor": floor,
            "vertexFloor": vertex,
            "argmin": argmin,
        })),
    };
    Ok(RunOutcome::flagged(
        artifact,
        (floor - vertex).abs() <= 1e-9,
        "analytic and vertex-enumeration floors disagree",
    ))
}

fn run_phase_min(c: &RunConfig) -> Result<RunOutcome> {
    let p = &c.params;
    let g = c.grid;
    let base = match p.modulus {
        ModulusKind::Uniform => ModulusProfile::uniform(g)?,
        ModulusKind::Random => {
            ModulusProfile::random_positive(g, &mut ChaCha8Rng::seed_from_u64(c.seed))?
        }
        ModulusKind::Css => {
            let s = p.s;
            ModulusProfile::from_fn(g, crate::phase::PeriodicityClass::Periodic, |phi| {
                (s * (phi.cos() - 1.0)).exp()
            })?
        }
    };
    let half = (p.winding * 2.0).rem_euclid(2.0) == 1.0;
    let r = if half {
        ModulusProfile::antiperiodic_from(&base)?
    } else {
        base
    };
    let min = minimize_phase(&r, p.winding)?;
    let artifact = match c.output {
        OutputFormat::Csv => format!(
            "winding,deltaL,meanL,deltaLLinear,fitResidual,firstIntegralDefect,converged\n{},{},{},{},{},{},{}\n",
            fmt_float(p.winding),
            fmt_float(min.delta_l),
            fmt_float(min.mean_l),
            fmt_float(min.delta_l_linear),
            fmt_float(min.phase.fit_residual),
            fmt_float(min.first_integral_defect),
            min.converged
        ),
        OutputFormat::Json => pretty(&min),
    };
    Ok(RunOutcome::flagged(
        artifact,
        min.converged,
        "phase minimizer did not converge",
    ))
}

fn run_f_scan(c: &RunConfig) -> Result<RunOutcome> {
    let p = &c.params;
    if p.winding.fract() != 0.0 {
        return Err(Error::IntegerRequired { ell: p.winding });
    }
    let targets = if p.target_dphi.is_empty() {
        default_f_grid()
    } else {
        p.target_dphi.clone()
    };
    let table = f_table(&targets, p.winding as i64)?;
    let artifact = match c.output {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => pretty(&table),
    };
    Ok(RunOutcome::flagged(
        artifact,
        table.all_converged(),
        "some f-table points did not converge",
    ))
}

fn run_relations(c: &RunConfig) -> Result<RunOutcome> {
    let table: Option<FTable> = match &c.params.f_table {
        Some(path) => {
            Some(serde_json::from_str(&read_file(path)?).map_err(|e| Error::Parse(e.to_string()))?)
        }
        None => None,
    };
    let states = input_states(c, c.params.count.max(1))?;
    let margins: Vec<Vec<RelationMargin>> = states
        .iter()
        .map(|s| relation_margins(s, table.as_ref()))
        .collect::<Result<_>>()?;
    Ok(RunOutcome::ok(match c.output {
        OutputFormat::Csv => {
            let mut out = String::from("index,relation,lhs,rhs,satisfied\n");
            for (i, ms) in margins.iter().enumerate() {
                for m in ms {
                    let sat = m
                        .satisfied
                        .map_or("undefined".to_string(), |b| b.to_string());
                    let _ = writeln!(
                        out,
                        "{i},{:?},{},{},{sat}",
                        m.relation,
                        fmt_float(m.lhs),
                        fmt_float(m.rhs)
                    );
                }
            }
            out
        }
        OutputFormat::Json => pretty(&margins),
    }))
}
