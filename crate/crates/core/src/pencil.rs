//! The squeezed-state condition `(A − α)ψ = iS(B − β)ψ` as a finite
//! generalized eigenproblem, the uncertainty floor at fixed `⟨A⟩` and the
//! quantization scan over `α`.
//!
//! Regular pencils are reduced by shift-and-invert, `ν = 1/(λ − σ)` being an
//! eigenvalue of `(P − σQ)⁻¹Q` with `P = A − α`, `Q = B − β`. A pencil whose
//! determinant vanishes identically has a null vector for every `λ`; it is
//! reported as [`PencilKind::Singular`] and sampled along the imaginary axis.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::moments::fmt_float;
use crate::operators::{build, OperatorId, OperatorMatrix};
use crate::state::{AngularState, ModeWindow};

const PROBES: [Complex64; 2] = [Complex64::new(0.37, 0.61), Complex64::new(-0.53, 0.29)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `L` against `sin φ` on a symmetric window.
    Circle,
    /// `N` against the phase sine on a bounded-below window.
    Oscillator,
}

impl Family {
    pub fn operators(self) -> (OperatorId, OperatorId) {
        match self {
            Family::Circle => (OperatorId::AngularMomentum, OperatorId::SinPhi),
            Family::Oscillator => (OperatorId::Number, OperatorId::PhaseSin),
        }
    }

    pub fn window(self, m: usize) -> Result<ModeWindow> {
        match self {
            Family::Circle => ModeWindow::symmetric(m),
            Family::Oscillator => ModeWindow::bounded_below(m),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Circle => "circle",
            Family::Oscillator => "oscillator",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(Family::Circle),
            "oscillator" => Ok(Family::Oscillator),
            other => Err(Error::Parse(format!(
                "unknown family {other:?}, expected circle or oscillator"
            ))),
        }
    }
}

/// Classification thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PencilOptions {
    pub s_min: f64,
    pub s_max: f64,
    pub tail_limit: f64,
    /// Relative tolerance for `|Re λ| ≤ tol·(1 + |λ|)`.
    pub imag_tol: f64,
    /// Imaginary-axis samples `λ = iS` used for singular pencils.
    pub samples: Vec<f64>,
}

impl Default for PencilOptions {
    fn default() -> Self {
        let mut samples = vec![0.1];
        samples.extend((0..=10).map(|j| 0.25 * 2f64.powf(0.5 * j as f64)));
        PencilOptions {
            s_min: 0.1,
            s_max: 8.0,
            tail_limit: 1e-8,
            imag_tol: 1e-8,
            samples,
        }
    }
}

impl PencilOptions {
    /// Adds imaginary-axis samples, keeping the list sorted and unique.
    pub fn with_samples(mut self, extra: &[f64]) -> Self {
        self.samples.extend_from_slice(extra);
        self.samples.sort_by(f64::total_cmp);
        self.samples.dedup();
        self
    }
}

#[derive(Clone, Debug)]
pub struct PencilProblem {
    a: OperatorMatrix,
    b: OperatorMatrix,
    alpha: f64,
    beta: f64,
}

impl PencilProblem {
    pub fn new(a: OperatorMatrix, b: OperatorMatrix, alpha: f64, beta: f64) -> Result<Self> {
        if !matches!(a.id(), OperatorId::AngularMomentum | OperatorId::Number) {
            return Err(Error::InvalidParameter(format!(
                "A must be AngularMomentum or Number, got {:?}",
                a.id()
            )));
        }
        if !matches!(
            b.id(),
            OperatorId::SinPhi | OperatorId::CosPhi | OperatorId::PhaseSin | OperatorId::PhaseCos
        ) {
            return Err(Error::InvalidParameter(format!(
                "B must be a bounded coordinate (SinPhi, CosPhi, PhaseSin, PhaseCos), got {:?}",
                b.id()
            )));
        }
        if a.window() != b.window() {
            return Err(Error::WindowMismatch {
                left: a.window(),
                right: b.window(),
            });
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        if !(beta.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "|beta| must be < 1, got {beta}"
            )));
        }
        Ok(PencilProblem { a, b, alpha, beta })
    }

    pub fn for_family(family: Family, window: ModeWindow, alpha: f64, beta: f64) -> Result<Self> {
        let (a, b) = family.operators();
        PencilProblem::new(build(a, window)?, build(b, window)?, alpha, beta)
    }

    pub fn window(&self) -> ModeWindow {
        self.a.window()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn shifted(&self) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let n = self.window().dim();
        let id = DMatrix::<Complex64>::identity(n, n);
        let p = self.a.entries() - &id * Complex64::new(self.alpha, 0.0);
        let q = self.b.entries() - &id * Complex64::new(self.beta, 0.0);
        (p, q)
    }

    fn norms(&self) -> (f64, f64) {
        (
            row_sum_norm(self.a.entries()),
            row_sum_norm(self.b.entries()),
        )
    }
}

fn row_sum_norm(m: &DMatrix<Complex64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PencilKind {
    Regular,
    /// `det(P − λQ) ≡ 0`: every `λ` carries a null vector.
    Singular,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Eigenpair {
    pub lambda: Complex64,
    #[serde(skip)]
    pub vector: AngularState,
    pub imag_axis_distance: f64,
    pub tail_mass: f64,
    pub residual: f64,
    pub residual_bound: f64,
    pub physical: bool,
}

impl Eigenpair {
    /// Squeezing `S = Im λ`.
    pub fn squeezing(&self) -> f64 {
        self.lambda.im
    }

    pub fn residual_ok(&self) -> bool {
        self.residual <= self.residual_bound
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PencilSolution {
    pub kind: PencilKind,
    /// Sorted by `imagAxisDistance`, then by `|λ|`.
    pub pairs: Vec<Eigenpair>,
    /// Eigenvalues at infinity, from the null space of `B − β`.
    pub infinite_count: usize,
    /// Relative smallest singular value of `P − σQ` at the probe shifts.
    pub singularity: f64,
}

impl PencilSolution {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    pub fn eigenvectors(&self) -> Vec<&AngularState> {
        self.pairs.iter().map(|p| &p.vector).collect()
    }

    pub fn imag_axis_distance(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.imag_axis_distance).collect()
    }

    pub fn tail_mass(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.tail_mass).collect()
    }

    pub fn physical(&self) -> impl Iterator<Item = &Eigenpair> {
        self.pairs.iter().filter(|p| p.physical)
    }

    /// Physical pair with the smallest squeezing.
    pub fn smallest_physical(&self) -> Option<&Eigenpair> {
        self.physical()
            .min_by(|a, b| a.squeezing().total_cmp(&b.squeezing()))
    }

    /// Largest `residual / bound` over all pairs.
    pub fn worst_residual_ratio(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.residual / p.residual_bound)
            .fold(0.0, f64::max)
    }

    /// Checks every pair against its residual bound.
    pub fn check_residuals(&self) -> Result<()> {
        match self.pairs.iter().find(|p| !p.residual_ok()) {
            Some(p) => Err(Error::PencilResidual {
                residual: p.residual,
                bound: p.residual_bound,
            }),
            None => Ok(()),
        }
    }
}

/// Phase-fixes `v` so its largest coefficient is real and positive.
fn to_state(v: &DVector<Complex64>, window: ModeWindow) -> Result<AngularState> {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = if pivot.norm() > 0.0 {
        pivot.conj() / pivot.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    AngularState::normalize(v.iter().map(|c| c * phase).collect(), window)
}

fn residual(
    p: &DMatrix<Complex64>,
    q: &DMatrix<Complex64>,
    lambda: Complex64,
    v: &DVector<Complex64>,
) -> f64 {
    (p * v - (q * v) * lambda).norm() / v.norm()
}

/// Inverse iteration on the original pencil at fixed `λ`, keeping the
/// better of the input and refined vectors.
fn refine(
    p: &DMatrix<Complex64>,
    q: &DMatrix<Complex64>,
    lambda: Complex64,
    v: DVector<Complex64>,
) -> (DVector<Complex64>, f64) {
    let mut best_r = residual(p, q, lambda, &v);
    let mut best = v;
    let m = p - q * lambda;
    let lu = m.lu();
    let mut w = best.clone();
    for _ in 0..2 {
        let Some(next) = lu.solve(&(q * &w)) else {
            break;
        };
        let n = next.norm();
        if !(n.is_finite() && n > 0.0) {
            break;
        }
        w = next / Complex64::new(n, 0.0);
        let r = residual(p, q, lambda, &w);
        if r < best_r {
            best_r = r;
            best = w.clone();
        }
    }
    (best, best_r)
}

fn classify(lambda: Complex64, tail: f64, ok: bool, opts: &PencilOptions) -> bool {
    let s = lambda.im;
    ok && tail < opts.tail_limit
        && s >= opts.s_min
        && s <= opts.s_max
        && lambda.re.abs() <= opts.imag_tol * (1.0 + lambda.norm())
}

pub fn solve_pencil(problem: &PencilProblem) -> Result<PencilSolution> {
    solve_pencil_with(problem, &PencilOptions::default())
}

pub fn solve_pencil_with(problem: &PencilProblem, opts: &PencilOptions) -> Result<PencilSolution> {
    let window = problem.window();
    let (p, q) = problem.shifted();
    let (norm_a, norm_b) = problem.norms();
    let bound = |lambda: Complex64| 1e-9 * (norm_a + lambda.norm() * norm_b);
    let scale = |sigma: Complex64| {
        linalg::max_abs(&p) + sigma.norm() * linalg::max_abs(&q) + f64::MIN_POSITIVE
    };

    let mut singularity = f64::INFINITY;
    for sigma in PROBES {
        let (smin, _) = linalg::smallest_singular(&(&p - &q * sigma))?;
        singularity = smin / scale(sigma);
        if singularity > 1e-12 {
            break;
        }
    }

    let mut pairs = Vec::new();
    let mut infinite_count = 0;
    let kind = if singularity <= 1e-12 {
        for &s in &opts.samples {
            let lambda = Complex64::new(0.0, s);
            let (smin, v) = linalg::smallest_singular(&(&p - &q * lambda))?;
            if smin > 1e-10 * scale(lambda) {
                continue;
            }
            let r = residual(&p, &q, lambda, &v);
            let vector = to_state(&v, window)?;
            let tail = vector.tail_mass();
            let ok = r <= bound(lambda);
            pairs.push(Eigenpair {
                lambda,
                physical: classify(lambda, tail, ok, opts),
                vector,
                imag_axis_distance: 0.0,
                tail_mass: tail,
                residual: r,
                residual_bound: bound(lambda),
            });
        }
        PencilKind::Singular
    } else {
        let (sigma, lu) = PROBES
            .iter()
            .map(|&s| (s, (&p - &q * s).lu()))
            .find(|(_, lu)| lu.is_invertible())
            .ok_or(Error::EigenNoConvergence)?;
        let c = lu.solve(&q).ok_or(Error::EigenNoConvergence)?;
        let c_scale = linalg::max_abs(&c).max(f64::MIN_POSITIVE);
        let (nus, vecs) = linalg::eig(&c)?;
        for (nu, v) in nus.into_iter().zip(vecs) {
            if nu.norm() <= 1e-13 * c_scale {
                infinite_count += 1;
                continue;
            }
            let lambda = sigma + nu.inv();
            let mut r = residual(&p, &q, lambda, &v);
            let v = if r > 1e-3 * bound(lambda) {
                let (w, rw) = refine(&p, &q, lambda, v);
                r = rw;
                w
            } else {
                v
            };
            let vector = to_state(&v, window)?;
            let tail = vector.tail_mass();
            let b = bound(lambda);
            pairs.push(Eigenpair {
                lambda,
                physical: classify(lambda, tail, r <= b, opts),
                vector,
                imag_axis_distance: lambda.re.abs(),
                tail_mass: tail,
                residual: r,
                residual_bound: b,
            });
        }
        PencilKind::Regular
    };
    pairs.sort_by(|x, y| {
        x.imag_axis_distance
            .total_cmp(&y.imag_axis_distance)
            .then(x.lambda.norm().total_cmp(&y.lambda.norm()))
            .then(x.lambda.im.total_cmp(&y.lambda.im))
    });
    Ok(PencilSolution {
        kind,
        pairs,
        infinite_count,
        singularity,
    })
}

fn spectrum_of(a: &OperatorMatrix) -> Result<Vec<f64>> {
    let mut spec = a
        .real_diagonal()
        .ok_or_else(|| Error::InvalidParameter(format!("{:?} is not real diagonal", a.id())))?;
    spec.sort_by(f64::total_cmp);
    Ok(spec)
}

fn check_alpha(spec: &[f64], alpha: f64) -> Result<()> {
    let (min, max) = (spec[0], spec[spec.len() - 1]);
    if !(alpha >= min && alpha <= max) {
        return Err(Error::OutOfRange { alpha, min, max });
    }
    Ok(())
}

/// Smallest `ΔA` over unit states with `⟨A⟩ = α`, realized by the two-level
/// mixture of the neighbouring eigenvalues `a_k ≤ α ≤ a_{k+1}`.
pub fn uncertainty_floor(a: &OperatorMatrix, alpha: f64) -> Result<(f64, AngularState)> {
    let diag = a
        .real_diagonal()
        .ok_or_else(|| Error::InvalidParameter(format!("{:?} is not real diagonal", a.id())))?;
    let spec = spectrum_of(a)?;
    check_alpha(&spec, alpha)?;
    let window = a.window();
    let index = |value: f64| {
        diag.iter()
            .position(|&d| d == value)
            .expect("spectrum value")
    };
    let mut coeffs = vec![Complex64::new(0.0, 0.0); window.dim()];
    if let Some(&hit) = spec.iter().find(|&&x| x == alpha) {
        coeffs[index(hit)] = Complex64::new(1.0, 0.0);
        return Ok((0.0, AngularState::normalize(coeffs, window)?));
    }
    let k = spec.partition_point(|&x| x < alpha);
    let (lo, hi) = (spec[k - 1], spec[k]);
    let floor = ((alpha - lo) * (hi - alpha)).sqrt();
    let p_lo = (hi - alpha) / (hi - lo);
    coeffs[index(lo)] = Complex64::new(p_lo.sqrt(), 0.0);
    coeffs[index(hi)] = Complex64::new((1.0 - p_lo).sqrt(), 0.0);
    Ok((floor, AngularState::normalize(coeffs, window)?))
}

/// The same floor by exhaustive search over the vertices of the feasible
/// simplex `{p ≥ 0, Σp = 1, Σp·a = α}`, where the linear objective
/// `Σp·a² − α²` attains its minimum.
pub fn floor_by_vertices(a: &OperatorMatrix, alpha: f64) -> Result<f64> {
    let spec = spectrum_of(a)?;
    check_alpha(&spec, alpha)?;
    let mut best = f64::INFINITY;
    for (i, &ai) in spec.iter().enumerate() {
        if ai == alpha {
            return Ok(0.0);
        }
        for &aj in &spec[i + 1..] {
            if ai < alpha && alpha < aj {
                let pi = (aj - alpha) / (aj - ai);
                let var = pi * ai * ai + (1.0 - pi) * aj * aj - alpha * alpha;
                best = best.min(var.max(0.0));
            }
        }
    }
    Ok(best.sqrt())
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanPoint {
    pub alpha: f64,
    pub kind: Option<PencilKind>,
    /// Over candidates in the S-window with small tail; `∞` when none.
    #[serde(serialize_with = "ser_float")]
    pub min_imag_distance: f64,
    #[serde(serialize_with = "ser_float")]
    pub floor: f64,
    pub flag: bool,
    pub eigenvalues: Vec<Complex64>,
    pub physical: Vec<Complex64>,
    pub residual_ok: bool,
    pub error: Option<String>,
}

fn ser_float<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&fmt_float(*x))
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuantizationScan {
    pub family: Family,
    pub window: ModeWindow,
    pub beta: f64,
    pub options: PencilOptions,
    pub points: Vec<ScanPoint>,
}

impl QuantizationScan {
    pub const CSV_HEADER: &'static str = "alpha,minImagDistance,floor,flag";

    pub fn alphas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.alpha).collect()
    }

    pub fn flagged(&self) -> Vec<f64> {
        self.points
            .iter()
            .filter(|p| p.flag)
            .map(|p| p.alpha)
            .collect()
    }

    /// Any point failed to solve or broke its residual bound.
    pub fn has_failures(&self) -> bool {
        self.points
            .iter()
            .any(|p| p.error.is_some() || !p.residual_ok)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_float(p.alpha),
                fmt_float(p.min_imag_distance),
                fmt_float(p.floor),
                p.flag
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan serializes")
    }
}

/// `start, start+step, …` up to `stop` inclusive, each rounded to 12 digits.
pub fn alpha_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidParameter(format!(
            "alpha grid needs finite min <= max and step > 0, got {start}..{stop} step {step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let a = start + i as f64 * step;
            (a * 1e12).round() / 1e12
        })
        .collect())
}

fn scan_point(
    family: Family,
    window: ModeWindow,
    alpha: f64,
    beta: f64,
    opts: &PencilOptions,
) -> ScanPoint {
    let mut point = ScanPoint {
        alpha,
        kind: None,
        min_imag_distance: f64::INFINITY,
        floor: f64::NAN,
        flag: false,
        eigenvalues: Vec::new(),
        physical: Vec::new(),
        residual_ok: true,
        error: None,
    };
    let result = (|| -> Result<()> {
        let problem = PencilProblem::for_family(family, window, alpha, beta)?;
        point.floor = uncertainty_floor(&problem.a, alpha)?.0;
        let sol = solve_pencil_with(&problem, opts)?;
        point.kind = Some(sol.kind);
        point.residual_ok = sol.check_residuals().is_ok();
        point.min_imag_distance = sol
            .pairs
            .iter()
            .filter(|p| {
                p.tail_mass < opts.tail_limit
                    && p.squeezing() >= opts.s_min
                    && p.squeezing() <= opts.s_max
            })
            .map(|p| p.imag_axis_distance)
            .fold(f64::INFINITY, f64::min);
        point.physical = sol.physical().map(|p| p.lambda).collect();
        point.flag = !point.physical.is_empty();
        point.eigenvalues = sol.eigenvalues();
        Ok(())
    })();
    if let Err(e) = result {
        point.error = Some(e.to_string());
    }
    point
}

/// Solves the pencil at every `α` (in parallel, output in grid order).
pub fn quantization_scan(
    family: Family,
    alphas: &[f64],
    beta: f64,
    window: ModeWindow,
) -> Result<QuantizationScan> {
    quantization_scan_with(family, alphas, beta, window, &PencilOptions::default())
}

pub fn quantization_scan_with(
    family: Family,
    alphas: &[f64],
    beta: f64,
    window: ModeWindow,
    opts: &PencilOptions,
) -> Result<QuantizationScan> {
    let expected = family.window(window.truncation())?;
    if expected != window {
        return Err(Error::WrongFamily(window));
    }
    let limit = window.truncation() as f64 / 2.0;
    if let Some(&bad) = alphas.iter().find(|a| !(a.abs() <= limit)) {
        return Err(Error::InvalidParameter(format!(
            "alpha {bad} outside the truncation-safe range |alpha| <= {limit}"
        )));
    }
    if !(beta.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "|beta| must be < 1, got {beta}"
        )));
    }
    let points = alphas
        .par_iter()
        .map(|&a| scan_point(family, window, a, beta, opts))
        .collect();
    Ok(QuantizationScan {
        family,
        window,
        beta,
        options: opts.clone(),
        points,
    })
}
