//! Modulus/phase decomposition `ψ = r e^{iθ}` on the periodic grid.
//!
//! `ΔL² = ∫ r′² + Var_{r²}(θ′)`: the phase only enters through the spread of
//! `θ′` under the weight `r²`, so at fixed modulus the best phase is linear.
//! The f-table minimizes `ΔL` over even moduli at fixed `Δφ_p`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{delta_phi_p, fmt_float};
use crate::optim::{lbfgs, LbfgsOptions, Objective};
use crate::spectral::{apply_momentum_power, grid_angle, grid_to_modes, parity, wavenumber};
use crate::state::{GridFunction, ModeWindow};

/// Number of Fourier terms in the periodic phase correction.
pub const PHASE_TERMS: usize = 40;
/// Number of cosine terms in the f-table modulus basis.
pub const MODULUS_TERMS: usize = 32;
/// Grid used by the minimizers.
pub const PROFILE_GRID: usize = 512;
/// `π/√3`, the value of `Δφ_p` for a uniform density.
pub const DELTA_PHI_MAX: f64 = 1.813_799_364_234_217_8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PeriodicityClass {
    Periodic,
    /// `r(φ + 2π) = −r(φ)`, paired with half-integer windings.
    Antiperiodic,
}

impl PeriodicityClass {
    fn twist(self) -> f64 {
        match self {
            PeriodicityClass::Periodic => 0.0,
            PeriodicityClass::Antiperiodic => 0.5,
        }
    }

    pub fn admits(self, winding: f64) -> bool {
        winding.is_finite() && (winding - self.twist()).fract() == 0.0
    }
}

/// Real modulus sampled on the grid, normalized to `∫ r² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulusProfile {
    r: Vec<f64>,
    class: PeriodicityClass,
}

/// Spectral energy above a quarter of the band, the signature of a seam jump.
fn seam_defect(values: &[Complex64]) -> f64 {
    let g = values.len();
    let modes = grid_to_modes(values);
    let total: f64 = modes.iter().map(|c| c.norm_sqr()).sum();
    let high: f64 = modes
        .iter()
        .enumerate()
        .filter(|(i, _)| 4 * wavenumber(*i, g).unsigned_abs() as usize > g)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    high / total
}

impl ModulusProfile {
    pub fn new(r: Vec<f64>, class: PeriodicityClass) -> Result<Self> {
        let g = r.len();
        if !g.is_power_of_two() || g < 8 {
            return Err(Error::GridNotPowerOfTwo(g));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidProfile("non-finite sample".into()));
        }
        let h = 2.0 * PI / g as f64;
        let n2: f64 = h * r.iter().map(|x| x * x).sum::<f64>();
        if !(n2 > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let inv = n2.sqrt().recip();
        let r: Vec<f64> = r.into_iter().map(|x| x * inv).collect();
        let twisted: Vec<Complex64> = r
            .iter()
            .enumerate()
            .map(|(j, &x)| Complex64::from_polar(x, class.twist() * grid_angle(j, g)))
            .collect();
        let defect = seam_defect(&twisted);
        if defect > 1e-10 {
            return Err(Error::InvalidProfile(format!(
                "samples are not a smooth {class:?} function (seam defect {defect:.2e})"
            )));
        }
        Ok(ModulusProfile { r, class })
    }

    pub fn from_fn(grid: usize, class: PeriodicityClass, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..grid).map(|j| f(grid_angle(j, grid))).collect(), class)
    }

    pub fn uniform(grid: usize) -> Result<Self> {
        Self::from_fn(grid, PeriodicityClass::Periodic, |_| 1.0)
    }

    /// `p(φ) cos(φ/2)`: the antiperiodic partner of a periodic profile `p`.
    pub fn antiperiodic_from(p: &ModulusProfile) -> Result<Self> {
        let g = p.len();
        Self::new(
            p.r.iter()
                .enumerate()
                .map(|(j, &x)| x * (0.5 * grid_angle(j, g)).cos())
                .collect(),
            PeriodicityClass::Antiperiodic,
        )
    }

    /// Smooth positive profile `exp(Σ_{n≤4} (a_n cos nφ + b_n sin nφ)/(2n))`
    /// with standard-normal `a_n, b_n`.
    pub fn random_positive(grid: usize, rng: &mut impl Rng) -> Result<Self> {
        let terms: Vec<(f64, f64)> = (0..4)
            .map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_fn(grid, PeriodicityClass::Periodic, |phi| {
            terms
                .iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    let n = (i + 1) as f64;
                    (a * (n * phi).cos() + b * (n * phi).sin()) / (2.0 * n)
                })
                .sum::<f64>()
                .exp()
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn class(&self) -> PeriodicityClass {
        self.class
    }

    /// `min |r| / max |r|` below `1e−8`.
    pub fn has_zero(&self) -> bool {
        let max = self.r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        self.r.iter().any(|x| x.abs() < 1e-8 * max)
    }
}

/// Phase samples with the least-squares line `θ ≈ slope·φ + offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseProfile {
    pub theta: Vec<f64>,
    /// Total change of `θ` around the circle over `2π`; set by construction.
    pub winding: f64,
    pub slope: f64,
    pub offset: f64,
    /// `max_j |θ_j − (slope·φ_j + offset)|`.
    pub fit_residual: f64,
}

impl PhaseProfile {
    pub fn new(theta: Vec<f64>, winding: f64) -> Self {
        let g = theta.len();
        let xs: Vec<f64> = (0..g).map(|j| grid_angle(j, g)).collect();
        let n = g as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = theta.iter().sum::<f64>() / n;
        let sxy: f64 = xs
            .iter()
            .zip(&theta)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        let offset = my - slope * mx;
        let fit_residual = xs
            .iter()
            .zip(&theta)
            .map(|(x, y)| (y - slope * x - offset).abs())
            .fold(0.0, f64::max);
        PhaseProfile {
            theta,
            winding,
            slope,
            offset,
            fit_residual,
        }
    }

    pub fn linear(grid: usize, winding: f64, offset: f64) -> Self {
        Self::new(
            (0..grid)
                .map(|j| winding * grid_angle(j, grid) + offset)
                .collect(),
            winding,
        )
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

fn assemble(r: &[f64], theta: &[f64]) -> Vec<Complex64> {
    r.iter()
        .zip(theta)
        .map(|(&x, &t)| Complex64::from_polar(x, t))
        .collect()
}

/// `(⟨L⟩, ⟨L²⟩)` of grid samples normalized to `(2π/G)Σ|ψ|² = 1`.
fn l_moments(psi: &[Complex64]) -> (f64, f64) {
    let g = psi.len();
    let modes = grid_to_modes(psi);
    let (mut n, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (i, c) in modes.iter().enumerate() {
        let k = wavenumber(i, g) as f64;
        let p = c.norm_sqr();
        n += p;
        m1 += k * p;
        m2 += k * k * p;
    }
    (m1 / n, m2 / n)
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidProfile(format!(
            "modulus has {a} samples, phase has {b}"
        )));
    }
    Ok(())
}

/// `ΔL` of `ψ = r e^{iθ}`, differentiating the assembled `ψ` spectrally.
pub fn delta_l_of(r: &ModulusProfile, theta: &PhaseProfile) -> Result<f64> {
    check_lengths(r.len(), theta.len())?;
    let (m1, m2) = l_moments(&assemble(&r.r, &theta.theta));
    Ok((m2 - m1 * m1).max(0.0).sqrt())
}

/// `⟨L⟩` of `ψ = r e^{iθ}`.
pub fn mean_l_of(r: &ModulusProfile, theta: &PhaseProfile) -> Result<f64> {
    check_lengths(r.len(), theta.len())?;
    Ok(l_moments(&assemble(&r.r, &theta.theta)).0)
}

/// `ψ = r e^{iθ}` projected onto `window`.
pub fn assembled_state(
    r: &ModulusProfile,
    theta: &PhaseProfile,
    window: ModeWindow,
) -> Result<crate::state::Projection> {
    check_lengths(r.len(), theta.len())?;
    GridFunction::new(assemble(&r.r, &theta.theta))?.project(window)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PhaseMinimum {
    pub phase: PhaseProfile,
    pub delta_l: f64,
    pub mean_l: f64,
    /// `ΔL` of the purely linear phase with the same winding.
    pub delta_l_linear: f64,
    /// Spread of `r²(θ′ − ⟨L⟩)` over the grid.
    pub first_integral_defect: f64,
    pub modulus_zero: bool,
    pub iterations: u64,
    pub converged: bool,
}

/// Coefficients are scaled by the harmonic number so that each one moves
/// `θ′` by the same amount.
#[derive(Clone, Copy)]
struct PhaseObjective<'a> {
    r: &'a [f64],
    winding: f64,
    cos: &'a [Vec<f64>],
    sin: &'a [Vec<f64>],
}

impl PhaseObjective<'_> {
    fn theta(&self, p: &[f64]) -> Vec<f64> {
        let g = self.r.len();
        (0..g)
            .map(|j| {
                let mut t = self.winding * grid_angle(j, g);
                for n in 0..PHASE_TERMS {
                    let k = (n + 1) as f64;
                    t += (p[n] * self.cos[n][j] + p[PHASE_TERMS + n] * self.sin[n][j]) / k;
                }
                t
            })
            .collect()
    }

    fn theta_prime(&self, p: &[f64]) -> Vec<f64> {
        let g = self.r.len();
        (0..g)
            .map(|j| {
                let mut t = self.winding;
                for n in 0..PHASE_TERMS {
                    t += p[PHASE_TERMS + n] * self.cos[n][j] - p[n] * self.sin[n][j];
                }
                t
            })
            .collect()
    }
}

impl PhaseObjective<'_> {
    fn cost(&self, p: &[f64]) -> f64 {
        let (m1, m2) = l_moments(&assemble(self.r, &self.theta(p)));
        m2 - m1 * m1
    }

    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let g = self.r.len();
        let h = 2.0 * PI / g as f64;
        let psi = assemble(self.r, &self.theta(p));
        let l1 = apply_momentum_power(&psi, 1);
        let l2 = apply_momentum_power(&psi, 2);
        let mean: f64 = h * psi
            .iter()
            .zip(&l1)
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>();
        // ∂⟨K⟩/∂θ_j = 2h Im(ψ̄_j (Kψ)_j) for Hermitian K
        let dtheta: Vec<f64> = (0..g)
            .map(|j| {
                let d2 = (psi[j].conj() * l2[j]).im;
                let d1 = (psi[j].conj() * l1[j]).im;
                2.0 * h * (d2 - 2.0 * mean * d1)
            })
            .collect();
        let mut grad = vec![0.0; 2 * PHASE_TERMS];
        for n in 0..PHASE_TERMS {
            let k = (n + 1) as f64;
            grad[n] = (0..g).map(|j| dtheta[j] * self.cos[n][j]).sum::<f64>() / k;
            grad[PHASE_TERMS + n] = (0..g).map(|j| dtheta[j] * self.sin[n][j]).sum::<f64>() / k;
        }
        grad
    }
}

/// Newton iteration on the phase correction. The Hessian is that of
/// `Var_{r²}(θ′)`, which is exact for the continuum objective; the gradient
/// and the step acceptance use the spectral objective.
fn newton(obj: &PhaseObjective<'_>, mut p: Vec<f64>) -> Result<(Vec<f64>, u64)> {
    let g = obj.r.len();
    let h = 2.0 * PI / g as f64;
    let n = 2 * PHASE_TERMS;
    let basis = |i: usize, j: usize| {
        if i < PHASE_TERMS {
            -obj.sin[i][j]
        } else {
            obj.cos[i - PHASE_TERMS][j]
        }
    };
    let w: Vec<f64> = obj.r.iter().map(|x| h * x * x).collect();
    let means: Vec<f64> = (0..n)
        .map(|i| (0..g).map(|j| w[j] * basis(i, j)).sum())
        .collect();
    let mut hess = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v: f64 = (0..g).map(|j| w[j] * basis(a, j) * basis(b, j)).sum();
            let e = 2.0 * (v - means[a] * means[b]);
            hess[(a, b)] = e;
            hess[(b, a)] = e;
        }
    }
    let chol = hess
        .cholesky()
        .ok_or_else(|| Error::InvalidProfile("phase Hessian is not positive definite".into()))?;
    let mut f = obj.cost(&p);
    for it in 0..50u64 {
        let grad = obj.gradient(&p);
        let step = chol.solve(&DVector::from_vec(grad));
        if step.amax() <= 1e-14 {
            return Ok((p, it));
        }
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(x, d)| x - t * d).collect();
            let ft = obj.cost(&trial);
            if ft <= f || t < 1e-6 {
                p = trial;
                f = ft;
                break;
            }
            t *= 0.5;
        }
        if t * step.amax() <= 1e-14 {
            return Ok((p, it + 1));
        }
    }
    Ok((p, 50))
}

/// Minimizes `ΔL` over phases `θ = wφ + (periodic correction)` at fixed
/// modulus and winding `w`. The search starts from a fixed nonzero
/// correction.
pub fn minimize_phase(r: &ModulusProfile, winding: f64) -> Result<PhaseMinimum> {
    if !r.class.admits(winding) {
        return Err(Error::InvalidParameter(format!(
            "winding {winding} is not compatible with a {:?} modulus",
            r.class
        )));
    }
    let g = r.len();
    if g < 4 * PHASE_TERMS {
        return Err(Error::InvalidProfile(format!(
            "grid of {g} points is too coarse for {PHASE_TERMS} phase terms"
        )));
    }
    let table = |f: fn(f64) -> f64| -> Vec<Vec<f64>> {
        (1..=PHASE_TERMS)
            .map(|n| (0..g).map(|j| f(n as f64 * grid_angle(j, g))).collect())
            .collect()
    };
    let (cos, sin) = (table(f64::cos), table(f64::sin));
    let objective = PhaseObjective {
        r: &r.r,
        winding,
        cos: &cos,
        sin: &sin,
    };
    let mut start = vec![0.0; 2 * PHASE_TERMS];
    start[0] = 0.3;
    start[PHASE_TERMS + 1] = -0.4;
    start[2] = 0.3;

    let (best, iterations) = newton(&objective, start)?;
    let phase = PhaseProfile::new(objective.theta(&best), winding);
    let delta_l = delta_l_of(r, &phase)?;
    let mean_l = mean_l_of(r, &phase)?;
    let delta_l_linear = delta_l_of(r, &PhaseProfile::linear(g, winding, 0.0))?;
    let tp = objective.theta_prime(&best);
    let integral: Vec<f64> =
        r.r.iter()
            .zip(&tp)
            .map(|(x, t)| x * x * (t - mean_l))
            .collect();
    let lo = integral.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = integral.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let modulus_zero = r.has_zero();
    let linear_ok = phase.fit_residual <= 1e-6;
    let converged =
        (hi - lo) <= 1e-6 && (linear_ok || (modulus_zero && r.class == PeriodicityClass::Periodic));
    Ok(PhaseMinimum {
        phase,
        delta_l,
        mean_l,
        delta_l_linear,
        first_integral_defect: hi - lo,
        modulus_zero,
        iterations,
        converged,
    })
}

/// One row of the f-table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FPoint {
    pub delta_phi_p: f64,
    pub f: f64,
    pub delta_l: f64,
    pub converged: bool,
}

/// `f(Δφ_p)` sampled on a grid, with optional extrapolated endpoint values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FTable {
    pub winding: i64,
    pub points: Vec<FPoint>,
    /// Extrapolated `f` at `Δφ_p → 0`.
    pub at_zero: Option<f64>,
    /// Extrapolated `f` at `Δφ_p → π/√3`.
    pub at_max: Option<f64>,
}

/// `[2ΔLΔφ_p / (1 − 3Δφ_p²/π²)]²`, the factor that the optimal packet at a
/// given `Δφ_p` reaches in the modified relation.
pub fn f_value(delta_l: f64, delta_phi_p: f64) -> f64 {
    let q = 2.0 * delta_l * delta_phi_p / (1.0 - 3.0 * delta_phi_p * delta_phi_p / (PI * PI));
    q * q
}

impl FTable {
    pub const CSV_HEADER: &'static str = "deltaPhiP,f,converged";

    /// Converged knots, with the extrapolated endpoints when present.
    fn knots(&self) -> Vec<(f64, f64)> {
        let mut k: Vec<(f64, f64)> = Vec::new();
        if let Some(f0) = self.at_zero {
            k.push((0.0, f0));
        }
        k.extend(
            self.points
                .iter()
                .filter(|p| p.converged)
                .map(|p| (p.delta_phi_p, p.f)),
        );
        if let Some(f1) = self.at_max {
            k.push((DELTA_PHI_MAX, f1));
        }
        k.sort_by(|a, b| a.0.total_cmp(&b.0));
        k
    }

    /// Linear interpolation; `None` outside the tabulated range.
    pub fn interpolate(&self, delta_phi_p: f64) -> Option<f64> {
        let k = self.knots();
        let x = delta_phi_p.min(DELTA_PHI_MAX);
        let i = k.iter().position(|&(xi, _)| xi >= x)?;
        if i == 0 {
            return (k[0].0 - x <= 1e-12).then_some(k[0].1);
        }
        let (x0, y0) = k[i - 1];
        let (x1, y1) = k[i];
        Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    pub fn is_monotone(&self) -> bool {
        self.knots().windows(2).all(|w| w[1].1 >= w[0].1 - 1e-9)
    }

    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_float(p.delta_phi_p),
                fmt_float(p.f),
                p.converged
            );
        }
        out
    }
}

/// Weights `P_j` with `∫ ρ φ² dφ = (2π/G) Σ_j ρ_j P_j` for densities with
/// bandwidth below `G/2`.
fn phi_squared_weights(g: usize) -> Vec<f64> {
    (0..g)
        .map(|j| {
            let phi = grid_angle(j, g);
            PI * PI / 3.0
                + (1..g / 2)
                    .map(|k| 4.0 * parity(k as i64) * (k as f64 * phi).cos() / (k * k) as f64)
                    .sum::<f64>()
        })
        .collect()
}

#[derive(Clone, Copy)]
struct ModulusSearch<'a> {
    g: usize,
    cos: &'a [Vec<f64>],
    weights: &'a [f64],
    target_sq: f64,
    multiplier: f64,
    penalty: f64,
}

struct ModulusEval {
    energy: f64,
    spread: f64,
    d_energy: Vec<f64>,
    d_spread: Vec<f64>,
}

impl ModulusSearch<'_> {
    fn profile(&self, a: &[f64]) -> Vec<f64> {
        (0..self.g)
            .map(|j| {
                let gj: f64 = a.iter().zip(self.cos).map(|(ak, c)| ak * c[j]).sum();
                gj * gj
            })
            .collect()
    }

    /// `∫ r′²` and `∫ r² φ²` of the normalized `r = u/‖u‖`, `u = g²`, with
    /// gradients in the cosine coefficients of `g`.
    fn eval(&self, a: &[f64]) -> ModulusEval {
        // the objective is invariant under a → ta; evaluate on the unit sphere
        let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let h = 2.0 * PI / self.g as f64;
        let gv: Vec<f64> = (0..self.g)
            .map(|j| a.iter().zip(self.cos).map(|(ak, c)| ak * c[j]).sum::<f64>() / scale)
            .collect();
        let u: Vec<f64> = gv.iter().map(|x| x * x).collect();
        let uc: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let l2u: Vec<f64> = apply_momentum_power(&uc, 2).iter().map(|z| z.re).collect();
        let n2 = h * u.iter().map(|x| x * x).sum::<f64>();
        let q1 = h * u.iter().zip(&l2u).map(|(x, y)| x * y).sum::<f64>();
        let q2 = h * u
            .iter()
            .zip(self.weights)
            .map(|(x, p)| x * x * p)
            .sum::<f64>();
        let energy = q1 / n2;
        let spread = q2 / n2;
        let mut de_du = vec![0.0; self.g];
        let mut ds_du = vec![0.0; self.g];
        for j in 0..self.g {
            de_du[j] = 2.0 * h * (l2u[j] - energy * u[j]) / n2;
            ds_du[j] = 2.0 * h * u[j] * (self.weights[j] - spread) / n2;
        }
        let chain = |du: &[f64]| -> Vec<f64> {
            self.cos
                .iter()
                .map(|c| (0..self.g).map(|j| du[j] * 2.0 * gv[j] * c[j]).sum::<f64>() / scale)
                .collect()
        };
        ModulusEval {
            energy,
            spread,
            d_energy: chain(&de_du),
            d_spread: chain(&ds_du),
        }
    }
}

impl Objective for ModulusSearch<'_> {
    fn value_grad(&self, a: &[f64]) -> (f64, Vec<f64>) {
        let e = self.eval(a);
        let c = e.spread - self.target_sq;
        let w = self.penalty * c - self.multiplier;
        let value = e.energy - self.multiplier * c + 0.5 * self.penalty * c * c;
        let grad = e
            .d_energy
            .iter()
            .zip(&e.d_spread)
            .map(|(de, ds)| de + w * ds)
            .collect();
        (value, grad)
    }
}

/// Smallest `ΔL` over even moduli with `Δφ_p = target`, by an augmented
/// Lagrangian with multiplier updates. Returns the optimal modulus and
/// whether the constraint and the γ-minimality of the centre were met.
pub fn optimal_modulus(target: f64) -> Result<(ModulusProfile, bool)> {
    if !(target > 0.0 && target < DELTA_PHI_MAX) {
        return Err(Error::InvalidParameter(format!(
            "target Δφ_p must lie in (0, π/√3), got {target}"
        )));
    }
    let g = PROFILE_GRID;
    // basis functions scaled by 1/(1+k) to even out the curvature of ∫r′²
    let cos: Vec<Vec<f64>> = (0..MODULUS_TERMS)
        .map(|k| {
            let s = 1.0 / (1 + k) as f64;
            (0..g)
                .map(|j| s * (k as f64 * grid_angle(j, g)).cos())
                .collect()
        })
        .collect();
    let weights = phi_squared_weights(g);
    let mut search = ModulusSearch {
        g,
        cos: &cos,
        weights: &weights,
        target_sq: target * target,
        multiplier: 0.0,
        penalty: 10.0,
    };
    let mut a = vec![0.0; MODULUS_TERMS];
    a[0] = 1.0;
    let mut last_violation = f64::INFINITY;
    let mut met = false;
    for _ in 0..40 {
        let inner = lbfgs(
            &search,
            a.clone(),
            LbfgsOptions {
                max_iters: 300,
                grad_tol: 1e-9,
                ..Default::default()
            },
        );
        a = inner.x;
        let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        a.iter_mut().for_each(|x| *x /= scale);
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::NoConvergence(format!(
                "modulus search at Δφ_p = {target}"
            )));
        }
        let e = search.eval(&a);
        let c = e.spread - search.target_sq;
        if (e.spread.max(0.0).sqrt() - target).abs() <= 1e-7 {
            met = true;
            break;
        }
        search.multiplier -= search.penalty * c;
        if c.abs() > 0.25 * last_violation {
            search.penalty = (search.penalty * 10.0).min(1e9);
        }
        last_violation = c.abs();
    }
    let profile = ModulusProfile::new(search.profile(&a), PeriodicityClass::Periodic)?;
    // the constraint fixes the second moment about 0; the packet must also
    // be γ-minimal there
    let window = ModeWindow::symmetric(g / 4 - 2)?;
    let state = assembled_state(&profile, &PhaseProfile::linear(g, 0.0, 0.0), window)?;
    let (dp, gamma) = delta_phi_p(&state.state)?;
    let centred = gamma.abs() <= 1e-6 && (dp - target).abs() <= 1e-6;
    Ok((profile, met && centred && state.discarded_mass < 1e-14))
}

/// Evaluates `f` at each target `Δφ_p` with phase `θ = mφ`, then
/// extrapolates toward both endpoints. Points are computed in parallel.
pub fn f_table(targets: &[f64], winding: i64) -> Result<FTable> {
    use rayon::prelude::*;
    let points: Vec<Result<FPoint>> = targets
        .par_iter()
        .map(|&t| {
            let (r, converged) = optimal_modulus(t)?;
            let phase = PhaseProfile::linear(r.len(), winding as f64, 0.0);
            let delta_l = delta_l_of(&r, &phase)?;
            Ok(FPoint {
                delta_phi_p: t,
                f: f_value(delta_l, t),
                delta_l,
                converged,
            })
        })
        .collect();
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;
    let mut table = FTable {
        winding,
        points,
        at_zero: None,
        at_max: None,
    };
    table.at_zero = extrapolate_to_zero(&table.points);
    table.at_max = extrapolate_to_max(&table.points);
    Ok(table)
}

/// Targets from 0.1 to 1.7 in steps of 0.1, then `(1 − h)π/√3` for
/// `h = 0.04, 0.02, 0.01`.
pub fn default_f_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (1..=17).map(|i| i as f64 * 0.1).collect();
    g.extend([0.04, 0.02, 0.01].iter().map(|h| (1.0 - h) * DELTA_PHI_MAX));
    g
}

/// Value at `x = 0` of the polynomial through `(x_i, y_i)` (Neville).
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Quadratic-in-`Δφ_p²` extrapolation through the three smallest converged
/// targets.
pub fn extrapolate_to_zero(points: &[FPoint]) -> Option<f64> {
    let mut pts: Vec<&FPoint> = points.iter().filter(|p| p.converged).collect();
    pts.sort_by(|a, b| a.delta_phi_p.total_cmp(&b.delta_phi_p));
    if pts.len() < 3 || pts[2].delta_phi_p > 0.5 {
        return None;
    }
    let xs: Vec<f64> = pts[..3].iter().map(|p| p.delta_phi_p.powi(2)).collect();
    let ys: Vec<f64> = pts[..3].iter().map(|p| p.f).collect();
    Some(neville_at_zero(&xs, &ys))
}

/// Richardson extrapolation in `h = 1 − Δφ_p/(π/√3)` through the three
/// converged targets closest to the endpoint.
pub fn extrapolate_to_max(points: &[FPoint]) -> Option<f64> {
    let mut pts: Vec<&FPoint> = points.iter().filter(|p| p.converged).collect();
    pts.sort_by(|a, b| b.delta_phi_p.total_cmp(&a.delta_phi_p));
    if pts.len() < 3 {
        return None;
    }
    let xs: Vec<f64> = pts[..3]
        .iter()
        .map(|p| 1.0 - p.delta_phi_p / DELTA_PHI_MAX)
        .collect();
    if xs[2] > 0.1 {
        return None;
    }
    let ys: Vec<f64> = pts[..3].iter().map(|p| p.f).collect();
    Some(neville_at_zero(&xs, &ys))
}
