//! Expectations, uncertainties and uncertainty-relation margins.
//!
//! Everything is computed from the autocorrelations of the coefficient
//! vector, `ρ_k = Σ_m c̄_m c_{m+k}`, which are the Fourier coefficients of the
//! density: `|ψ(φ)|² = (1/2π) Σ_k ρ_k e^{ikφ}`. For a band-limited state
//! these moments are exact, including the ones involving `φ_p`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::FTable;
use crate::spectral::parity;
use crate::state::AngularState;

/// Slack allowed on variances and relation margins.
pub const ROUNDING: f64 = 1e-12;

const SCAN_POINTS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MomentReport {
    pub mean_l: f64,
    pub var_l: f64,
    pub mean_cos: f64,
    pub var_cos: f64,
    pub mean_sin: f64,
    pub var_sin: f64,
    pub delta_phi_p: f64,
    pub gamma_star: f64,
    pub delta_phi_combined: f64,
    pub tail_mass: f64,
}

impl MomentReport {
    pub const CSV_HEADER: &'static str =
        "meanL,varL,meanCos,varCos,meanSin,varSin,deltaPhiP,gammaStar,deltaPhiCombined";

    pub fn delta_l(&self) -> f64 {
        self.var_l.sqrt()
    }

    pub fn delta_cos(&self) -> f64 {
        self.var_cos.sqrt()
    }

    pub fn delta_sin(&self) -> f64 {
        self.var_sin.sqrt()
    }

    pub fn csv_row(&self) -> String {
        let mut out = String::new();
        for (i, v) in [
            self.mean_l,
            self.var_l,
            self.mean_cos,
            self.var_cos,
            self.mean_sin,
            self.var_sin,
            self.delta_phi_p,
            self.gamma_star,
            self.delta_phi_combined,
        ]
        .iter()
        .enumerate()
        {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_float(*v));
        }
        out
    }
}

/// 17 significant digits, `inf`/`nan` spelled out.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// `ρ_k` for `k = 0..=max_lag`.
pub fn autocorrelation(s: &AngularState, max_lag: usize) -> Vec<Complex64> {
    let c = s.coeffs();
    (0..=max_lag.min(c.len().saturating_sub(1)))
        .map(|k| c.iter().zip(&c[k..]).map(|(a, b)| a.conj() * b).sum())
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(max_lag + 1)
        .collect()
}

fn variance(second: f64, mean: f64) -> Result<f64> {
    let v = second - mean * mean;
    if v < -ROUNDING {
        return Err(Error::NegativeVariance(v));
    }
    Ok(v.max(0.0))
}

fn require_circle(s: &AngularState) -> Result<()> {
    if !s.window().is_symmetric() {
        return Err(Error::WrongFamily(s.window()));
    }
    Ok(())
}

pub fn moments(s: &AngularState) -> Result<MomentReport> {
    require_circle(s)?;
    let w = s.window();
    let (mut mean_l, mut second_l) = (0.0, 0.0);
    for (m, c) in w.modes().zip(s.coeffs()) {
        let p = c.norm_sqr();
        mean_l += m as f64 * p;
        second_l += (m * m) as f64 * p;
    }
    let rho = autocorrelation(s, 2);
    // ⟨e^{iφ}⟩ = ρ̄₁, ⟨cos²⟩ = (1 + Re ρ₂)/2
    let mean_cos = rho[1].re;
    let mean_sin = -rho[1].im;
    let var_cos = variance(0.5 * (1.0 + rho[2].re), mean_cos)?;
    let var_sin = variance(0.5 * (1.0 - rho[2].re), mean_sin)?;
    let (delta_phi_p, gamma_star) = delta_phi_p(s)?;
    Ok(MomentReport {
        mean_l,
        var_l: variance(second_l, mean_l)?,
        mean_cos,
        var_cos,
        mean_sin,
        var_sin,
        delta_phi_p,
        gamma_star,
        delta_phi_combined: combined_from(mean_cos, mean_sin, var_cos, var_sin)
            .unwrap_or(f64::INFINITY),
        tail_mass: s.tail_mass(),
    })
}

fn combined_from(mc: f64, ms: f64, vc: f64, vs: f64) -> Result<f64> {
    let r2 = mc * mc + ms * ms;
    if r2 < 1e-15 {
        return Err(Error::CombinedPhiUndefined);
    }
    Ok(((vc + vs) / r2).sqrt())
}

/// `Δφ = √[(Δcos² + Δsin²)/(⟨cos⟩² + ⟨sin⟩²)]`, erroring when the mean
/// resultant vanishes.
pub fn delta_phi_combined(s: &AngularState) -> Result<f64> {
    let r = moments(s)?;
    combined_from(r.mean_cos, r.mean_sin, r.var_cos, r.var_sin)
}

/// Second moment of `φ_p` after shifting the state by `γ`, as a Fourier
/// series in `γ` with its first two derivatives.
#[derive(Clone, Debug)]
pub struct ShiftedSecondMoment {
    /// `4(−1)^k/k² · ρ_k` for `k ≥ 1`.
    weights: Vec<Complex64>,
}

impl ShiftedSecondMoment {
    pub fn new(s: &AngularState) -> Self {
        let rho = autocorrelation(s, s.window().dim() - 1);
        let weights = rho
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, r)| r * (4.0 * parity(k as i64) / (k * k) as f64))
            .collect();
        ShiftedSecondMoment { weights }
    }

    /// `V(γ) = ∫ |ψ(φ+γ)|² φ² dφ` over `(−π, π]`.
    pub fn value(&self, gamma: f64) -> f64 {
        self.derivs(gamma).0
    }

    /// `(V, V′, V″)` at `γ`.
    pub fn derivs(&self, gamma: f64) -> (f64, f64, f64) {
        let step = Complex64::from_polar(1.0, gamma);
        let mut phase = Complex64::new(1.0, 0.0);
        let (mut v, mut d1, mut d2) = (PI * PI / 3.0, 0.0, 0.0);
        for (i, w) in self.weights.iter().enumerate() {
            phase *= step;
            let k = (i + 1) as f64;
            let z = w * phase;
            v += z.re;
            d1 -= k * z.im;
            d2 -= k * k * z.re;
        }
        (v, d1, d2)
    }

    fn is_flat(&self) -> bool {
        self.weights.iter().all(|w| w.norm() <= 1e-15)
    }
}

fn wrap(gamma: f64) -> f64 {
    let g = (gamma + PI).rem_euclid(2.0 * PI) - PI;
    if g <= -PI {
        g + 2.0 * PI
    } else {
        g
    }
}

fn golden(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// γ-minimized `Δφ_p` and the minimizing shift `γ*`. A packet centred at
/// `φ₀` gives `γ* = φ₀`. A flat objective returns `γ* = 0`.
pub fn delta_phi_p(s: &AngularState) -> Result<(f64, f64)> {
    require_circle(s)?;
    let v = ShiftedSecondMoment::new(s);
    if v.is_flat() {
        return Ok(((PI * PI / 3.0).sqrt(), 0.0));
    }
    let (gamma, value) = minimize_shift(&v);
    Ok((value.max(0.0).sqrt(), gamma))
}

pub(crate) fn minimize_shift(v: &ShiftedSecondMoment) -> (f64, f64) {
    let h = 2.0 * PI / SCAN_POINTS as f64;
    let scan: Vec<f64> = (0..SCAN_POINTS)
        .map(|j| v.value(-PI + h * j as f64))
        .collect();
    let f = |g: f64| v.value(g);
    let mut best: Option<(f64, f64)> = None;
    for j in 0..SCAN_POINTS {
        let prev = scan[(j + SCAN_POINTS - 1) % SCAN_POINTS];
        let next = scan[(j + 1) % SCAN_POINTS];
        if scan[j] > prev || scan[j] > next {
            continue;
        }
        let centre = -PI + h * j as f64;
        let mut g = golden(&f, centre - h, centre + h, 1e-10);
        for _ in 0..3 {
            let (_, d1, d2) = v.derivs(g);
            if d2 <= 0.0 {
                break;
            }
            let step = d1 / d2;
            if step.abs() > h {
                break;
            }
            g -= step;
        }
        let g = wrap(g);
        let val = f(g);
        let better = match best {
            None => true,
            Some((bg, bv)) => {
                let tie = (val - bv).abs() <= 1e-13 * bv.abs().max(1.0);
                if tie {
                    g.abs() < bg.abs()
                } else {
                    val < bv
                }
            }
        };
        if better {
            best = Some((g, val));
        }
    }
    best.expect("a periodic sequence has a minimum")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    NaiveRobertson,
    ModifiedJudge,
    CosRelation,
    SinRelation,
    CombinedPhi,
}

impl Relation {
    pub fn is_strict(self) -> bool {
        self == Relation::CombinedPhi
    }
}

/// One uncertainty relation evaluated on one state. `satisfied` is `None`
/// when a side is undefined (for instance the modified relation without an
/// f-table, or `Δφ` for a state with vanishing mean resultant).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationMargin {
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: Option<bool>,
}

impl RelationMargin {
    pub fn new(relation: Relation, lhs: f64, rhs: f64) -> Self {
        let satisfied = if lhs.is_nan() || rhs.is_nan() {
            None
        } else if relation.is_strict() {
            Some(lhs > rhs)
        } else {
            Some(lhs >= rhs - ROUNDING)
        };
        RelationMargin {
            relation,
            lhs,
            rhs,
            satisfied,
        }
    }

    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

fn product(a: f64, b: f64) -> f64 {
    if a == 0.0 && b.is_infinite() {
        f64::NAN
    } else {
        a * b
    }
}

/// Margins of the naive and modified phase relations, the cosine and sine
/// relations and the combined-phase relation, in that order.
pub fn relation_margins(s: &AngularState, f_table: Option<&FTable>) -> Result<Vec<RelationMargin>> {
    Ok(margins_from(&moments(s)?, f_table))
}

pub fn margins_from(r: &MomentReport, f_table: Option<&FTable>) -> Vec<RelationMargin> {
    let dl = r.delta_l();
    let dp = r.delta_phi_p;
    let judge_lhs = {
        let denom = 1.0 - 3.0 * dp * dp / (PI * PI);
        if denom <= 0.0 {
            if dl * dp > 0.0 {
                f64::INFINITY
            } else {
                f64::NAN
            }
        } else {
            dl * dp / denom
        }
    };
    let judge_rhs = f_table
        .and_then(|t| t.interpolate(dp))
        .map(|f| 0.5 * f.sqrt())
        .unwrap_or(f64::NAN);
    vec![
        RelationMargin::new(Relation::NaiveRobertson, dl * dp, 0.5),
        RelationMargin::new(Relation::ModifiedJudge, judge_lhs, judge_rhs),
        RelationMargin::new(
            Relation::CosRelation,
            dl * r.delta_cos(),
            0.5 * r.mean_sin.abs(),
        ),
        RelationMargin::new(
            Relation::SinRelation,
            dl * r.delta_sin(),
            0.5 * r.mean_cos.abs(),
        ),
        RelationMargin::new(
            Relation::CombinedPhi,
            product(dl, r.delta_phi_combined),
            0.5,
        ),
    ]
}
