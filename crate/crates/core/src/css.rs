//! Circular squeezed states `ψ ∝ exp(S cos(φ−γ₀) + iℓ(φ−γ₀))`.
//!
//! The generating function `e^{S cos φ} = Σ_k I_k(S) e^{ikφ}` gives the mode
//! coefficients in closed form, and `Σ_k I_k(S)² = I₀(2S)` gives the norm.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_i_ratios, bessel_i_scaled};
use crate::error::{Error, Result};
use crate::moments::MomentReport;
use crate::state::{AngularState, ModeWindow};

/// Largest tail mass a constructed state may carry.
pub const CSS_TAIL_LIMIT: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CssParams {
    #[serde(rename = "S")]
    pub s: f64,
    pub ell: f64,
    #[serde(default)]
    pub center: f64,
}

impl CssParams {
    pub fn new(s: f64, ell: f64, center: f64) -> Self {
        CssParams { s, ell, center }
    }

    fn validate(&self) -> Result<i64> {
        if !(self.s >= 0.0) || !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "squeezing S must be finite and >= 0, got {}",
                self.s
            )));
        }
        if !self.center.is_finite() {
            return Err(Error::InvalidParameter("center must be finite".into()));
        }
        if !self.ell.is_finite() || self.ell.fract() != 0.0 {
            return Err(Error::IntegerRequired { ell: self.ell });
        }
        Ok(self.ell as i64)
    }
}

pub fn css_state(p: CssParams, window: ModeWindow) -> Result<AngularState> {
    let ell = p.validate()?;
    if !window.is_symmetric() {
        return Err(Error::WrongFamily(window));
    }
    let reach = ell.unsigned_abs() as usize + window.truncation();
    let ik = bessel_i_scaled(p.s, reach);
    let norm = bessel_i_scaled(2.0 * p.s, 0)[0].sqrt();
    let coeffs: Vec<Complex64> = window
        .modes()
        .map(|m| {
            let k = (m - ell).unsigned_abs() as usize;
            Complex64::from_polar(ik[k] / norm, -(m as f64) * p.center)
        })
        .collect();
    let kept: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let tail = window.tail_mass(&coeffs) + (1.0 - kept).max(0.0);
    if tail > CSS_TAIL_LIMIT {
        return Err(Error::TailMass {
            tail,
            limit: CSS_TAIL_LIMIT,
        });
    }
    AngularState::normalize(coeffs, window)
}

/// Closed-form moments of the untruncated state; `tailMass` is reported as 0.
pub fn css_moments(p: CssParams) -> Result<MomentReport> {
    let ell = p.validate()?;
    let kmax = (4.0 * p.s + 40.0 * (p.s + 1.0).sqrt() + 40.0) as usize;
    // A_k = I_k(2S)/I₀(2S) are the density's Fourier coefficients
    let a = bessel_i_ratios(2.0 * p.s, kmax);
    let a1 = a[1];
    let a2 = a[2];
    let (sin0, cos0) = p.center.sin_cos();
    let cos2 = (2.0 * p.center).cos();
    let mean_cos = a1 * cos0;
    let mean_sin = a1 * sin0;
    let var_cos = (0.5 * (1.0 + a2 * cos2) - mean_cos * mean_cos).max(0.0);
    let var_sin = (0.5 * (1.0 - a2 * cos2) - mean_sin * mean_sin).max(0.0);
    let phi2 = PI * PI / 3.0
        + a.iter()
            .enumerate()
            .skip(1)
            .map(|(k, ak)| 4.0 * crate::spectral::parity(k as i64) * ak / (k * k) as f64)
            .sum::<f64>();
    let (delta_phi_combined, gamma_star) = if p.s == 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        ((1.0 - a1 * a1).sqrt() / a1, wrap(p.center))
    };
    Ok(MomentReport {
        mean_l: ell as f64,
        var_l: 0.5 * p.s * a1,
        mean_cos,
        var_cos,
        mean_sin,
        var_sin,
        delta_phi_p: phi2.max(0.0).sqrt(),
        gamma_star,
        delta_phi_combined,
        tail_mass: 0.0,
    })
}

fn wrap(g: f64) -> f64 {
    let w = (g + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// `‖(L−ℓ)ψ − iS sin φ ψ‖` over the modes one step inside the truncation,
/// for an unrotated state.
pub fn squeezed_equation_residual(state: &AngularState, ell: f64, s: f64) -> Result<f64> {
    use crate::operators::{build, OperatorId};
    let w = state.window();
    let sin = build(OperatorId::SinPhi, w)?.apply(state)?;
    let c = state.coeffs();
    let mut sum = 0.0f64;
    for (i, m) in w.modes().enumerate().skip(1).take(w.dim() - 2) {
        let r = c[i] * (m as f64 - ell) - Complex64::new(0.0, s) * sin[i];
        sum += r.norm_sqr();
    }
    Ok(sum.sqrt())
}
