//! Dense operator matrices in the mode basis.
//!
//! Circle operators act on symmetric windows with `⟨m|X|n⟩ =
//! (1/2π)∫ e^{−imφ} X e^{inφ} dφ`. The number/phase family lives on the
//! bounded-below window with one-sided (Susskind–Glogower) shifts
//! `⟨m|E⁻|m+1⟩ = 1`, `E⁺ = (E⁻)†`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{AngularState, ModeWindow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorId {
    AngularMomentum,
    CosPhi,
    SinPhi,
    PhiP,
    PhiPSquared,
    Number,
    PhaseCos,
    PhaseSin,
}

impl OperatorId {
    pub fn is_circle(self) -> bool {
        !matches!(
            self,
            OperatorId::Number | OperatorId::PhaseCos | OperatorId::PhaseSin
        )
    }

    fn check(self, window: ModeWindow) -> Result<()> {
        window.validate()?;
        if self.is_circle() != window.is_symmetric() {
            return Err(Error::IncompatibleFamily { id: self, window });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    id: OperatorId,
    window: ModeWindow,
    entries: DMatrix<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn im(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

fn sign(k: i64) -> f64 {
    crate::spectral::parity(k)
}

/// Fills a matrix from a rule on `(row mode, column mode)`.
fn from_rule(window: ModeWindow, rule: impl Fn(i64, i64) -> Complex64) -> DMatrix<Complex64> {
    let d = window.dim();
    DMatrix::from_fn(d, d, |i, j| rule(window.mode_at(i), window.mode_at(j)))
}

pub fn build(id: OperatorId, window: ModeWindow) -> Result<OperatorMatrix> {
    id.check(window)?;
    let entries = match id {
        OperatorId::AngularMomentum | OperatorId::Number => {
            from_rule(window, |m, n| if m == n { re(m as f64) } else { ZERO })
        }
        OperatorId::CosPhi | OperatorId::PhaseCos => {
            from_rule(
                window,
                |m, n| {
                    if (m - n).abs() == 1 {
                        re(0.5)
                    } else {
                        ZERO
                    }
                },
            )
        }
        // sin φ e^{inφ} = (e^{i(n+1)φ} − e^{i(n−1)φ})/(2i)
        OperatorId::SinPhi => from_rule(window, |m, n| match n - m {
            1 => im(0.5),
            -1 => im(-0.5),
            _ => ZERO,
        }),
        // (E⁻ − E⁺)/(2i) with E⁻ on the superdiagonal
        OperatorId::PhaseSin => from_rule(window, |m, n| match n - m {
            1 => im(-0.5),
            -1 => im(0.5),
            _ => ZERO,
        }),
        // (1/2π)∫ φ e^{ikφ} dφ = −i(−1)^k/k
        OperatorId::PhiP => from_rule(window, |m, n| {
            let k = n - m;
            if k == 0 {
                ZERO
            } else {
                im(-sign(k) / k as f64)
            }
        }),
        OperatorId::PhiPSquared => phi_power_two(window),
    };
    Ok(OperatorMatrix {
        id,
        window,
        entries,
    })
}

fn phi_power_two(window: ModeWindow) -> DMatrix<Complex64> {
    from_rule(window, |m, n| {
        let k = n - m;
        if k == 0 {
            re(PI * PI / 3.0)
        } else {
            re(2.0 * sign(k) / (k * k) as f64)
        }
    })
}

/// Truncation of the exact square `X²` (product taken in the full basis).
/// Differs from `build(id)²` in the rows that couple across the truncation.
pub fn build_square(id: OperatorId, window: ModeWindow) -> Result<OperatorMatrix> {
    id.check(window)?;
    let entries = match id {
        OperatorId::AngularMomentum | OperatorId::Number => {
            from_rule(
                window,
                |m, n| {
                    if m == n {
                        re((m * m) as f64)
                    } else {
                        ZERO
                    }
                },
            )
        }
        // cos² = (1 + cos 2φ)/2, sin² = (1 − cos 2φ)/2
        OperatorId::CosPhi => from_rule(window, |m, n| match (m - n).abs() {
            0 => re(0.5),
            2 => re(0.25),
            _ => ZERO,
        }),
        OperatorId::SinPhi => from_rule(window, |m, n| match (m - n).abs() {
            0 => re(0.5),
            2 => re(-0.25),
            _ => ZERO,
        }),
        OperatorId::PhiP => phi_power_two(window),
        // (1/2π)∫ φ⁴ e^{ikφ} dφ = (−1)^k (4π²/k² − 24/k⁴)
        OperatorId::PhiPSquared => from_rule(window, |m, n| {
            let k = n - m;
            if k == 0 {
                re(PI.powi(4) / 5.0)
            } else {
                let kf = k as f64;
                re(sign(k) * (4.0 * PI * PI / (kf * kf) - 24.0 / kf.powi(4)))
            }
        }),
        // E⁻E⁺ = 1 and E⁺E⁻ = 1 − |0⟩⟨0| in the full oscillator basis
        OperatorId::PhaseCos | OperatorId::PhaseSin => {
            let shift2 = if id == OperatorId::PhaseCos {
                0.25
            } else {
                -0.25
            };
            from_rule(window, |m, n| match (m - n).abs() {
                0 if m == 0 => re(0.25),
                0 => re(0.5),
                2 => re(shift2),
                _ => ZERO,
            })
        }
    };
    Ok(OperatorMatrix {
        id,
        window,
        entries,
    })
}

impl OperatorMatrix {
    pub fn id(&self) -> OperatorId {
        self.id
    }

    pub fn window(&self) -> ModeWindow {
        self.window
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, row_mode: i64, col_mode: i64) -> Complex64 {
        match (
            self.window.index_of(row_mode),
            self.window.index_of(col_mode),
        ) {
            (Some(i), Some(j)) => self.entries[(i, j)],
            _ => ZERO,
        }
    }

    /// `max |X − X†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.entries.adjoint();
        (&self.entries - adj)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Diagonal entries as reals, when the matrix is real diagonal.
    pub fn real_diagonal(&self) -> Option<Vec<f64>> {
        let d = self.entries.nrows();
        for i in 0..d {
            for j in 0..d {
                let z = self.entries[(i, j)];
                if (i != j && z != ZERO) || (i == j && z.im != 0.0) {
                    return None;
                }
            }
        }
        Some((0..d).map(|i| self.entries[(i, i)].re).collect())
    }

    pub fn apply(&self, s: &AngularState) -> Result<Vec<Complex64>> {
        self.check_window(s.window())?;
        Ok(self.apply_raw(s.coeffs()))
    }

    pub(crate) fn apply_raw(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = v.len();
        (0..d)
            .map(|i| (0..d).map(|j| self.entries[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `⟨s|X|s⟩`, complex so that callers can check the imaginary part.
    pub fn expectation(&self, s: &AngularState) -> Result<Complex64> {
        let xs = self.apply(s)?;
        Ok(s.coeffs().iter().zip(&xs).map(|(a, b)| a.conj() * b).sum())
    }

    fn check_window(&self, w: ModeWindow) -> Result<()> {
        if self.window != w {
            return Err(Error::WindowMismatch {
                left: self.window,
                right: w,
            });
        }
        Ok(())
    }

    /// Nonzero entries as `i,j,re,im` after a one-line JSON header.
    pub fn to_csv(&self) -> String {
        let header = serde_json::json!({
            "id": self.id,
            "kind": match self.window {
                ModeWindow::Symmetric { .. } => "symmetric",
                ModeWindow::BoundedBelow { .. } => "boundedBelow",
            },
            "M": self.window.truncation(),
        });
        let mut out = format!("{header}\ni,j,re,im\n");
        for i in 0..self.entries.nrows() {
            for j in 0..self.entries.ncols() {
                let z = self.entries[(i, j)];
                if z != ZERO {
                    let _ = writeln!(out, "{i},{j},{:.16e},{:.16e}", z.re, z.im);
                }
            }
        }
        out
    }
}

pub fn commutator(x: &OperatorMatrix, y: &OperatorMatrix) -> Result<DMatrix<Complex64>> {
    x.check_window(y.window)?;
    Ok(&x.entries * &y.entries - &y.entries * &x.entries)
}

/// Max abs entry of `m` over the block that excludes `edge` rows and
/// columns at each truncated end.
pub fn interior_max(m: &DMatrix<Complex64>, window: ModeWindow, edge: usize) -> f64 {
    let d = m.nrows();
    let lo = if window.is_symmetric() { edge } else { 0 };
    let hi = d.saturating_sub(edge);
    let mut worst = 0.0_f64;
    for i in lo..hi {
        for j in lo..hi {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}
