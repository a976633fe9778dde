//! States on the circle in a truncated angular-momentum basis.
//!
//! A state is stored as coefficients `c_m` of `ψ(φ) = Σ_m c_m e^{imφ}/√(2π)`
//! for the modes of a [`ModeWindow`]. The bounded-below window reuses the same
//! carrier for number eigenstates `|0⟩..|M⟩`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral;

pub const DEFAULT_TRUNCATION: usize = 64;
pub const DEFAULT_GRID: usize = 512;

/// Range of modes kept in the truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum ModeWindow {
    /// Modes `−M..=M`, the spectrum of `L = −i∂_φ`.
    Symmetric {
        #[serde(rename = "M")]
        m: usize,
    },
    /// Modes `0..=M`, the spectrum of the oscillator number operator.
    BoundedBelow {
        #[serde(rename = "M")]
        m: usize,
    },
}

impl ModeWindow {
    pub fn symmetric(m: usize) -> Result<Self> {
        let w = ModeWindow::Symmetric { m };
        w.validate()?;
        Ok(w)
    }

    pub fn bounded_below(m: usize) -> Result<Self> {
        let w = ModeWindow::BoundedBelow { m };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation() == 0 {
            return Err(Error::EmptyWindow);
        }
        Ok(())
    }

    pub fn truncation(&self) -> usize {
        match *self {
            ModeWindow::Symmetric { m } | ModeWindow::BoundedBelow { m } => m,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self, ModeWindow::Symmetric { .. })
    }

    pub fn dim(&self) -> usize {
        match *self {
            ModeWindow::Symmetric { m } => 2 * m + 1,
            ModeWindow::BoundedBelow { m } => m + 1,
        }
    }

    pub fn lowest_mode(&self) -> i64 {
        match *self {
            ModeWindow::Symmetric { m } => -(m as i64),
            ModeWindow::BoundedBelow { .. } => 0,
        }
    }

    pub fn highest_mode(&self) -> i64 {
        self.truncation() as i64
    }

    pub fn mode_at(&self, index: usize) -> i64 {
        self.lowest_mode() + index as i64
    }

    pub fn index_of(&self, mode: i64) -> Option<usize> {
        if mode < self.lowest_mode() || mode > self.highest_mode() {
            None
        } else {
            Some((mode - self.lowest_mode()) as usize)
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        self.lowest_mode()..=self.highest_mode()
    }

    /// Number of modes counted as "edge" on each truncated side: 10% of the
    /// basis overall, split over both ends for the symmetric window.
    pub fn edge_width(&self) -> usize {
        let d = self.dim() as f64;
        match self {
            ModeWindow::Symmetric { .. } => ((0.05 * d).ceil() as usize).max(1),
            ModeWindow::BoundedBelow { .. } => ((0.1 * d).ceil() as usize).max(1),
        }
    }

    /// Probability in the outermost modes, the proxy for truncation error.
    /// Only truncated edges count; `m = 0` of the bounded-below family is a
    /// physical boundary.
    pub fn tail_mass(&self, coeffs: &[Complex64]) -> f64 {
        let w = self.edge_width().min(coeffs.len());
        let top: f64 = coeffs[coeffs.len() - w..]
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        match self {
            ModeWindow::Symmetric { .. } => {
                top + coeffs[..w].iter().map(|c| c.norm_sqr()).sum::<f64>()
            }
            ModeWindow::BoundedBelow { .. } => top,
        }
    }
}

impl Default for ModeWindow {
    fn default() -> Self {
        ModeWindow::Symmetric {
            m: DEFAULT_TRUNCATION,
        }
    }
}

impl fmt::Display for ModeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeWindow::Symmetric { m } => write!(f, "symmetric(M={m})"),
            ModeWindow::BoundedBelow { m } => write!(f, "boundedBelow(M={m})"),
        }
    }
}

/// Unit-normalized coefficient vector over a [`ModeWindow`].
#[derive(Clone, Debug, PartialEq)]
pub struct AngularState {
    window: ModeWindow,
    coeffs: Vec<Complex64>,
}

impl AngularState {
    pub fn normalize(coeffs: Vec<Complex64>, window: ModeWindow) -> Result<Self> {
        window.validate()?;
        if coeffs.len() != window.dim() {
            return Err(Error::LengthMismatch {
                window,
                expected: window.dim(),
                got: coeffs.len(),
            });
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let coeffs = coeffs.into_iter().map(|c| c / norm).collect();
        Ok(AngularState { window, coeffs })
    }

    /// Angular-momentum (or number) eigenstate.
    pub fn pure_mode(window: ModeWindow, mode: i64) -> Result<Self> {
        let idx = window.index_of(mode).ok_or_else(|| {
            Error::InvalidParameter(format!("mode {mode} outside window {window}"))
        })?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); window.dim()];
        coeffs[idx] = Complex64::new(1.0, 0.0);
        Self::normalize(coeffs, window)
    }

    /// Uniform (Haar) random unit vector: i.i.d. complex Gaussians, normalized.
    pub fn haar_random(window: ModeWindow, rng: &mut impl rand::Rng) -> Result<Self> {
        use rand_distr::StandardNormal;
        let coeffs = (0..window.dim())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalize(coeffs, window)
    }

    pub fn window(&self) -> ModeWindow {
        self.window
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, mode: i64) -> Complex64 {
        self.window
            .index_of(mode)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn tail_mass(&self) -> f64 {
        self.window.tail_mass(&self.coeffs)
    }

    pub fn inner(&self, other: &AngularState) -> Result<Complex64> {
        self.same_window(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `ψ(φ) → ψ(φ − γ)`, i.e. the packet is carried forward by `γ`.
    pub fn rotated(&self, gamma: f64) -> AngularState {
        let coeffs = self
            .window
            .modes()
            .zip(&self.coeffs)
            .map(|(m, &c)| c * Complex64::from_polar(1.0, -(m as f64) * gamma))
            .collect();
        AngularState {
            window: self.window,
            coeffs,
        }
    }

    /// ∞-norm distance after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &AngularState) -> Result<f64> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn to_grid(&self, grid: usize) -> Result<GridFunction> {
        check_grid(self.window, grid)?;
        let mut modes = vec![Complex64::new(0.0, 0.0); grid];
        for (m, &c) in self.window.modes().zip(&self.coeffs) {
            modes[m.rem_euclid(grid as i64) as usize] = c;
        }
        Ok(GridFunction {
            samples: spectral::modes_to_grid(&modes),
        })
    }

    /// Direct evaluation of `ψ(φ)` at an arbitrary angle.
    pub fn eval(&self, phi: f64) -> Complex64 {
        let inv = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        self.window
            .modes()
            .zip(&self.coeffs)
            .map(|(m, &c)| c * Complex64::from_polar(inv, m as f64 * phi))
            .sum()
    }

    fn same_window(&self, other: &AngularState) -> Result<()> {
        if self.window != other.window {
            return Err(Error::WindowMismatch {
                left: self.window,
                right: other.window,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct StateWire {
    window: ModeWindow,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for AngularState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateWire {
            window: self.window,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AngularState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = StateWire::deserialize(d)?;
        let coeffs = wire
            .coeffs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        AngularState::normalize(coeffs, wire.window).map_err(serde::de::Error::custom)
    }
}

/// Samples of a function on `φ_j = −π + 2πj/G`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    samples: Vec<Complex64>,
}

/// Result of projecting a grid function onto a window.
#[derive(Clone, Debug)]
pub struct Projection {
    pub state: AngularState,
    /// Fraction of the grid norm that fell outside the window.
    pub discarded_mass: f64,
}

impl GridFunction {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if !samples.len().is_power_of_two() {
            return Err(Error::GridNotPowerOfTwo(samples.len()));
        }
        Ok(GridFunction { samples })
    }

    pub fn from_fn(grid: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(
            (0..grid)
                .map(|j| f(spectral::grid_angle(j, grid)))
                .collect(),
        )
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn angle(&self, j: usize) -> f64 {
        spectral::grid_angle(j, self.samples.len())
    }

    /// `(2π/G) Σ_j |f_j|²`.
    pub fn norm_sqr(&self) -> f64 {
        let g = self.samples.len() as f64;
        2.0 * std::f64::consts::PI / g * self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>()
    }

    /// Projects onto the window. Content outside the window is dropped and
    /// reported as `discarded_mass`; the kept part is renormalized.
    pub fn project(&self, window: ModeWindow) -> Result<Projection> {
        window.validate()?;
        check_grid(window, self.samples.len())?;
        let g = self.samples.len() as i64;
        let modes = spectral::grid_to_modes(&self.samples);
        let coeffs: Vec<Complex64> = window
            .modes()
            .map(|m| modes[m.rem_euclid(g) as usize])
            .collect();
        let kept: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let total: f64 = modes.iter().map(|c| c.norm_sqr()).sum();
        let state = AngularState::normalize(coeffs, window)?;
        Ok(Projection {
            state,
            discarded_mass: if total > 0.0 { 1.0 - kept / total } else { 0.0 },
        })
    }

    pub fn from_grid(&self, window: ModeWindow) -> Result<AngularState> {
        self.project(window).map(|p| p.state)
    }
}

fn check_grid(window: ModeWindow, grid: usize) -> Result<()> {
    if !grid.is_power_of_two() {
        return Err(Error::GridNotPowerOfTwo(grid));
    }
    let needed = 2 * window.dim();
    if grid < needed {
        return Err(Error::Undersampled {
            window,
            grid,
            needed,
        });
    }
    Ok(())
}

/// Smallest power-of-two grid accepted for `window`, never below the default.
pub fn grid_for(window: ModeWindow) -> usize {
    (2 * window.dim()).next_power_of_two().max(DEFAULT_GRID)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn normalize_examples() {
        let w = ModeWindow::symmetric(2).unwrap();
        let mut unit = vec![c(0.0); 5];
        unit[0] = c(1.0);
        assert_eq!(
            AngularState::normalize(unit.clone(), w).unwrap().coeffs(),
            &unit[..]
        );

        let mut two = vec![c(0.0); 5];
        two[0] = c(2.0);
        assert_eq!(AngularState::normalize(two, w).unwrap().coeffs(), &unit[..]);

        let ones = AngularState::normalize(vec![c(1.0); 5], w).unwrap();
        for x in ones.coeffs() {
            assert!((x.re - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_vector_rejected() {
        let w = ModeWindow::symmetric(1).unwrap();
        assert_eq!(
            AngularState::normalize(vec![c(0.0); 3], w),
            Err(Error::ZeroNorm)
        );
        assert!(matches!(
            AngularState::normalize(vec![c(1.0); 4], w),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(ModeWindow::symmetric(0), Err(Error::EmptyWindow));
    }

    #[test]
    fn grid_of_pure_modes() {
        let w = ModeWindow::symmetric(2).unwrap();
        let zero = AngularState::pure_mode(w, 0).unwrap().to_grid(16).unwrap();
        for s in zero.samples() {
            assert!((s - c(1.0 / (2.0 * PI).sqrt())).norm() < 1e-15);
        }
        let w1 = ModeWindow::symmetric(1).unwrap();
        let one = AngularState::pure_mode(w1, 1).unwrap().to_grid(8).unwrap();
        for (j, s) in one.samples().iter().enumerate() {
            let want = Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), one.angle(j));
            assert!((s - want).norm() < 1e-15);
        }
    }

    #[test]
    fn undersampled_and_non_power_of_two() {
        let w = ModeWindow::symmetric(4).unwrap();
        let s = AngularState::pure_mode(w, 0).unwrap();
        assert!(matches!(s.to_grid(16), Err(Error::Undersampled { .. })));
        assert_eq!(s.to_grid(24), Err(Error::GridNotPowerOfTwo(24)));
    }

    #[test]
    fn from_grid_examples() {
        let w = ModeWindow::symmetric(3).unwrap();
        let constant = GridFunction::from_fn(16, |_| c(0.7)).unwrap();
        let s = constant.from_grid(w).unwrap();
        assert!((s.coeff(0) - c(1.0)).norm() < 1e-14);

        let two = GridFunction::from_fn(16, |p| Complex64::from_polar(1.0, 2.0 * p)).unwrap();
        let s = two.from_grid(w).unwrap();
        assert!((s.coeff(2) - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn projection_reports_discarded_mass() {
        let w = ModeWindow::symmetric(1).unwrap();
        let f = GridFunction::from_fn(8, |p| c(1.0) + Complex64::from_polar(1.0, 3.0 * p)).unwrap();
        let p = f.project(w).unwrap();
        assert!((p.discarded_mass - 0.5).abs() < 1e-14);
        assert!((p.state.coeff(0) - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn json_layout() {
        let w = ModeWindow::symmetric(1).unwrap();
        let s = AngularState::pure_mode(w, -1).unwrap();
        let text = s.to_json();
        assert_eq!(
            text,
            r#"{"window":{"kind":"symmetric","M":1},"coeffs":[[1.0,0.0],[0.0,0.0],[0.0,0.0]]}"#
        );
        assert_eq!(AngularState::from_json(&text).unwrap(), s);
        let bb = ModeWindow::bounded_below(2).unwrap();
        assert_eq!(
            serde_json::to_string(&bb).unwrap(),
            r#"{"kind":"boundedBelow","M":2}"#
        );
    }

    #[test]
    fn tail_mass_counts_truncated_edges_only() {
        let w = ModeWindow::bounded_below(9).unwrap();
        assert_eq!(w.edge_width(), 1);
        let ground = AngularState::pure_mode(w, 0).unwrap();
        assert_eq!(ground.tail_mass(), 0.0);
        let top = AngularState::pure_mode(w, 9).unwrap();
        assert_eq!(top.tail_mass(), 1.0);
        let sym = ModeWindow::symmetric(64).unwrap();
        assert_eq!(sym.edge_width(), 7);
        assert_eq!(AngularState::pure_mode(sym, -58).unwrap().tail_mass(), 1.0);
        assert_eq!(AngularState::pure_mode(sym, -57).unwrap().tail_mass(), 0.0);
    }
}
