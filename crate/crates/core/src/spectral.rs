//! FFT helpers for periodic grids on `φ_j = −π + 2πj/G`.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward DFT, `X_k = Σ_j x_j e^{−2πijk/G}`.
pub fn fft_forward(buf: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    plan.process(buf);
}

/// Unnormalized inverse DFT, `x_j = Σ_k X_k e^{+2πijk/G}`.
pub fn fft_inverse(buf: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    plan.process(buf);
}

/// Signed wavenumber of DFT bin `idx` on a grid of `g` points. The Nyquist
/// bin maps to `−g/2`.
pub fn wavenumber(idx: usize, g: usize) -> i64 {
    if idx < g / 2 {
        idx as i64
    } else {
        idx as i64 - g as i64
    }
}

pub fn grid_angle(j: usize, g: usize) -> f64 {
    -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / g as f64
}

/// Mode coefficients `c_k` of `f(φ) = Σ_k c_k e^{ikφ}/√(2π)` from samples on
/// the shifted grid, indexed by DFT bin.
pub fn grid_to_modes(samples: &[Complex64]) -> Vec<Complex64> {
    let g = samples.len();
    let mut buf = samples.to_vec();
    fft_forward(&mut buf);
    let scale = (2.0 * std::f64::consts::PI).sqrt() / g as f64;
    buf.iter_mut().enumerate().for_each(|(idx, x)| {
        let k = wavenumber(idx, g);
        *x *= scale * parity(k);
    });
    buf
}

/// Inverse of [`grid_to_modes`].
pub fn modes_to_grid(modes: &[Complex64]) -> Vec<Complex64> {
    let g = modes.len();
    let inv = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut buf: Vec<Complex64> = modes
        .iter()
        .enumerate()
        .map(|(idx, &c)| c * (inv * parity(wavenumber(idx, g))))
        .collect();
    fft_inverse(&mut buf);
    buf
}

/// Applies `(−i d/dφ)^power` spectrally to a periodic grid function.
pub fn apply_momentum_power(samples: &[Complex64], power: u32) -> Vec<Complex64> {
    let g = samples.len();
    let mut modes = grid_to_modes(samples);
    modes.iter_mut().enumerate().for_each(|(idx, c)| {
        let k = wavenumber(idx, g);
        // Odd powers drop the Nyquist bin so the operator stays Hermitian.
        let factor = if power % 2 == 1 && 2 * k.unsigned_abs() as usize == g {
            0.0
        } else {
            (k as f64).powi(power as i32)
        };
        *c *= factor;
    });
    modes_to_grid(&modes)
}

#[inline]
pub(crate) fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}
