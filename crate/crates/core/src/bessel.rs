//! Modified Bessel functions of the first kind, integer order.
//!
//! Values come from Miller's downward recurrence
//! `I_{k−1}(x) = (2k/x) I_k(x) + I_{k+1}(x)`, normalized by the generating
//! function identity `e^x = I_0(x) + 2 Σ_{k≥1} I_k(x)`. Downward recurrence
//! is stable because `I_k` is the minimal solution as `k → ∞`.

/// `e^{−x} I_k(x)` for `k = 0..=nmax`, `x ≥ 0`.
pub fn bessel_i_scaled(x: f64, nmax: usize) -> Vec<f64> {
    assert!(
        x >= 0.0 && x.is_finite(),
        "bessel_i_scaled needs finite x >= 0"
    );
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let reach = (nmax as f64).max(x);
    let start = (reach + (40.0 * reach).sqrt() + 16.0).ceil() as usize;
    let mut upper = 0.0_f64;
    let mut current = 1e-280_f64;
    let mut sum = 0.0_f64;
    for k in (1..=start).rev() {
        if k <= nmax {
            out[k] = current;
        }
        sum += 2.0 * current;
        let lower = 2.0 * k as f64 / x * current + upper;
        upper = current;
        current = lower;
        if current > 1e250 {
            let s = 1e-250;
            current *= s;
            upper *= s;
            sum *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    out[0] = current;
    sum += current;
    out.iter_mut().for_each(|v| *v /= sum);
    out
}

/// `I_k(x)` for `k = 0..=nmax`. Overflows for `x ≳ 700`; use
/// [`bessel_i_scaled`] there.
pub fn bessel_i(x: f64, nmax: usize) -> Vec<f64> {
    let scale = x.exp();
    bessel_i_scaled(x, nmax)
        .into_iter()
        .map(|v| v * scale)
        .collect()
}

/// Ratios `A_k = I_k(x)/I_0(x)` for `k = 0..=nmax`.
pub fn bessel_i_ratios(x: f64, nmax: usize) -> Vec<f64> {
    let v = bessel_i_scaled(x, nmax);
    let i0 = v[0];
    v.into_iter().map(|t| t / i0).collect()
}
