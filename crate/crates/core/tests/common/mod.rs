#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

use num_complex::Complex64;
use packetlab::AngularState;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

thread_local! {
    static RULES: RefCell<HashMap<usize, Rc<(Vec<f64>, Vec<f64>)>>> = RefCell::new(HashMap::new());
}

fn rule(n: usize) -> Rc<(Vec<f64>, Vec<f64>)> {
    RULES.with(|r| {
        r.borrow_mut()
            .entry(n)
            .or_insert_with(|| Rc::new(gauss_legendre(n)))
            .clone()
    })
}

/// `∫_a^b f` with an `n`-point Gauss–Legendre rule.
pub fn integrate<T>(n: usize, a: f64, b: f64, f: impl Fn(f64) -> T) -> T
where
    T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
{
    let r = rule(n);
    let (x, w) = (&r.0, &r.1);
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    x.iter()
        .zip(w.iter())
        .map(|(xi, wi)| f(c + h * xi) * (wi * h))
        .sum()
}

/// `|ψ(φ)|²` by direct summation of the mode series.
pub fn density(s: &AngularState, phi: f64) -> f64 {
    s.eval(phi).norm_sqr()
}

/// `ψ′(φ)` by direct summation.
pub fn derivative(s: &AngularState, phi: f64) -> Complex64 {
    let inv = 1.0 / (2.0 * PI).sqrt();
    s.window()
        .modes()
        .zip(s.coeffs())
        .map(|(m, &c)| {
            c * Complex64::new(0.0, m as f64) * Complex64::from_polar(inv, m as f64 * phi)
        })
        .sum()
}

/// `∫ |ψ|² (φ − γ)² dφ` over the window `[γ − π, γ + π]`, where the
/// integrand is smooth.
pub fn shifted_second_moment(s: &AngularState, gamma: f64, nodes: usize) -> f64 {
    integrate(nodes, gamma - PI, gamma + PI, |phi| {
        density(s, phi) * (phi - gamma) * (phi - gamma)
    })
}

/// Brute-force `min_γ` of the shifted second moment: a 720-point scan
/// refined by golden section on the best bracket.
pub fn brute_delta_phi_p(s: &AngularState, nodes: usize) -> (f64, f64) {
    let f = |g: f64| shifted_second_moment(s, g, nodes);
    let n = 720;
    let grid: Vec<f64> = (0..n)
        .map(|j| -PI + 2.0 * PI * j as f64 / n as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&g| f(g)).collect();
    let mut best = (f64::INFINITY, 0.0f64);
    for j in 0..n {
        let (a, b) = (grid[j] - 2.0 * PI / n as f64, grid[j] + 2.0 * PI / n as f64);
        let prev = vals[(j + n - 1) % n];
        let next = vals[(j + 1) % n];
        if vals[j] > prev || vals[j] > next {
            continue;
        }
        let (mut lo, mut hi) = (a, b);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = hi - r * (hi - lo);
            let x2 = lo + r * (hi - lo);
            if f(x1) < f(x2) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        let g = 0.5 * (lo + hi);
        let v = f(g);
        if v < best.0 - 1e-14 || (v < best.0 + 1e-14 && g.abs() < best.1.abs()) {
            best = (v, g);
        }
    }
    (best.0.max(0.0).sqrt(), best.1)
}

/// Largest componentwise distance after the best global phase.
pub fn inf_distance_up_to_phase(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let phase = overlap / overlap.norm();
    a.iter()
        .zip(b)
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}
