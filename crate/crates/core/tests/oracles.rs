mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use packetlab::css::{css_moments, css_state, CssParams};
use packetlab::moments::moments;
use packetlab::operators::{build, build_square, OperatorId};
use packetlab::pencil::{solve_pencil, Family, PencilProblem};
use packetlab::phase::{
    delta_l_of, f_table, f_value, minimize_phase, ModulusProfile, PeriodicityClass, PhaseProfile,
    PROFILE_GRID,
};
use packetlab::{AngularState, ModeWindow};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn multiplication_operators_match_quadrature() {
    let w = ModeWindow::symmetric(12).unwrap();
    let cases: [(OperatorId, bool, fn(f64) -> f64); 8] = [
        (OperatorId::CosPhi, false, f64::cos),
        (OperatorId::SinPhi, false, f64::sin),
        (OperatorId::PhiP, false, |x| x),
        (OperatorId::PhiPSquared, false, |x| x * x),
        (OperatorId::CosPhi, true, |x| x.cos().powi(2)),
        (OperatorId::SinPhi, true, |x| x.sin().powi(2)),
        (OperatorId::PhiP, true, |x| x * x),
        (OperatorId::PhiPSquared, true, |x| x.powi(4)),
    ];
    for (id, square, f) in cases {
        let m = if square {
            build_square(id, w)
        } else {
            build(id, w)
        }
        .unwrap();
        for a in w.modes() {
            for b in w.modes() {
                let k = (b - a) as f64;
                let q = common::integrate(4096, -PI, PI, |phi| {
                    c(f(phi) / (2.0 * PI), 0.0) * Complex64::from_polar(1.0, k * phi)
                });
                let e = m.entry(a, b);
                assert!(
                    (e - q).norm() < 1e-10,
                    "{id:?} square={square} ({a},{b}): {e} vs {q}"
                );
            }
        }
    }
}

#[test]
fn phase_operators_match_shift_definitions() {
    let w = ModeWindow::bounded_below(10).unwrap();
    let n = w.dim();
    // E|n⟩ = |n−1⟩, E|0⟩ = 0
    let mut e = DMatrix::<Complex64>::zeros(n, n);
    for j in 1..n {
        e[(j - 1, j)] = c(1.0, 0.0);
    }
    let ed = e.adjoint();
    let cos = (&e + &ed) * c(0.5, 0.0);
    let sin = (&e - &ed) * c(0.0, -0.5);
    let pc = build(OperatorId::PhaseCos, w).unwrap();
    let ps = build(OperatorId::PhaseSin, w).unwrap();
    assert!((pc.entries() - cos).norm() < 1e-15);
    assert!((ps.entries() - sin).norm() < 1e-15);
    let num = build(OperatorId::Number, w).unwrap();
    for k in 0..n {
        assert_eq!(num.entries()[(k, k)], c(k as f64, 0.0));
    }
}

#[test]
fn moments_match_grid_quadrature() {
    let w = ModeWindow::symmetric(24).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut states: Vec<AngularState> = (0..4)
        .map(|_| AngularState::haar_random(w, &mut rng).unwrap())
        .collect();
    states.push(css_state(CssParams::new(3.0, 2.0, 1.3), w).unwrap());
    for s in &states {
        let r = moments(s).unwrap();
        let ex = |f: &dyn Fn(f64) -> f64| {
            common::integrate(1024, -PI, PI, |p| common::density(s, p) * f(p))
        };
        let mc = ex(&f64::cos);
        let ms = ex(&f64::sin);
        assert!((r.mean_cos - mc).abs() < 1e-9);
        assert!((r.mean_sin - ms).abs() < 1e-9);
        assert!((r.var_cos - (ex(&|p: f64| p.cos().powi(2)) - mc * mc)).abs() < 1e-9);
        assert!((r.var_sin - (ex(&|p: f64| p.sin().powi(2)) - ms * ms)).abs() < 1e-9);
        let ml = common::integrate(1024, -PI, PI, |p| {
            (s.eval(p).conj() * common::derivative(s, p) * c(0.0, -1.0)).re
        });
        let l2 = common::integrate(1024, -PI, PI, |p| common::derivative(s, p).norm_sqr());
        assert!((r.mean_l - ml).abs() < 1e-9);
        assert!((r.var_l - (l2 - ml * ml)).abs() < 1e-9);
        let (dp, g) = common::brute_delta_phi_p(s, 256);
        assert!(
            (r.delta_phi_p - dp).abs() < 1e-9,
            "{} vs {dp}",
            r.delta_phi_p
        );
        assert!(
            (packetlab_wrap(r.gamma_star - g)).abs() < 1e-6,
            "{} vs {g}",
            r.gamma_star
        );
    }
}

fn packetlab_wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

#[test]
fn css_coefficients_match_grid_transform() {
    let w = ModeWindow::symmetric(64).unwrap();
    for &(s, ell, center) in &[(0.25, 0.0, 0.0), (2.0, -3.0, 2.5), (8.0, 5.0, -0.4)] {
        let st = css_state(CssParams::new(s, ell, center), w).unwrap();
        let g = 4096;
        let psi = |phi: f64| {
            Complex64::from_polar((s * (phi - center).cos()).exp(), ell * (phi - center))
        };
        let phis: Vec<f64> = (0..g)
            .map(|j| -PI + 2.0 * PI * j as f64 / g as f64)
            .collect();
        let norm =
            (phis.iter().map(|&p| psi(p).norm_sqr()).sum::<f64>() * 2.0 * PI / g as f64).sqrt();
        for m in w.modes() {
            let coeff = phis
                .iter()
                .map(|&p| psi(p) * Complex64::from_polar(1.0, -(m as f64) * p))
                .sum::<Complex64>()
                * ((2.0 * PI).sqrt() / g as f64 / norm);
            assert!((coeff - st.coeff(m)).norm() < 1e-10, "S={s} m={m}");
        }
        let a = css_moments(CssParams::new(s, ell, center)).unwrap();
        let e = moments(&st).unwrap();
        assert!((a.delta_phi_p - e.delta_phi_p).abs() < 1e-9);
    }
}

fn series_i(nu: f64, x: f64) -> f64 {
    // I_ν(x) = Σ (x/2)^{2k+ν} / (k! Γ(k+ν+1)), with Γ by upward recursion
    // from Γ(ν+1) for ν = −3/2 (Γ(−1/2) = −2√π)
    assert!((nu + 1.5).abs() < 1e-15);
    let mut gamma = -2.0 * PI.sqrt();
    let mut fact = 1.0;
    let mut sum = 0.0;
    for k in 0..80 {
        let kf = k as f64;
        if k > 0 {
            fact *= kf;
            gamma *= kf + nu;
        }
        sum += (0.5 * x).powf(2.0 * kf + nu) / (fact * gamma);
    }
    sum
}

#[test]
fn oscillator_eigenvalue_is_a_bessel_zero() {
    let w = ModeWindow::bounded_below(64).unwrap();
    let sol =
        solve_pencil(&PencilProblem::for_family(Family::Oscillator, w, 0.5, 0.0).unwrap()).unwrap();
    let p = sol
        .smallest_physical()
        .expect("a physical solution at alpha = 1/2");
    let s = p.squeezing();
    assert!(series_i(-1.5, s).abs() < 1e-10, "S = {s}");
    assert!((s - 1.199_679).abs() < 1e-6);
    // recurrence c_{n+1} = c_{n−1} + 2(n − α)c_n/S
    let v = p.vector.coeffs();
    for n in 1..10 {
        let pred = v[n - 1] + v[n] * (2.0 * (n as f64 - 0.5) / s);
        assert!((v[n + 1] - pred).norm() < 1e-9);
    }
    assert!((v[1] - v[0] * (-1.0 / s)).norm() < 1e-9);
}

/// Ground state of `L² + μφ_p²` over even profiles in an orthonormal cosine
/// basis, which minimizes `ΔL` at fixed `Δφ_p`; `μ` is bisected in log scale.
fn eigen_oracle_f(target: f64) -> f64 {
    let k = 160;
    let int = |n: i64| {
        if n == 0 {
            2.0 * PI.powi(3) / 3.0
        } else {
            4.0 * PI * if n % 2 == 0 { 1.0 } else { -1.0 } / (n * n) as f64
        }
    };
    let norm = |i: usize| {
        if i == 0 {
            1.0 / (2.0 * PI).sqrt()
        } else {
            1.0 / PI.sqrt()
        }
    };
    let phi2 = DMatrix::from_fn(k, k, |i, j| {
        let (a, b) = (i as i64, j as i64);
        0.5 * (int(a - b) + int(a + b)) * norm(i) * norm(j)
    });
    let l2 = DMatrix::from_fn(k, k, |i, j| if i == j { (i * i) as f64 } else { 0.0 });
    let ground = |mu: f64| {
        let e = SymmetricEigen::new(&l2 + &phi2 * mu);
        let idx = (0..k)
            .min_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]))
            .unwrap();
        let v = e.eigenvectors.column(idx).into_owned();
        let dp = (v.transpose() * &phi2 * &v)[0].sqrt();
        let dl = (v.transpose() * &l2 * &v)[0].sqrt();
        (dp, dl)
    };
    let (mut lo, mut hi) = (-12.0f64, 12.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ground(mid.exp()).0 > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (dp, dl) = ground((0.5 * (lo + hi)).exp());
    f_value(dl, dp)
}

#[test]
fn f_table_matches_eigen_oracle() {
    let targets = [0.5, 1.0, 1.5];
    let table = f_table(&targets, 0).unwrap();
    for p in &table.points {
        assert!(p.converged);
        let oracle = eigen_oracle_f(p.delta_phi_p);
        assert!(
            ((p.f - oracle) / oracle).abs() < 1e-6,
            "dphi {}: {} vs oracle {oracle}",
            p.delta_phi_p,
            p.f
        );
    }
    let shifted = f_table(&targets[1..2], 3).unwrap();
    assert!((shifted.points[0].f - table.points[1].f).abs() < 1e-6);
}

#[test]
fn minimizer_on_css_modulus_matches_css_spread() {
    let s = 1.0;
    let r = ModulusProfile::from_fn(PROFILE_GRID, PeriodicityClass::Periodic, |phi| {
        (s * phi.cos()).exp()
    })
    .unwrap();
    let min = minimize_phase(&r, 0.0).unwrap();
    let css = css_moments(CssParams::new(s, 0.0, 0.0)).unwrap();
    assert!(min.converged);
    assert!((min.delta_l - css.var_l.sqrt()).abs() < 1e-9);
    assert!(min.phase.fit_residual < 1e-6 && min.phase.slope.abs() < 1e-6);
}

#[test]
fn raised_cosine_spread_matches_engine() {
    let r = ModulusProfile::from_fn(PROFILE_GRID, PeriodicityClass::Periodic, |phi| {
        1.0 + phi.cos()
    })
    .unwrap();
    let dl = delta_l_of(&r, &PhaseProfile::linear(PROFILE_GRID, 0.0, 0.0)).unwrap();
    // ψ ∝ 1 + cos φ has coefficients (½, 1, ½) on modes (−1, 0, 1)
    let w = ModeWindow::symmetric(4).unwrap();
    let mut coeffs = vec![c(0.0, 0.0); w.dim()];
    coeffs[w.index_of(-1).unwrap()] = c(0.5, 0.0);
    coeffs[w.index_of(0).unwrap()] = c(1.0, 0.0);
    coeffs[w.index_of(1).unwrap()] = c(0.5, 0.0);
    let st = AngularState::normalize(coeffs, w).unwrap();
    assert!((dl - moments(&st).unwrap().var_l.sqrt()).abs() < 1e-9);
    assert!((dl - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
}
