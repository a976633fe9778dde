use num_complex::Complex64;
use packetlab::bessel::bessel_i;
use packetlab::css::{css_moments, css_state, CssParams};
use packetlab::moments::{delta_phi_p, moments, relation_margins, Relation};
use packetlab::operators::{build, OperatorId};
use packetlab::pencil::{floor_by_vertices, uncertainty_floor};
use packetlab::spectral::{grid_to_modes, modes_to_grid};
use packetlab::{AngularState, ModeWindow};
use proptest::prelude::*;

fn state(m: usize) -> impl Strategy<Value = AngularState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * m + 1).prop_filter_map(
        "nonzero",
        move |v| {
            let coeffs = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            AngularState::normalize(coeffs, ModeWindow::symmetric(m).unwrap()).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operators_are_hermitian(m in 1usize..24, bounded in any::<bool>()) {
        let (w, ids) = if bounded {
            (ModeWindow::bounded_below(m).unwrap(), vec![OperatorId::Number, OperatorId::PhaseCos, OperatorId::PhaseSin])
        } else {
            (ModeWindow::symmetric(m).unwrap(), vec![OperatorId::AngularMomentum, OperatorId::CosPhi, OperatorId::SinPhi, OperatorId::PhiP, OperatorId::PhiPSquared])
        };
        for id in ids {
            prop_assert!(build(id, w).unwrap().hermiticity_defect() < 1e-15);
        }
    }

    #[test]
    fn relations_hold_for_any_state(s in state(10)) {
        for m in relation_margins(&s, None).unwrap() {
            match m.relation {
                Relation::CosRelation | Relation::SinRelation => prop_assert!(m.margin() >= -1e-12),
                Relation::CombinedPhi => prop_assert!(m.satisfied != Some(false)),
                _ => {}
            }
        }
        let r = moments(&s).unwrap();
        prop_assert!(r.var_l >= 0.0 && r.var_cos >= 0.0 && r.var_sin >= 0.0);
        prop_assert!(r.delta_phi_p <= std::f64::consts::PI / 3f64.sqrt() + 1e-12);
    }

    #[test]
    fn spread_is_rotation_invariant(s in state(8), gamma in -3.0f64..3.0) {
        let (d0, _) = delta_phi_p(&s).unwrap();
        let (d1, _) = delta_phi_p(&s.rotated(gamma)).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-9);
        let (a, b) = (moments(&s).unwrap(), moments(&s.rotated(gamma)).unwrap());
        prop_assert!((a.var_l - b.var_l).abs() < 1e-12);
        prop_assert!((a.mean_cos.hypot(a.mean_sin) - b.mean_cos.hypot(b.mean_sin)).abs() < 1e-12);
    }

    #[test]
    fn winding_shift_moves_mean_only(s in state(6), k in -3i64..=3) {
        // multiplying by e^{ikφ} relabels modes m → m + k
        let wide = ModeWindow::symmetric(9).unwrap();
        let mut shifted = vec![Complex64::new(0.0, 0.0); wide.dim()];
        for (m, &c) in s.window().modes().zip(s.coeffs()) {
            shifted[wide.index_of(m + k).unwrap()] = c;
        }
        let t = AngularState::normalize(shifted, wide).unwrap();
        let (a, b) = (moments(&s).unwrap(), moments(&t).unwrap());
        prop_assert!((b.mean_l - a.mean_l - k as f64).abs() < 1e-12);
        prop_assert!((a.var_l - b.var_l).abs() < 1e-10);
        prop_assert!((a.delta_phi_p - b.delta_phi_p).abs() < 1e-12);
    }

    #[test]
    fn css_saturates_sine_relation(s in 0.1f64..6.0, ell in -5i64..=5, center in -3.0f64..3.0) {
        let p = CssParams::new(s, ell as f64, center);
        let st = css_state(p, ModeWindow::symmetric(64).unwrap()).unwrap();
        let r = moments(&st).unwrap();
        let rotated_cos = r.mean_cos.hypot(r.mean_sin);
        let a = css_moments(CssParams::new(s, ell as f64, 0.0)).unwrap();
        prop_assert!((a.delta_l() * a.delta_sin() - 0.5 * a.mean_cos).abs() < 1e-12);
        prop_assert!((a.mean_cos - rotated_cos).abs() < 1e-12);
        prop_assert!((r.mean_l - ell as f64).abs() < 1e-12);
    }

    #[test]
    fn floor_is_two_level_and_periodic(alpha in -20.0f64..20.0) {
        let l = build(OperatorId::AngularMomentum, ModeWindow::symmetric(32).unwrap()).unwrap();
        let (f, st) = uncertainty_floor(&l, alpha).unwrap();
        prop_assert!((f - floor_by_vertices(&l, alpha).unwrap()).abs() < 1e-12);
        prop_assert!((f - uncertainty_floor(&l, alpha + 1.0).unwrap().0).abs() < 1e-9);
        prop_assert!(f <= 0.5);
        let r = moments(&st).unwrap();
        prop_assert!((r.mean_l - alpha).abs() < 1e-12);
        prop_assert!((r.delta_l() - f).abs() < 1e-12);
    }

    #[test]
    fn grid_round_trip(v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64)) {
        let modes: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let back = grid_to_modes(&modes_to_grid(&modes));
        for (x, y) in modes.iter().zip(&back) {
            prop_assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn bessel_recurrence(x in 0.01f64..30.0) {
        let i = bessel_i(x, 20);
        for k in 1..19 {
            let lhs = i[k - 1] - i[k + 1];
            let rhs = 2.0 * k as f64 / x * i[k];
            prop_assert!((lhs - rhs).abs() <= 1e-12 * i[k - 1].abs().max(1e-300));
        }
    }
}
