use packetlab::phase::{minimize_phase, ModulusProfile, PeriodicityClass, PROFILE_GRID};

fn main() -> packetlab::Result<()> {
    let bump = ModulusProfile::from_fn(PROFILE_GRID, PeriodicityClass::Periodic, |phi| {
        (1.5 * phi.cos()).exp()
    })?;
    let flipped = ModulusProfile::antiperiodic_from(&ModulusProfile::uniform(PROFILE_GRID)?)?;
    for (name, r, n) in [
        ("bump", &bump, 0.0),
        ("bump", &bump, 2.0),
        ("uniform", &flipped, 0.5),
    ] {
        let m = minimize_phase(r, n)?;
        println!(
            "{name:>8} winding {n}: dL = {:.9} (linear {:.9}), slope {:.6}, fit residual {:.1e}",
            m.delta_l, m.delta_l_linear, m.phase.slope, m.phase.fit_residual
        );
    }
    Ok(())
}
