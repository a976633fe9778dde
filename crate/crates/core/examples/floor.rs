//! Smallest `ΔL` at fixed `⟨L⟩ = α` and the two-level state that reaches it.
use packetlab::operators::{build, OperatorId};
use packetlab::pencil::{floor_by_vertices, uncertainty_floor};
use packetlab::ModeWindow;

fn main() -> packetlab::Result<()> {
    let l = build(OperatorId::AngularMomentum, ModeWindow::symmetric(8)?)?;
    for alpha in [0.0, 0.1, 0.25, 0.5, 1.5, 2.9] {
        let (f, st) = uncertainty_floor(&l, alpha)?;
        let support: Vec<i64> = st
            .window()
            .modes()
            .filter(|&m| st.coeff(m).norm() > 1e-12)
            .collect();
        println!(
            "alpha = {alpha:>4}: floor {f:.6} (vertices {:.6}) on modes {support:?}",
            floor_by_vertices(&l, alpha)?
        );
    }
    Ok(())
}
