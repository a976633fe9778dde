//! Oscillator-family pencil: physical eigenvalues only appear at
//! non-integer `α`, where `I_{−1−α}(S)` vanishes.
use packetlab::pencil::{solve_pencil, Family, PencilProblem};

fn main() -> packetlab::Result<()> {
    let w = Family::Oscillator.window(64)?;
    for alpha in [0.0, 0.5, 1.0, 1.5] {
        let sol = solve_pencil(&PencilProblem::for_family(
            Family::Oscillator,
            w,
            alpha,
            0.0,
        )?)?;
        match sol.smallest_physical() {
            Some(p) => println!("alpha = {alpha}: S = {:.6}", p.squeezing()),
            None => println!("alpha = {alpha}: no physical eigenvalue"),
        }
    }
    Ok(())
}
