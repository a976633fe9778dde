//! Squeezed-state pencil for the circle family at a few `α`.
use packetlab::pencil::{solve_pencil, Family, PencilProblem};

fn main() -> packetlab::Result<()> {
    let w = Family::Circle.window(32)?;
    for alpha in [0.0, 0.3, 1.0] {
        let sol = solve_pencil(&PencilProblem::for_family(Family::Circle, w, alpha, 0.0)?)?;
        println!(
            "alpha = {alpha}: {:?}, {} pairs, {} physical, {} infinite",
            sol.kind,
            sol.pairs.len(),
            sol.physical().count(),
            sol.infinite_count
        );
        if let Some(p) = sol.smallest_physical() {
            println!("  smallest physical S = {:.6}", p.squeezing());
        }
    }
    Ok(())
}
