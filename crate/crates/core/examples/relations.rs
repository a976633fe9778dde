use packetlab::css::{css_state, CssParams};
use packetlab::moments::relation_margins;
use packetlab::{AngularState, ModeWindow};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> packetlab::Result<()> {
    let w = ModeWindow::symmetric(32)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let states = [
        ("random", AngularState::haar_random(w, &mut rng)?),
        ("css S=0.25", css_state(CssParams::new(0.25, 0.0, 0.0), w)?),
        ("css S=4", css_state(CssParams::new(4.0, 0.0, 0.0), w)?),
    ];
    for (name, s) in &states {
        println!("{name}");
        for m in relation_margins(s, None)? {
            println!(
                "  {:?}: {:.6} vs {:.6} -> {:?}",
                m.relation, m.lhs, m.rhs, m.satisfied
            );
        }
    }
    Ok(())
}
