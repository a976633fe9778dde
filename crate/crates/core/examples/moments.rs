use packetlab::moments::{delta_phi_p, moments};
use packetlab::{AngularState, ModeWindow};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> packetlab::Result<()> {
    let w = ModeWindow::symmetric(16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let st = AngularState::haar_random(w, &mut rng)?;
    let r = moments(&st)?;
    println!("<L> = {:.6}   var L = {:.6}", r.mean_l, r.var_l);
    println!("<cos> = {:.6}   <sin> = {:.6}", r.mean_cos, r.mean_sin);
    println!(
        "dphi_p = {:.6} at gamma* = {:.6}",
        r.delta_phi_p, r.gamma_star
    );

    // the cut-independent spread does not care where the packet sits
    for gamma in [0.5, 1.5, 3.0] {
        let (d, g) = delta_phi_p(&st.rotated(gamma))?;
        println!("rotated by {gamma}: dphi_p = {d:.12}, gamma* = {g:.6}");
    }
    Ok(())
}
