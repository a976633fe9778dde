//! Circular squeezed states across squeezing strengths, with the sine
//! relation saturated at every `S`.
use packetlab::css::{css_moments, css_state, CssParams};
use packetlab::moments::moments;
use packetlab::ModeWindow;

fn main() -> packetlab::Result<()> {
    let w = ModeWindow::symmetric(64)?;
    println!(
        "{:>6} {:>10} {:>10} {:>12} {:>10}",
        "S", "meanCos", "dL*dSin", "meanCos/2", "tail"
    );
    for s in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let st = css_state(CssParams::new(s, 2.0, 0.7), w)?;
        let r = moments(&st)?;
        let a = css_moments(CssParams::new(s, 2.0, 0.0))?;
        println!(
            "{s:>6} {:>10.6} {:>10.6} {:>12.6} {:>10.2e}",
            r.mean_cos.hypot(r.mean_sin),
            a.delta_l() * a.delta_sin(),
            0.5 * a.mean_cos,
            st.tail_mass()
        );
    }
    Ok(())
}
