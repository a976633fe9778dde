use packetlab::pencil::{alpha_grid, quantization_scan, Family};

fn main() -> packetlab::Result<()> {
    let w = Family::Circle.window(32)?;
    let scan = quantization_scan(Family::Circle, &alpha_grid(-2.0, 2.0, 0.25)?, 0.0, w)?;
    print!("{}", scan.to_csv());
    println!("flagged: {:?}", scan.flagged());
    Ok(())
}
