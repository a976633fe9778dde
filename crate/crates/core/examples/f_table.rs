//! A coarse f-table. Each row optimizes the modulus at one target spread,
//! so this takes a few seconds per row.
use packetlab::phase::f_table;

fn main() -> packetlab::Result<()> {
    let table = f_table(&[0.4, 0.8, 1.2, 1.6], 0)?;
    print!("{}", table.to_csv());
    println!("monotone: {}", table.is_monotone());
    Ok(())
}
