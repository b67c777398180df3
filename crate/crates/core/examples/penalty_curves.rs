//! Prints every penalty family on [-3, 3] as CSV columns, with
//! gamma = 1 and lambda = 0.5 (a = 3.7 for SCAD).

use graphit::penalties::linspace;
use graphit::{Family, Potential};

fn main() -> graphit::Result<()> {
    let potentials: Vec<Potential> = Family::ALL
        .iter()
        .map(|&f| Potential::new(f, 1.0, if f == Family::Scad { 3.7 } else { 0.5 }))
        .collect::<graphit::Result<_>>()?;
    let grid = linspace(-3.0, 3.0, 61);

    let names: Vec<&str> = potentials.iter().map(|p| p.family().name()).collect();
    println!("u,{}", names.join(","));
    for &u in &grid {
        let vals: Vec<String> = potentials.iter().map(|p| format!("{:.6}", p.rho(u))).collect();
        println!("{u:.2},{}", vals.join(","));
    }
    Ok(())
}
