//! Draws a sparse transition matrix and simulates a trajectory from it.
//!
//!     cargo run --example simulate -- [n] [support] [steps] [seed]

use graphit::{generate_sparse_a, simulate, spectral_norm, KnownParams};

fn main() -> graphit::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let arg = |i: usize, d: u64| args.get(i).copied().unwrap_or(d);
    let (n, support, steps, seed) = (arg(0, 6) as usize, arg(1, 8) as usize, arg(2, 200) as usize, arg(3, 1));

    let a = generate_sparse_a(n, support, 0.9, seed)?;
    println!("A ({} nonzeros, spectral norm {:.6}):{a:.3}", support, spectral_norm(&a).value);

    let params = KnownParams::isotropic(n, 0.1, 0.1, 1e-4).with_transition(a);
    let traj = simulate(&params, steps, seed + 1)?;
    println!("k,{}", (1..=n).map(|i| format!("y{i}")).collect::<Vec<_>>().join(","));
    for (k, y) in traj.observations.iter().enumerate().take(10) {
        let cols: Vec<String> = y.iter().map(|v| format!("{v:.4}")).collect();
        println!("{},{}", k + 1, cols.join(","));
    }
    println!("... {} observations in total", traj.steps());
    Ok(())
}
