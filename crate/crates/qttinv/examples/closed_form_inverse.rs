//! Invert a band circulant in closed form from the roots of its symbol
//! polynomials, then cross-check against the eigenvalue (DFT) oracle.

use qttinv::circulant::parse_symbol;
use qttinv::inverse::{inverse_column, root_systems};

fn main() {
    // mass matrix circ(4, 1, 0, ..., 0, 1) at N = 16
    let symbol = parse_symbol("circ: 1 | 4 1").unwrap();
    let size = 16u64;

    let (roots_g, roots_h) = root_systems(&symbol).unwrap();
    println!("symbol: {symbol}");
    for (side, system) in [("g", &roots_g), ("h", &roots_h)] {
        for cluster in &system.inside {
            println!(
                "{side} inside root {:.12} (multiplicity {})",
                cluster.center, cluster.multiplicity
            );
        }
    }
    println!("qtt rank bound for the inverse: {}", symbol.band_width());

    let column = inverse_column(&symbol, size).unwrap();
    let oracle = symbol.dft_inverse_column(size as usize).unwrap();
    println!("\n  j   closed form           dft oracle            |diff|");
    let mut worst: f64 = 0.0;
    for (j, want) in oracle.iter().enumerate() {
        let got = column.eval(j as u64).unwrap();
        let diff = (got - want).norm();
        worst = worst.max(diff);
        println!(
            "{j:>3}   {:>18.15}    {:>18.15}    {diff:.2e}",
            got.re, want.re
        );
    }
    println!("\nmax deviation: {worst:.3e}");
}
