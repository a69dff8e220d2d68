//! The singular periodic stiffness matrix has an explicit polynomial
//! pseudoinverse column; check the four Penrose identities against the
//! dense matrix.

use nalgebra::DMatrix;
use qttinv::inverse::stiffness_pseudoinverse_column;

fn main() {
    let size = 16usize;
    let a = DMatrix::<f64>::from_fn(size, size, |i, j| match (i + size - j) % size {
        0 => 2.0,
        1 => -1.0,
        k if k == size - 1 => -1.0,
        _ => 0.0,
    });
    let p = DMatrix::<f64>::from_fn(size, size, |i, j| {
        stiffness_pseudoinverse_column(size as u64, ((i + size - j) % size) as u64)
    });

    println!("pseudoinverse column at N = {size}:");
    for i in 0..size {
        println!(
            "  f({i:>2}) = {:>12.8}",
            stiffness_pseudoinverse_column(size as u64, i as u64)
        );
    }
    let row_sum: f64 = (0..size)
        .map(|i| stiffness_pseudoinverse_column(size as u64, i as u64))
        .sum();
    println!("row sum (kernel direction annihilated): {row_sum:.2e}");

    println!("\nPenrose identities:");
    println!("  |A P A - A| = {:.3e}", (&a * &p * &a - &a).norm());
    println!("  |P A P - P| = {:.3e}", (&p * &a * &p - &p).norm());
    let ap = &a * &p;
    let pa = &p * &a;
    println!("  |(A P)^T - A P| = {:.3e}", (ap.transpose() - &ap).norm());
    println!("  |(P A)^T - P A| = {:.3e}", (pa.transpose() - &pa).norm());
}
