//! Numerical rank certificates: the unfolding ranks of the materialized
//! inverses stay within the bound m + n regardless of matrix size.

use nalgebra::DMatrix;
use num_complex::Complex64;
use qttinv::circulant::BandSymbol;
use qttinv::inverse::{
    inverse_column, mass_inverse_column, shifted_stiffness_inverse_column,
    stiffness_pseudoinverse_column,
};
use qttinv::tt::dense_unfolding_ranks;

fn circulant(column: &[Complex64]) -> DMatrix<Complex64> {
    let size = column.len();
    DMatrix::from_fn(size, size, |i, j| column[(i + size - j) % size])
}

fn main() {
    let level = 8usize;
    let size = 1u64 << level;
    let tol = 1e-8;
    println!("unfolding ranks at L = {level} (N = {size}), threshold {tol:.0e}\n");

    let mass: Vec<Complex64> = (0..size)
        .map(|j| Complex64::new(mass_inverse_column(size, j), 0.0))
        .collect();
    println!(
        "mass inverse:            {} (bound 3)",
        dense_unfolding_ranks(&circulant(&mass), tol)
    );

    for shift in [0.1, 1.0, 10.0] {
        let column: Vec<Complex64> = (0..size)
            .map(|j| {
                Complex64::new(
                    shifted_stiffness_inverse_column(shift, size, j).unwrap(),
                    0.0,
                )
            })
            .collect();
        println!(
            "shifted stiffness s={shift:<4}: {} (bound 3)",
            dense_unfolding_ranks(&circulant(&column), tol)
        );
    }

    let pseudo: Vec<Complex64> = (0..size)
        .map(|i| Complex64::new(stiffness_pseudoinverse_column(size, i), 0.0))
        .collect();
    println!(
        "stiffness pseudoinverse: {} (bound 4)",
        dense_unfolding_ranks(&circulant(&pseudo), tol)
    );

    let symbol = BandSymbol::from_real(1, &[-0.75, 3.25, -4.0, 1.0]).unwrap();
    let column = inverse_column(&symbol, size).unwrap();
    let values: Vec<Complex64> = (0..size).map(|j| column.eval(j).unwrap()).collect();
    println!(
        "double-root inverse:     {} (bound m+n = {})",
        dense_unfolding_ranks(&circulant(&values), tol),
        symbol.band_width()
    );
}
