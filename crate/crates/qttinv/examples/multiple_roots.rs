//! A symbol whose polynomial has a double root: the inverse column picks up
//! polynomial-times-exponential terms with falling-factorial factors, all
//! computed through exact truncated-Taylor (jet) arithmetic.

use nalgebra::DVector;
use num_complex::Complex64;
use qttinv::circulant::BandSymbol;
use qttinv::inverse::{eval_column_simple, inverse_column, root_systems};

fn main() {
    // g(z) = (z - 0.5)^2 (z - 3): double root inside the unit circle
    let symbol = BandSymbol::from_real(1, &[-0.75, 3.25, -4.0, 1.0]).unwrap();
    let size = 32u64;

    let (roots_g, _) = root_systems(&symbol).unwrap();
    println!("symbol: {symbol}");
    for cluster in roots_g.clusters() {
        println!(
            "root {:.12} multiplicity {}",
            cluster.center, cluster.multiplicity
        );
    }

    // the simple-root route refuses; the general model handles it
    match eval_column_simple(&symbol, &roots_g, size, 0) {
        Err(e) => println!("simple-root route: {e}"),
        Ok(_) => unreachable!("double root must be rejected"),
    }

    let column = inverse_column(&symbol, size).unwrap();
    let model = column.model().unwrap();
    println!("model terms on the g side:");
    for term in &model.terms_g {
        println!(
            "  root {:.6}, falling-factorial order {}, coefficient {:.6e}",
            term.root, term.derivative_index, term.coefficient
        );
    }

    // dense LU oracle
    let n = size as usize;
    let dense = symbol.materialize(n).unwrap();
    let mut e0 = DVector::<Complex64>::zeros(n);
    e0[0] = Complex64::new(1.0, 0.0);
    let exact = dense.full_piv_lu().solve(&e0).unwrap();
    let worst = (0..n)
        .map(|j| (column.eval(j as u64).unwrap() - exact[j]).norm())
        .fold(0.0f64, f64::max);
    println!("max deviation from dense LU at N = {size}: {worst:.3e}");
}
