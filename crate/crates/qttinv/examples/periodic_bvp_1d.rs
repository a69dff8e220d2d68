//! Solve -u'' + u' + u = f with periodic boundary on grids from 2^5 to 2^40
//! points: the system inverse is built directly in QTT form and applied as a
//! QTT matrix-vector product, so errors keep shrinking long past the point
//! where iterative solvers on the assembled matrix go unstable.

use qttinv::solver::{solve_1d, write_csv, Experiment1DConfig, DEFAULT_ROUND_TOL};

fn main() {
    let config = Experiment1DConfig::new(5, 40, DEFAULT_ROUND_TOL).unwrap();
    let records = solve_1d(&config).unwrap();
    write_csv(&records, std::io::stdout()).unwrap();
}
