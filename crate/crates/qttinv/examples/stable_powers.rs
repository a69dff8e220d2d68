//! Powers of near-one bases: forming z = 1 - g1 h + g2 h^2 in floating point
//! loses the quadratic term once h^2 falls below the float spacing at one,
//! yet that term moves z^(1/h) at order h. Exponentiating the exactly known
//! offset through ln_1p keeps full precision.

use qttinv::powers::{naive_pow, stable_pow};

fn main() {
    let gamma1 = 1.0;
    let gamma2 = 1.0;
    println!("z = 1 - h + h^2, exponent M = 1/h\n");
    println!(
        "{:>6}  {:>22}  {:>22}  {:>10}",
        "h", "naive z^M", "offset-form z^M", "rel diff"
    );
    for level in [10i32, 20, 26, 30, 40] {
        let h = 0.5f64.powi(level);
        let exponent = 1u64 << level;
        let naive = naive_pow(gamma1, gamma2, h, exponent);
        let stable = stable_pow(gamma1, gamma2, h, exponent).unwrap().re;
        println!(
            "2^-{level:<3}  {naive:>22.16}  {stable:>22.16}  {:>10.2e}",
            ((naive - stable) / stable).abs()
        );
    }
    println!("\nonce h^2 < 2^-53 the naive route drops the quadratic term and compounds");
    println!("rounding across the squarings; the offset form stays at machine precision");
}
