// The sum families side by side: full box, multiples of p, torus,
// and the power series model F_p[t]/t^m.

use igusa_lab::sums::{e_sum, s_sum, s_sum_laurent, t_sum, Budget, ExpSumValue, UnitTwist};
use igusa_lab::Polynomial;

fn show(label: &str, v: &ExpSumValue) {
    match v.rational_value() {
        Some(r) => println!("{label:<14} = {r} (exact)"),
        None => println!("{label:<14} = {:+.9} {:+.9}i  (+- {:.1e})", v.re, v.im, v.abs_error),
    }
}

pub fn run_example() -> igusa_lab::Result<()> {
    let f = Polynomial::parse("x1^2 + x2^3", 2)?;
    let b = Budget::from_env();
    let u = UnitTwist::ONE;
    show("S(1/7^2)", &s_sum(&f, 7, 2, u, b)?);
    show("T(1/7)", &t_sum(&f, 7, 1, u, b)?);
    show("T(1/7^3)", &t_sum(&f, 7, 3, u, b)?);
    show("E", &e_sum(&f, 7, u, b)?);
    show("laurent m=2", &s_sum_laurent(&f, 7, 2, u, b)?);

    // at m = 1 both models are the same finite field sum
    let a = s_sum(&f, 7, 1, u, b)?;
    let l = s_sum_laurent(&f, 7, 1, u, b)?;
    println!("S(1/7) == laurent(1): {}", a.exactly_equals(&l));
    show("E(x1)", &e_sum(&Polynomial::parse("x1", 1)?, 7, u, b)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
