// Fitting the constants in |S(1/p^m)| < c p^(-m sigma) m^(kappa-1) and in
// the torus bound q^((-n+d)/2).

use igusa_lab::arith::primes_in;
use igusa_lab::bounds::{check_katz_bounds, fit_mt1, BoundOptions};
use igusa_lab::decomp::Mode;
use igusa_lab::Polynomial;

pub fn run_example() -> igusa_lab::Result<()> {
    let opts = BoundOptions::default();
    let f = Polynomial::parse("x1^2 + x2^3", 2)?;
    let r = fit_mt1(&f, &primes_in(5, 61), &[1, 2], Mode::Global, &opts)?;
    println!("mt1: c = {:?}, stability {:?}", r.fitted_c, r.stability);
    for g in r.grid.iter().filter(|g| g.p <= 13) {
        println!("  p={:<3} m={} |S| <= {:.3e}  ratio {:.4}", g.p, g.m, g.value, g.ratio);
    }

    let h = Polynomial::parse("x1^2*x2", 2)?;
    let k = check_katz_bounds(&h, &primes_in(2, 31), &[4, 9, 25], &opts)?;
    println!("katz: d = {:?}, a = {:?}", k.dimensions[0].dimension, k.fitted_c);
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
