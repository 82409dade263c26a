// Brute-force exponential sums mod p^m with exact histograms: the quadratic
// Gauss sum has modulus exactly p^(-m/2).

use igusa_lab::arith::primes_in;
use igusa_lab::sums::{s_sum, Budget, UnitTwist};
use igusa_lab::Polynomial;

pub fn run_example() -> igusa_lab::Result<()> {
    let f = Polynomial::parse("x1^2", 1)?;
    println!("  p  m        |S|     p^(-m/2)   error bound");
    for p in primes_in(3, 23) {
        for m in 1..=3 {
            let s = s_sum(&f, p, m, UnitTwist::ONE, Budget::default())?;
            let (r, err) = s.magnitude();
            println!("{p:>3} {m:>2} {r:>12.9} {:>12.9}   {err:.1e}", (p as f64).powf(-(m as f64) / 2.0));
        }
    }

    // twisting by a nonresidue flips the sign of the real Gauss sum at p = 5
    let s = s_sum(&f, 5, 1, UnitTwist::ONE, Budget::default())?;
    println!("u=1: {:+.6}, u=2: {:+.6}", s.re, s.twisted(2).re);
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
