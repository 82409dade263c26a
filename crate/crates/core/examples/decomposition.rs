// The face decomposition of S (global) and T (local) checked against
// brute force, for every twist at one prime.

use igusa_lab::decomp::{verify_decomposition, DecompOptions};
use igusa_lab::sums::UnitTwist;
use igusa_lab::Polynomial;

pub fn run_example() -> igusa_lab::Result<()> {
    let f = Polynomial::parse("x1^2 + x2^3", 2)?;
    let p = 7;
    for m in 1..=3 {
        for u in [1, 3] {
            let g = verify_decomposition(&f, p, m, UnitTwist::new(u, p)?, DecompOptions::default())?;
            let l = verify_decomposition(&f, p, m, UnitTwist::new(u, p)?, DecompOptions::local())?;
            println!("{}", g.summary());
            println!("{}", l.summary());
        }
    }

    // at p = 2 the vertex x^2 has critical points everywhere on the torus
    let x2 = Polynomial::parse("x1^2", 1)?;
    let r = verify_decomposition(&x2, 2, 2, UnitTwist::ONE, DecompOptions::default())?;
    println!("{}", r.summary());
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
