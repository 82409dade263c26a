// Dimensions of critical loci from point counts over F_p.

use igusa_lab::bounds::{check_intersect_and_fg, critical_dim_estimate};
use igusa_lab::Polynomial;

pub fn run_example() -> igusa_lab::Result<()> {
    let primes = [5, 7, 11, 13, 17];
    for (text, n) in [("x1^2 + x2^2", 2), ("x1^2*x2", 2), ("x1^3", 3), ("x1 + x2", 2)] {
        let e = critical_dim_estimate(&Polynomial::parse(text, n)?, &primes)?;
        println!("{text:<12} counts {:?} slope {:.3} dim {:?}", e.counts, e.slope, e.dimension);
    }
    let r = check_intersect_and_fg(&Polynomial::parse("x1^2 + x2^2", 2)?, &primes)?;
    for d in &r.dimensions {
        println!("{}: {:?}", d.label, d.dimension);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
