// Which primes leave every face free of torus critical points.

use igusa_lab::arith::primes_in;
use igusa_lab::newton::{nondegenerate_for_prime, NewtonPolyhedron};
use igusa_lab::Polynomial;

pub fn run_example() -> igusa_lab::Result<()> {
    for (text, n) in [("x1^2 + x2^3", 2), ("x1^3 + x2^3", 2), ("x1^2 + 2*x1*x2 + x2^2", 2)] {
        let f = Polynomial::parse(text, n)?;
        let poly = NewtonPolyhedron::new(&f)?;
        let mut good = Vec::new();
        for p in primes_in(2, 31) {
            let cert = nondegenerate_for_prime(&f, &poly.faces, p, false)?;
            if cert.certified {
                good.push(p);
            } else if let Some(bad) = cert.checks.iter().find(|c| c.critical_point.is_some()) {
                println!("{text}: p={p} face #{} critical at {:?}", bad.face, bad.critical_point.as_ref().unwrap());
            }
        }
        println!("{text}: nondegenerate at {good:?}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
