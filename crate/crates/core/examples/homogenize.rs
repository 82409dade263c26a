// Homogenizing x1^2 + x2^3 by torus substitutions, with sigma and the torus
// sums checked at every stage.

use igusa_lab::homogenize::{homogenization_chain, verify_sigma_invariance, verify_torus_sum_invariance};
use igusa_lab::sums::{Budget, UnitTwist};
use igusa_lab::Polynomial;

pub fn run_example() -> igusa_lab::Result<()> {
    let f = Polynomial::parse("x1^2 + x2^3", 2)?;
    let chain = homogenization_chain(&f)?;
    let sig = verify_sigma_invariance(&chain)?;
    println!("weights {:?}, degree {}", chain.weights.weights, chain.degree());
    println!("0: {}  sigma {}", chain.initial, sig.sigmas[0]);
    for (i, s) in chain.steps.iter().enumerate() {
        println!("{}: x{} -> x{} x{}   {}  sigma {}", i + 1, s.variable + 1, s.variable + 1, s.new_variable + 1, s.poly, sig.sigmas[i + 1]);
    }
    for p in [3, 5, 7] {
        let inv = verify_torus_sum_invariance(&chain, p, UnitTwist::ONE, Budget::default())?;
        println!("p={p}: torus sums equal across the chain: {}", inv.holds());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
