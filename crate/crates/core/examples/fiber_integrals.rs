// Integrals over the fibers {ord x = k}: full measure, torus sum, or zero,
// depending on how N(k) compares with m.

use igusa_lab::decomp::fiber_unit_integral;
use igusa_lab::newton::NewtonPolyhedron;
use igusa_lab::sums::{Budget, UnitTwist};
use igusa_lab::Polynomial;

pub fn run_example() -> igusa_lab::Result<()> {
    let f = Polynomial::parse("x1^2 + x2^3", 2)?;
    let poly = NewtonPolyhedron::new(&f)?;
    let (p, m) = (5, 4);
    for k in [[0, 0], [1, 0], [0, 1], [1, 1], [2, 1], [3, 2]] {
        let fi = fiber_unit_integral(&f, &poly, &k, p, m, UnitTwist::ONE, Budget::default())?;
        let value = fi.value.rational_value().map_or_else(|| format!("{:+.6}{:+.6}i", fi.value.re, fi.value.im), |r| r.to_string());
        println!("k={k:?} N(k)={} {:?}: {value} (as predicted: {})", fi.n_k, fi.class, fi.matches_class);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
