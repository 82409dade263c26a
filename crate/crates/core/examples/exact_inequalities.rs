// Exact checks: nu(k) >= sigma (N(k) + 1) - sigma(f_tau) on every face, and
// the cone estimate with its hypothesis.

use igusa_lab::bounds::{check_cone_lemma, check_nu_inequality, ConeSpec};
use igusa_lab::Polynomial;
use num_bigint::BigInt;
use num_rational::BigRational;

pub fn run_example() -> igusa_lab::Result<()> {
    let f = Polynomial::parse("x1^2 + x2^3", 2)?;
    let r = check_nu_inequality(&f, None, 20)?;
    println!("nu inequality: {} pairs, min slack {:?}, violations {}", r.checked, r.min_margin, r.violations.len());

    let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let quadrant = ConeSpec { generators: vec![vec![1, 0], vec![0, 1]], linear_form: vec![1, 1] };
    let c = check_cone_lemma(&quadrant, &q(1, 1), &q(0, 1), &[2, 3, 5], &[1, 2, 4, 8], 20)?;
    println!("cone: e = {}, fitted c = {:?}", quadrant.equality_dimension(&q(1, 1)), c.fitted_c);

    let ray = ConeSpec { generators: vec![vec![1]], linear_form: vec![2] };
    let bad = check_cone_lemma(&ray, &q(1, 2), &q(1, 2), &[2], &[2], 20)?;
    println!("hypothesis fails on the ray: {}", bad.violations.first().map_or("no", String::as_str));
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
