// Directed rounding from exact rationals, and outward interval arithmetic.

use igusa_lab::interval::{round_down, round_up, ComplexBox, Interval, RationalInterval};
use num_bigint::BigInt;
use num_rational::BigRational;

pub fn run_example() -> igusa_lab::Result<()> {
    let third = BigRational::new(BigInt::from(1), BigInt::from(3));
    println!("1/3 in [{:.20}, {:.20}]", round_down(&third), round_up(&third));

    let r = RationalInterval::new(third.clone(), &third + BigRational::new(BigInt::from(1), BigInt::from(1000)));
    let x = r.to_interval();
    let y = x * Interval::point(3.0) + Interval::around(0.5, 1e-12);
    println!("3 [1/3, 1/3 + 1/1000] + 0.5 +- 1e-12 = [{}, {}]", y.lo, y.hi);

    let z = ComplexBox::around(0.25, -0.5, 1e-15).scale(x);
    println!("|z| <= {}", z.mag());
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
