// Weights that make a polynomial homogeneous, and which of the two
// alternatives (0 critical, or a linear term) holds.

use igusa_lab::bounds::check_trivlem;
use igusa_lab::{Error, Polynomial};

pub fn run_example() -> igusa_lab::Result<()> {
    for (text, n) in [("x1^2 + x2^3", 2), ("x1^2*x2", 2), ("x1 + x2^2", 2), ("x1^3 + x2^3 + x1*x2^2", 2), ("x1^2 + x1*x2 + x2^3", 2)] {
        let f = Polynomial::parse(text, n)?;
        match f.quasi_weights() {
            Ok(w) => {
                let t = check_trivlem(&f)?;
                println!("{text:<24} weights {:?} degree {}  {:?}", w.weights, w.degree, t.case);
            }
            Err(Error::NotQuasiHomogeneous) => println!("{text:<24} not quasi-homogeneous"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
