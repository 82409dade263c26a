// Torus and affine sums over GF(q) with the trace character.

use igusa_lab::field::GaloisField;
use igusa_lab::sums::{affine_sum_ext, e_sum_ext, Budget, UnitTwist};
use igusa_lab::Polynomial;

pub fn run_example() -> igusa_lab::Result<()> {
    let h = Polynomial::parse("x1^2*x2", 2)?;
    for q in [4, 8, 9, 25, 27] {
        let field = GaloisField::builtin(q)?;
        let e = e_sum_ext(&h, &field, UnitTwist::ONE, Budget::default())?;
        let a = affine_sum_ext(&h, &field, UnitTwist::ONE, Budget::default())?;
        println!(
            "q={q:<3} modulus {:?}  torus {:>9.6}  affine {:>9.6}",
            field.modulus(),
            e.magnitude().0,
            a.magnitude().0
        );
    }

    let gf9 = GaloisField::builtin(9)?;
    let t = 3; // the class of t in F_3[t]/(t^2 + 1)
    println!("in GF(9): t*t = {}, Tr(t) = {}, Tr(1) = {}", gf9.mul(t, t), gf9.trace(t), gf9.trace(1));
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
