// Per-face lattice sums A and B with their rigorous truncation tails.

use igusa_lab::decomp::{cone_sums, tail_bound, Mode};
use igusa_lab::newton::NewtonPolyhedron;
use igusa_lab::Polynomial;

pub fn run_example() -> igusa_lab::Result<()> {
    let f = Polynomial::parse("x1^2 + x2^3", 2)?;
    let poly = NewtonPolyhedron::new(&f)?;
    let sums = cone_sums(&poly, 7, 2, 40, Mode::Global, false)?;
    println!("p = 7, m = 2, V = 40, tail <= {:.3e}", igusa_lab::arith::to_f64(&sums.tail));
    for face in &poly.faces {
        let (a, b) = (&sums.a[face.id], &sums.b[face.id]);
        println!(
            "  {:<22} A in [{:.6e}, {:.6e}]  B in [{:.6e}, {:.6e}]",
            face.label(),
            igusa_lab::arith::to_f64(&a.lo),
            igusa_lab::arith::to_f64(&a.hi),
            igusa_lab::arith::to_f64(&b.lo),
            igusa_lab::arith::to_f64(&b.hi)
        );
    }
    for v in [10, 20, 40, 80] {
        println!("tail(n=2, q=7, V={v}) = {:.3e}", igusa_lab::arith::to_f64(&tail_bound(2, 7, v)));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
