// Faces, sigma, kappa and the face met first by the diagonal.
//
// `cargo run --example newton_polyhedron -- "x1^2 + x2^3" 2`

use igusa_lab::newton::NewtonPolyhedron;
use igusa_lab::Polynomial;

pub fn run_example() -> igusa_lab::Result<()> {
    show("x1^2 + x2^3", 2)
}

fn show(text: &str, n: usize) -> igusa_lab::Result<()> {
    let f = Polynomial::parse(text, n)?;
    let poly = NewtonPolyhedron::new(&f)?;

    println!("f = {f}");
    println!("sigma = {}, kappa = {}", poly.sigma(), poly.kappa());
    println!("F0 = {}", poly.f0().label());
    for face in &poly.faces {
        let kind = if face.compact { "compact" } else { "" };
        println!("  #{:<2} dim {} {:<8} witness {:?}  {}", face.id, face.dim, kind, face.witness, face.label());
    }

    // every covector picks out a face as its minimizer set
    let (n_k, id) = poly.classify(&[3, 2]);
    println!("k = (3, 2): N(k) = {n_k}, face #{id}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    match (args.next(), args.next().and_then(|s| s.parse().ok())) {
        (Some(text), Some(n)) => show(&text, n),
        _ => run_example(),
    }
}
