// The exact rational simplex used for faces and weights.

use igusa_lab::lp::{LpOutcome, RationalLp, Relation};

pub fn run_example() -> igusa_lab::Result<()> {
    // where does the diagonal t(1,1) enter conv{(2,0),(0,3)} + R_+^2?
    // minimize t subject to l1*(2,0) + l2*(0,3) <= (t, t), l1 + l2 = 1
    let mut lp = RationalLp::new(3).minimize_int(&[0, 0, 1]);
    lp.constrain_int(&[2, 0, -1], Relation::Le, 0);
    lp.constrain_int(&[0, 3, -1], Relation::Le, 0);
    lp.constrain_int(&[1, 1, 0], Relation::Eq, 1);
    if let Some(sol) = lp.solve().optimal() {
        println!("t* = {}, lambda = ({}, {})", sol.value, sol.x[0], sol.x[1]);
    }

    let mut bad = RationalLp::new(2).minimize_int(&[1, 1]);
    bad.constrain_int(&[1, 1], Relation::Le, 1);
    bad.constrain_int(&[1, 1], Relation::Ge, 2);
    match bad.solve() {
        LpOutcome::Infeasible(cert) => println!("infeasible, Farkas multipliers {:?} verified: {}", cert.multipliers.iter().map(ToString::to_string).collect::<Vec<_>>(), cert.verify(&bad)),
        other => println!("unexpected {other:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> igusa_lab::Result<()> {
    run_example()
}
