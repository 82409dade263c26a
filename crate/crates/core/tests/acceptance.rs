//! End-to-end acceptance run: ten criteria, one PASS/FAIL line each.

use std::time::{Duration, Instant};

use igusa_lab::arith::{primes_in, twist_set};
use igusa_lab::bounds::{check_katz_bounds, check_mt2, check_nu_inequality, fit_mt1, BoundOptions, TwistPolicy};
use igusa_lab::decomp::{verify_decomposition, DecompOptions, Mode, Verdict};
use igusa_lab::homogenize::{homogenization_chain, verify_sigma_invariance, verify_torus_sum_invariance};
use igusa_lab::newton::NewtonPolyhedron;
use igusa_lab::sums::{s_sum, s_sum_laurent, Budget, UnitTwist};
use igusa_lab::{Error, Polynomial};

/// Points per brute-force sum inside the acceptance run.
const RUN_BUDGET: u128 = 1_000_000_000;

struct Entry {
    name: &'static str,
    text: &'static str,
    n: usize,
    primes: Vec<u64>,
}

fn catalog() -> Vec<Entry> {
    let upto31 = primes_in(2, 31);
    vec![
        Entry { name: "x^2", text: "x1^2", n: 1, primes: upto31.clone() },
        Entry { name: "cusp", text: "x1^2 + x2^3", n: 2, primes: upto31.clone() },
        Entry { name: "fermat-3", text: "x1^3 + x2^3", n: 2, primes: upto31.clone() },
        Entry { name: "circle", text: "x1^2 + x2^2", n: 2, primes: upto31 },
        // three variables only at small primes
        Entry { name: "e8", text: "x1^2 + x2^3 + x3^5", n: 3, primes: vec![2, 3, 5, 7, 11] },
    ]
}

fn poly(text: &str, n: usize) -> Polynomial {
    Polynomial::parse(text, n).expect("catalog parses")
}

type Outcome = Result<String, String>;

fn gauss_sums() -> Outcome {
    let start = Instant::now();
    let f = poly("x1^2", 1);
    let mut worst = 0.0f64;
    let mut count = 0;
    for p in primes_in(3, 97) {
        for m in 1..=3 {
            let v = s_sum(&f, p, m, UnitTwist::ONE, Budget(RUN_BUDGET)).map_err(|e| format!("p={p} m={m}: {e}"))?;
            let target = (p as f64).powf(-(m as f64) / 2.0);
            let (r, _) = v.magnitude();
            worst = worst.max((r - target).abs());
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    if worst > 1e-9 {
        return Err(format!("max deviation {worst:e}"));
    }
    if elapsed > Duration::from_secs(10) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{count} sums, max deviation {worst:.1e}, {elapsed:.2?}"))
}

fn decomposition(mode: Mode) -> Outcome {
    let start = Instant::now();
    let (mut verified, mut inapplicable, mut skipped) = (0, 0, 0);
    let mut failures = Vec::new();
    for e in catalog() {
        let f = poly(e.text, e.n);
        let mut hits = 0;
        for &p in &e.primes {
            for m in 1..=3u32 {
                let twists = if p <= 13 { (1..p).collect() } else { vec![1] };
                for u in twists {
                    let opts = DecompOptions { mode, budget: Budget(RUN_BUDGET), ..DecompOptions::default() };
                    match verify_decomposition(&f, p, m, UnitTwist::new(u, p).unwrap(), opts) {
                        Ok(r) => match r.verdict {
                            Verdict::Verified => {
                                verified += 1;
                                hits += 1;
                            }
                            Verdict::Failed => failures.push(r.summary()),
                            Verdict::NotApplicable => inapplicable += 1,
                        },
                        Err(Error::BudgetExceeded { .. }) | Err(Error::ModulusTooLarge(_)) => skipped += 1,
                        Err(err) => failures.push(format!("{} p={p} m={m} u={u}: {err}", e.name)),
                    }
                }
            }
        }
        if hits == 0 {
            failures.push(format!("{}: no certified prime verified", e.name));
        }
    }
    let elapsed = start.elapsed();
    if !failures.is_empty() {
        return Err(format!("{} failures, first: {}", failures.len(), failures[0]));
    }
    if elapsed > Duration::from_secs(300) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{verified} verified, {inapplicable} not applicable, {skipped} over budget, {elapsed:.1?}"))
}

fn nu_inequality() -> Outcome {
    let mut checked = 0;
    for e in catalog() {
        let r = check_nu_inequality(&poly(e.text, e.n), None, 20).map_err(|err| err.to_string())?;
        if !r.holds() {
            return Err(format!("{}: {}", e.name, r.violations[0]));
        }
        checked += r.checked;
    }
    Ok(format!("{checked} (face, k) pairs with nu(k) <= 20"))
}

fn newton_invariants() -> Outcome {
    let geom = |t: &str, n| NewtonPolyhedron::new(&poly(t, n)).map_err(|e| e.to_string());
    let cusp = geom("x1^2 + x2^3", 2)?;
    let x2 = geom("x1^2", 1)?;
    let circle = geom("x1^2 + x2^2", 2)?;
    let got = (cusp.sigma().to_string(), cusp.kappa(), cusp.faces.len(), x2.sigma().to_string(), circle.sigma().to_string());
    let want = ("5/6".to_string(), 1, 6, "1/2".to_string(), "1".to_string());
    if got != want {
        return Err(format!("got {got:?}"));
    }
    Ok("sigma 5/6, kappa 1, 6 faces; sigma 1/2; sigma 1".into())
}

fn mt1_stability() -> Outcome {
    let start = Instant::now();
    let f = poly("x1^2 + x2^3", 2);
    let r = fit_mt1(&f, &primes_in(5, 61), &[1, 2], Mode::Global, &BoundOptions::default()).map_err(|e| e.to_string())?;
    let (c31, c61) = (r.fitted_up_to(31).ok_or("no data")?, r.fitted_c.ok_or("no data")?);
    let elapsed = start.elapsed();
    if !r.holds() {
        return Err(r.violations[0].clone());
    }
    if c61 >= 1.2 * c31 {
        return Err(format!("c grows from {c31:.4} to {c61:.4}"));
    }
    if elapsed > Duration::from_secs(300) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("c(p<=31) = {c31:.4}, c(p<=61) = {c61:.4}, {} grid points, {elapsed:.1?}", r.grid.len()))
}

fn katz_catalog() -> Outcome {
    let opts = BoundOptions { budget: Budget(RUN_BUDGET), twists: TwistPolicy::All };
    let mut out = Vec::new();
    for (text, n, d) in [("x1^2*x2", 2, 1), ("x1^2", 1, 0)] {
        let r = check_katz_bounds(&poly(text, n), &primes_in(2, 61), &[4, 9, 25], &opts).map_err(|e| e.to_string())?;
        let est = r.dimensions[0].dimension;
        if est != Some(d) {
            return Err(format!("{text}: dimension estimate {est:?}, expected {d}"));
        }
        let a = r.fitted_c.ok_or("no data")?;
        if a > 2.0 || !r.holds() {
            return Err(format!("{text}: a = {a:.4}"));
        }
        out.push(format!("{text}: d={d}, a={a:.4}"));
    }
    Ok(out.join("; "))
}

fn homogenization() -> Outcome {
    let chain = homogenization_chain(&poly("x1^2 + x2^3", 2)).map_err(|e| e.to_string())?;
    if chain.steps.len() != 3 || !chain.final_poly.terms().all(|(e, _)| e.total_degree() == 6) {
        return Err(format!("chain to {}", chain.final_poly));
    }
    let sig = verify_sigma_invariance(&chain).map_err(|e| e.to_string())?;
    if sig.sigmas.iter().any(|s| s != "5/6") {
        return Err(format!("sigmas {:?}", sig.sigmas));
    }
    let mut compared = 0;
    for p in primes_in(3, 13) {
        for u in 1..p {
            let inv = verify_torus_sum_invariance(&chain, p, UnitTwist::new(u, p).unwrap(), Budget(RUN_BUDGET)).map_err(|e| e.to_string())?;
            if !inv.holds() {
                return Err(format!("torus sums differ at p={p} u={u}"));
            }
            compared += 1;
        }
    }
    Ok(format!("3 steps, degree 6, sigma 5/6 at 4 stages, {compared} (p, u) torus comparisons"))
}

fn mt2_path() -> Outcome {
    let h = poly("x1 + x2^3", 2);
    for p in primes_in(2, 31) {
        for m in [1, 2] {
            let v = s_sum(&h, p, m, UnitTwist::ONE, Budget(RUN_BUDGET)).map_err(|e| e.to_string())?;
            for u in 1..p {
                if !v.twisted(u).is_exactly_zero() {
                    return Err(format!("S(u/p^{m}) != 0 at p={p} u={u}"));
                }
            }
        }
    }
    let opts = BoundOptions { budget: Budget(RUN_BUDGET), twists: TwistPolicy::Default };
    let r = check_mt2(&poly("x1^2*x2", 2), &primes_in(2, 61), &opts).map_err(|e| e.to_string())?;
    let c = r.grid.iter().filter(|g| g.m == 1).map(|g| g.ratio).fold(0.0, f64::max);
    if c > 1.5 || !r.holds() {
        return Err(format!("c = {c:.4}"));
    }
    Ok(format!("x1 + x2^3 sums vanish for p <= 31; x1^2*x2 c = {c:.4}"))
}

fn cross_model() -> Outcome {
    let mut compared = 0;
    for e in catalog() {
        let f = poly(e.text, e.n);
        for p in primes_in(2, 31) {
            let a = s_sum(&f, p, 1, UnitTwist::ONE, Budget(RUN_BUDGET)).map_err(|e| e.to_string())?;
            let b = s_sum_laurent(&f, p, 1, UnitTwist::ONE, Budget(RUN_BUDGET)).map_err(|e| e.to_string())?;
            for u in twist_set(p) {
                let (x, y) = (a.twisted(u), b.twisted(u));
                if !x.exactly_equals(&y) || x.magnitude().0 != y.magnitude().0 {
                    return Err(format!("{} p={p} u={u}", e.name));
                }
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} sums equal at histogram level"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 gauss sums", gauss_sums),
        ("2 global decomposition", || decomposition(Mode::Global)),
        ("3 local decomposition", || decomposition(Mode::Local)),
        ("4 nu inequality", nu_inequality),
        ("5 newton invariants", newton_invariants),
        ("6 mt1 stability", mt1_stability),
        ("7 katz catalog", katz_catalog),
        ("8 homogenization", homogenization),
        ("9 mt2 path", mt2_path),
        ("10 cross model", cross_model),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  {name}: {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
