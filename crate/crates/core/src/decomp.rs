//! Face decomposition of the global and local sums.
//!
//! Splitting `(Z_p)^n` (or the maximal ideal box) by the orders
//! `k = ord(x)` groups the covectors by the face `F(k)`. Each group
//! contributes cone sums `A = sum q^-nu(k)` over `N(k) >= m` and
//! `B = sum q^-nu(k)` over `N(k) = m - 1`, the latter weighted by the torus
//! sum of `f_tau`. Cone sums are enumerated exactly up to `nu(k) <= V` and
//! closed with a proven tail bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{checked_pow, inv_pow, rational_string};
use crate::error::{Error, Result};
use crate::interval::{ComplexBox, Interval, RationalInterval};
use crate::newton::{nondegenerate_for_prime, NewtonPolyhedron, NondegeneracyCertificate};
use crate::poly::{ExponentVector, Polynomial};
use crate::sums::{e_sum, s_sum, t_sum, unit_box_sum, Budget, ExpSumValue, UnitTwist};

pub const DEFAULT_DEPTH: u32 = 40;
/// Relative tail target for adaptive depth.
pub const TAIL_TARGET: f64 = 1e-15;
/// Cap on enumerated covectors per cone-sum pass.
pub const MAX_LATTICE_POINTS: u128 = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `S` over `Z_p^n`, all faces.
    Global,
    /// `T` over the maximal ideal, compact faces (`k >= 1`).
    Local,
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Upper bound for `sum_{s > V} C(s+n-1, n-1) q^-s`.
///
/// The term ratio `r_s = (s+n) / ((s+1) q)` decreases in `s`; summing the
/// terms exactly until the first `s0 > V` with `r_s0 < 1` and closing with
/// the geometric majorant `t_s0 / (1 - r_s0)` gives a bound that decreases
/// strictly in `V` and is exact for `n = 1`.
pub fn tail_bound(n: usize, q: u64, v: u32) -> BigRational {
    assert!(q >= 2 && n >= 1);
    let n = n as u64;
    let term = |s: u64| BigRational::new(binomial(s + n - 1, n - 1), num_traits::pow(BigInt::from(q), s as usize));
    let ratio = |s: u64| BigRational::new(BigInt::from(s + n), BigInt::from((s + 1) * q));
    let mut s = v as u64 + 1;
    let mut acc = BigRational::zero();
    loop {
        let r = ratio(s);
        if r < BigRational::one() {
            return acc + term(s) / (BigRational::one() - r);
        }
        acc += term(s);
        s += 1;
    }
}

/// One enumerated covector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeTerm {
    pub k: Vec<u64>,
    pub nu: u64,
    pub n_k: u64,
    pub face: usize,
}

/// Truncated cone sums for every face.
#[derive(Debug, Clone, Serialize)]
pub struct ConeSums {
    pub q: u64,
    pub m: u32,
    pub depth: u32,
    pub mode: Mode,
    #[serde(serialize_with = "crate::arith::ser_rational")]
    pub tail: BigRational,
    /// Indexed by face id.
    pub a: Vec<RationalInterval>,
    pub b: Vec<RationalInterval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<LatticeTerm>>,
}

pub(crate) fn lattice_count(n: usize, depth: u32, mode: Mode) -> u128 {
    let shift = if mode == Mode::Local { n as u64 } else { 0 };
    let d = (depth as u64).saturating_sub(shift);
    if mode == Mode::Local && (depth as u64) < shift {
        return 0;
    }
    let c = binomial(d + n as u64, n as u64);
    u128::try_from(c).unwrap_or(u128::MAX)
}

/// Calls `visit` for every `k` in `N^n` (or `k >= 1`) with `nu(k) <= depth`
/// and first coordinate `first`.
pub(crate) fn for_each_covector(n: usize, depth: u64, lower: u64, first: u64, visit: &mut impl FnMut(&[u64], u64)) {
    let mut k = vec![lower; n];
    k[0] = first;
    let mut nu = first + lower * (n as u64 - 1);
    if nu > depth {
        return;
    }
    loop {
        visit(&k, nu);
        // odometer over coordinates 1..n under nu <= depth
        let mut j = n;
        loop {
            j -= 1;
            if j == 0 {
                return;
            }
            if nu < depth {
                k[j] += 1;
                nu += 1;
                break;
            }
            nu -= k[j] - lower;
            k[j] = lower;
        }
    }
}

/// Exact cone sums `A_tau`, `B_tau` for all faces, truncated at `nu <= depth`.
pub fn cone_sums(poly: &NewtonPolyhedron, q: u64, m: u32, depth: u32, mode: Mode, keep_terms: bool) -> Result<ConeSums> {
    let n = poly.n;
    if q < 2 {
        return Err(Error::InvalidInput("q must be at least 2".into()));
    }
    if depth < 1 {
        return Err(Error::InvalidInput("depth must be positive".into()));
    }
    let count = lattice_count(n, depth, mode);
    if count > MAX_LATTICE_POINTS {
        return Err(Error::EnumerationLimit { size: count as usize, limit: MAX_LATTICE_POINTS as usize });
    }
    let lower = u64::from(mode == Mode::Local);
    let faces = poly.faces.len();
    let depth64 = depth as u64;
    let nbins = depth as usize + 1;
    let m64 = m as u64;
    // per face: counts of A and B covectors by nu
    type Bins = (Vec<Vec<u64>>, Vec<Vec<u64>>, Vec<LatticeTerm>);
    let parts: Vec<Bins> = (lower..=depth64)
        .into_par_iter()
        .map(|first| {
            let mut a = vec![vec![0u64; nbins]; faces];
            let mut b = vec![vec![0u64; nbins]; faces];
            let mut terms = Vec::new();
            for_each_covector(n, depth64, lower, first, &mut |k, nu| {
                let (nk, face) = poly.classify(k);
                if nk >= m64 {
                    a[face][nu as usize] += 1;
                } else if nk + 1 == m64 {
                    b[face][nu as usize] += 1;
                }
                if keep_terms {
                    terms.push(LatticeTerm { k: k.to_vec(), nu, n_k: nk, face });
                }
            });
            (a, b, terms)
        })
        .collect();
    let mut a = vec![vec![0u64; nbins]; faces];
    let mut b = vec![vec![0u64; nbins]; faces];
    let mut terms = Vec::new();
    for (pa, pb, pt) in parts {
        for f in 0..faces {
            for s in 0..nbins {
                a[f][s] += pa[f][s];
                b[f][s] += pb[f][s];
            }
        }
        terms.extend(pt);
    }
    let qpow: Vec<BigInt> = (0..nbins).map(|s| num_traits::pow(BigInt::from(q), depth as usize - s)).collect();
    let denom = num_traits::pow(BigInt::from(q), depth as usize);
    let tail = tail_bound(n, q, depth);
    let close = |bins: &Vec<u64>| {
        let num: BigInt = bins.iter().zip(&qpow).map(|(&c, w)| BigInt::from(c) * w).sum();
        let lo = BigRational::new(num, denom.clone());
        let hi = &lo + &tail;
        RationalInterval::new(lo, hi)
    };
    Ok(ConeSums {
        q,
        m,
        depth,
        mode,
        a: a.iter().map(close).collect(),
        b: b.iter().map(close).collect(),
        tail,
        terms: keep_terms.then_some(terms),
    })
}

/// `A_tau` for a single face.
pub fn a_term(poly: &NewtonPolyhedron, face: usize, q: u64, m: u32, depth: u32, mode: Mode) -> Result<RationalInterval> {
    Ok(cone_sums(poly, q, m, depth, mode, false)?.a[face].clone())
}

/// `B_tau` for a single face.
pub fn b_term(poly: &NewtonPolyhedron, face: usize, q: u64, m: u32, depth: u32, mode: Mode) -> Result<RationalInterval> {
    Ok(cone_sums(poly, q, m, depth, mode, false)?.b[face].clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiberClass {
    /// `N(k) >= m`: the character is trivial on the fiber.
    FullMeasure,
    /// `N(k) = m - 1`: the fiber reduces to the torus sum of `f_tau`.
    ECase,
    /// `N(k) <= m - 2`: the fiber integral vanishes for nondegenerate `f_tau`.
    Vanishing,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberIntegral {
    pub k: Vec<u64>,
    pub n_k: u64,
    pub face: usize,
    pub class: FiberClass,
    /// Integral over the unit box of `psi(u f(p^k x) / p^m)`.
    pub value: ExpSumValue,
    /// The value matches its class prediction exactly.
    pub matches_class: bool,
}

/// `f(p^k1 x1, ..., p^kn xn)`.
pub fn scale_by_orders(f: &Polynomial, p: u64, k: &[u64]) -> Polynomial {
    let terms = f.terms().map(|(e, c)| {
        let w: u64 = e.dot(k);
        (e.clone(), c * num_traits::pow(BigInt::from(p), w as usize))
    });
    Polynomial::from_terms(f.num_vars(), terms.collect::<Vec<(ExponentVector, BigInt)>>())
}

/// The integral of `psi(u f(x) / p^m)` over `{ord x = k}` divided by
/// `p^-nu(k)`, computed at the finite level `max(m - N(k), 1)` of units,
/// and compared against the prediction of its class.
pub fn fiber_unit_integral(
    f: &Polynomial,
    poly: &NewtonPolyhedron,
    k: &[u64],
    p: u64,
    m: u32,
    u: UnitTwist,
    budget: Budget,
) -> Result<FiberIntegral> {
    let (n_k, face) = poly.classify(k);
    let m64 = m as u64;
    let level = if n_k >= m64 { 1 } else { (m64 - n_k) as u32 };
    let fk = scale_by_orders(f, p, k);
    let value = unit_box_sum(&fk, p, level, m, u, budget)?;
    let n = f.num_vars();
    let (class, matches_class) = if n_k >= m64 {
        let expected = num_traits::pow(BigRational::one() - inv_pow(p, 1), n);
        (FiberClass::FullMeasure, value.rational_value() == Some(expected))
    } else if n_k + 1 == m64 {
        let e = e_sum(&poly.faces[face].restrict(f), p, u, budget)?;
        let expected = e.renormalized(inv_pow(p, n as u32));
        (FiberClass::ECase, value.exactly_equals(&expected))
    } else {
        (FiberClass::Vanishing, value.is_exactly_zero())
    };
    Ok(FiberIntegral { k: k.to_vec(), n_k, face, class, value, matches_class })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Verified,
    Failed,
    /// Some needed face has a torus critical point mod `p`.
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct FaceTerm {
    pub face: usize,
    pub label: String,
    pub compact: bool,
    pub a: RationalInterval,
    pub b: RationalInterval,
    pub e: ExpSumValue,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub polynomial: String,
    pub p: u64,
    pub m: u32,
    pub u: u64,
    pub mode: Mode,
    pub depth: u32,
    #[serde(serialize_with = "crate::arith::ser_rational")]
    pub tail: BigRational,
    #[serde(serialize_with = "crate::arith::ser_rational")]
    pub d_k: BigRational,
    pub nondegeneracy: NondegeneracyCertificate,
    pub faces: Vec<FaceTerm>,
    pub assembled: Option<ComplexBox>,
    pub brute_force: Option<ExpSumValue>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<LatticeTerm>>,
}

#[derive(Debug, Clone, Copy)]
pub struct DecompOptions {
    pub mode: Mode,
    /// Starting truncation depth.
    pub depth: u32,
    /// Raise the depth until the tail is below `TAIL_TARGET` times the assembled magnitude.
    pub adaptive: bool,
    pub budget: Budget,
    pub dump_terms: bool,
}

impl Default for DecompOptions {
    fn default() -> Self {
        DecompOptions { mode: Mode::Global, depth: DEFAULT_DEPTH, adaptive: true, budget: Budget::default(), dump_terms: false }
    }
}

impl DecompOptions {
    pub fn local() -> Self {
        DecompOptions { mode: Mode::Local, ..Self::default() }
    }
}

fn assemble(faces: &[FaceTerm], d_k: &BigRational) -> ComplexBox {
    let mut total = ComplexBox::zero();
    for t in faces {
        let a = ComplexBox { re: t.a.to_interval(), im: Interval::point(0.0) };
        let e = ComplexBox::around(t.e.re, t.e.im, t.e.abs_error);
        total = total + a + e.scale(t.b.to_interval());
    }
    total.scale(RationalInterval::point(d_k.clone()).to_interval())
}

/// Assembles `d_K sum_tau (A_tau + E_tau B_tau)` and checks it against the
/// brute-force sum.
pub fn verify_decomposition(f: &Polynomial, p: u64, m: u32, u: UnitTwist, opts: DecompOptions) -> Result<DecompositionReport> {
    let poly = NewtonPolyhedron::new(f)?;
    let n = f.num_vars();
    let local = opts.mode == Mode::Local;
    let cert = nondegenerate_for_prime(f, &poly.faces, p, local)?;
    let u = UnitTwist::new(u.get(), p)?;
    let d_k = num_traits::pow(BigRational::one() - inv_pow(p, 1), n);
    let mut report = DecompositionReport {
        polynomial: f.to_string(),
        p,
        m,
        u: u.get(),
        mode: opts.mode,
        depth: opts.depth,
        tail: BigRational::zero(),
        d_k: d_k.clone(),
        nondegeneracy: cert,
        faces: Vec::new(),
        assembled: None,
        brute_force: None,
        verdict: Verdict::NotApplicable,
        terms: None,
    };
    if !report.nondegeneracy.certified {
        return Ok(report);
    }
    checked_pow(p, m * n as u32).ok_or(Error::ModulusTooLarge(u128::MAX))?;
    let used: Vec<usize> = poly.faces.iter().filter(|t| t.compact || !local).map(|t| t.id).collect();
    let energies: Vec<ExpSumValue> =
        used.iter().map(|&id| e_sum(&poly.faces[id].restrict(f), p, u, opts.budget)).collect::<Result<_>>()?;
    let mut depth = opts.depth;
    loop {
        let sums = cone_sums(&poly, p, m, depth, opts.mode, opts.dump_terms)?;
        let faces: Vec<FaceTerm> = used
            .iter()
            .zip(&energies)
            .map(|(&id, e)| FaceTerm {
                face: id,
                label: poly.faces[id].label(),
                compact: poly.faces[id].compact,
                a: sums.a[id].clone(),
                b: sums.b[id].clone(),
                e: e.clone(),
            })
            .collect();
        let assembled = assemble(&faces, &d_k);
        let tail = crate::arith::to_f64(&sums.tail);
        let next = depth + 20;
        let done = !opts.adaptive
            || tail < TAIL_TARGET * assembled.mag()
            || tail < 1e-300
            || lattice_count(n, next, opts.mode) > MAX_LATTICE_POINTS;
        if done {
            report.depth = depth;
            report.tail = sums.tail;
            report.faces = faces;
            report.assembled = Some(assembled);
            report.terms = sums.terms;
            break;
        }
        depth = next;
    }
    let brute = match opts.mode {
        Mode::Global => s_sum(f, p, m, u, opts.budget)?,
        Mode::Local => t_sum(f, p, m, u, opts.budget)?,
    };
    let boxed = report.assembled.expect("assembled above").inflate(brute.abs_error);
    report.verdict = if boxed.contains(brute.re, brute.im) { Verdict::Verified } else { Verdict::Failed };
    report.brute_force = Some(brute);
    Ok(report)
}

impl DecompositionReport {
    pub fn summary(&self) -> String {
        let centre = self.assembled.map(|b| b.mid());
        format!(
            "{} p={} m={} u={} {:?}: {:?}, assembled {:?}, d_K {}",
            self.polynomial,
            self.p,
            self.m,
            self.u,
            self.mode,
            self.verdict,
            centre,
            rational_string(&self.d_k)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::min_and_face;
    use proptest::prelude::*;

    fn poly(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, n).unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn face_with_points(poly: &NewtonPolyhedron, pts: &[&[u32]], compact: bool) -> usize {
        let want: Vec<ExponentVector> = pts.iter().map(|p| ExponentVector(p.to_vec())).collect();
        poly.faces.iter().find(|t| t.support_points == want && t.compact == compact).expect("face").id
    }

    #[test]
    fn tail_examples() {
        // n = 1 is the exact geometric tail
        let t = tail_bound(1, 5, 10);
        assert_eq!(t, inv_pow(5, 11) / (BigRational::one() - q(1, 5)));
        let mut prev = tail_bound(2, 2, 1);
        for v in 2..200 {
            let t = tail_bound(2, 2, v);
            assert!(t < prev);
            prev = t;
        }
        assert!(crate::arith::to_f64(&prev) < 1e-40);
        let oracle: BigRational = (11..=60u64).map(|s| q(s as i64 + 1, 1) * inv_pow(5, s as u32)).sum();
        assert!(tail_bound(2, 5, 10) >= oracle);
    }

    #[test]
    fn cone_sum_examples() {
        let x2 = NewtonPolyhedron::new(&poly("x1^2", 1)).unwrap();
        let vertex = face_with_points(&x2, &[&[2]], true);
        let whole = x2.whole().id;
        let a = a_term(&x2, vertex, 5, 2, 30, Mode::Global).unwrap();
        assert!(a.contains(&q(1, 4)));
        assert!(a.width() <= inv_pow(5, 30) * q(5, 4));
        let a = a_term(&x2, whole, 5, 1, 30, Mode::Global).unwrap();
        assert!(a.lo.is_zero());
        let b = b_term(&x2, vertex, 5, 3, 30, Mode::Global).unwrap();
        assert_eq!(b.lo, q(1, 5));
        let b = b_term(&x2, vertex, 5, 2, 30, Mode::Global).unwrap();
        assert!(b.lo.is_zero());

        let cusp = NewtonPolyhedron::new(&poly("x1^2 + x2^3", 2)).unwrap();
        let edge = face_with_points(&cusp, &[&[0, 3], &[2, 0]], true);
        let a = a_term(&cusp, edge, 7, 6, 40, Mode::Global).unwrap();
        assert!(a.contains(&q(1, 7i64.pow(5) - 1)));
        let v20 = face_with_points(&cusp, &[&[2, 0]], true);
        let b = b_term(&cusp, v20, 7, 3, 40, Mode::Global).unwrap();
        assert!(b.contains(&q(1, 42)));
        assert_eq!(b.width(), tail_bound(2, 7, 40));
    }

    #[test]
    fn enclosures_tighten_with_depth() {
        let cusp = NewtonPolyhedron::new(&poly("x1^2 + x2^3", 2)).unwrap();
        let mut prev = cone_sums(&cusp, 5, 3, 5, Mode::Global, false).unwrap();
        for d in 6..30 {
            let next = cone_sums(&cusp, 5, 3, d, Mode::Global, false).unwrap();
            for (x, y) in prev.a.iter().zip(&next.a).chain(prev.b.iter().zip(&next.b)) {
                assert!(y.lo >= x.lo && y.hi <= x.hi);
                assert_eq!(y.width(), next.tail);
            }
            prev = next;
        }
    }

    #[test]
    fn fiber_examples() {
        let f = poly("x1^2", 1);
        let np = NewtonPolyhedron::new(&f).unwrap();
        let b = Budget::default();
        let r = fiber_unit_integral(&f, &np, &[1], 5, 2, UnitTwist::ONE, b).unwrap();
        assert_eq!(r.class, FiberClass::FullMeasure);
        assert_eq!(r.value.rational_value(), Some(q(4, 5)));
        assert!(r.matches_class);
        let r = fiber_unit_integral(&f, &np, &[0], 5, 1, UnitTwist::ONE, b).unwrap();
        assert_eq!(r.class, FiberClass::ECase);
        assert!(r.matches_class);
        let e = e_sum(&f, 5, UnitTwist::ONE, b).unwrap();
        assert!((r.value.re - 0.8 * e.re).abs() < 1e-14);
        let r = fiber_unit_integral(&f, &np, &[0], 5, 2, UnitTwist::ONE, b).unwrap();
        assert_eq!(r.class, FiberClass::Vanishing);
        assert!(r.value.is_exactly_zero());
    }

    #[test]
    fn decomposition_examples() {
        let f = poly("x1^2 + x2^3", 2);
        let r = verify_decomposition(&f, 7, 2, UnitTwist::ONE, DecompOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Verified, "{}", r.summary());
        let r = verify_decomposition(&f, 7, 3, UnitTwist::new(3, 7).unwrap(), DecompOptions::local()).unwrap();
        assert_eq!(r.verdict, Verdict::Verified, "{}", r.summary());
        assert!(r.faces.iter().all(|t| t.compact));
        let r = verify_decomposition(&poly("x1^2", 1), 2, 2, UnitTwist::ONE, DecompOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn perturbed_assembly_fails() {
        // dropping a face term must break the identity
        let f = poly("x1^2 + x2^3", 2);
        let r = verify_decomposition(&f, 7, 2, UnitTwist::ONE, DecompOptions::default()).unwrap();
        let mut faces = r.faces.clone();
        let heaviest = (0..faces.len()).max_by(|&i, &j| faces[i].a.lo.cmp(&faces[j].a.lo)).unwrap();
        faces.remove(heaviest);
        let boxed = assemble(&faces, &r.d_k);
        let s = r.brute_force.unwrap();
        assert!(!boxed.inflate(s.abs_error).contains(s.re, s.im));
    }

    #[test]
    fn dump_terms_lists_every_covector() {
        let f = poly("x1^2 + x2^3", 2);
        let opts = DecompOptions { dump_terms: true, adaptive: false, depth: 10, ..DecompOptions::default() };
        let r = verify_decomposition(&f, 5, 2, UnitTwist::ONE, opts).unwrap();
        assert_eq!(r.terms.unwrap().len(), 66);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cones_partition(k in proptest::collection::vec(0u64..12, 3)) {
            let f = poly("x1^2*x2 + x2^3 + x1*x3^2 + x3^4", 3);
            let np = NewtonPolyhedron::new(&f).unwrap();
            let (nk, face) = np.classify(&k);
            let kr: Vec<BigRational> = k.iter().map(|&v| BigRational::from_integer(v.into())).collect();
            let (nr, key) = min_and_face(&np.support, &kr).unwrap();
            prop_assert_eq!(BigRational::from_integer(nk.into()), nr);
            prop_assert_eq!(np.face_by_key(&key).unwrap().id, face);
            prop_assert_eq!(np.faces.iter().filter(|t| t.key == key).count(), 1);
        }

        #[test]
        fn vanishing_fibers(k in proptest::collection::vec(0u64..3, 2), m in 1u32..5) {
            let f = poly("x1^2 + x2^3", 2);
            let np = NewtonPolyhedron::new(&f).unwrap();
            let r = fiber_unit_integral(&f, &np, &k, 5, m, UnitTwist::new(2, 5).unwrap(), Budget::default()).unwrap();
            prop_assert!(r.matches_class, "{:?} {:?}", r.class, k);
        }
    }
}
