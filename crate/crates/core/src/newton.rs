//! Newton polyhedra at the origin and their face lattices.
//!
//! The polyhedron of `f` is `conv(Supp f) + R_+^n`. Every face is the set of
//! minimizers `F(k)` of a covector `k >= 0`, so a face is identified by the
//! support points on it together with its recession directions (the
//! coordinates where `k` vanishes). Faces are found with exact feasibility
//! programs and each carries an integer witness covector.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{RationalLp, Relation};
use crate::poly::{ExponentVector, ModularPolynomial, Polynomial};

/// Largest support accepted by [`enumerate_faces`].
pub const MAX_SUPPORT: usize = 14;

/// Identity of a face: which support points lie on it (bit `i` is
/// `support[i]`) and which coordinate axes it recedes along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceKey {
    pub points: u64,
    pub recession: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub id: usize,
    pub support_points: Vec<ExponentVector>,
    /// Integer covector `k` with `F(k)` equal to this face.
    pub witness: Vec<u64>,
    /// `N(k)` for the witness.
    pub min_value: u64,
    /// 0-based coordinate axes `e_j` with `k_j = 0`.
    pub recession_dirs: Vec<usize>,
    pub dim: usize,
    pub compact: bool,
    #[serde(skip)]
    pub key: FaceKey,
}

impl Face {
    pub fn support_set(&self) -> BTreeSet<ExponentVector> {
        self.support_points.iter().cloned().collect()
    }

    /// `f_tau`.
    pub fn restrict(&self, f: &Polynomial) -> Polynomial {
        f.restrict_to(&self.support_set())
    }

    /// Inclusion of faces of the same polyhedron.
    pub fn is_subface_of(&self, other: &Face) -> bool {
        self.key.points & !other.key.points == 0 && self.key.recession & !other.key.recession == 0
    }

    /// Whether the face contains the rational point `x`.
    pub fn contains_point(&self, x: &[BigRational]) -> bool {
        let kx: BigRational = self.witness.iter().zip(x).map(|(&k, v)| BigRational::from_integer(k.into()) * v).sum();
        kx == BigRational::from_integer(self.min_value.into())
    }

    pub fn label(&self) -> String {
        let pts: Vec<String> = self
            .support_points
            .iter()
            .map(|p| format!("({})", p.0.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        let mut s = pts.join(" ");
        for j in &self.recession_dirs {
            s.push_str(&format!(" +e{}", j + 1));
        }
        s
    }
}

/// Affine dimension of `points` together with the recession rays `dirs`.
pub fn face_dimension(n: usize, points: &[ExponentVector], dirs: &[usize]) -> usize {
    let Some(v0) = points.first() else {
        return 0;
    };
    let mut rows: Vec<Vec<i64>> = points[1..]
        .iter()
        .map(|p| p.0.iter().zip(&v0.0).map(|(&a, &b)| i64::from(a) - i64::from(b)).collect())
        .collect();
    for &j in dirs {
        let mut e = vec![0; n];
        e[j] = 1;
        rows.push(e);
    }
    linalg::rank_i64(&rows)
}

fn covector_key(support: &[ExponentVector], k: &[u64]) -> (u64, FaceKey) {
    let mut best = u64::MAX;
    let mut mask = 0u64;
    for (i, s) in support.iter().enumerate() {
        let v = s.dot(k);
        if v < best {
            best = v;
            mask = 1 << i;
        } else if v == best {
            mask |= 1 << i;
        }
    }
    let recession = k.iter().enumerate().filter(|(_, &v)| v == 0).fold(0u32, |acc, (j, _)| acc | (1 << j));
    (best, FaceKey { points: mask, recession })
}

/// `N(k)` and the key of `F(k)` for a nonnegative rational covector.
pub fn min_and_face(support: &[ExponentVector], k: &[BigRational]) -> Result<(BigRational, FaceKey)> {
    if k.iter().any(Signed::is_negative) {
        return Err(Error::NegativeCovector);
    }
    if support.is_empty() {
        return Err(Error::InvalidInput("empty support".into()));
    }
    let lcm = k.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled: Vec<u64> = k
        .iter()
        .map(|v| (v * BigRational::from_integer(lcm.clone())).to_integer().to_u64().expect("covector fits in u64"))
        .collect();
    let (n_int, key) = covector_key(support, &scaled);
    Ok((BigRational::new(n_int.into(), lcm), key))
}

fn build_face(n: usize, support: &[ExponentVector], witness: Vec<u64>) -> Face {
    let (min_value, key) = covector_key(support, &witness);
    let support_points: Vec<ExponentVector> =
        support.iter().enumerate().filter(|(i, _)| key.points >> i & 1 == 1).map(|(_, s)| s.clone()).collect();
    let recession_dirs: Vec<usize> = (0..n).filter(|j| key.recession >> j & 1 == 1).collect();
    let dim = face_dimension(n, &support_points, &recession_dirs);
    Face { id: 0, support_points, witness, min_value, compact: recession_dirs.is_empty(), recession_dirs, dim, key }
}

/// Solves for `k` (positive on `free`, zero elsewhere) with `k.c = N` on the
/// classes in `on` and `k.c >= N + 1` on the classes in `off`.
fn exposing_covector(n: usize, free: &[usize], on: &[&Vec<u32>], off: &[&Vec<u32>]) -> Option<Vec<u64>> {
    let vars = free.len() + 1;
    let mut lp = RationalLp::new(vars);
    for i in 0..free.len() {
        let mut row = vec![0; vars];
        row[i] = 1;
        lp.constrain_int(&row, Relation::Ge, 1);
    }
    let row_of = |c: &Vec<u32>| -> Vec<i64> {
        let mut row: Vec<i64> = free.iter().map(|&j| i64::from(c[j])).collect();
        row.push(-1);
        row
    };
    for c in on {
        lp.constrain_int(&row_of(c), Relation::Eq, 0);
    }
    for c in off {
        lp.constrain_int(&row_of(c), Relation::Ge, 1);
    }
    let sol = lp.solve().optimal()?;
    let lcm = sol.x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut k = vec![0u64; n];
    for (i, &j) in free.iter().enumerate() {
        k[j] = (&sol.x[i] * BigRational::from_integer(lcm.clone())).to_integer().to_u64().expect("witness fits in u64");
    }
    Some(k)
}

/// Faces realised by covectors whose zero set is exactly `zero_mask`.
fn faces_with_recession(n: usize, support: &[ExponentVector], zero_mask: u32) -> Vec<Face> {
    let free: Vec<usize> = (0..n).filter(|j| zero_mask >> j & 1 == 0).collect();
    if free.is_empty() {
        return vec![build_face(n, support, vec![0; n])];
    }
    // Support points with equal projection onto the free coordinates behave as one.
    let classes: BTreeSet<Vec<u32>> =
        support.iter().map(|s| free.iter().map(|&j| s.0[j]).collect::<Vec<u32>>()).collect();
    let classes: Vec<Vec<u32>> = classes.into_iter().collect();
    // Re-expand projected classes to full-length vectors in the free coordinates.
    let lifted: Vec<Vec<u32>> = classes
        .iter()
        .map(|c| {
            let mut v = vec![0u32; n];
            for (i, &j) in free.iter().enumerate() {
                v[j] = c[i];
            }
            v
        })
        .collect();
    let vertices: Vec<usize> = (0..lifted.len())
        .filter(|&i| {
            let off: Vec<&Vec<u32>> = lifted.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c).collect();
            exposing_covector(n, &free, &[&lifted[i]], &off).is_some()
        })
        .collect();
    let mut out = Vec::new();
    let nv = vertices.len();
    for subset in 1u64..(1u64 << nv) {
        let on: Vec<&Vec<u32>> = (0..nv).filter(|b| subset >> b & 1 == 1).map(|b| &lifted[vertices[b]]).collect();
        // compact faces of the projected polyhedron lie in a hyperplane
        if on.len() > 1 {
            let rows: Vec<Vec<i64>> = on[1..]
                .iter()
                .map(|c| free.iter().map(|&j| i64::from(c[j]) - i64::from(on[0][j])).collect())
                .collect();
            if linalg::rank_i64(&rows) + 1 > free.len() {
                continue;
            }
        }
        let off: Vec<&Vec<u32>> = (0..nv).filter(|b| subset >> b & 1 == 0).map(|b| &lifted[vertices[b]]).collect();
        if let Some(k) = exposing_covector(n, &free, &on, &off) {
            let face = build_face(n, support, k);
            debug_assert_eq!(face.key.recession, zero_mask);
            out.push(face);
        }
    }
    out
}

/// Every face `F(k)`, `k` ranging over nonnegative rational covectors, in a
/// canonical order: by dimension, then recession set, then support.
pub fn enumerate_faces(n: usize, support: &[ExponentVector]) -> Result<Vec<Face>> {
    if support.len() > MAX_SUPPORT {
        return Err(Error::EnumerationLimit { size: support.len(), limit: MAX_SUPPORT });
    }
    if support.is_empty() {
        return Err(Error::InvalidInput("empty support".into()));
    }
    let mut faces: Vec<Face> =
        (0u32..(1u32 << n)).into_par_iter().flat_map_iter(|mask| faces_with_recession(n, support, mask)).collect();
    faces.sort_by(|a, b| (a.dim, a.key.recession, &a.support_points).cmp(&(b.dim, b.key.recession, &b.support_points)));
    faces.dedup_by(|a, b| a.key == b.key);
    for (i, f) in faces.iter_mut().enumerate() {
        f.id = i;
    }
    Ok(faces)
}

/// Where the diagonal first meets the polyhedron.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalData {
    /// `t*`, the least `t` with `(t, .., t)` in the polyhedron.
    #[serde(serialize_with = "crate::arith::ser_rational")]
    pub t_star: BigRational,
    #[serde(serialize_with = "crate::arith::ser_rational")]
    pub sigma: BigRational,
    /// Convex weights on the support with `sum lambda_s s_j <= t*` for all `j`.
    #[serde(serialize_with = "crate::arith::ser_rationals")]
    pub lambda: Vec<BigRational>,
    pub f0: usize,
    pub kappa: usize,
}

/// `sigma`, `F_0` and `kappa` from an enumerated face list.
pub fn sigma_kappa(n: usize, support: &[ExponentVector], faces: &[Face]) -> Result<DiagonalData> {
    if support.is_empty() {
        return Err(Error::InvalidInput("empty support".into()));
    }
    if support.iter().any(ExponentVector::is_origin) {
        return Err(Error::InvalidInput("support contains the origin".into()));
    }
    let t_star = diagonal_entry(n, support)?;
    let (lambda, t_star) = t_star;
    let point = vec![t_star.clone(); n];
    let containing: Vec<&Face> = faces.iter().filter(|f| f.contains_point(&point)).collect();
    let f0 = containing
        .iter()
        .find(|f| containing.iter().all(|g| f.is_subface_of(g)))
        .ok_or_else(|| Error::InvalidInput("no minimal face meets the diagonal".into()))?;
    Ok(DiagonalData {
        sigma: BigRational::one() / &t_star,
        t_star,
        lambda,
        f0: f0.id,
        kappa: n - f0.dim,
    })
}

/// `(lambda, t*)` from the program `min t` s.t. `sum lambda = 1`, `sum lambda_s s_j <= t`.
fn diagonal_entry(n: usize, support: &[ExponentVector]) -> Result<(Vec<BigRational>, BigRational)> {
    let m = support.len();
    let mut obj = vec![0; m + 1];
    obj[m] = 1;
    let mut lp = RationalLp::new(m + 1).minimize_int(&obj);
    let mut ones = vec![1; m + 1];
    ones[m] = 0;
    lp.constrain_int(&ones, Relation::Eq, 1);
    for j in 0..n {
        let mut row: Vec<i64> = support.iter().map(|s| i64::from(s.0[j])).collect();
        row.push(-1);
        lp.constrain_int(&row, Relation::Le, 0);
    }
    let sol = lp.solve().optimal().ok_or_else(|| Error::InvalidInput("diagonal program infeasible".into()))?;
    let t = sol.x[m].clone();
    let lambda = sol.x[..m].to_vec();
    Ok((lambda, t))
}

/// `sigma` of an arbitrary nonempty support set not containing the origin.
pub fn sigma_of_support(n: usize, support: &[ExponentVector]) -> Result<BigRational> {
    if support.is_empty() || support.iter().any(ExponentVector::is_origin) {
        return Err(Error::InvalidInput("sigma needs a nonempty support away from the origin".into()));
    }
    Ok(BigRational::one() / diagonal_entry(n, support)?.1)
}

#[derive(Debug, Clone)]
pub struct NewtonPolyhedron {
    pub n: usize,
    pub support: Vec<ExponentVector>,
    pub faces: Vec<Face>,
    pub diagonal: DiagonalData,
    lookup: HashMap<FaceKey, usize>,
}

impl NewtonPolyhedron {
    /// Requires a nonzero polynomial with `f(0) = 0`.
    pub fn new(f: &Polynomial) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !f.constant_term().is_zero() {
            return Err(Error::InvalidInput("f(0) != 0; subtract the constant term first".into()));
        }
        let support: Vec<ExponentVector> = f.support().into_iter().collect();
        Self::from_support(f.num_vars(), support)
    }

    pub fn from_support(n: usize, support: Vec<ExponentVector>) -> Result<Self> {
        let faces = enumerate_faces(n, &support)?;
        let diagonal = sigma_kappa(n, &support, &faces)?;
        let lookup = faces.iter().map(|f| (f.key, f.id)).collect();
        Ok(NewtonPolyhedron { n, support, faces, diagonal, lookup })
    }

    pub fn sigma(&self) -> &BigRational {
        &self.diagonal.sigma
    }

    pub fn kappa(&self) -> usize {
        self.diagonal.kappa
    }

    pub fn f0(&self) -> &Face {
        &self.faces[self.diagonal.f0]
    }

    pub fn whole(&self) -> &Face {
        self.faces.last().expect("the polyhedron is a face of itself")
    }

    pub fn compact_faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| f.compact)
    }

    /// `(N(k), index of F(k))` for an integer covector.
    pub fn classify(&self, k: &[u64]) -> (u64, usize) {
        let (nk, key) = covector_key(&self.support, k);
        let id = *self.lookup.get(&key).expect("every covector exposes an enumerated face");
        (nk, id)
    }

    pub fn face_by_key(&self, key: &FaceKey) -> Option<&Face> {
        self.lookup.get(key).map(|&i| &self.faces[i])
    }
}

/// Outcome of the torus critical-point search for one face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceCheck {
    pub face: usize,
    pub compact: bool,
    /// A point of `(F_p^x)^n` where every partial of `f_tau` vanishes.
    pub critical_point: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NondegeneracyCertificate {
    pub prime: u64,
    pub checks: Vec<FaceCheck>,
    /// Every checked face is free of torus critical points.
    pub certified: bool,
}

/// A point of `(F_p^x)^n` where all of `polys` vanish mod `p`, by exhaustive search.
pub fn torus_common_zero(polys: &[Polynomial], n: usize, p: u64) -> Option<Vec<u64>> {
    let reduced: Vec<ModularPolynomial> = polys.iter().map(|g| ModularPolynomial::new(g, p)).collect();
    if n == 0 {
        return None;
    }
    let mut x = vec![1u64; n];
    let mut table = Vec::new();
    loop {
        if reduced.iter().all(|g| {
            g.powers(&x, &mut table);
            g.evaluate_with(&table) == 0
        }) {
            return Some(x);
        }
        let mut j = 0;
        loop {
            if j == n {
                return None;
            }
            x[j] += 1;
            if x[j] < p {
                break;
            }
            x[j] = 1;
            j += 1;
        }
    }
}

/// Brute-force check that `f_tau mod p` has no critical point on the torus,
/// for every face (or every compact face).
pub fn nondegenerate_for_prime(
    f: &Polynomial,
    faces: &[Face],
    p: u64,
    compact_only: bool,
) -> Result<NondegeneracyCertificate> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = f.num_vars();
    let checks: Vec<FaceCheck> = faces
        .par_iter()
        .filter(|t| t.compact || !compact_only)
        .map(|t| {
            let partials = t.restrict(f).partial_derivatives();
            FaceCheck { face: t.id, compact: t.compact, critical_point: torus_common_zero(&partials, n, p) }
        })
        .collect();
    let certified = checks.iter().all(|c| c.critical_point.is_none());
    Ok(NondegeneracyCertificate { prime: p, checks, certified })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(text: &str, n: usize) -> Polynomial {
        Polynomial::parse(text, n).unwrap()
    }

    fn ev(v: &[u32]) -> ExponentVector {
        ExponentVector(v.to_vec())
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn qs(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| q(x, 1)).collect()
    }

    #[test]
    fn min_and_face_examples() {
        let s = [ev(&[2, 0]), ev(&[0, 3])];
        let (nk, key) = min_and_face(&s, &qs(&[1, 1])).unwrap();
        assert_eq!(nk, q(2, 1));
        assert_eq!(key, FaceKey { points: 0b01, recession: 0 });
        let (nk, key) = min_and_face(&s, &qs(&[3, 2])).unwrap();
        assert_eq!(nk, q(6, 1));
        assert_eq!(key, FaceKey { points: 0b11, recession: 0 });
        let (nk, key) = min_and_face(&s, &qs(&[0, 0])).unwrap();
        assert_eq!(nk, q(0, 1));
        assert_eq!(key, FaceKey { points: 0b11, recession: 0b11 });
        let (nk, _) = min_and_face(&s, &[q(1, 2), q(1, 3)]).unwrap();
        assert_eq!(nk, q(1, 1));
        assert_eq!(min_and_face(&s, &qs(&[-1, 1])), Err(Error::NegativeCovector));
    }

    #[test]
    fn faces_of_x1sq_plus_x2cube() {
        let np = NewtonPolyhedron::new(&poly("x1^2+x2^3", 2)).unwrap();
        assert_eq!(np.faces.len(), 6);
        let dims: Vec<usize> = np.faces.iter().map(|f| f.dim).collect();
        assert_eq!(dims, vec![0, 0, 1, 1, 1, 2]);
        assert_eq!(np.faces.iter().filter(|f| f.compact).count(), 3);
        assert_eq!(np.sigma(), &q(5, 6));
        assert_eq!(np.kappa(), 1);
        let f0 = np.f0();
        assert!(f0.compact && f0.dim == 1 && f0.support_points.len() == 2);
        assert_eq!(np.whole().recession_dirs, vec![0, 1]);
    }

    #[test]
    fn one_variable_square() {
        let np = NewtonPolyhedron::new(&poly("x1^2", 1)).unwrap();
        assert_eq!(np.faces.len(), 2);
        assert_eq!(np.sigma(), &q(1, 2));
        assert_eq!(np.kappa(), 1);
        assert_eq!(np.f0().dim, 0);
    }

    #[test]
    fn sum_of_squares_diagonal() {
        let np = NewtonPolyhedron::new(&poly("x1^2+x2^2", 2)).unwrap();
        assert_eq!(np.sigma(), &q(1, 1));
        assert_eq!(np.kappa(), 1);
        assert_eq!(np.f0().support_points, vec![ev(&[0, 2]), ev(&[2, 0])]);
    }

    #[test]
    fn linear_form_has_unbounded_edges() {
        // x1 + x2: F((1,0)) = {(0,t) : t >= 1} is a genuine unbounded edge.
        let np = NewtonPolyhedron::new(&poly("x1+x2", 2)).unwrap();
        assert_eq!(np.faces.len(), 6);
        let (_, id) = np.classify(&[1, 0]);
        assert_eq!(np.faces[id].recession_dirs, vec![1]);
        assert_eq!(np.faces[id].dim, 1);
    }

    #[test]
    fn vertex_on_diagonal() {
        // x1*x2 + x1^3 + x2^3: t* = 1 is attained at the vertex (1,1)
        let np = NewtonPolyhedron::new(&poly("x1*x2 + x1^3 + x2^3", 2)).unwrap();
        assert_eq!(np.sigma(), &q(1, 1));
        assert_eq!(np.f0().dim, 0);
        assert_eq!(np.kappa(), 2);
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(face_dimension(2, &[ev(&[2, 0])], &[]), 0);
        assert_eq!(face_dimension(2, &[ev(&[2, 0])], &[0]), 1);
        assert_eq!(face_dimension(2, &[ev(&[2, 0]), ev(&[0, 3])], &[0, 1]), 2);
    }

    #[test]
    fn nondegeneracy_examples() {
        let f = poly("x1^2+x2^3", 2);
        let np = NewtonPolyhedron::new(&f).unwrap();
        let cert = nondegenerate_for_prime(&f, &np.faces, 7, true).unwrap();
        assert!(cert.certified);
        assert_eq!(cert.checks.len(), 3);
        let all = nondegenerate_for_prime(&f, &np.faces, 7, false).unwrap();
        assert!(all.certified);
        assert!(!nondegenerate_for_prime(&f, &np.faces, 3, true).unwrap().certified);

        let g = poly("x1^2 + 2*x1*x2 + x2^2", 2);
        let npg = NewtonPolyhedron::new(&g).unwrap();
        let cert = nondegenerate_for_prime(&g, &npg.faces, 5, true).unwrap();
        assert!(!cert.certified);
        let edge = cert.checks.iter().find(|c| npg.faces[c.face].dim == 1).unwrap();
        let x = edge.critical_point.as_ref().unwrap();
        assert_eq!((x[0] + x[1]) % 5, 0);

        assert_eq!(nondegenerate_for_prime(&f, &np.faces, 9, true), Err(Error::NotPrime(9)));
        let h = poly("x1^2", 1);
        let nph = NewtonPolyhedron::new(&h).unwrap();
        assert!(!nondegenerate_for_prime(&h, &nph.faces, 2, true).unwrap().certified);
    }

    /// Faces found by scanning every covector in a box; independent of the LP path.
    fn brute_force_keys(support: &[ExponentVector], n: usize, bound: u64) -> BTreeSet<FaceKey> {
        let mut out = BTreeSet::new();
        let mut k = vec![0u64; n];
        loop {
            out.insert(covector_key(support, &k).1);
            let mut j = 0;
            loop {
                if j == n {
                    return out;
                }
                k[j] += 1;
                if k[j] <= bound {
                    break;
                }
                k[j] = 0;
                j += 1;
            }
        }
    }

    #[test]
    fn enumeration_matches_covector_scan() {
        for text in ["x1^2+x2^3", "x1+x2", "x1^2", "x1^3*x2 + x1*x2^2 + x2^5 + x1^4", "x1^2*x2^2 + x1^5 + x2^4 + x1*x2^3"] {
            let n = if text == "x1^2" { 1 } else { 2 };
            let f = poly(text, n);
            let np = NewtonPolyhedron::new(&f).unwrap();
            let max_exp = *f.max_exponents().iter().max().unwrap() as u64;
            let scanned = brute_force_keys(&np.support, n, 3 * max_exp);
            let enumerated: BTreeSet<FaceKey> = np.faces.iter().map(|f| f.key).collect();
            assert_eq!(scanned, enumerated, "{text}");
        }
    }

    #[test]
    fn witnesses_expose_their_faces() {
        let np = NewtonPolyhedron::new(&poly("x1^2*x2 + x2^3*x3 + x1*x3^4 + x3^6", 3)).unwrap();
        for face in &np.faces {
            let (nk, id) = np.classify(&face.witness);
            assert_eq!(id, face.id);
            assert_eq!(nk, face.min_value);
            assert_eq!(face.compact, face.witness.iter().all(|&v| v > 0));
        }
    }

    proptest::proptest! {
        #[test]
        fn covectors_land_on_enumerated_faces(
            pts in proptest::collection::btree_set(proptest::collection::vec(0u32..5, 2), 1..6),
            ks in proptest::collection::vec(proptest::collection::vec(0u64..=20, 2), 200),
        ) {
            let support: Vec<ExponentVector> = pts.into_iter().filter(|p| p.iter().any(|&v| v > 0)).map(ExponentVector).collect();
            proptest::prop_assume!(!support.is_empty());
            let np = NewtonPolyhedron::from_support(2, support.clone()).unwrap();
            for k in &ks {
                let key = covector_key(&support, k).1;
                proptest::prop_assert!(np.face_by_key(&key).is_some());
            }
            // brute-force agreement on small instances
            let scanned = brute_force_keys(&support, 2, 3 * 4);
            let enumerated: BTreeSet<FaceKey> = np.faces.iter().map(|f| f.key).collect();
            proptest::prop_assert_eq!(scanned, enumerated);
        }

        #[test]
        fn diagonal_witness_and_minimality(
            pts in proptest::collection::btree_set(proptest::collection::vec(0u32..5, 3), 1..6),
        ) {
            let support: Vec<ExponentVector> = pts.into_iter().filter(|p| p.iter().any(|&v| v > 0)).map(ExponentVector).collect();
            proptest::prop_assume!(!support.is_empty());
            let np = NewtonPolyhedron::from_support(3, support.clone()).unwrap();
            let d = &np.diagonal;
            proptest::prop_assert!(d.sigma > BigRational::zero());
            let total: BigRational = d.lambda.iter().sum();
            proptest::prop_assert_eq!(total, q(1, 1));
            for j in 0..3 {
                let s: BigRational = support.iter().zip(&d.lambda).map(|(p, l)| l * q(p.0[j] as i64, 1)).sum();
                proptest::prop_assert!(s <= d.t_star);
            }
            let point = vec![d.t_star.clone(); 3];
            let f0 = np.f0();
            proptest::prop_assert!(f0.contains_point(&point));
            for face in &np.faces {
                if face.id != f0.id && face.is_subface_of(f0) {
                    proptest::prop_assert!(!face.contains_point(&point));
                }
            }
            // (t, .., t) with t < t* is outside: some face inequality k.x >= N fails
            let below = vec![&d.t_star - q(1, 1000); 3];
            let outside = np.faces.iter().any(|f| {
                let kx: BigRational = f.witness.iter().zip(&below).map(|(&k, v)| q(k as i64, 1) * v).sum();
                kx < q(f.min_value as i64, 1)
            });
            proptest::prop_assert!(outside);
        }

        #[test]
        fn torus_substitution_transports_support(
            pts in proptest::collection::btree_set(proptest::collection::vec(0u32..4, 3), 1..5),
            var in 0usize..3,
        ) {
            let f = Polynomial::from_terms(3, pts.into_iter().map(|p| (ExponentVector(p), BigInt::from(1))));
            let f = f.without_constant_term();
            proptest::prop_assume!(!f.is_zero());
            let g = f.substitute_torus(var).unwrap();
            let gs = g.support();
            for p in f.support() {
                let mut lifted = p.0.clone();
                lifted.push(p.0[var]);
                proptest::prop_assert!(gs.contains(&ExponentVector(lifted)));
            }
            proptest::prop_assert_eq!(gs.len(), f.support().len());
            let sf = NewtonPolyhedron::new(&f).unwrap();
            let sg = NewtonPolyhedron::new(&g).unwrap();
            proptest::prop_assert_eq!(sf.sigma(), sg.sigma());
        }
    }
}
