//! Sparse multivariate polynomials with integer coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{RationalLp, Relation};

/// Exponent vector `i` of a monomial `x^i`, one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn zero(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// `k . i` for an integer covector.
    pub fn dot(&self, k: &[u64]) -> u64 {
        self.0.iter().zip(k).map(|(&e, &w)| u64::from(e) * w).sum()
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.0.iter().map(|&e| BigRational::from_integer(e.into())).collect()
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(v: Vec<u32>) -> Self {
        ExponentVector(v)
    }
}

/// Weights `a` with `sum_j a_j i_j = degree` on every support point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiWeights {
    pub weights: Vec<u64>,
    pub degree: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<ExponentVector, BigInt>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: impl Into<BigInt>) -> Self {
        Polynomial::from_terms(n, [(ExponentVector::zero(n), c.into())])
    }

    /// Builds a polynomial, merging repeated exponents and dropping zeros.
    ///
    /// Panics if an exponent vector does not have length `n`.
    pub fn from_terms<I>(n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (ExponentVector, BigInt)>,
    {
        let mut map: BTreeMap<ExponentVector, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent vector length");
            *map.entry(e).or_insert_with(BigInt::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Polynomial { n, terms: map }
    }

    /// Shorthand for tests and examples: `(&[2, 0], 1)` pairs.
    pub fn from_int_terms(n: usize, terms: &[(&[u32], i64)]) -> Self {
        Polynomial::from_terms(n, terms.iter().map(|(e, c)| (ExponentVector(e.to_vec()), BigInt::from(*c))))
    }

    pub fn parse(text: &str, n: usize) -> Result<Self> {
        Parser { src: text.as_bytes(), pos: 0, n }.parse()
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &ExponentVector) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> BTreeSet<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&ExponentVector::zero(self.n))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(ExponentVector::is_origin)
    }

    /// `f - f(0)`.
    pub fn without_constant_term(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&ExponentVector::zero(self.n));
        out
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(ExponentVector::total_degree);
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|e| e == d),
        }
    }

    pub fn max_exponents(&self) -> Vec<u32> {
        let mut out = vec![0; self.n];
        for e in self.terms.keys() {
            for (m, &v) in out.iter_mut().zip(&e.0) {
                *m = (*m).max(v);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Polynomial::from_terms(self.n, self.terms.iter().map(|(e, v)| (e.clone(), v * c)))
    }

    /// The partial derivative with respect to variable `j` (0-based).
    pub fn partial(&self, j: usize) -> Self {
        assert!(j < self.n, "variable index");
        Polynomial::from_terms(
            self.n,
            self.terms.iter().filter(|(e, _)| e.0[j] > 0).map(|(e, c)| {
                let mut d = e.clone();
                d.0[j] -= 1;
                (d, c * BigInt::from(e.0[j]))
            }),
        )
    }

    pub fn partial_derivatives(&self) -> Vec<Polynomial> {
        (0..self.n).map(|j| self.partial(j)).collect()
    }

    /// `f_I`: keeps exactly the terms whose exponent is in `points`.
    pub fn restrict_to(&self, points: &BTreeSet<ExponentVector>) -> Self {
        Polynomial {
            n: self.n,
            terms: self.terms.iter().filter(|(e, _)| points.contains(*e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// `f(x_1, .., x_var * y, .., x_n)` with `y` appended as a new last variable.
    pub fn substitute_torus(&self, var: usize) -> Result<Self> {
        if var >= self.n {
            return Err(Error::IndexOutOfRange { index: var + 1, n: self.n });
        }
        Ok(Polynomial::from_terms(
            self.n + 1,
            self.terms.iter().map(|(e, c)| {
                let mut v = e.0.clone();
                v.push(e.0[var]);
                (ExponentVector(v), c.clone())
            }),
        ))
    }

    /// The same polynomial regarded in `extra` more (unused) variables.
    pub fn with_extra_vars(&self, extra: usize) -> Self {
        Polynomial::from_terms(
            self.n + extra,
            self.terms.iter().map(|(e, c)| {
                let mut v = e.0.clone();
                v.resize(self.n + extra, 0);
                (ExponentVector(v), c.clone())
            }),
        )
    }

    /// `f(0, x_2, .., x_n)` in the remaining `n - 1` variables.
    pub fn drop_first_variable_at_zero(&self) -> Self {
        assert!(self.n >= 1);
        Polynomial::from_terms(
            self.n - 1,
            self.terms.iter().filter(|(e, _)| e.0[0] == 0).map(|(e, c)| (ExponentVector(e.0[1..].to_vec()), c.clone())),
        )
    }

    /// Terms `a_i x_i` of total degree one.
    pub fn linear_terms(&self) -> Vec<(usize, BigInt)> {
        self.terms
            .iter()
            .filter(|(e, _)| e.total_degree() == 1)
            .map(|(e, c)| (e.0.iter().position(|&v| v == 1).expect("degree one"), c.clone()))
            .collect()
    }

    pub fn evaluate(&self, x: &[BigInt]) -> BigInt {
        assert_eq!(x.len(), self.n);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.0.iter().zip(x).fold(c.clone(), |acc, (&k, v)| acc * num_traits::pow(v.clone(), k as usize))
            })
            .sum()
    }

    /// `f(x) mod modulus` with every intermediate reduced.
    pub fn evaluate_mod(&self, x: &[u64], modulus: u64) -> u64 {
        ModularPolynomial::new(self, modulus).evaluate(x)
    }

    /// Weights making `f(x_1^{a_1}, .., x_n^{a_n})` homogeneous.
    ///
    /// The weights are the vertex the exact simplex reaches when minimizing
    /// `d + sum a_j` under `a_j >= 1`; variables that do not occur get weight
    /// one before the solution is scaled to primitive integers.
    pub fn quasi_weights(&self) -> Result<QuasiWeights> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.is_constant() {
            return Err(Error::ConstantPolynomial);
        }
        let n = self.n;
        let mut lp = RationalLp::new(n + 1).minimize_int(&vec![1; n + 1]);
        for j in 0..n {
            let mut row = vec![0; n + 1];
            row[j] = 1;
            lp.constrain_int(&row, Relation::Ge, 1);
        }
        for e in self.terms.keys() {
            let mut row: Vec<i64> = e.0.iter().map(|&v| i64::from(v)).collect();
            row.push(-1);
            lp.constrain_int(&row, Relation::Eq, 0);
        }
        let sol = lp.solve().optimal().ok_or(Error::NotQuasiHomogeneous)?;
        let lcm = sol.x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let ints: Vec<BigInt> = sol.x.iter().map(|v| (v * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let ints: Vec<u64> = ints.iter().map(|v| (v / &g).to_u64().expect("weight fits in u64")).collect();
        let degree = ints[n];
        let weights = ints[..n].to_vec();
        debug_assert!(self.terms.keys().all(|e| e.dot(&weights) == degree));
        Ok(QuasiWeights { weights, degree })
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let abs = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || e.is_origin() {
                factors.push(abs.to_string());
            }
            for (j, &k) in e.0.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(format!("x{}", j + 1)),
                    _ => factors.push(format!("x{}^{}", j + 1, k)),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n, "variable count");
        Polynomial::from_terms(self.n, self.terms.iter().chain(rhs.terms.iter()).map(|(e, c)| (e.clone(), c.clone())))
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&BigInt::from(-1))
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

/// A polynomial with coefficients reduced modulo `modulus < 2^32`, for fast
/// repeated evaluation.
#[derive(Debug, Clone)]
pub struct ModularPolynomial {
    modulus: u64,
    n: usize,
    terms: Vec<(Vec<u32>, u64)>,
    max_exp: Vec<u32>,
}

impl ModularPolynomial {
    pub fn new(f: &Polynomial, modulus: u64) -> Self {
        assert!(modulus >= 1 && modulus <= u64::from(u32::MAX), "modulus out of range");
        let m = BigInt::from(modulus);
        let terms = f
            .terms()
            .map(|(e, c)| (e.0.clone(), c.mod_floor(&m).to_u64().expect("reduced")))
            .filter(|(_, c)| *c != 0)
            .collect();
        ModularPolynomial { modulus, n: f.num_vars(), terms, max_exp: f.max_exponents() }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Power tables for the point `x`, reusable across `evaluate_with`.
    pub fn powers(&self, x: &[u64], table: &mut Vec<Vec<u64>>) {
        table.resize(self.n, Vec::new());
        for (j, row) in table.iter_mut().enumerate() {
            row.clear();
            let base = x[j] % self.modulus;
            let mut acc = 1 % self.modulus;
            row.push(acc);
            for _ in 0..self.max_exp[j] {
                acc = acc * base % self.modulus;
                row.push(acc);
            }
        }
    }

    pub fn evaluate_with(&self, table: &[Vec<u64>]) -> u64 {
        let m = self.modulus;
        let mut total = 0u64;
        for (e, c) in &self.terms {
            let mut v = *c;
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    v = v * table[j][k as usize] % m;
                }
            }
            total += v;
            if total >= m {
                total -= m;
            }
        }
        total
    }

    pub fn evaluate(&self, x: &[u64]) -> u64 {
        assert_eq!(x.len(), self.n);
        let mut table = Vec::new();
        self.powers(x, &mut table);
        self.evaluate_with(&table)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<&str> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn parse(mut self) -> Result<Polynomial> {
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if first => return self.err("empty polynomial"),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                Some(_) if first => 1,
                Some(c) => return self.err(format!("expected '+' or '-', found '{}'", c as char)),
            };
            first = false;
            let (e, c) = self.term()?;
            terms.push((e, c * BigInt::from(sign)));
        }
        Ok(Polynomial::from_terms(self.n, terms))
    }

    fn term(&mut self) -> Result<(ExponentVector, BigInt)> {
        let mut exps = vec![0u32; self.n];
        let mut coeff = BigInt::one();
        loop {
            self.factor(&mut exps, &mut coeff)?;
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((ExponentVector(exps), coeff))
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        match self.digits() {
            Some(d) => match d.parse::<u32>() {
                Ok(v) if v > 0 => Ok(v),
                _ => self.err("exponent must be a positive integer"),
            },
            None => self.err("expected exponent after '^'"),
        }
    }

    fn factor(&mut self, exps: &mut [u32], coeff: &mut BigInt) -> Result<()> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let v: BigInt = self.digits().expect("digit").parse().expect("digits parse");
                let k = self.exponent()?;
                *coeff *= num_traits::pow(v, k as usize);
                Ok(())
            }
            Some(b'x') => {
                let at = self.pos;
                self.pos += 1;
                let n = self.n;
                let index = match self.digits() {
                    Some(d) => d.parse::<usize>().unwrap_or(usize::MAX),
                    None if n == 1 => 1,
                    None => return self.err("expected variable index after 'x'"),
                };
                if index == 0 || index > self.n {
                    self.pos = at;
                    return Err(Error::VariableOutOfRange { index, n: self.n });
                }
                let k = self.exponent()?;
                exps[index - 1] = exps[index - 1].checked_add(k).ok_or(Error::Parse { pos: at, msg: "exponent overflow".into() })?;
                Ok(())
            }
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str, n: usize) -> Polynomial {
        Polynomial::parse(text, n).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("x1^2 + x2^3", 2), Polynomial::from_int_terms(2, &[(&[2, 0], 1), (&[0, 3], 1)]));
        assert!(p("0", 3).is_zero());
        assert_eq!(p("3*x1^2*x2 - x3^4", 3), Polynomial::from_int_terms(3, &[(&[2, 1, 0], 3), (&[0, 0, 4], -1)]));
        assert_eq!(p("x^2", 1), p("x1^2", 1));
        assert_eq!(p("-x1 + 2^3*x1*x1", 1), Polynomial::from_int_terms(1, &[(&[1], -1), (&[2], 8)]));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Polynomial::parse("x3", 2), Err(Error::VariableOutOfRange { index: 3, n: 2 })));
        assert!(matches!(Polynomial::parse("x1 +", 2), Err(Error::Parse { .. })));
        assert!(matches!(Polynomial::parse("x1 x2", 2), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(Polynomial::parse("x1^0", 2), Err(Error::Parse { .. })));
        assert!(matches!(Polynomial::parse("", 2), Err(Error::Parse { .. })));
        assert!(matches!(Polynomial::parse("x", 2), Err(Error::Parse { .. })));
    }

    #[test]
    fn big_coefficients_are_exact() {
        let f = p("123456789012345678901234567890*x1", 1);
        assert_eq!(f.to_string(), "123456789012345678901234567890*x1");
    }

    #[test]
    fn canonical_order_is_lex_descending() {
        assert_eq!(p("x2^3 + x1^2", 2).to_string(), "x1^2 + x2^3");
        assert_eq!(p("5 - x1*x2 + 2*x1^2", 2).to_string(), "2*x1^2 - x1*x2 + 5");
    }

    #[test]
    fn support_examples() {
        assert_eq!(p("x1^2+x2^3", 2).support().len(), 2);
        assert!(p("0", 2).support().is_empty());
        let s = p("x1^2*x2", 2).support();
        assert!(s.contains(&ExponentVector(vec![2, 1])));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("x1^2+x2^3", 2).partial_derivatives(), vec![p("2*x1", 2), p("3*x2^2", 2)]);
        assert!(p("5", 3).partial_derivatives().iter().all(Polynomial::is_zero));
        assert_eq!(p("x1^2*x2", 2).partial_derivatives(), vec![p("2*x1*x2", 2), p("x1^2", 2)]);
    }

    #[test]
    fn quasi_weight_examples() {
        assert_eq!(p("x1^2+x2^3", 2).quasi_weights().unwrap(), QuasiWeights { weights: vec![3, 2], degree: 6 });
        assert_eq!(p("x1^3+x2^3+x1*x2^2", 2).quasi_weights().unwrap(), QuasiWeights { weights: vec![1, 1], degree: 3 });
        assert_eq!(p("x1^2+x1*x2+x2^3", 2).quasi_weights(), Err(Error::NotQuasiHomogeneous));
        assert_eq!(p("x1^2*x2", 2).quasi_weights().unwrap(), QuasiWeights { weights: vec![1, 1], degree: 3 });
        assert_eq!(p("x1^2", 2).quasi_weights().unwrap(), QuasiWeights { weights: vec![1, 1], degree: 2 });
        assert_eq!(p("0", 2).quasi_weights(), Err(Error::ZeroPolynomial));
        assert_eq!(p("7", 2).quasi_weights(), Err(Error::ConstantPolynomial));
        assert_eq!(p("x1+1", 1).quasi_weights(), Err(Error::NotQuasiHomogeneous));
    }

    #[test]
    fn substitute_torus_examples() {
        let f = p("x1^2+x2^3", 2);
        assert_eq!(f.substitute_torus(0).unwrap(), p("x1^2*x3^2 + x2^3", 3));
        assert_eq!(f.substitute_torus(1).unwrap(), p("x1^2 + x2^3*x3^3", 3));
        assert_eq!(p("x1^2*x2", 2).substitute_torus(0).unwrap(), p("x1^2*x2*x3^2", 3));
        assert_eq!(f.substitute_torus(2), Err(Error::IndexOutOfRange { index: 3, n: 2 }));
    }

    #[test]
    fn restrict_examples() {
        let f = p("x1^2+x2^3", 2);
        let vertex: BTreeSet<_> = [ExponentVector(vec![2, 0])].into();
        assert_eq!(f.restrict_to(&vertex), p("x1^2", 2));
        assert_eq!(f.restrict_to(&f.support()), f);
        let g = p("x1^2+x1*x2+x2^3", 2);
        let v: BTreeSet<_> = [ExponentVector(vec![0, 3])].into();
        assert_eq!(g.restrict_to(&v), p("x2^3", 2));
    }

    #[test]
    fn evaluate_mod_examples() {
        assert_eq!(p("x1^2+x2^3", 2).evaluate_mod(&[2, 3], 7), 3);
        assert_eq!(p("0", 2).evaluate_mod(&[4, 1], 5), 0);
        assert_eq!(p("x1^2*x2", 2).evaluate_mod(&[3, 4], 25), 11);
        assert_eq!(p("-x1", 1).evaluate_mod(&[1], 5), 4);
    }

    #[test]
    fn linear_terms_and_constant() {
        let f = p("3*x2 + x1^2 + 4", 2);
        assert_eq!(f.linear_terms(), vec![(1, BigInt::from(3))]);
        assert_eq!(f.constant_term(), BigInt::from(4));
        assert_eq!(f.without_constant_term(), p("3*x2 + x1^2", 2));
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec((proptest::collection::vec(0u32..4, n), -20i64..21), 0..6).prop_map(move |ts| {
            Polynomial::from_terms(n, ts.into_iter().map(|(e, c)| (ExponentVector(e), BigInt::from(c))))
        })
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(f in arb_poly(3)) {
            prop_assert_eq!(Polynomial::parse(&f.to_string(), 3).unwrap(), f);
        }

        #[test]
        fn derivative_is_additive(f in arb_poly(3), g in arb_poly(3)) {
            let lhs = (&f + &g).partial_derivatives();
            let rhs: Vec<_> = f.partial_derivatives().iter().zip(g.partial_derivatives()).map(|(a, b)| a + &b).collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn quasi_weights_are_sound(f in arb_poly(3)) {
            if let Ok(w) = f.quasi_weights() {
                prop_assert!(w.weights.iter().all(|&a| a > 0));
                for e in f.support() {
                    prop_assert_eq!(e.dot(&w.weights), w.degree);
                }
            }
        }

        #[test]
        fn substitute_torus_keeps_coefficients(f in arb_poly(3), var in 0usize..3) {
            let g = f.substitute_torus(var).unwrap();
            prop_assert_eq!(g.num_terms(), f.num_terms());
            let mut a: Vec<_> = f.terms().map(|(_, c)| c.clone()).collect();
            let mut b: Vec<_> = g.terms().map(|(_, c)| c.clone()).collect();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
            for (e, _) in g.terms() {
                prop_assert_eq!(e.0[3], e.0[var]);
            }
        }

        #[test]
        fn evaluate_mod_matches_exact(f in arb_poly(3), x in proptest::collection::vec(0u64..50, 3), m in 2u64..200) {
            let exact = f.evaluate(&x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>());
            let expected = exact.mod_floor(&BigInt::from(m)).to_u64().unwrap();
            prop_assert_eq!(f.evaluate_mod(&x, m), expected);
        }
    }
}
