//! Exact rational enclosures and outward-rounded floating intervals.

use std::ops::{Add, Mul};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::arith::{rational_string, to_f64};

/// `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "empty interval");
        RationalInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RationalInterval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Smallest floating interval containing this one.
    pub fn to_interval(&self) -> Interval {
        Interval { lo: round_down(&self.lo), hi: round_up(&self.hi) }
    }
}

impl Serialize for RationalInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RationalInterval", 4)?;
        st.serialize_field("lo", &rational_string(&self.lo))?;
        st.serialize_field("hi", &rational_string(&self.hi))?;
        st.serialize_field("lo_f64", &to_f64(&self.lo))?;
        st.serialize_field("hi_f64", &to_f64(&self.hi))?;
        st.end()
    }
}

/// Largest `f64` not above `r`.
pub fn round_down(r: &BigRational) -> f64 {
    let mut x = to_f64(r);
    while BigRational::from_float(x).is_some_and(|v| &v > r) {
        x = x.next_down();
    }
    x
}

/// Smallest `f64` not below `r`.
pub fn round_up(r: &BigRational) -> f64 {
    let mut x = to_f64(r);
    while BigRational::from_float(x).is_some_and(|v| &v < r) {
        x = x.next_up();
    }
    x
}

/// Closed floating interval; every operation rounds outward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// `[c - e, c + e]`, rounded outward.
    pub fn around(c: f64, e: f64) -> Self {
        Interval { lo: (c - e).next_down(), hi: (c + e).next_up() }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn inflate(&self, e: f64) -> Self {
        Interval { lo: (self.lo - e).next_down(), hi: (self.hi + e).next_up() }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval { lo: (self.lo + o.lo).next_down(), hi: (self.hi + o.hi).next_up() }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo: lo.next_down(), hi: hi.next_up() }
    }
}

/// Rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexBox {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexBox {
    pub fn zero() -> Self {
        ComplexBox { re: Interval::point(0.0), im: Interval::point(0.0) }
    }

    pub fn around(re: f64, im: f64, err: f64) -> Self {
        ComplexBox { re: Interval::around(re, err), im: Interval::around(im, err) }
    }

    pub fn scale(&self, x: Interval) -> Self {
        ComplexBox { re: self.re * x, im: self.im * x }
    }

    pub fn inflate(&self, e: f64) -> Self {
        ComplexBox { re: self.re.inflate(e), im: self.im.inflate(e) }
    }

    pub fn contains(&self, re: f64, im: f64) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn mid(&self) -> (f64, f64) {
        (self.re.mid(), self.im.mid())
    }

    /// Upper bound for `|z|` over the box.
    pub fn mag(&self) -> f64 {
        self.re.mag().hypot(self.im.mag()).next_up()
    }
}

impl Add for ComplexBox {
    type Output = ComplexBox;
    fn add(self, o: ComplexBox) -> ComplexBox {
        ComplexBox { re: self.re + o.re, im: self.im + o.im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn directed_rounding() {
        let third = q(1, 3);
        let (lo, hi) = (round_down(&third), round_up(&third));
        assert!(lo < hi);
        assert!(BigRational::from_float(lo).unwrap() < third);
        assert!(BigRational::from_float(hi).unwrap() > third);
        assert_eq!(round_down(&q(1, 4)), 0.25);
        assert_eq!(round_up(&q(1, 4)), 0.25);
    }

    #[test]
    fn rational_interval_width() {
        let r = RationalInterval::new(q(1, 4), q(1, 3));
        assert_eq!(r.width(), q(1, 12));
        assert!(r.contains(&q(3, 10)));
        assert!(!r.contains(&q(1, 2)));
        let f = r.to_interval();
        assert!(f.contains(0.25) && f.contains(0.3));
    }

    proptest! {
        #[test]
        fn products_enclose(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
            let x = RationalInterval::point(q(a, b));
            let y = RationalInterval::point(q(c, d));
            let prod = x.to_interval() * y.to_interval();
            let exact = q(a, b) * q(c, d);
            prop_assert!(BigRational::from_float(prod.lo).unwrap() <= exact);
            prop_assert!(BigRational::from_float(prod.hi).unwrap() >= exact);
            let sum = x.to_interval() + y.to_interval();
            let exact = q(a, b) + q(c, d);
            prop_assert!(BigRational::from_float(sum.lo).unwrap() <= exact);
            prop_assert!(BigRational::from_float(sum.hi).unwrap() >= exact);
        }
    }
}
