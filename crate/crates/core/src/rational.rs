//! Exact rational numbers.
//!
//! Values that fit in a reduced `i64 / i64` fraction are kept inline; anything
//! larger spills to a boxed [`BigRational`]. The representation is canonical
//! (a value is `Big` only if it does not fit `Small`), so structural equality
//! and hashing agree with numeric equality.

use alloc::boxed::Box;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Error;

/// Exact arbitrary-precision fraction, always in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// `num / den` with `den > 0`, `gcd(num, den) = 1` and `num != i64::MIN`.
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            core::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        return gcd_u64(a as u64, b as u64) as u128;
    }
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            core::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[inline]
fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Rational {
    pub const ZERO: Rational = Rational(Repr::Small(0, 1));
    pub const ONE: Rational = Rational(Repr::Small(1, 1));

    pub fn zero() -> Self {
        Self::ZERO
    }

    pub fn one() -> Self {
        Self::ONE
    }

    /// A half, the only fractional value a half-integer point takes.
    pub fn half() -> Self {
        Rational(Repr::Small(1, 2))
    }

    pub fn from_integer(v: i64) -> Self {
        if v == i64::MIN {
            return Self::from_big(BigRational::from_integer(BigInt::from(v)));
        }
        Rational(Repr::Small(v, 1))
    }

    /// Builds `num / den`, reducing to lowest terms.
    ///
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self::from_big(BigRational::new(num, den))
    }

    fn from_i128(mut n: i128, mut d: i128) -> Self {
        debug_assert!(d != 0);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        Self::from_reduced_i128(n, d)
    }

    #[inline]
    fn from_reduced_i128(n: i128, d: i128) -> Self {
        if fits(n) && fits(d) {
            Rational(Repr::Small(n as i64, d as i64))
        } else {
            Rational(Repr::Big(Box::new(BigRational::new_raw(
                BigInt::from(n),
                BigInt::from(d),
            ))))
        }
    }

    /// Wraps an already reduced big rational, demoting it when it fits.
    fn from_big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Rational(Repr::Small(n, d));
            }
        }
        Rational(Repr::Big(Box::new(r)))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    /// Numerator and denominator when both fit in `i64`.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match self.0 {
            Repr::Small(n, d) => Some((n, d)),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(b) => {
                if b.is_negative() {
                    -1
                } else if b.is_zero() {
                    0
                } else {
                    1
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => {
                assert!(*n != 0, "reciprocal of zero");
                if *n < 0 {
                    Rational(Repr::Small(-*d, -*n))
                } else {
                    Rational(Repr::Small(*d, *n))
                }
            }
            Repr::Big(b) => Self::from_big(b.recip()),
        }
    }

    /// Nearest `f64`, for heuristics only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// `self -= a * b`, the inner update of every elimination step.
    #[inline]
    pub fn sub_mul(&mut self, a: &Rational, b: &Rational) {
        if let (Repr::Small(an, ad), Repr::Small(bn, bd), Repr::Small(sn, sd)) = (&a.0, &b.0, &self.0) {
            if *an == 0 || *bn == 0 {
                return;
            }
            let g1 = gcd_u64(an.unsigned_abs(), *bd as u64) as i64;
            let g2 = gcd_u64(bn.unsigned_abs(), *ad as u64) as i64;
            if let (Some(pn), Some(pd)) = ((*an / g1).checked_mul(*bn / g2), (*ad / g2).checked_mul(*bd / g1)) {
                if pn != i64::MIN {
                    *self = add_small(*sn, *sd, -pn, pd);
                    return;
                }
            }
        }
        let prod = a * b;
        *self -= &prod;
    }

    /// Decimal rendering with `digits` fractional digits, rounded half away
    /// from zero. Computed exactly by integer division.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        use alloc::format;
        let num = self.numer();
        let den = self.denom();
        let neg = num.is_negative();
        let scale = num_traits::pow(BigInt::from(10u32), digits);
        let scaled = num.abs() * &scale * 2u32 + &den;
        let rounded = scaled / (den * 2u32);
        let (int_part, frac_part) = rounded.div_rem(&scale);
        let sign = if neg && !rounded.is_zero() { "-" } else { "" };
        if digits == 0 {
            return format!("{sign}{int_part}");
        }
        let frac = format!("{frac_part}");
        let pad = digits - frac.len();
        format!("{sign}{int_part}.{}{frac}", "0".repeat(pad))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Self::from_integer(v as i64)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Self::from_big(r)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(v))
    }
}

/// `an/ad + bn/bd` for reduced small operands, reducing with gcds of the
/// denominators only.
#[inline]
fn add_small(an: i64, ad: i64, bn: i64, bd: i64) -> Rational {
    if ad == bd {
        if ad == 1 {
            if let Some(s) = an.checked_add(bn) {
                if s != i64::MIN {
                    return Rational(Repr::Small(s, 1));
                }
            }
        }
        if let Some(n) = an.checked_add(bn) {
            let g = gcd_u64(n.unsigned_abs(), ad as u64) as i64;
            if n != i64::MIN {
                return Rational(Repr::Small(n / g, ad / g));
            }
        }
        return Rational::from_i128(an as i128 + bn as i128, ad as i128);
    }
    let g = gcd_u64(ad as u64, bd as u64) as i64;
    if g == 1 {
        let n = an.checked_mul(bd).zip(bn.checked_mul(ad)).and_then(|(x, y)| x.checked_add(y));
        if let (Some(n), Some(d)) = (n, ad.checked_mul(bd)) {
            if n != i64::MIN {
                return Rational(Repr::Small(n, d));
            }
        }
        let (an, ad, bn, bd) = (an as i128, ad as i128, bn as i128, bd as i128);
        return Rational::from_reduced_i128(an * bd + bn * ad, ad * bd);
    }
    let (adg, bdg) = (ad / g, bd / g);
    let t = an.checked_mul(bdg).zip(bn.checked_mul(adg)).and_then(|(x, y)| x.checked_add(y));
    if let Some(t) = t {
        let g2 = gcd_u64(t.unsigned_abs() % g as u64, g as u64) as i64;
        if let Some(d) = adg.checked_mul(bd / g2) {
            if t != i64::MIN {
                return Rational(Repr::Small(t / g2, d));
            }
        }
    }
    let (an, bn, g) = (an as i128, bn as i128, g as i128);
    let t = an * bdg as i128 + bn * adg as i128;
    let g2 = gcd_u128(t.unsigned_abs() % g as u128, g as u128) as i128;
    Rational::from_reduced_i128(t / g2, adg as i128 * (bd as i128 / g2))
}

fn add_ref(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(an, ad), Repr::Small(bn, bd)) => add_small(*an, *ad, *bn, *bd),
        _ => Rational::from_big(a.to_big() + b.to_big()),
    }
}

fn mul_ref(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
            if *an == 0 || *bn == 0 {
                return Rational::ZERO;
            }
            let g1 = gcd_u64(an.unsigned_abs(), *bd as u64) as i64;
            let g2 = gcd_u64(bn.unsigned_abs(), *ad as u64) as i64;
            let n = (*an / g1) as i128 * (*bn / g2) as i128;
            let d = (*ad / g2) as i128 * (*bd / g1) as i128;
            Rational::from_reduced_i128(n, d)
        }
        _ => Rational::from_big(a.to_big() * b.to_big()),
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-*n, *d)),
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl Add<&Rational> for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        add_ref(self, rhs)
    }
}

impl Sub<&Rational> for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        add_ref(self, &-rhs)
    }
}

impl Mul<&Rational> for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        mul_ref(self, rhs)
    }
}

impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        mul_ref(self, &rhs.recip())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

macro_rules! assign_op {
    ($tr:ident, $method:ident, $op:ident) => {
        impl $tr<&Rational> for Rational {
            fn $method(&mut self, rhs: &Rational) {
                *self = (&*self).$op(rhs);
            }
        }
        impl $tr<Rational> for Rational {
            fn $method(&mut self, rhs: Rational) {
                *self = (&*self).$op(&rhs);
            }
        }
    };
}

assign_op!(AddAssign, add_assign, add);
assign_op!(SubAssign, sub_assign, sub);
assign_op!(MulAssign, mul_assign, mul);
assign_op!(DivAssign, div_assign, div);

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        let mut acc = Rational::ZERO;
        for v in iter {
            acc += v;
        }
        acc
    }
}

impl Sum<Rational> for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        let mut acc = Rational::ZERO;
        for v in iter {
            acc += &v;
        }
        acc
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                if ad == bd {
                    an.cmp(bn)
                } else {
                    (*an as i128 * *bd as i128).cmp(&(*bn as i128 * *ad as i128))
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Parses `p`, `-p`, `p/q` or `-p/q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Parse(alloc::format!("invalid rational `{s}`"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Rational::from_bigints(num, den))
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl One for Rational {
    fn one() -> Self {
        Self::ONE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn reduces_and_normalizes_sign() {
        assert_eq!(r(6, -4), r(-3, 2));
        assert_eq!(r(6, -4).to_string(), "-3/2");
        assert_eq!(r(0, -7), Rational::zero());
        assert_eq!(r(10, 5).to_string(), "2");
    }

    #[test]
    fn overflow_spills_to_big_and_back() {
        let big = Rational::from_integer(i64::MAX);
        let sum = &big + &big;
        assert!(sum.as_small().is_none());
        assert_eq!(sum.to_string(), "18446744073709551614");
        let back = &sum - &big;
        assert_eq!(back.as_small(), Some((i64::MAX, 1)));
        let tiny = r(1, i64::MAX);
        let sq = &tiny * &tiny;
        assert!(sq.as_small().is_none());
        assert_eq!(&sq * &Rational::from_integer(i64::MAX), tiny);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("56/39".parse::<Rational>().unwrap(), r(56, 39));
        assert_eq!("-4".parse::<Rational>().unwrap(), r(-4, 1));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(r(56, 39).to_decimal_string(5), "1.43590");
        assert_eq!(r(4, 3).to_decimal_string(5), "1.33333");
        assert_eq!(r(11, 8).to_decimal_string(3), "1.375");
        assert_eq!(r(-1, 3).to_decimal_string(2), "-0.33");
        assert_eq!(r(7, 5).to_decimal_string(0), "1");
    }

    #[test]
    fn sub_mul_matches_plain_ops() {
        let mut a = r(3, 1);
        a.sub_mul(&r(2, 1), &r(5, 1));
        assert_eq!(a, r(-7, 1));
        let mut b = r(1, 3);
        b.sub_mul(&r(1, 2), &r(2, 3));
        assert_eq!(b, Rational::zero());
    }

    fn arb_rational() -> impl Strategy<Value = (i64, i64)> {
        prop_oneof![
            (-50i64..50, 1i64..20),
            (any::<i64>(), 1i64..i64::MAX),
            (-(1i64 << 40)..(1i64 << 40), 1i64..(1i64 << 40)),
        ]
        .prop_filter("no MIN", |(n, _)| *n != i64::MIN)
    }

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    proptest! {
        #[test]
        fn arithmetic_agrees_with_bigrational((an, ad) in arb_rational(), (bn, bd) in arb_rational()) {
            let (a, b) = (r(an, ad), r(bn, bd));
            let (ba, bb) = (big(an, ad), big(bn, bd));
            prop_assert_eq!((&a + &b).to_big(), &ba + &bb);
            prop_assert_eq!((&a - &b).to_big(), &ba - &bb);
            prop_assert_eq!((&a * &b).to_big(), &ba * &bb);
            if bn != 0 {
                prop_assert_eq!((&a / &b).to_big(), &ba / &bb);
            }
            prop_assert_eq!(a.cmp(&b), ba.cmp(&bb));
            let mut c = a.clone();
            c.sub_mul(&b, &b);
            prop_assert_eq!(c.to_big(), &ba - &bb * &bb);
        }

        #[test]
        fn canonical_repr_means_structural_eq((an, ad) in arb_rational(), (bn, bd) in arb_rational()) {
            let a = r(an, ad);
            let b = r(bn, bd);
            let round = &(&a + &b) - &b;
            prop_assert_eq!(&round, &a);
            prop_assert_eq!(round.as_small().is_some(), a.as_small().is_some());
        }
    }
}
