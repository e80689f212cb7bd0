use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use thiserror::Error;

use super::int::Int;

/// An exact rational number, always kept in lowest terms with a positive
/// denominator. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: Int,
    den: Int,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer in rational literal `{0}`")]
    BadInteger(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Rational {
    pub const ZERO: Rational = Rational {
        num: Int::ZERO,
        den: Int::ONE,
    };
    pub const ONE: Rational = Rational {
        num: Int::ONE,
        den: Int::ONE,
    };

    /// Builds `num/den` in lowest terms. Panics on a zero denominator.
    pub fn new(num: impl Into<Int>, den: impl Into<Int>) -> Rational {
        Rational::reduce(num.into(), den.into())
    }

    pub fn from_int(v: impl Into<Int>) -> Rational {
        Rational {
            num: v.into(),
            den: Int::ONE,
        }
    }

    fn reduce(num: Int, den: Int) -> Rational {
        assert!(!den.is_zero(), "rational with zero denominator");
        if num.is_zero() {
            return Rational::ZERO;
        }
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        if den.is_one() {
            return Rational { num, den };
        }
        let g = num.gcd(&den);
        if g.is_one() {
            Rational { num, den }
        } else {
            Rational {
                num: num.div_exact(&g),
                den: den.div_exact(&g),
            }
        }
    }

    pub fn numer(&self) -> &Int {
        &self.num
    }

    pub fn denom(&self) -> &Int {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn signum(&self) -> i32 {
        self.num.signum()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Rational {
        Rational {
            num: self.num.abs(),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Rational {
        Rational::reduce(self.den.clone(), self.num.clone())
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64() / self.den.to_f64()
    }

    /// Decimal expansion truncated (toward zero) to `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = Int::from(10).pow(digits as u32);
        let scaled = &(&self.num.abs() * &scale) / &self.den;
        let s = scaled.to_string();
        let s = format!("{:0>width$}", s, width = digits + 1);
        let (int_part, frac_part) = s.split_at(s.len() - digits);
        let sign = if self.is_negative() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    pub fn min(self, other: Rational) -> Rational {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(v)
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Rational::from_int(v)
    }
}

impl From<usize> for Rational {
    fn from(v: usize) -> Self {
        Rational::from_int(v)
    }
}

impl From<Int> for Rational {
    fn from(v: Int) -> Self {
        Rational::from_int(v)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        let s = self.num.signum().cmp(&other.num.signum());
        if s != Ordering::Equal {
            return s;
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p`, `-p` and `p/q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let parse = |t: &str| -> Result<Int, ParseRationalError> {
            let t = t.trim();
            if t.is_empty() || t.starts_with('+') && t.len() == 1 {
                return Err(ParseRationalError::BadInteger(s.to_string()));
            }
            t.parse::<Int>()
                .map_err(|_| ParseRationalError::BadInteger(s.to_string()))
        };
        match s.split_once('/') {
            None => Ok(Rational::from_int(parse(s)?)),
            Some((n, d)) => {
                let n = parse(n)?;
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(ParseRationalError::ZeroDenominator(s.to_string()));
                }
                Ok(Rational::reduce(n, d))
            }
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

fn add_impl(a: &Rational, b: &Rational, negate_b: bool) -> Rational {
    if b.num.is_zero() {
        return a.clone();
    }
    let bn = if negate_b { -&b.num } else { b.num.clone() };
    if a.num.is_zero() {
        return Rational {
            num: bn,
            den: b.den.clone(),
        };
    }
    if a.den == b.den {
        if a.den.is_one() {
            return Rational {
                num: &a.num + &bn,
                den: Int::ONE,
            };
        }
        return Rational::reduce(&a.num + &bn, a.den.clone());
    }
    if a.den.is_one() {
        return Rational {
            num: &(&a.num * &b.den) + &bn,
            den: b.den.clone(),
        };
    }
    if b.den.is_one() {
        return Rational {
            num: &a.num + &(&bn * &a.den),
            den: a.den.clone(),
        };
    }
    Rational::reduce(&(&a.num * &b.den) + &(&bn * &a.den), &a.den * &b.den)
}

fn mul_impl(a: &Rational, b: &Rational) -> Rational {
    if a.num.is_zero() || b.num.is_zero() {
        return Rational::ZERO;
    }
    if a.den.is_one() && b.den.is_one() {
        return Rational {
            num: &a.num * &b.num,
            den: Int::ONE,
        };
    }
    // Cross-cancel before multiplying to keep intermediates small.
    let g1 = a.num.gcd(&b.den);
    let g2 = b.num.gcd(&a.den);
    let num = &a.num.div_exact(&g1) * &b.num.div_exact(&g2);
    let den = &a.den.div_exact(&g2) * &b.den.div_exact(&g1);
    Rational { num, den }
}

fn div_impl(a: &Rational, b: &Rational) -> Rational {
    assert!(!b.is_zero(), "division by zero rational");
    if a.num.is_zero() {
        return Rational::ZERO;
    }
    let inv = if b.num.is_negative() {
        Rational {
            num: -&b.den,
            den: -&b.num,
        }
    } else {
        Rational {
            num: b.den.clone(),
            den: b.num.clone(),
        }
    };
    mul_impl(a, &inv)
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                let f: fn(&Rational, &Rational) -> Rational = $body;
                f(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
    };
}

rat_binop!(Add, add, |a, b| add_impl(a, b, false));
rat_binop!(Sub, sub, |a, b| add_impl(a, b, true));
rat_binop!(Mul, mul, mul_impl);
rat_binop!(Div, div, div_impl);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, rhs, false);
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = add_impl(self, &rhs, false);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, rhs, true);
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = mul_impl(self, rhs);
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

/// Shorthand for building rationals in tests and fixtures.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowest_terms() {
        let r = Rational::new(6, -8);
        assert_eq!(r.numer(), &Int::from(-3));
        assert_eq!(r.denom(), &Int::from(4));
        assert_eq!(Rational::new(0, -5), Rational::ZERO);
        assert_eq!(Rational::ZERO.denom(), &Int::ONE);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("3/6".parse::<Rational>().unwrap().to_string(), "1/2");
        assert_eq!("-4".parse::<Rational>().unwrap(), Rational::from(-4));
        assert_eq!("2/-4".parse::<Rational>().unwrap(), q(-1, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert!("a/2".parse::<Rational>().is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(q(4, 3).to_decimal(4), "1.3333");
        assert_eq!(q(-1, 8).to_decimal(3), "-0.125");
        assert_eq!(q(5, 1).to_decimal(2), "5.00");
    }

    #[test]
    fn big_values_stay_exact() {
        let mut acc = Rational::ONE;
        for k in 1..40i64 {
            acc = &acc * &q(k * 1_000_003, 7);
        }
        for k in 1..40i64 {
            acc = &acc / &q(k * 1_000_003, 7);
        }
        assert_eq!(acc, Rational::ONE);
    }

    proptest! {
        #[test]
        fn field_identities(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let x = q(a, b);
            let y = q(c, d);
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            if !y.is_zero() {
                prop_assert_eq!(&(&x * &y) / &y, x.clone());
            }
            prop_assert_eq!(x.cmp(&y), (a * d).cmp(&(c * b)));
        }
    }
}
