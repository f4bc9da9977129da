//! Rational functions of `q`, kept in a reduced canonical form.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigRational, One, Zero};
use serde::Serialize;

use super::laurent::{exact_point, rat_to_f64, LaurentQ};
use crate::error::{Error, Result};

/// `num / den` with `gcd(num, den) = 1`, `den` monic with lowest exponent 0.
///
/// With this normalization two values are equal iff their fields are.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RatQ {
    num: LaurentQ,
    den: LaurentQ,
}

impl RatQ {
    pub fn new(num: LaurentQ, den: LaurentQ) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Self::reduce(num, den))
    }

    pub fn zero() -> Self {
        RatQ { num: LaurentQ::zero(), den: LaurentQ::one() }
    }

    pub fn one() -> Self {
        RatQ { num: LaurentQ::one(), den: LaurentQ::one() }
    }

    pub fn from_int(c: i64) -> Self {
        LaurentQ::from_int(c).into()
    }

    pub fn from_rational(c: BigRational) -> Self {
        LaurentQ::constant(c).into()
    }

    pub fn num(&self) -> &LaurentQ {
        &self.num
    }

    pub fn den(&self) -> &LaurentQ {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The Laurent polynomial this equals, if the denominator is trivial.
    pub fn as_laurent(&self) -> Option<&LaurentQ> {
        self.den.is_one().then_some(&self.num)
    }

    fn reduce(num: LaurentQ, den: LaurentQ) -> Self {
        if num.is_zero() {
            return RatQ::zero();
        }
        let (num, den) = if den.as_monomial().is_some() {
            (num, den)
        } else {
            let g = LaurentQ::gcd(&num, &den);
            if g.as_monomial().is_some() {
                (num, den)
            } else {
                (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
            }
        };
        let (den_n, lc, lo) = den.normalize_unit();
        let num = num.shift(-lo).scale(&lc.recip());
        RatQ { num, den: den_n }
    }

    pub fn recip(&self) -> Result<RatQ> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("reciprocal of zero".into()));
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn bar(&self) -> RatQ {
        Self::reduce(self.num.bar(), self.den.bar())
    }

    pub fn pow(&self, n: u32) -> RatQ {
        // gcd(num, den) = 1 is preserved by powers.
        RatQ { num: self.num.pow(n), den: self.den.pow(n) }
    }

    pub fn powi(&self, n: i32) -> Result<RatQ> {
        if n >= 0 {
            Ok(self.pow(n as u32))
        } else {
            Ok(self.recip()?.pow(n.unsigned_abs()))
        }
    }

    pub fn eval_exact(&self, q: &BigRational) -> Result<BigRational> {
        let d = self.den.eval_exact(q);
        if d.is_zero() {
            return Err(Error::Pole(rat_to_f64(q)));
        }
        Ok(self.num.eval_exact(q) / d)
    }

    pub fn eval_at(&self, q0: f64) -> Result<f64> {
        let q = exact_point(q0)?;
        Ok(rat_to_f64(&self.eval_exact(&q).map_err(|_| Error::Pole(q0))?))
    }

    pub fn eval_f64(&self, q0: f64) -> f64 {
        self.num.eval_f64(q0) / self.den.eval_f64(q0)
    }

    /// Least common multiple of the denominators, as a Laurent polynomial.
    pub fn common_denominator<'a, I: IntoIterator<Item = &'a RatQ>>(items: I) -> LaurentQ {
        let mut l = LaurentQ::one();
        for x in items {
            if x.den.is_one() {
                continue;
            }
            let g = LaurentQ::gcd(&l, &x.den);
            l = (&l * &x.den).div_exact(&g).expect("gcd divides");
        }
        l
    }

    /// `self * m` as a Laurent polynomial; `m` must be a multiple of the
    /// denominator.
    pub fn times_laurent(&self, m: &LaurentQ) -> Result<LaurentQ> {
        let k = m.div_exact_or_err(&self.den)?;
        Ok(&self.num * &k)
    }
}

impl From<LaurentQ> for RatQ {
    fn from(p: LaurentQ) -> Self {
        RatQ { num: p, den: LaurentQ::one() }
    }
}

impl fmt::Display for RatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatQ({self})")
    }
}

impl<'a> Add<&'a RatQ> for &'a RatQ {
    type Output = RatQ;
    fn add(self, rhs: &RatQ) -> RatQ {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatQ::reduce(&self.num + &rhs.num, self.den.clone());
        }
        RatQ::reduce(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a RatQ> for &'a RatQ {
    type Output = RatQ;
    fn sub(self, rhs: &RatQ) -> RatQ {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RatQ> for &'a RatQ {
    type Output = RatQ;
    fn mul(self, rhs: &RatQ) -> RatQ {
        if self.is_zero() || rhs.is_zero() {
            return RatQ::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatQ { num: &self.num * &rhs.num, den: LaurentQ::one() };
        }
        RatQ::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<'a> Div<&'a RatQ> for &'a RatQ {
    type Output = RatQ;
    /// Panics on division by zero; use [`RatQ::recip`] for a fallible form.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &RatQ) -> RatQ {
        self * &rhs.recip().expect("division by zero RatQ")
    }
}

impl Neg for &RatQ {
    type Output = RatQ;
    fn neg(self) -> RatQ {
        RatQ { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatQ {
    type Output = RatQ;
    fn neg(self) -> RatQ {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RatQ> for RatQ {
            type Output = RatQ;
            fn $m(self, rhs: RatQ) -> RatQ {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RatQ> for RatQ {
            type Output = RatQ;
            fn $m(self, rhs: &RatQ) -> RatQ {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl std::iter::Sum for RatQ {
    fn sum<I: Iterator<Item = RatQ>>(iter: I) -> Self {
        iter.fold(RatQ::zero(), |a, b| &a + &b)
    }
}

impl std::iter::Product for RatQ {
    fn product<I: Iterator<Item = RatQ>>(iter: I) -> Self {
        iter.fold(RatQ::one(), |a, b| &a * &b)
    }
}

impl Zero for RatQ {
    fn zero() -> Self {
        RatQ::zero()
    }
    fn is_zero(&self) -> bool {
        RatQ::is_zero(self)
    }
}

impl One for RatQ {
    fn one() -> Self {
        RatQ::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(i64, i64)]) -> LaurentQ {
        LaurentQ::from_int_terms(terms)
    }

    #[test]
    fn reduction_cancels_common_factors() {
        // (q^2 - q^-2) / (q - q^-1) reduces to q + q^-1 over 1
        let r = RatQ::new(p(&[(2, 1), (-2, -1)]), p(&[(1, 1), (-1, -1)])).unwrap();
        assert_eq!(r.as_laurent().unwrap(), &p(&[(1, 1), (-1, 1)]));
    }

    #[test]
    fn arithmetic_round_trip() {
        let a = RatQ::new(p(&[(1, 1)]), p(&[(0, 1), (2, 1)])).unwrap();
        let b = RatQ::new(p(&[(0, 3)]), p(&[(1, 1), (-1, 1)])).unwrap();
        let s = &a + &b;
        assert_eq!(&s - &b, a);
        assert_eq!(&(&a * &b) / &b, a);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn pole_is_reported() {
        let r = RatQ::new(LaurentQ::one(), p(&[(1, 1), (-1, -1)])).unwrap();
        assert!(matches!(r.eval_at(1.0), Err(Error::Pole(_))));
        assert!((r.eval_at(2.0).unwrap() - 1.0 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RatQ::new(LaurentQ::one(), LaurentQ::zero()).is_err());
        assert!(RatQ::zero().recip().is_err());
    }

    #[test]
    fn common_denominator_is_lcm() {
        let a = RatQ::new(LaurentQ::one(), p(&[(1, 1), (0, 1)])).unwrap();
        let b = RatQ::new(LaurentQ::one(), p(&[(2, 1), (0, -1)])).unwrap();
        let l = RatQ::common_denominator([&a, &b]);
        assert_eq!(l, p(&[(2, 1), (0, -1)]));
        assert!(a.times_laurent(&l).is_ok());
    }
}
