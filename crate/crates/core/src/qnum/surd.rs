//! Exact scalars with square roots of q-integers.
//!
//! Normalized spin states carry `([j+m]_q! [j-m]_q!)^{1/2}` factors, and the
//! matrix-product tensors add square roots of q-binomials and half-integer
//! powers of `q`. All of these are products of the atoms `sqrt(q)` and
//! `sqrt([n]_q)`, `n >= 2`. A [`QSurd`] is a finite sum
//! `sum_A c_A * prod_{a in A} sqrt(a)` over square-free atom sets `A` with
//! rational-function coefficients `c_A`.
//!
//! For a square-free set `A` the product of its atoms is never a square in
//! `Q(q)` (the largest `[n]` in `A` contributes the cyclotomic factor
//! `Phi_n(q^2)` exactly once, and `q` itself is not a square), and distinct
//! sets differ by a non-square. The radicals are therefore linearly
//! independent over `Q(q)` and the representation is canonical: a value is
//! zero iff every coefficient is.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::laurent::{exact_point, LaurentQ};
use super::qint::{q_integer, q_integer_f64, QIntProduct};
use super::ratq::RatQ;
use crate::error::{Error, Result};

/// Bit 0 is `sqrt(q)`, bit `n >= 2` is `sqrt([n]_q)`.
pub type AtomSet = u64;

const SQRT_Q: AtomSet = 1;
const MAX_ATOM: u32 = 63;

fn atom_square(bit: u32) -> RatQ {
    if bit == 0 {
        LaurentQ::q_pow(1).into()
    } else {
        q_integer(bit).into()
    }
}

fn atom_f64(bit: u32, q: f64) -> f64 {
    if bit == 0 {
        q.sqrt()
    } else {
        q_integer_f64(bit as i64, q).sqrt()
    }
}

fn atoms(set: AtomSet) -> impl Iterator<Item = u32> {
    (0..64u32).filter(move |b| set & (1u64 << b) != 0)
}

fn atom_name(bit: u32) -> String {
    if bit == 0 {
        "q".into()
    } else {
        format!("[{bit}]")
    }
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct QSurd {
    terms: BTreeMap<AtomSet, RatQ>,
}

impl QSurd {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        RatQ::one().into()
    }

    pub fn from_int(c: i64) -> Self {
        RatQ::from_int(c).into()
    }

    fn single(set: AtomSet, c: RatQ) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(set, c);
        }
        QSurd { terms }
    }

    /// `q^{k/2}` for any integer `k`.
    pub fn q_half_pow(k: i64) -> Self {
        let whole = LaurentQ::q_pow(k.div_euclid(2)).into();
        let set = if k.rem_euclid(2) == 1 { SQRT_Q } else { 0 };
        Self::single(set, whole)
    }

    /// Positive square root of `prod [n]^{e_n}`.
    pub fn sqrt_of(p: &QIntProduct) -> Self {
        let mut coeff = QIntProduct::one();
        let mut set: AtomSet = 0;
        for (n, e) in p.exponents() {
            assert!(n <= MAX_ATOM, "q-integer [{n}] exceeds the supported radical range");
            coeff.mul_qint(n, e.div_euclid(2));
            if e.rem_euclid(2) == 1 {
                set |= 1u64 << n;
            }
        }
        Self::single(set, coeff.to_ratq())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (AtomSet, &RatQ)> + '_ {
        self.terms.iter().map(|(s, c)| (*s, c))
    }

    /// The value as a rational function, if it carries no radical.
    pub fn as_ratq(&self) -> Option<RatQ> {
        match self.terms.len() {
            0 => Some(RatQ::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn to_ratq(&self) -> Result<RatQ> {
        self.as_ratq().ok_or_else(|| Error::NotRadicalFree(self.to_string()))
    }

    pub fn single_term(&self) -> Option<(AtomSet, &RatQ)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(s, c)| (*s, c))
        } else {
            None
        }
    }

    /// Inverse of a single-term surd: `(c sqrt(A))^{-1} = sqrt(A) / (c A)`.
    pub fn try_inv(&self) -> Result<QSurd> {
        let (set, c) = self
            .single_term()
            .ok_or_else(|| Error::InvalidArgument(format!("cannot invert multi-term surd {self}")))?;
        let mut denom = c.clone();
        for b in atoms(set) {
            denom = &denom * &atom_square(b);
        }
        Ok(Self::single(set, denom.recip()?))
    }

    pub fn scale(&self, r: &RatQ) -> QSurd {
        if r.is_zero() {
            return QSurd::zero();
        }
        QSurd { terms: self.terms.iter().map(|(s, c)| (*s, c * r)).collect() }
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        self.terms.iter().map(|(s, c)| c.eval_f64(q) * atoms(*s).map(|b| atom_f64(b, q)).product::<f64>()).sum()
    }

    /// Coefficients are evaluated exactly at the binary value of `q0`; the
    /// radicals in double precision.
    pub fn eval_at(&self, q0: f64) -> Result<f64> {
        let q = exact_point(q0)?;
        let mut acc = 0.0;
        for (s, c) in &self.terms {
            let v = super::laurent::rat_to_f64(&c.eval_exact(&q).map_err(|_| Error::Pole(q0))?);
            acc += v * atoms(*s).map(|b| atom_f64(b, q0)).product::<f64>();
        }
        Ok(acc)
    }

    fn add_term(&mut self, set: AtomSet, c: RatQ) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(set) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }
}

impl From<RatQ> for QSurd {
    fn from(c: RatQ) -> Self {
        QSurd::single(0, c)
    }
}

impl From<LaurentQ> for QSurd {
    fn from(c: LaurentQ) -> Self {
        QSurd::single(0, c.into())
    }
}

impl fmt::Display for QSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *s == 0 {
                write!(f, "({c})")?;
            } else {
                let names: Vec<String> = atoms(*s).map(atom_name).collect();
                write!(f, "({c})*sqrt({})", names.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSurd({self})")
    }
}

impl<'a> Add<&'a QSurd> for &'a QSurd {
    type Output = QSurd;
    fn add(self, rhs: &QSurd) -> QSurd {
        let mut out = self.clone();
        for (s, c) in &rhs.terms {
            out.add_term(*s, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a QSurd> for &'a QSurd {
    type Output = QSurd;
    fn sub(self, rhs: &QSurd) -> QSurd {
        let mut out = self.clone();
        for (s, c) in &rhs.terms {
            out.add_term(*s, -c);
        }
        out
    }
}

impl<'a> Mul<&'a QSurd> for &'a QSurd {
    type Output = QSurd;
    fn mul(self, rhs: &QSurd) -> QSurd {
        let mut out = QSurd::zero();
        for (s1, c1) in &self.terms {
            for (s2, c2) in &rhs.terms {
                let mut c = c1 * c2;
                for b in atoms(s1 & s2) {
                    c = &c * &atom_square(b);
                }
                out.add_term(s1 ^ s2, c);
            }
        }
        out
    }
}

impl Neg for &QSurd {
    type Output = QSurd;
    fn neg(self) -> QSurd {
        QSurd { terms: self.terms.iter().map(|(s, c)| (*s, -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QSurd> for QSurd {
            type Output = QSurd;
            fn $m(self, rhs: QSurd) -> QSurd {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QSurd> for QSurd {
            type Output = QSurd;
            fn $m(self, rhs: &QSurd) -> QSurd {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QSurd {
    type Output = QSurd;
    fn neg(self) -> QSurd {
        -&self
    }
}

impl std::iter::Sum for QSurd {
    fn sum<I: Iterator<Item = QSurd>>(iter: I) -> Self {
        iter.fold(QSurd::zero(), |a, b| &a + &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squares_collapse() {
        let s = QSurd::sqrt_of(&QIntProduct::qint(3));
        assert_eq!((&s * &s).as_ratq().unwrap(), RatQ::from(q_integer(3)));
        let h = QSurd::q_half_pow(1);
        assert_eq!((&h * &h).as_ratq().unwrap(), RatQ::from(LaurentQ::q_pow(1)));
        assert_eq!(QSurd::q_half_pow(-3).as_ratq(), None);
        assert_eq!((&QSurd::q_half_pow(-3) * &QSurd::q_half_pow(3)).as_ratq().unwrap(), RatQ::one());
    }

    #[test]
    fn factorial_radical_reduces() {
        // [2]! [2]! = [2]^2 is a perfect square
        let p = QIntProduct::factorial(2).mul(&QIntProduct::factorial(2));
        assert_eq!(QSurd::sqrt_of(&p).as_ratq().unwrap(), RatQ::from(q_integer(2)));
        // [3]! = [2][3] is not
        assert!(QSurd::sqrt_of(&QIntProduct::factorial(3)).as_ratq().is_none());
    }

    #[test]
    fn inverse_of_single_term() {
        let s = QSurd::sqrt_of(&QIntProduct::binomial(4, 1)).scale(&RatQ::from_int(3));
        let inv = s.try_inv().unwrap();
        assert_eq!((&s * &inv).as_ratq().unwrap(), RatQ::one());
        let two = &s + &QSurd::one();
        assert!(two.try_inv().is_err());
    }

    #[test]
    fn numeric_value() {
        let s = QSurd::sqrt_of(&QIntProduct::qint(2)) + QSurd::q_half_pow(1);
        let q: f64 = 1.5;
        let expect = (q + 1.0 / q).sqrt() + q.sqrt();
        assert!((s.eval_f64(q) - expect).abs() < 1e-14);
        assert!((s.eval_at(q).unwrap() - expect).abs() < 1e-14);
    }
}
