//! Laurent polynomials in `q` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::error::{Error, Result};

/// Exact Laurent polynomial `sum_k c_k q^k` with `c_k` rational.
///
/// The map never stores a zero coefficient, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentQ {
    coeffs: BTreeMap<i64, BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl LaurentQ {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(rat(c))
    }

    /// `c q^exp`.
    pub fn monomial(c: BigRational, exp: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        LaurentQ { coeffs }
    }

    /// `q^exp`.
    pub fn q_pow(exp: i64) -> Self {
        Self::monomial(BigRational::one(), exp)
    }

    /// Builds from `(exponent, coefficient)` pairs, merging duplicates.
    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(terms: I) -> Self {
        let mut p = LaurentQ::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn from_int_terms(terms: &[(i64, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(e, c)| (e, rat(c))))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, exp: i64) -> BigRational {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.values().next_back()
    }

    pub(crate) fn add_term(&mut self, exp: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// If `self` is a single term `c q^e`, returns `(c, e)`; these are exactly
    /// the units of the Laurent ring.
    pub fn as_monomial(&self) -> Option<(&BigRational, i64)> {
        if self.coeffs.len() == 1 {
            let (e, c) = self.coeffs.iter().next().unwrap();
            Some((c, *e))
        } else {
            None
        }
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentQ { coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return LaurentQ::zero();
        }
        LaurentQ { coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * s)).collect() }
    }

    /// The bar involution `q -> q^{-1}`.
    pub fn bar(&self) -> Self {
        LaurentQ { coeffs: self.coeffs.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = LaurentQ::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact evaluation at a nonzero rational point.
    pub fn eval_exact(&self, q: &BigRational) -> BigRational {
        assert!(!q.is_zero(), "Laurent polynomial evaluated at q = 0");
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else {
            return BigRational::zero();
        };
        // Horner on the shifted polynomial, then restore q^lo.
        let mut acc = BigRational::zero();
        for e in (lo..=hi).rev() {
            acc = acc * q + self.coeff(e);
        }
        acc * pow_rat(q, lo)
    }

    /// Evaluation at `q0 > 0`: exact rational Horner on the binary value of
    /// `q0`, converted to `f64` at the end.
    pub fn eval_at(&self, q0: f64) -> Result<f64> {
        let q = exact_point(q0)?;
        Ok(rat_to_f64(&self.eval_exact(&q)))
    }

    /// Plain double-precision evaluation; used on hot numeric paths.
    pub fn eval_f64(&self, q0: f64) -> f64 {
        self.coeffs.iter().map(|(e, c)| rat_to_f64(c) * q0.powi(*e as i32)).sum()
    }

    /// Exact quotient `self / other` when it is again a Laurent polynomial.
    pub fn div_exact(&self, other: &LaurentQ) -> Option<LaurentQ> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentQ::zero());
        }
        if let Some((c, e)) = other.as_monomial() {
            let inv = c.recip();
            return Some(self.scale(&inv).shift(-e));
        }
        let (a, da, a_lo) = integer_dense(self);
        let (b, db, b_lo) = integer_dense(other);
        let cb = b.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let bp: Vec<BigInt> = b.iter().map(|c| c / &cb).collect();
        // Gauss: a primitive divisor leaves an integer quotient
        let quot = int_exact_div(&a, &bp)?;
        let scale = BigRational::new(db, da * cb);
        Some(LaurentQ::from_terms(
            quot.into_iter().enumerate().map(|(i, c)| (a_lo - b_lo + i as i64, BigRational::from_integer(c) * &scale)),
        ))
    }

    pub fn div_exact_or_err(&self, other: &LaurentQ) -> Result<LaurentQ> {
        self.div_exact(other).ok_or_else(|| Error::InexactDivision(format!("({self}) / ({other})")))
    }

    /// Monic gcd with lowest exponent 0. `gcd(0, 0) = 0`.
    pub fn gcd(a: &LaurentQ, b: &LaurentQ) -> LaurentQ {
        if a.is_zero() && b.is_zero() {
            return LaurentQ::zero();
        }
        if a.is_zero() || b.is_zero() {
            let (x, _) = to_dense(if a.is_zero() { b } else { a });
            return monic(&x);
        }
        if a.as_monomial().is_some() || b.as_monomial().is_some() {
            return LaurentQ::one();
        }
        let (x, _) = to_dense(a);
        let (y, _) = to_dense(b);
        if let Some(g) = heuristic_gcd(&primitive(&x), &primitive(&y)) {
            let g: Vec<BigRational> = g.into_iter().map(BigRational::from_integer).collect();
            return monic(&g);
        }
        let (mut x, mut y) = (x, y);
        while !y.is_empty() {
            let (_, r) = dense_divrem(&x, &y);
            x = y;
            y = trim(r);
        }
        monic(&x)
    }

    /// Lowest exponent moved to zero and leading coefficient one, together
    /// with the factor `c q^e` that was removed.
    pub(crate) fn normalize_unit(&self) -> (LaurentQ, BigRational, i64) {
        let lo = self.min_exp().unwrap_or(0);
        let lc = self.leading_coeff().cloned().unwrap_or_else(BigRational::one);
        (self.shift(-lo).scale(&lc.recip()), lc, lo)
    }
}

pub(crate) fn pow_rat(q: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { q.recip() } else { q.clone() };
    let mut acc = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// The exact rational value of a positive finite `f64`.
pub fn exact_point(q0: f64) -> Result<BigRational> {
    if !(q0.is_finite() && q0 > 0.0) {
        return Err(Error::InvalidArgument(format!("q must be finite and > 0, got {q0}")));
    }
    BigRational::from_float(q0).ok_or_else(|| Error::InvalidArgument(format!("q = {q0}")))
}

fn monic(x: &[BigRational]) -> LaurentQ {
    let lc = x.last().expect("nonzero polynomial").clone();
    let v: Vec<BigRational> = x.iter().map(|c| c / &lc).collect();
    let lo = v.iter().position(|c| !c.is_zero()).unwrap_or(0);
    from_dense(&v[lo..], 0)
}

/// Integer polynomial with unit content and the same roots.
fn primitive(x: &[BigRational]) -> Vec<BigInt> {
    let l = x.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let v: Vec<BigInt> = x.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    v.into_iter().map(|c| c / &g).collect()
}

fn eval_int(p: &[BigInt], xi: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * xi + c)
}

fn divides(g: &[BigInt], p: &[BigInt]) -> bool {
    int_exact_div(p, g).is_some()
}

/// `a / b` over the integers for ascending coefficient lists with nonzero
/// leading and trailing entries in `b`; `None` unless exact.
fn int_exact_div(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let b = &b[..b.iter().rposition(|c| !c.is_zero())? + 1];
    let a_len = a.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
    if a_len == 0 {
        return Some(Vec::new());
    }
    if a_len < b.len() {
        return None;
    }
    let mut r = a[..a_len].to_vec();
    let lb = b.last().unwrap();
    let mut quot = vec![BigInt::zero(); a_len - b.len() + 1];
    for shift in (0..quot.len()).rev() {
        let top = &r[shift + b.len() - 1];
        if top.is_zero() {
            continue;
        }
        let (c, rem) = top.div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (i, bc) in b.iter().enumerate() {
            if !bc.is_zero() {
                r[shift + i] -= &c * bc;
            }
        }
        quot[shift] = c;
    }
    r.iter().all(Zero::is_zero).then_some(quot)
}

/// Gcd of primitive integer polynomials by evaluation at a large integer
/// and symmetric-digit reconstruction; `None` if every attempt fails.
fn heuristic_gcd(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let norm = |p: &[BigInt]| p.iter().map(|c| c.abs()).max().unwrap_or_default();
    let mut xi = BigInt::from(2) * norm(a).min(norm(b)) + BigInt::from(29);
    for _ in 0..6 {
        let mut gamma = eval_int(a, &xi).gcd(&eval_int(b, &xi));
        let mut g = Vec::new();
        let half = &xi / 2;
        while !gamma.is_zero() {
            let mut d = gamma.mod_floor(&xi);
            if d > half {
                d -= &xi;
            }
            gamma = (gamma - &d) / &xi;
            g.push(d);
        }
        let content = g.iter().fold(BigInt::zero(), |c, x| c.gcd(x));
        if !content.is_zero() {
            let g: Vec<BigInt> = g.into_iter().map(|c| c / &content).collect();
            if divides(&g, a) && divides(&g, b) {
                return Some(g);
            }
        }
        xi = xi * BigInt::from(73794) / BigInt::from(27011);
    }
    None
}

/// `p = q^lo * (sum_i v_i q^i) / den` with integer `v_i`.
fn integer_dense(p: &LaurentQ) -> (Vec<BigInt>, BigInt, i64) {
    let lo = p.min_exp().unwrap_or(0);
    let hi = p.max_exp().unwrap_or(0);
    let den = p.coeffs.values().fold(BigInt::one(), |l, c| if c.denom().is_one() { l } else { l.lcm(c.denom()) });
    let mut v = vec![BigInt::zero(); (hi - lo + 1) as usize];
    for (e, c) in &p.coeffs {
        v[(e - lo) as usize] = if den.is_one() { c.numer().clone() } else { c.numer() * (&den / c.denom()) };
    }
    (v, den, lo)
}

fn convolve(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let small = |v: &[BigInt]| v.iter().map(|c| c.to_i64()).collect::<Option<Vec<i64>>>();
    if let (Some(x), Some(y)) = (small(a), small(b)) {
        let mut out = vec![0i128; x.len() + y.len() - 1];
        let mut ok = true;
        'outer: for (i, &p) in x.iter().enumerate() {
            if p == 0 {
                continue;
            }
            for (j, &r) in y.iter().enumerate() {
                match out[i + j].checked_add(p as i128 * r as i128) {
                    Some(t) => out[i + j] = t,
                    None => {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            return out.into_iter().map(BigInt::from).collect();
        }
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, p) in a.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        for (j, r) in b.iter().enumerate() {
            out[i + j] += p * r;
        }
    }
    out
}

fn to_dense(p: &LaurentQ) -> (Vec<BigRational>, i64) {
    let (Some(lo), Some(hi)) = (p.min_exp(), p.max_exp()) else {
        return (Vec::new(), 0);
    };
    let v = (lo..=hi).map(|e| p.coeff(e)).collect();
    (v, lo)
}

fn from_dense(v: &[BigRational], lo: i64) -> LaurentQ {
    LaurentQ::from_terms(v.iter().enumerate().map(|(i, c)| (lo + i as i64, c.clone())))
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Long division of ascending-coefficient polynomials; `b` must be nonzero
/// with a nonzero leading entry.
fn dense_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lb = b.last().unwrap().clone();
    let mut quot = vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lb;
        for (i, bc) in b.iter().enumerate() {
            let t = &r[shift + i] - &c * bc;
            r[shift + i] = t;
        }
        quot[shift] = c;
        r.pop();
        r = trim(r);
    }
    (quot, r)
}

impl fmt::Display for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mono = match *e {
                0 => String::new(),
                1 => "q".to_string(),
                e => format!("q^{e}"),
            };
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentQ({self})")
    }
}

/// `{"exponent": "p/q", ...}` in ascending exponent order.
impl Serialize for LaurentQ {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (e, c) in &self.coeffs {
            map.serialize_entry(&e.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

impl<'a> Add<&'a LaurentQ> for &'a LaurentQ {
    type Output = LaurentQ;
    fn add(self, rhs: &LaurentQ) -> LaurentQ {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&LaurentQ> for LaurentQ {
    fn add_assign(&mut self, rhs: &LaurentQ) {
        for (e, c) in &rhs.coeffs {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&LaurentQ> for LaurentQ {
    fn sub_assign(&mut self, rhs: &LaurentQ) {
        for (e, c) in &rhs.coeffs {
            self.add_term(*e, -c.clone());
        }
    }
}

impl<'a> Sub<&'a LaurentQ> for &'a LaurentQ {
    type Output = LaurentQ;
    fn sub(self, rhs: &LaurentQ) -> LaurentQ {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a LaurentQ> for &'a LaurentQ {
    type Output = LaurentQ;
    fn mul(self, rhs: &LaurentQ) -> LaurentQ {
        if self.is_zero() || rhs.is_zero() {
            return LaurentQ::zero();
        }
        let (a, da, lo_a) = integer_dense(self);
        let (b, db, lo_b) = integer_dense(rhs);
        let den = da * db;
        let prod = convolve(&a, &b);
        let lo = lo_a + lo_b;
        LaurentQ::from_terms(
            prod.into_iter().enumerate().map(|(i, c)| (lo + i as i64, BigRational::new(c, den.clone()))),
        )
    }
}

impl Neg for &LaurentQ {
    type Output = LaurentQ;
    fn neg(self) -> LaurentQ {
        LaurentQ { coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<LaurentQ> for LaurentQ {
            type Output = LaurentQ;
            fn $m(self, rhs: LaurentQ) -> LaurentQ {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentQ> for LaurentQ {
            type Output = LaurentQ;
            fn $m(self, rhs: &LaurentQ) -> LaurentQ {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentQ {
    type Output = LaurentQ;
    fn neg(self) -> LaurentQ {
        -&self
    }
}

impl std::iter::Sum for LaurentQ {
    fn sum<I: Iterator<Item = LaurentQ>>(iter: I) -> Self {
        let mut acc = LaurentQ::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

impl std::iter::Product for LaurentQ {
    fn product<I: Iterator<Item = LaurentQ>>(iter: I) -> Self {
        iter.fold(LaurentQ::one(), |a, b| &a * &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(i64, i64)]) -> LaurentQ {
        LaurentQ::from_int_terms(terms)
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let a = p(&[(1, 1), (-1, 1)]);
        let b = p(&[(1, -1)]);
        let s = &a + &b;
        assert_eq!(s, p(&[(-1, 1)]));
        assert_eq!(s.num_terms(), 1);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn exact_division_and_failure() {
        // (q^2 - q^-2) / (q - q^-1) = q + q^-1
        let num = p(&[(2, 1), (-2, -1)]);
        let den = p(&[(1, 1), (-1, -1)]);
        assert_eq!(num.div_exact(&den).unwrap(), p(&[(1, 1), (-1, 1)]));
        assert!(p(&[(2, 1), (0, 1)]).div_exact(&den).is_none());
        assert!(num.div_exact(&LaurentQ::zero()).is_none());
    }

    #[test]
    fn gcd_is_monic_and_shifted() {
        let a = &p(&[(1, 1), (-1, -1)]) * &p(&[(3, 2), (0, 1)]);
        let b = &p(&[(1, 1), (-1, -1)]) * &p(&[(5, 1)]);
        let g = LaurentQ::gcd(&a, &b);
        // q - q^-1 = q^-1 (q^2 - 1), normalized to q^2 - 1
        assert_eq!(g, p(&[(2, 1), (0, -1)]));
    }

    #[test]
    fn evaluation() {
        let two = p(&[(1, 1), (-1, 1)]);
        assert_eq!(two.eval_at(2.0).unwrap(), 2.5);
        assert!(two.eval_at(0.0).is_err());
        assert!((two.eval_f64(2.0) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn display_and_json_key_order() {
        let a = p(&[(3, 1), (1, 2), (-1, 2), (-3, 1)]);
        assert_eq!(a.to_string(), "q^3 + 2*q + 2*q^-1 + q^-3");
        assert_eq!(p(&[(0, -1), (-2, 3)]).to_string(), "-1 + 3*q^-2");
    }
}
