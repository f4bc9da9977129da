//! q-integers, q-factorials and q-binomials.

use std::collections::BTreeMap;

use super::laurent::LaurentQ;
use super::ratq::RatQ;
use crate::error::{Error, Result};

/// `[n]_q = q^{n-1} + q^{n-3} + ... + q^{-(n-1)}`; `[0]_q = 0`.
pub fn q_integer(n: u32) -> LaurentQ {
    let n = n as i64;
    LaurentQ::from_int_terms(&(0..n).map(|k| (n - 1 - 2 * k, 1)).collect::<Vec<_>>())
}

/// `[n]_q` extended to negative `n` by `[-n]_q = -[n]_q`.
pub fn q_integer_signed(n: i64) -> LaurentQ {
    let p = q_integer(n.unsigned_abs() as u32);
    if n < 0 {
        -p
    } else {
        p
    }
}

pub fn q_factorial(n: u32) -> LaurentQ {
    (1..=n).map(q_integer).product()
}

/// `[n choose k]_q`, computed by exact division of q-factorials; a nonzero
/// remainder would be an arithmetic bug and panics.
pub fn q_binomial(n: u32, k: u32) -> Result<LaurentQ> {
    if k > n {
        return Err(Error::InvalidArgument(format!("q_binomial({n}, {k}) needs k <= n")));
    }
    let den = &q_factorial(k) * &q_factorial(n - k);
    Ok(q_factorial(n).div_exact(&den).expect("q-binomial division must be exact"))
}

/// Signed-argument entry point; rejects `k < 0` and `k > n`.
pub fn q_binomial_checked(n: i64, k: i64) -> Result<LaurentQ> {
    if n < 0 || k < 0 || k > n {
        return Err(Error::InvalidArgument(format!("q_binomial({n}, {k}) needs 0 <= k <= n")));
    }
    q_binomial(n as u32, k as u32)
}

/// Double-precision `[n]_q` for real `q > 0`, valid at `q = 1`.
pub fn q_integer_f64(n: i64, q: f64) -> f64 {
    let sign = n.signum() as f64;
    let n = n.unsigned_abs() as i32;
    if (q - 1.0).abs() < 1e-300 {
        return sign * n as f64;
    }
    sign * (0..n).map(|k| q.powi(n - 1 - 2 * k)).sum::<f64>()
}

pub fn q_factorial_f64(n: u32, q: f64) -> f64 {
    (1..=n as i64).map(|k| q_integer_f64(k, q)).product()
}

pub fn q_binomial_f64(n: u32, k: u32, q: f64) -> f64 {
    q_factorial_f64(n, q) / (q_factorial_f64(k, q) * q_factorial_f64(n - k, q))
}

/// A formal product `prod_n [n]_q^{e_n}` with integer (possibly negative)
/// exponents; the natural carrier for factorial and binomial radicands.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QIntProduct {
    exps: BTreeMap<u32, i32>,
}

impl QIntProduct {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn exponents(&self) -> impl Iterator<Item = (u32, i32)> + '_ {
        self.exps.iter().map(|(n, e)| (*n, *e))
    }

    pub fn qint(n: u32) -> Self {
        let mut p = Self::one();
        p.mul_qint(n, 1);
        p
    }

    pub fn mul_qint(&mut self, n: u32, e: i32) {
        assert!(n != 0, "[0]_q cannot enter a product");
        if n == 1 || e == 0 {
            return;
        }
        let slot = self.exps.entry(n).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.exps.remove(&n);
        }
    }

    pub fn factorial(n: u32) -> Self {
        let mut p = Self::one();
        for k in 2..=n {
            p.mul_qint(k, 1);
        }
        p
    }

    pub fn binomial(n: u32, k: u32) -> Self {
        assert!(k <= n);
        Self::factorial(n).mul(&Self::factorial(k).inv()).mul(&Self::factorial(n - k).inv())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, e) in other.exponents() {
            out.mul_qint(n, e);
        }
        out
    }

    pub fn inv(&self) -> Self {
        QIntProduct { exps: self.exps.iter().map(|(n, e)| (*n, -e)).collect() }
    }

    pub fn to_ratq(&self) -> RatQ {
        let mut num = LaurentQ::one();
        let mut den = LaurentQ::one();
        for (n, e) in self.exponents() {
            let b = q_integer(n).pow(e.unsigned_abs());
            if e > 0 {
                num = &num * &b;
            } else {
                den = &den * &b;
            }
        }
        RatQ::new(num, den).expect("q-integers with n >= 1 are nonzero")
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        self.exponents().map(|(n, e)| q_integer_f64(n as i64, q).powi(e)).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_q_integers() {
        assert!(q_integer(0).is_zero());
        assert_eq!(q_integer(1), LaurentQ::one());
        assert_eq!(q_integer(2), LaurentQ::from_int_terms(&[(1, 1), (-1, 1)]));
        assert_eq!(q_integer(4).eval_at(1.0).unwrap(), 4.0);
        assert_eq!(q_integer(2).eval_at(2.0).unwrap(), 2.5);
        assert_eq!(q_integer(5).eval_at(1.0).unwrap(), 5.0);
    }

    #[test]
    fn factorial_and_binomial_expansions() {
        assert_eq!(q_factorial(3), LaurentQ::from_int_terms(&[(3, 1), (1, 2), (-1, 2), (-3, 1)]));
        assert_eq!(q_binomial(4, 2).unwrap(), LaurentQ::from_int_terms(&[(4, 1), (2, 1), (0, 2), (-2, 1), (-4, 1)]));
        for n in 0..8 {
            assert_eq!(q_binomial(n, 0).unwrap(), LaurentQ::one());
        }
        assert_eq!(q_binomial(4, 2).unwrap().eval_at(1.0).unwrap(), 6.0);
    }

    #[test]
    fn binomial_range_errors() {
        assert!(q_binomial(3, 4).is_err());
        assert!(q_binomial_checked(3, -1).is_err());
        assert!(q_binomial_checked(-1, 0).is_err());
    }

    #[test]
    fn float_helpers_agree_with_exact() {
        for &q in &[0.5, 1.0, 1.7] {
            for n in 0..9u32 {
                let exact = q_integer(n).eval_at(q).unwrap();
                assert!((q_integer_f64(n as i64, q) - exact).abs() < 1e-12 * exact.abs().max(1.0));
            }
            let b = q_binomial(6, 3).unwrap().eval_at(q).unwrap();
            assert!((q_binomial_f64(6, 3, q) - b).abs() < 1e-12 * b);
        }
    }

    #[test]
    fn qint_product_binomial_matches_polynomial() {
        for n in 0..7 {
            for k in 0..=n {
                assert_eq!(QIntProduct::binomial(n, k).to_ratq().as_laurent().unwrap(), &q_binomial(n, k).unwrap());
            }
        }
    }
}
