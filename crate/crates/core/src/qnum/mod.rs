//! Exact arithmetic in the deformation parameter `q`.
//!
//! [`LaurentQ`] and [`RatQ`] carry all q-integers, q-binomials and state
//! coefficients; [`QSurd`] adds the square roots that normalized spin bases
//! and matrix-product tensors need. Floating point enters only through the
//! `eval_*` methods.

mod laurent;
mod qint;
mod ratmat;
mod ratq;
mod surd;

pub use laurent::{exact_point, LaurentQ};
pub use qint::{
    q_binomial, q_binomial_checked, q_binomial_f64, q_factorial, q_factorial_f64, q_integer, q_integer_f64,
    q_integer_signed, QIntProduct,
};
pub use ratmat::RatMatrix;
pub use ratq::RatQ;
pub use surd::{AtomSet, QSurd};

pub(crate) use laurent::rat;

/// Both sides of the q-binomial product expansion
/// `prod_{j=1}^m (1 - z q^{2j-2}) = sum_k (-z)^k q^{k(m-1)} [m choose k]_q`,
/// as coefficient lists in the formal variable `z`.
pub fn product_expansion_sides(m: u32) -> (Vec<LaurentQ>, Vec<LaurentQ>) {
    let mut lhs = vec![LaurentQ::one()];
    for j in 1..=m as i64 {
        // multiply by (1 - z q^{2j-2})
        let factor = LaurentQ::q_pow(2 * j - 2);
        let mut next = vec![LaurentQ::zero(); lhs.len() + 1];
        for (k, c) in lhs.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= &(c * &factor);
        }
        lhs = next;
    }
    let rhs = (0..=m)
        .map(|k| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            q_binomial(m, k).expect("k <= m").shift(k as i64 * (m as i64 - 1)).scale(&rat(sign))
        })
        .collect();
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_expansion_small_m() {
        for m in 0..=6 {
            let (l, r) = product_expansion_sides(m);
            assert_eq!(l, r, "m = {m}");
        }
    }
}
