use num::{BigInt, BigRational};
use proptest::prelude::*;
use qvbs_core::budget::Budget;
use qvbs_core::mps::{contract_pbc, contract_pbc_dense, tensor_f, tensor_g};
use qvbs_core::qnum::{q_binomial, q_integer, LaurentQ, QIntProduct, QSurd, RatQ};
use qvbs_core::transfer::{eigensystem, sz_distribution, transfer_matrix, two_point_thermo, SiteOperator};

fn laurent() -> impl Strategy<Value = LaurentQ> {
    prop::collection::vec((-4i64..=4, -5i64..=5), 0..5).prop_map(|t| LaurentQ::from_int_terms(&t))
}

fn nonzero_laurent() -> impl Strategy<Value = LaurentQ> {
    laurent().prop_filter("nonzero", |p| !p.is_zero())
}

fn ratq() -> impl Strategy<Value = RatQ> {
    (laurent(), nonzero_laurent()).prop_map(|(n, d)| RatQ::new(n, d).unwrap())
}

fn qint_product() -> impl Strategy<Value = QIntProduct> {
    prop::collection::vec((1u32..=6, -2i32..=2), 0..4).prop_map(|fs| {
        let mut p = QIntProduct::one();
        for (n, e) in fs {
            p.mul_qint(n, e);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn division_inverts_multiplication(a in laurent(), b in nonzero_laurent()) {
        prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
    }

    #[test]
    fn gcd_divides_both(a in nonzero_laurent(), b in nonzero_laurent(), c in nonzero_laurent()) {
        let (x, y) = (&a * &c, &b * &c);
        let g = LaurentQ::gcd(&x, &y);
        prop_assert!(x.div_exact(&g).is_some());
        prop_assert!(y.div_exact(&g).is_some());
        prop_assert!(g.div_exact(&c).is_some());
    }

    #[test]
    fn bar_is_an_involution(a in laurent(), b in laurent()) {
        prop_assert_eq!(a.bar().bar(), a.clone());
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in laurent(), b in laurent(), num in 1i64..9, den in 1i64..9) {
        let q = BigRational::new(BigInt::from(num), BigInt::from(den));
        prop_assert_eq!((&a * &b).eval_exact(&q), a.eval_exact(&q) * b.eval_exact(&q));
        prop_assert_eq!((&a + &b).eval_exact(&q), a.eval_exact(&q) + b.eval_exact(&q));
    }

    #[test]
    fn reciprocal_is_inverse(x in ratq().prop_filter("nonzero", |x| !x.is_zero())) {
        prop_assert!((&x * &x.recip().unwrap()).is_one());
    }

    #[test]
    fn rational_functions_form_a_field(a in ratq(), b in ratq(), c in ratq()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a - &b) + &b, a);
    }

    #[test]
    fn q_integers_are_bar_invariant(n in 0u32..40) {
        prop_assert_eq!(q_integer(n).bar(), q_integer(n));
    }

    #[test]
    fn q_pascal_rule(n in 1u32..14, k in 0u32..14) {
        prop_assume!(k <= n);
        let lhs = q_binomial(n, k).unwrap();
        let left = if k < n { q_binomial(n - 1, k).unwrap().shift(-(k as i64)) } else { LaurentQ::zero() };
        let right = if k > 0 { q_binomial(n - 1, k - 1).unwrap().shift(n as i64 - k as i64) } else { LaurentQ::zero() };
        prop_assert_eq!(lhs, &left + &right);
    }

    #[test]
    fn surd_square_root_squares_back(p in qint_product()) {
        let r = QSurd::sqrt_of(&p);
        prop_assert_eq!((&r * &r).as_ratq(), Some(p.to_ratq()));
    }

    #[test]
    fn sz_probabilities_sum_to_one(spin in 1u32..=4, q in 0.3f64..3.0) {
        let p = sz_distribution(spin, q).unwrap();
        prop_assert_eq!(p.len(), 2 * spin as usize + 1);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for m in 0..p.len() {
            prop_assert!((p[m] - p[p.len() - 1 - m]).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_is_invariant_under_inverse_deformation(spin in 1u32..=4, q in 0.3f64..3.0) {
        let a = eigensystem(&transfer_matrix(spin, q, None).unwrap()).unwrap();
        let b = eigensystem(&transfer_matrix(spin, 1.0 / q, None).unwrap()).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1e-300) + 1e-12 * a.eigenvalues[0].abs());
        }
    }

    #[test]
    fn correlator_is_invariant_under_inverse_deformation(spin in 1u32..=3, q in 0.4f64..2.5, r in 2usize..8) {
        let sz = SiteOperator::sz(spin);
        let u = two_point_thermo(&sz, &sz, spin, q, r).unwrap();
        let v = two_point_thermo(&sz, &sz, spin, 1.0 / q, r).unwrap();
        prop_assert!((u - v).abs() < 1e-11);
    }

    #[test]
    fn gauge_factor_cancels_on_periodic_chains(spin in 1u32..=2, length in 2usize..=5, q in 0.4f64..2.5) {
        let f = contract_pbc_dense(&tensor_f(spin), length, q, &Budget::default()).unwrap();
        let g = contract_pbc(&tensor_g(spin), length).unwrap().eval_at(q);
        let scale = g.amps().iter().map(|x| x.abs()).fold(0.0, f64::max);
        for (x, y) in f.amps().iter().zip(g.amps()) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }
}
