use num_traits::{One, Zero};
use proptest::prelude::*;

use twindual::scalars::{excluded_q, parse_rational, q_factorial, q_int, rational, Complex64, Field, QContext, Rational, Scalar};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| rational(n, d))
}

proptest! {
    #[test]
    fn geometric_sum(q in small_rational(), n in 0u32..12) {
        let lhs = (q.clone() - Rational::one()) * q_int(n, &q);
        prop_assert_eq!(lhs, q.powu(n) - Rational::one());
    }

    #[test]
    fn factorial_recursion(q in small_rational(), n in 1u32..9) {
        prop_assert_eq!(q_factorial(n, &q), q_factorial(n - 1, &q) * q_int(n, &q));
    }

    #[test]
    fn excluded_values_are_reciprocal(num in -60i64..60, den in 1i64..20) {
        let lambda = rational(num, den);
        prop_assume!(lambda != rational(-1, 1));
        let (plus, minus) = excluded_q(&Scalar::Exact(lambda)).unwrap();
        let p = plus.to_complex() * minus.to_complex();
        prop_assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-9, "{plus} * {minus} = {p}");
    }

    #[test]
    fn rational_text_round_trip(q in small_rational()) {
        prop_assert_eq!(parse_rational(&Scalar::Exact(q.clone()).to_string()).unwrap(), q);
    }
}

#[test]
fn exact_context_needs_a_square() {
    assert!(QContext::exact_from_q(&rational(9, 4)).is_ok());
    assert!(QContext::exact_from_q(&rational(2, 1)).is_err());
    assert!(QContext::exact(rational(0, 1)).is_err());
}

#[test]
fn q_int_at_one_counts() {
    for n in 0..10 {
        assert_eq!(q_int(n, &Rational::one()), rational(n as i64, 1));
    }
    assert!(q_int(0, &rational(5, 1)).is_zero());
}
