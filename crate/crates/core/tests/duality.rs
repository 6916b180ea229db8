use std::collections::HashMap;

use proptest::prelude::*;

use twindual::duality::{brauer_lambda_count, commutant_dimension, enveloping_dimension, lambda_count, partitions_of, schur_weyl_check, DualityOptions};
use twindual::hecke_twin::RepContext;
use twindual::linalg::Matrix;
use twindual::scalars::{rational, QContext, Rational, Scalar};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagonal_commutant_is_sum_of_squared_multiplicities(entries in prop::collection::vec(-3i64..4, 1..10)) {
        let m = Matrix::diagonal(&entries.iter().map(|&x| rational(x, 1)).collect::<Vec<_>>());
        let mut mult: HashMap<i64, usize> = HashMap::new();
        for &x in &entries {
            *mult.entry(x).or_default() += 1;
        }
        let expected: usize = mult.values().map(|k| k * k).sum();
        prop_assert_eq!(commutant_dimension(&[m], 0.0).unwrap().dimension, expected);
    }

    #[test]
    fn envelope_of_diagonal_is_number_of_distinct_entries(entries in prop::collection::vec(-3i64..4, 1..8)) {
        let m = Matrix::diagonal(&entries.iter().map(|&x| rational(x, 1)).collect::<Vec<_>>());
        let mut distinct = entries.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let env = enveloping_dimension(&[m], 12, 0.0).unwrap();
        prop_assert!(env.saturated);
        prop_assert_eq!(env.dimension, distinct.len());
    }
}

#[test]
fn partition_counts() {
    let p: Vec<usize> = (0..10).map(|k| partitions_of(k).len()).collect();
    assert_eq!(p, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30]);
    // two columns at most when n = 3: λ′₁ + λ′₂ ≤ 2
    assert_eq!(lambda_count(3, 3), 5);
    assert_eq!(lambda_count(10, 2), 1 + 1 + 2);
    assert_eq!(brauer_lambda_count(10, 2), 2 + 1);
}

#[test]
fn commutant_of_commuting_pair() {
    // two commuting diagonal involutions on 4 points split it into four lines
    let d = |v: [i64; 4]| Matrix::diagonal(&v.map(|x| rational(x, 1)));
    let c = commutant_dimension(&[d([1, 1, -1, -1]), d([1, -1, 1, -1])], 0.0).unwrap();
    assert_eq!(c.dimension, 4);
}

#[test]
fn exact_and_approx_sweeps_agree() {
    let spec = Scalar::Exact(rational(4, 1));
    let rc: RepContext<Rational> = RepContext::new(3, QContext::exact(rational(2, 1)).unwrap()).unwrap();
    let e = schur_weyl_check(&rc, 2, &spec, &DualityOptions { center: true, ..DualityOptions::default() }).unwrap();
    let rca = RepContext::new(3, QContext::approx(twindual::Complex64::new(4.0, 0.0), 1e-9).unwrap()).unwrap();
    let a = schur_weyl_check(&rca, 2, &spec, &DualityOptions { center: true, ..DualityOptions::default() }).unwrap();
    assert!(e.pass() && a.pass());
    assert_eq!((e.dim_commutant, e.dim_diagram_image, e.center_dim), (a.dim_commutant, a.dim_diagram_image, a.center_dim));
}
