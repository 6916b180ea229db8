use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twindual::diagrams::{enumerate, AlgebraElement, Family};
use twindual::hecke_twin::RepContext;
use twindual::linalg::Matrix;
use twindual::scalars::{rational, Complex64, QContext, Rational};
use twindual::tensor_action::TensorContext;

fn exact(n: usize, r: usize) -> TensorContext<Rational> {
    let rc = RepContext::new(n, QContext::exact(rational(2, 1)).unwrap()).unwrap();
    TensorContext::new(rc, r).unwrap()
}

fn approx(n: usize, r: usize) -> TensorContext<Complex64> {
    let rc = RepContext::new(n, QContext::approx(Complex64::new(4.0, 0.0), 1e-10).unwrap()).unwrap();
    TensorContext::new(rc, r).unwrap()
}

#[test]
fn homomorphism_on_random_pairs() {
    let tc = exact(4, 2);
    let (delta, dp) = (rational(4, 1), rational(5, 3));
    let all = enumerate(2, Family::All);
    let mats: Vec<Matrix<Rational>> = all.iter().map(|d| tc.diagram_to_matrix(d, &dp).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let (i, j) = (rng.gen_range(0..all.len()), rng.gen_range(0..all.len()));
        let prod = AlgebraElement::basis(all[i].clone()).multiply(&AlgebraElement::basis(all[j].clone()), &delta, &dp).unwrap();
        assert_eq!(mats[i].mul(&mats[j]), tc.element_to_matrix(&prod, &dp).unwrap(), "{} * {}", all[i], all[j]);
    }
}

#[test]
fn every_diagram_commutes_with_the_twin_action() {
    let tc = exact(3, 3);
    let dp = rational(1, 1);
    let group = tc.group_generators().unwrap();
    for d in enumerate(3, Family::All) {
        let m = tc.diagram_to_matrix(&d, &dp).unwrap();
        for g in &group {
            assert!(m.commutator(g).unwrap().is_zero_within(0.0), "{d}");
        }
    }
}

#[test]
fn approx_matches_exact_up_to_basis_scaling() {
    // the approximate basis is normalized, so traces (basis-free) must agree
    let (te, ta) = (exact(4, 2), approx(4, 2));
    let dpe = rational(3, 1);
    let dpa = Complex64::new(3.0, 0.0);
    for d in enumerate(2, Family::All) {
        let a = te.diagram_to_matrix(&d, &dpe).unwrap().trace();
        let b = ta.diagram_to_matrix(&d, &dpa).unwrap().trace();
        let a = twindual::scalars::rational_to_f64(&a);
        assert!((Complex64::new(a, 0.0) - b).norm() < 1e-8, "{d}: {a} vs {b}");
    }
}

fn random_orthogonal(seed: u64) -> Matrix<Complex64> {
    // product of random plane rotations and an optional reflection on F (dim 3)
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Matrix::<Complex64>::identity(3);
    for _ in 0..4 {
        let mut axes = [0usize, 1, 2];
        axes.shuffle(&mut rng);
        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (c, s) = (t.cos(), t.sin());
        let mut g = Matrix::<Complex64>::identity(3);
        let re = |x: f64| Complex64::new(x, 0.0);
        let (a, b) = (axes[0], axes[1]);
        g[(a, a)] = re(c);
        g[(a, b)] = re(-s);
        g[(b, a)] = re(s);
        g[(b, b)] = re(c);
        m = m.mul(&g);
    }
    if rng.gen_bool(0.5) {
        let mut f = Matrix::<Complex64>::identity(3);
        f[(2, 2)] = Complex64::new(-1.0, 0.0);
        m = m.mul(&f);
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn contraction_is_basis_free(seed in any::<u64>()) {
        let tc = approx(4, 2);
        let rotated = tc.with_f_rotation(&random_orthogonal(seed)).unwrap();
        let a = tc.to_e_prime(&tc.op_e(1).unwrap()).unwrap();
        let b = rotated.to_e_prime(&rotated.op_e(1).unwrap()).unwrap();
        prop_assert!(a.close(&b, 1e-8));
    }
}
