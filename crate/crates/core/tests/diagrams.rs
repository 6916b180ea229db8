use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twindual::diagrams::{compose, enumerate, AlgebraElement, Family, PartialDiagram};
use twindual::scalars::{rational, Rational};

/// A uniformly shuffled partial matching on the `2r` vertices.
fn random_diagram(r: usize, seed: u64) -> PartialDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verts: Vec<usize> = (0..2 * r).collect();
    verts.shuffle(&mut rng);
    let mut mate: Vec<usize> = (0..2 * r).collect();
    let mut it = verts.into_iter();
    while let Some(a) = it.next() {
        if rng.gen_bool(0.3) {
            continue;
        }
        if let Some(b) = it.next() {
            mate[a] = b;
            mate[b] = a;
        }
    }
    PartialDiagram::from_mate(r, mate).unwrap()
}

fn diagram() -> impl Strategy<Value = PartialDiagram> {
    (1usize..6, any::<u64>()).prop_map(|(r, s)| random_diagram(r, s))
}

fn triple() -> impl Strategy<Value = (PartialDiagram, PartialDiagram, PartialDiagram)> {
    (1usize..6, any::<u64>(), any::<u64>(), any::<u64>()).prop_map(|(r, a, b, c)| (random_diagram(r, a), random_diagram(r, b), random_diagram(r, c)))
}

proptest! {
    #[test]
    fn text_round_trip(d in diagram()) {
        let back = PartialDiagram::parse(d.r(), &d.to_string()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn json_round_trip(d in diagram()) {
        let text = serde_json::to_string(&d).unwrap();
        let back: PartialDiagram = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn transpose_is_an_anti_involution((a, b, _) in triple()) {
        prop_assert_eq!(a.transpose().transpose(), a.clone());
        let ab = compose(&a, &b).unwrap();
        let ba = compose(&b.transpose(), &a.transpose()).unwrap();
        prop_assert_eq!(ab.result.transpose(), ba.result);
        prop_assert_eq!((ab.loops, ab.non_loops), (ba.loops, ba.non_loops));
    }

    #[test]
    fn product_is_associative((a, b, c) in triple()) {
        let (delta, dp) = (rational(3, 1), rational(7, 2));
        let e = |d: &PartialDiagram| AlgebraElement::<Rational>::basis(d.clone());
        let left = e(&a).multiply(&e(&b), &delta, &dp).unwrap().multiply(&e(&c), &delta, &dp).unwrap();
        let right = e(&a).multiply(&e(&b).multiply(&e(&c), &delta, &dp).unwrap(), &delta, &dp).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn identity_is_neutral(d in diagram()) {
        let t = compose(&PartialDiagram::identity(d.r()), &d).unwrap();
        prop_assert_eq!((t.result, t.loops, t.non_loops), (d.clone(), 0, 0));
        let t = compose(&d, &PartialDiagram::identity(d.r())).unwrap();
        prop_assert_eq!(t.result, d);
    }

    #[test]
    fn propagating_number_never_grows((a, b, _) in triple()) {
        let t = compose(&a, &b).unwrap();
        prop_assert!(t.result.propagating_number() <= a.propagating_number().min(b.propagating_number()));
    }
}

#[test]
fn families_nest() {
    for r in 1..=4 {
        let all = enumerate(r, Family::All);
        let count = |f| all.iter().filter(|d| d.in_family(f)).count();
        assert_eq!(count(Family::Brauer), enumerate(r, Family::Brauer).len());
        assert_eq!(count(Family::Rook), enumerate(r, Family::Rook).len());
        assert_eq!(count(Family::Permutation), (1..=r).product::<usize>());
    }
}

#[test]
fn rejects_malformed_text() {
    for bad in ["1-2-3", "1-1", "1-4", "x", "1-2,2-3"] {
        assert!(PartialDiagram::parse(3, bad).is_err(), "{bad}");
    }
}
