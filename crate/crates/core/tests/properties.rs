mod common;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use common::*;
use ncample::lattice::{char_poly, geometric_sum, Matrix};
use ncample::poly::{eventually_positive, MultiPoly, PositivityResult};
use ncample::system::BimoduleSystem;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn corpus() -> &'static [Item] {
    static CORPUS: OnceLock<Vec<Item>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut v = duality_corpus(60);
        v.extend(unipotent_corpus(30));
        v
    })
}

fn unipotent() -> &'static [Item] {
    static UNI: OnceLock<Vec<Item>> = OnceLock::new();
    UNI.get_or_init(|| corpus().iter().filter(|i| i.sys.is_unipotent()).cloned().collect())
}

fn any_system() -> impl Strategy<Value = &'static BimoduleSystem> {
    (0..corpus().len()).prop_map(|k| &corpus()[k].sys)
}

fn matrix() -> impl Strategy<Value = Matrix> {
    (1usize..=4).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), n).prop_map(|rows| {
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            Matrix::from_i64(&refs)
        })
    })
}

fn poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
    proptest::collection::vec((proptest::collection::vec(0u32..=3, nvars), -5i64..=5), 0..6)
        .prop_map(move |terms| MultiPoly::from_binomial_terms(nvars, terms.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

fn poly_any() -> impl Strategy<Value = MultiPoly> {
    (1usize..=3).prop_flat_map(poly)
}

fn grade(s: usize, max: u64) -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(0..=max, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cayley_hamilton(m in matrix()) {
        prop_assert!(char_poly(&m).eval_matrix(&m).is_zero());
    }

    #[test]
    fn geometric_sum_splits(m in matrix(), a in 0u64..6, b in 0u64..6) {
        let whole = geometric_sum(&m, a + b);
        let split = &geometric_sum(&m, a) + &(&m.pow(a) * &geometric_sum(&m, b));
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn monomial_roundtrip(p in poly_any()) {
        let back = MultiPoly::from_monomials(p.nvars(), &p.to_monomials()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn box_sum_matches_literal_sum(p in (1usize..=2).prop_flat_map(poly), n in 0u64..6) {
        let s = p.nvars();
        let literal: BigInt = if n == 0 {
            BigInt::zero()
        } else {
            grid(&vec![1; s], &vec![n; s]).iter().map(|q| p.eval_u64(q)).sum()
        };
        prop_assert_eq!(p.box_sum().eval_u64(&[n]), literal);
    }

    #[test]
    fn shift_is_pointwise(p in (1usize..=3).prop_flat_map(|s| (poly(s), grade(s, 6), grade(s, 6)))) {
        let (p, t, x) = p;
        let moved: Vec<u64> = x.iter().zip(&t).map(|(a, b)| a + b).collect();
        prop_assert_eq!(p.shift(&t).eval_u64(&x), p.eval_u64(&moved));
    }

    #[test]
    fn positivity_certificates_are_sound(p in poly_any()) {
        let s = p.nvars();
        match eventually_positive(&p, 8) {
            PositivityResult::Yes { start } => {
                let hi: Vec<u64> = start.iter().map(|x| x + 5).collect();
                for n in grid(&start, &hi) {
                    prop_assert!(p.eval_u64(&n) > BigInt::zero(), "p({:?}) <= 0", n);
                }
            }
            PositivityResult::No(w) => {
                prop_assert_eq!(w.base.len(), s);
                for t in w.threshold..w.threshold + 30 {
                    let v = p.eval_u64(&w.point(t));
                    if w.is_strict() {
                        prop_assert!(v < BigInt::zero(), "ray value {} at t = {}", v, t);
                    } else {
                        prop_assert!(v.is_zero());
                    }
                }
            }
            PositivityResult::Unknown { .. } => {}
        }
    }

    #[test]
    fn dual_is_an_involution(sys in any_system()) {
        prop_assert_eq!(&sys.dual().dual(), sys);
    }

    #[test]
    fn veronese_classes_are_subsampled(
        (sys, r, q) in any_system().prop_flat_map(|sys| (Just(sys), proptest::collection::vec(1u64..=3, sys.s()), grade(sys.s(), 4)))
    ) {
        let v = sys.veronese(&r).unwrap();
        let scaled: Vec<u64> = r.iter().zip(&q).map(|(a, b)| a * b).collect();
        prop_assert_eq!(v.class_at(&q), sys.class_at(&scaled));
    }

    #[test]
    fn combined_single_is_diagonal(
        (sys, n, k) in any_system().prop_flat_map(|sys| (Just(sys), proptest::collection::vec(1u64..=3, sys.s()), 0u64..5))
    ) {
        let single = sys.combined_single(&n).unwrap();
        let scaled: Vec<u64> = n.iter().map(|x| x * k).collect();
        prop_assert_eq!(single.class_at(&[k]), sys.class_at(&scaled));
    }

    #[test]
    fn symbolic_equals_direct(
        (k, n) in (0..unipotent().len()).prop_flat_map(|k| (Just(k), grade(unipotent()[k].sys.s(), 12)))
    ) {
        let sys = &unipotent()[k].sys;
        let sym = sys.symbolic_class().unwrap();
        let values: Vec<BigInt> = sym.iter().map(|p| p.eval_u64(&n)).collect();
        prop_assert_eq!(&values, &sys.class_at(&n).0);
        prop_assert_eq!(values, naive_class(sys, &n));
    }

    #[test]
    fn last_coordinate_increment(
        (sys, n) in any_system().prop_flat_map(|sys| (Just(sys), grade(sys.s(), 5)))
    ) {
        let s = sys.s();
        let mut next = n.clone();
        next[s - 1] += 1;
        let step = sys.action_power(&n).mul_vec(sys.bimodule(s - 1).divisor.coords());
        let expected: Vec<BigInt> = sys.class_at(&n).coords().iter().zip(step).map(|(a, b)| a + b).collect();
        prop_assert_eq!(sys.class_at(&next).0, expected);
    }

    #[test]
    fn product_class_is_concatenation(
        (a, b, n) in (any_system(), any_system()).prop_flat_map(|(a, b)| (Just(a), Just(b), grade(a.s() + b.s(), 4)))
    ) {
        let p = BimoduleSystem::product(a, b);
        let mut expected = a.class_at(&n[..a.s()]).coords().to_vec();
        expected.extend_from_slice(b.class_at(&n[a.s()..]).coords());
        prop_assert_eq!(p.class_at(&n).0, expected);
    }
}

#[test]
fn monomial_roundtrip_handles_fractions() {
    // n(n - 1)/2 has integer values but fractional monomial coefficients
    let mut terms = BTreeMap::new();
    terms.insert(vec![2], num_rational::BigRational::new(1.into(), 2.into()));
    terms.insert(vec![1], num_rational::BigRational::new((-1).into(), 2.into()));
    let p = MultiPoly::from_monomials(1, &terms).unwrap();
    assert_eq!(p, MultiPoly::binomial(1, 0, 2));
}
