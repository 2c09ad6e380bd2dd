//! Randomized invariants of the rewriting layer: operations that promise
//! to preserve Poincaré series must do so on arbitrary presentations, and
//! the structural normalizers must be idempotent.

use proptest::prelude::*;

use omegak::pattern::{DegreePattern, DegreeSet};
use omegak::presentation::{AlgebraKind, GeneratorFamily, Presentation};

const N: u64 = 32;

fn arb_pattern() -> impl Strategy<Value = DegreePattern> {
    prop_oneof![
        (1u64..=16).prop_map(DegreePattern::Single),
        (1u64..=12, 1u64..=8).prop_map(|(start, step)| DegreePattern::Progression {
            start,
            step
        }),
    ]
}

fn arb_kind() -> impl Strategy<Value = AlgebraKind> {
    prop_oneof![
        Just(AlgebraKind::Polynomial),
        Just(AlgebraKind::Exterior),
        Just(AlgebraKind::Truncated(4)),
        Just(AlgebraKind::Truncated(8)),
        Just(AlgebraKind::DividedPower),
    ]
}

fn arb_presentation() -> impl Strategy<Value = Presentation> {
    proptest::collection::vec((arb_kind(), arb_pattern()), 1..=4).prop_map(|fams| {
        Presentation::from_families(
            fams.into_iter()
                .enumerate()
                .map(|(i, (kind, pattern))| {
                    GeneratorFamily::new(&format!("g{i}"), kind, pattern)
                })
                .collect(),
        )
    })
}

fn series_equal(a: &Presentation, b: &Presentation) -> bool {
    a.series(N)
        .unwrap()
        .first_difference(&b.series(N).unwrap())
        .is_none()
}

proptest! {
    #[test]
    fn dualize_is_an_involution(p in arb_presentation()) {
        prop_assert_eq!(p.dualize().dualize(), p);
    }

    #[test]
    fn dualize_preserves_series(p in arb_presentation()) {
        prop_assert!(series_equal(&p.dualize(), &p));
    }

    #[test]
    fn gamma_split_preserves_series(
        pattern in arb_pattern(),
        level in 1u32..=4,
        filtration in 0u32..=2,
    ) {
        let p = Presentation::from_families(vec![
            GeneratorFamily::new("g", AlgebraKind::DividedPower, pattern)
                .at_filtration(filtration),
        ]);
        let split = p.gamma_split("g", level).unwrap();
        prop_assert!(series_equal(&split, &p));
    }

    #[test]
    fn coalesce_preserves_series(p in arb_presentation()) {
        prop_assert!(series_equal(&p.coalesce(), &p));
    }

    #[test]
    fn canonicalize_preserves_series_and_is_idempotent(p in arb_presentation()) {
        let c = p.canonicalize();
        prop_assert!(series_equal(&c, &p));
        prop_assert_eq!(c.canonicalize(), c);
    }

    #[test]
    fn tensor_series_is_the_product(
        a in arb_presentation(),
        b in arb_presentation(),
    ) {
        let product = a.series(N).unwrap().mul(&b.series(N).unwrap()).unwrap();
        let tensored = a.tensor(&b).series(N).unwrap();
        prop_assert!(product.first_difference(&tensored).is_none());
    }

    #[test]
    fn series_multiplication_commutes(
        a in arb_presentation(),
        b in arb_presentation(),
    ) {
        let sa = a.series(N).unwrap();
        let sb = b.series(N).unwrap();
        let ab = sa.mul(&sb).unwrap();
        let ba = sb.mul(&sa).unwrap();
        prop_assert!(ab.first_difference(&ba).is_none());
    }

    #[test]
    fn exact_division_inverts_multiplication(
        a in arb_presentation(),
        b in arb_presentation(),
    ) {
        let sa = a.series(N).unwrap();
        let sb = b.series(N).unwrap();
        let quotient = sa.mul(&sb).unwrap().exact_divide(&sb).unwrap();
        prop_assert!(quotient.first_difference(&sa).is_none());
    }

    #[test]
    fn doubling_then_halving_a_degree_set_roundtrips(pattern in arb_pattern()) {
        let set = pattern.to_set();
        let back = set.scale(2).half().unwrap();
        prop_assert_eq!(back, set);
    }

    #[test]
    fn set_algebra_is_consistent(a in arb_pattern(), b in arb_pattern()) {
        let sa = a.to_set();
        let sb = b.to_set();
        let union = sa.union(&sb);
        prop_assert!(sa.is_subset_of(&union));
        prop_assert!(sb.is_subset_of(&union));
        prop_assert_eq!(union.minus(&sb).union(&sa.intersect(&sb)), sa.clone());
        prop_assert!(sa.intersect(&sb).is_subset_of(&sa));
        let empty = DegreeSet::empty();
        prop_assert_eq!(sa.intersect(&empty), empty);
    }
}
