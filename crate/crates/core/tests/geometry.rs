use std::cmp::Ordering;

use hthick::geometry::{ab_order_key, sq_len_equilateral};
use hthick::phi::{GenLabel, GenSystem};
use hthick::{AffineMap2, BaryPoint, Dyadic, Error};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn dyadic() -> impl Strategy<Value = Dyadic> {
    (-1_000_000i64..1_000_000, 0u32..40).prop_map(|(n, k)| Dyadic::new(n, k))
}

fn point() -> impl Strategy<Value = BaryPoint> {
    (dyadic(), dyadic()).prop_map(|(u, v)| BaryPoint::new(u, v))
}

fn is_canonical(x: &Dyadic) -> bool {
    if x.numerator().is_zero() {
        x.exponent() == 0
    } else {
        x.exponent() == 0 || x.numerator() % 2 != BigInt::zero()
    }
}

fn rat(x: &Dyadic) -> BigRational {
    BigRational::new(x.numerator().clone(), BigInt::from(1) << x.exponent() as usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn order_is_antisymmetric_and_transitive(a in dyadic(), b in dyadic(), c in dyadic()) {
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        prop_assert_eq!(a.cmp(&b) == Ordering::Equal, a == b);
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        prop_assert_eq!(a.cmp(&b), rat(&a).cmp(&rat(&b)));
    }
}

proptest! {
    #[test]
    fn canonical_form_is_idempotent(n in -1_000_000i64..1_000_000, k in 0u32..40, j in 0u32..20) {
        let x = Dyadic::new(n, k);
        prop_assert!(is_canonical(&x));
        let again = Dyadic::new(x.numerator().clone(), x.exponent());
        prop_assert_eq!(&again, &x);
        prop_assert_eq!(Dyadic::new(BigInt::from(n) << j as usize, k + j), x.clone());
        prop_assert_eq!(x.to_string().parse::<Dyadic>().unwrap(), x);
    }

    #[test]
    fn arithmetic_matches_rationals(a in dyadic(), b in dyadic()) {
        for (got, want) in [
            (&a + &b, rat(&a) + rat(&b)),
            (&a - &b, rat(&a) - rat(&b)),
            (&a * &b, rat(&a) * rat(&b)),
        ] {
            prop_assert!(is_canonical(&got));
            prop_assert_eq!(rat(&got), want);
        }
    }

    #[test]
    fn composition_is_application_in_sequence(p in point(), i in 0usize..9, j in 0usize..9) {
        let gens = GenSystem::new().unwrap();
        let maps: Vec<&AffineMap2> = gens.iter().map(|(_, m)| m).collect();
        let (f, g) = (maps[i], maps[j]);
        prop_assert_eq!(f.compose(g).apply(&p), f.apply(&g.apply(&p)));
    }
}

#[test]
fn squared_length_examples() {
    assert_eq!(sq_len_equilateral(&Dyadic::one(), &Dyadic::zero()), Dyadic::one());
    let half = Dyadic::new(1, 1);
    assert_eq!(sq_len_equilateral(&half, &half), Dyadic::new(3, 2));
    assert_eq!(sq_len_equilateral(&Dyadic::zero(), &Dyadic::zero()), Dyadic::zero());
}

#[test]
fn ab_keys_and_pinned_images() {
    assert_eq!(ab_order_key(&BaryPoint::b()).unwrap(), Dyadic::zero());
    assert_eq!(ab_order_key(&BaryPoint::a()).unwrap(), Dyadic::one());
    assert_eq!(ab_order_key(&BaryPoint::from_parts(1, 1, 0, 0)).unwrap(), Dyadic::new(1, 1));
    assert!(matches!(ab_order_key(&BaryPoint::c()), Err(Error::Contract(_))));
    let gens = GenSystem::new().unwrap();
    assert_eq!(gens.map(GenLabel::S01).apply(&BaryPoint::b()), BaryPoint::from_parts(3, 2, 1, 2));
    assert_eq!(gens.map(GenLabel::S3).apply(&BaryPoint::a()), BaryPoint::a());
    let mid = BaryPoint::from_parts(1, 1, 1, 1);
    assert_eq!(AffineMap2::identity().apply(&mid), mid);
}
