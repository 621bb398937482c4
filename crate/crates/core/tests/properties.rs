use mtlab::derivative::{single_derivative_element, taylor_reconstruction_holds, DerivativeDescriptor};
use mtlab::group_ring::filtration::{contains, contains_p_local, ord_aug};
use mtlab::group_ring::{minus_one, AbelianGroup, IntegralElement};
use mtlab::theta::theta_p_part;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use std::sync::Arc;

fn group_strategy() -> impl Strategy<Value = Arc<AbelianGroup>> {
    prop::collection::vec(1u64..=7, 1..=3)
        .prop_filter("order <= 60", |o| o.iter().product::<u64>() <= 60)
        .prop_map(|o| Arc::new(AbelianGroup::from_orders(&o)))
}

fn element(g: Arc<AbelianGroup>, coeffs: &[i64]) -> IntegralElement {
    let n = g.order() as usize;
    IntegralElement::from_coeffs(g, (0..n).map(|i| BigInt::from(coeffs[i % coeffs.len()])).collect())
}

fn group_and_elements() -> impl Strategy<Value = (Arc<AbelianGroup>, Vec<i64>, Vec<i64>)> {
    group_strategy().prop_flat_map(|g| {
        let n = g.order() as usize;
        (Just(g), prop::collection::vec(-9i64..=9, n), prop::collection::vec(-9i64..=9, n))
    })
}

/// A product of t elements of the form (g - 1) times an arbitrary element.
fn in_power(g: &Arc<AbelianGroup>, base: &IntegralElement, picks: &[usize]) -> IntegralElement {
    let mut x = base.clone();
    for &i in picks {
        let h = i % g.order() as usize;
        let y: IntegralElement = minus_one(g.clone(), h);
        x = x.mul(&y).unwrap();
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms((g, a, b) in group_and_elements()) {
        let x = element(g.clone(), &a);
        let y = element(g.clone(), &b);
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        let aug = x.mul(&y).unwrap().augmentation();
        prop_assert_eq!(aug, x.augmentation() * y.augmentation());
        prop_assert_eq!(x.involution().involution(), x.clone());
        prop_assert_eq!(x.mul(&y).unwrap().involution(), x.involution().mul(&y.involution()).unwrap());
    }

    #[test]
    fn filtration_is_nested((g, a, _b) in group_and_elements(), picks in prop::collection::vec(0usize..60, 0..=3)) {
        let x = in_power(&g, &element(g.clone(), &a), &picks);
        let t = picks.len();
        prop_assert!(contains(&x, t));
        if t > 0 {
            prop_assert!(contains(&x, t - 1));
        }
        for p in [2u64, 3, 5] {
            prop_assert!(contains_p_local(&x, t, p));
        }
        let ord = ord_aug(&x, 5);
        prop_assert!(ord.lower_bound() >= t.min(5) || x.is_zero());
    }

    #[test]
    fn taylor_reconstruction((g, a, _b) in group_and_elements()) {
        prop_assert!(taylor_reconstruction_holds(&element(g, &a)).unwrap());
    }

    #[test]
    fn derivative_is_linear(n in 2u64..=20, k in 0u64..6, a in prop::collection::vec(-9i64..=9, 20), b in prop::collection::vec(-9i64..=9, 20)) {
        prop_assume!(k < n);
        let g = Arc::new(AbelianGroup::cyclic(n));
        let d = DerivativeDescriptor::on_factors(g.clone(), &[(0, k)]).unwrap();
        let x = element(g.clone(), &a);
        let y = element(g.clone(), &b);
        let lhs = d.apply(&x.add(&y).unwrap()).unwrap();
        let rhs = d.apply(&x).unwrap().add(&d.apply(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(d.element(), single_derivative_element(n, k as i64));
    }

    #[test]
    fn p_part_preserves_augmentation((g, a, _b) in group_and_elements(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let x = element(g, &a).to_rational();
        let (k, img) = theta_p_part(&x, p);
        prop_assert_eq!(img.augmentation(), x.augmentation());
        prop_assert!(k.order() % p == 0 || k.order() == 1);
        prop_assert!(k.orders().iter().all(|&o| o == 1 || mtlab::arith::prime_divisors(o) == vec![p]));
    }
}

#[test]
fn augmentation_ideal_of_trivial_group_is_zero() {
    let g = Arc::new(AbelianGroup::cyclic(1));
    let x = element(g, &[4]);
    assert!(contains(&x, 0));
    assert!(!contains(&x, 1));
    assert!(x.augmentation() != BigInt::zero());
}
