use borelsum_core::scalar::rational;
use borelsum_core::{Branch, Direction, HalfInt, PuiseuxSeries, Scalar};
use num_rational::BigRational;
use proptest::prelude::*;

fn d() -> BigRational {
    rational(-6, 1)
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=5, -9i64..=9, 1i64..=5)
        .prop_map(|(a, p, b, q)| Scalar::new(rational(a, p), rational(b, q), d()))
}

fn series() -> impl Strategy<Value = PuiseuxSeries> {
    (
        prop::collection::vec((-4i64..8, scalar()), 0..6),
        prop::option::of(0i64..14),
    )
        .prop_map(|(terms, trunc)| {
            let t = trunc.map(HalfInt::from_twice);
            let mut s = PuiseuxSeries::zero("x", &d(), Direction::Small, t);
            for (e, c) in terms {
                let e = HalfInt::from_twice(e);
                if c.is_zero() || !s.is_known(e) {
                    continue;
                }
                s = s.with_term(e, c).unwrap();
            }
            s
        })
}

fn tmin(a: Option<HalfInt>, b: Option<HalfInt>) -> Option<HalfInt> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x < y { x } else { y }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Equal on every exponent both sides know.
fn agree(x: &PuiseuxSeries, y: &PuiseuxSeries) -> bool {
    match tmin(x.trunc(), y.trunc()) {
        Some(t) => x.clone().truncate(t) == y.clone().truncate(t),
        None => x == y,
    }
}

proptest! {
    #[test]
    fn scalar_add_sub_round_trip(x in scalar(), y in scalar()) {
        prop_assert_eq!(&(&x + &y) - &y, x);
    }

    #[test]
    fn addition_commutes_and_cancels(a in series(), b in series()) {
        prop_assert!(agree(&(&a + &b), &(&b + &a)));
        prop_assert!(agree(&(&(&a + &b) - &b), &a));
    }

    #[test]
    fn multiplication_ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert!(agree(&(&a * &b), &(&b * &a)));
        prop_assert!(agree(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
        prop_assert!(agree(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
    }

    #[test]
    fn leibniz_rule(a in series(), b in series()) {
        let lhs = (&a * &b).derivative();
        let rhs = &(&a.derivative() * &b) + &(&a * &b.derivative());
        prop_assert!(agree(&lhs, &rhs));
    }

    #[test]
    fn sqrt_squares_back(r in scalar(), tail in series()) {
        prop_assume!(!r.is_zero());
        // leading term r²·x⁰ plus higher-order terms
        let lead = PuiseuxSeries::constant("x", Direction::Small, &r * &r);
        let hi = tail.shift(HalfInt::from_twice(5));
        let a = &lead + &hi;
        let s = a.sqrt_series_to(Branch::Principal, Some(HalfInt::int(4))).unwrap();
        let sq = &s * &s;
        prop_assert!(agree(&sq, &a.clone().truncate(HalfInt::int(4))));
    }

    #[test]
    fn json_round_trip(a in series()) {
        let back = PuiseuxSeries::from_json_str(&a.to_json_string()).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn theta_squares_to_d() {
    let t = Scalar::theta(&d());
    assert_eq!(&t * &t, Scalar::from_ratio(-6, 1, &d()));
}
