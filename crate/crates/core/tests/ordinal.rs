use proptest::prelude::*;
use schreier::ordinal::OrdinalKind;
use schreier::Ordinal;

fn ordinal() -> impl Strategy<Value = Ordinal> {
    let leaf = (0u64..6).prop_map(Ordinal::finite);
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop::collection::vec((inner, 1u64..4), 1..4).prop_map(Ordinal::from_terms)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn text_round_trip(a in ordinal()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<Ordinal>().unwrap(), a.clone());
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Ordinal>(&json).unwrap(), a);
    }

    #[test]
    fn order_is_total_and_transitive(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        prop_assert_eq!(a == b, a.cmp(&b).is_eq());
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
    }

    #[test]
    fn addition_laws(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.add(&Ordinal::zero()), a.clone());
        prop_assert_eq!(Ordinal::zero().add(&a), a.clone());
        prop_assert!(a <= a.add(&b) && b <= a.add(&b));
        if b < c {
            prop_assert!(a.add(&b) < a.add(&c));
        }
        prop_assert!(a < a.successor());
        prop_assert_eq!(a.successor(), a.add(&Ordinal::one()));
    }

    #[test]
    fn kinds_are_consistent(a in ordinal()) {
        match a.kind() {
            OrdinalKind::Zero => prop_assert!(a.is_zero()),
            OrdinalKind::Successor(p) => {
                prop_assert_eq!(p.successor(), a.clone());
                prop_assert!(!a.is_limit());
            }
            OrdinalKind::Limit => prop_assert!(a.is_limit() && !a.is_finite()),
        }
    }

    #[test]
    fn fundamental_sequences_converge(a in ordinal(), below in ordinal()) {
        if a.is_limit() {
            let seq: Vec<Ordinal> = (1..=64).map(|n| a.fund(n).unwrap()).collect();
            prop_assert!(seq.iter().all(|x| *x < a));
            prop_assert!(seq.windows(2).all(|w| w[0] < w[1]));
            for n in 1..=64 {
                prop_assert_eq!(a.sfund(n).unwrap(), seq[n as usize - 1].successor());
            }
            // Cofinal: anything below a is eventually passed.
            if below < a {
                prop_assert!(seq.iter().any(|x| *x > below), "{} not passed below {}", below, a);
            }
        } else {
            prop_assert!(a.fund(1).is_err());
        }
    }
}

#[test]
fn parse_examples() {
    let a: Ordinal = "w^2*3+w+5".parse().unwrap();
    let terms: Vec<(String, u64)> = a
        .terms()
        .iter()
        .map(|t| (t.exponent.to_string(), t.coefficient))
        .collect();
    assert_eq!(terms, vec![("2".into(), 3), ("1".into(), 1), ("0".into(), 5)]);
    for good in ["0", "5", "w", "w*2", "w^w", "w^(w+1)", " w ^ 2 + 1 "] {
        assert!(good.parse::<Ordinal>().is_ok(), "{good}");
    }
    for bad in ["", "w+", "w^", "x", "w*0x", "(w"] {
        assert!(bad.parse::<Ordinal>().is_err(), "{bad}");
    }
    let absorbed: Ordinal = "3+w".parse().unwrap();
    assert_eq!(absorbed, Ordinal::omega());
}
