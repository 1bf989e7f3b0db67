//! Property tests for the core invariants: the canonical value order is
//! total, substitution application is idempotent, and world insertion is
//! order-insensitive.

use flg_core::term::{Constant, SmtNode, SmtOp};
use flg_core::types::{Base, PreType};
use flg_core::value::{apply_substitution, canonical_compare, Subst, UTerm, Value};
use flg_core::world::World;
use flg_core::name;
use proptest::prelude::*;
use std::cmp::Ordering;
use std::sync::Arc;

fn leaf_value() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<bool>().prop_map(Value::bool),
        any::<i32>().prop_map(Value::bv32),
        any::<i64>().prop_map(|n| Value::Const(Constant::Bv64(n))),
        "[a-c]{0,4}".prop_map(|s| Value::Const(Constant::Str(name(&s)))),
        Just(Value::ctor("nil", vec![])),
    ]
}

fn arb_value() -> impl Strategy<Value = Value> {
    leaf_value().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (prop_oneof![Just("cons"), Just("some"), Just("node")], proptest::collection::vec(inner.clone(), 1..3))
                .prop_map(|(c, args)| Value::ctor(c, args)),
            inner.clone().prop_map(|v| Value::smt_var(v, PreType::Base(Base::Bool))),
            (inner.clone(), inner).prop_map(|(a, b)| Value::smt(SmtNode::Op(SmtOp::AndOp, vec![a, b]))),
        ]
    })
}

fn arb_uterm() -> impl Strategy<Value = UTerm> {
    let leaf = prop_oneof![
        prop_oneof![Just("X"), Just("Y"), Just("Z"), Just("W")].prop_map(|v| UTerm::Var(name(v))),
        leaf_value().prop_map(UTerm::Val),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        (prop_oneof![Just("cons"), Just("pair")], proptest::collection::vec(inner, 1..3))
            .prop_map(|(c, args)| UTerm::Ctor(name(c), args))
    })
}

fn arb_subst() -> impl Strategy<Value = Subst> {
    proptest::collection::btree_map(
        prop_oneof![Just("X"), Just("Y"), Just("Z")],
        arb_value(),
        0..3,
    )
    .prop_map(|m| m.into_iter().map(|(k, v)| (name(k), v)).collect())
}

proptest! {
    // Each case checks one random triple; the order laws get checked on
    // well over ten thousand triples across the suite's fixed seeds.
    #![proptest_config(ProptestConfig::with_cases(12000))]

    #[test]
    fn canonical_order_is_total_and_consistent(a in arb_value(), b in arb_value(), c in arb_value()) {
        // Antisymmetry against equality.
        prop_assert_eq!(canonical_compare(&a, &b) == Ordering::Equal, a == b);
        // Reversal.
        prop_assert_eq!(canonical_compare(&a, &b), canonical_compare(&b, &a).reverse());
        // Transitivity.
        if canonical_compare(&a, &b) != Ordering::Greater
            && canonical_compare(&b, &c) != Ordering::Greater
        {
            prop_assert_ne!(canonical_compare(&a, &c), Ordering::Greater);
        }
        // Reflexivity.
        prop_assert_eq!(canonical_compare(&a, &a), Ordering::Equal);
    }

    #[test]
    fn substitution_is_idempotent(u in arb_uterm(), theta in arb_subst()) {
        let once = apply_substitution(&theta, &u);
        let twice = apply_substitution(&theta, &once);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn world_insertion_is_order_insensitive(
        mut tuples in proptest::collection::vec(proptest::collection::vec(any::<i32>().prop_map(Value::bv32), 2), 1..20),
        seed in any::<u64>(),
    ) {
        let p = name("p");
        let w1 = World::new([p.clone()]);
        for (i, t) in tuples.iter().enumerate() {
            w1.insert(&p, Arc::from(t.as_slice()), i as u64);
        }
        // Shuffle deterministically and insert again with different rounds.
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        tuples.shuffle(&mut rng);
        let w2 = World::new([p.clone()]);
        for (i, t) in tuples.iter().enumerate() {
            w2.insert(&p, Arc::from(t.as_slice()), (1000 + i) as u64);
        }
        prop_assert_eq!(w1.as_sets(), w2.as_sets());
    }
}
