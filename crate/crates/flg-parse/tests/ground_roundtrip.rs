//! The canonical printer and the ground-term reader are inverses: any value
//! a dump file can contain must read back as the same value.

use flg_core::name;
use flg_core::term::{Constant, QuantKind, SmtNode, SmtOp};
use flg_core::types::{prelude, Base, PreType, ProgramDecls, Type};
use flg_core::value::{SmtValue, Value};
use flg_parse::ground::parse_ground_value;
use proptest::prelude::*;
use std::sync::Arc;

fn wrap(n: SmtValue) -> Value {
    Value::Smt(Arc::new(n))
}

fn arb_const() -> impl Strategy<Value = Constant> {
    prop_oneof![
        any::<bool>().prop_map(Constant::Bool),
        any::<i32>().prop_map(Constant::Bv32),
        any::<i64>().prop_map(Constant::Bv64),
        r#"([ -~]|\t|\n){0,12}"#.prop_map(|s| Constant::Str(name(&s))),
    ]
}

fn arb_pretype() -> impl Strategy<Value = PreType> {
    prop_oneof![
        Just(PreType::Base(Base::Bool)),
        Just(PreType::Base(Base::Str)),
        Just(PreType::Base(Base::Bv(32))),
        Just(PreType::Base(Base::Bv(64))),
        Just(PreType::Adt(name("list"), vec![Type::bv(32)])),
        Just(PreType::Adt(
            name("option"),
            vec![Type::Adt(name("tuple2"), vec![Type::bv(64), Type::Base(Base::Str)])],
        )),
    ]
}

/// Variable names are values; plain identifiers print in the short form and
/// everything else falls back to the braced form.
fn arb_var_name() -> impl Strategy<Value = Value> {
    prop_oneof![
        "[a-z][a-z0-9_]{0,6}".prop_map(|s| Value::Const(Constant::Str(name(&s)))),
        "[A-Z][a-z ]{0,4}".prop_map(|s| Value::Const(Constant::Str(name(&s)))),
        any::<i32>().prop_map(|n| Value::Const(Constant::Bv32(n))),
        Just(Value::Ctor(name("cons"), Arc::from(vec![
            Value::Const(Constant::Bv32(7)),
            Value::Ctor(name("nil"), Arc::from(Vec::<Value>::new())),
        ]))),
    ]
}

fn arb_svalue() -> impl Strategy<Value = SmtValue> {
    let leaf = prop_oneof![
        arb_const().prop_map(SmtNode::ConstK),
        (arb_var_name(), arb_pretype()).prop_map(|(n, t)| SmtNode::Var { name: n, ty: t }),
        Just(SmtNode::Ctor(name("nil"), vec![])),
        Just(SmtNode::Ctor(name("none"), vec![])),
    ];
    leaf.prop_recursive(3, 32, 3, |inner| {
        let w = inner.prop_map(wrap).boxed();
        let pair = (w.clone(), w.clone());
        prop_oneof![
            pair.clone().prop_map(|(a, b)| SmtNode::Op(SmtOp::AndOp, vec![a, b])),
            pair.clone().prop_map(|(a, b)| SmtNode::Op(SmtOp::OrOp, vec![a, b])),
            pair.clone().prop_map(|(a, b)| SmtNode::Op(SmtOp::Imp, vec![a, b])),
            pair.clone().prop_map(|(a, b)| SmtNode::Op(SmtOp::SmtEq, vec![a, b])),
            w.clone().prop_map(|a| SmtNode::Op(SmtOp::Not, vec![a])),
            (w.clone(), w.clone(), w.clone())
                .prop_map(|(a, b, c)| SmtNode::Op(SmtOp::Ite, vec![a, b, c])),
            w.clone().prop_map(|a| SmtNode::Op(SmtOp::BvConst(32), vec![a])),
            w.clone().prop_map(|a| SmtNode::Op(SmtOp::BvConst(64), vec![a])),
            pair.clone().prop_map(|(a, b)| SmtNode::Op(SmtOp::BvAdd, vec![a, b])),
            pair.clone().prop_map(|(a, b)| SmtNode::Op(SmtOp::BvUlt, vec![a, b])),
            pair.clone().prop_map(|(a, b)| SmtNode::Ctor(name("cons"), vec![a, b])),
            w.clone().prop_map(|a| SmtNode::Ctor(name("some"), vec![a])),
            pair.clone().prop_map(|(a, b)| SmtNode::Ctor(name("tuple2"), vec![a, b])),
            w.clone().prop_map(|a| SmtNode::Tester(name("cons"), a)),
            w.clone().prop_map(|a| SmtNode::Tester(name("none"), a)),
            w.clone().prop_map(|a| SmtNode::Getter(name("cons"), 1, a)),
            w.clone().prop_map(|a| SmtNode::Getter(name("cons"), 2, a)),
            (w.clone(), w.clone(), w.clone())
                .prop_map(|(v, b, e)| SmtNode::Let { var: v, bound: b, body: e }),
            (
                any::<bool>(),
                proptest::collection::vec(w.clone(), 1..3),
                proptest::collection::vec(w.clone(), 0..2),
                w.clone(),
            )
                .prop_map(|(fa, binders, patterns, body)| SmtNode::Quant {
                    kind: if fa { QuantKind::Forall } else { QuantKind::Exists },
                    binders,
                    patterns,
                    body,
                }),
        ]
    })
}

fn arb_value() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        arb_const().prop_map(Value::Const),
        Just(Value::Ctor(name("nil"), Arc::from(Vec::<Value>::new()))),
        Just(Value::Ctor(name("none"), Arc::from(Vec::<Value>::new()))),
    ];
    leaf.prop_recursive(4, 48, 4, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Value::Ctor(name("cons"), Arc::from(vec![a, b]))),
            inner.clone().prop_map(|a| Value::Ctor(name("some"), Arc::from(vec![a]))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Value::Ctor(name("tuple2"), Arc::from(vec![a, b]))),
            proptest::collection::vec(inner.clone(), 3)
                .prop_map(|v| Value::Ctor(name("tuple3"), Arc::from(v))),
            arb_svalue().prop_map(wrap),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    #[test]
    fn printed_values_read_back(v in arb_value()) {
        let decls = prelude();
        let sigs = ProgramDecls::default();
        let text = v.to_string();
        let back = parse_ground_value(&text, &decls, &sigs)
            .unwrap_or_else(|d| panic!("{}\n  text: {text}", d.message));
        prop_assert_eq!(&back, &v, "text: {}", text);
        // Printing is canonical: a second trip changes nothing.
        prop_assert_eq!(back.to_string(), text);
    }
}

#[test]
fn pinned_dump_forms_are_stable() {
    let decls = prelude();
    let sigs = ProgramDecls::default();
    for text in [
        "cons(1,cons(2,nil))",
        "(1,false)",
        "(\"x\",3L,nil)",
        "some(\"a\\tb\\\\c\")",
        "-5",
        "-2147483648",
        "-9223372036854775808L",
        "#x[bv[32] list]",
        "#{\"A b\"}[bool]",
        "#{3}[string]",
        "`#x[bool] /\\ ~#y[bool] ==> #x[bool] \\/ #y[bool]`",
        "`bv_sge(#k[bv[32]], bv_const[32](0))`",
        "`forall #k[bv[32]]. #k[bv[32]] #= bv_const[32](1)`",
        "`exists #p[bool] : #p[bool]. smt_let(#q[bool], #p[bool], #q[bool])`",
        "`#is_cons(#l[bool list]) /\\ #cons_1(#l[bool list])`",
        "`#if true then false else #x[bool]`",
    ] {
        let v = parse_ground_value(text, &decls, &sigs).unwrap_or_else(|d| panic!("{text}: {}", d.message));
        assert_eq!(v.to_string(), text, "canonical form drifted");
    }
}

#[test]
fn non_ground_terms_are_rejected() {
    let decls = prelude();
    let sigs = ProgramDecls::default();
    for text in ["X", "cons(X,nil)", "1 + 2", "let x = 1 in x", "f(1)", "cons(1)", "`#x[nat]`"] {
        assert!(parse_ground_value(text, &decls, &sigs).is_err(), "{text} should not read");
    }
}
