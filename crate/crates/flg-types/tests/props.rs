//! Property tests for the type-mode lattice and the checker as a whole:
//! smt is a subkind of exp, erase/toSMT behave like projections, and
//! validation is a pure function of the program.

use flg_core::name;
use flg_core::types::{prelude, Base, DataTypeDecls, Type};
use flg_types::{erase_type, to_smt_type, type_well_formed, validate_program, Mode};
use proptest::prelude::*;
use std::collections::BTreeSet;

/// Declarations the generated types draw from: the prelude plus one
/// monomorphic ADT and one uninterpreted sort.
fn test_decls() -> DataTypeDecls {
    let mut d = prelude();
    d.adts.insert(
        name("shape"),
        flg_core::types::AdtDecl {
            params: vec![],
            ctors: vec![flg_core::types::CtorDecl { name: name("dot"), args: vec![] }],
            uninterpreted: false,
        },
    );
    d.ctor_owner.insert(name("dot"), name("shape"));
    d.adts.insert(
        name("blob"),
        flg_core::types::AdtDecl { params: vec![], ctors: vec![], uninterpreted: true },
    );
    d
}

fn base() -> impl Strategy<Value = Base> {
    prop_oneof![
        Just(Base::Bool),
        Just(Base::Str),
        Just(Base::Bv(32)),
        Just(Base::Bv(64)),
    ]
}

/// Arbitrary types over `test_decls()`, wrappers included. Some output is
/// deliberately ill formed (unknown ADTs, unbound type variables) so the
/// properties see rejections too.
fn ty() -> impl Strategy<Value = Type> {
    let leaf = prop_oneof![
        base().prop_map(Type::Base),
        Just(Type::Model),
        Just(Type::Var(name("'a"))),
        Just(Type::Var(name("'zzz"))),
        Just(Type::Adt(name("shape"), vec![])),
        Just(Type::Adt(name("blob"), vec![])),
        Just(Type::Adt(name("nosuch"), vec![])),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Type::Adt(name("option"), vec![t])),
            inner.clone().prop_map(|t| Type::Adt(name("list"), vec![t])),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Type::Adt(name("tuple2"), vec![a, b])),
            inner.clone().prop_map(|t| match t.as_pre() {
                Some(p) => Type::Smt(p),
                None => t,
            }),
            inner.prop_map(|t| match t.as_pre() {
                Some(p) => Type::Sym(p),
                None => t,
            }),
        ]
    })
}

proptest! {
    /// Subkinding: every type well formed at smt is well formed at exp.
    #[test]
    fn smt_well_formed_types_are_exp_well_formed(tau in ty()) {
        let d = test_decls();
        let scope: BTreeSet<_> = [name("'a")].into();
        if type_well_formed(&d, &scope, &tau, Mode::Smt).is_ok() {
            prop_assert!(type_well_formed(&d, &scope, &tau, Mode::Exp).is_ok(), "{tau:?}");
        }
    }

    /// toSMT is idempotent wherever it is defined.
    #[test]
    fn to_smt_is_idempotent(tau in ty()) {
        if let Ok(sigma) = to_smt_type(&tau) {
            prop_assert_eq!(to_smt_type(&sigma), Ok(sigma.clone()), "from {:?}", tau);
        }
    }

    /// toSMT lands in the smt-well-formed fragment when it starts there.
    #[test]
    fn to_smt_preserves_smt_well_formedness(tau in ty()) {
        let d = test_decls();
        let scope: BTreeSet<_> = [name("'a")].into();
        if type_well_formed(&d, &scope, &tau, Mode::Smt).is_ok() {
            let sigma = to_smt_type(&tau);
            prop_assert!(sigma.is_ok(), "{tau:?}");
            prop_assert!(
                type_well_formed(&d, &scope, &sigma.unwrap(), Mode::Smt).is_ok(),
                "{tau:?}"
            );
        }
    }

    /// erase is total on the smt-well-formed types and a projection: erasing
    /// twice equals erasing once.
    #[test]
    fn erase_is_a_projection_on_smt_types(tau in ty()) {
        let d = test_decls();
        let scope: BTreeSet<_> = [name("'a")].into();
        if type_well_formed(&d, &scope, &tau, Mode::Smt).is_ok() {
            let once = erase_type(&tau);
            prop_assert!(once.is_ok(), "{tau:?}");
            let once = once.unwrap();
            prop_assert_eq!(erase_type(&once.clone().into_type()), Ok(once));
        }
    }

    /// toSMT and erase agree on their domain: one is defined exactly when
    /// the other is, and toSMT of a non-sym type is `smt` of its erasure.
    #[test]
    fn to_smt_erase_domains_coincide(tau in ty()) {
        let s = to_smt_type(&tau);
        let e = erase_type(&tau);
        prop_assert_eq!(s.is_ok(), e.is_ok(), "{:?}", tau);
        if let (Ok(s), Ok(e)) = (s, e) {
            if !matches!(tau, Type::Sym(_)) {
                prop_assert_eq!(s, Type::Smt(e));
            }
        }
    }
}

/// Validation twice over is bit-for-bit identical: same strata, same
/// warnings, same diagnostics in the same order.
#[test]
fn validation_is_deterministic_across_runs() {
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut saw = 0;
    for entry in std::fs::read_dir(&dir).expect("fixtures dir") {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("flg") {
            continue;
        }
        let src = std::fs::read_to_string(&path).unwrap();
        let Ok(prog) = flg_parse::load_source(&src) else { continue };
        let a = format!("{:?}", validate_program(&prog));
        let b = format!("{:?}", validate_program(&prog));
        assert_eq!(a, b, "{}", path.display());
        saw += 1;
    }
    assert!(saw >= 5, "expected to cover the fixture corpus, saw {saw}");
}
