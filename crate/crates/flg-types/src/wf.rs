//! Mode-indexed type well-formedness and the erase/toSMT type conversions.
//! `smt` is a subkind of `exp`: every type well formed at smt is well formed
//! at exp, but not conversely (type variables, `model`, and `string` are
//! exp-only).

use flg_core::types::{Base, DataTypeDecls, PreType, Type};
use flg_core::Name;
use std::collections::BTreeSet;

/// Type mode m: `exp` governs ordinary expressions, `smt` the types that can
/// appear inside formulas.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Exp,
    Smt,
}

/// A well-formedness or conversion failure, naming the violated rule.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{rule}: {message}")]
pub struct TypeError {
    pub rule: &'static str,
    pub message: String,
}

fn err(rule: &'static str, message: String) -> TypeError {
    TypeError { rule, message }
}

/// The judgment Gamma |-_m tau. `tyvars` is the set of type variables in
/// scope (a function's declared parameters; empty elsewhere).
pub fn type_well_formed(
    decls: &DataTypeDecls,
    tyvars: &BTreeSet<Name>,
    tau: &Type,
    mode: Mode,
) -> Result<(), TypeError> {
    match tau {
        Type::Base(Base::Str) if mode == Mode::Smt => Err(err(
            "t-Base",
            "`string` cannot appear in formulas; the string theory is not supported".into(),
        )),
        Type::Base(_) => Ok(()),
        Type::Var(a) => {
            if mode == Mode::Smt {
                Err(err("t-TVar", format!("type variable `{a}` is not allowed in formulas")))
            } else if !tyvars.contains(a) {
                Err(err("t-TVar", format!("unbound type variable `{a}`")))
            } else {
                Ok(())
            }
        }
        Type::Adt(d, args) => {
            let Some(decl) = decls.adts.get(d) else {
                return Err(err("t-ADT", format!("unknown type `{d}`")));
            };
            if decl.params.len() != args.len() {
                return Err(err(
                    "t-ADT",
                    format!(
                        "type `{d}` expects {} argument(s), got {}",
                        decl.params.len(),
                        args.len()
                    ),
                ));
            }
            for a in args {
                type_well_formed(decls, tyvars, a, mode)?;
            }
            Ok(())
        }
        // smt t and sym t are well formed at either mode when t is smt-wf.
        Type::Smt(t) => type_well_formed(decls, tyvars, &t.clone().into_type(), Mode::Smt)
            .map_err(|e| err("τ-SMT", e.message)),
        Type::Sym(t) => type_well_formed(decls, tyvars, &t.clone().into_type(), Mode::Smt)
            .map_err(|e| err("τ-Sym", e.message)),
        Type::Model => match mode {
            Mode::Exp => Ok(()),
            Mode::Smt => Err(err("τ-Model", "`model` cannot appear in formulas".into())),
        },
    }
}

/// erase(tau): strips every smt/sym wrapper, leaving the underlying pre-type.
/// Defined exactly on the smt-well-formed types (so never on `model`).
pub fn erase_type(tau: &Type) -> Result<PreType, TypeError> {
    match tau {
        Type::Base(b) => Ok(PreType::Base(*b)),
        Type::Var(a) => Err(err(
            "t-TVar",
            format!("erase is undefined on the open type containing `{a}`"),
        )),
        Type::Adt(d, args) => {
            let args = args
                .iter()
                .map(|a| erase_type(a).map(PreType::into_type))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PreType::Adt(d.clone(), args))
        }
        Type::Smt(t) | Type::Sym(t) => erase_type(&t.clone().into_type()),
        Type::Model => Err(err("τ-Model", "erase is undefined on `model`".into())),
    }
}

/// toSMT(tau): the type a value of type tau takes on inside a formula.
/// Pre-types and `smt t` map to `smt erase(t)`; `sym t` stays a name.
pub fn to_smt_type(tau: &Type) -> Result<Type, TypeError> {
    match tau {
        Type::Sym(t) => Ok(Type::Sym(erase_type(&t.clone().into_type())?)),
        Type::Smt(t) => Ok(Type::Smt(erase_type(&t.clone().into_type())?)),
        Type::Model => Err(err("τ-Model", "toSMT is undefined on `model`".into())),
        other => Ok(Type::Smt(erase_type(other)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use flg_core::name;
    use flg_core::types::prelude;

    fn list(elem: Type) -> Type {
        Type::Adt(name("list"), vec![elem])
    }

    #[test]
    fn model_is_exp_only() {
        let d = prelude();
        let none = BTreeSet::new();
        assert!(type_well_formed(&d, &none, &Type::Model, Mode::Exp).is_ok());
        let e = type_well_formed(&d, &none, &Type::Model, Mode::Smt).unwrap_err();
        assert_eq!(e.rule, "τ-Model");
    }

    #[test]
    fn base_types_any_mode_except_string() {
        let d = prelude();
        let none = BTreeSet::new();
        assert!(type_well_formed(&d, &none, &Type::bool(), Mode::Smt).is_ok());
        assert!(type_well_formed(&d, &none, &Type::bv(64), Mode::Smt).is_ok());
        assert!(type_well_formed(&d, &none, &Type::Base(Base::Str), Mode::Exp).is_ok());
        let e = type_well_formed(&d, &none, &Type::Base(Base::Str), Mode::Smt).unwrap_err();
        assert_eq!(e.rule, "t-Base");
    }

    #[test]
    fn tyvar_under_smt_wrapper_fails() {
        let d = prelude();
        let mut scope = BTreeSet::new();
        scope.insert(name("'a"));
        let inner = list(Type::Var(name("'a")));
        let tau = Type::Smt(inner.as_pre().unwrap());
        assert!(type_well_formed(&d, &scope, &inner, Mode::Exp).is_ok());
        let e = type_well_formed(&d, &scope, &tau, Mode::Smt).unwrap_err();
        assert_eq!(e.rule, "τ-SMT");
        assert!(e.message.contains("'a"));
    }

    #[test]
    fn smt_wrapper_embeds_at_exp() {
        let d = prelude();
        let none = BTreeSet::new();
        let tau = list(Type::Smt(PreType::Base(Base::Bool)));
        assert!(type_well_formed(&d, &none, &tau, Mode::Exp).is_ok());
        assert!(type_well_formed(&d, &none, &tau, Mode::Smt).is_ok());
    }

    #[test]
    fn erase_strips_all_wrappers() {
        let inner = list(Type::Smt(PreType::Base(Base::Bool)));
        let tau = Type::Smt(inner.as_pre().unwrap());
        assert_eq!(erase_type(&tau).unwrap().into_type(), list(Type::bool()));
    }

    #[test]
    fn to_smt_lifts_and_fixes() {
        assert_eq!(to_smt_type(&Type::bool()).unwrap(), Type::Smt(PreType::Base(Base::Bool)));
        let sym = Type::Sym(PreType::Base(Base::Bv(32)));
        assert_eq!(to_smt_type(&sym).unwrap(), sym);
        assert!(to_smt_type(&Type::Model).is_err());
    }
}
