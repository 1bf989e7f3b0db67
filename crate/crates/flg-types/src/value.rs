//! Runtime type conformance: does a ground value inhabit a type? Used when
//! ingesting fact files and by the evaluator's world invariants. Formula
//! values are compared by their erased sort; a sort that cannot be computed
//! locally (e.g. under an uninterpreted function) is treated as conforming.

use crate::wf::erase_type;
use flg_core::term::{SmtNode, SmtOp};
use flg_core::types::{DataTypeDecls, PreType, Type};
use flg_core::value::{SmtValue, Value};
use flg_core::Name;
use std::collections::BTreeMap;

/// Substitutes type parameters in a declared type.
fn subst(t: &Type, map: &BTreeMap<Name, Type>) -> Type {
    match t {
        Type::Var(a) => map.get(a).cloned().unwrap_or_else(|| Type::Var(a.clone())),
        Type::Base(b) => Type::Base(*b),
        Type::Adt(d, args) => Type::Adt(d.clone(), args.iter().map(|x| subst(x, map)).collect()),
        Type::Smt(p) => match subst(&p.clone().into_type(), map).as_pre() {
            Some(p) => Type::Smt(p),
            None => Type::Smt(p.clone()),
        },
        Type::Sym(p) => match subst(&p.clone().into_type(), map).as_pre() {
            Some(p) => Type::Sym(p),
            None => Type::Sym(p.clone()),
        },
        Type::Model => Type::Model,
    }
}

fn erased(t: &Type) -> Option<PreType> {
    erase_type(t).ok()
}

pub fn value_has_type(decls: &DataTypeDecls, v: &Value, t: &Type) -> bool {
    match (v, t) {
        (Value::Const(k), Type::Base(b)) => k.type_of() == *b,
        (Value::Ctor(c, args), Type::Adt(d, targs)) => {
            let Some((owner, adt, ctor)) = decls.ctor(c) else {
                return false;
            };
            if owner != d || adt.params.len() != targs.len() || ctor.args.len() != args.len() {
                return false;
            }
            let map: BTreeMap<Name, Type> =
                adt.params.iter().cloned().zip(targs.iter().cloned()).collect();
            args.iter()
                .zip(&ctor.args)
                .all(|(v, at)| value_has_type(decls, v, &subst(at, &map)))
        }
        (Value::Model(_), Type::Model) => true,
        (Value::Smt(sv), Type::Smt(p)) => {
            let Some(want) = erased(&p.clone().into_type()) else {
                return false;
            };
            match smt_sort(decls, sv) {
                Some(got) => got == want,
                None => true,
            }
        }
        (Value::Smt(sv), Type::Sym(p)) => {
            let SmtNode::Var { ty, .. } = &**sv else {
                return false;
            };
            match (erased(&ty.clone().into_type()), erased(&p.clone().into_type())) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            }
        }
        _ => false,
    }
}

/// The erased result sort of a formula value, when it is locally computable.
pub(crate) fn smt_sort(decls: &DataTypeDecls, sv: &SmtValue) -> Option<PreType> {
    match sv {
        SmtNode::Var { ty, .. } => erased(&ty.clone().into_type()),
        SmtNode::ConstK(k) => Some(PreType::Base(k.type_of())),
        SmtNode::Ctor(c, kids) => {
            let (owner, adt, ctor) = decls.ctor(c)?;
            let mut map: BTreeMap<Name, PreType> = BTreeMap::new();
            for (kid, at) in kids.iter().zip(&ctor.args) {
                if let Value::Smt(ks) = kid {
                    if let Some(s) = smt_sort(decls, ks) {
                        bind_sort(at, &s, &mut map);
                    }
                }
            }
            let args: Option<Vec<Type>> =
                adt.params.iter().map(|p| map.get(p).map(|s| s.clone().into_type())).collect();
            Some(PreType::Adt(owner.clone(), args?))
        }
        SmtNode::Op(op, kids) => match op {
            SmtOp::Not
            | SmtOp::AndOp
            | SmtOp::OrOp
            | SmtOp::Imp
            | SmtOp::SmtEq
            | SmtOp::BvSlt
            | SmtOp::BvSle
            | SmtOp::BvSgt
            | SmtOp::BvSge
            | SmtOp::BvUlt
            | SmtOp::BvUle
            | SmtOp::BvUgt
            | SmtOp::BvUge => Some(PreType::Base(flg_core::types::Base::Bool)),
            SmtOp::BvConst(k) => Some(PreType::Base(flg_core::types::Base::Bv(*k))),
            SmtOp::Ite => kid_sort(decls, kids.get(1)?),
            _ => kid_sort(decls, kids.first()?),
        },
        SmtNode::Let { body, .. } => kid_sort(decls, body),
        SmtNode::Quant { .. } => Some(PreType::Base(flg_core::types::Base::Bool)),
        SmtNode::Uf(..) => None,
        SmtNode::Tester(..) => Some(PreType::Base(flg_core::types::Base::Bool)),
        SmtNode::Getter(c, i, kid) => {
            let (owner, adt, ctor) = decls.ctor(c)?;
            let at = ctor.args.get(*i as usize - 1)?;
            let PreType::Adt(d, targs) = kid_sort(decls, kid)? else {
                return None;
            };
            if d != *owner || targs.len() != adt.params.len() {
                return None;
            }
            let map: BTreeMap<Name, Type> =
                adt.params.iter().cloned().zip(targs).collect();
            erased(&subst(at, &map))
        }
    }
}

fn kid_sort(decls: &DataTypeDecls, kid: &Value) -> Option<PreType> {
    match kid {
        Value::Smt(sv) => smt_sort(decls, sv),
        _ => None,
    }
}

/// Binds type parameters by matching a declared argument type against an
/// actual erased sort. First binding wins; mismatches are ignored, since the
/// caller only needs a best-effort instantiation.
fn bind_sort(decl: &Type, actual: &PreType, map: &mut BTreeMap<Name, PreType>) {
    match (decl, actual) {
        (Type::Var(a), s) => {
            map.entry(a.clone()).or_insert_with(|| s.clone());
        }
        (Type::Smt(p), s) | (Type::Sym(p), s) => bind_sort(&p.clone().into_type(), s, map),
        (Type::Adt(d1, args1), PreType::Adt(d2, args2)) if d1 == d2 => {
            for (a, b) in args1.iter().zip(args2) {
                if let Some(bp) = b.as_pre() {
                    bind_sort(a, &bp, map);
                }
            }
        }
        _ => {}
    }
}
