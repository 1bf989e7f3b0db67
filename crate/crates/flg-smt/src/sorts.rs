//! Sort rendering, sort inference over value trees, and solver-symbol
//! mangling. Everything here is deterministic: equal inputs produce equal
//! text, which the memo cache and replay transcripts both rely on.

use crate::SmtError;
use flg_core::hash::{canonical_hash, short_hex};
use flg_core::term::{Constant, SmtNode, SmtOp};
use flg_core::types::{Base, DataTypeDecls, PreType, Type, UfSig};
use flg_core::value::Value;
use flg_core::Name;
use std::collections::BTreeMap;

/// The declaration context a query is built against.
#[derive(Clone, Copy)]
pub struct SmtEnv<'a> {
    pub decls: &'a DataTypeDecls,
    pub ufs: &'a BTreeMap<Name, UfSig>,
}

pub(crate) fn contract(msg: impl Into<String>) -> SmtError {
    SmtError::Contract(msg.into())
}

/// Strips smt/sym wrappers down to the pre-type skeleton. Type variables
/// survive only inside datatype declarations, never in query positions.
pub(crate) fn strip(ty: &Type) -> Result<PreType, SmtError> {
    match ty {
        Type::Base(b) => Ok(PreType::Base(*b)),
        Type::Adt(d, args) => Ok(PreType::Adt(d.clone(), args.clone())),
        Type::Var(a) => Ok(PreType::Var(a.clone())),
        Type::Smt(p) | Type::Sym(p) => strip(&p.clone().into_type()),
        Type::Model => Err(contract("model type reached the solver layer")),
    }
}

/// SMT-LIB text of a sort.
pub(crate) fn render_sort(ty: &PreType) -> Result<String, SmtError> {
    match ty {
        PreType::Base(Base::Bool) => Ok("Bool".into()),
        PreType::Base(Base::Bv(k)) => Ok(format!("(_ BitVec {k})")),
        PreType::Base(Base::Str) => Err(contract("string type reached the solver layer")),
        PreType::Var(a) => Err(contract(format!("open sort `{a}` in a query"))),
        PreType::Adt(d, args) => {
            if args.is_empty() {
                Ok(d.to_string())
            } else {
                let mut out = format!("({d}");
                for a in args {
                    out.push(' ');
                    out.push_str(&render_sort(&strip(a)?)?);
                }
                out.push(')');
                Ok(out)
            }
        }
    }
}

/// Compact sort spelling used in mangled variable names. Preorder over a
/// fixed-arity signature, so distinct sorts never share a tag.
pub(crate) fn sort_tag(ty: &PreType) -> Result<String, SmtError> {
    match ty {
        PreType::Base(Base::Bool) => Ok("bool".into()),
        PreType::Base(Base::Bv(k)) => Ok(format!("bv{k}")),
        PreType::Base(Base::Str) => Err(contract("string type reached the solver layer")),
        PreType::Var(a) => Err(contract(format!("open sort `{a}` in a query"))),
        PreType::Adt(d, args) => {
            let mut out = d.to_string();
            for a in args {
                out.push('.');
                out.push_str(&sort_tag(&strip(a)?)?);
            }
            Ok(out)
        }
    }
}

fn sanitize(s: &str) -> String {
    let cleaned: String = s
        .chars()
        .take(24)
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if cleaned.is_empty() {
        "v".into()
    } else {
        cleaned
    }
}

/// Solver symbol for the SMT variable `#{name}[ty]`. The readable prefix is
/// cosmetic; the hash of the name value plus the sort tag make it unique.
pub(crate) fn mangle_var(name: &Value, ty: &PreType) -> Result<String, SmtError> {
    let prefix = match name {
        Value::Const(Constant::Str(s)) => sanitize(s),
        Value::Const(k) => sanitize(&k.to_string()),
        Value::Ctor(c, _) => sanitize(c),
        Value::Smt(_) => "f".into(),
        Value::Model(_) => "m".into(),
    };
    Ok(format!("{prefix}!{}!{}", short_hex(&canonical_hash(name)), sort_tag(ty)?))
}

/// Instantiates a constructor's declared argument types at a concrete owner
/// sort. `owner_args` are the type arguments of the (already inferred or
/// expected) ADT sort, positionally matching the declaration's parameters.
pub(crate) fn ctor_arg_sorts(
    env: SmtEnv,
    ctor: &str,
    owner_args: &[Type],
) -> Result<Vec<PreType>, SmtError> {
    let (_, adt, cd) =
        env.decls.ctor(ctor).ok_or_else(|| contract(format!("unknown constructor `{ctor}`")))?;
    let binds: BTreeMap<&Name, &Type> = adt.params.iter().zip(owner_args.iter()).collect();
    cd.args.iter().map(|a| subst_params(a, &binds)).collect()
}

fn subst_params(ty: &Type, binds: &BTreeMap<&Name, &Type>) -> Result<PreType, SmtError> {
    match strip(ty)? {
        PreType::Var(a) => match binds.get(&a) {
            Some(t) => strip(t),
            None => Err(contract(format!("unbound datatype parameter `{a}`"))),
        },
        PreType::Base(b) => Ok(PreType::Base(b)),
        PreType::Adt(d, args) => {
            let args = args
                .iter()
                .map(|a| subst_params(a, binds).map(PreType::into_type))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PreType::Adt(d, args))
        }
    }
}

/// Best-effort sort of a value in the c^SMT image. `None` means the sort is
/// underdetermined locally (a bare polymorphic constructor) and must come
/// from the surrounding context.
pub(crate) fn infer_sort(env: SmtEnv, v: &Value) -> Result<Option<PreType>, SmtError> {
    match v {
        Value::Const(k) => Ok(Some(PreType::Base(k.type_of()))),
        Value::Ctor(c, kids) => infer_ctor_sort(env, c, kids),
        Value::Model(_) => Err(contract("model value inside a formula")),
        Value::Smt(node) => match &**node {
            SmtNode::Var { ty, .. } => Ok(Some(ty.clone())),
            SmtNode::ConstK(k) => Ok(Some(PreType::Base(k.type_of()))),
            SmtNode::Ctor(c, kids) => infer_ctor_sort(env, c, kids),
            SmtNode::Op(op, kids) => infer_op_sort(env, *op, kids),
            SmtNode::Let { body, .. } => infer_sort(env, body),
            SmtNode::Quant { .. } | SmtNode::Tester(..) => Ok(Some(PreType::Base(Base::Bool))),
            SmtNode::Uf(f, _) => match env.ufs.get(f) {
                Some(sig) => Ok(Some(sig.ret.clone())),
                None => Err(contract(format!("unknown uninterpreted function `{f}`"))),
            },
            SmtNode::Getter(c, i, kid) => {
                let Some(PreType::Adt(_, owner_args)) = infer_sort(env, kid)? else {
                    return Ok(None);
                };
                let slots = ctor_arg_sorts(env, c, &owner_args)?;
                match slots.get((*i as usize).wrapping_sub(1)) {
                    Some(s) => Ok(Some(s.clone())),
                    None => Err(contract(format!("getter index {i} out of range for `{c}`"))),
                }
            }
        },
    }
}

fn infer_ctor_sort(env: SmtEnv, c: &str, kids: &[Value]) -> Result<Option<PreType>, SmtError> {
    let (owner, adt, cd) =
        env.decls.ctor(c).ok_or_else(|| contract(format!("unknown constructor `{c}`")))?;
    if adt.params.is_empty() {
        return Ok(Some(PreType::Adt(owner.clone(), vec![])));
    }
    let mut binds: BTreeMap<Name, PreType> = BTreeMap::new();
    for (decl_ty, kid) in cd.args.iter().zip(kids.iter()) {
        if let Some(ks) = infer_sort(env, kid)? {
            bind_params(&strip(decl_ty)?, &ks, &mut binds);
        }
    }
    let mut args = Vec::with_capacity(adt.params.len());
    for p in &adt.params {
        match binds.get(p) {
            Some(t) => args.push(t.clone().into_type()),
            None => return Ok(None),
        }
    }
    Ok(Some(PreType::Adt(owner.clone(), args)))
}

fn bind_params(decl: &PreType, actual: &PreType, binds: &mut BTreeMap<Name, PreType>) {
    match (decl, actual) {
        (PreType::Var(a), t) => {
            binds.entry(a.clone()).or_insert_with(|| t.clone());
        }
        (PreType::Adt(d1, a1), PreType::Adt(d2, a2)) if d1 == d2 => {
            for (x, y) in a1.iter().zip(a2.iter()) {
                if let (Ok(x), Ok(y)) = (strip(x), strip(y)) {
                    bind_params(&x, &y, binds);
                }
            }
        }
        _ => {}
    }
}

fn infer_op_sort(env: SmtEnv, op: SmtOp, kids: &[Value]) -> Result<Option<PreType>, SmtError> {
    use SmtOp::*;
    Ok(match op {
        Not | AndOp | OrOp | Imp | SmtEq | BvSlt | BvSle | BvSgt | BvSge | BvUlt | BvUle
        | BvUgt | BvUge => Some(PreType::Base(Base::Bool)),
        BvConst(k) => Some(PreType::Base(Base::Bv(k))),
        Ite => {
            for kid in kids.iter().skip(1) {
                if let Some(s) = infer_sort(env, kid)? {
                    return Ok(Some(s));
                }
            }
            None
        }
        BvNeg | BvAdd | BvSub | BvMul | BvSdiv | BvSrem | BvAnd | BvOr | BvXor | BvShl
        | BvLshr | BvAshr => {
            for kid in kids {
                if let Some(s) = infer_sort(env, kid)? {
                    return Ok(Some(s));
                }
            }
            None
        }
    })
}
