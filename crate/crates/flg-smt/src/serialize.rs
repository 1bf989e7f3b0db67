//! Value-tree to SMT-LIB term rendering. The expected sort threads downward
//! so polymorphic constructors (a bare `nil`) can be `as`-qualified; a
//! constructor whose sort neither the context nor the children determine is
//! a contract violation, not a guess.

use crate::sorts::{contract, ctor_arg_sorts, infer_sort, mangle_var, render_sort, SmtEnv};
use crate::SmtError;
use flg_core::term::{Constant, QuantKind, SmtNode, SmtOp};
use flg_core::types::{Base, PreType};
use flg_core::value::Value;

pub(crate) fn render_term(
    env: SmtEnv,
    v: &Value,
    expected: Option<&PreType>,
    out: &mut String,
) -> Result<(), SmtError> {
    match v {
        Value::Const(k) => render_constant(k, out),
        Value::Ctor(c, kids) => render_ctor(env, v, c, kids, expected, out),
        Value::Model(_) => Err(contract("model value inside a formula")),
        Value::Smt(node) => match &**node {
            SmtNode::Var { name, ty } => {
                out.push_str(&mangle_var(name, ty)?);
                Ok(())
            }
            SmtNode::ConstK(k) => render_constant(k, out),
            SmtNode::Ctor(c, kids) => render_ctor(env, v, c, kids, expected, out),
            SmtNode::Op(op, kids) => render_op(env, *op, kids, out),
            SmtNode::Let { var, bound, body } => {
                let Value::Smt(vn) = var else {
                    return Err(contract("let binder is not an SMT variable"));
                };
                let SmtNode::Var { name, ty } = &**vn else {
                    return Err(contract("let binder is not an SMT variable"));
                };
                out.push_str("(let ((");
                out.push_str(&mangle_var(name, ty)?);
                out.push(' ');
                render_term(env, bound, Some(ty), out)?;
                out.push_str(")) ");
                render_term(env, body, expected, out)?;
                out.push(')');
                Ok(())
            }
            SmtNode::Quant { kind, binders, patterns, body } => {
                out.push_str(match kind {
                    QuantKind::Forall => "(forall (",
                    QuantKind::Exists => "(exists (",
                });
                for (i, b) in binders.iter().enumerate() {
                    let Value::Smt(bn) = b else {
                        return Err(contract("quantifier binder is not an SMT variable"));
                    };
                    let SmtNode::Var { name, ty } = &**bn else {
                        return Err(contract("quantifier binder is not an SMT variable"));
                    };
                    if i > 0 {
                        out.push(' ');
                    }
                    out.push('(');
                    out.push_str(&mangle_var(name, ty)?);
                    out.push(' ');
                    out.push_str(&render_sort(ty)?);
                    out.push(')');
                }
                out.push_str(") ");
                if patterns.is_empty() {
                    render_term(env, body, Some(&PreType::Base(Base::Bool)), out)?;
                } else {
                    out.push_str("(! ");
                    render_term(env, body, Some(&PreType::Base(Base::Bool)), out)?;
                    for p in patterns {
                        out.push_str(" :pattern (");
                        render_term(env, p, None, out)?;
                        out.push(')');
                    }
                    out.push(')');
                }
                out.push(')');
                Ok(())
            }
            SmtNode::Uf(f, kids) => {
                let sig = env
                    .ufs
                    .get(f)
                    .ok_or_else(|| contract(format!("unknown uninterpreted function `{f}`")))?;
                if sig.args.len() != kids.len() {
                    return Err(contract(format!("arity mismatch applying `{f}`")));
                }
                out.push('(');
                out.push_str(f);
                for (kid, ty) in kids.iter().zip(sig.args.iter()) {
                    out.push(' ');
                    render_term(env, kid, Some(ty), out)?;
                }
                out.push(')');
                Ok(())
            }
            SmtNode::Tester(c, kid) => {
                out.push_str("(is-");
                out.push_str(c);
                out.push(' ');
                render_term(env, kid, None, out)?;
                out.push(')');
                Ok(())
            }
            SmtNode::Getter(c, i, kid) => {
                out.push('(');
                out.push_str(c);
                out.push('!');
                out.push_str(&i.to_string());
                out.push(' ');
                render_term(env, kid, None, out)?;
                out.push(')');
                Ok(())
            }
        },
    }
}

fn render_constant(k: &Constant, out: &mut String) -> Result<(), SmtError> {
    match k {
        Constant::Bool(b) => {
            out.push_str(if *b { "true" } else { "false" });
            Ok(())
        }
        Constant::Bv32(n) => {
            out.push_str(&format!("#x{:08x}", *n as u32));
            Ok(())
        }
        Constant::Bv64(n) => {
            out.push_str(&format!("#x{:016x}", *n as u64));
            Ok(())
        }
        Constant::Str(_) => Err(contract("string constant inside a formula")),
    }
}

fn render_ctor(
    env: SmtEnv,
    whole: &Value,
    c: &str,
    kids: &[Value],
    expected: Option<&PreType>,
    out: &mut String,
) -> Result<(), SmtError> {
    let (owner, adt, cd) =
        env.decls.ctor(c).ok_or_else(|| contract(format!("unknown constructor `{c}`")))?;
    if adt.uninterpreted {
        return Err(contract(format!("constructor `{c}` of an uninterpreted sort")));
    }
    if cd.args.len() != kids.len() {
        return Err(contract(format!("arity mismatch applying constructor `{c}`")));
    }
    let parametric = !adt.params.is_empty();
    let owner = owner.clone();

    // Parametric constructors are always `as`-qualified with their full
    // instance sort; one uniform rule keeps the output byte-stable.
    let sort = if parametric {
        let inferred = infer_sort(env, whole)?;
        let sort = match (inferred, expected) {
            (Some(s), _) => s,
            (None, Some(e)) => e.clone(),
            (None, None) => {
                return Err(contract(format!(
                    "sort of polymorphic constructor `{c}` is underdetermined"
                )))
            }
        };
        match &sort {
            PreType::Adt(d, _) if **d == *owner => Some(sort),
            _ => return Err(contract(format!("constructor `{c}` used at a foreign sort"))),
        }
    } else {
        None
    };

    let head = match &sort {
        Some(s) => format!("(as {c} {})", render_sort(s)?),
        None => c.to_string(),
    };
    if kids.is_empty() {
        out.push_str(&head);
        return Ok(());
    }

    let owner_args: Vec<_> = match &sort {
        Some(PreType::Adt(_, args)) => args.clone(),
        _ => vec![],
    };
    let slots = ctor_arg_sorts(env, c, &owner_args)?;
    out.push('(');
    out.push_str(&head);
    for (kid, slot) in kids.iter().zip(slots.iter()) {
        out.push(' ');
        render_term(env, kid, Some(slot), out)?;
    }
    out.push(')');
    Ok(())
}

fn render_op(env: SmtEnv, op: SmtOp, kids: &[Value], out: &mut String) -> Result<(), SmtError> {
    use SmtOp::*;
    let fixed = match op {
        Not => Some(("not", 1)),
        AndOp => Some(("and", 2)),
        OrOp => Some(("or", 2)),
        Imp => Some(("=>", 2)),
        BvNeg => Some(("bvneg", 1)),
        BvAdd => Some(("bvadd", 2)),
        BvSub => Some(("bvsub", 2)),
        BvMul => Some(("bvmul", 2)),
        BvSdiv => Some(("bvsdiv", 2)),
        BvSrem => Some(("bvsrem", 2)),
        BvAnd => Some(("bvand", 2)),
        BvOr => Some(("bvor", 2)),
        BvXor => Some(("bvxor", 2)),
        BvShl => Some(("bvshl", 2)),
        BvLshr => Some(("bvlshr", 2)),
        BvAshr => Some(("bvashr", 2)),
        BvSlt => Some(("bvslt", 2)),
        BvSle => Some(("bvsle", 2)),
        BvSgt => Some(("bvsgt", 2)),
        BvSge => Some(("bvsge", 2)),
        BvUlt => Some(("bvult", 2)),
        BvUle => Some(("bvule", 2)),
        BvUgt => Some(("bvugt", 2)),
        BvUge => Some(("bvuge", 2)),
        SmtEq | Ite | BvConst(_) => None,
    };
    if let Some((sym, arity)) = fixed {
        if kids.len() != arity {
            return Err(contract(format!("arity mismatch on `{}`", op.name())));
        }
        out.push('(');
        out.push_str(sym);
        for kid in kids {
            out.push(' ');
            render_term(env, kid, None, out)?;
        }
        out.push(')');
        return Ok(());
    }
    match op {
        SmtEq => {
            if kids.len() != 2 {
                return Err(contract("arity mismatch on `smt_eq`"));
            }
            let operand = match infer_sort(env, &kids[0])? {
                Some(s) => Some(s),
                None => infer_sort(env, &kids[1])?,
            };
            out.push_str("(= ");
            render_term(env, &kids[0], operand.as_ref(), out)?;
            out.push(' ');
            render_term(env, &kids[1], operand.as_ref(), out)?;
            out.push(')');
            Ok(())
        }
        Ite => {
            if kids.len() != 3 {
                return Err(contract("arity mismatch on `smt_ite`"));
            }
            let branch = match infer_sort(env, &kids[1])? {
                Some(s) => Some(s),
                None => infer_sort(env, &kids[2])?,
            };
            out.push_str("(ite ");
            render_term(env, &kids[0], Some(&PreType::Base(Base::Bool)), out)?;
            out.push(' ');
            render_term(env, &kids[1], branch.as_ref(), out)?;
            out.push(' ');
            render_term(env, &kids[2], branch.as_ref(), out)?;
            out.push(')');
            Ok(())
        }
        BvConst(k) => {
            if kids.len() != 1 {
                return Err(contract("arity mismatch on `bv_const`"));
            }
            let n = match &kids[0] {
                Value::Const(Constant::Bv32(n)) => *n as i128,
                Value::Const(Constant::Bv64(n)) => *n as i128,
                Value::Smt(node) => match &**node {
                    SmtNode::ConstK(Constant::Bv32(n)) => *n as i128,
                    SmtNode::ConstK(Constant::Bv64(n)) => *n as i128,
                    _ => return Err(contract("bv_const argument is not a concrete integer")),
                },
                _ => return Err(contract("bv_const argument is not a concrete integer")),
            };
            match k {
                32 => out.push_str(&format!("#x{:08x}", n as u32)),
                64 => out.push_str(&format!("#x{:016x}", n as u64)),
                _ => return Err(contract(format!("unsupported bit width {k}"))),
            }
            Ok(())
        }
        _ => unreachable!("handled by the fixed table"),
    }
}
