//! Reader for ground terms as they appear in fact files and tuple dumps.
//! Accepts exactly the syntax the value printer emits: constants,
//! constructor terms, list/tuple sugar, and quoted formulas. Variables,
//! calls, and models are not ground and are rejected.

use crate::ast::{SExpr, SExprKind, SFormula, SFormulaKind, STy, STyKind};
use crate::{grammar, lex};
use flg_core::diag::Diagnostic;
use flg_core::term::{QuantKind, SmtNode, SmtOp};
use flg_core::types::{tuple_adt, DataTypeDecls, PreType, ProgramDecls, Type};
use flg_core::value::{SmtValue, Value};
use flg_core::{name, Name};
use std::sync::Arc;

pub fn parse_ground_value(
    text: &str,
    decls: &DataTypeDecls,
    sigs: &ProgramDecls,
) -> Result<Value, Diagnostic> {
    let toks = lex::tokenize(text, u16::MAX - 1)?;
    let e = grammar::parse_single_expr(&toks)?;
    let cx = Ground { decls, sigs };
    cx.value(&e)
}

struct Ground<'a> {
    decls: &'a DataTypeDecls,
    sigs: &'a ProgramDecls,
}

type GResult<T> = Result<T, Diagnostic>;

impl<'a> Ground<'a> {
    fn err<T>(&self, msg: impl Into<String>, e: &SExpr) -> GResult<T> {
        Err(Diagnostic::error("ground", msg, e.span))
    }

    fn ctor_arity(&self, n: &Name) -> Option<usize> {
        self.decls.ctor(n).map(|(_, _, d)| d.args.len())
    }

    fn value(&self, e: &SExpr) -> GResult<Value> {
        match &e.kind {
            SExprKind::Const(c) => Ok(Value::Const(c.clone())),
            SExprKind::Ident(n) => match self.ctor_arity(n) {
                Some(0) => Ok(Value::Ctor(n.clone(), Arc::from(Vec::new()))),
                Some(k) => self.err(format!("constructor `{n}` expects {k} arguments"), e),
                None => self.err(format!("`{n}` is not a constructor"), e),
            },
            SExprKind::Call(n, args) => match self.ctor_arity(n) {
                Some(k) if k == args.len() => {
                    let args: GResult<Vec<Value>> = args.iter().map(|a| self.value(a)).collect();
                    Ok(Value::Ctor(n.clone(), Arc::from(args?)))
                }
                Some(k) => self.err(format!("constructor `{n}` expects {k} arguments"), e),
                None => self.err(format!("`{n}` is not a constructor"), e),
            },
            SExprKind::Tuple(items) => {
                let Some(adt) = tuple_adt(items.len()) else {
                    return self.err("tuples have 2 to 8 components", e);
                };
                let args: GResult<Vec<Value>> = items.iter().map(|a| self.value(a)).collect();
                Ok(Value::Ctor(name(adt), Arc::from(args?)))
            }
            SExprKind::List(items) => {
                let mut out = Value::Ctor(name("nil"), Arc::from(Vec::new()));
                for i in items.iter().rev() {
                    out = Value::Ctor(name("cons"), Arc::from(vec![self.value(i)?, out]));
                }
                Ok(out)
            }
            SExprKind::Cons(h, t) => {
                let h = self.value(h)?;
                let t = self.value(t)?;
                Ok(Value::Ctor(name("cons"), Arc::from(vec![h, t])))
            }
            SExprKind::Quote(f) => Ok(Value::Smt(Arc::new(self.formula(f)?))),
            SExprKind::SmtVar { name: nm, ty } => {
                let node = self.smt_var(nm, ty)?;
                Ok(Value::Smt(Arc::new(node)))
            }
            _ => self.err("not a ground term", e),
        }
    }

    fn smt_var(&self, nm: &SExpr, ty: &STy) -> GResult<SmtValue> {
        let nv = self.value(nm)?;
        let ty = self.pretype(ty)?;
        Ok(SmtNode::Var { name: nv, ty })
    }

    fn wrap(&self, n: SmtValue) -> Value {
        Value::Smt(Arc::new(n))
    }

    fn formula(&self, f: &SFormula) -> GResult<SmtValue> {
        let kids = |fs: &[SFormula]| -> GResult<Vec<Value>> {
            fs.iter().map(|x| Ok(self.wrap(self.formula(x)?))).collect()
        };
        match &f.kind {
            SFormulaKind::Const(c) => Ok(SmtNode::ConstK(c.clone())),
            SFormulaKind::Ident(n) => {
                if let Some(k) = self.ctor_arity(n) {
                    if k == 0 {
                        return Ok(SmtNode::Ctor(n.clone(), Vec::new()));
                    }
                    return Err(Diagnostic::error(
                        "ground",
                        format!("constructor `{n}` expects {k} arguments"),
                        f.span,
                    ));
                }
                if let Some(sig) = self.sigs.ufs.get(n) {
                    if sig.args.is_empty() {
                        return Ok(SmtNode::Uf(n.clone(), Vec::new()));
                    }
                }
                Err(Diagnostic::error("ground", format!("`{n}` is not a constructor"), f.span))
            }
            SFormulaKind::Call(n, args) => {
                if let Some(op) = crate::desugar::formula_op(n) {
                    if op.arity() == args.len() {
                        return Ok(SmtNode::Op(op, kids(args)?));
                    }
                }
                if let Some(k) = self.ctor_arity(n) {
                    if k == args.len() {
                        return Ok(SmtNode::Ctor(n.clone(), kids(args)?));
                    }
                    return Err(Diagnostic::error(
                        "ground",
                        format!("constructor `{n}` expects {k} arguments"),
                        f.span,
                    ));
                }
                if let Some(sig) = self.sigs.ufs.get(n) {
                    if sig.args.len() == args.len() {
                        return Ok(SmtNode::Uf(n.clone(), kids(args)?));
                    }
                }
                Err(Diagnostic::error("ground", format!("`{n}` is not a constructor"), f.span))
            }
            SFormulaKind::Tuple(items) => {
                let Some(adt) = tuple_adt(items.len()) else {
                    return Err(Diagnostic::error("ground", "tuples have 2 to 8 components", f.span));
                };
                Ok(SmtNode::Ctor(name(adt), kids(items)?))
            }
            SFormulaKind::Not(a) => Ok(SmtNode::Op(SmtOp::Not, kids(std::slice::from_ref(a))?)),
            SFormulaKind::And(a, b) => Ok(SmtNode::Op(SmtOp::AndOp, kids(&[(**a).clone(), (**b).clone()])?)),
            SFormulaKind::Or(a, b) => Ok(SmtNode::Op(SmtOp::OrOp, kids(&[(**a).clone(), (**b).clone()])?)),
            SFormulaKind::Imp(a, b) => Ok(SmtNode::Op(SmtOp::Imp, kids(&[(**a).clone(), (**b).clone()])?)),
            SFormulaKind::SmtEq(a, b) => Ok(SmtNode::Op(SmtOp::SmtEq, kids(&[(**a).clone(), (**b).clone()])?)),
            SFormulaKind::Ite(a, b, c) => {
                Ok(SmtNode::Op(SmtOp::Ite, kids(&[(**a).clone(), (**b).clone(), (**c).clone()])?))
            }
            SFormulaKind::BvConst(k, a) => {
                Ok(SmtNode::Op(SmtOp::BvConst(*k), kids(std::slice::from_ref(a))?))
            }
            SFormulaKind::SmtLet(v, b, body) => Ok(SmtNode::Let {
                var: self.wrap(self.formula(v)?),
                bound: self.wrap(self.formula(b)?),
                body: self.wrap(self.formula(body)?),
            }),
            SFormulaKind::Quant { forall, binders, patterns, body } => Ok(SmtNode::Quant {
                kind: if *forall { QuantKind::Forall } else { QuantKind::Exists },
                binders: kids(binders)?,
                patterns: kids(patterns)?,
                body: self.wrap(self.formula(body)?),
            }),
            SFormulaKind::Tester(c, a) => {
                if self.ctor_arity(c).is_none() {
                    return Err(Diagnostic::error("ground", format!("unknown constructor `{c}`"), f.span));
                }
                Ok(SmtNode::Tester(c.clone(), self.wrap(self.formula(a)?)))
            }
            SFormulaKind::Getter(c, i, a) => {
                if self.ctor_arity(c).is_none() {
                    return Err(Diagnostic::error("ground", format!("unknown constructor `{c}`"), f.span));
                }
                Ok(SmtNode::Getter(c.clone(), *i, self.wrap(self.formula(a)?)))
            }
            SFormulaKind::SmtVar { name: nm, ty } => self.smt_var(nm, ty),
        }
    }

    /// Ground terms carry alias-free types, exactly as the printer writes
    /// them.
    fn pretype(&self, sty: &STy) -> GResult<PreType> {
        match self.ty(sty)? {
            Type::Base(b) => Ok(PreType::Base(b)),
            Type::Adt(n, args) => Ok(PreType::Adt(n, args)),
            Type::Var(a) => Ok(PreType::Var(a)),
            _ => Err(Diagnostic::error("ground", "SMT variables are indexed by a concrete type", sty.span)),
        }
    }

    fn ty(&self, sty: &STy) -> GResult<Type> {
        match &sty.kind {
            STyKind::Bool => Ok(Type::Base(flg_core::types::Base::Bool)),
            STyKind::Str => Ok(Type::Base(flg_core::types::Base::Str)),
            STyKind::Bv(k) => Ok(Type::Base(flg_core::types::Base::Bv(*k))),
            STyKind::Model => Ok(Type::Model),
            STyKind::Var(a) => Ok(Type::Var(a.clone())),
            STyKind::Tuple(parts) => {
                let Some(adt) = tuple_adt(parts.len()) else {
                    return Err(Diagnostic::error("ground", "tuples have 2 to 8 components", sty.span));
                };
                let args: GResult<Vec<Type>> = parts.iter().map(|p| self.ty(p)).collect();
                Ok(Type::Adt(name(adt), args?))
            }
            STyKind::Smt(inner) => match self.ty(inner)?.as_pre() {
                Some(p) => Ok(Type::Smt(p)),
                None => Err(Diagnostic::error("ground", "`smt` applies to a concrete type", sty.span)),
            },
            STyKind::Sym(inner) => match self.ty(inner)?.as_pre() {
                Some(p) => Ok(Type::Sym(p)),
                None => Err(Diagnostic::error("ground", "`sym` applies to a concrete type", sty.span)),
            },
            STyKind::App(n, args) => match self.decls.adts.get(n) {
                None => Err(Diagnostic::error("ground", format!("unknown type `{n}`"), sty.span)),
                Some(adt) if adt.params.len() != args.len() => Err(Diagnostic::error(
                    "ground",
                    format!("`{n}` expects {} type arguments, got {}", adt.params.len(), args.len()),
                    sty.span,
                )),
                Some(_) => {
                    let args: GResult<Vec<Type>> = args.iter().map(|a| self.ty(a)).collect();
                    Ok(Type::Adt(n.clone(), args?))
                }
            },
        }
    }
}
