//! Clause and function-body typing. Premises are typed in written order:
//! each variable is bound by the first premise that determines it, and later
//! occurrences must agree. An equality premise runs forward (right side fully
//! bound) or backward (left variable bound, right side a destructuring
//! pattern); backward flow pushes the bound variable's type down through the
//! pattern.

use crate::check::{Checker, Env};
use crate::ty::{MetaKind, Ty};
use flg_core::diag::Span;
use flg_core::term::{Clause, Expr, Formula, FunDef, Pattern, Premise, RelArg, SmtNode};
use flg_core::types::Type;
use flg_core::Name;
use std::collections::{BTreeMap, BTreeSet};

impl<'p> Checker<'p> {
    /// Types one clause and returns the variable typings it establishes.
    pub(crate) fn check_clause_impl(
        &mut self,
        clause: &Clause,
    ) -> Result<BTreeMap<Name, Type>, ()> {
        let mut env = Env::default();
        for prem in &clause.body {
            self.check_premise(&mut env, prem)?;
        }
        let head = &clause.head;
        let Some(sig) = self.prog.sigs.relations.get(&head.pred).cloned() else {
            return self.err("H-Clause", format!("unknown relation `{}`", head.pred), head.span);
        };
        if sig.cols.len() != head.args.len() {
            return self.err(
                "H-Clause",
                format!(
                    "relation `{}` has {} column(s), got {}",
                    head.pred,
                    sig.cols.len(),
                    head.args.len()
                ),
                head.span,
            );
        }
        for (x, col) in head.args.iter().zip(&sig.cols) {
            let Some((tx, _)) = env.clause.get(x).cloned() else {
                return self.err(
                    "H-Clause",
                    format!("head variable `{x}` is not bound by the body (range restriction)"),
                    head.span,
                );
            };
            let want = Ty::from_type(col);
            if let Err(m) = self.cx.unify_sub(&tx, &want) {
                return self.err(
                    "H-Clause",
                    format!(
                        "head variable `{x}` has type `{}`, but the column requires `{}`",
                        m.actual, m.expected
                    ),
                    head.span,
                );
            }
        }
        self.check_obligations();
        if !self.diags.is_empty() {
            return Err(());
        }
        Ok(env
            .clause
            .into_iter()
            .map(|(x, (t, _))| {
                let z = self.cx.zonk(&t);
                (x, self.cx.to_type(&z))
            })
            .collect())
    }

    fn check_premise(&mut self, env: &mut Env, prem: &Premise) -> Result<(), ()> {
        match prem {
            Premise::Pos(atom) | Premise::Neg(atom) => {
                let negated = matches!(prem, Premise::Neg(_));
                let rule = if negated { "P-NegAtom" } else { "P-PosAtom" };
                let Some(sig) = self.prog.sigs.relations.get(&atom.pred).cloned() else {
                    return self.err(rule, format!("unknown relation `{}`", atom.pred), atom.span);
                };
                if sig.cols.len() != atom.args.len() {
                    return self.err(
                        rule,
                        format!(
                            "relation `{}` has {} column(s), got {}",
                            atom.pred,
                            sig.cols.len(),
                            atom.args.len()
                        ),
                        atom.span,
                    );
                }
                for (x, col) in atom.args.iter().zip(&sig.cols) {
                    let want = Ty::from_type(col);
                    match env.clause.get(x).cloned() {
                        Some((tx, _)) => {
                            if let Err(m) = self.cx.unify_sub(&tx, &want) {
                                return self.err(
                                    rule,
                                    format!(
                                        "variable `{x}` has type `{}`, but this column of `{}` requires `{}`",
                                        m.actual, atom.pred, m.expected
                                    ),
                                    atom.span,
                                );
                            }
                        }
                        None if negated => {
                            return self.err(
                                rule,
                                format!(
                                    "variable `{x}` in a negated atom must be bound by an earlier premise"
                                ),
                                atom.span,
                            );
                        }
                        None => {
                            env.clause.insert(x.clone(), (want, atom.span));
                        }
                    }
                }
                Ok(())
            }
            Premise::Eq { var, rhs, span } => {
                let unbound = unbound_in_expr(env, rhs);
                if unbound.is_empty() {
                    let t = self.check_expr(env, rhs)?;
                    match env.clause.get(var).cloned() {
                        Some((tv, _)) => {
                            if let Err(m) = self.cx.join(&tv, &t) {
                                self.err(
                                    "P-Eq-FB",
                                    format!(
                                        "`{var}` has type `{}`, but the right-hand side has type `{}`",
                                        m.actual, m.expected
                                    ),
                                    *span,
                                )?;
                            }
                        }
                        None => {
                            env.clause.insert(var.clone(), (t, *span));
                        }
                    }
                    Ok(())
                } else {
                    let rule = if matches!(rhs, Expr::Quote(..)) {
                        "P-EqSMT-BF"
                    } else {
                        "P-EqCtor-BF"
                    };
                    let Some((tv, _)) = env.clause.get(var).cloned() else {
                        let witness = unbound.iter().next().unwrap();
                        return self.err(
                            rule,
                            format!(
                                "neither side of this equality is fully bound: `{var}` and `{witness}` are both unbound"
                            ),
                            *span,
                        );
                    };
                    self.flow_pattern(env, &tv, rhs, rule)
                }
            }
            Premise::NegEq { var, rhs, span } => {
                let unbound = unbound_in_expr(env, rhs);
                let tv = env.clause.get(var).cloned();
                if !unbound.is_empty() || tv.is_none() {
                    let witness = unbound
                        .iter()
                        .next()
                        .map(|x| x.to_string())
                        .unwrap_or_else(|| var.to_string());
                    return self.err(
                        "P-NegEq",
                        format!(
                            "both sides of `!=` must be bound by earlier premises; `{witness}` is not"
                        ),
                        *span,
                    );
                }
                let t = self.check_expr(env, rhs)?;
                if let Err(m) = self.cx.join(&tv.unwrap().0, &t) {
                    self.err::<()>(
                        "P-NegEq",
                        format!(
                            "`{var}` has type `{}`, but the right-hand side has type `{}`",
                            m.actual, m.expected
                        ),
                        *span,
                    )?;
                }
                Ok(())
            }
        }
    }

    /// Backward-flows `expected` through a destructuring right-hand side,
    /// binding its unbound variables. Fully bound subterms are checked
    /// forward and must agree with their slot.
    fn flow_pattern(
        &mut self,
        env: &mut Env,
        expected: &Ty,
        e: &Expr,
        rule: &'static str,
    ) -> Result<(), ()> {
        if unbound_in_expr(env, e).is_empty() {
            let t = self.check_expr(env, e)?;
            if let Err(m) = self.cx.unify_sub(&t, expected) {
                self.err::<()>(
                    rule,
                    format!(
                        "this part has type `{}`, but `{}` is required by the bound side",
                        m.actual, m.expected
                    ),
                    e.span(),
                )?;
            }
            return Ok(());
        }
        match e {
            Expr::Var(x, span) => {
                // Unbound, or the lookup would have routed us forward.
                env.clause.insert(x.clone(), (expected.clone(), *span));
                Ok(())
            }
            Expr::Ctor(c, args, span) => {
                let (slots, res) = self.instantiate_ctor(c, *span)?;
                if slots.len() != args.len() {
                    return self.err(
                        rule,
                        format!(
                            "constructor `{c}` expects {} argument(s), got {}",
                            slots.len(),
                            args.len()
                        ),
                        *span,
                    );
                }
                if let Err(m) = self.cx.unify_sub(&res, expected) {
                    return self.err(
                        rule,
                        format!(
                            "pattern `{c}` builds a `{}`, but the bound side has type `{}`",
                            m.actual, m.expected
                        ),
                        *span,
                    );
                }
                for (a, slot) in args.iter().zip(&slots) {
                    self.flow_pattern(env, slot, a, rule)?;
                }
                Ok(())
            }
            Expr::Quote(f, _) => self.flow_formula(env, expected, f, rule),
            other => {
                let witness = unbound_in_expr(env, other);
                let witness = witness.iter().next().unwrap();
                self.err(
                    rule,
                    format!(
                        "this right-hand side cannot be inverted; `{witness}` is not bound by an earlier premise"
                    ),
                    other.span(),
                )
            }
        }
    }

    /// flow_pattern for formula terms under a quote.
    fn flow_formula(
        &mut self,
        env: &mut Env,
        expected: &Ty,
        f: &Formula,
        rule: &'static str,
    ) -> Result<(), ()> {
        if unbound_in_formula(env, f).is_empty() {
            let t = self.check_formula(env, f)?;
            if let Err(m) = self.cx.unify_sub(&t, expected) {
                self.err::<()>(
                    rule,
                    format!(
                        "this part of the formula has type `{}`, but `{}` is required",
                        m.actual, m.expected
                    ),
                    f.span(),
                )?;
            }
            return Ok(());
        }
        match f {
            Formula::Unquote(e) => match &**e {
                Expr::Var(x, span) => {
                    self.obligate_metas(expected, *span);
                    env.clause.insert(x.clone(), (expected.clone(), *span));
                    Ok(())
                }
                other => {
                    let witness = unbound_in_expr(env, other);
                    let witness = witness.iter().next().unwrap();
                    self.err(
                        rule,
                        format!(
                            "an unquoted expression here cannot be inverted; `{witness}` is not bound by an earlier premise"
                        ),
                        other.span(),
                    )
                }
            },
            Formula::Node(node, span) => self.flow_node(env, expected, node, *span, rule),
        }
    }

    fn flow_node(
        &mut self,
        env: &mut Env,
        expected: &Ty,
        node: &SmtNode<Formula>,
        span: Span,
        rule: &'static str,
    ) -> Result<(), ()> {
        let (slots, kids, res): (Vec<Ty>, Vec<&Formula>, Ty) = match node {
            SmtNode::Var { .. } | SmtNode::ConstK(_) => {
                // Leaf nodes with unbound parts: the variable seed of `#{e}[t]`
                // cannot be computed backward.
                return self.err(
                    rule,
                    "an SMT variable's name expression must be fully bound".into(),
                    span,
                );
            }
            SmtNode::Ctor(c, kids) => {
                let (slots, res) = self.instantiate_smt_ctor(c, rule, span)?;
                if slots.len() != kids.len() {
                    return self.err(
                        rule,
                        format!(
                            "constructor `{c}` expects {} argument(s), got {}",
                            slots.len(),
                            kids.len()
                        ),
                        span,
                    );
                }
                (slots, kids.iter().collect(), res)
            }
            SmtNode::Op(op, kids) => {
                let (slots, res) = self.smt_op_sig(*op);
                if slots.len() != kids.len() {
                    return self.err(
                        rule,
                        format!(
                            "`{}` expects {} argument(s), got {}",
                            op.name(),
                            slots.len(),
                            kids.len()
                        ),
                        span,
                    );
                }
                (slots, kids.iter().collect(), res)
            }
            SmtNode::Let { var, bound, body } => {
                let a = self.cx.fresh(MetaKind::Any);
                let b = self.cx.fresh(MetaKind::Any);
                (
                    vec![
                        Ty::Sym(Box::new(a.clone())),
                        Ty::Smt(Box::new(a)),
                        Ty::Smt(Box::new(b.clone())),
                    ],
                    vec![var, bound, body],
                    Ty::Smt(Box::new(b)),
                )
            }
            SmtNode::Quant { binders, patterns, body, .. } => {
                let mut slots = Vec::new();
                let mut kids: Vec<&Formula> = Vec::new();
                for bd in binders {
                    slots.push(Ty::Sym(Box::new(self.cx.fresh(MetaKind::Any))));
                    kids.push(bd);
                }
                for pat in patterns {
                    // Patterns are hints; they cannot bind clause variables.
                    if !unbound_in_formula(env, pat).is_empty() {
                        return self.err(
                            rule,
                            "a quantifier pattern must be fully bound".into(),
                            pat.span(),
                        );
                    }
                    slots.push(self.cx.fresh(MetaKind::Any));
                    kids.push(pat);
                }
                slots.push(Ty::Smt(Box::new(Ty::bool())));
                kids.push(body);
                (slots, kids, Ty::Smt(Box::new(Ty::bool())))
            }
            SmtNode::Uf(u, kids) => {
                let Some(sig) = self.prog.sigs.ufs.get(u).cloned() else {
                    return self.err(rule, format!("unknown uninterpreted function `{u}`"), span);
                };
                if sig.args.len() != kids.len() {
                    return self.err(
                        rule,
                        format!(
                            "uninterpreted function `{u}` expects {} argument(s), got {}",
                            sig.args.len(),
                            kids.len()
                        ),
                        span,
                    );
                }
                (
                    sig.args.iter().map(|a| Ty::Smt(Box::new(Ty::from_pre(a)))).collect(),
                    kids.iter().collect(),
                    Ty::Smt(Box::new(Ty::from_pre(&sig.ret))),
                )
            }
            SmtNode::Tester(c, kid) => {
                let t_adt = self.smt_adt_of_ctor(c, rule, span)?;
                (vec![t_adt], vec![kid], Ty::Smt(Box::new(Ty::bool())))
            }
            SmtNode::Getter(c, i, kid) => {
                let Some((owner, adt, decl)) = self.prog.decls.ctor(c) else {
                    return self.err(rule, format!("unknown constructor `{c}`"), span);
                };
                let (owner, params, args) =
                    (owner.clone(), adt.params.clone(), decl.args.clone());
                if *i == 0 || *i as usize > args.len() {
                    return self.err(
                        rule,
                        format!(
                            "constructor `{c}` has {} argument(s); `#{c}_{i}` is out of range",
                            args.len()
                        ),
                        span,
                    );
                }
                let mut map = BTreeMap::new();
                for p in &params {
                    let m = self.cx.fresh(MetaKind::Any);
                    map.insert(p.clone(), m);
                }
                let t_adt = Ty::Smt(Box::new(Ty::Adt(
                    owner,
                    params.iter().map(|p| map[p].clone()).collect(),
                )));
                let res = match self.to_smt_decl(&args[*i as usize - 1], &map) {
                    Ok(t) => t,
                    Err(msg) => return self.err(rule, msg, span),
                };
                (vec![t_adt], vec![kid], res)
            }
        };
        if let Err(m) = self.cx.unify_sub(&res, expected) {
            return self.err(
                rule,
                format!(
                    "this formula has type `{}`, but `{}` is required by the bound side",
                    m.actual, m.expected
                ),
                span,
            );
        }
        for (slot, kid) in slots.iter().zip(kids) {
            self.flow_formula(env, slot, kid, rule)?;
        }
        Ok(())
    }

    /// Records erasure obligations for every meta inside a formula slot that
    /// is about to be stored as a clause variable's type.
    fn obligate_metas(&mut self, t: &Ty, span: Span) {
        match self.cx.resolve(t) {
            Ty::Meta(m) => self.obligations.push((m, span)),
            Ty::Adt(_, args) => {
                for a in &args {
                    self.obligate_metas(a, span);
                }
            }
            Ty::Smt(u) | Ty::Sym(u) => self.obligate_metas(&u, span),
            Ty::Base(_) | Ty::Rigid(_) | Ty::Model => {}
        }
    }

    /// Types a function body against its declared result type.
    pub(crate) fn check_function_impl(&mut self, fd: &FunDef) -> Result<(), ()> {
        let mut env = Env::default();
        for (x, t) in &fd.params {
            env.stack.push((x.clone(), Ty::from_type(t)));
        }
        let t = self.check_expr(&mut env, &fd.body)?;
        let want = Ty::from_type(&fd.ret);
        if let Err(m) = self.cx.unify_sub(&t, &want) {
            self.err::<()>(
                "F-WF",
                format!(
                    "body of `{}` has type `{}`, but the declared result type is `{}`",
                    fd.name, m.actual, m.expected
                ),
                fd.body.span(),
            )?;
        }
        self.check_obligations();
        if self.diags.is_empty() {
            Ok(())
        } else {
            Err(())
        }
    }
}

/// Free clause variables of an expression that no scope binds yet.
pub(crate) fn unbound_in_expr(env: &Env, e: &Expr) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    let mut locals = Vec::new();
    walk_expr(env, e, &mut locals, &mut out);
    out
}

pub(crate) fn unbound_in_formula(env: &Env, f: &Formula) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    let mut locals = Vec::new();
    walk_formula(env, f, &mut locals, &mut out);
    out
}

fn walk_expr(env: &Env, e: &Expr, locals: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match e {
        Expr::Var(x, _) => {
            if !locals.iter().any(|l| l == x) && env.lookup(x).is_none() {
                out.insert(x.clone());
            }
        }
        Expr::Const(..) => {}
        Expr::Ctor(_, args, _) | Expr::Fun(_, args, _) | Expr::Op(_, args, _) => {
            for a in args {
                walk_expr(env, a, locals, out);
            }
        }
        Expr::RelCall(_, args, _) => {
            for a in args {
                if let RelArg::Expr(e) = a {
                    walk_expr(env, e, locals, out);
                }
            }
        }
        Expr::Let(x, bound, body, _) => {
            walk_expr(env, bound, locals, out);
            locals.push(x.clone());
            walk_expr(env, body, locals, out);
            locals.pop();
        }
        Expr::If(c, t, e2, _) => {
            walk_expr(env, c, locals, out);
            walk_expr(env, t, locals, out);
            walk_expr(env, e2, locals, out);
        }
        Expr::Match(scrut, arms, _) => {
            walk_expr(env, scrut, locals, out);
            for arm in arms {
                let depth = locals.len();
                pattern_vars(&arm.pat, locals);
                walk_expr(env, &arm.body, locals, out);
                locals.truncate(depth);
            }
        }
        Expr::Quote(f, _) => walk_formula(env, f, locals, out),
        Expr::SmtVar { name, .. } => walk_expr(env, name, locals, out),
    }
}

fn walk_formula(env: &Env, f: &Formula, locals: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match f {
        Formula::Unquote(e) => walk_expr(env, e, locals, out),
        Formula::Node(node, _) => match &**node {
            SmtNode::Var { name, .. } => walk_formula(env, name, locals, out),
            SmtNode::ConstK(_) => {}
            SmtNode::Ctor(_, kids) | SmtNode::Op(_, kids) | SmtNode::Uf(_, kids) => {
                for k in kids {
                    walk_formula(env, k, locals, out);
                }
            }
            SmtNode::Let { var, bound, body } => {
                walk_formula(env, var, locals, out);
                walk_formula(env, bound, locals, out);
                walk_formula(env, body, locals, out);
            }
            SmtNode::Quant { binders, patterns, body, .. } => {
                for b in binders {
                    walk_formula(env, b, locals, out);
                }
                for p in patterns {
                    walk_formula(env, p, locals, out);
                }
                walk_formula(env, body, locals, out);
            }
            SmtNode::Tester(_, kid) => walk_formula(env, kid, locals, out),
            SmtNode::Getter(_, _, kid) => walk_formula(env, kid, locals, out),
        },
    }
}

fn pattern_vars(p: &Pattern, out: &mut Vec<Name>) {
    match p {
        Pattern::Var(x, _) => out.push(x.clone()),
        Pattern::Wild(_) | Pattern::Const(..) => {}
        Pattern::Ctor(_, sub, _) => {
            for s in sub {
                pattern_vars(s, out);
            }
        }
    }
}
