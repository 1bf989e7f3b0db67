//! Expression and formula typing. The checker acts differently inside and
//! outside quotes: outside, sym/smt/pre-types are distinct; inside, values
//! lift through toSMT and `sym t` promotes to `smt t`.

use crate::ty::{InferCtx, MetaKind, Mismatch, Ty};
use crate::wf::{type_well_formed, Mode};
use flg_core::diag::{Diagnostic, Span};
use flg_core::term::{
    Constant, Expr, Formula, MatchArm, Op, Pattern, Program, QuantKind, RelArg, SmtNode, SmtOp,
};
use flg_core::types::Type;
use flg_core::Name;
use std::collections::{BTreeMap, BTreeSet};

/// Variable scopes during checking. `stack` holds ML binders (function
/// parameters, let, match); `clause` holds the rule variables Gamma.
#[derive(Default)]
pub(crate) struct Env {
    pub stack: Vec<(Name, Ty)>,
    pub clause: BTreeMap<Name, (Ty, Span)>,
}

impl Env {
    pub fn lookup(&self, x: &str) -> Option<Ty> {
        for (n, t) in self.stack.iter().rev() {
            if &**n == x {
                return Some(t.clone());
            }
        }
        self.clause.get(x).map(|(t, _)| t.clone())
    }
}

pub(crate) struct Checker<'p> {
    pub prog: &'p Program,
    pub cx: InferCtx,
    pub diags: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
    /// Context notes appended to diagnostics raised while checking an inner
    /// position (e.g. a function-call argument).
    pub notes: Vec<String>,
    /// Metas that flowed through an unquote erasure. Once the item is fully
    /// constrained, each solved entry must equal its own erasure.
    pub obligations: Vec<(u32, Span)>,
}

impl<'p> Checker<'p> {
    pub fn new(prog: &'p Program) -> Checker<'p> {
        Checker {
            prog,
            cx: InferCtx::new(),
            diags: Vec::new(),
            warnings: Vec::new(),
            notes: Vec::new(),
            obligations: Vec::new(),
        }
    }

    pub fn err<T>(&mut self, rule: &str, message: String, span: Span) -> Result<T, ()> {
        let mut message = message;
        for n in self.notes.iter().rev() {
            message.push_str("; ");
            message.push_str(n);
        }
        self.diags.push(Diagnostic::error(rule, message, span));
        Err(())
    }

    fn mism(
        &mut self,
        rule: &str,
        what: impl FnOnce(&Mismatch) -> String,
        m: Mismatch,
        span: Span,
    ) -> Result<(), ()> {
        let msg = what(&m);
        self.err(rule, msg, span)
    }

    /// Instantiates a constructor's signature with fresh metas.
    /// Returns (instantiated argument types, result type).
    pub(crate) fn instantiate_ctor(&mut self, c: &Name, span: Span) -> Result<(Vec<Ty>, Ty), ()> {
        let Some((owner, adt, decl)) = self.prog.decls.ctor(c) else {
            return self.err("e-Ctor", format!("unknown constructor `{c}`"), span);
        };
        let (owner, params, args) = (owner.clone(), adt.params.clone(), decl.args.clone());
        let mut map = BTreeMap::new();
        for p in &params {
            let m = self.cx.fresh(MetaKind::Any);
            map.insert(p.clone(), m);
        }
        let arg_tys = args.iter().map(|a| Ty::instantiate(a, &map)).collect();
        let res = Ty::Adt(owner, params.iter().map(|p| map[p].clone()).collect());
        Ok((arg_tys, res))
    }

    pub fn check_expr(&mut self, env: &mut Env, e: &Expr) -> Result<Ty, ()> {
        match e {
            Expr::Var(x, span) => match env.lookup(x) {
                Some(t) => Ok(t),
                None => self.err("e-Var", format!("unbound variable `{x}`"), *span),
            },
            Expr::Const(k, _) => Ok(Ty::Base(k.type_of())),
            Expr::Ctor(c, args, span) => {
                let (arg_tys, res) = self.instantiate_ctor(c, *span)?;
                if arg_tys.len() != args.len() {
                    return self.err(
                        "e-Ctor",
                        format!(
                            "constructor `{c}` expects {} argument(s), got {}",
                            arg_tys.len(),
                            args.len()
                        ),
                        *span,
                    );
                }
                for (i, (a, want)) in args.iter().zip(&arg_tys).enumerate() {
                    let t = self.check_expr(env, a)?;
                    if let Err(m) = self.cx.unify_sub(&t, want) {
                        return self.mism(
                            "e-Ctor",
                            |m| {
                                format!(
                                    "argument {} of constructor `{c}` has type `{}`, but `{}` is required",
                                    i + 1,
                                    m.actual,
                                    m.expected
                                )
                            },
                            m,
                            a.span(),
                        ).map(|_| unreachable!());
                    }
                }
                Ok(res)
            }
            Expr::Fun(f, args, span) => {
                let Some(sig) = self.prog.sigs.functions.get(f).cloned() else {
                    return self.err("e-Fun", format!("unknown function `{f}`"), *span);
                };
                if sig.params.len() != args.len() {
                    return self.err(
                        "e-Fun",
                        format!(
                            "function `{f}` expects {} argument(s), got {}",
                            sig.params.len(),
                            args.len()
                        ),
                        *span,
                    );
                }
                let mut map = BTreeMap::new();
                for p in &sig.type_params {
                    let m = self.cx.fresh(MetaKind::Any);
                    map.insert(p.clone(), m);
                }
                for (i, (a, want)) in args.iter().zip(&sig.params).enumerate() {
                    let want = Ty::instantiate(want, &map);
                    self.notes.push(format!("while checking argument {} of `{f}` (e-Fun)", i + 1));
                    let t = self.check_expr(env, a);
                    self.notes.pop();
                    let t = t?;
                    if let Err(m) = self.cx.unify_sub(&t, &want) {
                        return self.mism(
                            "e-Fun",
                            |m| {
                                format!(
                                    "argument {} of `{f}` has type `{}`, but the signature requires `{}`",
                                    i + 1,
                                    m.actual,
                                    m.expected
                                )
                            },
                            m,
                            a.span(),
                        ).map(|_| unreachable!());
                    }
                }
                Ok(Ty::instantiate(&sig.ret, &map))
            }
            Expr::Op(op, args, span) => self.check_op(env, *op, args, *span),
            Expr::RelCall(r, args, span) => {
                let Some(sig) = self.prog.sigs.relations.get(r).cloned() else {
                    return self.err("e-Rel", format!("unknown relation `{r}`"), *span);
                };
                if sig.cols.len() != args.len() {
                    return self.err(
                        "e-Rel",
                        format!(
                            "relation `{r}` expects {} argument(s), got {}",
                            sig.cols.len(),
                            args.len()
                        ),
                        *span,
                    );
                }
                let mut projected = Vec::new();
                for (a, col) in args.iter().zip(&sig.cols) {
                    match a {
                        RelArg::Expr(e) => {
                            let t = self.check_expr(env, e)?;
                            let want = Ty::from_type(col);
                            if let Err(m) = self.cx.unify_sub(&t, &want) {
                                return self.mism(
                                    "e-Rel",
                                    |m| {
                                        format!(
                                            "argument of `{r}` has type `{}`, but the column requires `{}`",
                                            m.actual, m.expected
                                        )
                                    },
                                    m,
                                    e.span(),
                                ).map(|_| unreachable!());
                            }
                        }
                        RelArg::Hole(_) => {}
                        RelArg::Project(_) => projected.push(Ty::from_type(col)),
                    }
                }
                Ok(match projected.len() {
                    0 => Ty::bool(),
                    1 => Ty::list(projected.pop().unwrap()),
                    n => Ty::list(Ty::Adt(
                        flg_core::name(flg_core::types::tuple_adt(n).unwrap()),
                        projected,
                    )),
                })
            }
            Expr::Let(x, bound, body, _) => {
                let t = self.check_expr(env, bound)?;
                env.stack.push((x.clone(), t));
                let r = self.check_expr(env, body);
                env.stack.pop();
                r
            }
            Expr::If(c, th, el, span) => {
                let tc = self.check_expr(env, c)?;
                if let Err(m) = self.cx.unify_sub(&tc, &Ty::bool()) {
                    return self.mism(
                        "e-If",
                        |m| format!("the condition has type `{}`, but `bool` is required", m.actual),
                        m,
                        c.span(),
                    ).map(|_| unreachable!());
                }
                let tt = self.check_expr(env, th)?;
                let te = self.check_expr(env, el)?;
                match self.cx.join(&tt, &te) {
                    Ok(t) => Ok(t),
                    Err(m) => self.err(
                        "e-If",
                        format!("the branches have types `{}` and `{}`", m.actual, m.expected),
                        *span,
                    ),
                }
            }
            Expr::Match(scrut, arms, span) => self.check_match(env, scrut, arms, *span),
            Expr::Quote(f, _) => self.check_formula(env, f),
            Expr::SmtVar { name, ty, span } => {
                self.check_expr(env, name)?;
                self.check_smt_var_index(ty, *span)?;
                Ok(Ty::Sym(Box::new(Ty::from_pre(ty))))
            }
        }
    }

    /// The type index of `#{e}[t]` must be well formed at smt.
    fn check_smt_var_index(&mut self, ty: &flg_core::types::PreType, span: Span) -> Result<(), ()> {
        let no_vars = BTreeSet::new();
        if let Err(e) =
            type_well_formed(&self.prog.decls, &no_vars, &ty.clone().into_type(), Mode::Smt)
        {
            return self.err(
                e.rule,
                format!("in the SMT variable's type (c-SMT-Var): {}", e.message),
                span,
            );
        }
        Ok(())
    }

    fn check_op(&mut self, env: &mut Env, op: Op, args: &[Expr], span: Span) -> Result<Ty, ()> {
        if args.len() != op.arity() {
            return self.err(
                "e-Op",
                format!("`{}` expects {} operand(s), got {}", op.name(), op.arity(), args.len()),
                span,
            );
        }
        let tys: Vec<(Ty, Span)> = {
            let mut v = Vec::new();
            for a in args {
                v.push((self.check_expr(env, a)?, a.span()));
            }
            v
        };
        let expect = |s: &mut Self, i: usize, want: &Ty, tys: &[(Ty, Span)]| -> Result<(), ()> {
            if let Err(m) = s.cx.unify_sub(&tys[i].0, want) {
                s.err::<()>(
                    "e-Op",
                    format!(
                        "operand {} of `{}` has type `{}`, but `{}` is required",
                        i + 1,
                        op.name(),
                        m.actual,
                        m.expected
                    ),
                    tys[i].1,
                )?;
            }
            Ok(())
        };
        match op {
            Op::Add | Op::Sub | Op::Mul | Op::Div | Op::Rem => {
                let w = self.cx.fresh(MetaKind::Bv);
                expect(self, 0, &w, &tys)?;
                expect(self, 1, &w, &tys)?;
                Ok(w)
            }
            Op::Neg => {
                let w = self.cx.fresh(MetaKind::Bv);
                expect(self, 0, &w, &tys)?;
                Ok(w)
            }
            Op::Lt | Op::Le | Op::Gt | Op::Ge => {
                let w = self.cx.fresh(MetaKind::Bv);
                expect(self, 0, &w, &tys)?;
                expect(self, 1, &w, &tys)?;
                Ok(Ty::bool())
            }
            Op::IsSat | Op::IsValid => {
                expect(self, 0, &Ty::Smt(Box::new(Ty::bool())), &tys)?;
                Ok(Ty::bool())
            }
            Op::IsSatOpt | Op::GetModel => {
                expect(self, 0, &Ty::list(Ty::Smt(Box::new(Ty::bool()))), &tys)?;
                expect(self, 1, &Ty::option(Ty::bv(32)), &tys)?;
                Ok(if op == Op::IsSatOpt {
                    Ty::option(Ty::bool())
                } else {
                    Ty::option(Ty::Model)
                })
            }
            Op::QueryModel => {
                let a = self.cx.fresh(MetaKind::Any);
                expect(self, 0, &Ty::Sym(Box::new(a.clone())), &tys)?;
                expect(self, 1, &Ty::Model, &tys)?;
                Ok(Ty::option(a))
            }
        }
    }

    fn check_match(
        &mut self,
        env: &mut Env,
        scrut: &Expr,
        arms: &[MatchArm],
        span: Span,
    ) -> Result<Ty, ()> {
        let ts = self.check_expr(env, scrut)?;
        let mut result: Option<Ty> = None;
        for arm in arms {
            let mut binds = Vec::new();
            self.check_pattern(&arm.pat, &ts, &mut binds)?;
            let depth = env.stack.len();
            env.stack.extend(binds);
            let tb = self.check_expr(env, &arm.body);
            env.stack.truncate(depth);
            let tb = tb?;
            result = Some(match result {
                None => tb,
                Some(acc) => match self.cx.join(&acc, &tb) {
                    Ok(t) => t,
                    Err(m) => {
                        return self.err(
                            "e-Match",
                            format!(
                                "this arm has type `{}`, but earlier arms have type `{}`",
                                m.expected, m.actual
                            ),
                            arm.body.span(),
                        )
                    }
                },
            });
        }
        let Some(result) = result else {
            return self.err("e-Match", "match has no arms".into(), span);
        };
        if !self.match_is_exhaustive(&[ts], &arms.iter().map(|a| vec![&a.pat]).collect::<Vec<_>>())
        {
            self.warnings.push(Diagnostic::warning(
                "e-Match",
                "match may not cover all cases",
                span,
            ));
        }
        Ok(result)
    }

    /// Types a pattern against the expected type, collecting its bindings.
    /// A variable repeated within one pattern means equality: later
    /// occurrences check against the first binding.
    pub(crate) fn check_pattern(
        &mut self,
        pat: &Pattern,
        expected: &Ty,
        binds: &mut Vec<(Name, Ty)>,
    ) -> Result<(), ()> {
        match pat {
            Pattern::Wild(_) => Ok(()),
            Pattern::Var(x, span) => {
                if let Some((_, prev)) = binds.iter().find(|(n, _)| n == x) {
                    let prev = prev.clone();
                    if let Err(m) = self.cx.unify(&prev, expected) {
                        return self.mism(
                            "e-Match",
                            |m| {
                                format!(
                                    "`{x}` is bound at type `{}` earlier in this pattern, but is repeated at `{}`",
                                    m.actual, m.expected
                                )
                            },
                            m,
                            *span,
                        );
                    }
                } else {
                    binds.push((x.clone(), expected.clone()));
                }
                Ok(())
            }
            Pattern::Const(k, span) => {
                if let Err(m) = self.cx.unify(&Ty::Base(k.type_of()), expected) {
                    return self.mism(
                        "e-Match",
                        |m| {
                            format!(
                                "constant pattern has type `{}`, but the scrutinee here has type `{}`",
                                m.actual, m.expected
                            )
                        },
                        m,
                        *span,
                    );
                }
                Ok(())
            }
            Pattern::Ctor(c, sub, span) => {
                let (arg_tys, res) = self.instantiate_ctor(c, *span)?;
                if arg_tys.len() != sub.len() {
                    return self.err(
                        "e-Match",
                        format!(
                            "constructor `{c}` expects {} argument(s), got {}",
                            arg_tys.len(),
                            sub.len()
                        ),
                        *span,
                    );
                }
                if let Err(m) = self.cx.unify(&res, expected) {
                    return self.mism(
                        "e-Match",
                        |m| {
                            format!(
                                "pattern `{c}` builds a `{}`, but the scrutinee here has type `{}`",
                                m.actual, m.expected
                            )
                        },
                        m,
                        *span,
                    );
                }
                for (p, t) in sub.iter().zip(&arg_tys) {
                    self.check_pattern(p, t, binds)?;
                }
                Ok(())
            }
        }
    }

    /// True when no value vector escapes the pattern matrix (usefulness of
    /// the all-wildcards row, negated).
    fn match_is_exhaustive(&self, tys: &[Ty], matrix: &[Vec<&Pattern>]) -> bool {
        !self.wild_useful(tys, matrix)
    }

    fn wild_useful(&self, tys: &[Ty], matrix: &[Vec<&Pattern>]) -> bool {
        if matrix.is_empty() {
            return true;
        }
        if tys.is_empty() {
            return false;
        }
        let t0 = self.cx.resolve(&tys[0]);
        if let Ty::Adt(d, targs) = &t0 {
            if let Some(adt) = self.prog.decls.adts.get(d) {
                if !adt.uninterpreted {
                    let heads: BTreeSet<&str> = matrix
                        .iter()
                        .filter_map(|row| match row[0] {
                            Pattern::Ctor(c, _, _) => Some(&**c),
                            _ => None,
                        })
                        .collect();
                    if adt.ctors.iter().all(|c| heads.contains(&*c.name)) {
                        let map: BTreeMap<Name, Ty> =
                            adt.params.iter().cloned().zip(targs.iter().cloned()).collect();
                        for ctor in &adt.ctors {
                            let sub_tys: Vec<Ty> = ctor
                                .args
                                .iter()
                                .map(|a| Ty::instantiate(a, &map))
                                .chain(tys[1..].iter().cloned())
                                .collect();
                            let wild = Pattern::Wild(Span::DUMMY);
                            let mut spec: Vec<Vec<&Pattern>> = Vec::new();
                            for row in matrix {
                                match row[0] {
                                    Pattern::Ctor(c, sub, _) if **c == *ctor.name => {
                                        spec.push(
                                            sub.iter().chain(row[1..].iter().copied()).collect(),
                                        );
                                    }
                                    Pattern::Var(..) | Pattern::Wild(_) => {
                                        spec.push(
                                            std::iter::repeat_n(&wild, ctor.args.len())
                                                .chain(row[1..].iter().copied())
                                                .collect(),
                                        );
                                    }
                                    _ => {}
                                }
                            }
                            // The wildcard row for the sub-problem borrows
                            // from `wild`, which cannot escape this scope, so
                            // recurse with owned clones instead.
                            let spec_owned: Vec<Vec<Pattern>> = spec
                                .iter()
                                .map(|row| row.iter().map(|p| (*p).clone()).collect())
                                .collect();
                            let spec_refs: Vec<Vec<&Pattern>> =
                                spec_owned.iter().map(|row| row.iter().collect()).collect();
                            if self.wild_useful(&sub_tys, &spec_refs) {
                                return true;
                            }
                        }
                        return false;
                    }
                }
            }
        }
        if let Ty::Base(flg_core::types::Base::Bool) = &t0 {
            let mut saw = [false, false];
            for row in matrix {
                if let Pattern::Const(Constant::Bool(b), _) = row[0] {
                    saw[*b as usize] = true;
                }
            }
            if saw[0] && saw[1] {
                for val in [false, true] {
                    let sub_tys: Vec<Ty> = tys[1..].to_vec();
                    let spec: Vec<Vec<&Pattern>> = matrix
                        .iter()
                        .filter(|row| match row[0] {
                            Pattern::Const(Constant::Bool(b), _) => *b == val,
                            Pattern::Var(..) | Pattern::Wild(_) => true,
                            _ => false,
                        })
                        .map(|row| row[1..].to_vec())
                        .collect();
                    if self.wild_useful(&sub_tys, &spec) {
                        return true;
                    }
                }
                return false;
            }
        }
        // Open head position (base constants, uninterpreted sorts, formulas):
        // only rows with an irrefutable head keep matching.
        let default: Vec<Vec<&Pattern>> = matrix
            .iter()
            .filter(|row| matches!(row[0], Pattern::Var(..) | Pattern::Wild(_)))
            .map(|row| row[1..].to_vec())
            .collect();
        self.wild_useful(&tys[1..], &default)
    }

    // Formulas

    pub fn check_formula(&mut self, env: &mut Env, f: &Formula) -> Result<Ty, ()> {
        match f {
            Formula::Unquote(e) => {
                let t = self.check_expr(env, e)?;
                self.to_smt_ty(&t, e.span())
            }
            Formula::Node(node, span) => self.check_formula_node(env, node, *span),
        }
    }

    /// toSMT on an inferred type; requires the type to be well formed at smt.
    /// Reports at `span` when it is not. A bare undetermined head is rejected;
    /// undetermined types nested under a known head are deferred as
    /// obligations and re-checked once the item is fully constrained.
    #[allow(clippy::wrong_self_convention)]
    pub(crate) fn to_smt_ty(&mut self, t: &Ty, span: Span) -> Result<Ty, ()> {
        match self.cx.resolve(t) {
            Ty::Meta(_) => self.err(
                "φ-Unquote",
                "the type of this unquoted expression is not determined here; bind it earlier or annotate it"
                    .into(),
                span,
            ),
            Ty::Sym(u) => {
                let e = self.erase_smt_wf(&u, span)?;
                Ok(Ty::Sym(Box::new(e)))
            }
            other => {
                let e = self.erase_smt_wf(&other, span)?;
                Ok(Ty::Smt(Box::new(e)))
            }
        }
    }

    /// erase with an inline smt-well-formedness check, used by φ-Unquote.
    fn erase_smt_wf(&mut self, t: &Ty, span: Span) -> Result<Ty, ()> {
        match self.cx.resolve(t) {
            Ty::Base(flg_core::types::Base::Str) => self.err(
                "φ-Unquote",
                "a string cannot appear in a formula; the string theory is not supported".into(),
                span,
            ),
            Ty::Base(b) => Ok(Ty::Base(b)),
            Ty::Rigid(a) => self.err(
                "φ-Unquote",
                format!("the type variable `{a}` is not allowed in formulas (t-TVar)"),
                span,
            ),
            Ty::Model => {
                self.err("φ-Unquote", "a model value cannot appear in a formula".into(), span)
            }
            Ty::Adt(d, args) => {
                let args = args
                    .iter()
                    .map(|a| self.erase_smt_wf(a, span))
                    .collect::<Result<Vec<_>, ()>>()?;
                Ok(Ty::Adt(d, args))
            }
            Ty::Smt(u) | Ty::Sym(u) => self.erase_smt_wf(&u, span),
            Ty::Meta(m) => {
                self.obligations.push((m, span));
                Ok(Ty::Meta(m))
            }
        }
    }

    /// Checks the deferred erasure obligations for the item just finished and
    /// clears them. A solved entry must contain no smt/sym wrapper, no type
    /// variable, no string, and no model anywhere.
    pub(crate) fn check_obligations(&mut self) {
        let pending = std::mem::take(&mut self.obligations);
        for (m, span) in pending {
            let solved = self.cx.zonk(&Ty::Meta(m));
            if let Some(bad) = find_unerasable(&solved) {
                let shown = self.cx.display(&solved);
                self.diags.push(Diagnostic::error(
                    "φ-Unquote",
                    format!(
                        "the type of an unquoted expression was later refined to `{shown}`, but {bad}"
                    ),
                    span,
                ));
            }
        }
    }

    /// toSMT over a declared constructor-argument type, with the data type's
    /// parameters standing for already-erased instantiations.
    pub(crate) fn to_smt_decl(&self, t: &Type, map: &BTreeMap<Name, Ty>) -> Result<Ty, String> {
        match t {
            Type::Sym(p) => Ok(Ty::Sym(Box::new(self.erase_decl(&p.clone().into_type(), map)?))),
            Type::Model => Err("a `model` field cannot be used in formulas".into()),
            other => Ok(Ty::Smt(Box::new(self.erase_decl(other, map)?))),
        }
    }

    fn erase_decl(&self, t: &Type, map: &BTreeMap<Name, Ty>) -> Result<Ty, String> {
        match t {
            Type::Base(b) => Ok(Ty::Base(*b)),
            Type::Var(a) => Ok(map.get(a).cloned().unwrap_or_else(|| Ty::Rigid(a.clone()))),
            Type::Adt(d, args) => Ok(Ty::Adt(
                d.clone(),
                args.iter().map(|a| self.erase_decl(a, map)).collect::<Result<_, _>>()?,
            )),
            Type::Smt(p) | Type::Sym(p) => self.erase_decl(&p.clone().into_type(), map),
            Type::Model => Err("a `model` field cannot be used in formulas".into()),
        }
    }

    /// Instantiates a constructor for use inside a formula: fresh metas for
    /// the erased type parameters, toSMT'd argument slots, smt result.
    pub(crate) fn instantiate_smt_ctor(
        &mut self,
        c: &Name,
        rule: &str,
        span: Span,
    ) -> Result<(Vec<Ty>, Ty), ()> {
        let Some((owner, adt, decl)) = self.prog.decls.ctor(c) else {
            return self.err(rule, format!("unknown constructor `{c}`"), span);
        };
        let (owner, params, args) = (owner.clone(), adt.params.clone(), decl.args.clone());
        let mut map = BTreeMap::new();
        for p in &params {
            let m = self.cx.fresh(MetaKind::Any);
            map.insert(p.clone(), m);
        }
        let mut slots = Vec::new();
        for (i, a) in args.iter().enumerate() {
            match self.to_smt_decl(a, &map) {
                Ok(t) => slots.push(t),
                Err(msg) => {
                    return self.err(
                        rule,
                        format!("argument {} of constructor `{c}`: {msg}", i + 1),
                        span,
                    )
                }
            }
        }
        let res =
            Ty::Smt(Box::new(Ty::Adt(owner, params.iter().map(|p| map[p].clone()).collect())));
        Ok((slots, res))
    }

    /// Expected child types and result type of a c^SMT operator application.
    pub(crate) fn smt_op_sig(&mut self, op: SmtOp) -> (Vec<Ty>, Ty) {
        let smt_bool = || Ty::Smt(Box::new(Ty::bool()));
        match op {
            SmtOp::Not => (vec![smt_bool()], smt_bool()),
            SmtOp::AndOp | SmtOp::OrOp | SmtOp::Imp => (vec![smt_bool(), smt_bool()], smt_bool()),
            SmtOp::SmtEq => {
                let a = self.cx.fresh(MetaKind::Any);
                (vec![Ty::Smt(Box::new(a.clone())), Ty::Smt(Box::new(a))], smt_bool())
            }
            SmtOp::Ite => {
                let a = self.cx.fresh(MetaKind::Any);
                (
                    vec![smt_bool(), Ty::Smt(Box::new(a.clone())), Ty::Smt(Box::new(a.clone()))],
                    Ty::Smt(Box::new(a)),
                )
            }
            SmtOp::BvConst(k) => {
                let any_bv = self.cx.fresh(MetaKind::Bv);
                (vec![Ty::Smt(Box::new(any_bv))], Ty::Smt(Box::new(Ty::bv(k))))
            }
            SmtOp::BvNeg => {
                let w = self.cx.fresh(MetaKind::Bv);
                (vec![Ty::Smt(Box::new(w.clone()))], Ty::Smt(Box::new(w)))
            }
            SmtOp::BvAdd
            | SmtOp::BvSub
            | SmtOp::BvMul
            | SmtOp::BvSdiv
            | SmtOp::BvSrem
            | SmtOp::BvAnd
            | SmtOp::BvOr
            | SmtOp::BvXor
            | SmtOp::BvShl
            | SmtOp::BvLshr
            | SmtOp::BvAshr => {
                let w = self.cx.fresh(MetaKind::Bv);
                (
                    vec![Ty::Smt(Box::new(w.clone())), Ty::Smt(Box::new(w.clone()))],
                    Ty::Smt(Box::new(w)),
                )
            }
            SmtOp::BvSlt
            | SmtOp::BvSle
            | SmtOp::BvSgt
            | SmtOp::BvSge
            | SmtOp::BvUlt
            | SmtOp::BvUle
            | SmtOp::BvUgt
            | SmtOp::BvUge => {
                let w = self.cx.fresh(MetaKind::Bv);
                (
                    vec![Ty::Smt(Box::new(w.clone())), Ty::Smt(Box::new(w))],
                    smt_bool(),
                )
            }
        }
    }

    fn check_formula_node(
        &mut self,
        env: &mut Env,
        node: &SmtNode<Formula>,
        span: Span,
    ) -> Result<Ty, ()> {
        match node {
            SmtNode::Var { name, ty } => {
                match name {
                    Formula::Unquote(e) => {
                        self.check_expr(env, e)?;
                    }
                    other => {
                        self.check_formula(env, other)?;
                    }
                }
                self.check_smt_var_index(ty, span)?;
                Ok(Ty::Sym(Box::new(Ty::from_pre(ty))))
            }
            SmtNode::ConstK(k) => match k {
                Constant::Str(_) => self.err(
                    "c-SMT-Const",
                    "string constants are not supported in formulas".into(),
                    span,
                ),
                k => Ok(Ty::Smt(Box::new(Ty::Base(k.type_of())))),
            },
            SmtNode::Ctor(c, kids) => {
                let (slots, res) = self.instantiate_smt_ctor(c, "c-SMT-Ctor", span)?;
                if slots.len() != kids.len() {
                    return self.err(
                        "c-SMT-Ctor",
                        format!(
                            "constructor `{c}` expects {} argument(s), got {}",
                            slots.len(),
                            kids.len()
                        ),
                        span,
                    );
                }
                for (i, (kid, want)) in kids.iter().zip(&slots).enumerate() {
                    let t = self.check_formula(env, kid)?;
                    if let Err(m) = self.cx.unify_sub(&t, want) {
                        return self.mism(
                            "c-SMT-Ctor",
                            |m| {
                                format!(
                                    "argument {} of constructor `{c}` has type `{}`, but `{}` is required",
                                    i + 1,
                                    m.actual,
                                    m.expected
                                )
                            },
                            m,
                            kid.span(),
                        ).map(|_| unreachable!());
                    }
                }
                Ok(res)
            }
            SmtNode::Op(op, kids) => {
                let (slots, res) = self.smt_op_sig(*op);
                if slots.len() != kids.len() {
                    return self.err(
                        "c-SMT-Op",
                        format!(
                            "`{}` expects {} argument(s), got {}",
                            op.name(),
                            slots.len(),
                            kids.len()
                        ),
                        span,
                    );
                }
                for (i, (kid, want)) in kids.iter().zip(&slots).enumerate() {
                    let t = self.check_formula(env, kid)?;
                    if let Err(m) = self.cx.unify_sub(&t, want) {
                        return self.mism(
                            "c-SMT-Op",
                            |m| {
                                format!(
                                    "operand {} of `{}` has type `{}`, but `{}` is required",
                                    i + 1,
                                    op.name(),
                                    m.actual,
                                    m.expected
                                )
                            },
                            m,
                            kid.span(),
                        ).map(|_| unreachable!());
                    }
                }
                Ok(res)
            }
            SmtNode::Let { var, bound, body } => {
                let a = self.cx.fresh(MetaKind::Any);
                let tv = self.check_formula(env, var)?;
                if let Err(m) = self.cx.unify_sub(&tv, &Ty::Sym(Box::new(a.clone()))) {
                    return self.mism(
                        "c-SMT-Let",
                        |m| {
                            format!(
                                "the bound name of `smt_let` has type `{}`, but an SMT variable (`{}`) is required",
                                m.actual, m.expected
                            )
                        },
                        m,
                        var.span(),
                    ).map(|_| unreachable!());
                }
                let tb = self.check_formula(env, bound)?;
                if let Err(m) = self.cx.unify_sub(&tb, &Ty::Smt(Box::new(a))) {
                    return self.mism(
                        "c-SMT-Let",
                        |m| {
                            format!(
                                "the bound formula has type `{}`, but `{}` is required to match its name",
                                m.actual, m.expected
                            )
                        },
                        m,
                        bound.span(),
                    ).map(|_| unreachable!());
                }
                let t_body = self.check_formula(env, body)?;
                let b = self.cx.fresh(MetaKind::Any);
                let want = Ty::Smt(Box::new(b));
                if let Err(m) = self.cx.unify_sub(&t_body, &want) {
                    return self.mism(
                        "c-SMT-Let",
                        |m| format!("the body of `smt_let` has type `{}`", m.actual),
                        m,
                        body.span(),
                    ).map(|_| unreachable!());
                }
                Ok(want)
            }
            SmtNode::Quant { kind, binders, patterns, body } => {
                let rule = match kind {
                    QuantKind::Forall => "c-SMT-Forall",
                    QuantKind::Exists => "c-SMT-Exists",
                };
                for b in binders {
                    let t = self.check_formula(env, b)?;
                    let a = self.cx.fresh(MetaKind::Any);
                    if let Err(m) = self.cx.unify_sub(&t, &Ty::Sym(Box::new(a))) {
                        return self.mism(
                            rule,
                            |m| {
                                format!(
                                    "a quantifier binder has type `{}`, but an SMT variable is required",
                                    m.actual
                                )
                            },
                            m,
                            b.span(),
                        ).map(|_| unreachable!());
                    }
                }
                for pat in patterns {
                    self.check_formula(env, pat)?;
                }
                let tb = self.check_formula(env, body)?;
                if let Err(m) = self.cx.unify_sub(&tb, &Ty::Smt(Box::new(Ty::bool()))) {
                    return self.mism(
                        rule,
                        |m| {
                            format!(
                                "the quantifier body has type `{}`, but `bool smt` is required",
                                m.actual
                            )
                        },
                        m,
                        body.span(),
                    ).map(|_| unreachable!());
                }
                Ok(Ty::Smt(Box::new(Ty::bool())))
            }
            SmtNode::Uf(u, kids) => {
                let Some(sig) = self.prog.sigs.ufs.get(u).cloned() else {
                    return self.err("c-SMT-UFun", format!("unknown uninterpreted function `{u}`"), span);
                };
                if sig.args.len() != kids.len() {
                    return self.err(
                        "c-SMT-UFun",
                        format!(
                            "uninterpreted function `{u}` expects {} argument(s), got {}",
                            sig.args.len(),
                            kids.len()
                        ),
                        span,
                    );
                }
                for (i, (kid, want)) in kids.iter().zip(&sig.args).enumerate() {
                    let t = self.check_formula(env, kid)?;
                    let want = Ty::Smt(Box::new(Ty::from_pre(want)));
                    if let Err(m) = self.cx.unify_sub(&t, &want) {
                        return self.mism(
                            "c-SMT-UFun",
                            |m| {
                                format!(
                                    "argument {} of `{u}` has type `{}`, but `{}` is required",
                                    i + 1,
                                    m.actual,
                                    m.expected
                                )
                            },
                            m,
                            kid.span(),
                        ).map(|_| unreachable!());
                    }
                }
                Ok(Ty::Smt(Box::new(Ty::from_pre(&sig.ret))))
            }
            SmtNode::Tester(c, kid) => {
                let t_adt = self.smt_adt_of_ctor(c, "c-SMT-Tester", span)?;
                let t = self.check_formula(env, kid)?;
                if let Err(m) = self.cx.unify_sub(&t, &t_adt) {
                    return self.mism(
                        "c-SMT-Tester",
                        |m| {
                            format!(
                                "`#is_{c}` applies to `{}`, but its argument has type `{}`",
                                m.expected, m.actual
                            )
                        },
                        m,
                        kid.span(),
                    ).map(|_| unreachable!());
                }
                Ok(Ty::Smt(Box::new(Ty::bool())))
            }
            SmtNode::Getter(c, i, kid) => {
                let Some((owner, adt, decl)) = self.prog.decls.ctor(c) else {
                    return self.err("c-SMT-Getter", format!("unknown constructor `{c}`"), span);
                };
                let (owner, params, args) = (owner.clone(), adt.params.clone(), decl.args.clone());
                if *i == 0 || *i as usize > args.len() {
                    return self.err(
                        "c-SMT-Getter",
                        format!("constructor `{c}` has {} argument(s); `#{c}_{i}` is out of range", args.len()),
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
                let t = self.check_formula(env, kid)?;
                if let Err(m) = self.cx.unify_sub(&t, &t_adt) {
                    return self.mism(
                        "c-SMT-Getter",
                        |m| {
                            format!(
                                "`#{c}_{i}` applies to `{}`, but its argument has type `{}`",
                                m.expected, m.actual
                            )
                        },
                        m,
                        kid.span(),
                    ).map(|_| unreachable!());
                }
                match self.to_smt_decl(&args[*i as usize - 1], &map) {
                    Ok(t) => Ok(t),
                    Err(msg) => self.err("c-SMT-Getter", msg, span),
                }
            }
        }
    }

    /// The smt-typed ADT a tester or getter applies to, instantiated fresh.
    pub(crate) fn smt_adt_of_ctor(
        &mut self,
        c: &Name,
        rule: &str,
        span: Span,
    ) -> Result<Ty, ()> {
        let Some((owner, adt, _)) = self.prog.decls.ctor(c) else {
            return self.err(rule, format!("unknown constructor `{c}`"), span);
        };
        let (owner, params) = (owner.clone(), adt.params.clone());
        let args = params.iter().map(|_| self.cx.fresh(MetaKind::Any)).collect();
        Ok(Ty::Smt(Box::new(Ty::Adt(owner, args))))
    }
}

/// Why a zonked type cannot stand for an erased (formula) sort, if it cannot.
fn find_unerasable(t: &Ty) -> Option<&'static str> {
    match t {
        Ty::Base(flg_core::types::Base::Str) => {
            Some("a string cannot appear in a formula; the string theory is not supported")
        }
        Ty::Base(_) | Ty::Meta(_) => None,
        Ty::Rigid(_) => Some("a type variable is not allowed in formulas (t-TVar)"),
        Ty::Model => Some("a model value cannot appear in a formula"),
        Ty::Smt(_) | Ty::Sym(_) => {
            Some("an smt or sym type cannot occur inside a formula's element sort")
        }
        Ty::Adt(_, args) => args.iter().find_map(find_unerasable),
    }
}
