//! Lowering from the surface tree to the normalized core program: alias
//! expansion, record and list sugar, local function lifting, formula
//! resolution, and clause premise normalization. Generated names contain
//! `$`, which the lexer rejects in source text, so they never collide.

use crate::ast::*;
use flg_core::diag::{Diagnostic, Span};
use flg_core::term::{
    Atom, Clause, Constant, Expr, Formula, FunDef, MatchArm, Op, Pattern, Premise, Program,
    QuantKind, RelArg, SmtNode, SmtOp,
};
use flg_core::types::{
    tuple_adt, AdtDecl, CtorDecl, DataTypeDecls, FunSig, PreType, ProgramDecls, RelKind, RelSig,
    Type, UfSig,
};
use flg_core::{name, Name};
use std::collections::{BTreeMap, BTreeSet};

/// Built-in operators invoked as ordinary calls.
fn builtin_op(n: &str) -> Option<Op> {
    Some(match n {
        "is_sat" => Op::IsSat,
        "is_valid" => Op::IsValid,
        "is_sat_opt" => Op::IsSatOpt,
        "get_model" => Op::GetModel,
        "query_model" => Op::QueryModel,
        _ => return None,
    })
}

/// Named formula constructors callable inside quotations.
pub(crate) fn formula_op(n: &str) -> Option<SmtOp> {
    Some(match n {
        "smt_not" => SmtOp::Not,
        "smt_and" => SmtOp::AndOp,
        "smt_or" => SmtOp::OrOp,
        "smt_imp" => SmtOp::Imp,
        "smt_eq" => SmtOp::SmtEq,
        "smt_ite" => SmtOp::Ite,
        "bv_neg" => SmtOp::BvNeg,
        "bv_add" => SmtOp::BvAdd,
        "bv_sub" => SmtOp::BvSub,
        "bv_mul" => SmtOp::BvMul,
        "bv_sdiv" => SmtOp::BvSdiv,
        "bv_srem" => SmtOp::BvSrem,
        "bv_and" => SmtOp::BvAnd,
        "bv_or" => SmtOp::BvOr,
        "bv_xor" => SmtOp::BvXor,
        "bv_shl" => SmtOp::BvShl,
        "bv_lshr" => SmtOp::BvLshr,
        "bv_ashr" => SmtOp::BvAshr,
        "bv_slt" => SmtOp::BvSlt,
        "bv_sle" => SmtOp::BvSle,
        "bv_sgt" => SmtOp::BvSgt,
        "bv_sge" => SmtOp::BvSge,
        "bv_ult" => SmtOp::BvUlt,
        "bv_ule" => SmtOp::BvUle,
        "bv_ugt" => SmtOp::BvUgt,
        "bv_uge" => SmtOp::BvUge,
        _ => return None,
    })
}

fn reserved_callable(n: &str) -> bool {
    builtin_op(n).is_some() || formula_op(n).is_some() || matches!(n, "smt_let" | "bv_const")
}

fn reserved_type(n: &str) -> bool {
    matches!(n, "bool" | "string" | "model" | "i32" | "i64" | "bv" | "smt" | "sym")
}

fn is_upper(n: &str) -> bool {
    n.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

#[derive(Default)]
struct Lower {
    diags: Vec<Diagnostic>,
    decls: DataTypeDecls,
    sigs: ProgramDecls,
    aliases: BTreeMap<Name, (Vec<Name>, STy)>,
    /// Record type name to fields in declaration order.
    records: BTreeMap<Name, Vec<Name>>,
    /// Sorted field-name set to the record type it identifies.
    record_by_fields: BTreeMap<Vec<Name>, Name>,
    /// What each lowercase callable name means, for duplicate reporting.
    callables: BTreeMap<Name, &'static str>,
    type_arity: BTreeMap<Name, usize>,
    functions: BTreeMap<Name, FunDef>,
    clauses: Vec<Clause>,
    /// Global counter for lifted local function names.
    lifts: u64,
}

/// Per-item state threaded through expression lowering.
struct Cx {
    /// Value binders in scope, innermost last.
    scope: Vec<Name>,
    /// Local functions in scope: surface name, lifted name, captured vars.
    locals: Vec<(Name, Name, Vec<Name>)>,
    /// In clause bodies unresolved uppercase names are rule variables.
    clause_mode: bool,
    /// Host item name, used to derive lifted function names.
    host: Name,
    fresh: u64,
}

impl Cx {
    fn new(host: Name, clause_mode: bool) -> Cx {
        Cx { scope: Vec::new(), locals: Vec::new(), clause_mode, host, fresh: 0 }
    }

    fn fresh(&mut self) -> Name {
        let n = name(&format!("${}", self.fresh));
        self.fresh += 1;
        n
    }

    fn in_scope(&self, n: &str) -> bool {
        self.scope.iter().any(|s| &**s == n)
    }
}

pub fn lower(decls: Vec<SDecl>) -> Result<Program, Vec<Diagnostic>> {
    let mut lw = Lower { decls: flg_core::types::prelude(), ..Lower::default() };
    for (c, _) in lw.decls.ctor_owner.clone() {
        lw.callables.insert(c, "constructor");
    }
    for (t, a) in lw.decls.adts.clone() {
        lw.type_arity.insert(t, a.params.len());
    }

    let mut types = Vec::new();
    let mut sorts = Vec::new();
    let mut ufs = Vec::new();
    let mut rels = Vec::new();
    let mut funs = Vec::new();
    let mut clauses = Vec::new();
    for d in decls {
        match d {
            SDecl::Type { params, name, body, span } => types.push((params, name, body, span)),
            SDecl::UninterpSort { params, name, span } => sorts.push((params, name, span)),
            SDecl::UninterpFun { name, args, ret, span } => ufs.push((name, args, ret, span)),
            SDecl::Rel { input, name, cols, span } => rels.push((input, name, cols, span)),
            SDecl::Fun(def) => funs.push(def),
            SDecl::Clause { head, body, span } => clauses.push((head, body, span)),
        }
    }

    lw.collect_types(&types, &sorts);
    if !lw.diags.is_empty() {
        return Err(lw.diags);
    }
    lw.collect_sigs(&ufs, &rels, &funs);
    if !lw.diags.is_empty() {
        return Err(lw.diags);
    }
    for def in &funs {
        lw.fun_body(def);
    }
    for (head, body, span) in &clauses {
        lw.clause(head, body, *span);
    }
    if !lw.diags.is_empty() {
        return Err(lw.diags);
    }
    Ok(Program {
        decls: lw.decls,
        sigs: lw.sigs,
        functions: lw.functions,
        clauses: lw.clauses,
    })
}

impl Lower {
    fn err(&mut self, msg: impl Into<String>, span: Span) {
        self.diags.push(Diagnostic::error("desugar", msg, span));
    }

    fn claim_type(&mut self, n: &Name, arity: usize, span: Span) -> bool {
        if reserved_type(n) {
            self.err(format!("`{n}` is a built-in type name"), span);
            return false;
        }
        if self.type_arity.insert(n.clone(), arity).is_some() {
            self.err(format!("type `{n}` is declared twice"), span);
            return false;
        }
        true
    }

    fn claim_callable(&mut self, n: &Name, kind: &'static str, span: Span) -> bool {
        if reserved_callable(n) {
            self.err(format!("`{n}` is a built-in operator name"), span);
            return false;
        }
        if let Some(prev) = self.callables.insert(n.clone(), kind) {
            self.err(format!("`{n}` is already defined as a {prev}"), span);
            return false;
        }
        true
    }

    // Type declarations

    fn collect_types(&mut self, types: &[(Vec<Name>, Name, STypeBody, Span)], sorts: &[(Vec<Name>, Name, Span)]) {
        for (params, n, _, span) in types {
            self.claim_type(n, params.len(), *span);
            self.check_params(params, *span);
        }
        for (params, n, span) in sorts {
            self.claim_type(n, params.len(), *span);
            self.check_params(params, *span);
        }
        for (params, n, body, span) in types {
            if let STypeBody::Alias(ty) = body {
                self.aliases.insert(n.clone(), (params.clone(), ty.clone()));
                let _ = span;
            }
        }
        // Alias bodies are expanded on use; check them (and cycles) up front.
        for (params, n, body, span) in types {
            if matches!(body, STypeBody::Alias(_)) {
                let scope: BTreeSet<Name> = params.iter().cloned().collect();
                let mut stack = vec![n.clone()];
                let (_, sty) = self.aliases[n].clone();
                self.ty(&sty, Some(&scope), &BTreeMap::new(), &mut stack);
                let _ = span;
            }
        }
        for (params, n, body, span) in types {
            let scope: BTreeSet<Name> = params.iter().cloned().collect();
            match body {
                STypeBody::Alias(_) => {}
                STypeBody::Ctors(ctors) => {
                    let mut decl = AdtDecl { params: params.clone(), ctors: Vec::new(), uninterpreted: false };
                    for (c, args, cspan) in ctors {
                        if !self.claim_callable(c, "constructor", *cspan) {
                            continue;
                        }
                        let args: Vec<Type> = args
                            .iter()
                            .filter_map(|a| self.ty(a, Some(&scope), &BTreeMap::new(), &mut Vec::new()))
                            .collect();
                        self.decls.ctor_owner.insert(c.clone(), n.clone());
                        decl.ctors.push(CtorDecl { name: c.clone(), args });
                    }
                    self.decls.adts.insert(n.clone(), decl);
                    let _ = span;
                }
                STypeBody::Record(fields) => self.record_type(params, n, fields, *span, &scope),
            }
        }
        for (params, n, _) in sorts {
            self.decls.adts.insert(
                n.clone(),
                AdtDecl { params: params.clone(), ctors: Vec::new(), uninterpreted: true },
            );
        }
    }

    fn check_params(&mut self, params: &[Name], span: Span) {
        let mut seen = BTreeSet::new();
        for p in params {
            if !seen.insert(p.clone()) {
                self.err(format!("duplicate type parameter `{p}`"), span);
            }
        }
    }

    /// A record becomes a single-constructor data type (the constructor is
    /// named after the type) plus one getter function per field.
    fn record_type(&mut self, params: &[Name], n: &Name, fields: &[(Name, STy, Span)], span: Span, scope: &BTreeSet<Name>) {
        if !self.claim_callable(n, "constructor", span) {
            return;
        }
        let mut fnames = Vec::new();
        let mut args = Vec::new();
        for (f, fty, fspan) in fields {
            if fnames.contains(f) {
                self.err(format!("duplicate record field `{f}`"), *fspan);
                continue;
            }
            fnames.push(f.clone());
            args.push(self.ty(fty, Some(scope), &BTreeMap::new(), &mut Vec::new()));
        }
        let args: Vec<Type> = match args.into_iter().collect::<Option<Vec<_>>>() {
            Some(a) => a,
            None => return,
        };
        let mut sorted = fnames.clone();
        sorted.sort();
        if let Some(other) = self.record_by_fields.insert(sorted, n.clone()) {
            self.err(
                format!("record `{n}` has the same fields as record `{other}`; literals would be ambiguous"),
                span,
            );
        }
        self.decls.ctor_owner.insert(n.clone(), n.clone());
        self.decls.adts.insert(
            n.clone(),
            AdtDecl {
                params: params.to_vec(),
                ctors: vec![CtorDecl { name: n.clone(), args: args.clone() }],
                uninterpreted: false,
            },
        );
        self.records.insert(n.clone(), fnames.clone());

        let rec_ty = Type::Adt(n.clone(), params.iter().map(|p| Type::Var(p.clone())).collect());
        for (i, f) in fnames.iter().enumerate() {
            if !self.claim_callable(f, "record field getter", span) {
                continue;
            }
            let pats: Vec<Pattern> = (0..fnames.len())
                .map(|j| if i == j { Pattern::Var(f.clone(), span) } else { Pattern::Wild(span) })
                .collect();
            let body = Expr::Match(
                Box::new(Expr::Var(name("$rec"), span)),
                vec![MatchArm { pat: Pattern::Ctor(n.clone(), pats, span), body: Expr::Var(f.clone(), span) }],
                span,
            );
            self.sigs.functions.insert(
                f.clone(),
                FunSig { type_params: params.to_vec(), params: vec![rec_ty.clone()], ret: args[i].clone() },
            );
            self.functions.insert(
                f.clone(),
                FunDef {
                    name: f.clone(),
                    type_params: params.to_vec(),
                    params: vec![(name("$rec"), rec_ty.clone())],
                    ret: args[i].clone(),
                    body,
                    span,
                },
            );
        }
    }

    /// Converts a surface type, expanding aliases. `scope` restricts which
    /// type variables may appear (None collects them freely), `subst` maps
    /// alias parameters, `stack` tracks in-progress aliases for cycles.
    fn ty(&mut self, sty: &STy, scope: Option<&BTreeSet<Name>>, subst: &BTreeMap<Name, Type>, stack: &mut Vec<Name>) -> Option<Type> {
        let span = sty.span;
        match &sty.kind {
            STyKind::Bool => Some(Type::Base(flg_core::types::Base::Bool)),
            STyKind::Str => Some(Type::Base(flg_core::types::Base::Str)),
            STyKind::Bv(k) => Some(Type::Base(flg_core::types::Base::Bv(*k))),
            STyKind::Model => Some(Type::Model),
            STyKind::Var(a) => {
                if let Some(t) = subst.get(a) {
                    return Some(t.clone());
                }
                if let Some(sc) = scope {
                    if !sc.contains(a) {
                        self.err(format!("type variable `{a}` is not declared here"), span);
                        return None;
                    }
                }
                Some(Type::Var(a.clone()))
            }
            STyKind::Tuple(parts) => {
                let Some(adt) = tuple_adt(parts.len()) else {
                    self.err("tuple types have 2 to 8 components", span);
                    return None;
                };
                let args: Option<Vec<Type>> =
                    parts.iter().map(|p| self.ty(p, scope, subst, stack)).collect();
                Some(Type::Adt(name(adt), args?))
            }
            STyKind::Smt(inner) => {
                let t = self.ty(inner, scope, subst, stack)?;
                match t.as_pre() {
                    Some(p) => Some(Type::Smt(p)),
                    None => {
                        self.err("`smt` applies to a concrete type", span);
                        None
                    }
                }
            }
            STyKind::Sym(inner) => {
                let t = self.ty(inner, scope, subst, stack)?;
                match t.as_pre() {
                    Some(p) => Some(Type::Sym(p)),
                    None => {
                        self.err("`sym` applies to a concrete type", span);
                        None
                    }
                }
            }
            STyKind::App(n, args) => {
                if let Some((params, body)) = self.aliases.get(n).cloned() {
                    if stack.contains(n) {
                        self.err(format!("type alias `{n}` is circular"), span);
                        return None;
                    }
                    if params.len() != args.len() {
                        self.err(
                            format!("`{n}` expects {} type arguments, got {}", params.len(), args.len()),
                            span,
                        );
                        return None;
                    }
                    let conv: Option<Vec<Type>> =
                        args.iter().map(|a| self.ty(a, scope, subst, stack)).collect();
                    let inner: BTreeMap<Name, Type> = params.into_iter().zip(conv?).collect();
                    stack.push(n.clone());
                    let out = self.ty(&body, None, &inner, stack);
                    stack.pop();
                    return out;
                }
                match self.type_arity.get(n) {
                    None => {
                        self.err(format!("unknown type `{n}`"), span);
                        None
                    }
                    Some(&k) if k != args.len() => {
                        self.err(format!("`{n}` expects {k} type arguments, got {}", args.len()), span);
                        None
                    }
                    Some(_) => {
                        let conv: Option<Vec<Type>> =
                            args.iter().map(|a| self.ty(a, scope, subst, stack)).collect();
                        Some(Type::Adt(n.clone(), conv?))
                    }
                }
            }
        }
    }

    fn mono_ty(&mut self, sty: &STy) -> Option<Type> {
        let empty = BTreeSet::new();
        self.ty(sty, Some(&empty), &BTreeMap::new(), &mut Vec::new())
    }

    fn open_ty(&mut self, sty: &STy) -> Option<Type> {
        self.ty(sty, None, &BTreeMap::new(), &mut Vec::new())
    }

    // Signatures

    fn collect_sigs(&mut self, ufs: &[(Name, Vec<STy>, STy, Span)], rels: &[(bool, Name, Vec<STy>, Span)], funs: &[SFunDef]) {
        for (n, args, ret, span) in ufs {
            if !self.claim_callable(n, "uninterpreted function", *span) {
                continue;
            }
            let args: Option<Vec<PreType>> = args.iter().map(|a| self.uf_ty(a)).collect();
            let ret = self.uf_ty(ret);
            if let (Some(args), Some(ret)) = (args, ret) {
                self.sigs.ufs.insert(n.clone(), UfSig { args, ret });
            }
        }
        for (input, n, cols, span) in rels {
            if !self.claim_callable(n, "relation", *span) {
                continue;
            }
            let cols: Option<Vec<Type>> = cols.iter().map(|c| self.mono_ty(c)).collect();
            if let Some(cols) = cols {
                let kind = if *input { RelKind::Input } else { RelKind::Output };
                self.sigs.relations.insert(n.clone(), RelSig { cols, kind });
            }
        }
        for def in funs {
            if !self.claim_callable(&def.name, "function", def.span) {
                continue;
            }
            let mut seen = Vec::new();
            for (p, _) in &def.params {
                if seen.contains(p) {
                    self.err(format!("duplicate parameter `{p}`"), def.span);
                }
                seen.push(p.clone());
            }
            if let Some(sig) = self.fun_sig(def) {
                self.sigs.functions.insert(def.name.clone(), sig);
            }
        }
    }

    /// Uninterpreted function signatures are written `t smt`; the stored
    /// signature keeps the underlying pre-type.
    fn uf_ty(&mut self, sty: &STy) -> Option<PreType> {
        if let STyKind::Smt(inner) = &sty.kind {
            let empty = BTreeSet::new();
            let t = self.ty(inner, Some(&empty), &BTreeMap::new(), &mut Vec::new())?;
            if let Some(p) = t.as_pre() {
                return Some(p);
            }
        }
        self.err("uninterpreted function types are written `t smt`", sty.span);
        None
    }

    fn fun_sig(&mut self, def: &SFunDef) -> Option<FunSig> {
        let params: Option<Vec<Type>> = def.params.iter().map(|(_, t)| self.open_ty(t)).collect();
        let ret = self.open_ty(&def.ret)?;
        let params = params?;
        let mut type_params = Vec::new();
        for t in params.iter().chain(std::iter::once(&ret)) {
            collect_tyvars(t, &mut type_params);
        }
        Some(FunSig { type_params, params, ret })
    }

    // Function bodies

    fn fun_body(&mut self, def: &SFunDef) {
        let Some(sig) = self.sigs.functions.get(&def.name).cloned() else { return };
        let mut cx = Cx::new(def.name.clone(), false);
        for (p, _) in &def.params {
            cx.scope.push(p.clone());
        }
        let body = self.expr(&def.body, &mut cx);
        let params: Vec<(Name, Type)> =
            def.params.iter().map(|(p, _)| p.clone()).zip(sig.params.iter().cloned()).collect();
        self.functions.insert(
            def.name.clone(),
            FunDef {
                name: def.name.clone(),
                type_params: sig.type_params.clone(),
                params,
                ret: sig.ret.clone(),
                body,
                span: def.span,
            },
        );
    }

    // Expressions

    fn expr(&mut self, e: &SExpr, cx: &mut Cx) -> Expr {
        let span = e.span;
        match &e.kind {
            SExprKind::Const(c) => Expr::Const(c.clone(), span),
            SExprKind::Ident(n) => self.ident(n, span, cx),
            SExprKind::Call(n, args) => self.call(n, args, span, cx),
            SExprKind::Tuple(items) => {
                let Some(adt) = tuple_adt(items.len()) else {
                    self.err("tuples have 2 to 8 components", span);
                    return Expr::Const(Constant::Bool(false), span);
                };
                let args = items.iter().map(|i| self.expr(i, cx)).collect();
                Expr::Ctor(name(adt), args, span)
            }
            SExprKind::List(items) => {
                let mut out = Expr::Ctor(name("nil"), Vec::new(), span);
                for i in items.iter().rev() {
                    let head = self.expr(i, cx);
                    out = Expr::Ctor(name("cons"), vec![head, out], span);
                }
                out
            }
            SExprKind::Cons(h, t) => {
                let h = self.expr(h, cx);
                let t = self.expr(t, cx);
                Expr::Ctor(name("cons"), vec![h, t], span)
            }
            SExprKind::Op(op, args) => {
                let args = args.iter().map(|a| self.expr(a, cx)).collect();
                Expr::Op(*op, args, span)
            }
            SExprKind::Let { pat, rhs, body } => {
                let rhs = self.expr(rhs, cx);
                match &pat.kind {
                    SPatKind::Name(n) if !self.is_ctor_pat_name(n) => {
                        cx.scope.push(n.clone());
                        let body = self.expr(body, cx);
                        cx.scope.pop();
                        Expr::Let(n.clone(), Box::new(rhs), Box::new(body), span)
                    }
                    SPatKind::Wild => {
                        let v = cx.fresh();
                        let body = self.expr(body, cx);
                        Expr::Let(v, Box::new(rhs), Box::new(body), span)
                    }
                    _ => {
                        let mut binds = Vec::new();
                        let p = self.pat(pat, &mut binds);
                        let depth = cx.scope.len();
                        cx.scope.extend(binds);
                        let body = self.expr(body, cx);
                        cx.scope.truncate(depth);
                        Expr::Match(Box::new(rhs), vec![MatchArm { pat: p, body }], span)
                    }
                }
            }
            SExprKind::LetFun { def, body } => {
                let lifted = self.lift_local(def, cx);
                cx.locals.push(lifted);
                let body = self.expr(body, cx);
                cx.locals.pop();
                body
            }
            SExprKind::If(c, t, e2) => Expr::If(
                Box::new(self.expr(c, cx)),
                Box::new(self.expr(t, cx)),
                Box::new(self.expr(e2, cx)),
                span,
            ),
            SExprKind::Match(scrut, arms) => {
                let scrut = self.expr(scrut, cx);
                let mut out = Vec::new();
                for (p, b) in arms {
                    let mut binds = Vec::new();
                    let pat = self.pat(p, &mut binds);
                    let depth = cx.scope.len();
                    cx.scope.extend(binds);
                    let body = self.expr(b, cx);
                    cx.scope.truncate(depth);
                    out.push(MatchArm { pat, body });
                }
                Expr::Match(Box::new(scrut), out, span)
            }
            SExprKind::Record(fields) => self.record_literal(fields, span, cx),
            SExprKind::Update { base, fields } => self.record_update(base, fields, span, cx),
            SExprKind::Quote(f) => {
                let f = self.formula(f, cx);
                Expr::Quote(f, span)
            }
            SExprKind::SmtVar { name: nm, ty } => {
                let nm = self.expr(nm, cx);
                let ty = self.smt_var_ty(ty);
                Expr::SmtVar { name: Box::new(nm), ty, span }
            }
            SExprKind::Hole => {
                // In a clause, `_` nested in a destructuring position is an
                // anonymous rule variable; each hole is distinct.
                if cx.clause_mode {
                    Expr::Var(cx.fresh(), span)
                } else {
                    self.err("`_` is only meaningful inside a rule or a match pattern", span);
                    Expr::Const(Constant::Bool(false), span)
                }
            }
            SExprKind::Project => {
                self.err("`??` is only meaningful as a relation argument", span);
                Expr::Const(Constant::Bool(false), span)
            }
        }
    }

    /// The type index of `#{..}[t]` must be a pre-type.
    fn smt_var_ty(&mut self, sty: &STy) -> PreType {
        match self.open_ty(sty) {
            Some(t) => match t.as_pre() {
                Some(p) => p,
                None => {
                    self.err("SMT variables are indexed by a concrete type", sty.span);
                    PreType::Base(flg_core::types::Base::Bool)
                }
            },
            None => PreType::Base(flg_core::types::Base::Bool),
        }
    }

    fn is_ctor_pat_name(&self, n: &Name) -> bool {
        self.decls.ctor_owner.contains_key(n)
    }

    fn ident(&mut self, n: &Name, span: Span, cx: &mut Cx) -> Expr {
        if cx.in_scope(n) {
            return Expr::Var(n.clone(), span);
        }
        if is_upper(n) {
            if cx.clause_mode {
                return Expr::Var(n.clone(), span);
            }
            self.err(format!("unbound variable `{n}`"), span);
            return Expr::Const(Constant::Bool(false), span);
        }
        if let Some((_, lifted, caps)) = cx.locals.iter().rev().find(|(s, _, _)| s == n).cloned() {
            let sig_params = self.sigs.functions.get(&lifted).map(|s| s.params.len()).unwrap_or(0);
            if sig_params != caps.len() {
                self.err(format!("function `{n}` expects arguments"), span);
                return Expr::Const(Constant::Bool(false), span);
            }
            let args = caps.iter().map(|c| Expr::Var(c.clone(), span)).collect();
            return Expr::Fun(lifted, args, span);
        }
        if let Some((_, _, decl)) = self.decls.ctor(n) {
            if decl.args.is_empty() {
                return Expr::Ctor(n.clone(), Vec::new(), span);
            }
            self.err(format!("constructor `{n}` expects {} arguments", decl.args.len()), span);
            return Expr::Const(Constant::Bool(false), span);
        }
        if let Some(sig) = self.sigs.functions.get(n) {
            if sig.params.is_empty() {
                return Expr::Fun(n.clone(), Vec::new(), span);
            }
            self.err(format!("function `{n}` expects {} arguments", sig.params.len()), span);
            return Expr::Const(Constant::Bool(false), span);
        }
        if let Some(sig) = self.sigs.relations.get(n) {
            if sig.cols.is_empty() {
                return Expr::RelCall(n.clone(), Vec::new(), span);
            }
            self.err(format!("relation `{n}` expects {} arguments", sig.cols.len()), span);
            return Expr::Const(Constant::Bool(false), span);
        }
        if self.sigs.ufs.contains_key(n) {
            self.err(format!("uninterpreted function `{n}` appears only inside formulas"), span);
        } else {
            self.err(format!("unbound identifier `{n}`"), span);
        }
        Expr::Const(Constant::Bool(false), span)
    }

    fn call(&mut self, n: &Name, args: &[SExpr], span: Span, cx: &mut Cx) -> Expr {
        if let Some((_, lifted, caps)) = cx.locals.iter().rev().find(|(s, _, _)| s == n).cloned() {
            let declared = self
                .sigs
                .functions
                .get(&lifted)
                .map(|s| s.params.len() - caps.len())
                .unwrap_or(0);
            if args.len() != declared {
                self.err(format!("function `{n}` expects {declared} arguments, got {}", args.len()), span);
                return Expr::Const(Constant::Bool(false), span);
            }
            let mut out: Vec<Expr> = args.iter().map(|a| self.plain_arg(a, cx)).collect();
            out.extend(caps.iter().map(|c| Expr::Var(c.clone(), span)));
            return Expr::Fun(lifted, out, span);
        }
        if cx.in_scope(n) {
            self.err(format!("`{n}` is a variable; variables cannot be applied"), span);
            return Expr::Const(Constant::Bool(false), span);
        }
        if let Some(op) = builtin_op(n) {
            if args.len() != op.arity() {
                self.err(format!("`{n}` expects {} arguments, got {}", op.arity(), args.len()), span);
                return Expr::Const(Constant::Bool(false), span);
            }
            let args = args.iter().map(|a| self.plain_arg(a, cx)).collect();
            return Expr::Op(op, args, span);
        }
        if let Some((_, _, decl)) = self.decls.ctor(n) {
            if args.len() != decl.args.len() {
                self.err(
                    format!("constructor `{n}` expects {} arguments, got {}", decl.args.len(), args.len()),
                    span,
                );
                return Expr::Const(Constant::Bool(false), span);
            }
            let args = args.iter().map(|a| self.plain_arg(a, cx)).collect();
            return Expr::Ctor(n.clone(), args, span);
        }
        if let Some(sig) = self.sigs.functions.get(n).cloned() {
            if args.len() != sig.params.len() {
                self.err(
                    format!("function `{n}` expects {} arguments, got {}", sig.params.len(), args.len()),
                    span,
                );
                return Expr::Const(Constant::Bool(false), span);
            }
            let args = args.iter().map(|a| self.plain_arg(a, cx)).collect();
            return Expr::Fun(n.clone(), args, span);
        }
        if let Some(sig) = self.sigs.relations.get(n).cloned() {
            if args.len() != sig.cols.len() {
                self.err(
                    format!("relation `{n}` expects {} arguments, got {}", sig.cols.len(), args.len()),
                    span,
                );
                return Expr::Const(Constant::Bool(false), span);
            }
            let args = args
                .iter()
                .map(|a| match &a.kind {
                    SExprKind::Hole => RelArg::Hole(a.span),
                    SExprKind::Project => RelArg::Project(a.span),
                    _ => RelArg::Expr(self.expr(a, cx)),
                })
                .collect();
            return Expr::RelCall(n.clone(), args, span);
        }
        if self.sigs.ufs.contains_key(n) {
            self.err(format!("uninterpreted function `{n}` appears only inside formulas"), span);
        } else if formula_op(n).is_some() || matches!(&**n, "smt_let" | "bv_const") {
            self.err(format!("`{n}` is a formula constructor; it appears only inside backticks"), span);
        } else {
            self.err(format!("unknown function `{n}`"), span);
        }
        Expr::Const(Constant::Bool(false), span)
    }

    /// Call argument in a non-relation position: `??` is rejected; `_`
    /// falls through to the expression lowering, which accepts it in clauses.
    fn plain_arg(&mut self, a: &SExpr, cx: &mut Cx) -> Expr {
        match &a.kind {
            SExprKind::Project => {
                self.err("`??` is only meaningful as a relation argument", a.span);
                Expr::Const(Constant::Bool(false), a.span)
            }
            _ => self.expr(a, cx),
        }
    }

    fn record_literal(&mut self, fields: &[(Name, SExpr, Span)], span: Span, cx: &mut Cx) -> Expr {
        let mut names: Vec<Name> = Vec::new();
        for (f, _, fspan) in fields {
            if names.contains(f) {
                self.err(format!("duplicate field `{f}` in record literal"), *fspan);
                return Expr::Const(Constant::Bool(false), span);
            }
            names.push(f.clone());
        }
        let mut sorted = names.clone();
        sorted.sort();
        let Some(rec) = self.record_by_fields.get(&sorted).cloned() else {
            self.err("no record type has exactly these fields", span);
            return Expr::Const(Constant::Bool(false), span);
        };
        let order = self.records[&rec].clone();
        let args = order
            .iter()
            .map(|f| {
                let (_, e, _) = fields.iter().find(|(g, _, _)| g == f).unwrap();
                self.expr(e, cx)
            })
            .collect();
        Expr::Ctor(rec, args, span)
    }

    /// `{e with f = v}` pattern-matches the record and rebuilds it with the
    /// named fields replaced.
    fn record_update(&mut self, base: &SExpr, fields: &[(Name, SExpr, Span)], span: Span, cx: &mut Cx) -> Expr {
        let mut names: Vec<Name> = Vec::new();
        for (f, _, fspan) in fields {
            if names.contains(f) {
                self.err(format!("duplicate field `{f}` in record update"), *fspan);
                return Expr::Const(Constant::Bool(false), span);
            }
            names.push(f.clone());
        }
        let candidates: Vec<Name> = self
            .records
            .iter()
            .filter(|(_, fs)| names.iter().all(|n| fs.contains(n)))
            .map(|(r, _)| r.clone())
            .collect();
        let rec = match candidates.as_slice() {
            [r] => r.clone(),
            [] => {
                self.err("no record type has these fields", span);
                return Expr::Const(Constant::Bool(false), span);
            }
            _ => {
                self.err(
                    format!("record update is ambiguous between `{}` and `{}`", candidates[0], candidates[1]),
                    span,
                );
                return Expr::Const(Constant::Bool(false), span);
            }
        };
        let base = self.expr(base, cx);
        let order = self.records[&rec].clone();
        let binders: Vec<Name> = order.iter().map(|_| cx.fresh()).collect();
        let pats = binders.iter().map(|b| Pattern::Var(b.clone(), span)).collect();
        let rebuilt = order
            .iter()
            .zip(&binders)
            .map(|(f, b)| match fields.iter().find(|(g, _, _)| g == f) {
                Some((_, e, _)) => self.expr(e, cx),
                None => Expr::Var(b.clone(), span),
            })
            .collect();
        Expr::Match(
            Box::new(base),
            vec![MatchArm {
                pat: Pattern::Ctor(rec.clone(), pats, span),
                body: Expr::Ctor(rec, rebuilt, span),
            }],
            span,
        )
    }

    // Patterns

    fn pat(&mut self, p: &SPat, binds: &mut Vec<Name>) -> Pattern {
        let span = p.span;
        match &p.kind {
            SPatKind::Wild => Pattern::Wild(span),
            SPatKind::Const(c) => Pattern::Const(c.clone(), span),
            SPatKind::Name(n) => {
                if let Some((_, _, decl)) = self.decls.ctor(n) {
                    if decl.args.is_empty() {
                        return Pattern::Ctor(n.clone(), Vec::new(), span);
                    }
                    self.err(format!("constructor `{n}` expects {} arguments", decl.args.len()), span);
                    return Pattern::Wild(span);
                }
                binds.push(n.clone());
                Pattern::Var(n.clone(), span)
            }
            SPatKind::Ctor(n, args) => {
                let Some((_, _, decl)) = self.decls.ctor(n) else {
                    self.err(format!("unknown constructor `{n}`"), span);
                    return Pattern::Wild(span);
                };
                if decl.args.len() != args.len() {
                    self.err(
                        format!("constructor `{n}` expects {} arguments, got {}", decl.args.len(), args.len()),
                        span,
                    );
                    return Pattern::Wild(span);
                }
                let args = args.iter().map(|a| self.pat(a, binds)).collect();
                Pattern::Ctor(n.clone(), args, span)
            }
            SPatKind::Tuple(items) => {
                let Some(adt) = tuple_adt(items.len()) else {
                    self.err("tuples have 2 to 8 components", span);
                    return Pattern::Wild(span);
                };
                let args = items.iter().map(|a| self.pat(a, binds)).collect();
                Pattern::Ctor(name(adt), args, span)
            }
            SPatKind::Cons(h, t) => {
                let h = self.pat(h, binds);
                let t = self.pat(t, binds);
                Pattern::Ctor(name("cons"), vec![h, t], span)
            }
        }
    }

    // Local function lifting

    /// Lifts a local function to a top-level one whose extra trailing
    /// parameters are the captured variables, typed by fresh type variables
    /// resolved during inference.
    fn lift_local(&mut self, def: &SFunDef, cx: &mut Cx) -> (Name, Name, Vec<Name>) {
        let lifted = name(&format!("{}${}", def.name, self.lifts));
        self.lifts += 1;

        let mut captures: BTreeSet<Name> = BTreeSet::new();
        let mut locals: Vec<Name> = def.params.iter().map(|(p, _)| p.clone()).collect();
        self.surface_captures(&def.body, &mut locals, cx, &mut captures);
        let captures: Vec<Name> = captures.into_iter().collect();

        let base_sig = self.fun_sig(def);
        let mut sig = base_sig.unwrap_or(FunSig {
            type_params: Vec::new(),
            params: def.params.iter().map(|_| Type::Var(name("'$e"))).collect(),
            ret: Type::Var(name("'$e")),
        });
        for (i, _) in captures.iter().enumerate() {
            let tv = name(&format!("'$c{i}"));
            sig.type_params.push(tv.clone());
            sig.params.push(Type::Var(tv));
        }
        self.sigs.functions.insert(lifted.clone(), sig.clone());

        let mut inner = Cx::new(cx.host.clone(), cx.clause_mode);
        inner.fresh = cx.fresh;
        inner.locals = cx.locals.clone();
        inner.locals.push((def.name.clone(), lifted.clone(), captures.clone()));
        for (p, _) in &def.params {
            inner.scope.push(p.clone());
        }
        inner.scope.extend(captures.iter().cloned());
        let body = self.expr(&def.body, &mut inner);
        cx.fresh = inner.fresh;

        let mut params: Vec<(Name, Type)> = def
            .params
            .iter()
            .map(|(p, _)| p.clone())
            .zip(sig.params.iter().cloned())
            .collect();
        for (c, t) in captures.iter().zip(sig.params.iter().skip(def.params.len())) {
            params.push((c.clone(), t.clone()));
        }
        self.functions.insert(
            lifted.clone(),
            FunDef {
                name: lifted.clone(),
                type_params: sig.type_params,
                params,
                ret: sig.ret,
                body,
                span: def.span,
            },
        );
        (def.name.clone(), lifted, captures)
    }

    /// Free variables of a surface expression that refer to bindings visible
    /// at the `let fun` site (or rule variables, inside clauses).
    fn surface_captures(&self, e: &SExpr, locals: &mut Vec<Name>, cx: &Cx, out: &mut BTreeSet<Name>) {
        match &e.kind {
            SExprKind::Ident(n) => {
                if !locals.contains(n) && (cx.in_scope(n) || (cx.clause_mode && is_upper(n))) {
                    out.insert(n.clone());
                }
            }
            SExprKind::Const(_) | SExprKind::Hole | SExprKind::Project => {}
            SExprKind::Call(_, args) | SExprKind::Tuple(args) | SExprKind::List(args) | SExprKind::Op(_, args) => {
                for a in args {
                    self.surface_captures(a, locals, cx, out);
                }
            }
            SExprKind::Cons(h, t) => {
                self.surface_captures(h, locals, cx, out);
                self.surface_captures(t, locals, cx, out);
            }
            SExprKind::Let { pat, rhs, body } => {
                self.surface_captures(rhs, locals, cx, out);
                let depth = locals.len();
                self.spat_binders(pat, locals);
                self.surface_captures(body, locals, cx, out);
                locals.truncate(depth);
            }
            SExprKind::LetFun { def, body } => {
                let depth = locals.len();
                locals.extend(def.params.iter().map(|(p, _)| p.clone()));
                self.surface_captures(&def.body, locals, cx, out);
                locals.truncate(depth);
                self.surface_captures(body, locals, cx, out);
            }
            SExprKind::If(a, b, c) => {
                self.surface_captures(a, locals, cx, out);
                self.surface_captures(b, locals, cx, out);
                self.surface_captures(c, locals, cx, out);
            }
            SExprKind::Match(scrut, arms) => {
                self.surface_captures(scrut, locals, cx, out);
                for (p, b) in arms {
                    let depth = locals.len();
                    self.spat_binders(p, locals);
                    self.surface_captures(b, locals, cx, out);
                    locals.truncate(depth);
                }
            }
            SExprKind::Record(fields) => {
                for (_, e, _) in fields {
                    self.surface_captures(e, locals, cx, out);
                }
            }
            SExprKind::Update { base, fields } => {
                self.surface_captures(base, locals, cx, out);
                for (_, e, _) in fields {
                    self.surface_captures(e, locals, cx, out);
                }
            }
            SExprKind::Quote(f) => self.formula_captures(f, locals, cx, out),
            SExprKind::SmtVar { name: nm, .. } => self.surface_captures(nm, locals, cx, out),
        }
    }

    fn formula_captures(&self, f: &SFormula, locals: &mut Vec<Name>, cx: &Cx, out: &mut BTreeSet<Name>) {
        match &f.kind {
            SFormulaKind::Ident(n) => {
                if !locals.contains(n) && (cx.in_scope(n) || (cx.clause_mode && is_upper(n))) {
                    out.insert(n.clone());
                }
            }
            SFormulaKind::Const(_) => {}
            SFormulaKind::Call(_, args) | SFormulaKind::Tuple(args) => {
                for a in args {
                    self.formula_captures(a, locals, cx, out);
                }
            }
            SFormulaKind::Not(a) | SFormulaKind::BvConst(_, a) | SFormulaKind::Tester(_, a) | SFormulaKind::Getter(_, _, a) => {
                self.formula_captures(a, locals, cx, out);
            }
            SFormulaKind::And(a, b) | SFormulaKind::Or(a, b) | SFormulaKind::Imp(a, b) | SFormulaKind::SmtEq(a, b) => {
                self.formula_captures(a, locals, cx, out);
                self.formula_captures(b, locals, cx, out);
            }
            SFormulaKind::Ite(a, b, c) | SFormulaKind::SmtLet(a, b, c) => {
                self.formula_captures(a, locals, cx, out);
                self.formula_captures(b, locals, cx, out);
                self.formula_captures(c, locals, cx, out);
            }
            SFormulaKind::Quant { binders, patterns, body, .. } => {
                for b in binders.iter().chain(patterns.iter()) {
                    self.formula_captures(b, locals, cx, out);
                }
                self.formula_captures(body, locals, cx, out);
            }
            SFormulaKind::SmtVar { name: nm, .. } => self.surface_captures(nm, locals, cx, out),
        }
    }

    fn spat_binders(&self, p: &SPat, out: &mut Vec<Name>) {
        match &p.kind {
            SPatKind::Name(n) => {
                if !self.is_ctor_pat_name(n) {
                    out.push(n.clone());
                }
            }
            SPatKind::Wild | SPatKind::Const(_) => {}
            SPatKind::Ctor(_, args) | SPatKind::Tuple(args) => {
                for a in args {
                    self.spat_binders(a, out);
                }
            }
            SPatKind::Cons(h, t) => {
                self.spat_binders(h, out);
                self.spat_binders(t, out);
            }
        }
    }

    // Formulas

    fn formula(&mut self, f: &SFormula, cx: &mut Cx) -> Formula {
        let span = f.span;
        let node = |n: SmtNode<Formula>| Formula::Node(Box::new(n), span);
        match &f.kind {
            SFormulaKind::Const(c) => node(SmtNode::ConstK(c.clone())),
            SFormulaKind::Ident(n) => {
                if cx.in_scope(n) || (cx.clause_mode && is_upper(n)) {
                    return Formula::Unquote(Box::new(Expr::Var(n.clone(), span)));
                }
                if is_upper(n) {
                    self.err(format!("unbound variable `{n}`"), span);
                    return node(SmtNode::ConstK(Constant::Bool(false)));
                }
                if let Some((_, _, decl)) = self.decls.ctor(n) {
                    if decl.args.is_empty() {
                        return node(SmtNode::Ctor(n.clone(), Vec::new()));
                    }
                    self.err(format!("constructor `{n}` expects {} arguments", decl.args.len()), span);
                    return node(SmtNode::ConstK(Constant::Bool(false)));
                }
                if let Some(sig) = self.sigs.ufs.get(n) {
                    if sig.args.is_empty() {
                        return node(SmtNode::Uf(n.clone(), Vec::new()));
                    }
                    self.err(format!("`{n}` expects {} arguments", sig.args.len()), span);
                    return node(SmtNode::ConstK(Constant::Bool(false)));
                }
                // Fall back to the expression meaning (unquoted).
                let e = self.ident(n, span, cx);
                Formula::Unquote(Box::new(e))
            }
            SFormulaKind::Call(n, args) => {
                if let Some(op) = formula_op(n) {
                    if args.len() != op.arity() {
                        self.err(format!("`{n}` expects {} arguments, got {}", op.arity(), args.len()), span);
                        return node(SmtNode::ConstK(Constant::Bool(false)));
                    }
                    let args = args.iter().map(|a| self.formula(a, cx)).collect();
                    return node(SmtNode::Op(op, args));
                }
                if let Some((_, _, decl)) = self.decls.ctor(n) {
                    if args.len() != decl.args.len() {
                        self.err(
                            format!("constructor `{n}` expects {} arguments, got {}", decl.args.len(), args.len()),
                            span,
                        );
                        return node(SmtNode::ConstK(Constant::Bool(false)));
                    }
                    let args = args.iter().map(|a| self.formula(a, cx)).collect();
                    return node(SmtNode::Ctor(n.clone(), args));
                }
                if let Some(sig) = self.sigs.ufs.get(n).cloned() {
                    if args.len() != sig.args.len() {
                        self.err(format!("`{n}` expects {} arguments, got {}", sig.args.len(), args.len()), span);
                        return node(SmtNode::ConstK(Constant::Bool(false)));
                    }
                    let args = args.iter().map(|a| self.formula(a, cx)).collect();
                    return node(SmtNode::Uf(n.clone(), args));
                }
                if self.sigs.functions.contains_key(n) || self.sigs.relations.contains_key(n) || builtin_op(n).is_some() {
                    self.err(
                        format!("`{n}` cannot be called inside a formula; bind its result outside the quotation"),
                        span,
                    );
                } else if n.as_ref() == "bv_const" {
                    self.err("`bv_const` requires a width index, e.g. `bv_const[32](x)`", span);
                } else {
                    self.err(format!("unknown constructor `{n}`"), span);
                }
                node(SmtNode::ConstK(Constant::Bool(false)))
            }
            SFormulaKind::Tuple(items) => {
                let Some(adt) = tuple_adt(items.len()) else {
                    self.err("tuples have 2 to 8 components", span);
                    return node(SmtNode::ConstK(Constant::Bool(false)));
                };
                let args = items.iter().map(|a| self.formula(a, cx)).collect();
                node(SmtNode::Ctor(name(adt), args))
            }
            SFormulaKind::Not(a) => {
                let a = self.formula(a, cx);
                node(SmtNode::Op(SmtOp::Not, vec![a]))
            }
            SFormulaKind::And(a, b) => {
                let args = vec![self.formula(a, cx), self.formula(b, cx)];
                node(SmtNode::Op(SmtOp::AndOp, args))
            }
            SFormulaKind::Or(a, b) => {
                let args = vec![self.formula(a, cx), self.formula(b, cx)];
                node(SmtNode::Op(SmtOp::OrOp, args))
            }
            SFormulaKind::Imp(a, b) => {
                let args = vec![self.formula(a, cx), self.formula(b, cx)];
                node(SmtNode::Op(SmtOp::Imp, args))
            }
            SFormulaKind::SmtEq(a, b) => {
                let args = vec![self.formula(a, cx), self.formula(b, cx)];
                node(SmtNode::Op(SmtOp::SmtEq, args))
            }
            SFormulaKind::Ite(a, b, c) => {
                let args = vec![self.formula(a, cx), self.formula(b, cx), self.formula(c, cx)];
                node(SmtNode::Op(SmtOp::Ite, args))
            }
            SFormulaKind::BvConst(k, a) => {
                let a = self.formula(a, cx);
                node(SmtNode::Op(SmtOp::BvConst(*k), vec![a]))
            }
            SFormulaKind::SmtLet(v, b, body) => {
                let v = self.formula(v, cx);
                let b = self.formula(b, cx);
                let body = self.formula(body, cx);
                node(SmtNode::Let { var: v, bound: b, body })
            }
            SFormulaKind::Quant { forall, binders, patterns, body } => {
                let kind = if *forall { QuantKind::Forall } else { QuantKind::Exists };
                let binders = binders.iter().map(|b| self.formula(b, cx)).collect();
                let patterns = patterns.iter().map(|p| self.formula(p, cx)).collect();
                let body = self.formula(body, cx);
                node(SmtNode::Quant { kind, binders, patterns, body })
            }
            SFormulaKind::Tester(c, a) => {
                if self.decls.ctor(c).is_none() {
                    self.err(format!("unknown constructor `{c}` in tester"), span);
                }
                let a = self.formula(a, cx);
                node(SmtNode::Tester(c.clone(), a))
            }
            SFormulaKind::Getter(c, i, a) => {
                match self.decls.ctor(c) {
                    None => self.err(format!("unknown constructor `{c}` in getter"), span),
                    Some((_, _, decl)) if (*i as usize) > decl.args.len() => {
                        self.err(
                            format!("constructor `{c}` has {} arguments; getter index {i} is out of range", decl.args.len()),
                            span,
                        );
                    }
                    _ => {}
                }
                let a = self.formula(a, cx);
                node(SmtNode::Getter(c.clone(), *i, a))
            }
            SFormulaKind::SmtVar { name: nm, ty } => {
                let nm = self.expr(nm, cx);
                let ty = self.smt_var_ty(ty);
                Formula::Unquote(Box::new(Expr::SmtVar { name: Box::new(nm), ty, span }))
            }
        }
    }

    // Clauses

    fn clause(&mut self, head: &SAtom, body: &[SPremise], span: Span) {
        let Some(sig) = self.sigs.relations.get(&head.pred).cloned() else {
            self.err(format!("unknown relation `{}`", head.pred), head.span);
            return;
        };
        if head.args.len() != sig.cols.len() {
            self.err(
                format!("relation `{}` expects {} arguments, got {}", head.pred, sig.cols.len(), head.args.len()),
                head.span,
            );
            return;
        }
        if sig.kind == RelKind::Input && !body.is_empty() {
            self.err(format!("rules cannot derive into input relation `{}`", head.pred), head.span);
            return;
        }

        let mut cx = Cx::new(head.pred.clone(), true);
        let mut bound: BTreeSet<Name> = BTreeSet::new();
        let mut out: Vec<Premise> = Vec::new();

        for p in body {
            match p {
                SPremise::Atom { atom, positive } => {
                    let Some(asig) = self.sigs.relations.get(&atom.pred).cloned() else {
                        self.err(format!("unknown relation `{}`", atom.pred), atom.span);
                        continue;
                    };
                    if atom.args.len() != asig.cols.len() {
                        self.err(
                            format!(
                                "relation `{}` expects {} arguments, got {}",
                                atom.pred,
                                asig.cols.len(),
                                atom.args.len()
                            ),
                            atom.span,
                        );
                        continue;
                    }
                    let mut names = Vec::new();
                    let mut eqs = Vec::new();
                    for a in &atom.args {
                        match &a.kind {
                            SExprKind::Ident(n) if is_upper(n) => names.push(n.clone()),
                            SExprKind::Hole => names.push(cx.fresh()),
                            _ => {
                                let v = cx.fresh();
                                let rhs = self.expr(a, &mut cx);
                                eqs.push(Premise::Eq { var: v.clone(), rhs, span: a.span });
                                self.clause_vars(a, &mut Vec::new(), &mut bound);
                                names.push(v);
                            }
                        }
                    }
                    bound.extend(names.iter().cloned());
                    let new_atom = Atom { pred: atom.pred.clone(), args: names, span: atom.span };
                    if *positive {
                        // Destructuring equalities follow the atom so its
                        // columns bind their variables first.
                        out.push(Premise::Pos(new_atom));
                        out.extend(eqs);
                    } else {
                        // A negated atom needs its arguments bound up front.
                        out.extend(eqs);
                        out.push(Premise::Neg(new_atom));
                    }
                }
                SPremise::Eq { lhs, rhs, positive: true, span: pspan } => {
                    self.positive_eq(lhs, rhs, *pspan, &mut cx, &mut bound, &mut out);
                }
                SPremise::Eq { lhs, rhs, positive: false, span: pspan } => {
                    if let SExprKind::Ident(n) = &lhs.kind {
                        if is_upper(n) {
                            let rhs = self.expr(rhs, &mut cx);
                            out.push(Premise::NegEq { var: n.clone(), rhs, span: *pspan });
                            continue;
                        }
                    }
                    if let SExprKind::Ident(n) = &rhs.kind {
                        if is_upper(n) {
                            let lhs = self.expr(lhs, &mut cx);
                            out.push(Premise::NegEq { var: n.clone(), rhs: lhs, span: *pspan });
                            continue;
                        }
                    }
                    let v = cx.fresh();
                    let l = self.expr(lhs, &mut cx);
                    let r = self.expr(rhs, &mut cx);
                    out.push(Premise::Eq { var: v.clone(), rhs: l, span: *pspan });
                    out.push(Premise::NegEq { var: v.clone(), rhs: r, span: *pspan });
                    bound.insert(v);
                }
            }
        }

        // Non-variable head arguments are bound by trailing equalities.
        let mut args = Vec::new();
        for a in &head.args {
            match &a.kind {
                SExprKind::Ident(n) if is_upper(n) => args.push(n.clone()),
                _ => {
                    let v = cx.fresh();
                    let rhs = self.expr(a, &mut cx);
                    out.push(Premise::Eq { var: v.clone(), rhs, span: a.span });
                    args.push(v);
                }
            }
        }
        self.clauses.push(Clause {
            head: Atom { pred: head.pred.clone(), args, span: head.span },
            body: out,
            span,
        });
    }

    /// Normalizes `e1 = e2` so one side is a variable. When neither side is,
    /// the side that must be evaluated (a call rather than a pattern) comes
    /// first; ties fall to whichever side is fully bound.
    fn positive_eq(
        &mut self,
        lhs: &SExpr,
        rhs: &SExpr,
        span: Span,
        cx: &mut Cx,
        bound: &mut BTreeSet<Name>,
        out: &mut Vec<Premise>,
    ) {
        let both = |this: &mut Lower, e: &SExpr, bound: &mut BTreeSet<Name>| {
            this.clause_vars(e, &mut Vec::new(), bound);
        };
        if let SExprKind::Ident(n) = &lhs.kind {
            if is_upper(n) {
                let rhs_e = self.expr(rhs, cx);
                out.push(Premise::Eq { var: n.clone(), rhs: rhs_e, span });
                bound.insert(n.clone());
                both(self, rhs, bound);
                return;
            }
        }
        if let SExprKind::Ident(n) = &rhs.kind {
            if is_upper(n) {
                let lhs_e = self.expr(lhs, cx);
                out.push(Premise::Eq { var: n.clone(), rhs: lhs_e, span });
                bound.insert(n.clone());
                both(self, lhs, bound);
                return;
            }
        }
        let lp = self.pattern_like(lhs);
        let rp = self.pattern_like(rhs);
        let lhs_first = if lp != rp {
            // The non-pattern side is evaluated first.
            !lp
        } else {
            let mut lv = BTreeSet::new();
            self.clause_vars(lhs, &mut Vec::new(), &mut lv);
            lv.is_subset(bound)
        };
        let (first, second) = if lhs_first { (lhs, rhs) } else { (rhs, lhs) };
        let v = cx.fresh();
        let f = self.expr(first, cx);
        let s = self.expr(second, cx);
        out.push(Premise::Eq { var: v.clone(), rhs: f, span });
        out.push(Premise::Eq { var: v.clone(), rhs: s, span });
        bound.insert(v);
        both(self, lhs, bound);
        both(self, rhs, bound);
    }

    /// Collects rule variables (unshadowed uppercase identifiers) of a
    /// surface expression.
    fn clause_vars(&self, e: &SExpr, locals: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match &e.kind {
            SExprKind::Ident(n) => {
                if is_upper(n) && !locals.contains(n) {
                    out.insert(n.clone());
                }
            }
            SExprKind::Const(_) | SExprKind::Hole | SExprKind::Project => {}
            SExprKind::Call(_, args) | SExprKind::Tuple(args) | SExprKind::List(args) | SExprKind::Op(_, args) => {
                for a in args {
                    self.clause_vars(a, locals, out);
                }
            }
            SExprKind::Cons(h, t) => {
                self.clause_vars(h, locals, out);
                self.clause_vars(t, locals, out);
            }
            SExprKind::Let { pat, rhs, body } => {
                self.clause_vars(rhs, locals, out);
                let depth = locals.len();
                self.spat_binders(pat, locals);
                self.clause_vars(body, locals, out);
                locals.truncate(depth);
            }
            SExprKind::LetFun { def, body } => {
                let depth = locals.len();
                locals.extend(def.params.iter().map(|(p, _)| p.clone()));
                self.clause_vars(&def.body, locals, out);
                locals.truncate(depth);
                self.clause_vars(body, locals, out);
            }
            SExprKind::If(a, b, c) => {
                self.clause_vars(a, locals, out);
                self.clause_vars(b, locals, out);
                self.clause_vars(c, locals, out);
            }
            SExprKind::Match(scrut, arms) => {
                self.clause_vars(scrut, locals, out);
                for (p, b) in arms {
                    let depth = locals.len();
                    self.spat_binders(p, locals);
                    self.clause_vars(b, locals, out);
                    locals.truncate(depth);
                }
            }
            SExprKind::Record(fields) => {
                for (_, e, _) in fields {
                    self.clause_vars(e, locals, out);
                }
            }
            SExprKind::Update { base, fields } => {
                self.clause_vars(base, locals, out);
                for (_, e, _) in fields {
                    self.clause_vars(e, locals, out);
                }
            }
            SExprKind::Quote(f) => self.formula_clause_vars(f, locals, out),
            SExprKind::SmtVar { name: nm, .. } => self.clause_vars(nm, locals, out),
        }
    }

    fn formula_clause_vars(&self, f: &SFormula, locals: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match &f.kind {
            SFormulaKind::Ident(n) => {
                if is_upper(n) && !locals.contains(n) {
                    out.insert(n.clone());
                }
            }
            SFormulaKind::Const(_) => {}
            SFormulaKind::Call(_, args) | SFormulaKind::Tuple(args) => {
                for a in args {
                    self.formula_clause_vars(a, locals, out);
                }
            }
            SFormulaKind::Not(a) | SFormulaKind::BvConst(_, a) | SFormulaKind::Tester(_, a) | SFormulaKind::Getter(_, _, a) => {
                self.formula_clause_vars(a, locals, out);
            }
            SFormulaKind::And(a, b) | SFormulaKind::Or(a, b) | SFormulaKind::Imp(a, b) | SFormulaKind::SmtEq(a, b) => {
                self.formula_clause_vars(a, locals, out);
                self.formula_clause_vars(b, locals, out);
            }
            SFormulaKind::Ite(a, b, c) | SFormulaKind::SmtLet(a, b, c) => {
                self.formula_clause_vars(a, locals, out);
                self.formula_clause_vars(b, locals, out);
                self.formula_clause_vars(c, locals, out);
            }
            SFormulaKind::Quant { binders, patterns, body, .. } => {
                for b in binders.iter().chain(patterns.iter()) {
                    self.formula_clause_vars(b, locals, out);
                }
                self.formula_clause_vars(body, locals, out);
            }
            SFormulaKind::SmtVar { name: nm, .. } => self.clause_vars(nm, locals, out),
        }
    }

    /// True for expressions that unification can treat as patterns:
    /// variables, constants, and constructor trees over them.
    fn pattern_like(&self, e: &SExpr) -> bool {
        match &e.kind {
            SExprKind::Const(_) => true,
            SExprKind::Ident(n) => {
                is_upper(n) || matches!(self.decls.ctor(n), Some((_, _, d)) if d.args.is_empty())
            }
            SExprKind::Call(n, args) => {
                self.decls.ctor(n).is_some() && args.iter().all(|a| self.pattern_like(a))
            }
            SExprKind::Tuple(items) | SExprKind::List(items) => items.iter().all(|a| self.pattern_like(a)),
            SExprKind::Cons(h, t) => self.pattern_like(h) && self.pattern_like(t),
            SExprKind::Quote(_) => true,
            SExprKind::SmtVar { name: nm, .. } => self.pattern_like(nm),
            _ => false,
        }
    }
}

fn collect_tyvars(t: &Type, out: &mut Vec<Name>) {
    match t {
        Type::Var(a) => {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
        Type::Adt(_, args) => {
            for a in args {
                collect_tyvars(a, out);
            }
        }
        Type::Smt(p) | Type::Sym(p) => collect_tyvars(&p.clone().into_type(), out),
        Type::Base(_) | Type::Model => {}
    }
}
