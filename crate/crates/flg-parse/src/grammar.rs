//! Recursive descent parser from tokens to the surface tree. Fails on the
//! first syntax error; there is no recovery.

use crate::ast::*;
use crate::lex::Tok;
use flg_core::diag::{Diagnostic, Span};
use flg_core::term::{Constant, Op};
use flg_core::{name, Name};

pub struct Parser<'a> {
    toks: &'a [(Tok, Span)],
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

pub fn parse_decls(toks: &[(Tok, Span)]) -> PResult<Vec<SDecl>> {
    let mut p = Parser { toks, pos: 0 };
    let mut decls = Vec::new();
    while !p.at(&Tok::Eof) {
        decls.push(p.decl()?);
    }
    Ok(decls)
}

/// Parses one expression spanning the whole token stream; used by the
/// ground-term reader for fact files.
pub fn parse_single_expr(toks: &[(Tok, Span)]) -> PResult<SExpr> {
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    p.expect(&Tok::Eof)?;
    Ok(e)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn here(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> PResult<Span> {
        if self.at(t) {
            let sp = self.here();
            self.bump();
            Ok(sp)
        } else {
            Err(self.unexpected(&format!("expected {}", t.describe())))
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::error(
            "parse",
            format!("{what}, found {}", self.peek().describe()),
            self.here(),
        )
    }

    fn lident(&mut self, what: &str) -> PResult<(Name, Span)> {
        match self.peek().clone() {
            Tok::LIdent(n) => {
                let sp = self.here();
                self.bump();
                Ok((n, sp))
            }
            _ => Err(self.unexpected(&format!("expected {what}"))),
        }
    }

    // Declarations

    fn decl(&mut self) -> PResult<SDecl> {
        match self.peek() {
            Tok::KwType => self.type_decl(),
            Tok::KwFun => {
                let def = self.fun_def()?;
                Ok(SDecl::Fun(def))
            }
            Tok::KwInput | Tok::KwOutput => self.rel_decl(),
            Tok::KwUninterpreted => self.uninterp_decl(),
            Tok::LIdent(_) => self.clause(),
            _ => Err(self.unexpected("expected a declaration or clause")),
        }
    }

    fn type_params(&mut self) -> PResult<Vec<Name>> {
        match self.peek().clone() {
            Tok::TyVar(v) => {
                self.bump();
                Ok(vec![v])
            }
            Tok::LParen if matches!(self.peek2(), Tok::TyVar(_)) => {
                self.bump();
                let mut out = Vec::new();
                loop {
                    match self.peek().clone() {
                        Tok::TyVar(v) => {
                            self.bump();
                            out.push(v);
                        }
                        _ => return Err(self.unexpected("expected a type variable")),
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::RParen)?;
                Ok(out)
            }
            _ => Ok(Vec::new()),
        }
    }

    fn type_decl(&mut self) -> PResult<SDecl> {
        let lo = self.expect(&Tok::KwType)?;
        let params = self.type_params()?;
        let (tyname, _) = self.lident("a type name")?;
        self.expect(&Tok::Eq)?;
        let body = if self.at(&Tok::LBrace) {
            self.bump();
            let mut fields = Vec::new();
            while !self.at(&Tok::RBrace) {
                let (f, fsp) = self.lident("a field name")?;
                self.expect(&Tok::Colon)?;
                let ty = self.ty()?;
                fields.push((f, ty, fsp));
                if !self.eat(&Tok::Semi) {
                    break;
                }
            }
            self.expect(&Tok::RBrace)?;
            if fields.is_empty() {
                return Err(Diagnostic::error("parse", "record type has no fields", lo));
            }
            STypeBody::Record(fields)
        } else if self.at(&Tok::Pipe)
            || matches!(self.peek(), Tok::LIdent(_))
                && matches!(self.peek2(), Tok::LParen | Tok::Pipe)
        {
            self.eat(&Tok::Pipe);
            let mut ctors = Vec::new();
            loop {
                let (c, csp) = self.lident("a constructor name")?;
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) {
                    loop {
                        args.push(self.ty()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(&Tok::RParen)?;
                }
                ctors.push((c, args, csp));
                if !self.eat(&Tok::Pipe) {
                    break;
                }
            }
            STypeBody::Ctors(ctors)
        } else {
            STypeBody::Alias(self.ty()?)
        };
        Ok(SDecl::Type { params, name: tyname, body, span: lo.to(self.prev_span()) })
    }

    fn fun_def(&mut self) -> PResult<SFunDef> {
        let lo = self.expect(&Tok::KwFun)?;
        let (fname, _) = self.lident("a function name")?;
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                let pname = match self.peek().clone() {
                    Tok::LIdent(n) | Tok::UIdent(n) => {
                        self.bump();
                        n
                    }
                    _ => return Err(self.unexpected("expected a parameter name")),
                };
                self.expect(&Tok::Colon)?;
                let ty = self.ty()?;
                params.push((pname, ty));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen)?;
        }
        self.expect(&Tok::Colon)?;
        let ret = self.ty()?;
        self.expect(&Tok::Eq)?;
        let body = self.expr()?;
        Ok(SFunDef { name: fname, params, ret, body, span: lo.to(self.prev_span()) })
    }

    fn rel_decl(&mut self) -> PResult<SDecl> {
        let lo = self.here();
        let input = self.bump() == Tok::KwInput;
        let (rname, _) = self.lident("a relation name")?;
        let mut cols = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                cols.push(self.ty()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen)?;
        }
        Ok(SDecl::Rel { input, name: rname, cols, span: lo.to(self.prev_span()) })
    }

    fn uninterp_decl(&mut self) -> PResult<SDecl> {
        let lo = self.expect(&Tok::KwUninterpreted)?;
        if self.eat(&Tok::KwFun) {
            let (fname, _) = self.lident("an uninterpreted function name")?;
            self.expect(&Tok::LParen)?;
            let mut args = Vec::new();
            if !self.at(&Tok::RParen) {
                loop {
                    args.push(self.ty()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(&Tok::RParen)?;
            self.expect(&Tok::Colon)?;
            let ret = self.ty()?;
            Ok(SDecl::UninterpFun { name: fname, args, ret, span: lo.to(self.prev_span()) })
        } else if self.eat(&Tok::KwSort) {
            let params = self.type_params()?;
            let (sname, _) = self.lident("a sort name")?;
            Ok(SDecl::UninterpSort { params, name: sname, span: lo.to(self.prev_span()) })
        } else {
            Err(self.unexpected("expected `fun` or `sort` after `uninterpreted`"))
        }
    }

    fn atom(&mut self) -> PResult<SAtom> {
        let (pred, lo) = self.lident("a predicate name")?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen)?;
        }
        Ok(SAtom { pred, args, span: lo.to(self.prev_span()) })
    }

    fn clause(&mut self) -> PResult<SDecl> {
        let lo = self.here();
        let head = self.atom()?;
        let mut body = Vec::new();
        if self.eat(&Tok::ColonDash) {
            loop {
                body.push(self.premise()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::Dot)?;
        Ok(SDecl::Clause { head, body, span: lo.to(self.prev_span()) })
    }

    fn premise(&mut self) -> PResult<SPremise> {
        let lo = self.here();
        if self.eat(&Tok::Bang) {
            if self.eat(&Tok::LParen) {
                let lhs = self.expr()?;
                self.expect(&Tok::Eq)?;
                let rhs = self.expr()?;
                self.expect(&Tok::RParen)?;
                return Ok(SPremise::Eq { lhs, rhs, positive: false, span: lo.to(self.prev_span()) });
            }
            let atom = self.atom()?;
            return Ok(SPremise::Atom { atom, positive: false });
        }
        let lhs = self.expr()?;
        if self.eat(&Tok::Eq) {
            let rhs = self.expr()?;
            return Ok(SPremise::Eq { lhs, rhs, positive: true, span: lo.to(self.prev_span()) });
        }
        if self.eat(&Tok::NotEq) {
            let rhs = self.expr()?;
            return Ok(SPremise::Eq { lhs, rhs, positive: false, span: lo.to(self.prev_span()) });
        }
        match lhs.kind {
            SExprKind::Ident(pred) => {
                Ok(SPremise::Atom { atom: SAtom { pred, args: Vec::new(), span: lhs.span }, positive: true })
            }
            SExprKind::Call(pred, args) => {
                Ok(SPremise::Atom { atom: SAtom { pred, args, span: lhs.span }, positive: true })
            }
            _ => Err(Diagnostic::error(
                "parse",
                "expected a premise: a predicate atom or an equality",
                lhs.span,
            )),
        }
    }

    // Types

    fn ty(&mut self) -> PResult<STy> {
        let lo = self.here();
        let mut parts = vec![self.ty_post()?];
        while self.eat(&Tok::Star) {
            parts.push(self.ty_post()?);
        }
        if parts.len() == 1 {
            Ok(parts.pop().unwrap())
        } else {
            Ok(STy { kind: STyKind::Tuple(parts), span: lo.to(self.prev_span()) })
        }
    }

    fn ty_post(&mut self) -> PResult<STy> {
        let lo = self.here();
        let (mut cur, multi) = self.ty_atom()?;
        if let Some(args) = multi {
            let (n, _) = self.lident("a type name after the argument list")?;
            if n.as_ref() == "smt" || n.as_ref() == "sym" {
                return Err(Diagnostic::error("parse", "`smt` and `sym` take a single type", lo));
            }
            cur = STy { kind: STyKind::App(n, args), span: lo.to(self.prev_span()) };
        }
        while let Tok::LIdent(n) = self.peek().clone() {
            self.bump();
            let span = lo.to(self.prev_span());
            let kind = match n.as_ref() {
                "smt" => STyKind::Smt(Box::new(cur)),
                "sym" => STyKind::Sym(Box::new(cur)),
                _ => STyKind::App(n, vec![cur]),
            };
            cur = STy { kind, span };
        }
        Ok(cur)
    }

    /// Returns either a single type or a parenthesized argument list that
    /// must be followed by a type name.
    fn ty_atom(&mut self) -> PResult<(STy, Option<Vec<STy>>)> {
        let lo = self.here();
        match self.peek().clone() {
            Tok::TyVar(v) => {
                self.bump();
                Ok((STy { kind: STyKind::Var(v), span: lo }, None))
            }
            Tok::LIdent(n) => {
                self.bump();
                let kind = match n.as_ref() {
                    "bool" => STyKind::Bool,
                    "string" => STyKind::Str,
                    "model" => STyKind::Model,
                    "i32" => STyKind::Bv(32),
                    "i64" => STyKind::Bv(64),
                    "smt" | "sym" => {
                        return Err(Diagnostic::error(
                            "parse",
                            format!("`{n}` is a postfix type former"),
                            lo,
                        ))
                    }
                    "bv" => {
                        self.expect(&Tok::LBracket)?;
                        let k = match self.peek().clone() {
                            Tok::Int(k, false) if k == 32 || k == 64 => {
                                self.bump();
                                k as u32
                            }
                            _ => {
                                return Err(Diagnostic::error(
                                    "parse",
                                    "bit vector widths are 32 or 64",
                                    self.here(),
                                ))
                            }
                        };
                        self.expect(&Tok::RBracket)?;
                        STyKind::Bv(k)
                    }
                    _ => STyKind::App(n, Vec::new()),
                };
                Ok((STy { kind, span: lo.to(self.prev_span()) }, None))
            }
            Tok::LParen => {
                self.bump();
                let mut tys = vec![self.ty()?];
                while self.eat(&Tok::Comma) {
                    tys.push(self.ty()?);
                }
                self.expect(&Tok::RParen)?;
                if tys.len() == 1 {
                    Ok((tys.pop().unwrap(), None))
                } else {
                    Ok((STy { kind: STyKind::Bool, span: lo }, Some(tys)))
                }
            }
            _ => Err(self.unexpected("expected a type")),
        }
    }

    // Expressions

    fn expr(&mut self) -> PResult<SExpr> {
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> PResult<SExpr> {
        let lo = self.here();
        let lhs = self.cons_expr()?;
        let op = match self.peek() {
            Tok::Lt => Op::Lt,
            Tok::Le => Op::Le,
            Tok::Gt => Op::Gt,
            Tok::Ge => Op::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.cons_expr()?;
        Ok(SExpr { kind: SExprKind::Op(op, vec![lhs, rhs]), span: lo.to(self.prev_span()) })
    }

    fn cons_expr(&mut self) -> PResult<SExpr> {
        let lo = self.here();
        let head = self.add_expr()?;
        if self.eat(&Tok::ColonColon) {
            let tail = self.cons_expr()?;
            return Ok(SExpr {
                kind: SExprKind::Cons(Box::new(head), Box::new(tail)),
                span: lo.to(self.prev_span()),
            });
        }
        Ok(head)
    }

    fn add_expr(&mut self) -> PResult<SExpr> {
        let lo = self.here();
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => Op::Add,
                Tok::Minus => Op::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.mul_expr()?;
            lhs = SExpr { kind: SExprKind::Op(op, vec![lhs, rhs]), span: lo.to(self.prev_span()) };
        }
    }

    fn mul_expr(&mut self) -> PResult<SExpr> {
        let lo = self.here();
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => Op::Mul,
                Tok::Slash => Op::Div,
                Tok::Percent => Op::Rem,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary_expr()?;
            lhs = SExpr { kind: SExprKind::Op(op, vec![lhs, rhs]), span: lo.to(self.prev_span()) };
        }
    }

    fn int_const(&mut self, negative: bool) -> PResult<Constant> {
        let sp = self.here();
        let Tok::Int(mag, wide) = self.bump() else { unreachable!() };
        let c = if wide {
            let limit = if negative { i64::MIN.unsigned_abs() } else { i64::MAX as u64 };
            if mag > limit {
                return Err(Diagnostic::error("parse", "integer literal out of range", sp));
            }
            Constant::Bv64(if negative { (mag as i64).wrapping_neg() } else { mag as i64 })
        } else {
            let limit = if negative { i32::MIN.unsigned_abs() as u64 } else { i32::MAX as u64 };
            if mag > limit {
                return Err(Diagnostic::error("parse", "integer literal out of range", sp));
            }
            Constant::Bv32(if negative { (mag as i32).wrapping_neg() } else { mag as i32 })
        };
        Ok(c)
    }

    fn unary_expr(&mut self) -> PResult<SExpr> {
        let lo = self.here();
        if self.eat(&Tok::Minus) {
            if matches!(self.peek(), Tok::Int(..)) {
                let c = self.int_const(true)?;
                return Ok(SExpr { kind: SExprKind::Const(c), span: lo.to(self.prev_span()) });
            }
            let inner = self.unary_expr()?;
            return Ok(SExpr {
                kind: SExprKind::Op(Op::Neg, vec![inner]),
                span: lo.to(self.prev_span()),
            });
        }
        self.atom_expr()
    }

    fn call_args(&mut self) -> PResult<Vec<SExpr>> {
        let mut args = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        Ok(args)
    }

    fn record_fields(&mut self) -> PResult<Vec<(Name, SExpr, Span)>> {
        let mut fields = Vec::new();
        while !self.at(&Tok::RBrace) {
            let (f, fsp) = self.lident("a field name")?;
            self.expect(&Tok::Eq)?;
            let e = self.expr()?;
            fields.push((f, e, fsp));
            if !self.eat(&Tok::Semi) {
                break;
            }
        }
        self.expect(&Tok::RBrace)?;
        Ok(fields)
    }

    fn atom_expr(&mut self) -> PResult<SExpr> {
        let lo = self.here();
        let kind = match self.peek().clone() {
            Tok::Int(..) => SExprKind::Const(self.int_const(false)?),
            Tok::StrLit(s) => {
                self.bump();
                SExprKind::Const(Constant::Str(name(&s)))
            }
            Tok::KwTrue => {
                self.bump();
                SExprKind::Const(Constant::Bool(true))
            }
            Tok::KwFalse => {
                self.bump();
                SExprKind::Const(Constant::Bool(false))
            }
            Tok::Underscore => {
                self.bump();
                SExprKind::Hole
            }
            Tok::Project => {
                self.bump();
                SExprKind::Project
            }
            Tok::UIdent(n) => {
                self.bump();
                if self.at(&Tok::LParen) {
                    return Err(Diagnostic::error(
                        "parse",
                        "function, constructor, and relation names start lowercase",
                        self.here(),
                    ));
                }
                SExprKind::Ident(n)
            }
            Tok::LIdent(n) => {
                self.bump();
                if self.eat(&Tok::LParen) {
                    SExprKind::Call(n, self.call_args()?)
                } else {
                    SExprKind::Ident(n)
                }
            }
            Tok::LParen => {
                self.bump();
                let mut items = vec![self.expr()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.expr()?);
                }
                self.expect(&Tok::RParen)?;
                if items.len() == 1 {
                    return Ok(items.pop().unwrap());
                }
                SExprKind::Tuple(items)
            }
            Tok::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if !self.at(&Tok::RBracket) {
                    loop {
                        items.push(self.expr()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(&Tok::RBracket)?;
                SExprKind::List(items)
            }
            Tok::LBrace => {
                self.bump();
                if matches!(self.peek(), Tok::LIdent(_)) && *self.peek2() == Tok::Eq {
                    SExprKind::Record(self.record_fields()?)
                } else {
                    let base = self.expr()?;
                    self.expect(&Tok::KwWith)?;
                    let fields = self.record_fields()?;
                    SExprKind::Update { base: Box::new(base), fields }
                }
            }
            Tok::KwLet => {
                self.bump();
                if self.at(&Tok::KwFun) {
                    let def = self.fun_def()?;
                    self.expect(&Tok::KwIn)?;
                    let body = self.expr()?;
                    SExprKind::LetFun { def: Box::new(def), body: Box::new(body) }
                } else {
                    let pat = self.pattern()?;
                    self.expect(&Tok::Eq)?;
                    let rhs = self.expr()?;
                    self.expect(&Tok::KwIn)?;
                    let body = self.expr()?;
                    SExprKind::Let { pat, rhs: Box::new(rhs), body: Box::new(body) }
                }
            }
            Tok::KwIf => {
                self.bump();
                let c = self.expr()?;
                self.expect(&Tok::KwThen)?;
                let t = self.expr()?;
                self.expect(&Tok::KwElse)?;
                let e = self.expr()?;
                SExprKind::If(Box::new(c), Box::new(t), Box::new(e))
            }
            Tok::KwMatch => {
                self.bump();
                let scrut = self.expr()?;
                self.expect(&Tok::KwWith)?;
                self.eat(&Tok::Pipe);
                let mut arms = Vec::new();
                loop {
                    let pat = self.pattern()?;
                    self.expect(&Tok::Arrow)?;
                    let body = self.expr()?;
                    arms.push((pat, body));
                    if !self.eat(&Tok::Pipe) {
                        break;
                    }
                }
                self.expect(&Tok::KwEnd)?;
                SExprKind::Match(Box::new(scrut), arms)
            }
            Tok::Backtick => {
                self.bump();
                let f = self.formula()?;
                self.expect(&Tok::Backtick)?;
                SExprKind::Quote(f)
            }
            Tok::HashIdent(n) => {
                self.bump();
                if self.at(&Tok::LBracket) {
                    let ty = self.smt_var_type()?;
                    let nm = SExpr { kind: SExprKind::Const(Constant::Str(n)), span: lo };
                    SExprKind::SmtVar { name: Box::new(nm), ty }
                } else {
                    return Err(Diagnostic::error(
                        "parse",
                        format!("`#{n}` is a formula form and must appear inside backticks"),
                        lo,
                    ));
                }
            }
            Tok::HashLBrace => {
                self.bump();
                let nm = self.expr()?;
                self.expect(&Tok::RBrace)?;
                let ty = self.smt_var_type()?;
                SExprKind::SmtVar { name: Box::new(nm), ty }
            }
            _ => return Err(self.unexpected("expected an expression")),
        };
        Ok(SExpr { kind, span: lo.to(self.prev_span()) })
    }

    fn smt_var_type(&mut self) -> PResult<STy> {
        self.expect(&Tok::LBracket)?;
        let ty = self.ty()?;
        self.expect(&Tok::RBracket)?;
        Ok(ty)
    }

    // Patterns

    fn pattern(&mut self) -> PResult<SPat> {
        let lo = self.here();
        let head = self.pattern_atom()?;
        if self.eat(&Tok::ColonColon) {
            let tail = self.pattern()?;
            return Ok(SPat {
                kind: SPatKind::Cons(Box::new(head), Box::new(tail)),
                span: lo.to(self.prev_span()),
            });
        }
        Ok(head)
    }

    fn pattern_atom(&mut self) -> PResult<SPat> {
        let lo = self.here();
        let kind = match self.peek().clone() {
            Tok::Underscore => {
                self.bump();
                SPatKind::Wild
            }
            Tok::UIdent(n) => {
                self.bump();
                SPatKind::Name(n)
            }
            Tok::LIdent(n) => {
                self.bump();
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    loop {
                        args.push(self.pattern()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(&Tok::RParen)?;
                    SPatKind::Ctor(n, args)
                } else {
                    SPatKind::Name(n)
                }
            }
            Tok::Int(..) => SPatKind::Const(self.int_const(false)?),
            Tok::Minus => {
                self.bump();
                if !matches!(self.peek(), Tok::Int(..)) {
                    return Err(self.unexpected("expected an integer literal"));
                }
                SPatKind::Const(self.int_const(true)?)
            }
            Tok::StrLit(s) => {
                self.bump();
                SPatKind::Const(Constant::Str(name(&s)))
            }
            Tok::KwTrue => {
                self.bump();
                SPatKind::Const(Constant::Bool(true))
            }
            Tok::KwFalse => {
                self.bump();
                SPatKind::Const(Constant::Bool(false))
            }
            Tok::LBracket => {
                self.bump();
                self.expect(&Tok::RBracket)?;
                SPatKind::Ctor(name("nil"), Vec::new())
            }
            Tok::LParen => {
                self.bump();
                let mut items = vec![self.pattern()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.pattern()?);
                }
                self.expect(&Tok::RParen)?;
                if items.len() == 1 {
                    return Ok(items.pop().unwrap());
                }
                SPatKind::Tuple(items)
            }
            _ => return Err(self.unexpected("expected a pattern")),
        };
        Ok(SPat { kind, span: lo.to(self.prev_span()) })
    }

    // Formulas

    fn formula(&mut self) -> PResult<SFormula> {
        self.f_imp()
    }

    fn f_binary(
        &mut self,
        lo: Span,
        lhs: SFormula,
        rhs: SFormula,
        make: fn(Box<SFormula>, Box<SFormula>) -> SFormulaKind,
    ) -> SFormula {
        SFormula { kind: make(Box::new(lhs), Box::new(rhs)), span: lo.to(self.prev_span()) }
    }

    fn f_imp(&mut self) -> PResult<SFormula> {
        let lo = self.here();
        let lhs = self.f_or()?;
        if self.eat(&Tok::FImp) {
            let rhs = self.f_imp()?;
            return Ok(self.f_binary(lo, lhs, rhs, SFormulaKind::Imp));
        }
        Ok(lhs)
    }

    fn f_or(&mut self) -> PResult<SFormula> {
        let lo = self.here();
        let lhs = self.f_and()?;
        if self.eat(&Tok::FOr) {
            let rhs = self.f_or()?;
            return Ok(self.f_binary(lo, lhs, rhs, SFormulaKind::Or));
        }
        Ok(lhs)
    }

    fn f_and(&mut self) -> PResult<SFormula> {
        let lo = self.here();
        let lhs = self.f_eq()?;
        if self.eat(&Tok::FAnd) {
            let rhs = self.f_and()?;
            return Ok(self.f_binary(lo, lhs, rhs, SFormulaKind::And));
        }
        Ok(lhs)
    }

    fn f_eq(&mut self) -> PResult<SFormula> {
        let lo = self.here();
        let lhs = self.f_not()?;
        if self.eat(&Tok::HashEq) {
            let rhs = self.f_not()?;
            return Ok(self.f_binary(lo, lhs, rhs, SFormulaKind::SmtEq));
        }
        Ok(lhs)
    }

    fn f_not(&mut self) -> PResult<SFormula> {
        let lo = self.here();
        if self.eat(&Tok::Tilde) {
            let inner = self.f_not()?;
            return Ok(SFormula {
                kind: SFormulaKind::Not(Box::new(inner)),
                span: lo.to(self.prev_span()),
            });
        }
        self.f_atom()
    }

    fn f_args(&mut self) -> PResult<Vec<SFormula>> {
        self.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                args.push(self.formula()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        Ok(args)
    }

    fn f_atom(&mut self) -> PResult<SFormula> {
        let lo = self.here();
        let kind = match self.peek().clone() {
            Tok::KwForall | Tok::KwExists => {
                let forall = self.bump() == Tok::KwForall;
                let mut binders = vec![self.formula()?];
                while self.eat(&Tok::Comma) {
                    binders.push(self.formula()?);
                }
                let mut patterns = Vec::new();
                if self.eat(&Tok::Colon) {
                    patterns.push(self.formula()?);
                    while self.eat(&Tok::Comma) {
                        patterns.push(self.formula()?);
                    }
                }
                self.expect(&Tok::Dot)?;
                let body = self.formula()?;
                SFormulaKind::Quant { forall, binders, patterns, body: Box::new(body) }
            }
            Tok::KwTrue => {
                self.bump();
                SFormulaKind::Const(Constant::Bool(true))
            }
            Tok::KwFalse => {
                self.bump();
                SFormulaKind::Const(Constant::Bool(false))
            }
            Tok::Int(..) => SFormulaKind::Const(self.int_const(false)?),
            Tok::Minus => {
                self.bump();
                if !matches!(self.peek(), Tok::Int(..)) {
                    return Err(self.unexpected("expected an integer literal"));
                }
                SFormulaKind::Const(self.int_const(true)?)
            }
            Tok::StrLit(s) => {
                self.bump();
                SFormulaKind::Const(Constant::Str(name(&s)))
            }
            Tok::UIdent(n) => {
                self.bump();
                SFormulaKind::Ident(n)
            }
            Tok::LIdent(n) => {
                self.bump();
                match n.as_ref() {
                    "smt_let" if self.at(&Tok::LParen) => {
                        let mut args = self.f_args()?;
                        if args.len() != 3 {
                            return Err(Diagnostic::error(
                                "parse",
                                "smt_let takes a variable, a bound formula, and a body",
                                lo,
                            ));
                        }
                        let body = Box::new(args.pop().unwrap());
                        let bound = Box::new(args.pop().unwrap());
                        let var = Box::new(args.pop().unwrap());
                        SFormulaKind::SmtLet(var, bound, body)
                    }
                    "bv_const" if self.at(&Tok::LBracket) => {
                        self.bump();
                        let k = match self.peek().clone() {
                            Tok::Int(k, false) if k == 32 || k == 64 => {
                                self.bump();
                                k as u32
                            }
                            _ => {
                                return Err(Diagnostic::error(
                                    "parse",
                                    "bv_const widths are 32 or 64",
                                    self.here(),
                                ))
                            }
                        };
                        self.expect(&Tok::RBracket)?;
                        let mut args = self.f_args()?;
                        if args.len() != 1 {
                            return Err(Diagnostic::error("parse", "bv_const takes one argument", lo));
                        }
                        SFormulaKind::BvConst(k, Box::new(args.pop().unwrap()))
                    }
                    _ if self.at(&Tok::LParen) => SFormulaKind::Call(n, self.f_args()?),
                    _ => SFormulaKind::Ident(n),
                }
            }
            Tok::HashIdent(n) => {
                self.bump();
                if self.at(&Tok::LBracket) {
                    let ty = self.smt_var_type()?;
                    let nm = SExpr { kind: SExprKind::Const(Constant::Str(n)), span: lo };
                    SFormulaKind::SmtVar { name: Box::new(nm), ty }
                } else if n.as_ref() == "if" {
                    let c = self.formula()?;
                    self.expect(&Tok::KwThen)?;
                    let t = self.formula()?;
                    self.expect(&Tok::KwElse)?;
                    let e = self.formula()?;
                    SFormulaKind::Ite(Box::new(c), Box::new(t), Box::new(e))
                } else if self.at(&Tok::LParen) {
                    if let Some(ctor) = n.strip_prefix("is_") {
                        let mut args = self.f_args()?;
                        if args.len() != 1 {
                            return Err(Diagnostic::error("parse", "testers take one argument", lo));
                        }
                        SFormulaKind::Tester(name(ctor), Box::new(args.pop().unwrap()))
                    } else if let Some((base, idx)) = split_getter(&n) {
                        let mut args = self.f_args()?;
                        if args.len() != 1 {
                            return Err(Diagnostic::error("parse", "getters take one argument", lo));
                        }
                        SFormulaKind::Getter(base, idx, Box::new(args.pop().unwrap()))
                    } else {
                        return Err(Diagnostic::error(
                            "parse",
                            format!("unknown formula form `#{n}`"),
                            lo,
                        ));
                    }
                } else {
                    return Err(Diagnostic::error(
                        "parse",
                        format!("expected `[type]` or arguments after `#{n}`"),
                        lo,
                    ));
                }
            }
            Tok::HashLBrace => {
                self.bump();
                let nm = self.expr()?;
                self.expect(&Tok::RBrace)?;
                let ty = self.smt_var_type()?;
                SFormulaKind::SmtVar { name: Box::new(nm), ty }
            }
            Tok::LParen => {
                self.bump();
                let mut items = vec![self.formula()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.formula()?);
                }
                self.expect(&Tok::RParen)?;
                if items.len() == 1 {
                    return Ok(items.pop().unwrap());
                }
                SFormulaKind::Tuple(items)
            }
            _ => return Err(self.unexpected("expected a formula")),
        };
        Ok(SFormula { kind, span: lo.to(self.prev_span()) })
    }
}

/// Splits a getter name `c_i` into the constructor and the 1-based index.
fn split_getter(n: &str) -> Option<(Name, u32)> {
    let (base, digits) = n.rsplit_once('_')?;
    if base.is_empty() || digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let idx: u32 = digits.parse().ok()?;
    if idx == 0 {
        return None;
    }
    Some((name(base), idx))
}
