//! Surface syntax tree. Name resolution (constructor vs function vs
//! relation, record fields, aliases) happens during desugaring, so this
//! tree keeps identifiers unclassified.

use flg_core::diag::Span;
use flg_core::term::Constant;
use flg_core::Name;

#[derive(Debug, Clone)]
pub struct STy {
    pub kind: STyKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum STyKind {
    Bool,
    Str,
    Bv(u32),
    Model,
    Var(Name),
    /// Named application `args name`; aliases are still unresolved.
    App(Name, Vec<STy>),
    Tuple(Vec<STy>),
    Smt(Box<STy>),
    Sym(Box<STy>),
}

#[derive(Debug, Clone)]
pub enum STypeBody {
    Alias(STy),
    Ctors(Vec<(Name, Vec<STy>, Span)>),
    Record(Vec<(Name, STy, Span)>),
}

#[derive(Debug, Clone)]
pub struct SFunDef {
    pub name: Name,
    pub params: Vec<(Name, STy)>,
    pub ret: STy,
    pub body: SExpr,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum SDecl {
    Type { params: Vec<Name>, name: Name, body: STypeBody, span: Span },
    UninterpSort { params: Vec<Name>, name: Name, span: Span },
    UninterpFun { name: Name, args: Vec<STy>, ret: STy, span: Span },
    Rel { input: bool, name: Name, cols: Vec<STy>, span: Span },
    Fun(SFunDef),
    Clause { head: SAtom, body: Vec<SPremise>, span: Span },
}

#[derive(Debug, Clone)]
pub struct SAtom {
    pub pred: Name,
    pub args: Vec<SExpr>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum SPremise {
    Atom { atom: SAtom, positive: bool },
    Eq { lhs: SExpr, rhs: SExpr, positive: bool, span: Span },
}

#[derive(Debug, Clone)]
pub struct SExpr {
    pub kind: SExprKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum SExprKind {
    /// Unresolved identifier: local binder, rule variable, nullary
    /// constructor, or nullary function.
    Ident(Name),
    Const(Constant),
    Call(Name, Vec<SExpr>),
    Tuple(Vec<SExpr>),
    List(Vec<SExpr>),
    /// `head :: tail`
    Cons(Box<SExpr>, Box<SExpr>),
    Op(flg_core::term::Op, Vec<SExpr>),
    Let { pat: SPat, rhs: Box<SExpr>, body: Box<SExpr> },
    LetFun { def: Box<SFunDef>, body: Box<SExpr> },
    If(Box<SExpr>, Box<SExpr>, Box<SExpr>),
    Match(Box<SExpr>, Vec<(SPat, SExpr)>),
    Record(Vec<(Name, SExpr, Span)>),
    Update { base: Box<SExpr>, fields: Vec<(Name, SExpr, Span)> },
    Quote(SFormula),
    /// `#id[t]` keeps the identifier; `#{e}[t]` keeps the expression.
    SmtVar { name: Box<SExpr>, ty: STy },
    /// `_` in predicate argument positions.
    Hole,
    /// `??` in predicate-as-function calls.
    Project,
}

#[derive(Debug, Clone)]
pub struct SPat {
    pub kind: SPatKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum SPatKind {
    Wild,
    /// Binder or nullary constructor; resolved during desugaring.
    Name(Name),
    Const(Constant),
    Ctor(Name, Vec<SPat>),
    Tuple(Vec<SPat>),
    Cons(Box<SPat>, Box<SPat>),
}

#[derive(Debug, Clone)]
pub struct SFormula {
    pub kind: SFormulaKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum SFormulaKind {
    /// Unresolved: ML binder or rule variable (implicit unquote), nullary
    /// constructor, nullary uninterpreted function, or nullary function.
    Ident(Name),
    Const(Constant),
    /// Constructor, named formula operator, uninterpreted function, or
    /// tuple lift.
    Call(Name, Vec<SFormula>),
    Tuple(Vec<SFormula>),
    Not(Box<SFormula>),
    And(Box<SFormula>, Box<SFormula>),
    Or(Box<SFormula>, Box<SFormula>),
    Imp(Box<SFormula>, Box<SFormula>),
    SmtEq(Box<SFormula>, Box<SFormula>),
    Ite(Box<SFormula>, Box<SFormula>, Box<SFormula>),
    BvConst(u32, Box<SFormula>),
    SmtLet(Box<SFormula>, Box<SFormula>, Box<SFormula>),
    Quant { forall: bool, binders: Vec<SFormula>, patterns: Vec<SFormula>, body: Box<SFormula> },
    Tester(Name, Box<SFormula>),
    Getter(Name, u32, Box<SFormula>),
    SmtVar { name: Box<SExpr>, ty: STy },
}
