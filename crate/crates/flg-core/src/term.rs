//! The normalized abstract syntax produced by desugaring: expressions,
//! quoted formulas, clauses in premise normal form, and whole programs.
//! Quotation depth never exceeds one — formulas appear only under a quote
//! and unquotes only inside a formula.

use crate::diag::Span;
use crate::types::{DataTypeDecls, PreType, ProgramDecls, Type};
use crate::Name;
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Constant {
    Bool(bool),
    Bv32(i32),
    Bv64(i64),
    Str(Name),
}

impl Constant {
    /// typeof(k): the base type of a constant.
    pub fn type_of(&self) -> crate::types::Base {
        use crate::types::Base;
        match self {
            Constant::Bool(_) => Base::Bool,
            Constant::Bv32(_) => Base::Bv(32),
            Constant::Bv64(_) => Base::Bv(64),
            Constant::Str(_) => Base::Str,
        }
    }
}

/// Built-in operators. Arithmetic and comparisons are overloaded over
/// bv[32]/bv[64]; equality is polymorphic structural equality.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Neg,
    Lt,
    Le,
    Gt,
    Ge,
    IsSat,
    IsValid,
    IsSatOpt,
    GetModel,
    QueryModel,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Div => "/",
            Op::Rem => "%",
            Op::Neg => "neg",
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Gt => ">",
            Op::Ge => ">=",
            Op::IsSat => "is_sat",
            Op::IsValid => "is_valid",
            Op::IsSatOpt => "is_sat_opt",
            Op::GetModel => "get_model",
            Op::QueryModel => "query_model",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Op::Neg | Op::IsSat | Op::IsValid => 1,
            _ => 2,
        }
    }
}

/// Built-in formula constructors (the c^SMT family apart from var, const,
/// ctor[c], let, quantifiers, uf, testers, and getters).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum SmtOp {
    Not,
    AndOp,
    OrOp,
    Imp,
    SmtEq,
    Ite,
    BvConst(u32),
    BvNeg,
    BvAdd,
    BvSub,
    BvMul,
    BvSdiv,
    BvSrem,
    BvAnd,
    BvOr,
    BvXor,
    BvShl,
    BvLshr,
    BvAshr,
    BvSlt,
    BvSle,
    BvSgt,
    BvSge,
    BvUlt,
    BvUle,
    BvUgt,
    BvUge,
}

impl SmtOp {
    pub fn name(self) -> &'static str {
        match self {
            SmtOp::Not => "smt_not",
            SmtOp::AndOp => "smt_and",
            SmtOp::OrOp => "smt_or",
            SmtOp::Imp => "smt_imp",
            SmtOp::SmtEq => "smt_eq",
            SmtOp::Ite => "smt_ite",
            SmtOp::BvConst(_) => "bv_const",
            SmtOp::BvNeg => "bv_neg",
            SmtOp::BvAdd => "bv_add",
            SmtOp::BvSub => "bv_sub",
            SmtOp::BvMul => "bv_mul",
            SmtOp::BvSdiv => "bv_sdiv",
            SmtOp::BvSrem => "bv_srem",
            SmtOp::BvAnd => "bv_and",
            SmtOp::BvOr => "bv_or",
            SmtOp::BvXor => "bv_xor",
            SmtOp::BvShl => "bv_shl",
            SmtOp::BvLshr => "bv_lshr",
            SmtOp::BvAshr => "bv_ashr",
            SmtOp::BvSlt => "bv_slt",
            SmtOp::BvSle => "bv_sle",
            SmtOp::BvSgt => "bv_sgt",
            SmtOp::BvSge => "bv_sge",
            SmtOp::BvUlt => "bv_ult",
            SmtOp::BvUle => "bv_ule",
            SmtOp::BvUgt => "bv_ugt",
            SmtOp::BvUge => "bv_uge",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            SmtOp::Not | SmtOp::BvNeg | SmtOp::BvConst(_) => 1,
            SmtOp::Ite => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum QuantKind {
    Forall,
    Exists,
}

/// One c^SMT node, generic over the child representation so formulas
/// (children are sub-formulas), values (children are values), and
/// unification patterns share structure.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum SmtNode<T> {
    /// `#{name}[ty]` — an SMT variable named by an arbitrary value.
    Var { name: T, ty: PreType },
    /// `const[k]()` — embedded constant.
    ConstK(Constant),
    /// `ctor[c](args)` — lifted user constructor.
    Ctor(Name, Vec<T>),
    Op(SmtOp, Vec<T>),
    Let { var: T, bound: T, body: T },
    Quant { kind: QuantKind, binders: Vec<T>, patterns: Vec<T>, body: T },
    /// `uf[f](args)` — uninterpreted function application.
    Uf(Name, Vec<T>),
    /// `#is_c(phi)` — constructor tester.
    Tester(Name, T),
    /// `#c_i(phi)` — constructor argument getter, `index` is 1-based.
    Getter(Name, u32, T),
}

impl<T> SmtNode<T> {
    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> SmtNode<U> {
        match self {
            SmtNode::Var { name, ty } => SmtNode::Var { name: f(name), ty: ty.clone() },
            SmtNode::ConstK(k) => SmtNode::ConstK(k.clone()),
            SmtNode::Ctor(c, args) => SmtNode::Ctor(c.clone(), args.iter().map(&mut f).collect()),
            SmtNode::Op(op, args) => SmtNode::Op(*op, args.iter().map(&mut f).collect()),
            SmtNode::Let { var, bound, body } => {
                SmtNode::Let { var: f(var), bound: f(bound), body: f(body) }
            }
            SmtNode::Quant { kind, binders, patterns, body } => SmtNode::Quant {
                kind: *kind,
                binders: binders.iter().map(&mut f).collect(),
                patterns: patterns.iter().map(&mut f).collect(),
                body: f(body),
            },
            SmtNode::Uf(u, args) => SmtNode::Uf(u.clone(), args.iter().map(&mut f).collect()),
            SmtNode::Tester(c, arg) => SmtNode::Tester(c.clone(), f(arg)),
            SmtNode::Getter(c, i, arg) => SmtNode::Getter(c.clone(), *i, f(arg)),
        }
    }

    pub fn children(&self) -> Vec<&T> {
        match self {
            SmtNode::Var { name, .. } => vec![name],
            SmtNode::ConstK(_) => vec![],
            SmtNode::Ctor(_, args) | SmtNode::Op(_, args) | SmtNode::Uf(_, args) => {
                args.iter().collect()
            }
            SmtNode::Let { var, bound, body } => vec![var, bound, body],
            SmtNode::Quant { binders, patterns, body, .. } => {
                binders.iter().chain(patterns.iter()).chain(std::iter::once(body)).collect()
            }
            SmtNode::Tester(_, arg) | SmtNode::Getter(_, _, arg) => vec![arg],
        }
    }

    /// True when the two nodes agree on everything except their children:
    /// same variant, same indices (constructor names, op kinds, variable
    /// type annotations, quantifier kinds, getter positions) and the same
    /// child count.
    pub fn same_head<U>(&self, other: &SmtNode<U>) -> bool {
        match (self, other) {
            (SmtNode::Var { ty: t1, .. }, SmtNode::Var { ty: t2, .. }) => t1 == t2,
            (SmtNode::ConstK(a), SmtNode::ConstK(b)) => a == b,
            (SmtNode::Ctor(c1, a1), SmtNode::Ctor(c2, a2)) => c1 == c2 && a1.len() == a2.len(),
            (SmtNode::Op(o1, a1), SmtNode::Op(o2, a2)) => o1 == o2 && a1.len() == a2.len(),
            (SmtNode::Let { .. }, SmtNode::Let { .. }) => true,
            (
                SmtNode::Quant { kind: k1, binders: b1, patterns: p1, .. },
                SmtNode::Quant { kind: k2, binders: b2, patterns: p2, .. },
            ) => k1 == k2 && b1.len() == b2.len() && p1.len() == p2.len(),
            (SmtNode::Uf(u1, a1), SmtNode::Uf(u2, a2)) => u1 == u2 && a1.len() == a2.len(),
            (SmtNode::Tester(c1, _), SmtNode::Tester(c2, _)) => c1 == c2,
            (SmtNode::Getter(c1, i1, _), SmtNode::Getter(c2, i2, _)) => c1 == c2 && i1 == i2,
            _ => false,
        }
    }
}

/// Argument of a predicate-as-function call `p(w...)`.
#[derive(Clone, PartialEq, Debug)]
pub enum RelArg {
    Expr(Expr),
    /// `_`: matches any column value, projected away.
    Hole(Span),
    /// `??`: wildcard column projected into the result list.
    Project(Span),
}

#[derive(Clone, PartialEq, Debug)]
pub enum Pattern {
    Var(Name, Span),
    Wild(Span),
    Const(Constant, Span),
    Ctor(Name, Vec<Pattern>, Span),
}

impl Pattern {
    pub fn span(&self) -> Span {
        match self {
            Pattern::Var(_, s) | Pattern::Wild(s) | Pattern::Const(_, s) | Pattern::Ctor(_, _, s) => *s,
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct MatchArm {
    pub pat: Pattern,
    pub body: Expr,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Expr {
    Var(Name, Span),
    Const(Constant, Span),
    Ctor(Name, Vec<Expr>, Span),
    Fun(Name, Vec<Expr>, Span),
    Op(Op, Vec<Expr>, Span),
    RelCall(Name, Vec<RelArg>, Span),
    Let(Name, Box<Expr>, Box<Expr>, Span),
    If(Box<Expr>, Box<Expr>, Box<Expr>, Span),
    Match(Box<Expr>, Vec<MatchArm>, Span),
    Quote(Formula, Span),
    /// `#{name}[ty]`: builds an SMT variable; legal inside and outside quotes.
    SmtVar { name: Box<Expr>, ty: PreType, span: Span },
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Var(_, s)
            | Expr::Const(_, s)
            | Expr::Ctor(_, _, s)
            | Expr::Fun(_, _, s)
            | Expr::Op(_, _, s)
            | Expr::RelCall(_, _, s)
            | Expr::Let(_, _, _, s)
            | Expr::If(_, _, _, s)
            | Expr::Match(_, _, s)
            | Expr::Quote(_, s)
            | Expr::SmtVar { span: s, .. } => *s,
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Formula {
    Unquote(Box<Expr>),
    Node(Box<SmtNode<Formula>>, Span),
}

impl Formula {
    pub fn span(&self) -> Span {
        match self {
            Formula::Unquote(e) => e.span(),
            Formula::Node(_, s) => *s,
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Atom {
    pub pred: Name,
    pub args: Vec<Name>,
    pub span: Span,
}

/// Premises in the normal form: predicates applied to variables only,
/// equalities binding (or checking) a single variable against an expression.
#[derive(Clone, PartialEq, Debug)]
pub enum Premise {
    Pos(Atom),
    Neg(Atom),
    Eq { var: Name, rhs: Expr, span: Span },
    NegEq { var: Name, rhs: Expr, span: Span },
}

impl Premise {
    pub fn span(&self) -> Span {
        match self {
            Premise::Pos(a) | Premise::Neg(a) => a.span,
            Premise::Eq { span, .. } | Premise::NegEq { span, .. } => *span,
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Premise>,
    pub span: Span,
}

#[derive(Clone, PartialEq, Debug)]
pub struct FunDef {
    pub name: Name,
    pub type_params: Vec<Name>,
    pub params: Vec<(Name, Type)>,
    pub ret: Type,
    pub body: Expr,
    pub span: Span,
}

/// A whole desugared program, ready for type checking.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub decls: DataTypeDecls,
    pub sigs: ProgramDecls,
    pub functions: BTreeMap<Name, FunDef>,
    pub clauses: Vec<Clause>,
}
