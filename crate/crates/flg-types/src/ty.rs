//! Inference-time types. Mirrors [`flg_core::types::Type`] plus unification
//! metavariables, with a one-directional coercion `sym t <= smt t` that acts
//! covariantly through data type arguments (but never under an smt/sym
//! wrapper, where inner types must agree exactly).

use flg_core::types::{Base, PreType, Type};
use flg_core::{name, Name};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) enum Ty {
    Base(Base),
    Adt(Name, Vec<Ty>),
    /// A declared type variable, rigid within its function's body.
    Rigid(Name),
    Smt(Box<Ty>),
    Sym(Box<Ty>),
    Model,
    Meta(u32),
}

impl Ty {
    pub fn bool() -> Ty {
        Ty::Base(Base::Bool)
    }

    pub fn bv(w: u32) -> Ty {
        Ty::Base(Base::Bv(w))
    }

    pub fn list(elem: Ty) -> Ty {
        Ty::Adt(name("list"), vec![elem])
    }

    pub fn option(elem: Ty) -> Ty {
        Ty::Adt(name("option"), vec![elem])
    }

    pub fn from_type(t: &Type) -> Ty {
        match t {
            Type::Base(b) => Ty::Base(*b),
            Type::Adt(d, args) => Ty::Adt(d.clone(), args.iter().map(Ty::from_type).collect()),
            Type::Var(a) => Ty::Rigid(a.clone()),
            Type::Smt(p) => Ty::Smt(Box::new(Ty::from_type(&p.clone().into_type()))),
            Type::Sym(p) => Ty::Sym(Box::new(Ty::from_type(&p.clone().into_type()))),
            Type::Model => Ty::Model,
        }
    }

    pub fn from_pre(p: &PreType) -> Ty {
        Ty::from_type(&p.clone().into_type())
    }

    /// Instantiates a declared type, replacing the mapped type variables.
    pub fn instantiate(t: &Type, map: &BTreeMap<Name, Ty>) -> Ty {
        match t {
            Type::Var(a) => map.get(a).cloned().unwrap_or_else(|| Ty::Rigid(a.clone())),
            Type::Base(b) => Ty::Base(*b),
            Type::Adt(d, args) => {
                Ty::Adt(d.clone(), args.iter().map(|a| Ty::instantiate(a, map)).collect())
            }
            Type::Smt(p) => Ty::Smt(Box::new(Ty::instantiate(&p.clone().into_type(), map))),
            Type::Sym(p) => Ty::Sym(Box::new(Ty::instantiate(&p.clone().into_type(), map))),
            Type::Model => Ty::Model,
        }
    }
}

/// What an unsolved metavariable is allowed to become.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum MetaKind {
    Any,
    /// Must resolve to bv[32] or bv[64] (overloaded operator widths).
    Bv,
}

/// A failed unification, carrying rendered types for the caller's message.
#[derive(Debug)]
pub(crate) struct Mismatch {
    pub actual: String,
    pub expected: String,
}

pub(crate) struct InferCtx {
    metas: Vec<(MetaKind, Option<Ty>)>,
}

impl InferCtx {
    pub fn new() -> InferCtx {
        InferCtx { metas: Vec::new() }
    }

    pub fn fresh(&mut self, kind: MetaKind) -> Ty {
        self.metas.push((kind, None));
        Ty::Meta(self.metas.len() as u32 - 1)
    }

    /// Follows meta solutions one level.
    pub fn resolve(&self, t: &Ty) -> Ty {
        let mut cur = t.clone();
        while let Ty::Meta(i) = cur {
            match &self.metas[i as usize].1 {
                Some(t2) => cur = t2.clone(),
                None => break,
            }
        }
        cur
    }

    /// Follows meta solutions everywhere.
    pub fn zonk(&self, t: &Ty) -> Ty {
        match self.resolve(t) {
            Ty::Adt(d, args) => Ty::Adt(d, args.iter().map(|a| self.zonk(a)).collect()),
            Ty::Smt(u) => Ty::Smt(Box::new(self.zonk(&u))),
            Ty::Sym(u) => Ty::Sym(Box::new(self.zonk(&u))),
            other => other,
        }
    }

    fn occurs(&self, id: u32, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Meta(j) => j == id,
            Ty::Adt(_, args) => args.iter().any(|a| self.occurs(id, a)),
            Ty::Smt(u) | Ty::Sym(u) => self.occurs(id, &u),
            _ => false,
        }
    }

    fn bind(&mut self, id: u32, t: &Ty) -> Result<(), Mismatch> {
        let t = self.resolve(t);
        if let Ty::Meta(j) = t {
            if j == id {
                return Ok(());
            }
            // Merging two unsolved metas: the stricter kind wins.
            if self.metas[id as usize].0 == MetaKind::Bv {
                self.metas[j as usize].0 = MetaKind::Bv;
            }
            self.metas[id as usize].1 = Some(Ty::Meta(j));
            return Ok(());
        }
        if self.occurs(id, &t) {
            return Err(self.mismatch(&Ty::Meta(id), &t));
        }
        if self.metas[id as usize].0 == MetaKind::Bv && !matches!(t, Ty::Base(Base::Bv(_))) {
            return Err(Mismatch { actual: self.display(&t), expected: "bv[32] or bv[64]".into() });
        }
        self.metas[id as usize].1 = Some(t);
        Ok(())
    }

    fn mismatch(&self, actual: &Ty, expected: &Ty) -> Mismatch {
        Mismatch { actual: self.display(actual), expected: self.display(expected) }
    }

    /// Exact unification: no coercions, metas bind.
    pub fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), Mismatch> {
        let (ra, rb) = (self.resolve(a), self.resolve(b));
        match (&ra, &rb) {
            (Ty::Meta(i), _) => self.bind(*i, &rb),
            (_, Ty::Meta(j)) => self.bind(*j, &ra),
            (Ty::Base(x), Ty::Base(y)) if x == y => Ok(()),
            (Ty::Rigid(x), Ty::Rigid(y)) if x == y => Ok(()),
            (Ty::Model, Ty::Model) => Ok(()),
            (Ty::Adt(d1, a1), Ty::Adt(d2, a2)) if d1 == d2 && a1.len() == a2.len() => {
                for (x, y) in a1.iter().zip(a2) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
            (Ty::Smt(x), Ty::Smt(y)) | (Ty::Sym(x), Ty::Sym(y)) => self.unify(x, y),
            _ => Err(self.mismatch(&ra, &rb)),
        }
    }

    /// Subsumption-aware unification: `actual` may be used where `expected`
    /// is required. The only coercion is sym t => smt t, applied at the top
    /// or under covariant data type arguments.
    pub fn unify_sub(&mut self, actual: &Ty, expected: &Ty) -> Result<(), Mismatch> {
        let (ra, re) = (self.resolve(actual), self.resolve(expected));
        match (&ra, &re) {
            (Ty::Sym(x), Ty::Smt(y)) => self.unify(x, y),
            (Ty::Adt(d1, a1), Ty::Adt(d2, a2)) if d1 == d2 && a1.len() == a2.len() => {
                for (x, y) in a1.iter().zip(a2) {
                    self.unify_sub(x, y)?;
                }
                Ok(())
            }
            _ => self.unify(&ra, &re),
        }
    }

    /// Least upper bound of two types under the sym/smt order; used to join
    /// if/match branches.
    pub fn join(&mut self, a: &Ty, b: &Ty) -> Result<Ty, Mismatch> {
        let (ra, rb) = (self.resolve(a), self.resolve(b));
        match (&ra, &rb) {
            (Ty::Meta(_), _) | (_, Ty::Meta(_)) => {
                self.unify(&ra, &rb)?;
                Ok(self.resolve(&ra))
            }
            (Ty::Sym(x), Ty::Smt(y)) | (Ty::Smt(x), Ty::Sym(y)) | (Ty::Smt(x), Ty::Smt(y)) => {
                self.unify(x, y)?;
                Ok(Ty::Smt(x.clone()))
            }
            (Ty::Adt(d1, a1), Ty::Adt(d2, a2)) if d1 == d2 && a1.len() == a2.len() => {
                let args = a1
                    .iter()
                    .zip(a2)
                    .map(|(x, y)| self.join(x, y))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Ty::Adt(d1.clone(), args))
            }
            _ => {
                self.unify(&ra, &rb)?;
                Ok(self.resolve(&ra))
            }
        }
    }

    /// Converts back to the public type language. Metas still unsolved after
    /// checking denote "any type"; they surface as anonymous variables.
    pub fn to_type(&self, t: &Ty) -> Type {
        match self.resolve(t) {
            Ty::Base(b) => Type::Base(b),
            Ty::Rigid(a) => Type::Var(a),
            Ty::Model => Type::Model,
            Ty::Adt(d, args) => Type::Adt(d, args.iter().map(|a| self.to_type(a)).collect()),
            Ty::Smt(u) => match self.to_type(&u).as_pre() {
                Some(p) => Type::Smt(p),
                None => Type::Smt(PreType::Var(name("'_"))),
            },
            Ty::Sym(u) => match self.to_type(&u).as_pre() {
                Some(p) => Type::Sym(p),
                None => Type::Sym(PreType::Var(name("'_"))),
            },
            Ty::Meta(i) => Type::Var(name(&format!("'_{i}"))),
        }
    }

    /// Renders a type in source syntax (postfix constructors, `_` for holes).
    pub fn display(&self, t: &Ty) -> String {
        struct D<'a>(&'a InferCtx, Ty);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_ty(&self.1, f)
            }
        }
        D(self, t.clone()).to_string()
    }

    fn fmt_ty(&self, t: &Ty, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.resolve(t) {
            Ty::Base(Base::Bool) => write!(f, "bool"),
            Ty::Base(Base::Str) => write!(f, "string"),
            Ty::Base(Base::Bv(w)) => write!(f, "bv[{w}]"),
            Ty::Rigid(a) => write!(f, "{a}"),
            Ty::Model => write!(f, "model"),
            Ty::Meta(i) => {
                if self.metas[i as usize].0 == MetaKind::Bv {
                    write!(f, "bv[_]")
                } else {
                    write!(f, "_")
                }
            }
            Ty::Adt(d, args) => {
                if args.len() >= 2 && flg_core::types::is_tuple_ctor(&d) == Some(args.len()) {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        self.fmt_ty(a, f)?;
                    }
                    return write!(f, ")");
                }
                match args.len() {
                    0 => write!(f, "{d}"),
                    1 => {
                        self.fmt_arg(&args[0], f)?;
                        write!(f, " {d}")
                    }
                    _ => {
                        write!(f, "(")?;
                        for (i, a) in args.iter().enumerate() {
                            if i > 0 {
                                write!(f, ", ")?;
                            }
                            self.fmt_ty(a, f)?;
                        }
                        write!(f, ") {d}")
                    }
                }
            }
            Ty::Smt(u) => {
                self.fmt_arg(&u, f)?;
                write!(f, " smt")
            }
            Ty::Sym(u) => {
                self.fmt_arg(&u, f)?;
                write!(f, " sym")
            }
        }
    }

    /// Argument position: parenthesize the forms that would misparse.
    fn fmt_arg(&self, t: &Ty, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let needs_parens = match self.resolve(t) {
            Ty::Smt(_) | Ty::Sym(_) => true,
            // Tuples already print parenthesized.
            Ty::Adt(ref d, ref a) => {
                !a.is_empty() && flg_core::types::is_tuple_ctor(d) != Some(a.len())
            }
            _ => false,
        };
        if needs_parens {
            write!(f, "(")?;
            self.fmt_ty(t, f)?;
            write!(f, ")")
        } else {
            self.fmt_ty(t, f)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_promotes_into_smt_covariantly() {
        let mut cx = InferCtx::new();
        let sym = Ty::Sym(Box::new(Ty::bv(32)));
        let smt = Ty::Smt(Box::new(Ty::bv(32)));
        assert!(cx.unify_sub(&sym, &smt).is_ok());
        assert!(cx.unify_sub(&smt, &sym).is_err());

        let a = Ty::Adt(name("tuple2"), vec![sym, Ty::Model]);
        let e = Ty::Adt(name("tuple2"), vec![smt, Ty::Model]);
        assert!(cx.unify_sub(&a, &e).is_ok());
    }

    #[test]
    fn no_promotion_under_wrappers() {
        let mut cx = InferCtx::new();
        let inner_sym = Ty::Smt(Box::new(Ty::list(Ty::Sym(Box::new(Ty::bool())))));
        let inner_smt = Ty::Smt(Box::new(Ty::list(Ty::Smt(Box::new(Ty::bool())))));
        assert!(cx.unify_sub(&inner_sym, &inner_smt).is_err());
    }

    #[test]
    fn join_prefers_smt() {
        let mut cx = InferCtx::new();
        let sym = Ty::Sym(Box::new(Ty::bv(32)));
        let smt = Ty::Smt(Box::new(Ty::bv(32)));
        let j = cx.join(&Ty::list(sym), &Ty::list(smt.clone())).unwrap();
        assert_eq!(j, Ty::list(smt));
    }

    #[test]
    fn bv_metas_reject_non_bv() {
        let mut cx = InferCtx::new();
        let m = cx.fresh(MetaKind::Bv);
        assert!(cx.unify(&m, &Ty::bool()).is_err());
        assert!(cx.unify(&m, &Ty::bv(64)).is_ok());
        assert_eq!(cx.resolve(&m), Ty::bv(64));
    }

    #[test]
    fn bv_meta_merge_keeps_constraint() {
        let mut cx = InferCtx::new();
        let m = cx.fresh(MetaKind::Bv);
        let n = cx.fresh(MetaKind::Any);
        assert!(cx.unify(&m, &n).is_ok());
        assert!(cx.unify(&n, &Ty::bool()).is_err());
        assert!(cx.unify(&n, &Ty::bv(32)).is_ok());
    }

    #[test]
    fn occurs_check_fires() {
        let mut cx = InferCtx::new();
        let m = cx.fresh(MetaKind::Any);
        assert!(cx.unify(&m, &Ty::list(m.clone())).is_err());
    }

    #[test]
    fn display_uses_source_syntax() {
        let cx = InferCtx::new();
        assert_eq!(cx.display(&Ty::Smt(Box::new(Ty::bool()))), "bool smt");
        assert_eq!(cx.display(&Ty::list(Ty::bv(32))), "bv[32] list");
        assert_eq!(
            cx.display(&Ty::Adt(name("tuple2"), vec![Ty::bv(64), Ty::Base(Base::Str)])),
            "(bv[64], string)"
        );
        assert_eq!(cx.display(&Ty::list(Ty::Smt(Box::new(Ty::bool())))), "(bool smt) list");
    }
}
