//! The type language: base types, ADTs, type variables, and the three
//! formula-side forms `smt t`, `sym t`, and `model`. `smt`/`sym` wrap only
//! pre-types, so nestings like `smt (smt bool)` are unrepresentable.

use crate::Name;
use std::collections::BTreeMap;

pub const BV_WIDTHS: [u32; 2] = [32, 64];

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Base {
    Bool,
    Str,
    Bv(u32),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Type {
    Base(Base),
    Adt(Name, Vec<Type>),
    Var(Name),
    Smt(PreType),
    Sym(PreType),
    Model,
}

/// Pre-types t: the concrete (non-formula) fragment of the type language.
/// ADT arguments remain full types, e.g. `(smt bool) list` is a pre-type.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum PreType {
    Base(Base),
    Adt(Name, Vec<Type>),
    Var(Name),
}

impl PreType {
    pub fn into_type(self) -> Type {
        match self {
            PreType::Base(b) => Type::Base(b),
            PreType::Adt(d, args) => Type::Adt(d, args),
            PreType::Var(a) => Type::Var(a),
        }
    }
}

impl Type {
    /// The pre-type view, if this type is not smt/sym/model.
    pub fn as_pre(&self) -> Option<PreType> {
        match self {
            Type::Base(b) => Some(PreType::Base(*b)),
            Type::Adt(d, args) => Some(PreType::Adt(d.clone(), args.clone())),
            Type::Var(a) => Some(PreType::Var(a.clone())),
            _ => None,
        }
    }

    pub fn bool() -> Type {
        Type::Base(Base::Bool)
    }

    pub fn bv(width: u32) -> Type {
        Type::Base(Base::Bv(width))
    }
}

/// One data type (or uninterpreted sort) declaration.
#[derive(Clone, Debug, PartialEq)]
pub struct AdtDecl {
    pub params: Vec<Name>,
    pub ctors: Vec<CtorDecl>,
    /// Uninterpreted sorts carry no constructors and admit no concrete values.
    pub uninterpreted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CtorDecl {
    pub name: Name,
    pub args: Vec<Type>,
}

/// The declaration environment Delta: data types, uninterpreted sorts, and
/// the constructor-to-owner index (each constructor belongs to exactly one
/// data type).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DataTypeDecls {
    pub adts: BTreeMap<Name, AdtDecl>,
    pub ctor_owner: BTreeMap<Name, Name>,
}

impl DataTypeDecls {
    pub fn ctor(&self, c: &str) -> Option<(&Name, &AdtDecl, &CtorDecl)> {
        let owner = self.ctor_owner.get(c)?;
        let adt = self.adts.get(owner)?;
        let decl = adt.ctors.iter().find(|k| &*k.name == c)?;
        Some((owner, adt, decl))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RelKind {
    /// EDB: tabulated through facts, inline or from fact files.
    Input,
    /// IDB: derived by rules and dumped on success.
    Output,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelSig {
    pub cols: Vec<Type>,
    pub kind: RelKind,
}

/// Function signature: forall alpha-bar, tau-bar -> tau.
#[derive(Clone, Debug, PartialEq)]
pub struct FunSig {
    pub type_params: Vec<Name>,
    pub params: Vec<Type>,
    pub ret: Type,
}

/// Uninterpreted function signature over pre-types (rule requires smt mode).
#[derive(Clone, Debug, PartialEq)]
pub struct UfSig {
    pub args: Vec<PreType>,
    pub ret: PreType,
}

/// The signature environment Phi. Built-in operator signatures are not
/// listed here; they live with the operator table itself.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProgramDecls {
    pub functions: BTreeMap<Name, FunSig>,
    pub relations: BTreeMap<Name, RelSig>,
    pub ufs: BTreeMap<Name, UfSig>,
}

/// Names of the built-in tuple ADTs (`tuple2` .. `tuple8`); the constructor
/// shares the type's name.
pub fn tuple_adt(arity: usize) -> Option<&'static str> {
    match arity {
        2 => Some("tuple2"),
        3 => Some("tuple3"),
        4 => Some("tuple4"),
        5 => Some("tuple5"),
        6 => Some("tuple6"),
        7 => Some("tuple7"),
        8 => Some("tuple8"),
        _ => None,
    }
}

pub fn is_tuple_ctor(name: &str) -> Option<usize> {
    (2..=8).find(|&n| tuple_adt(n) == Some(name))
}

/// Built-in declarations available to every program: `'a option`,
/// `'a list`, and the tuple types.
pub fn prelude() -> DataTypeDecls {
    let mut d = DataTypeDecls::default();
    let a: Name = crate::name("'a");

    let option = AdtDecl {
        params: vec![a.clone()],
        ctors: vec![
            CtorDecl { name: crate::name("none"), args: vec![] },
            CtorDecl { name: crate::name("some"), args: vec![Type::Var(a.clone())] },
        ],
        uninterpreted: false,
    };
    add_adt(&mut d, "option", option);

    let list = AdtDecl {
        params: vec![a.clone()],
        ctors: vec![
            CtorDecl { name: crate::name("nil"), args: vec![] },
            CtorDecl {
                name: crate::name("cons"),
                args: vec![
                    Type::Var(a.clone()),
                    Type::Adt(crate::name("list"), vec![Type::Var(a.clone())]),
                ],
            },
        ],
        uninterpreted: false,
    };
    add_adt(&mut d, "list", list);

    for n in 2..=8usize {
        let params: Vec<Name> = (0..n).map(|i| crate::name(&format!("'t{i}"))).collect();
        let name = crate::name(tuple_adt(n).unwrap());
        let adt = AdtDecl {
            params: params.clone(),
            ctors: vec![CtorDecl {
                name: name.clone(),
                args: params.iter().map(|p| Type::Var(p.clone())).collect(),
            }],
            uninterpreted: false,
        };
        add_adt(&mut d, &name, adt);
    }
    d
}

fn add_adt(d: &mut DataTypeDecls, name: &str, adt: AdtDecl) {
    for c in &adt.ctors {
        d.ctor_owner.insert(c.name.clone(), crate::name(name));
    }
    d.adts.insert(crate::name(name), adt);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prelude_ctor_index() {
        let d = prelude();
        let (owner, _, decl) = d.ctor("cons").unwrap();
        assert_eq!(&**owner, "list");
        assert_eq!(decl.args.len(), 2);
        assert_eq!(&*d.ctor("tuple3").unwrap().0.clone(), "tuple3");
        assert!(d.ctor("missing").is_none());
    }

    #[test]
    fn pre_type_round_trip() {
        let t = Type::Adt(crate::name("list"), vec![Type::Smt(PreType::Base(Base::Bool))]);
        let p = t.as_pre().unwrap();
        assert_eq!(p.into_type(), t);
        assert!(Type::Model.as_pre().is_none());
        assert!(Type::Smt(PreType::Base(Base::Bool)).as_pre().is_none());
    }
}
