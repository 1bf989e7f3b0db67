//! Ground values, unifiable terms, and substitutions.
//!
//! Values admit a total canonical ordering used everywhere determinism
//! matters: world deduplication, dump files, wildcard-query results. The
//! order is: constants before constructors before formula nodes before
//! models; constructors compare by arity, then name, then argument-wise.

use crate::term::{Constant, SmtNode};
use crate::types::PreType;
use crate::Name;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Value {
    Const(Constant),
    Ctor(Name, Arc<[Value]>),
    Smt(Arc<SmtValue>),
    Model(Arc<SmtModel>),
}

/// A c^SMT value: formula nodes whose children are themselves values.
pub type SmtValue = SmtNode<Value>;

/// Solver-produced assignment: SMT variable (name value, pre-type) to the
/// concrete value it was given. Variables whose assignment is not
/// representable are simply absent.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SmtModel {
    pub bindings: BTreeMap<(Value, PreType), Value>,
}

impl Value {
    pub fn bool(b: bool) -> Value {
        Value::Const(Constant::Bool(b))
    }

    pub fn bv32(n: i32) -> Value {
        Value::Const(Constant::Bv32(n))
    }

    pub fn ctor(name: &str, args: Vec<Value>) -> Value {
        Value::Ctor(crate::name(name), args.into())
    }

    pub fn smt(node: SmtValue) -> Value {
        Value::Smt(Arc::new(node))
    }

    pub fn smt_var(name: Value, ty: PreType) -> Value {
        Value::smt(SmtNode::Var { name, ty })
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Const(Constant::Bool(b)) => Some(*b),
            _ => None,
        }
    }

    /// True when `self` occurs in `v` (reflexively) — used by the freshness
    /// property of SMT variables.
    pub fn occurs_in(&self, v: &Value) -> bool {
        if self == v {
            return true;
        }
        match v {
            Value::Const(_) => false,
            Value::Ctor(_, args) => args.iter().any(|a| self.occurs_in(a)),
            Value::Smt(node) => node.children().into_iter().any(|c| self.occurs_in(c)),
            Value::Model(m) => m
                .bindings
                .iter()
                .any(|((n, _), val)| self.occurs_in(n) || self.occurs_in(val)),
        }
    }
}

/// Total canonical order on values.
pub fn canonical_compare(a: &Value, b: &Value) -> Ordering {
    fn rank(v: &Value) -> u8 {
        match v {
            Value::Const(_) => 0,
            Value::Ctor(..) => 1,
            Value::Smt(_) => 2,
            Value::Model(_) => 3,
        }
    }
    match (a, b) {
        (Value::Const(x), Value::Const(y)) => compare_constants(x, y),
        (Value::Ctor(c1, a1), Value::Ctor(c2, a2)) => a1
            .len()
            .cmp(&a2.len())
            .then_with(|| c1.cmp(c2))
            .then_with(|| compare_slices(a1, a2)),
        (Value::Smt(x), Value::Smt(y)) => compare_smt(x, y),
        (Value::Model(x), Value::Model(y)) => {
            let xs: Vec<_> = x.bindings.iter().collect();
            let ys: Vec<_> = y.bindings.iter().collect();
            xs.len().cmp(&ys.len()).then_with(|| {
                for ((kx, vx), (ky, vy)) in xs.iter().zip(ys.iter()) {
                    let o = canonical_compare(&kx.0, &ky.0)
                        .then_with(|| kx.1.cmp(&ky.1))
                        .then_with(|| canonical_compare(vx, vy));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            })
        }
        _ => rank(a).cmp(&rank(b)),
    }
}

fn compare_constants(a: &Constant, b: &Constant) -> Ordering {
    fn rank(k: &Constant) -> u8 {
        match k {
            Constant::Bool(_) => 0,
            Constant::Bv32(_) => 1,
            Constant::Bv64(_) => 2,
            Constant::Str(_) => 3,
        }
    }
    match (a, b) {
        (Constant::Bool(x), Constant::Bool(y)) => x.cmp(y),
        (Constant::Bv32(x), Constant::Bv32(y)) => x.cmp(y),
        (Constant::Bv64(x), Constant::Bv64(y)) => x.cmp(y),
        (Constant::Str(x), Constant::Str(y)) => x.cmp(y),
        _ => rank(a).cmp(&rank(b)),
    }
}

fn compare_slices(a: &[Value], b: &[Value]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = canonical_compare(x, y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

fn compare_smt(a: &SmtValue, b: &SmtValue) -> Ordering {
    fn rank(n: &SmtValue) -> u8 {
        match n {
            SmtNode::Var { .. } => 0,
            SmtNode::ConstK(_) => 1,
            SmtNode::Ctor(..) => 2,
            SmtNode::Op(..) => 3,
            SmtNode::Let { .. } => 4,
            SmtNode::Quant { .. } => 5,
            SmtNode::Uf(..) => 6,
            SmtNode::Tester(..) => 7,
            SmtNode::Getter(..) => 8,
        }
    }
    let head = match (a, b) {
        (SmtNode::Var { ty: t1, .. }, SmtNode::Var { ty: t2, .. }) => t1.cmp(t2),
        (SmtNode::ConstK(k1), SmtNode::ConstK(k2)) => compare_constants(k1, k2),
        (SmtNode::Ctor(c1, a1), SmtNode::Ctor(c2, a2)) => {
            a1.len().cmp(&a2.len()).then_with(|| c1.cmp(c2))
        }
        (SmtNode::Op(o1, _), SmtNode::Op(o2, _)) => o1.cmp(o2),
        (SmtNode::Let { .. }, SmtNode::Let { .. }) => Ordering::Equal,
        (
            SmtNode::Quant { kind: k1, binders: b1, patterns: p1, .. },
            SmtNode::Quant { kind: k2, binders: b2, patterns: p2, .. },
        ) => k1
            .cmp(k2)
            .then_with(|| b1.len().cmp(&b2.len()))
            .then_with(|| p1.len().cmp(&p2.len())),
        (SmtNode::Uf(u1, a1), SmtNode::Uf(u2, a2)) => {
            a1.len().cmp(&a2.len()).then_with(|| u1.cmp(u2))
        }
        (SmtNode::Tester(c1, _), SmtNode::Tester(c2, _)) => c1.cmp(c2),
        (SmtNode::Getter(c1, i1, _), SmtNode::Getter(c2, i2, _)) => {
            c1.cmp(c2).then_with(|| i1.cmp(i2))
        }
        _ => return rank(a).cmp(&rank(b)),
    };
    head.then_with(|| {
        let ca = a.children();
        let cb = b.children();
        for (x, y) in ca.iter().zip(cb.iter()) {
            let o = canonical_compare(x, y);
            if o != Ordering::Equal {
                return o;
            }
        }
        ca.len().cmp(&cb.len())
    })
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_compare(self, other)
    }
}

/// Unifiable terms: values extended with rule variables. The `Smt` form is a
/// formula pattern — its leaves may bind variables during unification.
#[derive(Clone, PartialEq, Debug)]
pub enum UTerm {
    Var(Name),
    Val(Value),
    Ctor(Name, Vec<UTerm>),
    Smt(Box<SmtNode<UTerm>>),
}

/// Partial map from rule variables to values. Bindings are extend-only
/// within one clause evaluation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Subst {
    map: HashMap<Name, Value>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn get(&self, x: &str) -> Option<&Value> {
        self.map.get(x)
    }

    pub fn is_bound(&self, x: &str) -> bool {
        self.map.contains_key(x)
    }

    /// Extends the substitution. Rebinding an already-bound variable is a
    /// caller bug; bindings never change within one clause evaluation.
    pub fn bind(&mut self, x: Name, v: Value) {
        debug_assert!(!self.map.contains_key(&x), "rebinding {x}");
        self.map.insert(x, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Value)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl FromIterator<(Name, Value)> for Subst {
    fn from_iter<T: IntoIterator<Item = (Name, Value)>>(iter: T) -> Subst {
        Subst { map: iter.into_iter().collect() }
    }
}

/// theta(u): replaces every bound variable with its value; unbound
/// variables remain. Follows theta(c(u-bar)) = c(theta(u-bar)).
pub fn apply_substitution(theta: &Subst, u: &UTerm) -> UTerm {
    match u {
        UTerm::Var(x) => match theta.get(x) {
            Some(v) => UTerm::Val(v.clone()),
            None => u.clone(),
        },
        UTerm::Val(_) => u.clone(),
        UTerm::Ctor(c, args) => {
            UTerm::Ctor(c.clone(), args.iter().map(|a| apply_substitution(theta, a)).collect())
        }
        UTerm::Smt(node) => UTerm::Smt(Box::new(node.map(|c| apply_substitution(theta, c)))),
    }
}

/// True iff the term contains no rule variables. SMT variables are values,
/// hence ground.
pub fn is_ground(u: &UTerm) -> bool {
    match u {
        UTerm::Var(_) => false,
        UTerm::Val(_) => true,
        UTerm::Ctor(_, args) => args.iter().all(is_ground),
        UTerm::Smt(node) => node.children().into_iter().all(is_ground),
    }
}

/// The value of a ground term.
pub fn to_value(u: &UTerm) -> Option<Value> {
    match u {
        UTerm::Var(_) => None,
        UTerm::Val(v) => Some(v.clone()),
        UTerm::Ctor(c, args) => {
            let vals: Option<Vec<Value>> = args.iter().map(to_value).collect();
            Some(Value::Ctor(c.clone(), vals?.into()))
        }
        UTerm::Smt(node) => {
            let mut ok = true;
            let mapped = node.map(|c| match to_value(c) {
                Some(v) => v,
                None => {
                    ok = false;
                    Value::bool(false)
                }
            });
            if ok {
                Some(Value::smt(mapped))
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Base;

    fn x() -> Name {
        crate::name("X")
    }

    #[test]
    fn substitution_on_ctor_tree() {
        let theta: Subst = [(x(), Value::bv32(5))].into_iter().collect();
        let u = UTerm::Ctor(
            crate::name("cons"),
            vec![UTerm::Var(x()), UTerm::Val(Value::ctor("nil", vec![]))],
        );
        let got = apply_substitution(&theta, &u);
        assert_eq!(to_value(&got).unwrap(), Value::ctor("cons", vec![Value::bv32(5), Value::ctor("nil", vec![])]));
    }

    #[test]
    fn empty_substitution_is_identity() {
        let theta = Subst::new();
        let u = UTerm::Var(x());
        assert_eq!(apply_substitution(&theta, &u), u);
    }

    #[test]
    fn substitution_shared_variable() {
        let theta: Subst = [
            (x(), Value::bool(true)),
            (crate::name("Y"), Value::bool(false)),
        ]
        .into_iter()
        .collect();
        let u = UTerm::Ctor(
            crate::name("pair"),
            vec![
                UTerm::Var(x()),
                UTerm::Ctor(crate::name("pair"), vec![UTerm::Var(crate::name("Y")), UTerm::Var(x())]),
            ],
        );
        let got = to_value(&apply_substitution(&theta, &u)).unwrap();
        let expect = Value::ctor(
            "pair",
            vec![
                Value::bool(true),
                Value::ctor("pair", vec![Value::bool(false), Value::bool(true)]),
            ],
        );
        assert_eq!(got, expect);
    }

    #[test]
    fn groundness() {
        assert!(is_ground(&UTerm::Val(Value::bv32(5))));
        assert!(!is_ground(&UTerm::Ctor(crate::name("cons"), vec![UTerm::Var(x()), UTerm::Val(Value::ctor("nil", vec![]))])));
        // Formula variables are ground terms.
        let fv = UTerm::Val(Value::smt_var(
            Value::Const(Constant::Str(crate::name("x"))),
            PreType::Base(Base::Bool),
        ));
        assert!(is_ground(&fv));
    }

    #[test]
    fn canonical_order_examples() {
        assert_eq!(canonical_compare(&Value::bv32(1), &Value::bv32(2)), Ordering::Less);
        let c = Value::ctor("cons", vec![Value::bv32(1), Value::ctor("nil", vec![])]);
        assert_eq!(canonical_compare(&c, &c), Ordering::Equal);
        // nil (arity 0) sorts before cons(0, nil) (arity 2): arity, then name.
        let nil = Value::ctor("nil", vec![]);
        let cons = Value::ctor("cons", vec![Value::bv32(0), Value::ctor("nil", vec![])]);
        assert_eq!(canonical_compare(&nil, &cons), Ordering::Less);
    }

    #[test]
    fn substitution_idempotent_on_ground_output() {
        let theta: Subst = [(x(), Value::bv32(7))].into_iter().collect();
        let u = UTerm::Ctor(crate::name("some"), vec![UTerm::Var(x())]);
        let once = apply_substitution(&theta, &u);
        let twice = apply_substitution(&theta, &once);
        assert_eq!(once, twice);
    }
}
