//! Rendering of values and types back into source syntax. Dump files are
//! re-ingestible, so a printed value must reparse to the same value; the
//! one exception is solver models, which have no source syntax.

use crate::term::{Constant, QuantKind, SmtNode, SmtOp};
use crate::types::{Base, PreType, Type};
use crate::value::{SmtValue, Value};
use std::fmt;

pub fn escape_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Bool(b) => write!(f, "{b}"),
            Constant::Bv32(n) => write!(f, "{n}"),
            Constant::Bv64(n) => write!(f, "{n}L"),
            Constant::Str(s) => write!(f, "\"{}\"", escape_str(s)),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Const(k) => write!(f, "{k}"),
            Value::Ctor(c, args) => {
                if crate::types::is_tuple_ctor(c).is_some() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    return write!(f, ")");
                }
                write!(f, "{c}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Value::Smt(node) => {
                if let SmtNode::Var { name, ty } = &**node {
                    write_smt_var(f, name, ty)
                } else {
                    write!(f, "`")?;
                    write_formula(f, node, 0)?;
                    write!(f, "`")
                }
            }
            Value::Model(m) => {
                // Debug-only form; models are not re-ingestible.
                write!(f, "model{{")?;
                for (i, ((name, ty), v)) in m.bindings.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write_smt_var(f, name, ty)?;
                    write!(f, "->{v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn write_smt_var(f: &mut fmt::Formatter<'_>, name: &Value, ty: &PreType) -> fmt::Result {
    if let Value::Const(Constant::Str(s)) = name {
        if is_plain_ident(s) {
            return write!(f, "#{s}[{}]", ty.clone().into_type());
        }
    }
    write!(f, "#{{{name}}}[{}]", ty.clone().into_type())
}

/// Precedence levels inside formulas, loose to tight:
/// 0 `==>` and `#if`, 1 `\/`, 2 `/\`, 3 `#=` (non-associative), 4 `~`.
/// The binary connectives associate to the right.
fn write_formula(f: &mut fmt::Formatter<'_>, node: &SmtValue, prec: u8) -> fmt::Result {
    match node {
        SmtNode::Var { name, ty } => write_smt_var(f, name, ty),
        SmtNode::ConstK(k) => write!(f, "{k}"),
        SmtNode::Ctor(c, args) => write_call(f, c, args),
        SmtNode::Op(op, args) => write_op(f, *op, args, prec),
        SmtNode::Let { var, bound, body } => {
            write!(f, "smt_let(")?;
            write_child(f, var, 0)?;
            write!(f, ", ")?;
            write_child(f, bound, 0)?;
            write!(f, ", ")?;
            write_child(f, body, 0)?;
            write!(f, ")")
        }
        SmtNode::Quant { kind, binders, patterns, body } => {
            let open = prec > 0;
            if open {
                write!(f, "(")?;
            }
            write!(f, "{}", if *kind == QuantKind::Forall { "forall " } else { "exists " })?;
            for (i, b) in binders.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_child(f, b, 5)?;
            }
            if !patterns.is_empty() {
                write!(f, " : ")?;
                for (i, p) in patterns.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_child(f, p, 4)?;
                }
            }
            write!(f, ". ")?;
            write_child(f, body, 0)?;
            if open {
                write!(f, ")")?;
            }
            Ok(())
        }
        SmtNode::Uf(u, args) => write_call(f, u, args),
        SmtNode::Tester(c, arg) => {
            write!(f, "#is_{c}(")?;
            write_child(f, arg, 0)?;
            write!(f, ")")
        }
        SmtNode::Getter(c, i, arg) => {
            write!(f, "#{c}_{i}(")?;
            write_child(f, arg, 0)?;
            write!(f, ")")
        }
    }
}

fn write_call(f: &mut fmt::Formatter<'_>, name: &str, args: &[Value]) -> fmt::Result {
    write!(f, "{name}")?;
    if !args.is_empty() {
        write!(f, "(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write_child(f, a, 0)?;
        }
        write!(f, ")")?;
    }
    Ok(())
}

/// A formula child is normally another c^SMT value; constants and user
/// constructors can appear as variable names or defensive fallbacks.
fn write_child(f: &mut fmt::Formatter<'_>, v: &Value, prec: u8) -> fmt::Result {
    match v {
        Value::Smt(node) => write_formula(f, node, prec),
        other => write!(f, "{other}"),
    }
}

fn write_op(f: &mut fmt::Formatter<'_>, op: SmtOp, args: &[Value], prec: u8) -> fmt::Result {
    match op {
        SmtOp::Not => {
            write!(f, "~")?;
            write_child(f, &args[0], 4)
        }
        SmtOp::AndOp | SmtOp::OrOp | SmtOp::Imp | SmtOp::SmtEq => {
            let (level, sym) = match op {
                SmtOp::Imp => (0, "==>"),
                SmtOp::OrOp => (1, "\\/"),
                SmtOp::AndOp => (2, "/\\"),
                _ => (3, "#="),
            };
            let open = prec > level;
            if open {
                write!(f, "(")?;
            }
            write_child(f, &args[0], level + 1)?;
            write!(f, " {sym} ")?;
            // Right child binds the same level: connectives print right-associated.
            write_child(f, &args[1], if op == SmtOp::SmtEq { level + 1 } else { level })?;
            if open {
                write!(f, ")")?;
            }
            Ok(())
        }
        SmtOp::Ite => {
            let open = prec > 0;
            if open {
                write!(f, "(")?;
            }
            write!(f, "#if ")?;
            write_child(f, &args[0], 1)?;
            write!(f, " then ")?;
            write_child(f, &args[1], 1)?;
            write!(f, " else ")?;
            write_child(f, &args[2], 0)?;
            if open {
                write!(f, ")")?;
            }
            Ok(())
        }
        SmtOp::BvConst(k) => {
            write!(f, "bv_const[{k}](")?;
            write_child(f, &args[0], 0)?;
            write!(f, ")")
        }
        named => write_call(f, named.name(), args),
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_type(f, self, 0)
    }
}

impl fmt::Display for PreType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_type(f, &self.clone().into_type(), 0)
    }
}

/// prec 0: anywhere; prec 1: operand of `*`; prec 2: argument of a postfix
/// type application.
fn write_type(f: &mut fmt::Formatter<'_>, t: &Type, prec: u8) -> fmt::Result {
    match t {
        Type::Base(Base::Bool) => write!(f, "bool"),
        Type::Base(Base::Str) => write!(f, "string"),
        Type::Base(Base::Bv(k)) => write!(f, "bv[{k}]"),
        Type::Var(a) => write!(f, "{a}"),
        Type::Model => write!(f, "model"),
        Type::Smt(p) => {
            write_type(f, &p.clone().into_type(), 2)?;
            write!(f, " smt")
        }
        Type::Sym(p) => {
            write_type(f, &p.clone().into_type(), 2)?;
            write!(f, " sym")
        }
        Type::Adt(d, args) => {
            if crate::types::is_tuple_ctor(d).is_some() {
                let open = prec >= 1;
                if open {
                    write!(f, "(")?;
                }
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    write_type(f, a, 1)?;
                }
                if open {
                    write!(f, ")")?;
                }
                Ok(())
            } else if args.is_empty() {
                write!(f, "{d}")
            } else if args.len() == 1 {
                write_type(f, &args[0], 2)?;
                write!(f, " {d}")
            } else {
                write!(f, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_type(f, a, 0)?;
                }
                write!(f, ") {d}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::SmtNode;
    use crate::value::Value;

    fn bvar(n: &str) -> Value {
        Value::smt_var(Value::Const(Constant::Str(crate::name(n))), PreType::Base(Base::Bool))
    }

    #[test]
    fn constants() {
        assert_eq!(Value::bv32(-5).to_string(), "-5");
        assert_eq!(Value::Const(Constant::Bv64(7)).to_string(), "7L");
        assert_eq!(Value::Const(Constant::Str(crate::name("a\tb"))).to_string(), "\"a\\tb\"");
        assert_eq!(Value::bool(true).to_string(), "true");
    }

    #[test]
    fn ctor_terms_print_without_spaces() {
        let v = Value::ctor("cons", vec![Value::bv32(1), Value::ctor("nil", vec![])]);
        assert_eq!(v.to_string(), "cons(1,nil)");
    }

    #[test]
    fn tuples_print_parenthesized() {
        let v = Value::ctor("tuple2", vec![Value::bv32(1), Value::bool(false)]);
        assert_eq!(v.to_string(), "(1,false)");
    }

    #[test]
    fn smt_var_shorthand() {
        assert_eq!(bvar("x").to_string(), "#x[bool]");
        let odd = Value::smt_var(Value::bv32(3), PreType::Base(Base::Bv(32)));
        assert_eq!(odd.to_string(), "#{3}[bv[32]]");
    }

    #[test]
    fn formula_precedence() {
        // imp(and(x, not y), or(x, y))
        let x = bvar("x");
        let y = bvar("y");
        let not_y = Value::smt(SmtNode::Op(SmtOp::Not, vec![y.clone()]));
        let conj = Value::smt(SmtNode::Op(SmtOp::AndOp, vec![x.clone(), not_y]));
        let disj = Value::smt(SmtNode::Op(SmtOp::OrOp, vec![x.clone(), y.clone()]));
        let imp = Value::smt(SmtNode::Op(SmtOp::Imp, vec![conj, disj]));
        assert_eq!(imp.to_string(), "`#x[bool] /\\ ~#y[bool] ==> #x[bool] \\/ #y[bool]`");
        // Nested implication on the left needs parens; on the right it does not.
        let nested = Value::smt(SmtNode::Op(SmtOp::Imp, vec![imp.clone(), x.clone()]));
        assert!(nested.to_string().starts_with("`(#x[bool]"));
    }

    #[test]
    fn type_postfix_forms() {
        let list_bool = Type::Adt(crate::name("list"), vec![Type::bool()]);
        assert_eq!(list_bool.to_string(), "bool list");
        let smt_wrap = Type::Smt(PreType::Adt(crate::name("list"), vec![Type::bool()]));
        assert_eq!(smt_wrap.to_string(), "bool list smt");
        let map = Type::Adt(crate::name("map"), vec![Type::Base(Base::Str), Type::bv(32)]);
        assert_eq!(map.to_string(), "(string, bv[32]) map");
        let pair = Type::Adt(crate::name("tuple2"), vec![Type::bool(), Type::bv(64)]);
        assert_eq!(pair.to_string(), "bool * bv[64]");
        let lp = Type::Adt(crate::name("list"), vec![pair]);
        assert_eq!(lp.to_string(), "(bool * bv[64]) list");
    }
}
