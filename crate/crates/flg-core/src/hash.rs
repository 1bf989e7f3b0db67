//! Canonical content hashing. Values (and raw byte strings) hash through an
//! unambiguous length-prefixed encoding into SHA-256, so mangled solver
//! names, memo keys, and replay file names are stable across runs,
//! platforms, and toolchains.

use crate::term::{Constant, QuantKind, SmtNode, SmtOp};
use crate::types::{Base, PreType, Type};
use crate::value::Value;
use sha2::{Digest, Sha256};

pub fn hash_bytes(bytes: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().into()
}

pub fn canonical_hash(v: &Value) -> [u8; 32] {
    let mut h = Sha256::new();
    feed_value(&mut h, v);
    h.finalize().into()
}

/// First 16 hex digits of a digest — short enough for solver symbols,
/// long enough that collisions are not a practical concern.
pub fn short_hex(digest: &[u8; 32]) -> String {
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn full_hex(digest: &[u8; 32]) -> String {
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn feed_str(h: &mut Sha256, s: &str) {
    h.update((s.len() as u64).to_le_bytes());
    h.update(s.as_bytes());
}

fn feed_constant(h: &mut Sha256, k: &Constant) {
    match k {
        Constant::Bool(b) => {
            h.update([0x01, *b as u8]);
        }
        Constant::Bv32(n) => {
            h.update([0x02]);
            h.update(n.to_le_bytes());
        }
        Constant::Bv64(n) => {
            h.update([0x03]);
            h.update(n.to_le_bytes());
        }
        Constant::Str(s) => {
            h.update([0x04]);
            feed_str(h, s);
        }
    }
}

fn feed_type(h: &mut Sha256, t: &Type) {
    match t {
        Type::Base(Base::Bool) => h.update([0x10]),
        Type::Base(Base::Str) => h.update([0x11]),
        Type::Base(Base::Bv(k)) => {
            h.update([0x12]);
            h.update(k.to_le_bytes());
        }
        Type::Adt(d, args) => {
            h.update([0x13]);
            feed_str(h, d);
            h.update((args.len() as u64).to_le_bytes());
            for a in args {
                feed_type(h, a);
            }
        }
        Type::Var(a) => {
            h.update([0x14]);
            feed_str(h, a);
        }
        Type::Smt(p) => {
            h.update([0x15]);
            feed_type(h, &p.clone().into_type());
        }
        Type::Sym(p) => {
            h.update([0x16]);
            feed_type(h, &p.clone().into_type());
        }
        Type::Model => h.update([0x17]),
    }
}

fn feed_pre_type(h: &mut Sha256, t: &PreType) {
    feed_type(h, &t.clone().into_type());
}

fn feed_value(h: &mut Sha256, v: &Value) {
    match v {
        Value::Const(k) => {
            h.update([0x20]);
            feed_constant(h, k);
        }
        Value::Ctor(c, args) => {
            h.update([0x21]);
            feed_str(h, c);
            h.update((args.len() as u64).to_le_bytes());
            for a in args.iter() {
                feed_value(h, a);
            }
        }
        Value::Smt(node) => {
            h.update([0x22]);
            feed_smt(h, node);
        }
        Value::Model(m) => {
            h.update([0x23]);
            h.update((m.bindings.len() as u64).to_le_bytes());
            for ((name, ty), val) in &m.bindings {
                feed_value(h, name);
                feed_pre_type(h, ty);
                feed_value(h, val);
            }
        }
    }
}

fn feed_smt(h: &mut Sha256, node: &SmtNode<Value>) {
    match node {
        SmtNode::Var { name, ty } => {
            h.update([0x30]);
            feed_value(h, name);
            feed_pre_type(h, ty);
        }
        SmtNode::ConstK(k) => {
            h.update([0x31]);
            feed_constant(h, k);
        }
        SmtNode::Ctor(c, args) => {
            h.update([0x32]);
            feed_str(h, c);
            feed_children(h, args);
        }
        SmtNode::Op(op, args) => {
            h.update([0x33]);
            feed_smt_op(h, *op);
            feed_children(h, args);
        }
        SmtNode::Let { var, bound, body } => {
            h.update([0x34]);
            feed_value(h, var);
            feed_value(h, bound);
            feed_value(h, body);
        }
        SmtNode::Quant { kind, binders, patterns, body } => {
            h.update([0x35, matches!(kind, QuantKind::Exists) as u8]);
            feed_children(h, binders);
            feed_children(h, patterns);
            feed_value(h, body);
        }
        SmtNode::Uf(u, args) => {
            h.update([0x36]);
            feed_str(h, u);
            feed_children(h, args);
        }
        SmtNode::Tester(c, arg) => {
            h.update([0x37]);
            feed_str(h, c);
            feed_value(h, arg);
        }
        SmtNode::Getter(c, i, arg) => {
            h.update([0x38]);
            feed_str(h, c);
            h.update(i.to_le_bytes());
            feed_value(h, arg);
        }
    }
}

fn feed_children(h: &mut Sha256, args: &[Value]) {
    h.update((args.len() as u64).to_le_bytes());
    for a in args {
        feed_value(h, a);
    }
}

fn feed_smt_op(h: &mut Sha256, op: SmtOp) {
    if let SmtOp::BvConst(k) = op {
        h.update([0xff]);
        h.update(k.to_le_bytes());
    } else {
        feed_str(h, op.name());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::PreType;

    #[test]
    fn equal_values_hash_equal() {
        let a = Value::ctor("cons", vec![Value::bv32(1), Value::ctor("nil", vec![])]);
        let b = Value::ctor("cons", vec![Value::bv32(1), Value::ctor("nil", vec![])]);
        assert_eq!(canonical_hash(&a), canonical_hash(&b));
    }

    #[test]
    fn distinct_values_hash_distinct() {
        let a = Value::ctor("nil", vec![]);
        let b = Value::Const(Constant::Str(crate::name("nil")));
        assert_ne!(canonical_hash(&a), canonical_hash(&b));
        let v1 = Value::smt_var(Value::bool(true), PreType::Base(Base::Bool));
        let v2 = Value::smt_var(Value::bool(true), PreType::Base(Base::Bv(32)));
        assert_ne!(canonical_hash(&v1), canonical_hash(&v2));
    }

    #[test]
    fn short_hex_is_16_chars() {
        let d = hash_bytes(b"abc");
        assert_eq!(short_hex(&d).len(), 16);
        assert_eq!(full_hex(&d).len(), 64);
    }
}
