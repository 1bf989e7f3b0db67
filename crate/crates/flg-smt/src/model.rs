//! Decoding solver models back into language values. Text that is not a
//! well-formed model s-expression is a protocol error; a well-formed
//! assignment whose value has no language counterpart (functions,
//! uninterpreted-sort elements) just leaves that variable out of the model.

use crate::sorts::{ctor_arg_sorts, strip, SmtEnv};
use crate::SmtError;
use flg_core::types::{Base, PreType};
use flg_core::value::{SmtModel, Value};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn protocol(msg: impl Into<String>) -> SmtError {
    SmtError::Protocol(msg.into())
}

/// Parses the text of a get-model reply against the query's variable set.
pub fn parse_model(
    env: SmtEnv,
    text: &str,
    vars: &BTreeMap<String, (Value, PreType)>,
) -> Result<SmtModel, SmtError> {
    let top = parse_sexp(text)?;
    let Sexp::List(entries) = top else {
        return Err(protocol("model reply is not a parenthesized list"));
    };
    // Older solvers wrap the entries as (model ...).
    let entries = match entries.first() {
        Some(Sexp::Atom(a)) if a == "model" => &entries[1..],
        _ => &entries[..],
    };
    let mut model = SmtModel::default();
    for entry in entries {
        let Sexp::List(parts) = entry else {
            return Err(protocol("model entry is not a list"));
        };
        match parts.first() {
            Some(Sexp::Atom(head)) if head == "define-fun" => {}
            // declare-fun entries introduce universe elements for
            // uninterpreted sorts; they carry no representable assignment.
            Some(Sexp::Atom(head)) if head == "declare-fun" || head == "declare-sort" => continue,
            Some(Sexp::Atom(head)) if head == "forall" => continue,
            _ => return Err(protocol("model entry is not a definition")),
        }
        if parts.len() != 5 {
            return Err(protocol("malformed define-fun in model"));
        }
        let Sexp::Atom(symbol) = &parts[1] else {
            return Err(protocol("define-fun name is not a symbol"));
        };
        let Sexp::List(params) = &parts[2] else {
            return Err(protocol("define-fun parameter list is malformed"));
        };
        if !params.is_empty() {
            // A function interpretation (an uninterpreted function's graph);
            // functions are not representable values.
            continue;
        }
        let Some((var_name, ty)) = vars.get(symbol.as_str()) else {
            // Solver-internal constant (skolem, universe element).
            continue;
        };
        if let Some(v) = decode_value(env, &parts[4], ty) {
            model.bindings.insert((var_name.clone(), ty.clone()), v);
        }
    }
    Ok(model)
}

/// Best-effort decode of a model term at an expected sort. `None` means the
/// assignment is not representable as a language value.
fn decode_value(env: SmtEnv, sexp: &Sexp, expected: &PreType) -> Option<Value> {
    match sexp {
        Sexp::Atom(a) => decode_atom(env, a, expected),
        Sexp::List(parts) => {
            let head = parts.first()?;
            match head {
                Sexp::Atom(h) if h == "as" && parts.len() == 3 => {
                    decode_value(env, &parts[1], expected)
                }
                Sexp::Atom(h) if h == "_" => {
                    // (_ bvN k) literals.
                    let (Sexp::Atom(bv), Sexp::Atom(_k)) = (parts.get(1)?, parts.get(2)?) else {
                        return None;
                    };
                    let n: i128 = bv.strip_prefix("bv")?.parse().ok()?;
                    bv_at_width(n, expected)
                }
                Sexp::Atom(c) => {
                    let PreType::Adt(d, owner_args) = expected else { return None };
                    let (owner, _, cd) = env.decls.ctor(c)?;
                    if owner != d || cd.args.len() != parts.len() - 1 {
                        return None;
                    }
                    let slots = ctor_arg_sorts(env, c, owner_args).ok()?;
                    let mut kids = Vec::with_capacity(slots.len());
                    for (kid, slot) in parts[1..].iter().zip(slots.iter()) {
                        kids.push(decode_value(env, kid, slot)?);
                    }
                    Some(Value::Ctor(c.as_str().into(), kids.into()))
                }
                Sexp::List(_) => None,
            }
        }
    }
}

fn decode_atom(env: SmtEnv, atom: &str, expected: &PreType) -> Option<Value> {
    match expected {
        PreType::Base(Base::Bool) => match atom {
            "true" => Some(Value::bool(true)),
            "false" => Some(Value::bool(false)),
            _ => None,
        },
        PreType::Base(Base::Bv(_)) => {
            let n: i128 = if let Some(hex) = atom.strip_prefix("#x") {
                i128::from_str_radix(hex, 16).ok()?
            } else if let Some(bits) = atom.strip_prefix("#b") {
                i128::from_str_radix(bits, 2).ok()?
            } else {
                return None;
            };
            bv_at_width(n, expected)
        }
        PreType::Base(Base::Str) | PreType::Var(_) => None,
        PreType::Adt(d, _) => {
            let (owner, _, cd) = env.decls.ctor(atom)?;
            if owner == d && cd.args.is_empty() {
                Some(Value::ctor(atom, vec![]))
            } else {
                None
            }
        }
    }
}

/// Two's-complement reading of an unsigned literal at the expected width.
fn bv_at_width(n: i128, expected: &PreType) -> Option<Value> {
    match expected {
        PreType::Base(Base::Bv(32)) => Some(Value::bv32(n as u32 as i32)),
        PreType::Base(Base::Bv(64)) => {
            Some(Value::Const(flg_core::term::Constant::Bv64(n as u64 as i64)))
        }
        _ => None,
    }
}

fn parse_sexp(text: &str) -> Result<Sexp, SmtError> {
    let mut toks = tokenize(text)?;
    toks.reverse();
    let e = parse_one(&mut toks)?;
    if !toks.is_empty() {
        return Err(protocol("trailing tokens after model"));
    }
    Ok(e)
}

fn parse_one(toks: &mut Vec<String>) -> Result<Sexp, SmtError> {
    match toks.pop() {
        None => Err(protocol("unexpected end of model text")),
        Some(t) if t == "(" => {
            let mut items = Vec::new();
            loop {
                match toks.last() {
                    None => return Err(protocol("unbalanced parenthesis in model")),
                    Some(t) if t == ")" => {
                        toks.pop();
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(parse_one(toks)?),
                }
            }
        }
        Some(t) if t == ")" => Err(protocol("unbalanced parenthesis in model")),
        Some(atom) => Ok(Sexp::Atom(atom)),
    }
}

fn tokenize(text: &str) -> Result<Vec<String>, SmtError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' | ')' => {
                toks.push(c.to_string());
                chars.next();
            }
            '"' => {
                chars.next();
                let mut s = String::from("\"");
                let mut closed = false;
                while let Some(c) = chars.next() {
                    s.push(c);
                    if c == '"' {
                        // SMT-LIB escapes a quote by doubling it.
                        if chars.peek() == Some(&'"') {
                            s.push(chars.next().unwrap());
                        } else {
                            closed = true;
                            break;
                        }
                    }
                }
                if !closed {
                    return Err(protocol("unterminated string in model"));
                }
                toks.push(s);
            }
            '|' => {
                chars.next();
                let mut s = String::from("|");
                let mut closed = false;
                for c in chars.by_ref() {
                    s.push(c);
                    if c == '|' {
                        closed = true;
                        break;
                    }
                }
                if !closed {
                    return Err(protocol("unterminated quoted symbol in model"));
                }
                toks.push(s);
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                toks.push(s);
            }
        }
    }
    Ok(toks)
}
