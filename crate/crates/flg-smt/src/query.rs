//! Query construction: pattern scrubbing, declaration reachability, and
//! assembly of the canonical SMT-LIB script. The canonical script never
//! contains a timeout line; timeouts are wire-level options so that a query
//! keeps one identity (hash, memo slot, transcript) across deadlines.

use crate::sorts::{contract, mangle_var, render_sort, sort_tag, strip, SmtEnv};
use crate::SmtError;
use flg_core::hash::{full_hex, hash_bytes};
use flg_core::term::SmtNode;
use flg_core::types::{Base, PreType, Type};
use flg_core::value::Value;
use flg_core::Name;
use std::collections::{BTreeMap, BTreeSet};

/// Sat | Unsat | Unknown.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SmtVerdict {
    Sat,
    Unsat,
    Unknown,
}

/// One solver question: an ordered conjunction plus everything the script
/// needs declared. Construction computes the reachable declarations and the
/// canonical script once; the query is immutable afterwards.
#[derive(Clone, Debug)]
pub struct SmtQuery {
    pub conjuncts: Vec<Value>,
    pub timeout_ms: Option<i32>,
    pub wants_model: bool,
    script: String,
    hash: String,
    vars: BTreeMap<String, (Value, PreType)>,
}

impl SmtQuery {
    /// Builds a query. Invalid quantifier patterns are dropped here, one
    /// warning string per dropped pattern.
    pub fn new(
        env: SmtEnv,
        conjuncts: Vec<Value>,
        timeout_ms: Option<i32>,
        wants_model: bool,
    ) -> Result<(SmtQuery, Vec<String>), SmtError> {
        let mut warnings = Vec::new();
        let conjuncts: Vec<Value> =
            conjuncts.iter().map(|c| drop_invalid_patterns(c, &mut warnings)).collect();

        let mut reach = Reach::default();
        for c in &conjuncts {
            reach.walk(env, c, &mut Vec::new())?;
        }
        reach.close(env)?;

        let script = assemble(env, &reach, &conjuncts, wants_model)?;
        let hash = full_hex(&hash_bytes(script.as_bytes()));
        Ok((
            SmtQuery { conjuncts, timeout_ms, wants_model, script, hash, vars: reach.free_vars },
            warnings,
        ))
    }

    /// Canonical SMT-LIB text (no timeout line).
    pub fn script(&self) -> &str {
        &self.script
    }

    /// Content hash of the canonical script: memo key and transcript name.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Declared SMT variables by mangled solver symbol.
    pub fn vars(&self) -> &BTreeMap<String, (Value, PreType)> {
        &self.vars
    }
}

/// Removes quantifier patterns that contain binding operators (nested
/// quantifiers or lets), appending one warning per dropped pattern.
pub fn drop_invalid_patterns(v: &Value, warnings: &mut Vec<String>) -> Value {
    match v {
        Value::Const(_) | Value::Model(_) => v.clone(),
        Value::Ctor(c, kids) => Value::Ctor(
            c.clone(),
            kids.iter().map(|k| drop_invalid_patterns(k, warnings)).collect::<Vec<_>>().into(),
        ),
        Value::Smt(node) => {
            let mapped = node.map(|kid| drop_invalid_patterns(kid, warnings));
            let scrubbed = match mapped {
                SmtNode::Quant { kind, binders, patterns, body } => {
                    let mut kept = Vec::with_capacity(patterns.len());
                    for p in patterns {
                        if contains_binder(&p) {
                            warnings.push(format!(
                                "dropped quantifier pattern {p}: patterns may not contain binders"
                            ));
                        } else {
                            kept.push(p);
                        }
                    }
                    SmtNode::Quant { kind, binders, patterns: kept, body }
                }
                other => other,
            };
            Value::smt(scrubbed)
        }
    }
}

fn contains_binder(v: &Value) -> bool {
    match v {
        Value::Const(_) | Value::Model(_) => false,
        Value::Ctor(_, kids) => kids.iter().any(contains_binder),
        Value::Smt(node) => match &**node {
            SmtNode::Quant { .. } | SmtNode::Let { .. } => true,
            other => other.children().into_iter().any(contains_binder),
        },
    }
}

/// Everything a script must declare, discovered by walking the conjuncts.
#[derive(Default)]
struct Reach {
    adts: BTreeSet<Name>,
    sorts: BTreeSet<Name>,
    ufs: BTreeSet<Name>,
    free_vars: BTreeMap<String, (Value, PreType)>,
}

impl Reach {
    fn walk(
        &mut self,
        env: SmtEnv,
        v: &Value,
        scope: &mut Vec<(Value, PreType)>,
    ) -> Result<(), SmtError> {
        match v {
            Value::Const(_) => Ok(()),
            Value::Model(_) => Err(contract("model value inside a formula")),
            Value::Ctor(c, kids) => {
                self.note_ctor(env, c)?;
                for k in kids.iter() {
                    self.walk(env, k, scope)?;
                }
                Ok(())
            }
            Value::Smt(node) => match &**node {
                SmtNode::Var { name, ty } => {
                    self.note_pre_type(env, ty)?;
                    let key = (name.clone(), ty.clone());
                    if !scope.contains(&key) {
                        self.free_vars.insert(mangle_var(name, ty)?, key);
                    }
                    Ok(())
                }
                SmtNode::ConstK(_) => Ok(()),
                SmtNode::Ctor(c, kids) => {
                    self.note_ctor(env, c)?;
                    for k in kids {
                        self.walk(env, k, scope)?;
                    }
                    Ok(())
                }
                SmtNode::Uf(f, kids) => {
                    let sig = env.ufs.get(f).ok_or_else(|| {
                        contract(format!("unknown uninterpreted function `{f}`"))
                    })?;
                    self.ufs.insert(f.clone());
                    for ty in sig.args.iter().chain(std::iter::once(&sig.ret)) {
                        self.note_pre_type(env, ty)?;
                    }
                    for k in kids {
                        self.walk(env, k, scope)?;
                    }
                    Ok(())
                }
                SmtNode::Op(_, kids) => {
                    for k in kids {
                        self.walk(env, k, scope)?;
                    }
                    Ok(())
                }
                SmtNode::Let { var, bound, body } => {
                    self.walk(env, bound, scope)?;
                    let key = binder_key(var)?;
                    self.note_pre_type(env, &key.1)?;
                    scope.push(key);
                    self.walk(env, body, scope)?;
                    scope.pop();
                    Ok(())
                }
                SmtNode::Quant { binders, patterns, body, .. } => {
                    let depth = scope.len();
                    for b in binders {
                        let key = binder_key(b)?;
                        self.note_pre_type(env, &key.1)?;
                        scope.push(key);
                    }
                    for p in patterns {
                        self.walk(env, p, scope)?;
                    }
                    self.walk(env, body, scope)?;
                    scope.truncate(depth);
                    Ok(())
                }
                SmtNode::Tester(c, kid) => {
                    self.note_ctor(env, c)?;
                    self.walk(env, kid, scope)
                }
                SmtNode::Getter(c, _, kid) => {
                    self.note_ctor(env, c)?;
                    self.walk(env, kid, scope)
                }
            },
        }
    }

    fn note_ctor(&mut self, env: SmtEnv, c: &str) -> Result<(), SmtError> {
        let (owner, _, _) =
            env.decls.ctor(c).ok_or_else(|| contract(format!("unknown constructor `{c}`")))?;
        self.adts.insert(owner.clone());
        Ok(())
    }

    fn note_pre_type(&mut self, env: SmtEnv, ty: &PreType) -> Result<(), SmtError> {
        match ty {
            PreType::Base(Base::Str) => Err(contract("string type reached the solver layer")),
            PreType::Base(_) => Ok(()),
            PreType::Var(a) => Err(contract(format!("open sort `{a}` in a query"))),
            PreType::Adt(d, args) => {
                self.adts.insert(d.clone());
                for a in args {
                    self.note_type(env, a)?;
                }
                Ok(())
            }
        }
    }

    fn note_type(&mut self, env: SmtEnv, ty: &Type) -> Result<(), SmtError> {
        self.note_pre_type(env, &strip(ty)?)
    }

    /// Closes the ADT set over constructor field types, then moves
    /// uninterpreted sorts out into their own set.
    fn close(&mut self, env: SmtEnv) -> Result<(), SmtError> {
        let mut queue: Vec<Name> = self.adts.iter().cloned().collect();
        while let Some(d) = queue.pop() {
            let decl = env
                .decls
                .adts
                .get(&d)
                .ok_or_else(|| contract(format!("unknown data type `{d}`")))?;
            for cd in &decl.ctors {
                for arg in &cd.args {
                    for mention in adt_mentions(arg)? {
                        if self.adts.insert(mention.clone()) {
                            queue.push(mention);
                        }
                    }
                }
            }
        }
        let (interp, uninterp): (BTreeSet<_>, BTreeSet<_>) = std::mem::take(&mut self.adts)
            .into_iter()
            .partition(|d| !env.decls.adts[d].uninterpreted);
        self.adts = interp;
        self.sorts = uninterp;
        Ok(())
    }
}

fn binder_key(v: &Value) -> Result<(Value, PreType), SmtError> {
    let Value::Smt(node) = v else {
        return Err(contract("binder is not an SMT variable"));
    };
    let SmtNode::Var { name, ty } = &**node else {
        return Err(contract("binder is not an SMT variable"));
    };
    Ok((name.clone(), ty.clone()))
}

/// ADT names appearing in a declaration field type. Type variables are fine
/// here (they are the datatype's own parameters).
fn adt_mentions(ty: &Type) -> Result<Vec<Name>, SmtError> {
    match strip(ty)? {
        PreType::Base(_) | PreType::Var(_) => Ok(vec![]),
        PreType::Adt(d, args) => {
            let mut out = vec![d];
            for a in &args {
                out.extend(adt_mentions(a)?);
            }
            Ok(out)
        }
    }
}

fn assemble(
    env: SmtEnv,
    reach: &Reach,
    conjuncts: &[Value],
    wants_model: bool,
) -> Result<String, SmtError> {
    let mut lines: Vec<String> = vec!["(set-logic ALL)".into()];
    if wants_model {
        lines.push("(set-option :produce-models true)".into());
    }
    for s in &reach.sorts {
        let arity = env.decls.adts[s].params.len();
        lines.push(format!("(declare-sort {s} {arity})"));
    }
    if !reach.adts.is_empty() {
        lines.push(render_datatypes(env, &reach.adts)?);
    }
    for f in &reach.ufs {
        let sig = &env.ufs[f];
        let mut line = format!("(declare-fun {f} (");
        for (i, a) in sig.args.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&render_sort(a)?);
        }
        line.push_str(") ");
        line.push_str(&render_sort(&sig.ret)?);
        line.push(')');
        lines.push(line);
    }
    for (mangled, (_, ty)) in &reach.free_vars {
        lines.push(format!("(declare-const {mangled} {})", render_sort(ty)?));
    }
    for c in conjuncts {
        let mut line = String::from("(assert ");
        crate::serialize::render_term(env, c, Some(&PreType::Base(Base::Bool)), &mut line)?;
        line.push(')');
        lines.push(line);
    }
    lines.push("(check-sat)".into());
    if wants_model {
        lines.push("(get-model)".into());
    }
    let mut out = lines.join("\n");
    out.push('\n');
    Ok(out)
}

/// One declare-datatypes block covering every reachable ADT; a single block
/// handles any mutual recursion and keeps the layout stable.
fn render_datatypes(env: SmtEnv, adts: &BTreeSet<Name>) -> Result<String, SmtError> {
    let mut heads = String::new();
    let mut defs = String::new();
    for d in adts {
        let decl = &env.decls.adts[d];
        if !heads.is_empty() {
            heads.push(' ');
            defs.push(' ');
        }
        heads.push_str(&format!("({d} {})", decl.params.len()));

        let params: BTreeMap<&Name, String> =
            decl.params.iter().enumerate().map(|(i, p)| (p, format!("T{i}"))).collect();
        let mut ctors = String::new();
        for cd in &decl.ctors {
            if !ctors.is_empty() {
                ctors.push(' ');
            }
            ctors.push('(');
            ctors.push_str(&cd.name);
            for (i, arg) in cd.args.iter().enumerate() {
                ctors.push_str(&format!(" ({}!{} ", cd.name, i + 1));
                ctors.push_str(&render_field_sort(arg, &params)?);
                ctors.push(')');
            }
            ctors.push(')');
        }
        if decl.params.is_empty() {
            defs.push_str(&format!("({ctors})"));
        } else {
            let names: Vec<&str> = (0..decl.params.len())
                .map(|i| params[&decl.params[i]].as_str())
                .collect();
            defs.push_str(&format!("(par ({}) ({ctors}))", names.join(" ")));
        }
    }
    Ok(format!("(declare-datatypes ({heads}) ({defs}))"))
}

/// Sort text of a constructor field, with the datatype's own parameters
/// rendered as their positional SMT names.
fn render_field_sort(ty: &Type, params: &BTreeMap<&Name, String>) -> Result<String, SmtError> {
    match strip(ty)? {
        PreType::Var(a) => params
            .get(&a)
            .cloned()
            .ok_or_else(|| contract(format!("unbound datatype parameter `{a}`"))),
        PreType::Base(Base::Bool) => Ok("Bool".into()),
        PreType::Base(Base::Bv(k)) => Ok(format!("(_ BitVec {k})")),
        PreType::Base(Base::Str) => Err(contract("string field in a solver-visible data type")),
        PreType::Adt(d, args) => {
            if args.is_empty() {
                Ok(d.to_string())
            } else {
                let mut out = format!("({d}");
                for a in &args {
                    out.push(' ');
                    out.push_str(&render_field_sort(a, params)?);
                }
                out.push(')');
                Ok(out)
            }
        }
    }
}

pub(crate) fn parse_verdict(line: &str) -> Result<SmtVerdict, SmtError> {
    match line.trim() {
        "sat" => Ok(SmtVerdict::Sat),
        "unsat" => Ok(SmtVerdict::Unsat),
        "unknown" => Ok(SmtVerdict::Unknown),
        other => Err(SmtError::Protocol(format!("expected a verdict, got {other:?}"))),
    }
}
