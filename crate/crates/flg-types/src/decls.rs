//! Validation of the declaration environments: data types (constructor
//! uniqueness, argument well-formedness, no phantom parameters) and
//! signatures (functions, relations, uninterpreted functions).

use crate::wf::{type_well_formed, Mode};
use flg_core::diag::{Diagnostic, Span};
use flg_core::term::Program;
use flg_core::types::Type;
use flg_core::Name;
use std::collections::{BTreeMap, BTreeSet};

fn free_tyvars(t: &Type, out: &mut BTreeSet<Name>) {
    match t {
        Type::Var(a) => {
            out.insert(a.clone());
        }
        Type::Adt(_, args) => {
            for a in args {
                free_tyvars(a, out);
            }
        }
        Type::Smt(p) | Type::Sym(p) => free_tyvars(&p.clone().into_type(), out),
        Type::Base(_) | Type::Model => {}
    }
}

/// Checks |- Delta and |- Phi. Declared types come from source, so failures
/// carry the declaring clause's span only when the caller has one; decl
/// validation reports at a dummy span (declarations are named in messages).
pub(crate) fn validate_decls(p: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let sp = Span::DUMMY;

    // Constructor names must be unique across every data type.
    let mut seen: BTreeMap<Name, Name> = BTreeMap::new();
    for (dname, adt) in &p.decls.adts {
        for c in &adt.ctors {
            if let Some(prev) = seen.insert(c.name.clone(), dname.clone()) {
                if &prev != dname {
                    diags.push(Diagnostic::error(
                        "t-ADT",
                        format!(
                            "constructor `{}` is declared by both `{prev}` and `{dname}`",
                            c.name
                        ),
                        sp,
                    ));
                }
            }
        }
    }

    for (dname, adt) in &p.decls.adts {
        let params: BTreeSet<Name> = adt.params.iter().cloned().collect();
        if params.len() != adt.params.len() {
            diags.push(Diagnostic::error(
                "t-ADT",
                format!("type `{dname}` repeats a type parameter"),
                sp,
            ));
        }
        if adt.uninterpreted {
            continue;
        }
        let mut used = BTreeSet::new();
        for c in &adt.ctors {
            for (i, arg) in c.args.iter().enumerate() {
                if let Err(e) = type_well_formed(&p.decls, &params, arg, Mode::Exp) {
                    diags.push(Diagnostic::error(
                        e.rule,
                        format!("in argument {} of constructor `{}`: {}", i + 1, c.name, e.message),
                        sp,
                    ));
                }
                free_tyvars(arg, &mut used);
            }
        }
        // Every parameter must occur in some constructor argument, or values
        // of the type could never determine it.
        for a in &adt.params {
            if !used.contains(a) {
                diags.push(Diagnostic::error(
                    "t-ADT",
                    format!("type parameter `{a}` of `{dname}` occurs in no constructor"),
                    sp,
                ));
            }
        }
    }

    let no_vars = BTreeSet::new();
    for (rname, sig) in &p.sigs.relations {
        for (i, col) in sig.cols.iter().enumerate() {
            if let Err(e) = type_well_formed(&p.decls, &no_vars, col, Mode::Exp) {
                diags.push(Diagnostic::error(
                    "Φ-Rel",
                    format!("in column {} of relation `{rname}`: {}", i + 1, e.message),
                    sp,
                ));
            }
        }
    }

    for (fname, sig) in &p.sigs.functions {
        let params: BTreeSet<Name> = sig.type_params.iter().cloned().collect();
        if params.len() != sig.type_params.len() {
            diags.push(Diagnostic::error(
                "Φ-Fun",
                format!("function `{fname}` repeats a type parameter"),
                sp,
            ));
        }
        let mut used = BTreeSet::new();
        for (i, t) in sig.params.iter().enumerate() {
            if let Err(e) = type_well_formed(&p.decls, &params, t, Mode::Exp) {
                diags.push(Diagnostic::error(
                    "Φ-Fun",
                    format!("in parameter {} of function `{fname}`: {}", i + 1, e.message),
                    sp,
                ));
            }
            free_tyvars(t, &mut used);
        }
        if let Err(e) = type_well_formed(&p.decls, &params, &sig.ret, Mode::Exp) {
            diags.push(Diagnostic::error(
                "Φ-Fun",
                format!("in the result type of function `{fname}`: {}", e.message),
                sp,
            ));
        }
        free_tyvars(&sig.ret, &mut used);
        for a in &sig.type_params {
            if !used.contains(a) {
                diags.push(Diagnostic::error(
                    "Φ-Fun",
                    format!("type parameter `{a}` of function `{fname}` is never used"),
                    sp,
                ));
            }
        }
    }

    for (uname, sig) in &p.sigs.ufs {
        for (i, t) in sig.args.iter().enumerate() {
            let t = t.clone().into_type();
            if let Err(e) = type_well_formed(&p.decls, &no_vars, &t, Mode::Smt) {
                diags.push(Diagnostic::error(
                    "Φ-UFun",
                    format!(
                        "in argument {} of uninterpreted function `{uname}`: {}",
                        i + 1,
                        e.message
                    ),
                    sp,
                ));
            }
        }
        let ret = sig.ret.clone().into_type();
        if let Err(e) = type_well_formed(&p.decls, &no_vars, &ret, Mode::Smt) {
            diags.push(Diagnostic::error(
                "Φ-UFun",
                format!("in the result type of uninterpreted function `{uname}`: {}", e.message),
                sp,
            ));
        }
    }

    diags
}
