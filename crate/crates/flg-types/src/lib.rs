//! Static checking: well-formedness of declarations, the bimodal type system,
//! clause safety, and stratification.
//!
//! The checker runs after parsing and lowering. It validates data type and
//! signature declarations, types every function body and clause, and computes
//! the evaluation order (strata). Every rejection carries the name of the
//! violated rule.

mod check;
mod clause;
mod decls;
mod strat;
mod ty;
mod value;
mod wf;

pub use value::value_has_type;
pub use wf::{erase_type, to_smt_type, type_well_formed, Mode, TypeError};

use check::{Checker, Env};
use flg_core::diag::{Diagnostic, Severity};
use flg_core::term::{Clause, Expr, Program};
use flg_core::types::Type;
use flg_core::Name;
use std::collections::BTreeMap;

/// The result of validating a whole program.
#[derive(Debug)]
pub struct Checked {
    /// Evaluation order: each stratum's relations, dependencies first.
    pub strata: Vec<Vec<Name>>,
    pub warnings: Vec<Diagnostic>,
}

/// Types one expression under the given variable typings.
pub fn check_expression(
    prog: &Program,
    env: &BTreeMap<Name, Type>,
    expr: &Expr,
) -> Result<Type, Vec<Diagnostic>> {
    let mut ck = Checker::new(prog);
    let mut e = Env::default();
    for (x, t) in env {
        e.stack.push((x.clone(), ty::Ty::from_type(t)));
    }
    let t = ck.check_expr(&mut e, expr);
    ck.check_obligations();
    if ck.diags.is_empty() {
        let t = t.expect("no diagnostics implies success");
        let z = ck.cx.zonk(&t);
        Ok(ck.cx.to_type(&z))
    } else {
        Err(ck.diags)
    }
}

/// Types one clause and returns the variable typings its body establishes.
pub fn check_clause(prog: &Program, clause: &Clause) -> Result<BTreeMap<Name, Type>, Vec<Diagnostic>> {
    let mut ck = Checker::new(prog);
    match ck.check_clause_impl(clause) {
        Ok(gamma) if ck.diags.is_empty() => Ok(gamma),
        _ => Err(ck.diags),
    }
}

/// Computes the strata of a program, or reports its stratification
/// violations.
pub fn stratify(prog: &Program) -> Result<Vec<Vec<Name>>, Vec<Diagnostic>> {
    strat::stratify_impl(prog)
}

/// Validates a whole program: declarations, every function body, every
/// clause, then stratification. Diagnostics are collected across items;
/// warnings alone do not fail validation.
pub fn validate_program(prog: &Program) -> Result<Checked, Vec<Diagnostic>> {
    let mut all = decls::validate_decls(prog);
    if all.iter().any(|d| d.severity == Severity::Error) {
        return Err(all);
    }
    let mut warnings: Vec<Diagnostic> =
        all.iter().filter(|d| d.severity == Severity::Warning).cloned().collect();
    all.retain(|d| d.severity == Severity::Error);

    for def in prog.functions.values() {
        let mut ck = Checker::new(prog);
        let _ = ck.check_function_impl(def);
        all.extend(ck.diags);
        warnings.extend(ck.warnings);
    }
    for clause in &prog.clauses {
        let mut ck = Checker::new(prog);
        let _ = ck.check_clause_impl(clause);
        all.extend(ck.diags);
        warnings.extend(ck.warnings);
    }
    if !all.is_empty() {
        all.extend(warnings);
        return Err(all);
    }
    match strat::stratify_impl(prog) {
        Ok(strata) => Ok(Checked { strata, warnings }),
        Err(mut ds) => {
            ds.extend(warnings);
            Err(ds)
        }
    }
}
