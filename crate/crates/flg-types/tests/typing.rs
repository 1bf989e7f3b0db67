//! End-to-end checks of the static pipeline: parse + lower a source program,
//! then validate it. Each rejection must cite the violated rule by name.

use flg_core::diag::{Diagnostic, Severity};
use flg_core::term::Program;
use flg_types::{check_clause, check_expression, validate_program};
use std::collections::BTreeMap;
use std::path::PathBuf;

fn parse(src: &str) -> Program {
    match flg_parse::load_source(src) {
        Ok(p) => p,
        Err(ds) => panic!("parse failed: {:?}", ds),
    }
}

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn errors_of(ds: &[Diagnostic]) -> Vec<&Diagnostic> {
    ds.iter().filter(|d| d.severity == Severity::Error).collect()
}

#[test]
fn function_body_must_match_declared_result() {
    let p = parse("fun f(x: bool) : bv[32] = x\n");
    let err = validate_program(&p).expect_err("must be rejected");
    let errs = errors_of(&err);
    assert!(errs.iter().any(|d| d.rule == "F-WF"), "got {errs:?}");
}

#[test]
fn positive_atom_binds_variables_at_column_types() {
    let p = parse("input p(bv[32])\noutput q(bv[32])\nq(X) :- p(X).\n");
    let gamma = check_clause(&p, &p.clauses[0]).expect("well-typed");
    assert_eq!(
        gamma.get(&flg_core::name("X")),
        Some(&flg_core::types::Type::bv(32))
    );
}

#[test]
fn unbound_head_variable_is_a_range_restriction_error() {
    let p = parse(&fixture("unbound_head.flg"));
    let err = validate_program(&p).expect_err("must be rejected");
    let errs = errors_of(&err);
    assert!(errs.iter().any(|d| d.rule == "H-Clause"
        && d.message.contains("not bound by the body")
        && d.message.contains("range restriction")),
        "got {errs:?}");
}

#[test]
fn distinct_smt_variables_example_is_well_typed() {
    let p = parse(&fixture("distinct_vars.flg"));
    validate_program(&p).expect("well-typed");
}

#[test]
fn width_mismatch_in_quoted_call_is_rejected_inside_the_argument() {
    let p = parse(&fixture("mismatched_widths.flg"));
    let err = validate_program(&p).expect_err("must be rejected");
    let errs = errors_of(&err);
    let hit = errs
        .iter()
        .find(|d| d.rule == "e-Ctor")
        .unwrap_or_else(|| panic!("expected an e-Ctor rejection, got {errs:?}"));
    assert!(hit.message.contains("(e-Fun)"), "missing call-site context: {}", hit.message);
}

#[test]
fn symbolic_constructor_argument_example_is_well_typed() {
    let p = parse(&fixture("symbolic_sat.flg"));
    validate_program(&p).expect("well-typed");
}

#[test]
fn uninterpreted_validity_example_is_well_typed() {
    let p = parse(&fixture("uninterpreted_validity.flg"));
    validate_program(&p).expect("well-typed");
}

#[test]
fn model_query_example_is_well_typed() {
    let p = parse(&fixture("cons_model.flg"));
    validate_program(&p).expect("well-typed");
}

#[test]
fn symbolic_evaluator_program_is_well_typed_and_stratified() {
    let p = parse(&fixture("symex.flg"));
    let checked = validate_program(&p).expect("well-typed");
    let pos = |r: &str| {
        checked
            .strata
            .iter()
            .position(|s| s.iter().any(|n| &**n == r))
            .unwrap_or_else(|| panic!("{r} missing from strata {:?}", checked.strata))
    };
    assert!(pos("node_has_inst") < pos("reached"));
    assert!(pos("node_has_succ") < pos("reached"));
    assert!(pos("reached") < pos("failed"));
}

#[test]
fn negation_cycle_through_a_function_call_is_rejected() {
    let p = parse(&fixture("negation_cycle.flg"));
    let err = validate_program(&p).expect_err("must be rejected");
    let errs = errors_of(&err);
    let hit = errs
        .iter()
        .find(|d| d.rule == "stratification")
        .unwrap_or_else(|| panic!("expected a stratification rejection, got {errs:?}"));
    assert!(hit.message.contains("`p`") && hit.message.contains("`q`"), "{}", hit.message);
    assert!(hit.message.contains("recursive component"), "{}", hit.message);
}

#[test]
fn acyclic_dependencies_evaluate_callees_first() {
    let p = parse(
        "input edge(bv[32], bv[32])\noutput path(bv[32], bv[32])\n\
         path(X, Y) :- edge(X, Y).\npath(X, Z) :- path(X, Y), edge(Y, Z).\n",
    );
    let checked = validate_program(&p).expect("well-typed");
    assert_eq!(
        checked.strata,
        vec![vec![flg_core::name("edge")], vec![flg_core::name("path")]]
    );
}

#[test]
fn inline_facts_for_input_relations_are_accepted() {
    let p = parse("input p(bv[32])\np(1).\np(2).\n");
    validate_program(&p).expect("facts into input relations are allowed");
}

#[test]
fn negated_atom_requires_bound_variables() {
    let p = parse(
        "input p(bv[32])\ninput r(bv[32])\noutput q(bv[32])\nq(X) :- p(X), !r(Y).\n",
    );
    let err = validate_program(&p).expect_err("must be rejected");
    assert!(errors_of(&err).iter().any(|d| d.rule == "P-NegAtom"), "got {err:?}");
}

#[test]
fn disequality_requires_both_sides_bound() {
    let p = parse("input p(bv[32])\noutput q(bv[32])\nq(X) :- p(X), Y != 3.\n");
    let err = validate_program(&p).expect_err("must be rejected");
    assert!(errors_of(&err).iter().any(|d| d.rule == "P-NegEq"), "got {err:?}");
}

#[test]
fn equality_with_both_sides_unbound_is_rejected() {
    let p = parse("output q(bv[32])\nq(X) :- X = Y.\n");
    let err = validate_program(&p).expect_err("must be rejected");
    let errs = errors_of(&err);
    assert!(
        errs.iter().any(|d| d.rule == "P-EqCtor-BF" && d.message.contains("fully bound")),
        "got {errs:?}"
    );
}

#[test]
fn incomplete_match_warns_but_does_not_fail() {
    let p = parse("fun g(x: bv[32] list) : bv[32] = match x with cons(_, _) => 1 end\n");
    let checked = validate_program(&p).expect("warning only");
    assert!(
        checked.warnings.iter().any(|w| w.rule == "e-Match" && w.message.contains("cover")),
        "got {:?}",
        checked.warnings
    );
}

#[test]
fn smt_variable_name_seed_may_have_any_type() {
    let p = parse("fun h(st: bool) : bv[32] sym = #{st}[bv[32]]\n");
    validate_program(&p).expect("well-typed");
}

#[test]
fn smt_variable_index_must_be_a_formula_type() {
    let p = parse("output q\nq :- X = #x[string], X = X.\n");
    let err = validate_program(&p).expect_err("must be rejected");
    assert!(errors_of(&err).iter().any(|d| d.rule == "t-Base"), "got {err:?}");
}

#[test]
fn uninterpreted_sorts_and_functions_type_in_formulas() {
    let p = parse(
        "uninterpreted sort usort\nuninterpreted fun myf(usort smt) : bool smt\noutput ok\n\
         ok :- is_sat(`myf(#u[usort])`) = true.\n",
    );
    validate_program(&p).expect("well-typed");
}

#[test]
fn expression_checking_reports_closed_types() {
    let p = parse("output q\nq :- true = true.\n");
    let env = BTreeMap::new();
    let src = parse("fun v : bv[32] list = cons(1, nil)\n");
    let body = &src.functions[&flg_core::name("v")].body;
    let t = check_expression(&p, &env, body).expect("well-typed");
    assert_eq!(
        t,
        flg_core::types::Type::Adt(flg_core::name("list"), vec![flg_core::types::Type::bv(32)])
    );
}

#[test]
fn predicate_calls_in_expressions_project_multisets() {
    let p = parse(
        "input p(bv[32], bool)\noutput q(bool list)\nq(L) :- L = p(3, ??).\n",
    );
    validate_program(&p).expect("well-typed");
    let gamma = check_clause(&p, &p.clauses[0]).expect("well-typed");
    assert_eq!(
        gamma.get(&flg_core::name("L")),
        Some(&flg_core::types::Type::Adt(
            flg_core::name("list"),
            vec![flg_core::types::Type::Base(flg_core::types::Base::Bool)]
        ))
    );
}

#[test]
fn quoted_operators_constrain_bitvector_widths() {
    let p = parse("output ok\nok :- X = `bv_add(#a[bv[64]], 1)`, X = X.\n");
    let err = validate_program(&p).expect_err("bv[64] against a bv[32] literal");
    let errs = errors_of(&err);
    assert!(errs.iter().any(|d| d.rule.starts_with("c-SMT")), "got {errs:?}");
}

#[test]
fn model_values_cannot_enter_formulas() {
    let p = parse(
        "output ok\nok :- some(M) = get_model([`true`], none), X = `M #= M`, X = X.\n",
    );
    let err = validate_program(&p).expect_err("model in formula");
    assert!(errors_of(&err).iter().any(|d| d.rule == "φ-Unquote"), "got {err:?}");
}
