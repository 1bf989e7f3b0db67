//! End-to-end checks on the surface pipeline: lexing, parsing, and lowering
//! into the core program form.

use flg_core::diag::Diagnostic;
use flg_core::term::*;
use flg_core::types::*;
use flg_core::Name;

fn ok(src: &str) -> Program {
    match flg_parse::load_source(src) {
        Ok(p) => p,
        Err(ds) => panic!("expected program to lower, got {ds:#?}"),
    }
}

fn err(src: &str) -> Vec<Diagnostic> {
    match flg_parse::load_source(src) {
        Ok(_) => panic!("expected errors for:\n{src}"),
        Err(ds) => ds,
    }
}

fn has_msg(ds: &[Diagnostic], needle: &str) -> bool {
    ds.iter().any(|d| d.message.contains(needle))
}

fn fun<'p>(p: &'p Program, n: &str) -> &'p FunDef {
    p.functions.get(n).unwrap_or_else(|| panic!("no function `{n}`"))
}

#[test]
fn empty_program_is_valid() {
    let p = ok("");
    assert!(p.clauses.is_empty());
    assert!(p.functions.is_empty());
    // The prelude is always present.
    assert!(p.decls.adts.contains_key("list"));
    assert!(p.decls.adts.contains_key("option"));
}

#[test]
fn single_nullary_ctor_needs_leading_pipe() {
    let p = ok("type foo = | bar");
    let adt = &p.decls.adts["foo"];
    assert_eq!(adt.ctors.len(), 1);
    assert_eq!(&*adt.ctors[0].name, "bar");
    assert!(adt.ctors[0].args.is_empty());
    // Without the pipe the body reads as an alias to an unknown type.
    let ds = err("type foo = bar");
    assert!(has_msg(&ds, "unknown type `bar`"), "{ds:?}");
}

#[test]
fn aliases_expand_everywhere() {
    let p = ok("type id = bv[32]\ntype ids = id list\noutput p(ids)");
    let sig = &p.sigs.relations["p"];
    assert_eq!(sig.cols, vec![Type::Adt("list".into(), vec![Type::bv(32)])]);
    assert!(!p.decls.adts.contains_key("id"), "aliases do not declare ADTs");
}

#[test]
fn alias_cycle_is_rejected() {
    let ds = err("type a = b list\ntype b = a");
    assert!(has_msg(&ds, "circular"), "{ds:?}");
}

#[test]
fn bit_vector_widths_are_checked() {
    let ds = err("output p(bv[16])");
    assert!(has_msg(&ds, "widths are 32 or 64"), "{ds:?}");
}

#[test]
fn atom_arguments_are_flattened_to_variables() {
    let p = ok("type inst = | i_fail | i_jmp(bv[32])\n\
                input node_has_inst(bv[32], inst)\n\
                output bad(bv[32])\n\
                bad(N) :- node_has_inst(N, i_fail).");
    let c = &p.clauses[0];
    assert_eq!(c.head.args, vec![Name::from("N")]);
    assert_eq!(c.body.len(), 2);
    let Premise::Pos(a) = &c.body[0] else { panic!("{:?}", c.body[0]) };
    assert_eq!(&*a.pred, "node_has_inst");
    assert_eq!(a.args, vec![Name::from("N"), Name::from("$0")]);
    // The destructuring equality trails the atom that binds its variable.
    let Premise::Eq { var, rhs, .. } = &c.body[1] else { panic!("{:?}", c.body[1]) };
    assert_eq!(&**var, "$0");
    assert!(matches!(rhs, Expr::Ctor(n, args, _) if &**n == "i_fail" && args.is_empty()));
}

#[test]
fn negated_atom_arguments_bind_up_front() {
    let p = ok("input q(bv[32])\ninput r(bv[32])\noutput p(bv[32])\n\
                p(X) :- q(X), !r(X + 1).");
    let c = &p.clauses[0];
    assert_eq!(c.body.len(), 3);
    assert!(matches!(&c.body[0], Premise::Pos(a) if &*a.pred == "q"));
    let Premise::Eq { var, rhs, .. } = &c.body[1] else { panic!("{:?}", c.body[1]) };
    assert_eq!(&**var, "$0");
    assert!(matches!(rhs, Expr::Op(Op::Add, _, _)));
    let Premise::Neg(a) = &c.body[2] else { panic!("{:?}", c.body[2]) };
    assert_eq!(a.args, vec![Name::from("$0")]);
}

#[test]
fn equality_premise_evaluates_calls_before_matching_patterns() {
    let p = ok("output ok\nok :- is_valid(`false ==> #x[bool]`) = true.");
    let c = &p.clauses[0];
    assert!(c.head.args.is_empty());
    assert_eq!(c.body.len(), 2);
    let Premise::Eq { var: v0, rhs: r0, .. } = &c.body[0] else { panic!() };
    let Premise::Eq { var: v1, rhs: r1, .. } = &c.body[1] else { panic!() };
    assert_eq!(v0, v1);
    // The is_valid call runs first even though it is written on the left.
    let Expr::Op(Op::IsValid, args, _) = r0 else { panic!("{r0:?}") };
    let Expr::Quote(Formula::Node(node, _), _) = &args[0] else { panic!("{:?}", args[0]) };
    let SmtNode::Op(SmtOp::Imp, kids) = &**node else { panic!("{node:?}") };
    assert!(matches!(&kids[0], Formula::Node(n, _) if **n == SmtNode::ConstK(Constant::Bool(false))));
    let Formula::Unquote(e) = &kids[1] else { panic!("{:?}", kids[1]) };
    let Expr::SmtVar { name, ty, .. } = &**e else { panic!("{e:?}") };
    assert!(matches!(&**name, Expr::Const(Constant::Str(s), _) if &**s == "x"));
    assert_eq!(*ty, PreType::Base(Base::Bool));
    assert!(matches!(r1, Expr::Const(Constant::Bool(true), _)));
}

#[test]
fn equality_over_two_compound_sides_splits_on_one_variable() {
    let p = ok("type t = | some_of(bv[32])\n\
                fun g(X: bv[32]) : t = some_of(X + 1)\n\
                input q(bv[32])\n\
                output p(bv[32])\n\
                p(Y) :- q(Z), some_of(Y) = g(Z).");
    let c = &p.clauses[0];
    assert_eq!(c.body.len(), 3);
    let Premise::Eq { var: v0, rhs: r0, .. } = &c.body[1] else { panic!() };
    let Premise::Eq { var: v1, rhs: r1, .. } = &c.body[2] else { panic!() };
    assert_eq!(v0, v1);
    assert!(matches!(r0, Expr::Fun(n, _, _) if &**n == "g"), "call side first: {r0:?}");
    assert!(matches!(r1, Expr::Ctor(n, _, _) if &**n == "some_of"));
}

#[test]
fn head_arguments_are_normalized_last() {
    let p = ok("input q(bv[32])\noutput p(bv[32])\np(N + 1) :- q(N).");
    let c = &p.clauses[0];
    assert_eq!(c.head.args, vec![Name::from("$0")]);
    let Premise::Eq { var, rhs, .. } = c.body.last().unwrap() else { panic!() };
    assert_eq!(&**var, "$0");
    assert!(matches!(rhs, Expr::Op(Op::Add, _, _)));
}

#[test]
fn disequality_premise_keeps_the_variable_side() {
    let p = ok("input q(bv[32])\noutput p(bv[32])\np(X) :- q(X), X != 3.");
    let c = &p.clauses[0];
    let Premise::NegEq { var, rhs, .. } = &c.body[1] else { panic!("{:?}", c.body[1]) };
    assert_eq!(&**var, "X");
    assert!(matches!(rhs, Expr::Const(Constant::Bv32(3), _)));
}

#[test]
fn negated_equality_of_compounds_pivots_through_a_fresh_variable() {
    let p = ok("input q(bv[32])\noutput p(bv[32])\np(X) :- q(X), !(X + 1 = X + 2).");
    let c = &p.clauses[0];
    assert_eq!(c.body.len(), 3);
    assert!(matches!(&c.body[1], Premise::Eq { var, .. } if &**var == "$0"));
    assert!(matches!(&c.body[2], Premise::NegEq { var, .. } if &**var == "$0"));
}

#[test]
fn fact_constants_bind_through_trailing_equalities() {
    let p = ok("output e(bv[32], bv[32])\ne(1, 2).\ne(2, 3).");
    assert_eq!(p.clauses.len(), 2);
    let c = &p.clauses[0];
    assert_eq!(c.head.args, vec![Name::from("$0"), Name::from("$1")]);
    assert_eq!(c.body.len(), 2);
    assert!(matches!(&c.body[0], Premise::Eq { var, rhs: Expr::Const(Constant::Bv32(1), _), .. } if &**var == "$0"));
    assert!(matches!(&c.body[1], Premise::Eq { var, rhs: Expr::Const(Constant::Bv32(2), _), .. } if &**var == "$1"));
}

#[test]
fn rules_cannot_target_input_relations() {
    let ds = err("input p(bv[32])\ninput q(bv[32])\np(X) :- q(X).");
    assert!(has_msg(&ds, "cannot derive into input relation"), "{ds:?}");
}

#[test]
fn quoted_constructor_applications_unquote_rule_variables() {
    let p = ok("type bt = | leaf(bv[32])\n\
                input q(bv[32])\n\
                output w(bt smt)\n\
                w(F) :- q(X), F = `leaf(X)`.");
    let c = &p.clauses[0];
    let Premise::Eq { rhs: Expr::Quote(Formula::Node(node, _), _), .. } = &c.body[1] else {
        panic!("{:?}", c.body[1])
    };
    let SmtNode::Ctor(n, kids) = &**node else { panic!("{node:?}") };
    assert_eq!(&**n, "leaf");
    assert!(matches!(&kids[0], Formula::Unquote(e) if matches!(&**e, Expr::Var(v, _) if &**v == "X")));
}

#[test]
fn smt_variables_parse_outside_quotes() {
    let p = ok("fun f : bool sym = #y[bool]");
    let Expr::SmtVar { name, ty, .. } = &fun(&p, "f").body else { panic!() };
    assert!(matches!(&**name, Expr::Const(Constant::Str(s), _) if &**s == "y"));
    assert_eq!(*ty, PreType::Base(Base::Bool));
    assert_eq!(fun(&p, "f").ret, Type::Sym(PreType::Base(Base::Bool)));
}

#[test]
fn formula_operators_lower_to_tagged_nodes() {
    let p = ok("fun f : bool smt = `bv_const[64](9) #= #n[bv[64]] /\\ ~false`");
    let Expr::Quote(Formula::Node(node, _), _) = &fun(&p, "f").body else { panic!() };
    // `/\` binds tighter than nothing here: `(bv_const #= #n) /\ ~false`.
    let SmtNode::Op(SmtOp::AndOp, kids) = &**node else { panic!("{node:?}") };
    let Formula::Node(eq, _) = &kids[0] else { panic!() };
    let SmtNode::Op(SmtOp::SmtEq, eqkids) = &**eq else { panic!("{eq:?}") };
    assert!(matches!(&eqkids[0], Formula::Node(n, _) if matches!(&**n, SmtNode::Op(SmtOp::BvConst(64), _))));
    assert!(matches!(&kids[1], Formula::Node(n, _) if matches!(&**n, SmtNode::Op(SmtOp::Not, _))));
}

#[test]
fn implication_associates_right_and_binds_loosest() {
    let p = ok("fun f : bool smt = `true ==> false ==> true \\/ false`");
    let Expr::Quote(Formula::Node(node, _), _) = &fun(&p, "f").body else { panic!() };
    let SmtNode::Op(SmtOp::Imp, kids) = &**node else { panic!("{node:?}") };
    let Formula::Node(rhs, _) = &kids[1] else { panic!() };
    let SmtNode::Op(SmtOp::Imp, inner) = &**rhs else { panic!("{rhs:?}") };
    assert!(matches!(&inner[1], Formula::Node(n, _) if matches!(&**n, SmtNode::Op(SmtOp::OrOp, _))));
}

#[test]
fn quantifiers_take_binder_lists_and_patterns() {
    let p = ok("uninterpreted fun pick(bv[32] smt) : bool smt\n\
                fun f : bool smt = `forall #a[bv[32]] : pick(#a[bv[32]]). pick(#a[bv[32]]) ==> true`");
    let Expr::Quote(Formula::Node(node, _), _) = &fun(&p, "f").body else { panic!() };
    let SmtNode::Quant { kind, binders, patterns, body } = &**node else { panic!("{node:?}") };
    assert_eq!(*kind, QuantKind::Forall);
    assert_eq!(binders.len(), 1);
    assert_eq!(patterns.len(), 1);
    assert!(matches!(&patterns[0], Formula::Node(n, _) if matches!(&**n, SmtNode::Uf(u, _) if &**u == "pick")));
    // The body extends as far right as possible.
    assert!(matches!(body, Formula::Node(n, _) if matches!(&**n, SmtNode::Op(SmtOp::Imp, _))));
}

#[test]
fn testers_and_getters_resolve_against_constructors() {
    let p = ok("fun f(L: bv[32] list smt) : bool smt = `#is_cons(L) /\\ #cons_1(L) #= bv_const[32](0)`");
    let Expr::Quote(Formula::Node(node, _), _) = &fun(&p, "f").body else { panic!() };
    let SmtNode::Op(SmtOp::AndOp, kids) = &**node else { panic!("{node:?}") };
    assert!(matches!(&kids[0], Formula::Node(n, _) if matches!(&**n, SmtNode::Tester(c, _) if &**c == "cons")));
    let Formula::Node(eq, _) = &kids[1] else { panic!() };
    let SmtNode::Op(SmtOp::SmtEq, eqkids) = &**eq else { panic!() };
    assert!(matches!(&eqkids[0], Formula::Node(n, _) if matches!(&**n, SmtNode::Getter(c, 1, _) if &**c == "cons")));
}

#[test]
fn getter_indices_are_bounds_checked() {
    let ds = err("fun f(L: bv[32] list smt) : bool smt = `#is_nil(#cons_3(L))`");
    assert!(has_msg(&ds, "cons"), "{ds:?}");
}

#[test]
fn record_types_declare_one_constructor_and_field_getters() {
    let p = ok("type state = { node: bv[32]; flag: bool }\n\
                fun mk : state = { flag = true; node = 0 }\n\
                fun touch(S: state) : state = { S with flag = false }");
    let adt = &p.decls.adts["state"];
    assert_eq!(adt.ctors.len(), 1);
    assert_eq!(&*adt.ctors[0].name, "state");
    assert_eq!(adt.ctors[0].args.len(), 2);

    // Literal fields are reordered into declaration order.
    let Expr::Ctor(n, args, _) = &fun(&p, "mk").body else { panic!() };
    assert_eq!(&**n, "state");
    assert!(matches!(&args[0], Expr::Const(Constant::Bv32(0), _)));
    assert!(matches!(&args[1], Expr::Const(Constant::Bool(true), _)));

    // Each field name becomes a projection function.
    let getter = fun(&p, "node");
    assert_eq!(getter.params.len(), 1);
    assert_eq!(getter.ret, Type::bv(32));
    let Expr::Match(_, arms, _) = &getter.body else { panic!() };
    let Pattern::Ctor(c, pats, _) = &arms[0].pat else { panic!() };
    assert_eq!(&**c, "state");
    let Pattern::Var(v, _) = &pats[0] else { panic!("field slot binds: {:?}", pats[0]) };
    assert!(matches!(&arms[0].body, Expr::Var(b, _) if b == v));
    assert!(matches!(&pats[1], Pattern::Wild(_)));

    // An update rebinds every field and rebuilds the constructor.
    let Expr::Match(scrut, arms, _) = &fun(&p, "touch").body else { panic!() };
    assert!(matches!(&**scrut, Expr::Var(s, _) if &**s == "S"));
    let Pattern::Ctor(_, pats, _) = &arms[0].pat else { panic!() };
    let Expr::Ctor(_, rebuilt, _) = &arms[0].body else { panic!() };
    let Pattern::Var(keep, _) = &pats[0] else { panic!() };
    assert!(matches!(&rebuilt[0], Expr::Var(k, _) if k == keep));
    assert!(matches!(&rebuilt[1], Expr::Const(Constant::Bool(false), _)));
}

#[test]
fn ambiguous_record_field_sets_are_rejected() {
    let ds = err("type a = { x: bool; y: bool }\ntype b = { y: bool; x: bool }");
    assert!(has_msg(&ds, "ambiguous"), "{ds:?}");
}

#[test]
fn local_functions_lift_to_top_level_with_captures() {
    let p = ok("fun host(k: bv[32]) : bv[32] = let fun addk(x: bv[32]) : bv[32] = x + k in addk(2)");
    let lifted = fun(&p, "addk$0");
    assert_eq!(lifted.params.len(), 2, "declared parameter plus one capture");
    assert_eq!(&*lifted.params[1].0, "k");
    assert_eq!(lifted.params[1].1, Type::Var("'$c0".into()));
    let sig = &p.sigs.functions["addk$0"];
    assert_eq!(sig.params.len(), 2);
    // The call site passes the capture explicitly.
    let Expr::Fun(n, args, _) = &fun(&p, "host").body else { panic!("{:?}", fun(&p, "host").body) };
    assert_eq!(&**n, "addk$0");
    assert_eq!(args.len(), 2);
    assert!(matches!(&args[1], Expr::Var(v, _) if &**v == "k"));
}

#[test]
fn local_functions_without_captures_lift_cleanly() {
    let p = ok("fun host(b: bool) : bv[32] = let fun b2i(x: bool) : bv[32] = if x then 1 else 0 in b2i(b)");
    let lifted = fun(&p, "b2i$0");
    assert_eq!(lifted.params.len(), 1);
    assert!(matches!(&lifted.body, Expr::If(..)));
    assert!(matches!(&fun(&p, "host").body, Expr::Fun(n, args, _) if &**n == "b2i$0" && args.len() == 1));
}

#[test]
fn let_patterns_become_single_arm_matches() {
    let p = ok("input q(bv[32] * bool)\noutput p(bv[32])\n\
                p(X) :- q(Pair), X = let (V, _) = Pair in V + 1.");
    let c = &p.clauses[0];
    let Premise::Eq { rhs: Expr::Match(scrut, arms, _), .. } = &c.body[1] else {
        panic!("{:?}", c.body[1])
    };
    assert!(matches!(&**scrut, Expr::Var(v, _) if &**v == "Pair"));
    assert_eq!(arms.len(), 1);
    let Pattern::Ctor(t, pats, _) = &arms[0].pat else { panic!() };
    assert_eq!(&**t, "tuple2");
    assert!(matches!(&pats[0], Pattern::Var(v, _) if &**v == "V"));
    assert!(matches!(&pats[1], Pattern::Wild(_)));
}

#[test]
fn cons_and_list_sugar_share_one_spine() {
    let p = ok("fun f : bv[32] list = 1 :: [2, 3]");
    let Expr::Ctor(c0, args, _) = &fun(&p, "f").body else { panic!() };
    assert_eq!(&**c0, "cons");
    assert!(matches!(&args[0], Expr::Const(Constant::Bv32(1), _)));
    let Expr::Ctor(c1, args1, _) = &args[1] else { panic!() };
    assert_eq!(&**c1, "cons");
    let Expr::Ctor(c2, args2, _) = &args1[1] else { panic!() };
    assert_eq!(&**c2, "cons");
    assert!(matches!(&args2[1], Expr::Ctor(nil, a, _) if &**nil == "nil" && a.is_empty()));
}

#[test]
fn cons_binds_tighter_than_comparison() {
    // `X :: Y < Z` reads `(X :: Y) < Z`; comparisons do not chain.
    let p = ok("fun f(x: bv[32], y: bv[32] list, z: bv[32] list) : bool = x :: y < z");
    let Expr::Op(Op::Lt, args, _) = &fun(&p, "f").body else { panic!() };
    assert!(matches!(&args[0], Expr::Ctor(c, _, _) if &**c == "cons"));
    let ds = err("fun g(x: bv[32]) : bool = x < x < x");
    assert!(!ds.is_empty());
}

#[test]
fn match_arms_keep_textual_order() {
    let p = ok("fun f(l: bv[32] list) : bv[32] = match l with | cons(h, _) => h | _ => 0 end");
    let Expr::Match(_, arms, _) = &fun(&p, "f").body else { panic!() };
    assert_eq!(arms.len(), 2);
    assert!(matches!(&arms[0].pat, Pattern::Ctor(c, _, _) if &**c == "cons"));
    assert!(matches!(&arms[1].pat, Pattern::Wild(_)));
}

#[test]
fn negative_literals_reach_the_signed_minimum() {
    let p = ok("fun a : i32 = -2147483648\nfun b : i64 = -9223372036854775808L\nfun c : i32 = -(-2147483647)");
    assert!(matches!(&fun(&p, "a").body, Expr::Const(Constant::Bv32(i32::MIN), _)));
    assert!(matches!(&fun(&p, "b").body, Expr::Const(Constant::Bv64(i64::MIN), _)));
    assert!(matches!(&fun(&p, "c").body, Expr::Op(Op::Neg, _, _)));
    let ds = err("fun d : i32 = 2147483648");
    assert!(has_msg(&ds, "out of range"), "{ds:?}");
}

#[test]
fn predicates_apply_as_functions_with_holes_and_projections() {
    let p = ok("input e(bv[32], bv[32])\n\
                fun outs(x: bv[32]) : bv[32] list = e(x, ??)\n\
                fun hit(x: bv[32]) : bool = e(x, _)");
    let Expr::RelCall(r, args, _) = &fun(&p, "outs").body else { panic!() };
    assert_eq!(&**r, "e");
    assert!(matches!(&args[0], RelArg::Expr(_)));
    assert!(matches!(&args[1], RelArg::Project(_)));
    let Expr::RelCall(_, args, _) = &fun(&p, "hit").body else { panic!() };
    assert!(matches!(&args[1], RelArg::Hole(_)));
}

#[test]
fn holes_outside_relation_arguments_are_rejected() {
    let ds = err("type t = | mk(bv[32])\nfun f : t = mk(??)");
    assert!(has_msg(&ds, "only meaningful as a relation argument"), "{ds:?}");
    let ds = err("fun f : bool = _");
    assert!(has_msg(&ds, "only meaningful inside a rule"), "{ds:?}");
}

#[test]
fn uninterpreted_declarations_register_sorts_and_functions() {
    let p = ok("uninterpreted sort blob\n\
                uninterpreted fun seal(blob smt, bv[64] smt) : blob smt\n\
                fun f(b: blob sym) : bool smt = `seal(b, bv_const[64](1)) #= b`");
    assert!(p.decls.adts["blob"].uninterpreted);
    let uf = &p.sigs.ufs["seal"];
    assert_eq!(uf.args.len(), 2);
    assert_eq!(uf.ret, PreType::Adt("blob".into(), vec![]));
    let Expr::Quote(Formula::Node(node, _), _) = &fun(&p, "f").body else { panic!() };
    let SmtNode::Op(SmtOp::SmtEq, kids) = &**node else { panic!("{node:?}") };
    assert!(matches!(&kids[0], Formula::Node(n, _) if matches!(&**n, SmtNode::Uf(u, _) if &**u == "seal")));
}

#[test]
fn uninterpreted_functions_do_not_call_outside_formulas() {
    let ds = err("uninterpreted sort blob\n\
                  uninterpreted fun seal(blob smt, bv[64] smt) : blob smt\n\
                  fun f(b: blob sym, q: bv[64] smt) : blob smt = seal(b, q)");
    assert!(has_msg(&ds, "appears only inside"), "{ds:?}");
}

#[test]
fn solver_operators_keep_their_arities() {
    let p = ok("fun f(q: bool smt) : bool = is_sat(q)\n\
                fun g(q: bool smt) : model option = get_model([q], none)\n\
                fun h(q: bool smt) : bool option = is_sat_opt([q], some(100))");
    assert!(matches!(&fun(&p, "f").body, Expr::Op(Op::IsSat, args, _) if args.len() == 1));
    assert!(matches!(&fun(&p, "g").body, Expr::Op(Op::GetModel, args, _) if args.len() == 2));
    assert!(matches!(&fun(&p, "h").body, Expr::Op(Op::IsSatOpt, args, _) if args.len() == 2));
    let ds = err("fun f(q: bool smt) : bool = is_sat(q, q)");
    assert!(has_msg(&ds, "expects"), "{ds:?}");
}

#[test]
fn function_symbols_cannot_be_quoted() {
    let ds = err("fun double(x: bv[32]) : bv[32] = x + x\n\
                  fun f : bv[32] smt = `double(bv_const[32](1))`");
    assert!(has_msg(&ds, "cannot be called inside a formula"), "{ds:?}");
}

#[test]
fn type_variables_generalize_function_signatures() {
    let p = ok("fun len(l: 'a list) : bv[32] = match l with | nil => 0 | cons(_, t) => 1 + len(t) end");
    let sig = &p.sigs.functions["len"];
    assert_eq!(sig.type_params, vec![Name::from("'a")]);
    assert_eq!(sig.params[0], Type::Adt("list".into(), vec![Type::Var("'a".into())]));
}

#[test]
fn duplicate_callable_names_collide() {
    let ds = err("type t = | foo\nfun foo : bool = true");
    assert!(has_msg(&ds, "already defined"), "{ds:?}");
    let ds = err("type t = | smt_and(bool)");
    assert!(has_msg(&ds, "built-in"), "{ds:?}");
}

#[test]
fn lowercase_unknowns_inside_clauses_stay_errors() {
    let ds = err("input q(bv[32])\noutput p(bv[32])\np(X) :- q(X), X = y.");
    assert!(has_msg(&ds, "unbound"), "{ds:?}");
}

#[test]
fn comments_nest_and_strings_escape() {
    let p = ok("(* outer (* inner *) still out *)\nfun f : string = \"a\\tb\\\"c\\n\"");
    let Expr::Const(Constant::Str(s), _) = &fun(&p, "f").body else { panic!() };
    assert_eq!(&**s, "a\tb\"c\n");
}

#[test]
fn multi_file_programs_share_one_namespace() {
    let (_map, res) = flg_parse::load_program(&[
        ("defs.flg", "type color = | red | blue\noutput likes(color)"),
        ("rules.flg", "likes(red)."),
    ]);
    let p = res.expect("two files lower together");
    assert_eq!(p.clauses.len(), 1);
    assert_eq!(&*p.clauses[0].head.pred, "likes");
}

#[test]
fn parse_errors_carry_their_file() {
    let (map, res) = flg_parse::load_program(&[("ok.flg", "output p(bool)"), ("bad.flg", "fun = 3")]);
    let ds = res.expect_err("second file is malformed");
    let rendered = ds[0].render(&map);
    assert!(rendered.contains("bad.flg:"), "{rendered}");
}
