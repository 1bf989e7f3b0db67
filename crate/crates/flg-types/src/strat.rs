//! Stratification: the relation dependency graph, its condensation, and the
//! evaluation order. An edge is negative when the dependency passes through
//! negation or through an expression (function calls included), since such a
//! dependency needs the callee's world to be complete.

use flg_core::diag::{Diagnostic, Span};
use flg_core::term::{Expr, Formula, Premise, Program, RelArg, SmtNode};
use flg_core::Name;
use petgraph::graph::{Graph, NodeIndex};
use std::collections::{BTreeMap, BTreeSet};

/// Relations reachable from each function body, transitively through calls.
pub(crate) fn function_relations(prog: &Program) -> BTreeMap<Name, BTreeSet<Name>> {
    let mut rels: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
    let mut calls: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
    for (f, def) in &prog.functions {
        let mut r = BTreeSet::new();
        let mut c = BTreeSet::new();
        expr_deps(&def.body, &mut r, &mut c);
        rels.insert(f.clone(), r);
        calls.insert(f.clone(), c);
    }
    // Close over the call graph; the loop is quadratic in the worst case but
    // function counts are small.
    loop {
        let mut changed = false;
        for (f, cs) in &calls {
            let mut add = BTreeSet::new();
            for g in cs {
                if let Some(gr) = rels.get(g) {
                    add.extend(gr.iter().cloned());
                }
            }
            let r = rels.get_mut(f).unwrap();
            for a in add {
                changed |= r.insert(a);
            }
        }
        if !changed {
            break;
        }
    }
    rels
}

/// Relations referenced and functions called, directly, in one expression.
pub(crate) fn expr_deps(e: &Expr, rels: &mut BTreeSet<Name>, funs: &mut BTreeSet<Name>) {
    match e {
        Expr::Var(..) | Expr::Const(..) => {}
        Expr::Ctor(_, args, _) | Expr::Op(_, args, _) => {
            for a in args {
                expr_deps(a, rels, funs);
            }
        }
        Expr::Fun(f, args, _) => {
            funs.insert(f.clone());
            for a in args {
                expr_deps(a, rels, funs);
            }
        }
        Expr::RelCall(r, args, _) => {
            rels.insert(r.clone());
            for a in args {
                if let RelArg::Expr(e) = a {
                    expr_deps(e, rels, funs);
                }
            }
        }
        Expr::Let(_, bound, body, _) => {
            expr_deps(bound, rels, funs);
            expr_deps(body, rels, funs);
        }
        Expr::If(c, t, e2, _) => {
            expr_deps(c, rels, funs);
            expr_deps(t, rels, funs);
            expr_deps(e2, rels, funs);
        }
        Expr::Match(scrut, arms, _) => {
            expr_deps(scrut, rels, funs);
            for arm in arms {
                expr_deps(&arm.body, rels, funs);
            }
        }
        Expr::Quote(f, _) => formula_deps(f, rels, funs),
        Expr::SmtVar { name, .. } => expr_deps(name, rels, funs),
    }
}

fn formula_deps(f: &Formula, rels: &mut BTreeSet<Name>, funs: &mut BTreeSet<Name>) {
    match f {
        Formula::Unquote(e) => expr_deps(e, rels, funs),
        Formula::Node(node, _) => match &**node {
            SmtNode::Var { name, .. } => formula_deps(name, rels, funs),
            SmtNode::ConstK(_) => {}
            SmtNode::Ctor(_, kids) | SmtNode::Op(_, kids) | SmtNode::Uf(_, kids) => {
                for k in kids {
                    formula_deps(k, rels, funs);
                }
            }
            SmtNode::Let { var, bound, body } => {
                formula_deps(var, rels, funs);
                formula_deps(bound, rels, funs);
                formula_deps(body, rels, funs);
            }
            SmtNode::Quant { binders, patterns, body, .. } => {
                for b in binders {
                    formula_deps(b, rels, funs);
                }
                for p in patterns {
                    formula_deps(p, rels, funs);
                }
                formula_deps(body, rels, funs);
            }
            SmtNode::Tester(_, kid) | SmtNode::Getter(_, _, kid) => {
                formula_deps(kid, rels, funs)
            }
        },
    }
}

/// Computes the strata, or the stratification violations.
///
/// Each stratum is one strongly connected component of the dependency graph,
/// listed callees-first; members are sorted by name. A negative edge inside a
/// component is a violation.
pub(crate) fn stratify_impl(prog: &Program) -> Result<Vec<Vec<Name>>, Vec<Diagnostic>> {
    let fun_rels = function_relations(prog);
    let mut g: Graph<Name, bool> = Graph::new();
    let mut idx: BTreeMap<Name, NodeIndex> = BTreeMap::new();
    for r in prog.sigs.relations.keys() {
        idx.insert(r.clone(), g.add_node(r.clone()));
    }
    // (from, to, negative) -> span of a premise that witnesses the edge.
    let mut edges: BTreeMap<(Name, Name, bool), Span> = BTreeMap::new();
    for clause in &prog.clauses {
        let h = &clause.head.pred;
        if !idx.contains_key(h) {
            continue;
        }
        let add = |to: &Name, neg: bool, span: Span, edges: &mut BTreeMap<_, Span>| {
            if idx.contains_key(to) {
                edges.entry((h.clone(), to.clone(), neg)).or_insert(span);
            }
        };
        for prem in &clause.body {
            match prem {
                Premise::Pos(a) => add(&a.pred, false, a.span, &mut edges),
                Premise::Neg(a) => add(&a.pred, true, a.span, &mut edges),
                Premise::Eq { rhs, span, .. } | Premise::NegEq { rhs, span, .. } => {
                    let mut rels = BTreeSet::new();
                    let mut funs = BTreeSet::new();
                    expr_deps(rhs, &mut rels, &mut funs);
                    for f in &funs {
                        if let Some(fr) = fun_rels.get(f) {
                            rels.extend(fr.iter().cloned());
                        }
                    }
                    for r in rels {
                        add(&r, true, *span, &mut edges);
                    }
                }
            }
        }
    }
    for ((from, to, neg), span) in &edges {
        g.add_edge(idx[from], idx[to], *neg);
        let _ = span;
    }
    let sccs = petgraph::algo::tarjan_scc(&g);
    let mut comp = vec![0usize; g.node_count()];
    for (i, scc) in sccs.iter().enumerate() {
        for n in scc {
            comp[n.index()] = i;
        }
    }
    let mut diags = Vec::new();
    for ((from, to, neg), span) in &edges {
        if *neg && comp[idx[from].index()] == comp[idx[to].index()] {
            let members: Vec<String> = {
                let mut m: Vec<String> = sccs[comp[idx[from].index()]]
                    .iter()
                    .map(|n| g[*n].to_string())
                    .collect();
                m.sort();
                m
            };
            diags.push(Diagnostic::error(
                "stratification",
                format!(
                    "relation `{from}` depends negatively on `{to}` inside the recursive component {{{}}}",
                    members.join(", ")
                ),
                *span,
            ));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(sccs
        .into_iter()
        .map(|scc| {
            let mut names: Vec<Name> = scc.into_iter().map(|n| g[n].clone()).collect();
            names.sort();
            names
        })
        .collect())
}
