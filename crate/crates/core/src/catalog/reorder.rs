//! Statement reordering and dead-code removal.
//!
//! Within each block, two statements keep their relative order when they
//! touch a common location with at least one write, when both are ordered
//! (impure, faulting, looping or transferring control), or when one
//! declares a name the other mentions through a different binding. All
//! other pairs are free and are sorted by a canonical key.

use std::collections::BTreeSet;

use super::effects::{summarize, Summary};
use super::query::{refs_to, stmt_of};
use crate::cpg::Cpg;
use crate::frontend::ast::{Ast, NodeId, NodeKind};
use crate::frontend::canon::{canonical_node, structural};
use crate::linearize::{tokens_of, Mode};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct StmtKey {
    tokens: Vec<u8>,
    size: usize,
    shape: String,
    text: String,
    index: usize,
}

fn stmt_key(ast: &Ast, s: NodeId, index: usize) -> StmtKey {
    StmtKey {
        tokens: tokens_of(ast, s, Mode::Eog).into_iter().map(|t| t.id()).collect(),
        size: ast.subtree_size(s),
        shape: structural(ast, s),
        text: canonical_node(ast, s),
        index,
    }
}

/// A declaration in `a` whose name `b` mentions under another binding.
fn name_clash(ast: &Ast, a: NodeId, b: NodeId) -> bool {
    if ast.kind(a) != NodeKind::LocalVarDecl {
        return false;
    }
    let name = ast.name(a);
    ast.preorder(b).into_iter().any(|n| match ast.kind(n) {
        NodeKind::NameRef => ast.name(n) == name && ast.decl(n) != Some(a),
        NodeKind::LocalVarDecl => ast.name(n) == name,
        _ => false,
    })
}

fn must_precede(ast: &Ast, sums: &[Summary], stmts: &[NodeId], i: usize, j: usize) -> bool {
    sums[i].conflicts(&sums[j]) || name_clash(ast, stmts[i], stmts[j]) || name_clash(ast, stmts[j], stmts[i])
}

/// Dependency-respecting order of a statement list (Kahn, smallest key
/// first).
pub fn sorted_order(ast: &Ast, stmts: &[NodeId]) -> Vec<NodeId> {
    let n = stmts.len();
    let sums: Vec<Summary> = stmts.iter().map(|s| summarize(ast, *s)).collect();
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if must_precede(ast, &sums, stmts, i, j) {
                succ[i].push(j);
                indeg[j] += 1;
            }
        }
    }
    let keys: Vec<StmtKey> = stmts.iter().enumerate().map(|(i, s)| stmt_key(ast, *s, i)).collect();
    let mut ready: BTreeSet<(StmtKey, usize)> = (0..n).filter(|i| indeg[*i] == 0).map(|i| (keys[i].clone(), i)).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(first) = ready.pop_first() {
        let i = first.1;
        out.push(stmts[i]);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.insert((keys[j].clone(), j));
            }
        }
    }
    out
}

/// Sorts every block. Returns true if any block changed.
pub fn reorder(cpg: &mut Cpg) -> bool {
    let blocks: Vec<NodeId> = cpg.ast.live_nodes().into_iter().filter(|n| cpg.ast.kind(*n) == NodeKind::Block).collect();
    let mut changed = false;
    for b in blocks {
        let stmts = cpg.ast.children(b).to_vec();
        if stmts.len() < 2 {
            continue;
        }
        let order = sorted_order(&cpg.ast, &stmts);
        if order != stmts {
            cpg.ast.node_mut(b).children = order;
            changed = true;
        }
    }
    if changed {
        cpg.rebuild();
    }
    changed
}

fn is_sink(ast: &Ast, s: NodeId) -> bool {
    match ast.kind(s) {
        NodeKind::WhileStmt | NodeKind::ForStmt => true,
        NodeKind::IfStmt => summarize(ast, ast.children(s)[0]).ordered(),
        NodeKind::Block => false,
        _ => {
            let sum = summarize(ast, s);
            sum.ordered() || sum.writes_field()
        }
    }
}

/// Parts of a live statement whose reads keep their definitions alive.
fn used_parts(ast: &Ast, s: NodeId) -> Vec<NodeId> {
    let kids = ast.children(s);
    match ast.kind(s) {
        NodeKind::IfStmt | NodeKind::WhileStmt => vec![kids[0]],
        NodeKind::ForStmt => vec![kids[1]],
        _ => vec![s],
    }
}

/// Statements with a transitive data dependency to an observable effect.
pub fn live_statements(cpg: &Cpg) -> BTreeSet<NodeId> {
    let ast = &cpg.ast;
    let mut live = BTreeSet::new();
    let mut work: Vec<NodeId> = Vec::new();
    for c in ast.callables() {
        for n in ast.preorder(c) {
            if ast.kind(n).is_statement() && is_sink(ast, n) {
                work.push(n);
            }
        }
    }
    while let Some(s) = work.pop() {
        if !live.insert(s) {
            continue;
        }
        if ast.kind(s) == NodeKind::ForStmt {
            let kids = ast.children(s);
            work.push(kids[0]);
            work.push(kids[2]);
        }
        for a in ast.ancestors(s) {
            if matches!(ast.kind(a), NodeKind::IfStmt | NodeKind::WhileStmt | NodeKind::ForStmt) {
                work.push(a);
            }
        }
        for part in used_parts(ast, s) {
            for n in ast.preorder(part) {
                for d in cpg.ddg.defs(n) {
                    if let Some(ds) = stmt_of(ast, d) {
                        work.push(ds);
                    }
                }
            }
        }
    }
    live
}

/// One removal sweep; returns true if something was removed.
pub fn prune_once(cpg: &mut Cpg) -> bool {
    let live = live_statements(cpg);
    let ast = &mut cpg.ast;
    let mut changed = false;
    let candidates: Vec<NodeId> = ast
        .live_nodes()
        .into_iter()
        .filter(|n| ast.enclosing_callable(*n).is_some())
        .filter(|n| ast.parent(*n).is_some_and(|p| ast.kind(p) == NodeKind::Block))
        .collect();
    for s in candidates {
        if !ast.contains(s) || ast.parent(s).is_none() {
            continue;
        }
        match ast.kind(s) {
            NodeKind::Block if ast.children(s).is_empty() => {
                ast.remove_subtree(s);
                changed = true;
            }
            NodeKind::LocalVarDecl if !live.contains(&s) => {
                if refs_to(ast, s).is_empty() {
                    ast.remove_subtree(s);
                    changed = true;
                } else if let Some(init) = ast.child(s, 0) {
                    ast.remove_subtree(init);
                    changed = true;
                }
            }
            NodeKind::Assign | NodeKind::ExprStmt | NodeKind::IfStmt if !live.contains(&s) => {
                ast.remove_subtree(s);
                changed = true;
            }
            _ => {}
        }
    }
    if changed {
        ast.collect_garbage();
        cpg.rebuild();
    }
    changed
}

pub fn prune(cpg: &mut Cpg) -> bool {
    let mut any = false;
    while prune_once(cpg) {
        any = true;
    }
    any
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::canon::canonical;
    use crate::frontend::load_str;
    use crate::frontend::printer::print_all;

    fn run(src: &str) -> Cpg {
        let mut cpg = Cpg::build(load_str(src).unwrap());
        prune(&mut cpg);
        reorder(&mut cpg);
        cpg
    }

    #[test]
    fn independent_orders_converge() {
        let a = run("void f() { int a = 1; int b = 2; println(b); println(a); }");
        let b = run("void f() { int b = 2; int a = 1; println(b); println(a); }");
        assert_eq!(canonical(&a.ast), canonical(&b.ast));
    }

    #[test]
    fn unused_declaration_removed() {
        let c = run("void f() { int unused = 5; println(1); }");
        assert!(!print_all(&c.ast).contains("unused"));
    }

    #[test]
    fn overwritten_pure_assignment_removed() {
        let c = run("void f() { double x = 0.0; x = sqrt(2.0); x = 3.0; println(x); }");
        let text = print_all(&c.ast);
        assert!(!text.contains("sqrt"), "{text}");
        assert!(text.contains("x = 3.0"));
    }

    #[test]
    fn impure_statements_keep_order() {
        let c = run("void f() { println(2); println(1); String s = readLine(); println(s); }");
        let text = print_all(&c.ast);
        let p2 = text.find("println(2)").unwrap();
        let p1 = text.find("println(1)").unwrap();
        let r = text.find("readLine").unwrap();
        assert!(p2 < p1 && p1 < r);
    }

    #[test]
    fn loops_and_guards_stay() {
        let c = run("void f(int n) { int i = 0; int k = 7; while (i < n) { if (i > 2) { println(i); } i = i + 1; } }");
        let text = print_all(&c.ast);
        assert!(!text.contains("k = 7"));
        assert!(text.contains("if (i > 2)") && text.contains("i = i + 1"));
    }

    #[test]
    fn faulting_statement_is_kept() {
        let c = run("void f(int a, int b) { int q = a / b; println(1); }");
        assert!(print_all(&c.ast).contains("a / b"));
    }

    #[test]
    fn dead_if_removed() {
        let c = run("void f(int a) { int x = 0; if (a > 1) { x = 2; } println(a); }");
        assert!(!print_all(&c.ast).contains("if"));
    }

    #[test]
    fn sibling_scopes_block_reordering() {
        let c = run("void f() { { int x = 1; println(x); } int x = 2; println(x); }");
        let text = print_all(&c.ast);
        assert!(text.find("x = 1").unwrap() < text.find("x = 2").unwrap());
    }
}
