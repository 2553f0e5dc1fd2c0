//! Lookups shared by the catalog predicates.

use std::collections::{BTreeSet, HashSet};

use crate::cpg::ddg::{def_loc, is_assign_target};
use crate::cpg::{Cpg, Loc};
use crate::evalx::interp::entry_point;
use crate::frontend::ast::{Ast, NodeId, NodeKind, Type};
use crate::frontend::types::{builtin_of, is_class_ref};

/// Every node linked to `decl` (name refs, field accesses, calls, `new`).
pub fn refs_to(ast: &Ast, decl: NodeId) -> Vec<NodeId> {
    ast.live_nodes().into_iter().filter(|n| ast.decl(*n) == Some(decl)).collect()
}

pub fn is_increment_operand(ast: &Ast, r: NodeId) -> bool {
    ast.parent(r).is_some_and(|p| {
        ast.kind(p) == NodeKind::UnaryOp && ast.attrs(p).op.is_some_and(|o| o.is_increment())
    })
}

/// A plain read: neither assigned nor incremented.
pub fn is_read(ast: &Ast, r: NodeId) -> bool {
    !is_assign_target(ast, r) && !is_increment_operand(ast, r)
}

/// Nearest enclosing non-block statement, the node itself included.
pub fn stmt_of(ast: &Ast, n: NodeId) -> Option<NodeId> {
    std::iter::once(n)
        .chain(ast.ancestors(n))
        .find(|a| ast.kind(*a).is_statement() && ast.kind(*a) != NodeKind::Block)
}

pub fn in_block(ast: &Ast, n: NodeId) -> bool {
    ast.parent(n).is_some_and(|p| ast.kind(p) == NodeKind::Block)
}

pub fn is_entry(ast: &Ast, m: NodeId) -> bool {
    entry_point(ast) == Some(m)
}

/// Whether a local or parameter called `name` exists in the callable
/// around `at`.
pub fn local_named(ast: &Ast, at: NodeId, name: &str) -> bool {
    let Some(c) = ast.enclosing_callable(at) else { return false };
    ast.preorder(c).into_iter().any(|n| {
        matches!(ast.kind(n), NodeKind::LocalVarDecl | NodeKind::ParamDecl) && ast.name(n) == Some(name)
    })
}

fn class_named(ast: &Ast, name: &str) -> Option<NodeId> {
    ast.classes().into_iter().find(|c| ast.name(*c) == Some(name))
}

fn field_named(ast: &Ast, class: NodeId, name: &str) -> Option<NodeId> {
    ast.children(class)
        .iter()
        .copied()
        .find(|m| ast.kind(*m) == NodeKind::FieldDecl && ast.name(*m) == Some(name))
}

/// True if a bare `name` written at `at` would resolve to `target`
/// (a field or class), following the resolver's lookup order.
pub fn bare_name_resolves(ast: &Ast, at: NodeId, name: &str, target: NodeId) -> bool {
    if local_named(ast, at, name) {
        return false;
    }
    let mut class = ast.enclosing_class(at);
    let mut first = true;
    while let Some(c) = class {
        if let Some(f) = field_named(ast, c, name) {
            return f == target && (first || ast.attrs(f).is_static);
        }
        first = false;
        class = ast.enclosing_class(c);
    }
    class_named(ast, name) == Some(target)
}

fn mentions(ty: &Type, class: &str) -> bool {
    match ty {
        Type::Class(n) => n == class,
        Type::Optional(inner) => mentions(inner, class),
        _ => false,
    }
}

/// Whether any declaration or creation names the class as a type.
pub fn type_mentioned(ast: &Ast, class: &str) -> bool {
    ast.live_nodes().into_iter().any(|n| {
        let a = ast.attrs(n);
        a.ty.as_ref().is_some_and(|t| mentions(t, class))
            || (ast.kind(n) == NodeKind::New && a.name.as_deref() == Some(class))
    })
}

/// Receiver that evaluates without effects or faults.
pub fn trivial_receiver(ast: &Ast, r: Option<NodeId>) -> bool {
    r.is_none_or(|r| ast.kind(r) == NodeKind::This || is_class_ref(ast, r))
}

/// Locations an EOG node writes; the flag covers user calls and `new`,
/// which may write any field.
fn node_writes(ast: &Ast, n: NodeId) -> (Option<Loc>, bool) {
    let all = match ast.kind(n) {
        NodeKind::Call => builtin_of(ast, n).is_none(),
        NodeKind::New => true,
        _ => false,
    };
    (def_loc(ast, n), all)
}

/// No node on any EOG path from `d` to `u` (not passing `d` again) writes
/// one of `inputs`.
pub fn clean_path(cpg: &Cpg, d: NodeId, u: NodeId, inputs: &BTreeSet<Loc>) -> bool {
    let Some(flow) = cpg.method_of(d).and_then(|m| cpg.eog.flow(m)) else { return false };
    let preds = flow.predecessors();
    let mut fwd = HashSet::new();
    let mut stack: Vec<NodeId> = flow.successors(d).iter().map(|e| e.dst).collect();
    while let Some(n) = stack.pop() {
        if n == d || !fwd.insert(n) {
            continue;
        }
        stack.extend(flow.successors(n).iter().map(|e| e.dst));
    }
    let mut bwd = HashSet::new();
    let mut stack = vec![u];
    while let Some(n) = stack.pop() {
        if n == d || !bwd.insert(n) {
            continue;
        }
        stack.extend(preds.get(&n).into_iter().flatten().copied());
    }
    let fields = inputs.iter().any(|l| matches!(l, Loc::Field(_)));
    fwd.intersection(&bwd).all(|n| {
        let (loc, all) = node_writes(&cpg.ast, *n);
        !(all && fields) && loc.is_none_or(|l| !inputs.contains(&l))
    })
}

/// `u` is reachable from `d` without taking a loop back edge.
pub fn reaches_forward(cpg: &Cpg, d: NodeId, u: NodeId) -> bool {
    let Some(flow) = cpg.method_of(d).and_then(|m| cpg.eog.flow(m)) else { return false };
    let mut seen = HashSet::new();
    let mut stack = vec![d];
    while let Some(n) = stack.pop() {
        if n == u {
            return true;
        }
        if !seen.insert(n) {
            continue;
        }
        stack.extend(flow.successors(n).iter().filter(|e| !e.back).map(|e| e.dst));
    }
    false
}

/// Fields read through a bare name would be captured by a local of the
/// same name at `at`.
pub fn field_names_visible(ast: &Ast, e: NodeId, at: NodeId) -> bool {
    ast.preorder(e).into_iter().all(|n| {
        if ast.kind(n) != NodeKind::NameRef {
            return true;
        }
        let Some(d) = ast.decl(n).and_then(|d| ast.get(d)) else { return true };
        d.kind != NodeKind::FieldDecl || !local_named(ast, at, ast.name(n).unwrap_or_default())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_str;

    fn find(ast: &Ast, kind: NodeKind, name: &str) -> NodeId {
        ast.live_nodes().into_iter().find(|n| ast.kind(*n) == kind && ast.name(*n) == Some(name)).unwrap()
    }

    #[test]
    fn intervening_write_blocks_path() {
        let cpg = Cpg::build(load_str("void f(int x) { int a = x; x = 5; println(a); }").unwrap());
        let d = find(&cpg.ast, NodeKind::LocalVarDecl, "a");
        let u = cpg.ast.live_nodes().into_iter().filter(|n| cpg.ast.name(*n) == Some("a")).last().unwrap();
        let x = find(&cpg.ast, NodeKind::ParamDecl, "x");
        assert!(!clean_path(&cpg, d, u, &BTreeSet::from([Loc::Local(x)])));
        assert!(clean_path(&cpg, d, u, &BTreeSet::new()));
        assert!(reaches_forward(&cpg, d, u));
    }

    #[test]
    fn loop_paths_count() {
        let src = "void f(int n) { int s = 0; int a = s; while (n > 0) { println(a); s = s + 1; n = n - 1; } }";
        let cpg = Cpg::build(load_str(src).unwrap());
        let d = find(&cpg.ast, NodeKind::LocalVarDecl, "a");
        let u = cpg.ast.live_nodes().into_iter().filter(|n| cpg.ast.name(*n) == Some("a")).last().unwrap();
        let s = find(&cpg.ast, NodeKind::LocalVarDecl, "s");
        assert!(!clean_path(&cpg, d, u, &BTreeSet::from([Loc::Local(s)])));
    }

    #[test]
    fn bare_names() {
        let ast = load_str("class A { int v; void m(int w) { println(w); } void k() { int v2 = 0; println(v2); } }").unwrap();
        let v = find(&ast, NodeKind::FieldDecl, "v");
        let m = find(&ast, NodeKind::MethodDecl, "m");
        let body = ast.body(m).unwrap();
        assert!(bare_name_resolves(&ast, body, "v", v));
        assert!(!bare_name_resolves(&ast, body, "w", v));
        assert!(type_mentioned(&ast, "A") == false);
    }
}
