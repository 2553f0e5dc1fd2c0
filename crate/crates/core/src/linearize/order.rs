//! Deterministic member ordering.
//!
//! Siblings (top-level items, or the members of one class) are sorted with
//! Kahn's algorithm over declaration references: if `a` refers to something
//! declared inside `b`, then `b` comes first. Among ready members the
//! smallest [`MemberKey`] wins; when only cycles remain, the smallest key of
//! the remaining members is taken next.

use std::collections::{BTreeSet, HashMap};

use super::{tokens_of, Mode};
use crate::cpg::Cpg;
use crate::frontend::ast::{Ast, NodeId, NodeKind};
use crate::frontend::canon::structural;

/// Name-free sort key: token ids, then subtree size, then shape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MemberKey {
    pub tokens: Vec<u8>,
    pub size: usize,
    pub shape: String,
}

pub fn member_key(ast: &Ast, id: NodeId) -> MemberKey {
    MemberKey {
        tokens: tokens_of(ast, id, Mode::Eog).iter().map(|t| t.id()).collect(),
        size: ast.subtree_size(id),
        shape: shape(ast, id),
    }
}

/// Like [`structural`], but class members are taken in sorted order so the
/// key does not depend on declaration order.
fn shape(ast: &Ast, id: NodeId) -> String {
    if ast.kind(id) != NodeKind::ClassDecl {
        return structural(ast, id);
    }
    let mut s = String::from("(ClassDecl");
    for m in order_items(ast, ast.children(id)) {
        s.push(' ');
        s.push_str(&shape(ast, m));
    }
    s.push(')');
    s
}

/// Classes and members in emission order; each class is followed by its own
/// members.
pub fn order_members(cpg: &Cpg) -> Vec<NodeId> {
    let ast = &cpg.ast;
    let items: Vec<NodeId> = ast.children(ast.root()).iter().flat_map(|f| ast.children(*f).iter().copied()).collect();
    let mut out = Vec::new();
    flatten(ast, &items, &mut out);
    out
}

fn flatten(ast: &Ast, items: &[NodeId], out: &mut Vec<NodeId>) {
    for m in order_items(ast, items) {
        out.push(m);
        if ast.kind(m) == NodeKind::ClassDecl {
            flatten(ast, ast.children(m), out);
        }
    }
}

pub(crate) fn order_items(ast: &Ast, items: &[NodeId]) -> Vec<NodeId> {
    let n = items.len();
    if n < 2 {
        return items.to_vec();
    }
    let mut home: HashMap<NodeId, usize> = HashMap::new();
    for (i, it) in items.iter().enumerate() {
        for d in ast.preorder(*it) {
            home.insert(d, i);
        }
    }
    let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (i, it) in items.iter().enumerate() {
        for d in ast.preorder(*it).into_iter().filter_map(|x| ast.decl(x)) {
            if let Some(&j) = home.get(&d) {
                if j != i {
                    deps[i].insert(j);
                }
            }
        }
    }
    let keys: Vec<MemberKey> = items.iter().map(|it| member_key(ast, *it)).collect();
    let mut done = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let pick = |ready_only: bool| {
            (0..n)
                .filter(|i| !done[*i])
                .filter(|i| !ready_only || deps[*i].iter().all(|d| done[*d]))
                .min_by(|a, b| keys[*a].cmp(&keys[*b]).then(a.cmp(b)))
        };
        let next = pick(true).or_else(|| pick(false)).expect("members left");
        done[next] = true;
        out.push(items[next]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_str;

    fn names(src: &str) -> Vec<String> {
        let cpg = Cpg::build(load_str(src).unwrap());
        order_members(&cpg).iter().map(|m| cpg.ast.name(*m).unwrap_or("?").to_string()).collect()
    }

    #[test]
    fn callee_precedes_caller() {
        assert_eq!(names("void m() { h(); } void h() { println(); }"), ["h", "m"]);
    }

    #[test]
    fn independent_methods_keep_shape_order() {
        let a = "void f(int x) { println(x); } void g() { println(); }";
        let b = "void g() { println(); } void f(int x) { println(x); }";
        assert_eq!(names(a), names(b));
    }

    #[test]
    fn mutual_recursion_is_deterministic() {
        let a = "int p(int x) { return q(x); } int q(int x) { if (x > 0) { return p(x - 1); } return 0; }";
        let b = "int q(int x) { if (x > 0) { return p(x - 1); } return 0; } int p(int x) { return q(x); }";
        assert_eq!(names(a), names(b));
    }

    #[test]
    fn class_members_sorted_within_class() {
        let order = names("class A { int g() { return f(); } int f() { return 1; } int v; }");
        assert_eq!(order[0], "A");
        assert_eq!(order[1..], ["f", "g", "v"]);
    }
}
