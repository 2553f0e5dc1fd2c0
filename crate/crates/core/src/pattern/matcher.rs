//! Exact backtracking matcher for node-pattern trees.

use super::{Binding, ChildPattern, GraphPattern, NodePattern, Presence, Slot};
use crate::cpg::Cpg;
use crate::frontend::ast::{Ast, NodeId};

type Cont<'k> = &'k mut dyn FnMut(&mut Binding) -> bool;

fn local_ok(ast: &Ast, p: &NodePattern, n: NodeId) -> bool {
    let node = ast.node(n);
    (p.kinds.is_empty() || p.kinds.contains(&node.kind))
        && p.child_count.is_none_or(|c| c == node.children.len())
        && p.attrs.iter().all(|a| a.holds(&node.attrs))
}

fn node(ast: &Ast, p: &NodePattern, n: NodeId, b: &mut Binding, k: Cont<'_>) -> bool {
    if !local_ok(ast, p, n) || b.contains_node(n) {
        return false;
    }
    b.bind(&p.role, n);
    if children(ast, &p.children, 0, n, b, k) {
        return true;
    }
    b.roles.remove(&p.role);
    false
}

fn candidates(ast: &Ast, slot: Slot, n: NodeId) -> Vec<NodeId> {
    let kids = ast.children(n);
    match slot {
        Slot::Index(i) => kids.get(i).copied().into_iter().collect(),
        Slot::Last => kids.last().copied().into_iter().collect(),
        Slot::Any => kids.to_vec(),
    }
}

fn matches_alone(ast: &Ast, p: &NodePattern, n: NodeId) -> bool {
    node(ast, p, n, &mut Binding::default(), &mut |_| true)
}

fn children(ast: &Ast, cps: &[ChildPattern], idx: usize, n: NodeId, b: &mut Binding, k: Cont<'_>) -> bool {
    let Some(cp) = cps.get(idx) else { return k(b) };
    let cands = candidates(ast, cp.slot, n);
    match cp.presence {
        Presence::Forbidden => {
            if cands.iter().any(|c| matches_alone(ast, &cp.pattern, *c)) {
                return false;
            }
            children(ast, cps, idx + 1, n, b, k)
        }
        Presence::Required | Presence::Optional => {
            let mut present = false;
            for c in cands {
                if b.contains_node(c) || !matches_alone(ast, &cp.pattern, c) {
                    continue;
                }
                present = true;
                if node(ast, &cp.pattern, c, b, &mut |b: &mut Binding| children(ast, cps, idx + 1, n, b, k)) {
                    return true;
                }
            }
            cp.presence == Presence::Optional && !present && children(ast, cps, idx + 1, n, b, k)
        }
    }
}

/// Every structural binding of `p` rooted at `n`, ignoring predicates.
pub fn structural_matches(ast: &Ast, p: &NodePattern, n: NodeId) -> Vec<Binding> {
    let mut out = Vec::new();
    node(ast, p, n, &mut Binding::default(), &mut |b| {
        out.push(b.clone());
        false
    });
    out
}

/// First binding rooted at `n` that satisfies every predicate.
pub fn match_at(cpg: &Cpg, pattern: &GraphPattern, n: NodeId) -> Option<Binding> {
    if !cpg.ast.contains(n) {
        return None;
    }
    let mut found = None;
    node(&cpg.ast, &pattern.root, n, &mut Binding::default(), &mut |b| {
        let mut full = b.clone();
        if pattern.predicates.iter().all(|p| (p.check)(cpg, &mut full)) {
            found = Some(full);
            true
        } else {
            false
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::ast::{AttrKey, AttrValue, NodeKind, Op};
    use crate::frontend::load_str;

    fn find(ast: &Ast, kind: NodeKind) -> NodeId {
        ast.live_nodes().into_iter().find(|n| ast.kind(*n) == kind).unwrap()
    }

    #[test]
    fn for_pattern_binds_all_parts() {
        let ast = load_str("void f(int n) { for (int i = 0; i < n; i++) { println(i); } }").unwrap();
        let p = NodePattern::new("for", NodeKind::ForStmt)
            .at(0, NodePattern::any("init"))
            .at(1, NodePattern::any("cond"))
            .at(2, NodePattern::any("update"))
            .at(3, NodePattern::new("body", NodeKind::Block));
        let ms = structural_matches(&ast, &p, find(&ast, NodeKind::ForStmt));
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].roles.len(), 5);
    }

    #[test]
    fn forbidden_and_optional_children() {
        let ast = load_str("void f(boolean c) { if (c) { println(); } }").unwrap();
        let iff = find(&ast, NodeKind::IfStmt);
        let with_else = NodePattern::new("if", NodeKind::IfStmt).at(2, NodePattern::any("else"));
        assert!(structural_matches(&ast, &with_else, iff).is_empty());
        let no_else = NodePattern::new("if", NodeKind::IfStmt).forbid(Slot::Index(2), NodePattern::any("else"));
        assert_eq!(structural_matches(&ast, &no_else, iff).len(), 1);
        let opt = NodePattern::new("if", NodeKind::IfStmt).optional(2, NodePattern::any("else"));
        let ms = structural_matches(&ast, &opt, iff);
        assert_eq!(ms.len(), 1);
        assert!(ms[0].get("else").is_none());
    }

    #[test]
    fn any_slot_backtracks_and_stays_injective() {
        let ast = load_str("void f(int a, int b) { int x = a + b; }").unwrap();
        let bin = find(&ast, NodeKind::BinaryOp);
        let p = NodePattern::new("plus", NodeKind::BinaryOp)
            .attr(AttrKey::Op, AttrValue::Op(Op::Add))
            .child(Slot::Any, Presence::Required, NodePattern::new("x", NodeKind::NameRef))
            .child(Slot::Any, Presence::Required, NodePattern::new("y", NodeKind::NameRef));
        let ms = structural_matches(&ast, &p, bin);
        assert_eq!(ms.len(), 2);
        assert!(ms.iter().all(|m| m.node("x") != m.node("y")));
    }
}
