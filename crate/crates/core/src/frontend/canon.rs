//! Canonical serializations used for equality checks and sort keys.
//!
//! [`canonical`] keeps names, types and literal values but drops node ids,
//! spans and resolution links. [`structural`] additionally drops names and
//! literal values, so renamed copies of a subtree serialize identically.

use std::fmt::Write;

use super::ast::{Ast, NodeId, NodeKind};

pub fn canonical(ast: &Ast) -> String {
    canonical_node(ast, ast.root())
}

pub fn canonical_node(ast: &Ast, id: NodeId) -> String {
    let mut out = String::new();
    write_node(ast, id, true, &mut out);
    out
}

pub fn structural(ast: &Ast, id: NodeId) -> String {
    let mut out = String::new();
    write_node(ast, id, false, &mut out);
    out
}

fn write_node(ast: &Ast, id: NodeId, full: bool, out: &mut String) {
    let node = ast.node(id);
    out.push('(');
    out.push_str(node.kind.name());
    let a = &node.attrs;
    // File paths are not part of the program.
    if full && node.kind != NodeKind::File {
        if let Some(n) = &a.name {
            let _ = write!(out, " n={n:?}");
        }
        if let Some(v) = &a.value {
            let _ = write!(out, " v={}", v.source_text());
        }
    }
    if !full {
        if let Some(v) = &a.value {
            let _ = write!(out, " v={:?}", v.ty());
        }
    }
    if let Some(t) = &a.ty {
        let _ = write!(out, " t={t}");
    }
    if let Some(o) = a.op {
        let _ = write!(out, " o={o:?}");
    }
    if a.is_static {
        out.push_str(" static");
    }
    if a.is_final {
        out.push_str(" final");
    }
    if a.qualified {
        out.push_str(" q");
    }
    for c in &node.children {
        out.push(' ');
        write_node(ast, *c, full, out);
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::super::load_str;
    use super::*;

    #[test]
    fn renaming_changes_only_full_form() {
        let a = load_str("void f(int a) { int b = a + 1; println(b); }").unwrap();
        let b = load_str("void f(int x) { int y = x + 2; println(y); }").unwrap();
        assert_ne!(canonical(&a), canonical(&b));
        assert_eq!(structural(&a, a.root()), structural(&b, b.root()));
    }

    #[test]
    fn deterministic() {
        let src = "class A { int x; void m() { x = x + 1; } }";
        assert_eq!(canonical(&load_str(src).unwrap()), canonical(&load_str(src).unwrap()));
    }
}
