//! AST construction helpers for the attack generators.
//!
//! New code is written as MiniJ text, parsed into a scratch arena and
//! grafted into the target. Grafted nodes carry no resolution links; the
//! attacked program is always re-printed and re-resolved before use.

use std::collections::BTreeSet;

use crate::frontend::ast::{Ast, Attrs, Literal, NodeId, NodeKind, Op, Span};
use crate::frontend::printer::print_program;
use crate::frontend::{load, parse, FrontendError, SourceUnit, SyntaxError};

/// Deep copy of `id` from `src` into `dst`, detached and unresolved.
pub fn graft(dst: &mut Ast, src: &Ast, id: NodeId) -> NodeId {
    let node = src.node(id);
    let attrs = Attrs { decl: None, ..node.attrs.clone() };
    let copy = dst.alloc(node.kind, attrs, Span::default());
    for c in node.children.clone() {
        let k = graft(dst, src, c);
        dst.push_child(copy, k);
    }
    copy
}

fn scratch(text: String) -> Result<Ast, SyntaxError> {
    parse(&SourceUnit::new("snippet.minij", text))
}

fn first_item(ast: &Ast) -> NodeId {
    let file = ast.children(ast.root())[0];
    ast.children(file)[0]
}

/// Statements parsed from `text` and grafted into `dst`, in order.
pub fn statements(dst: &mut Ast, text: &str) -> Result<Vec<NodeId>, SyntaxError> {
    let ast = scratch(format!("void snippet() {{ {text} }}"))?;
    let body = ast.body(first_item(&ast)).expect("snippet body");
    Ok(ast.children(body).to_vec().into_iter().map(|s| graft(dst, &ast, s)).collect())
}

/// One class member, parsed inside a class called `class`.
pub fn member(dst: &mut Ast, class: &str, text: &str) -> Result<NodeId, SyntaxError> {
    let ast = scratch(format!("class {class} {{ {text} }}"))?;
    let c = first_item(&ast);
    Ok(graft(dst, &ast, ast.children(c)[0]))
}

/// One top-level item (class or free method).
pub fn item(dst: &mut Ast, text: &str) -> Result<NodeId, SyntaxError> {
    let ast = scratch(text.to_string())?;
    Ok(graft(dst, &ast, first_item(&ast)))
}

pub fn literal(ast: &mut Ast, value: Literal) -> NodeId {
    ast.alloc(NodeKind::Literal, Attrs::literal(value), Span::default())
}

pub fn name_ref(ast: &mut Ast, name: &str) -> NodeId {
    ast.alloc(NodeKind::NameRef, Attrs::named(name), Span::default())
}

pub fn unary(ast: &mut Ast, op: Op, operand: NodeId) -> NodeId {
    let n = ast.alloc(NodeKind::UnaryOp, Attrs::op(op), Span::default());
    ast.push_child(n, operand);
    n
}

pub fn field_access(ast: &mut Ast, receiver: NodeId, name: &str) -> NodeId {
    let n = ast.alloc(NodeKind::FieldAccess, Attrs::named(name), Span::default());
    ast.push_child(n, receiver);
    n
}

pub fn call(ast: &mut Ast, name: &str, receiver: Option<NodeId>, args: &[NodeId]) -> NodeId {
    let attrs = Attrs { qualified: receiver.is_some(), ..Attrs::named(name) };
    let n = ast.alloc(NodeKind::Call, attrs, Span::default());
    for c in receiver.iter().chain(args) {
        ast.push_child(n, *c);
    }
    n
}

pub fn wrap(ast: &mut Ast, value: NodeId) -> NodeId {
    let n = ast.alloc(NodeKind::OptionalWrap, Attrs::op(Op::Of), Span::default());
    ast.push_child(n, value);
    n
}

pub fn unwrap(ast: &mut Ast, optional: NodeId, default: Option<NodeId>) -> NodeId {
    let op = if default.is_some() { Op::OrElse } else { Op::Get };
    let n = ast.alloc(NodeKind::OptionalUnwrap, Attrs::op(op), Span::default());
    ast.push_child(n, optional);
    if let Some(d) = default {
        ast.push_child(n, d);
    }
    n
}

/// Every identifier in the program.
pub fn names(ast: &Ast) -> BTreeSet<String> {
    ast.live_nodes().into_iter().filter_map(|n| ast.name(n).map(str::to_string)).collect()
}

/// `base`, or `base` with the smallest numeric suffix not in use.
pub fn fresh(taken: &BTreeSet<String>, base: &str) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}{i}")).find(|n| !taken.contains(n)).expect("unbounded")
}

pub fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

pub fn units(ast: &Ast) -> Vec<SourceUnit> {
    print_program(ast).into_iter().map(|(path, text)| SourceUnit::new(path, text)).collect()
}

/// Print and re-resolve, giving a clean arena with fresh links.
pub fn reload(ast: &Ast) -> Result<Ast, FrontendError> {
    load(&units(ast))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_str;
    use crate::frontend::printer::print_all;

    #[test]
    fn grafted_statements_print() {
        let mut ast = load_str("void f() { println(1); }").unwrap();
        let m = ast.callables()[0];
        let body = ast.body(m).unwrap();
        for s in statements(&mut ast, "int a = 2; a = a + 1;").unwrap() {
            ast.push_child(body, s);
        }
        let again = reload(&ast).unwrap();
        assert!(print_all(&again).contains("int a = 2;\n    a = a + 1;"));
    }

    #[test]
    fn fresh_names_skip_taken() {
        let taken: BTreeSet<String> = ["tmp".to_string(), "tmp1".to_string()].into();
        assert_eq!(fresh(&taken, "tmp"), "tmp2");
        assert_eq!(fresh(&taken, "aux"), "aux");
    }
}
