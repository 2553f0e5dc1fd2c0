//! Pretty-printer producing MiniJ text that re-parses to the same tree.

use std::fmt::Write;

use super::ast::{Ast, NodeId, NodeKind, Op};

const INDENT: &str = "    ";

/// Prints every file of the program; returns `(path, text)` pairs.
pub fn print_program(ast: &Ast) -> Vec<(String, String)> {
    ast.children(ast.root())
        .iter()
        .map(|f| (ast.name(*f).unwrap_or("Main.minij").to_string(), print_file(ast, *f)))
        .collect()
}

/// All files concatenated, mostly for tests and debugging.
pub fn print_all(ast: &Ast) -> String {
    print_program(ast).into_iter().map(|(_, t)| t).collect::<Vec<_>>().join("\n")
}

pub fn print_file(ast: &Ast, file: NodeId) -> String {
    let mut out = String::new();
    for (i, item) in ast.children(file).iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        member(ast, *item, 0, &mut out);
    }
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn modifiers(ast: &Ast, id: NodeId, out: &mut String) {
    let a = ast.attrs(id);
    if a.is_static {
        out.push_str("static ");
    }
    if a.is_final {
        out.push_str("final ");
    }
}

fn member(ast: &Ast, id: NodeId, depth: usize, out: &mut String) {
    indent(out, depth);
    match ast.kind(id) {
        NodeKind::ClassDecl => {
            let _ = writeln!(out, "class {} {{", ast.name(id).unwrap_or("_"));
            for m in ast.children(id) {
                member(ast, *m, depth + 1, out);
            }
            indent(out, depth);
            out.push_str("}\n");
        }
        NodeKind::FieldDecl => {
            modifiers(ast, id, out);
            let ty = ast.attrs(id).ty.as_ref().map(|t| t.to_string()).unwrap_or_default();
            let _ = write!(out, "{ty} {}", ast.name(id).unwrap_or("_"));
            if let Some(init) = ast.child(id, 0) {
                out.push_str(" = ");
                expr(ast, init, out);
            }
            out.push_str(";\n");
        }
        NodeKind::MethodDecl | NodeKind::ConstructorDecl => {
            modifiers(ast, id, out);
            if ast.kind(id) == NodeKind::MethodDecl {
                let ty = ast.attrs(id).ty.as_ref().map(|t| t.to_string()).unwrap_or_else(|| "void".into());
                let _ = write!(out, "{ty} ");
            }
            let _ = write!(out, "{}(", ast.name(id).unwrap_or("_"));
            for (i, p) in ast.params(id).iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                if ast.attrs(*p).is_final {
                    out.push_str("final ");
                }
                let ty = ast.attrs(*p).ty.as_ref().map(|t| t.to_string()).unwrap_or_default();
                let _ = write!(out, "{ty} {}", ast.name(*p).unwrap_or("_"));
            }
            out.push_str(") ");
            match ast.body(id) {
                Some(b) => block(ast, b, depth, out),
                None => out.push_str("{}"),
            }
            out.push('\n');
        }
        _ => {
            stmt(ast, id, depth, out);
        }
    }
}

/// Prints `{ ... }` starting at the current position, without a newline.
fn block(ast: &Ast, b: NodeId, depth: usize, out: &mut String) {
    let kids = ast.children(b);
    if kids.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    for s in kids {
        stmt(ast, *s, depth + 1, out);
    }
    indent(out, depth);
    out.push('}');
}

fn stmt(ast: &Ast, s: NodeId, depth: usize, out: &mut String) {
    indent(out, depth);
    stmt_inline(ast, s, depth, out);
    out.push('\n');
}

fn stmt_inline(ast: &Ast, s: NodeId, depth: usize, out: &mut String) {
    let kids = ast.children(s);
    match ast.kind(s) {
        NodeKind::Block => block(ast, s, depth, out),
        NodeKind::IfStmt => {
            out.push_str("if (");
            expr(ast, kids[0], out);
            out.push_str(") ");
            block(ast, kids[1], depth, out);
            if let Some(&e) = kids.get(2) {
                let ek = ast.children(e);
                if ek.len() == 1 && ast.kind(ek[0]) == NodeKind::IfStmt {
                    out.push_str(" else ");
                    stmt_inline(ast, ek[0], depth, out);
                } else {
                    out.push_str(" else ");
                    block(ast, e, depth, out);
                }
            }
        }
        NodeKind::WhileStmt => {
            out.push_str("while (");
            expr(ast, kids[0], out);
            out.push_str(") ");
            block(ast, kids[1], depth, out);
        }
        NodeKind::ForStmt => {
            out.push_str("for (");
            simple(ast, kids[0], out);
            out.push_str("; ");
            expr(ast, kids[1], out);
            out.push_str("; ");
            simple(ast, kids[2], out);
            out.push_str(") ");
            block(ast, kids[3], depth, out);
        }
        NodeKind::ReturnStmt => {
            out.push_str("return");
            if let Some(&v) = kids.first() {
                out.push(' ');
                expr(ast, v, out);
            }
            out.push(';');
        }
        NodeKind::ThrowStmt => {
            out.push_str("throw ");
            expr(ast, kids[0], out);
            out.push(';');
        }
        _ => {
            simple(ast, s, out);
            out.push(';');
        }
    }
}

/// Declarations, assignments and expression statements without `;`.
fn simple(ast: &Ast, s: NodeId, out: &mut String) {
    let kids = ast.children(s);
    match ast.kind(s) {
        NodeKind::LocalVarDecl => {
            if ast.attrs(s).is_final {
                out.push_str("final ");
            }
            let ty = ast.attrs(s).ty.as_ref().map(|t| t.to_string()).unwrap_or_default();
            let _ = write!(out, "{ty} {}", ast.name(s).unwrap_or("_"));
            if let Some(&init) = kids.first() {
                out.push_str(" = ");
                expr(ast, init, out);
            }
        }
        NodeKind::Assign => {
            expr(ast, kids[0], out);
            out.push_str(" = ");
            expr(ast, kids[1], out);
        }
        NodeKind::ExprStmt => expr(ast, kids[0], out),
        _ => {
            // Not a simple statement; print it as a block so the output stays parseable.
            let mut tmp = String::new();
            stmt_inline(ast, s, 0, &mut tmp);
            out.push_str(&tmp);
        }
    }
}

fn is_negative_literal(ast: &Ast, e: NodeId) -> bool {
    ast.kind(e) == NodeKind::Literal && ast.attrs(e).value.as_ref().is_some_and(|v| v.is_negative_number())
}

/// Wraps receivers and unary operands that would otherwise bind wrongly.
fn tight(ast: &Ast, e: NodeId, out: &mut String) {
    let needs = match ast.kind(e) {
        NodeKind::BinaryOp => true,
        NodeKind::UnaryOp => !matches!(ast.attrs(e).op, Some(Op::PostInc | Op::PostDec)),
        _ => is_negative_literal(ast, e),
    };
    if needs {
        out.push('(');
        expr(ast, e, out);
        out.push(')');
    } else {
        expr(ast, e, out);
    }
}

fn args(ast: &Ast, list: &[NodeId], out: &mut String) {
    out.push('(');
    for (i, a) in list.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(ast, *a, out);
    }
    out.push(')');
}

pub fn expr_to_string(ast: &Ast, e: NodeId) -> String {
    let mut s = String::new();
    expr(ast, e, &mut s);
    s
}

fn expr(ast: &Ast, e: NodeId, out: &mut String) {
    let node = ast.node(e);
    let kids = &node.children;
    match node.kind {
        NodeKind::Literal => out.push_str(&node.attrs.value.as_ref().map(|v| v.source_text()).unwrap_or_default()),
        NodeKind::NameRef => out.push_str(node.attrs.name.as_deref().unwrap_or("_")),
        NodeKind::This => out.push_str("this"),
        NodeKind::FieldAccess => {
            tight(ast, kids[0], out);
            let _ = write!(out, ".{}", node.attrs.name.as_deref().unwrap_or("_"));
        }
        NodeKind::Call => {
            let (recv, list) = ast.call_parts(e);
            if let Some(r) = recv {
                tight(ast, r, out);
                out.push('.');
            }
            out.push_str(node.attrs.name.as_deref().unwrap_or("_"));
            args(ast, list, out);
        }
        NodeKind::New => {
            let _ = write!(out, "new {}", node.attrs.name.as_deref().unwrap_or("_"));
            args(ast, kids, out);
        }
        NodeKind::UnaryOp => {
            let op = node.attrs.op.unwrap_or(Op::Not);
            match op {
                Op::PostInc | Op::PostDec => {
                    tight(ast, kids[0], out);
                    out.push_str(op.symbol());
                }
                Op::Neg if ast.kind(kids[0]) == NodeKind::Literal => {
                    // `-5` would re-lex as a single negative literal.
                    out.push_str("-(");
                    expr(ast, kids[0], out);
                    out.push(')');
                }
                _ => {
                    out.push_str(op.symbol());
                    tight(ast, kids[0], out);
                }
            }
        }
        NodeKind::BinaryOp => {
            let op = node.attrs.op.unwrap_or(Op::Add);
            let prec = op.precedence();
            for (i, k) in kids.iter().enumerate() {
                if i == 1 {
                    let _ = write!(out, " {} ", op.symbol());
                }
                let child_prec = match ast.kind(*k) {
                    NodeKind::BinaryOp => ast.attrs(*k).op.map(Op::precedence),
                    _ => None,
                };
                let paren = child_prec.is_some_and(|cp| cp < prec || (i == 1 && cp == prec));
                if paren {
                    out.push('(');
                }
                expr(ast, *k, out);
                if paren {
                    out.push(')');
                }
            }
        }
        NodeKind::OptionalWrap => {
            let name = if node.attrs.op == Some(Op::OfNullable) { "ofNullable" } else { "of" };
            let _ = write!(out, "Optional.{name}(");
            expr(ast, kids[0], out);
            out.push(')');
        }
        NodeKind::OptionalUnwrap => {
            tight(ast, kids[0], out);
            match kids.get(1) {
                Some(d) => {
                    out.push_str(".orElse(");
                    expr(ast, *d, out);
                    out.push(')');
                }
                None => out.push_str(".get()"),
            }
        }
        k => {
            let _ = write!(out, "/* {k} */");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::canon::canonical;
    use super::super::load_str;
    use super::*;

    fn round_trip(src: &str) {
        let a = load_str(src).unwrap();
        let printed = print_all(&a);
        let b = load_str(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
        assert_eq!(canonical(&a), canonical(&b), "{printed}");
        assert_eq!(printed, print_all(&b));
    }

    #[test]
    fn round_trips() {
        round_trip("void printRoots(int n) { for (int i = 0; i < n; i++) { double d = sqrt(i); d++; println(d); } }");
        round_trip("class A { static final int K = -3; int v; A(int v) { this.v = v; } int g() { return (v + K) * 2 - (1 - v); } }");
        round_trip("void f(int a) { if (!(a > 0)) { println(a); } else if (a == 3) { println(-(-a)); } else { println(\"x\\n\"); } }");
        round_trip("void f() { Optional<Integer> o = Optional.of(1 + 2); int x = o.get(); println(Optional.ofNullable(\"s\").orElse(\"t\")); }");
        round_trip("void f(int a) { int b = a - -1; b = -b; println(a / (b % 3)); println(1.5e20 + 0.1); }");
    }
}
