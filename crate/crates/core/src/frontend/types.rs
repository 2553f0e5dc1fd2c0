//! Static types of resolved expressions.

use super::ast::{Ast, Literal, NodeId, NodeKind, Op, Type};
use super::builtins::Builtin;

/// True when `id` is a `NameRef` naming a class (as in `C.K` or `C.m()`).
pub fn is_class_ref(ast: &Ast, id: NodeId) -> bool {
    ast.kind(id) == NodeKind::NameRef
        && ast
            .decl(id)
            .and_then(|d| ast.get(d))
            .is_some_and(|d| d.kind == NodeKind::ClassDecl)
}

/// Builtin called by `call`, if the call is not linked to a user method.
pub fn builtin_of(ast: &Ast, call: NodeId) -> Option<Builtin> {
    let node = ast.node(call);
    if node.kind != NodeKind::Call || node.attrs.qualified || node.attrs.decl.is_some() {
        return None;
    }
    Builtin::from_name(node.attrs.name.as_deref()?)
}

/// Declared type of a declaration node (field, local, parameter, method).
pub fn decl_type(ast: &Ast, decl: NodeId) -> Option<Type> {
    let node = ast.get(decl)?;
    match node.kind {
        NodeKind::ClassDecl => node.attrs.name.clone().map(Type::Class),
        NodeKind::ConstructorDecl => node.attrs.name.clone().map(Type::Class),
        _ => node.attrs.ty.clone(),
    }
}

pub fn type_of(ast: &Ast, id: NodeId) -> Option<Type> {
    let node = ast.node(id);
    match node.kind {
        NodeKind::Literal => node.attrs.value.as_ref().map(Literal::ty),
        NodeKind::NameRef | NodeKind::FieldAccess => decl_type(ast, node.attrs.decl?),
        NodeKind::This => ast
            .enclosing_class(id)
            .and_then(|c| ast.name(c).map(|n| Type::Class(n.to_string()))),
        NodeKind::New => node.attrs.name.clone().map(Type::Class),
        NodeKind::Call => {
            if let Some(b) = builtin_of(ast, id) {
                let args: Vec<_> = ast.call_parts(id).1.iter().map(|a| type_of(ast, *a)).collect();
                return Some(b.result_type(&args));
            }
            let decl = ast.get(node.attrs.decl?)?;
            decl.attrs.ty.clone()
        }
        NodeKind::UnaryOp => match node.attrs.op? {
            Op::Not => Some(Type::Boolean),
            _ => type_of(ast, *node.children.first()?),
        },
        NodeKind::BinaryOp => {
            let op = node.attrs.op?;
            if op.is_comparison() || op.is_logical() {
                return Some(Type::Boolean);
            }
            let l = type_of(ast, node.children[0]);
            let r = type_of(ast, node.children[1]);
            if op == Op::Add && (l == Some(Type::Str) || r == Some(Type::Str)) {
                return Some(Type::Str);
            }
            if l == Some(Type::Double) || r == Some(Type::Double) {
                Some(Type::Double)
            } else {
                Some(Type::Int)
            }
        }
        NodeKind::OptionalWrap => {
            let inner = type_of(ast, node.children[0])?;
            Some(Type::Optional(Box::new(inner)))
        }
        NodeKind::OptionalUnwrap => match type_of(ast, node.children[0])? {
            Type::Optional(inner) => Some(*inner),
            _ => None,
        },
        _ => None,
    }
}

/// Whether an expression of this type can evaluate to `null`.
pub fn nullable(ty: &Type) -> bool {
    !ty.is_primitive()
}
