//! Dead-statement insertion.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::build::{fresh, names, statements};
use super::{location, EditKind, Proposal};
use crate::frontend::ast::{Ast, Attrs, Literal, NodeId, NodeKind, Op, Span, Type};
use crate::frontend::types::{builtin_of, type_of};

pub const DEFAULT_POOL: &[&str] = &[
    "int $v = 0;",
    "int $v = 1; $v = $v + 2;",
    "double $v = 0.5;",
    "boolean $v = false;",
    "String $v = \"unused\";",
    "int $v = 10; int $w = $v * 2;",
    "double $v = 1.5; $v = $v * 2.0;",
    "boolean $v = 3 > 2;",
    "String $v = \"tmp\"; $v = $v + \"x\";",
];

const NAMES: &[&str] = &["tmp", "aux", "unused", "temp", "buf", "val", "cache", "dummy"];

/// Blocks inside method and constructor bodies.
pub(crate) fn body_blocks(ast: &Ast) -> Vec<NodeId> {
    let mut out = Vec::new();
    for m in ast.callables() {
        if let Some(b) = ast.body(m) {
            out.extend(ast.preorder(b).into_iter().filter(|n| ast.kind(*n) == NodeKind::Block));
        }
    }
    out
}

/// Last index at which a statement can be inserted and still run.
pub(crate) fn insert_limit(ast: &Ast, block: NodeId) -> usize {
    let kids = ast.children(block);
    kids.iter()
        .position(|s| matches!(ast.kind(*s), NodeKind::ReturnStmt | NodeKind::ThrowStmt))
        .unwrap_or(kids.len())
}

/// Expression that reads only locals and cannot fail or have effects.
pub(crate) fn harmless(ast: &Ast, e: NodeId) -> bool {
    ast.preorder(e).into_iter().all(|n| {
        let node = ast.node(n);
        match node.kind {
            NodeKind::Literal => !matches!(node.attrs.value, Some(Literal::Null)),
            NodeKind::NameRef => node
                .attrs
                .decl
                .and_then(|d| ast.get(d))
                .is_some_and(|d| matches!(d.kind, NodeKind::LocalVarDecl | NodeKind::ParamDecl)),
            NodeKind::UnaryOp => matches!(node.attrs.op, Some(Op::Not | Op::Neg)),
            NodeKind::BinaryOp => match node.attrs.op {
                Some(Op::Div | Op::Rem) => {
                    let rhs = ast.node(node.children[1]);
                    let double = type_of(ast, n) == Some(Type::Double);
                    double || matches!(rhs.attrs.value, Some(Literal::Int(v)) if rhs.kind == NodeKind::Literal && v != 0)
                }
                _ => true,
            },
            NodeKind::Call => builtin_of(ast, n).is_some_and(|b| !b.is_impure() && !b.may_fault()),
            _ => false,
        }
    })
}

/// Type a fresh local may be declared with.
pub(crate) fn plain_type(t: Option<Type>) -> Option<Type> {
    t.filter(|t| matches!(t, Type::Int | Type::Double | Type::Boolean | Type::Str))
}

fn copy_sources(ast: &Ast) -> Vec<(NodeId, NodeId, usize)> {
    let mut out = Vec::new();
    for b in body_blocks(ast) {
        let limit = insert_limit(ast, b);
        for (i, s) in ast.children(b).iter().enumerate().take(limit) {
            let value = match ast.kind(*s) {
                NodeKind::LocalVarDecl => ast.child(*s, 0),
                NodeKind::Assign => ast.child(*s, 1),
                _ => None,
            };
            if let Some(v) = value {
                if harmless(ast, v) && plain_type(type_of(ast, v)).is_some() {
                    out.push((b, v, i));
                }
            }
        }
    }
    out
}

fn fresh_local(ast: &Ast, rng: &mut ChaCha8Rng) -> String {
    fresh(&names(ast), NAMES.choose(rng).expect("names"))
}

/// One dead statement, copied from the program or taken from the pool;
/// `only` forces one of the two.
pub fn propose(ast: &Ast, pool: &[String], rng: &mut ChaCha8Rng, only: Option<EditKind>) -> (EditKind, Proposal) {
    let sources = copy_sources(ast);
    let copy = match only {
        Some(k) => k == EditKind::CopiedStatement,
        None => !sources.is_empty() && (pool.is_empty() || rng.gen_bool(0.5)),
    };
    if copy {
        let Some(&(block, value, i)) = sources.choose(rng) else {
            return (EditKind::CopiedStatement, None);
        };
        let limit = insert_limit(ast, block);
        let at = rng.gen_range(i + 1..=limit);
        let mut out = ast.clone();
        let name = fresh_local(ast, rng);
        let ty = plain_type(type_of(ast, value)).expect("checked");
        let decl = out.alloc(NodeKind::LocalVarDecl, Attrs::typed(name, ty), Span::default());
        let copy = out.clone_subtree(value);
        out.push_child(decl, copy);
        out.insert_child(block, at, decl);
        return (EditKind::CopiedStatement, Some((out, location(ast, value))));
    }
    let blocks = body_blocks(ast);
    let (Some(block), Some(template)) = (blocks.choose(rng).copied(), pool.choose(rng)) else {
        return (EditKind::DeadStatement, None);
    };
    let at = rng.gen_range(0..=insert_limit(ast, block));
    let mut taken = names(ast);
    let v = fresh(&taken, NAMES.choose(rng).expect("names"));
    taken.insert(v.clone());
    let w = fresh(&taken, NAMES.choose(rng).expect("names"));
    let text = template.replace("$v", &v).replace("$w", &w);
    let mut out = ast.clone();
    let Ok(stmts) = statements(&mut out, &text) else {
        return (EditKind::DeadStatement, None);
    };
    for (k, s) in stmts.into_iter().enumerate() {
        out.insert_child(block, at + k, s);
    }
    (EditKind::DeadStatement, Some((out, location(ast, block))))
}
