//! Deriving an op sequence from a source/target pattern pair.
//!
//! Both trees are walked in parallel by role name:
//!
//! 1. roles only in the target are created (their kind must be unique)
//! 2. equality constraints that differ become `SET_ATTR`
//! 3. a changed root role becomes `REPLACE_NODE`
//! 4. every target node whose child list differs from its source
//!    counterpart gets its children placed in order (`MOVE_CHILD` for
//!    existing roles, `ADD_CHILD` for created ones)
//! 5. source roles missing from the target are deleted, topmost first

use std::collections::{BTreeMap, HashSet};

use super::{
    AttrConstraint, AttrSource, DerivationError, GraphPattern, InsertAt, NodePattern, Presence, Slot, TransformOp,
    TransformationTemplate,
};
use crate::frontend::ast::{Ast, Attrs, Literal, NodeId, NodeKind, Span};

struct Info<'a> {
    pattern: &'a NodePattern,
    parent: Option<&'a str>,
}

fn index<'a>(p: &'a NodePattern, parent: Option<&'a str>, out: &mut BTreeMap<&'a str, Info<'a>>) -> Result<(), DerivationError> {
    if out.insert(&p.role, Info { pattern: p, parent }).is_some() {
        return Err(DerivationError::DuplicateRole(p.role.clone()));
    }
    for c in &p.children {
        if c.presence != Presence::Forbidden {
            index(&c.pattern, Some(&p.role), out)?;
        }
    }
    Ok(())
}

fn child_list(p: &NodePattern) -> Vec<(Slot, &str)> {
    p.children
        .iter()
        .filter(|c| c.presence != Presence::Forbidden)
        .map(|c| (c.slot, c.pattern.role.as_str()))
        .collect()
}

fn preorder(p: &NodePattern) -> Vec<&NodePattern> {
    let mut out = vec![p];
    for c in &p.children {
        if c.presence != Presence::Forbidden {
            out.extend(preorder(&c.pattern));
        }
    }
    out
}

fn eq_constraints(p: &NodePattern) -> Vec<(crate::frontend::ast::AttrKey, &crate::frontend::ast::AttrValue)> {
    p.attrs
        .iter()
        .filter_map(|a| match a {
            AttrConstraint::Eq(k, v) => Some((*k, v)),
            _ => None,
        })
        .collect()
}

pub fn derive_template(name: &str, source: &GraphPattern, target: &NodePattern) -> Result<TransformationTemplate, DerivationError> {
    let mut s = BTreeMap::new();
    index(&source.root, None, &mut s)?;
    let mut t = BTreeMap::new();
    index(target, None, &mut t)?;
    let mut ops = Vec::new();

    for tp in preorder(target) {
        if s.contains_key(tp.role.as_str()) {
            continue;
        }
        let [kind] = tp.kinds[..] else { return Err(DerivationError::Uncreatable(tp.role.clone())) };
        let attrs = eq_constraints(tp).into_iter().map(|(k, v)| (k, AttrSource::Const(v.clone()))).collect();
        ops.push(TransformOp::create_with(&tp.role, kind, attrs));
    }

    for tp in preorder(target) {
        let Some(si) = s.get(tp.role.as_str()) else { continue };
        let before = eq_constraints(si.pattern);
        for (k, v) in eq_constraints(tp) {
            if !before.contains(&(k, v)) {
                ops.push(TransformOp::set(&tp.role, k, AttrSource::Const(v.clone())));
            }
        }
    }

    if target.role != source.root.role {
        ops.push(TransformOp::replace(&source.root.role, &target.role));
    }

    for tp in preorder(target) {
        let wanted = child_list(tp);
        let had = s.get(tp.role.as_str()).map(|si| child_list(si.pattern));
        if had.as_ref() == Some(&wanted) {
            continue;
        }
        for (i, (slot, child)) in wanted.into_iter().enumerate() {
            let at = match slot {
                Slot::Index(_) => InsertAt::Index(i),
                Slot::Last | Slot::Any => InsertAt::Last,
            };
            if s.contains_key(child) {
                ops.push(TransformOp::move_to(child, &tp.role, at));
            } else {
                ops.push(TransformOp::add(&tp.role, child, at));
            }
        }
    }

    for sp in preorder(&source.root) {
        if t.contains_key(sp.role.as_str()) {
            continue;
        }
        let parent_kept = s[sp.role.as_str()].parent.is_none_or(|p| t.contains_key(p));
        if parent_kept {
            ops.push(TransformOp::delete(&sp.role));
        }
    }

    Ok(TransformationTemplate::new(name, source.clone(), ops))
}

/// A minimal concrete tree matching `p`, attached under a fresh program
/// root. Returns the AST and the instance root.
pub fn synthesize_instance(p: &NodePattern) -> (Ast, NodeId) {
    let mut ast = Ast::new();
    let root = ast.root();
    let n = build(&mut ast, p);
    ast.push_child(root, n);
    (ast, n)
}

fn filler(ast: &mut Ast) -> NodeId {
    ast.alloc(NodeKind::Literal, Attrs::literal(Literal::Int(0)), Span::default())
}

fn build(ast: &mut Ast, p: &NodePattern) -> NodeId {
    let kind = p.kinds.first().copied().unwrap_or(NodeKind::Literal);
    let mut attrs = if kind == NodeKind::Literal { Attrs::literal(Literal::Int(0)) } else { Attrs::default() };
    for (k, v) in eq_constraints(p) {
        attrs.set(k, v.clone());
    }
    let n = ast.alloc(kind, attrs, Span::default());
    let mut indexed: Vec<(usize, NodeId)> = Vec::new();
    let mut tail: Vec<NodeId> = Vec::new();
    let mut used = HashSet::new();
    for c in &p.children {
        if c.presence == Presence::Forbidden {
            continue;
        }
        let id = build(ast, &c.pattern);
        match c.slot {
            Slot::Index(i) if used.insert(i) => indexed.push((i, id)),
            _ => tail.push(id),
        }
    }
    indexed.sort();
    for (i, id) in indexed {
        while ast.children(n).len() < i {
            let f = filler(ast);
            ast.push_child(n, f);
        }
        ast.push_child(n, id);
    }
    for id in tail {
        ast.push_child(n, id);
    }
    if let Some(count) = p.child_count {
        while ast.children(n).len() < count {
            let f = filler(ast);
            ast.push_child(n, f);
        }
    }
    n
}
