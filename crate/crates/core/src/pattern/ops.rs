//! Execution of transformation ops against a match.

use std::collections::HashSet;

use super::{AttrSource, Binding, InsertAt, PatternError, TransformOp};
use crate::frontend::ast::{Ast, AttrValue, Attrs, NodeId, Span};

struct Exec<'a> {
    ast: &'a mut Ast,
    optional: &'a [&'a str],
}

/// Runs `ops` on the AST. Ops that mention an unbound optional role are
/// skipped; any other unbound role is an error.
pub fn execute(ast: &mut Ast, ops: &[TransformOp], binding: &mut Binding, optional: &[&str]) -> Result<(), PatternError> {
    let mut ex = Exec { ast, optional };
    for op in ops {
        ex.run(op, binding)?;
    }
    Ok(())
}

enum Lookup {
    Node(NodeId),
    Skip,
}

impl Exec<'_> {
    fn lookup(&self, b: &Binding, role: &str) -> Result<Lookup, PatternError> {
        // `role/i` names child `i` of the node bound to `role`.
        if let Some((base, idx)) = role.rsplit_once('/') {
            let i: usize = idx.parse().map_err(|_| PatternError::InvalidOp(format!("bad role path `{role}`")))?;
            return Ok(match self.lookup(b, base)? {
                Lookup::Node(n) => match self.ast.child(n, i) {
                    Some(c) => Lookup::Node(c),
                    None => return Err(PatternError::InvalidOp(format!("`{base}` has no child {i}"))),
                },
                Lookup::Skip => Lookup::Skip,
            });
        }
        match b.get(role) {
            Some(n) if self.ast.contains(n) => Ok(Lookup::Node(n)),
            Some(_) => Err(PatternError::InvalidOp(format!("role `{role}` refers to a freed node"))),
            None if self.optional.contains(&role) => Ok(Lookup::Skip),
            None => Err(PatternError::UnboundRole(role.to_string())),
        }
    }

    fn value(&self, b: &Binding, src: &AttrSource) -> Result<Option<AttrValue>, PatternError> {
        let node_of = |role: &str| -> Result<Option<NodeId>, PatternError> {
            Ok(match self.lookup(b, role)? {
                Lookup::Node(n) => Some(n),
                Lookup::Skip => None,
            })
        };
        Ok(match src {
            AttrSource::Const(v) => Some(v.clone()),
            AttrSource::Role(role, key) => node_of(role)?.map(|n| self.ast.attrs(n).get(*key)),
            AttrSource::Value(name) => Some(
                b.values
                    .get(name)
                    .cloned()
                    .ok_or_else(|| PatternError::InvalidOp(format!("value `{name}` not computed")))?,
            ),
            AttrSource::Fresh(role) => node_of(role)?.map(|n| {
                let base = self.ast.name(n).unwrap_or("v").to_string();
                AttrValue::Str(fresh_name(self.ast, &base))
            }),
            AttrSource::NodeOf(role) => node_of(role)?.map(AttrValue::Node),
            AttrSource::DeclOf(role) => node_of(role)?.map(|n| self.ast.decl(n).map_or(AttrValue::None, AttrValue::Node)),
            AttrSource::DeclAttr(role, key) => node_of(role)?.map(|n| match self.ast.decl(n).and_then(|d| self.ast.get(d)) {
                Some(d) => d.attrs.get(*key),
                None => AttrValue::None,
            }),
        })
    }

    fn index(&self, b: &Binding, parent: NodeId, at: &InsertAt) -> Result<usize, PatternError> {
        let len = self.ast.children(parent).len();
        Ok(match at {
            InsertAt::Index(i) => (*i).min(len),
            InsertAt::Last => len,
            InsertAt::Before(role) | InsertAt::After(role) => {
                let Lookup::Node(anchor) = self.lookup(b, role)? else { return Ok(len) };
                let pos = self
                    .ast
                    .children(parent)
                    .iter()
                    .position(|c| *c == anchor)
                    .ok_or_else(|| PatternError::InvalidOp(format!("`{role}` is not a child of the target")))?;
                if matches!(at, InsertAt::After(_)) {
                    pos + 1
                } else {
                    pos
                }
            }
        })
    }

    fn place(&mut self, b: &Binding, child: NodeId, parent: NodeId, at: &InsertAt) -> Result<(), PatternError> {
        if self.ast.is_ancestor(child, parent) {
            return Err(PatternError::InvalidOp("cannot move a node under itself".into()));
        }
        self.ast.detach(child);
        let i = self.index(b, parent, at)?;
        self.ast.insert_child(parent, i, child);
        Ok(())
    }

    fn run(&mut self, op: &TransformOp, b: &mut Binding) -> Result<(), PatternError> {
        use Lookup::Node;
        match op {
            TransformOp::CreateNode { role, kind, attrs } => {
                let mut a = Attrs::default();
                for (key, src) in attrs {
                    if let Some(v) = self.value(b, src)? {
                        if !a.set(*key, v) {
                            return Err(PatternError::InvalidOp(format!("bad value for `{}`", key.name())));
                        }
                    }
                }
                let n = self.ast.alloc(*kind, a, Span::default());
                b.bind(role, n);
            }
            TransformOp::DeleteNode { role } => {
                if let Node(n) = self.lookup(b, role)? {
                    self.ast.remove_subtree(n);
                }
            }
            TransformOp::SetAttr { role, key, value } => {
                if let Node(n) = self.lookup(b, role)? {
                    if let Some(v) = self.value(b, value)? {
                        if !self.ast.attrs_mut(n).set(*key, v) {
                            return Err(PatternError::InvalidOp(format!("bad value for `{}`", key.name())));
                        }
                    }
                }
            }
            TransformOp::AddChild { parent, child, at } | TransformOp::MoveChild { child, to: parent, at } => {
                if let (Node(p), Node(c)) = (self.lookup(b, parent)?, self.lookup(b, child)?) {
                    self.place(b, c, p, at)?;
                }
            }
            TransformOp::RemoveChild { parent, child } => {
                if let (Node(p), Node(c)) = (self.lookup(b, parent)?, self.lookup(b, child)?) {
                    if self.ast.parent(c) != Some(p) {
                        return Err(PatternError::InvalidOp(format!("`{child}` is not a child of `{parent}`")));
                    }
                    self.ast.detach(c);
                }
            }
            TransformOp::ReplaceNode { old, new } => {
                if let (Node(o), Node(n)) = (self.lookup(b, old)?, self.lookup(b, new)?) {
                    if n != o && self.ast.is_ancestor(n, o) {
                        return Err(PatternError::InvalidOp("replacement encloses the replaced node".into()));
                    }
                    self.ast.replace(o, n);
                }
            }
            TransformOp::ForEach { group, role, ops } => {
                let members = b.group(group).to_vec();
                let saved = b.get(role);
                for m in members {
                    if !self.ast.contains(m) {
                        continue;
                    }
                    b.bind(role, m);
                    for inner in ops {
                        self.run(inner, b)?;
                    }
                }
                match saved {
                    Some(s) => b.bind(role, s),
                    None => {
                        b.roles.remove(role);
                    }
                }
            }
        }
        Ok(())
    }
}

/// `base` followed by the smallest positive integer not yet used as a name.
pub fn fresh_name(ast: &Ast, base: &str) -> String {
    let used: HashSet<&str> = ast.live_nodes().into_iter().filter_map(|n| ast.name(n)).collect();
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..).map(|i| format!("{stem}{i}")).find(|c| !used.contains(c.as_str())).expect("unbounded")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::ast::NodeKind;
    use crate::frontend::load_str;
    use crate::frontend::printer::print_all;

    #[test]
    fn fresh_names_skip_used() {
        let ast = load_str("void f(int i, int i1) { int i2 = 0; }").unwrap();
        assert_eq!(fresh_name(&ast, "i"), "i3");
        assert_eq!(fresh_name(&ast, "k"), "k1");
    }

    #[test]
    fn move_and_delete() {
        let mut ast = load_str("void f() { println(1); println(2); }").unwrap();
        let stmts: Vec<NodeId> = ast.live_nodes().into_iter().filter(|n| ast.kind(*n) == NodeKind::ExprStmt).collect();
        let block = ast.parent(stmts[0]).unwrap();
        let mut b = Binding::default();
        b.bind("a", stmts[0]);
        b.bind("b", stmts[1]);
        b.bind("blk", block);
        execute(&mut ast, &[TransformOp::move_to("b", "blk", InsertAt::Index(0))], &mut b, &[]).unwrap();
        let text = print_all(&ast);
        assert!(text.find("println(2)").unwrap() < text.find("println(1)").unwrap());
        execute(&mut ast, &[TransformOp::delete("a")], &mut b, &[]).unwrap();
        assert!(!print_all(&ast).contains("println(1)"));
        let err = execute(&mut ast, &[TransformOp::delete("zzz")], &mut b, &[]).unwrap_err();
        assert_eq!(err, PatternError::UnboundRole("zzz".into()));
        execute(&mut ast, &[TransformOp::delete("zzz")], &mut b, &["zzz"]).unwrap();
    }
}
