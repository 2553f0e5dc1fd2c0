//! Graph transformation templates over the CPG.
//!
//! A [`GraphPattern`] is a tree of [`NodePattern`]s (AST-layer edges) plus
//! named semantic predicates evaluated against the whole [`Cpg`]. A
//! [`TransformationTemplate`] pairs a source pattern with the operations that
//! rewrite every match. Ops edit the AST only; the derived layers are rebuilt
//! afterwards.

mod derive;
mod dump;
mod engine;
mod matcher;
mod ops;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cpg::Cpg;
use crate::frontend::ast::{AttrKey, AttrValue, Attrs, NodeId, NodeKind};

pub use derive::{derive_template, synthesize_instance};
pub use dump::{dump_pattern, dump_template};
pub use engine::{apply, apply_once, find_matches, DEFAULT_PASS_CAP};
pub use matcher::{match_at, structural_matches};
pub use ops::execute;

pub type Role = String;

/// Where a child pattern sits among the node's children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Index(usize),
    Last,
    /// Any child not already bound by a sibling pattern.
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Presence {
    Required,
    Optional,
    Forbidden,
}

#[derive(Debug, Clone)]
pub enum AttrConstraint {
    Eq(AttrKey, AttrValue),
    Ne(AttrKey, AttrValue),
    Test(&'static str, fn(&Attrs) -> bool),
}

impl AttrConstraint {
    pub fn holds(&self, attrs: &Attrs) -> bool {
        match self {
            AttrConstraint::Eq(k, v) => attrs.get(*k) == *v,
            AttrConstraint::Ne(k, v) => attrs.get(*k) != *v,
            AttrConstraint::Test(_, f) => f(attrs),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChildPattern {
    pub slot: Slot,
    pub presence: Presence,
    pub pattern: NodePattern,
}

#[derive(Debug, Clone)]
pub struct NodePattern {
    pub role: Role,
    /// Accepted kinds; empty means any kind.
    pub kinds: Vec<NodeKind>,
    pub attrs: Vec<AttrConstraint>,
    pub child_count: Option<usize>,
    pub children: Vec<ChildPattern>,
}

impl NodePattern {
    pub fn new(role: &str, kind: NodeKind) -> NodePattern {
        NodePattern::of_kinds(role, &[kind])
    }

    pub fn of_kinds(role: &str, kinds: &[NodeKind]) -> NodePattern {
        NodePattern {
            role: role.to_string(),
            kinds: kinds.to_vec(),
            attrs: Vec::new(),
            child_count: None,
            children: Vec::new(),
        }
    }

    pub fn any(role: &str) -> NodePattern {
        NodePattern::of_kinds(role, &[])
    }

    pub fn attr(mut self, key: AttrKey, value: AttrValue) -> NodePattern {
        self.attrs.push(AttrConstraint::Eq(key, value));
        self
    }

    pub fn not_attr(mut self, key: AttrKey, value: AttrValue) -> NodePattern {
        self.attrs.push(AttrConstraint::Ne(key, value));
        self
    }

    pub fn test(mut self, name: &'static str, f: fn(&Attrs) -> bool) -> NodePattern {
        self.attrs.push(AttrConstraint::Test(name, f));
        self
    }

    pub fn count(mut self, n: usize) -> NodePattern {
        self.child_count = Some(n);
        self
    }

    pub fn child(mut self, slot: Slot, presence: Presence, pattern: NodePattern) -> NodePattern {
        self.children.push(ChildPattern { slot, presence, pattern });
        self
    }

    pub fn at(self, i: usize, p: NodePattern) -> NodePattern {
        self.child(Slot::Index(i), Presence::Required, p)
    }

    pub fn last(self, p: NodePattern) -> NodePattern {
        self.child(Slot::Last, Presence::Required, p)
    }

    pub fn optional(self, i: usize, p: NodePattern) -> NodePattern {
        self.child(Slot::Index(i), Presence::Optional, p)
    }

    pub fn forbid(self, slot: Slot, p: NodePattern) -> NodePattern {
        self.child(slot, Presence::Forbidden, p)
    }

    /// Roles of this pattern and all (non-forbidden) descendants, preorder.
    pub fn roles(&self) -> Vec<&str> {
        let mut out = vec![self.role.as_str()];
        for c in &self.children {
            if c.presence != Presence::Forbidden {
                out.extend(c.pattern.roles());
            }
        }
        out
    }

    pub fn find(&self, role: &str) -> Option<&NodePattern> {
        if self.role == role {
            return Some(self);
        }
        self.children
            .iter()
            .filter(|c| c.presence != Presence::Forbidden)
            .find_map(|c| c.pattern.find(role))
    }

    /// Roles that may legitimately stay unbound in a match.
    pub fn optional_roles(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for c in &self.children {
            match c.presence {
                Presence::Optional => out.extend(c.pattern.roles()),
                Presence::Required => out.extend(c.pattern.optional_roles()),
                Presence::Forbidden => {}
            }
        }
        out
    }
}

/// A named check over the full graph. It may extend the binding with
/// groups and values for the ops to use.
#[derive(Clone)]
pub struct Predicate {
    pub name: &'static str,
    pub check: fn(&Cpg, &mut Binding) -> bool,
}

impl std::fmt::Debug for Predicate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Predicate({})", self.name)
    }
}

#[derive(Debug, Clone)]
pub struct GraphPattern {
    pub root: NodePattern,
    pub predicates: Vec<Predicate>,
}

impl GraphPattern {
    pub fn new(root: NodePattern) -> GraphPattern {
        GraphPattern { root, predicates: Vec::new() }
    }

    pub fn with(mut self, name: &'static str, check: fn(&Cpg, &mut Binding) -> bool) -> GraphPattern {
        self.predicates.push(Predicate { name, check });
        self
    }
}

/// Where an attribute value comes from when an op runs.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrSource {
    Const(AttrValue),
    /// Copy of another bound node's attribute.
    Role(Role, AttrKey),
    /// A value computed by a predicate.
    Value(String),
    /// The role's name with a numeric suffix unused in the program.
    Fresh(Role),
    /// Resolution link to the bound node itself.
    NodeOf(Role),
    /// The resolution link of the bound node.
    DeclOf(Role),
    /// An attribute of the declaration the bound node links to.
    DeclAttr(Role, AttrKey),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InsertAt {
    Index(usize),
    Last,
    Before(Role),
    After(Role),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransformOp {
    CreateNode { role: Role, kind: NodeKind, attrs: Vec<(AttrKey, AttrSource)> },
    DeleteNode { role: Role },
    SetAttr { role: Role, key: AttrKey, value: AttrSource },
    AddChild { parent: Role, child: Role, at: InsertAt },
    RemoveChild { parent: Role, child: Role },
    MoveChild { child: Role, to: Role, at: InsertAt },
    ReplaceNode { old: Role, new: Role },
    /// Runs `ops` once per member of a group, binding it to `role`.
    ForEach { group: String, role: Role, ops: Vec<TransformOp> },
}

impl TransformOp {
    pub fn create(role: &str, kind: NodeKind) -> TransformOp {
        TransformOp::CreateNode { role: role.into(), kind, attrs: Vec::new() }
    }

    pub fn create_with(role: &str, kind: NodeKind, attrs: Vec<(AttrKey, AttrSource)>) -> TransformOp {
        TransformOp::CreateNode { role: role.into(), kind, attrs }
    }

    pub fn delete(role: &str) -> TransformOp {
        TransformOp::DeleteNode { role: role.into() }
    }

    pub fn set(role: &str, key: AttrKey, value: AttrSource) -> TransformOp {
        TransformOp::SetAttr { role: role.into(), key, value }
    }

    pub fn add(parent: &str, child: &str, at: InsertAt) -> TransformOp {
        TransformOp::AddChild { parent: parent.into(), child: child.into(), at }
    }

    pub fn remove(parent: &str, child: &str) -> TransformOp {
        TransformOp::RemoveChild { parent: parent.into(), child: child.into() }
    }

    pub fn move_to(child: &str, to: &str, at: InsertAt) -> TransformOp {
        TransformOp::MoveChild { child: child.into(), to: to.into(), at }
    }

    pub fn replace(old: &str, new: &str) -> TransformOp {
        TransformOp::ReplaceNode { old: old.into(), new: new.into() }
    }

    pub fn for_each(group: &str, role: &str, ops: Vec<TransformOp>) -> TransformOp {
        TransformOp::ForEach { group: group.into(), role: role.into(), ops }
    }

    pub fn opcode(&self) -> &'static str {
        match self {
            TransformOp::CreateNode { .. } => "CREATE_NODE",
            TransformOp::DeleteNode { .. } => "DELETE_NODE",
            TransformOp::SetAttr { .. } => "SET_ATTR",
            TransformOp::AddChild { .. } => "ADD_CHILD",
            TransformOp::RemoveChild { .. } => "REMOVE_CHILD",
            TransformOp::MoveChild { .. } => "MOVE_CHILD",
            TransformOp::ReplaceNode { .. } => "REPLACE_NODE",
            TransformOp::ForEach { .. } => "FOR_EACH",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransformationTemplate {
    pub name: String,
    pub source: GraphPattern,
    pub ops: Vec<TransformOp>,
}

impl TransformationTemplate {
    pub fn new(name: &str, source: GraphPattern, ops: Vec<TransformOp>) -> TransformationTemplate {
        TransformationTemplate { name: name.to_string(), source, ops }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Binding {
    pub roles: BTreeMap<Role, NodeId>,
    pub groups: BTreeMap<String, Vec<NodeId>>,
    pub values: BTreeMap<String, AttrValue>,
}

impl Binding {
    pub fn get(&self, role: &str) -> Option<NodeId> {
        self.roles.get(role).copied()
    }

    /// Bound node of a role the pattern requires.
    pub fn node(&self, role: &str) -> NodeId {
        self.roles[role]
    }

    pub fn bind(&mut self, role: &str, n: NodeId) {
        self.roles.insert(role.to_string(), n);
    }

    pub fn group(&self, name: &str) -> &[NodeId] {
        self.groups.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn set_group(&mut self, name: &str, nodes: Vec<NodeId>) {
        self.groups.insert(name.to_string(), nodes);
    }

    pub fn set_value(&mut self, name: &str, v: AttrValue) {
        self.values.insert(name.to_string(), v);
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.roles.values().any(|x| *x == n)
    }

    /// Every node the match touches, roles first then groups.
    pub fn touched(&self) -> Vec<NodeId> {
        self.roles.values().chain(self.groups.values().flatten()).copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternMatch {
    pub root: NodeId,
    pub binding: Binding,
}

#[derive(Debug, Error, PartialEq)]
pub enum PatternError {
    #[error("template `{template}` still matched after {cap} passes")]
    NonTermination { template: String, cap: usize },
    #[error("role `{0}` is not bound")]
    UnboundRole(Role),
    #[error("invalid op: {0}")]
    InvalidOp(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum DerivationError {
    #[error("role `{0}` appears only in the target and has no single kind to create")]
    Uncreatable(Role),
    #[error("duplicate role `{0}`")]
    DuplicateRole(Role),
}
