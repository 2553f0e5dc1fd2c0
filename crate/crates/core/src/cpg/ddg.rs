//! Data dependences via reaching definitions over the EOG.
//!
//! Storage locations are locals/parameters (by declaration) and fields
//! (by name, no alias analysis). Every definition is a strong update of its
//! location.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::eog::{Eog, MethodFlow};
use crate::frontend::ast::{Ast, NodeId, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Loc {
    Local(NodeId),
    Field(String),
}

/// Location denoted by a `NameRef` or `FieldAccess`.
pub fn loc_of_ref(ast: &Ast, r: NodeId) -> Option<Loc> {
    let decl = ast.decl(r)?;
    let d = ast.get(decl)?;
    match d.kind {
        NodeKind::LocalVarDecl | NodeKind::ParamDecl => Some(Loc::Local(decl)),
        NodeKind::FieldDecl => d.attrs.name.clone().map(Loc::Field),
        _ => None,
    }
}

/// True when `r` is the target of an assignment (a pure write).
pub fn is_assign_target(ast: &Ast, r: NodeId) -> bool {
    ast.parent(r)
        .is_some_and(|p| ast.kind(p) == NodeKind::Assign && ast.child(p, 0) == Some(r))
}

/// Location written by an EOG node, if it is a definition.
pub fn def_loc(ast: &Ast, n: NodeId) -> Option<Loc> {
    let node = ast.node(n);
    match node.kind {
        NodeKind::LocalVarDecl if !node.children.is_empty() => Some(Loc::Local(n)),
        NodeKind::ParamDecl => Some(Loc::Local(n)),
        NodeKind::Assign => loc_of_ref(ast, node.children[0]),
        NodeKind::UnaryOp if node.attrs.op.is_some_and(|o| o.is_increment()) => loc_of_ref(ast, node.children[0]),
        _ => None,
    }
}

/// Location read by an EOG node, if it is a use.
pub fn use_loc(ast: &Ast, n: NodeId) -> Option<Loc> {
    match ast.kind(n) {
        NodeKind::NameRef | NodeKind::FieldAccess if !is_assign_target(ast, n) => loc_of_ref(ast, n),
        _ => None,
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ddg {
    pub pairs: BTreeSet<(NodeId, NodeId)>,
    pub uses_of: BTreeMap<NodeId, BTreeSet<NodeId>>,
    pub defs_of: BTreeMap<NodeId, BTreeSet<NodeId>>,
    pub def_locs: HashMap<NodeId, Loc>,
    pub use_locs: HashMap<NodeId, Loc>,
}

impl Ddg {
    pub fn build(ast: &Ast, eog: &Eog) -> Ddg {
        let mut ddg = Ddg::default();
        for flow in eog.flows.values() {
            for (d, u) in method_pairs(ast, flow) {
                ddg.insert(d, u);
            }
            for n in &flow.nodes {
                if let Some(l) = def_loc(ast, *n) {
                    ddg.def_locs.insert(*n, l);
                }
                if let Some(l) = use_loc(ast, *n) {
                    ddg.use_locs.insert(*n, l);
                }
            }
        }
        ddg
    }

    fn insert(&mut self, d: NodeId, u: NodeId) {
        self.pairs.insert((d, u));
        self.uses_of.entry(d).or_default().insert(u);
        self.defs_of.entry(u).or_default().insert(d);
    }

    pub fn uses(&self, def: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.uses_of.get(&def).into_iter().flatten().copied()
    }

    pub fn defs(&self, use_: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.defs_of.get(&use_).into_iter().flatten().copied()
    }
}

/// `(def, use)` pairs for one method.
pub fn method_pairs(ast: &Ast, flow: &MethodFlow) -> BTreeSet<(NodeId, NodeId)> {
    let index: HashMap<NodeId, usize> = flow.nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let defs: Vec<Option<Loc>> = flow.nodes.iter().map(|n| def_loc(ast, *n)).collect();
    let preds = flow.predecessors();
    let n = flow.nodes.len();
    let mut out_sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut changed = true;
    while changed {
        changed = false;
        for (i, node) in flow.nodes.iter().enumerate() {
            let mut inset: BTreeSet<usize> = BTreeSet::new();
            for p in &preds[node] {
                inset.extend(out_sets[index[p]].iter().copied());
            }
            if let Some(l) = &defs[i] {
                inset.retain(|d| defs[*d].as_ref() != Some(l));
                inset.insert(i);
            }
            if inset != out_sets[i] {
                out_sets[i] = inset;
                changed = true;
            }
        }
    }
    let mut pairs = BTreeSet::new();
    for (i, node) in flow.nodes.iter().enumerate() {
        let Some(l) = use_loc(ast, *node) else { continue };
        for p in &preds[node] {
            for d in &out_sets[index[p]] {
                if defs[*d].as_ref() == Some(&l) {
                    pairs.insert((flow.nodes[*d], flow.nodes[i]));
                }
            }
        }
    }
    pairs
}
