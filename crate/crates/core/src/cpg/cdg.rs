//! Control dependences from post-dominators of the per-method EOG.
//!
//! A virtual exit node closes every method. For a branch edge `a -> b`,
//! every node that post-dominates `b` but does not strictly post-dominate
//! `a` is control dependent on `a` with the edge's branch label.

use std::collections::{BTreeMap, BTreeSet};

use super::eog::{Eog, MethodFlow};
use crate::frontend::ast::NodeId;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cdg {
    /// `(predicate, dependent, branch)`.
    pub edges: BTreeSet<(NodeId, NodeId, bool)>,
}

impl Cdg {
    pub fn build(eog: &Eog) -> Cdg {
        let mut cdg = Cdg::default();
        for flow in eog.flows.values() {
            cdg.edges.extend(method_cdg(flow));
        }
        cdg
    }

    /// Predicates `n` depends on.
    pub fn controllers(&self, n: NodeId) -> Vec<(NodeId, bool)> {
        self.edges.iter().filter(|e| e.1 == n).map(|e| (e.0, e.2)).collect()
    }
}

/// Post-dominator sets; `None` stands for the virtual exit.
pub fn post_dominators(flow: &MethodFlow) -> BTreeMap<NodeId, BTreeSet<Option<NodeId>>> {
    let all: BTreeSet<Option<NodeId>> = flow.nodes.iter().map(|n| Some(*n)).chain([None]).collect();
    let exits: BTreeSet<NodeId> = flow.exits.iter().copied().collect();
    let mut pdom: BTreeMap<NodeId, BTreeSet<Option<NodeId>>> = flow.nodes.iter().map(|n| (*n, all.clone())).collect();
    let order: Vec<NodeId> = flow.nodes.iter().rev().copied().collect();
    let mut changed = true;
    while changed {
        changed = false;
        for n in &order {
            let mut acc: Option<BTreeSet<Option<NodeId>>> = None;
            let mut meet = |s: &BTreeSet<Option<NodeId>>| {
                acc = Some(match acc.take() {
                    None => s.clone(),
                    Some(a) => a.intersection(s).copied().collect(),
                });
            };
            if exits.contains(n) {
                meet(&BTreeSet::from([None]));
            }
            for e in flow.successors(*n) {
                meet(&pdom[&e.dst].clone());
            }
            let mut new = acc.unwrap_or_else(|| all.clone());
            new.insert(Some(*n));
            if new != pdom[n] {
                pdom.insert(*n, new);
                changed = true;
            }
        }
    }
    pdom
}

pub fn method_cdg(flow: &MethodFlow) -> BTreeSet<(NodeId, NodeId, bool)> {
    let pdom = post_dominators(flow);
    let mut out = BTreeSet::new();
    for a in &flow.nodes {
        for e in flow.successors(*a) {
            let Some(label) = e.branch else { continue };
            let strict_a: BTreeSet<_> = pdom[a].iter().filter(|x| **x != Some(*a)).copied().collect();
            for y in pdom[&e.dst].iter().flatten() {
                if !strict_a.contains(&Some(*y)) {
                    out.insert((*a, *y, label));
                }
            }
        }
    }
    out
}
