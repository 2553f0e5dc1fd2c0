//! Code property graph: the AST plus evaluation-order, data-dependence and
//! control-dependence layers.
//!
//! The AST arena is the single source of truth; the derived layers are
//! recomputed from it with [`Cpg::rebuild`] after every structural edit.

pub mod cdg;
pub mod ddg;
pub mod eog;
pub mod export;

use std::fmt;

use crate::frontend::ast::{Ast, NodeId, NodeKind};

pub use cdg::Cdg;
pub use ddg::{Ddg, Loc};
pub use eog::{Eog, EogEdge, MethodFlow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    Ast,
    Eog,
    Ddg,
    Cdg,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layer::Ast => "AST",
            Layer::Eog => "EOG",
            Layer::Ddg => "DDG",
            Layer::Cdg => "CDG",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CpgEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub layer: Layer,
    /// Child index (AST), `true`/`false`/`back` (EOG), branch (CDG).
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct Cpg {
    pub ast: Ast,
    pub eog: Eog,
    pub ddg: Ddg,
    pub cdg: Cdg,
}

impl Cpg {
    /// Builds all layers; `ast` must be resolved.
    pub fn build(ast: Ast) -> Cpg {
        let eog = Eog::build(&ast);
        let ddg = Ddg::build(&ast, &eog);
        let cdg = Cdg::build(&eog);
        Cpg { ast, eog, ddg, cdg }
    }

    pub fn rebuild(&mut self) {
        self.eog = Eog::build(&self.ast);
        self.ddg = Ddg::build(&self.ast, &self.eog);
        self.cdg = Cdg::build(&self.eog);
    }

    pub fn into_ast(self) -> Ast {
        self.ast
    }

    /// Entry nodes, one per method or constructor.
    pub fn entries(&self) -> Vec<NodeId> {
        self.eog.flows.keys().copied().collect()
    }

    pub fn data_dependencies(&self, method: NodeId) -> Vec<(NodeId, NodeId)> {
        match self.eog.flow(method) {
            Some(flow) => ddg::method_pairs(&self.ast, flow).into_iter().collect(),
            None => Vec::new(),
        }
    }

    pub fn control_dependence(&self, method: NodeId) -> Vec<CpgEdge> {
        match self.eog.flow(method) {
            Some(flow) => cdg::method_cdg(flow)
                .into_iter()
                .map(|(src, dst, b)| CpgEdge { src, dst, layer: Layer::Cdg, label: b.to_string() })
                .collect(),
            None => Vec::new(),
        }
    }

    /// Every edge of every layer in a deterministic order.
    pub fn edges(&self) -> Vec<CpgEdge> {
        let mut out = Vec::new();
        for n in self.ast.live_nodes() {
            for (i, c) in self.ast.children(n).iter().enumerate() {
                out.push(CpgEdge { src: n, dst: *c, layer: Layer::Ast, label: i.to_string() });
            }
        }
        for flow in self.eog.flows.values() {
            for (src, edges) in &flow.succ {
                for e in edges {
                    let label = match (e.back, e.branch) {
                        (true, _) => "back".to_string(),
                        (false, Some(b)) => b.to_string(),
                        (false, None) => "-".to_string(),
                    };
                    out.push(CpgEdge { src: *src, dst: e.dst, layer: Layer::Eog, label });
                }
            }
        }
        for (d, u) in &self.ddg.pairs {
            out.push(CpgEdge { src: *d, dst: *u, layer: Layer::Ddg, label: "-".into() });
        }
        for (p, d, b) in &self.cdg.edges {
            out.push(CpgEdge { src: *p, dst: *d, layer: Layer::Cdg, label: b.to_string() });
        }
        out
    }

    /// Method or constructor owning an executable node.
    pub fn method_of(&self, n: NodeId) -> Option<NodeId> {
        self.eog
            .owner
            .get(&n)
            .copied()
            .or_else(|| self.ast.enclosing_callable(n))
    }

    pub fn kind(&self, n: NodeId) -> NodeKind {
        self.ast.kind(n)
    }
}

/// Convenience: parse, resolve and build.
pub fn build_cpg(ast: Ast) -> Cpg {
    Cpg::build(ast)
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeSet, HashSet};

    use super::*;
    use crate::frontend::load_str;

    fn cpg(src: &str) -> Cpg {
        Cpg::build(load_str(src).unwrap())
    }

    fn method(c: &Cpg, name: &str) -> NodeId {
        c.ast.callables().into_iter().find(|m| c.ast.name(*m) == Some(name)).unwrap()
    }

    #[test]
    fn single_def_use_pair() {
        let c = cpg("void f() { int a = 1; int b = a; }");
        let pairs = c.data_dependencies(method(&c, "f"));
        assert_eq!(pairs.len(), 1);
        let (d, u) = pairs[0];
        assert_eq!(c.ast.kind(d), NodeKind::LocalVarDecl);
        assert_eq!(c.ast.name(d), Some("a"));
        assert_eq!(c.ast.kind(u), NodeKind::NameRef);
    }

    #[test]
    fn killed_definition() {
        let c = cpg("void f() { int x = 1; x = 2; println(x); }");
        let pairs = c.data_dependencies(method(&c, "f"));
        assert_eq!(pairs.len(), 1);
        assert_eq!(c.ast.kind(pairs[0].0), NodeKind::Assign);
    }

    #[test]
    fn loop_carried_dependence() {
        let c = cpg("void printRoots(int n) { int i = 0; while (i < n) { double d = sqrt(i); println(++d); i++; } }");
        let pairs = c.data_dependencies(method(&c, "printRoots"));
        let inc = c
            .ast
            .live_nodes()
            .into_iter()
            .filter(|n| c.ast.kind(*n) == NodeKind::UnaryOp)
            .find(|n| c.ast.name(c.ast.children(*n)[0]) == Some("i"))
            .unwrap();
        let cond_i = c.ast.children(c.ast.live_nodes().into_iter().find(|n| c.ast.kind(*n) == NodeKind::WhileStmt).unwrap())[0];
        let cond_i = c.ast.children(cond_i)[0];
        assert!(pairs.contains(&(inc, cond_i)));
    }

    #[test]
    fn if_dependence() {
        let c = cpg("void a() {} void f(boolean c) { if (c) { a(); } }");
        let m = method(&c, "f");
        let call = c.ast.live_nodes().into_iter().find(|n| c.ast.kind(*n) == NodeKind::Call).unwrap();
        let iff = c.ast.live_nodes().into_iter().find(|n| c.ast.kind(*n) == NodeKind::IfStmt).unwrap();
        let deps = c.control_dependence(m);
        assert!(deps.iter().any(|e| e.src == iff && e.dst == call && e.label == "true"));
    }

    #[test]
    fn straight_line_has_no_control_dependence() {
        let c = cpg("void f(int a) { int b = a + 1; println(b); b = 3; }");
        assert!(c.control_dependence(method(&c, "f")).is_empty());
    }

    #[test]
    fn nested_if_in_while_chains_dependences() {
        let c = cpg("void f(int n) { int i = 0; while (i < n) { if (i > 1) { println(i); } i++; } }");
        let m = method(&c, "f");
        let deps = c.control_dependence(m);
        let preds_of = |n: NodeId| -> BTreeSet<NodeKind> {
            deps.iter().filter(|e| e.dst == n).map(|e| c.ast.kind(e.src)).collect()
        };
        let call = c.ast.live_nodes().into_iter().find(|n| c.ast.kind(*n) == NodeKind::Call).unwrap();
        let iff = c.ast.live_nodes().into_iter().find(|n| c.ast.kind(*n) == NodeKind::IfStmt).unwrap();
        assert_eq!(preds_of(call), BTreeSet::from([NodeKind::IfStmt]));
        assert_eq!(preds_of(iff), BTreeSet::from([NodeKind::WhileStmt]));
    }

    #[test]
    fn layers_are_disjoint_and_valid() {
        let c = cpg("class A { int v; int g(int x) { if (x > v && x < 9) { v = x; } return v; } }");
        let edges = c.edges();
        let mut seen = HashSet::new();
        for e in &edges {
            assert!(c.ast.contains(e.src) && c.ast.contains(e.dst));
            assert!(seen.insert((e.src, e.dst, e.layer, e.label.clone())));
        }
    }
}
