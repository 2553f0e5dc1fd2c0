//! Evaluation-order graph.
//!
//! Conventions per construct (all node-level, operands before operators):
//!
//! - method: the declaration node is the entry, then each `ParamDecl`, then
//!   the body; falling off the end or `return`/`throw` flows to a virtual exit
//! - `LocalVarDecl`, `ExprStmt`, `Assign`: sub-expressions, then the statement
//!   node; an assignment target is not evaluated except for the receiver of a
//!   field target, which comes before the value
//! - `a && b` / `a || b`: the last node of `a` branches; `b` is only entered on
//!   the `true` (resp. `false`) edge, both paths join at the operator node
//! - `if`: condition, the `IfStmt` node branching `true` into the then-block
//!   and `false` into the else-block (or straight to the successor)
//! - `while`: condition, the `WhileStmt` node branching `true` into the body
//!   and `false` out; the body end loops back to the first condition node
//! - `for`: init, condition, the `ForStmt` node, body, update, back edge to the
//!   condition
//! - blocks contribute no node of their own

use std::collections::{BTreeMap, HashMap};

use crate::frontend::ast::{Ast, NodeId, NodeKind, Op};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EogEdge {
    pub dst: NodeId,
    /// `Some(b)` on the outgoing edges of a branch node.
    pub branch: Option<bool>,
    /// Loop back-edge.
    pub back: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodFlow {
    pub entry: NodeId,
    /// Executable nodes in construction order (entry first).
    pub nodes: Vec<NodeId>,
    pub succ: BTreeMap<NodeId, Vec<EogEdge>>,
    /// Nodes with an edge to the virtual exit.
    pub exits: Vec<NodeId>,
}

impl MethodFlow {
    pub fn successors(&self, n: NodeId) -> &[EogEdge] {
        self.succ.get(&n).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn predecessors(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut pred: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for n in &self.nodes {
            pred.entry(*n).or_default();
        }
        for (src, edges) in &self.succ {
            for e in edges {
                pred.entry(e.dst).or_default().push(*src);
            }
        }
        pred
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.succ.contains_key(&n)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Eog {
    pub flows: BTreeMap<NodeId, MethodFlow>,
    /// Executable node to its method.
    pub owner: HashMap<NodeId, NodeId>,
}

impl Eog {
    pub fn build(ast: &Ast) -> Eog {
        let mut eog = Eog::default();
        for m in ast.callables() {
            let flow = build_method(ast, m);
            for n in &flow.nodes {
                eog.owner.insert(*n, m);
            }
            eog.flows.insert(m, flow);
        }
        eog
    }

    pub fn flow(&self, method: NodeId) -> Option<&MethodFlow> {
        self.flows.get(&method)
    }
}

type Exits = Vec<(NodeId, Option<bool>)>;

struct Builder<'a> {
    ast: &'a Ast,
    flow: MethodFlow,
}

pub fn build_method(ast: &Ast, method: NodeId) -> MethodFlow {
    let mut b = Builder {
        ast,
        flow: MethodFlow { entry: method, nodes: Vec::new(), succ: BTreeMap::new(), exits: Vec::new() },
    };
    b.visit(method);
    let mut exits: Exits = vec![(method, None)];
    for p in ast.params(method) {
        exits = b.node(p, exits);
    }
    if let Some(body) = ast.body(method) {
        exits = b.stmt(body, exits);
    }
    for (n, _) in exits {
        b.flow.exits.push(n);
    }
    b.flow
}

/// First node evaluated for an expression.
pub fn first_node(ast: &Ast, mut e: NodeId) -> NodeId {
    loop {
        match ast.children(e).first() {
            Some(c) if ast.kind(e).is_expression() => e = *c,
            _ => return e,
        }
    }
}

impl Builder<'_> {
    fn visit(&mut self, n: NodeId) {
        if !self.flow.succ.contains_key(&n) {
            self.flow.succ.insert(n, Vec::new());
            self.flow.nodes.push(n);
        }
    }

    fn connect(&mut self, preds: &Exits, dst: NodeId, back: bool) {
        for (src, branch) in preds {
            let edge = EogEdge { dst, branch: *branch, back };
            let list = self.flow.succ.entry(*src).or_default();
            if !list.contains(&edge) {
                list.push(edge);
            }
        }
    }

    fn node(&mut self, n: NodeId, preds: Exits) -> Exits {
        self.visit(n);
        self.connect(&preds, n, false);
        vec![(n, None)]
    }

    fn expr(&mut self, e: NodeId, preds: Exits) -> Exits {
        let ast = self.ast;
        let kids = ast.children(e).to_vec();
        match (ast.kind(e), ast.attrs(e).op) {
            (NodeKind::BinaryOp, Some(op @ (Op::And | Op::Or))) => {
                let left = self.expr(kids[0], preds);
                let enter_rhs = op == Op::And;
                let into_rhs: Exits = left.iter().map(|(n, _)| (*n, Some(enter_rhs))).collect();
                let skip: Exits = left.iter().map(|(n, _)| (*n, Some(!enter_rhs))).collect();
                let mut right = self.expr(kids[1], into_rhs);
                right.extend(skip);
                self.node(e, right)
            }
            _ => {
                let mut cur = preds;
                for k in kids {
                    cur = self.expr(k, cur);
                }
                self.node(e, cur)
            }
        }
    }

    fn stmt(&mut self, s: NodeId, preds: Exits) -> Exits {
        let ast = self.ast;
        let kids = ast.children(s).to_vec();
        match ast.kind(s) {
            NodeKind::Block => {
                let mut cur = preds;
                for k in kids {
                    cur = self.stmt(k, cur);
                }
                cur
            }
            NodeKind::LocalVarDecl | NodeKind::ExprStmt => {
                let mut cur = preds;
                for k in kids {
                    cur = self.expr(k, cur);
                }
                self.node(s, cur)
            }
            NodeKind::Assign => {
                let mut cur = preds;
                let target = kids[0];
                if ast.kind(target) == NodeKind::FieldAccess {
                    cur = self.expr(ast.children(target)[0], cur);
                }
                cur = self.expr(kids[1], cur);
                self.node(s, cur)
            }
            NodeKind::IfStmt => {
                let c = self.expr(kids[0], preds);
                self.node(s, c);
                let mut out = self.stmt(kids[1], vec![(s, Some(true))]);
                match kids.get(2) {
                    Some(e) => out.extend(self.stmt(*e, vec![(s, Some(false))])),
                    None => out.push((s, Some(false))),
                }
                out
            }
            NodeKind::WhileStmt => {
                let c = self.expr(kids[0], preds);
                self.node(s, c);
                let body = self.stmt(kids[1], vec![(s, Some(true))]);
                let head = first_node(ast, kids[0]);
                self.connect(&body, head, true);
                vec![(s, Some(false))]
            }
            NodeKind::ForStmt => {
                let init = self.stmt(kids[0], preds);
                let c = self.expr(kids[1], init);
                self.node(s, c);
                let body = self.stmt(kids[3], vec![(s, Some(true))]);
                let update = self.stmt(kids[2], body);
                let head = first_node(ast, kids[1]);
                self.connect(&update, head, true);
                vec![(s, Some(false))]
            }
            NodeKind::ReturnStmt | NodeKind::ThrowStmt => {
                let mut cur = preds;
                for k in kids {
                    cur = self.expr(k, cur);
                }
                self.node(s, cur);
                self.flow.exits.push(s);
                Vec::new()
            }
            _ => self.expr(s, preds),
        }
    }
}
