//! Conservative effect summaries for statements and expressions.
//!
//! User methods and constructors are treated as impure and as reading and
//! writing every field. Builtins carry their own purity flags.

use std::collections::BTreeSet;

use crate::cpg::ddg::{is_assign_target, loc_of_ref};
use crate::cpg::Loc;
use crate::frontend::ast::{Ast, Literal, NodeId, NodeKind, Op, Type};
use crate::frontend::types::{builtin_of, is_class_ref, nullable, type_of};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub reads: BTreeSet<Loc>,
    pub writes: BTreeSet<Loc>,
    pub reads_all_fields: bool,
    pub writes_all_fields: bool,
    /// Output, input, user calls or object creation.
    pub impure: bool,
    pub may_fault: bool,
    /// Contains `return` or `throw`.
    pub transfers: bool,
    pub loops: bool,
}

impl Summary {
    /// Must keep its position relative to other ordered statements.
    pub fn ordered(&self) -> bool {
        self.impure || self.may_fault || self.transfers || self.loops
    }

    pub fn writes_field(&self) -> bool {
        self.writes_all_fields || self.writes.iter().any(|l| matches!(l, Loc::Field(_)))
    }

    fn touches_field(&self) -> bool {
        self.reads_all_fields
            || self.writes_all_fields
            || self.reads.iter().chain(&self.writes).any(|l| matches!(l, Loc::Field(_)))
    }

    pub fn conflicts(&self, other: &Summary) -> bool {
        if self.transfers || other.transfers || (self.ordered() && other.ordered()) {
            return true;
        }
        if (self.writes_all_fields && other.touches_field()) || (other.writes_all_fields && self.touches_field()) {
            return true;
        }
        let field_read = |s: &Summary, l: &Loc| matches!(l, Loc::Field(_)) && s.reads_all_fields;
        self.writes.iter().any(|l| other.reads.contains(l) || other.writes.contains(l) || field_read(other, l))
            || other.writes.iter().any(|l| self.reads.contains(l) || field_read(self, l))
    }
}

/// Node-level fault check (children are checked separately).
fn node_may_fault(ast: &Ast, n: NodeId) -> bool {
    let node = ast.node(n);
    match node.kind {
        NodeKind::BinaryOp => match node.attrs.op {
            Some(Op::Div | Op::Rem) => {
                let int = |c: NodeId| matches!(type_of(ast, c), Some(Type::Int) | None);
                let rhs = node.children[1];
                let safe_rhs = matches!(ast.attrs(rhs).value, Some(Literal::Int(v)) if v != 0);
                int(node.children[0]) && int(rhs) && !safe_rhs
            }
            _ => false,
        },
        NodeKind::Call => builtin_of(ast, n).is_none_or(|b| b.may_fault()),
        NodeKind::New => true,
        NodeKind::OptionalUnwrap => node.attrs.op == Some(Op::Get),
        NodeKind::OptionalWrap => {
            let arg = node.children[0];
            node.attrs.op == Some(Op::Of)
                && type_of(ast, arg).is_none_or(|t| nullable(&t))
                && !matches!(ast.kind(arg), NodeKind::New)
                && !matches!(ast.attrs(arg).value, Some(Literal::Str(_)))
        }
        NodeKind::FieldAccess => {
            let recv = node.children[0];
            !(ast.kind(recv) == NodeKind::This || is_class_ref(ast, recv))
        }
        _ => false,
    }
}

pub fn may_fault(ast: &Ast, e: NodeId) -> bool {
    ast.preorder(e).into_iter().any(|n| node_may_fault(ast, n))
}

/// No observable effect and no writes: no user calls, no impure builtins,
/// no object creation, no assignments or increments.
pub fn is_pure(ast: &Ast, e: NodeId) -> bool {
    ast.preorder(e).into_iter().all(|n| {
        let node = ast.node(n);
        match node.kind {
            NodeKind::Call => builtin_of(ast, n).is_some_and(|b| !b.is_impure()),
            NodeKind::New | NodeKind::Assign | NodeKind::LocalVarDecl => false,
            NodeKind::UnaryOp => !node.attrs.op.is_some_and(|o| o.is_increment()),
            _ => !node.kind.is_statement() || node.kind == NodeKind::ExprStmt,
        }
    })
}

/// Pure and unable to fault.
pub fn is_safe(ast: &Ast, e: NodeId) -> bool {
    is_pure(ast, e) && !may_fault(ast, e)
}

pub fn summarize(ast: &Ast, s: NodeId) -> Summary {
    let mut sum = Summary::default();
    for n in ast.preorder(s) {
        let node = ast.node(n);
        match node.kind {
            NodeKind::NameRef | NodeKind::FieldAccess => {
                if let Some(l) = loc_of_ref(ast, n) {
                    if !is_assign_target(ast, n) {
                        sum.reads.insert(l);
                    }
                }
            }
            NodeKind::Assign => {
                if let Some(l) = loc_of_ref(ast, node.children[0]) {
                    sum.writes.insert(l);
                }
            }
            NodeKind::UnaryOp if node.attrs.op.is_some_and(|o| o.is_increment()) => {
                if let Some(l) = loc_of_ref(ast, node.children[0]) {
                    sum.writes.insert(l);
                }
            }
            NodeKind::LocalVarDecl => {
                sum.writes.insert(Loc::Local(n));
            }
            NodeKind::Call => match builtin_of(ast, n) {
                Some(b) => sum.impure |= b.is_impure(),
                None => {
                    sum.impure = true;
                    sum.reads_all_fields = true;
                    sum.writes_all_fields = true;
                }
            },
            NodeKind::New => {
                sum.impure = true;
                sum.reads_all_fields = true;
                sum.writes_all_fields = true;
            }
            NodeKind::ReturnStmt | NodeKind::ThrowStmt => sum.transfers = true,
            NodeKind::WhileStmt | NodeKind::ForStmt => sum.loops = true,
            _ => {}
        }
        sum.may_fault |= node_may_fault(ast, n);
    }
    sum
}

/// Locations read by an expression, and whether it reads fields through a
/// user call.
pub fn inputs(ast: &Ast, e: NodeId) -> BTreeSet<Loc> {
    summarize(ast, e).reads
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_str;

    fn first(ast: &Ast, kind: NodeKind) -> NodeId {
        ast.live_nodes().into_iter().find(|n| ast.kind(*n) == kind).unwrap()
    }

    fn init_of(src: &str) -> (Ast, NodeId) {
        let ast = load_str(src).unwrap();
        let d = first(&ast, NodeKind::LocalVarDecl);
        let e = ast.children(d)[0];
        (ast, e)
    }

    #[test]
    fn division_faults_unless_literal_divisor() {
        let (ast, e) = init_of("void f(int a, int b) { int x = a / b; }");
        assert!(may_fault(&ast, e));
        let (ast, e) = init_of("void f(int a) { int x = a / 2; }");
        assert!(!may_fault(&ast, e));
        let (ast, e) = init_of("void f(double a, int b) { double x = a / b; }");
        assert!(!may_fault(&ast, e));
    }

    #[test]
    fn purity() {
        let (ast, e) = init_of("void f(int a) { double x = sqrt(a) + abs(a); }");
        assert!(is_safe(&ast, e));
        let (ast, e) = init_of("void f() { String s = readLine(); }");
        assert!(!is_pure(&ast, e));
        let (ast, e) = init_of("int g() { return 1; } void f() { int x = g(); }");
        assert!(!is_pure(&ast, e));
        let (ast, e) = init_of("void f() { int x = parseInt(\"1\"); }");
        assert!(is_pure(&ast, e) && may_fault(&ast, e));
    }

    #[test]
    fn summaries_conflict_on_shared_locations() {
        let ast = load_str("void f() { int a = 1; int b = 2; a = b; println(a); }").unwrap();
        let body = ast.body(first(&ast, NodeKind::MethodDecl)).unwrap();
        let s: Vec<Summary> = ast.children(body).iter().map(|c| summarize(&ast, *c)).collect();
        assert!(!s[0].conflicts(&s[1]));
        assert!(s[0].conflicts(&s[2]));
        assert!(s[1].conflicts(&s[2]));
        assert!(s[2].conflicts(&s[3]));
        assert!(s[3].impure && !s[0].ordered());
    }
}
