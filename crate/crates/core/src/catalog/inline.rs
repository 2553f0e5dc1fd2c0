//! Single-use locals and increments.
//!
//! Increment statements become plain assignments, increments whose written
//! value is never read become the value they yield, and a definition read
//! exactly once is substituted into that read when nothing on the way can
//! change its value.

use std::collections::BTreeSet;

use super::effects::{inputs, is_safe};
use super::query::{clean_path, field_names_visible, in_block, is_read, reaches_forward, refs_to};
use crate::cpg::ddg::def_loc;
use crate::cpg::{Cpg, Loc};
use crate::frontend::ast::{AttrKey, AttrValue, Attrs, Literal, NodeId, NodeKind, Op};
use crate::frontend::types::{decl_type, type_of};
use crate::pattern::{AttrSource, Binding, GraphPattern, InsertAt, NodePattern, TransformOp, TransformationTemplate};

fn is_inc(a: &Attrs) -> bool {
    a.op.is_some_and(|o| o.is_increment())
}

fn is_pre(a: &Attrs) -> bool {
    matches!(a.op, Some(Op::PreInc | Op::PreDec))
}

fn is_post(a: &Attrs) -> bool {
    matches!(a.op, Some(Op::PostInc | Op::PostDec))
}

fn set_step_op(cpg: &Cpg, b: &mut Binding) -> bool {
    let op = match cpg.ast.attrs(b.node("inc")).op {
        Some(Op::PreInc | Op::PostInc) => Op::Add,
        _ => Op::Sub,
    };
    b.set_value("op", AttrValue::Op(op));
    true
}

fn one() -> TransformOp {
    TransformOp::create_with("one", NodeKind::Literal, vec![(AttrKey::Value, AttrSource::Const(AttrValue::Lit(Literal::Int(1))))])
}

fn step() -> TransformOp {
    TransformOp::create_with("step", NodeKind::BinaryOp, vec![(AttrKey::Op, AttrSource::Value("op".into()))])
}

/// `x++;` as `x = x + 1;` for a target given by `copy` ops building role
/// `again` (a second reference to the same location).
fn increment_statement(name: &str, target: NodePattern, copy: Vec<TransformOp>) -> TransformationTemplate {
    let p = NodePattern::new("stmt", NodeKind::ExprStmt)
        .at(0, NodePattern::new("inc", NodeKind::UnaryOp).test("increment", is_inc).at(0, target));
    let mut ops = vec![TransformOp::create("assign", NodeKind::Assign), step(), one()];
    ops.extend(copy);
    ops.extend([
        TransformOp::move_to("target", "assign", InsertAt::Index(0)),
        TransformOp::add("step", "again", InsertAt::Last),
        TransformOp::add("step", "one", InsertAt::Last),
        TransformOp::add("assign", "step", InsertAt::Last),
        TransformOp::replace("stmt", "assign"),
    ]);
    TransformationTemplate::new(name, GraphPattern::new(p).with("step operator", set_step_op), ops)
}

fn name_copy(role: &str, from: &str) -> TransformOp {
    TransformOp::create_with(
        role,
        NodeKind::NameRef,
        vec![(AttrKey::Name, AttrSource::Role(from.into(), AttrKey::Name)), (AttrKey::Decl, AttrSource::DeclOf(from.into()))],
    )
}

fn access_copy(ops: &mut Vec<TransformOp>) {
    ops.insert(
        0,
        TransformOp::create_with(
            "again",
            NodeKind::FieldAccess,
            vec![(AttrKey::Name, AttrSource::Role("target".into(), AttrKey::Name)), (AttrKey::Decl, AttrSource::DeclOf("target".into()))],
        ),
    );
    ops.push(TransformOp::add("again", "recv_copy", InsertAt::Index(0)));
}

pub fn increment_statements() -> Vec<TransformationTemplate> {
    let name = increment_statement("increment to assignment", NodePattern::new("target", NodeKind::NameRef), vec![name_copy("again", "target")]);
    let mut this_ops = vec![TransformOp::create("recv_copy", NodeKind::This)];
    access_copy(&mut this_ops);
    let this_field = increment_statement(
        "field increment to assignment",
        NodePattern::new("target", NodeKind::FieldAccess).at(0, NodePattern::new("recv", NodeKind::This)),
        this_ops,
    );
    let mut named_ops = vec![name_copy("recv_copy", "recv")];
    access_copy(&mut named_ops);
    let named_field = increment_statement(
        "qualified increment to assignment",
        NodePattern::new("target", NodeKind::FieldAccess).at(0, NodePattern::new("recv", NodeKind::NameRef)),
        named_ops,
    );
    vec![name, this_field, named_field]
}

fn dead_increment(cpg: &Cpg, b: &mut Binding) -> bool {
    let ast = &cpg.ast;
    let inc = b.node("inc");
    let in_stmt = ast.parent(inc).is_some_and(|p| ast.kind(p) == NodeKind::ExprStmt);
    !in_stmt && matches!(def_loc(ast, inc), Some(Loc::Local(_))) && cpg.ddg.uses(inc).next().is_none()
}

/// Increments inside expressions whose stored value is never read.
pub fn dead_increments() -> Vec<TransformationTemplate> {
    let pre = NodePattern::new("inc", NodeKind::UnaryOp).test("pre", is_pre).at(0, NodePattern::new("target", NodeKind::NameRef));
    let post = NodePattern::new("inc", NodeKind::UnaryOp).test("post", is_post).at(0, NodePattern::new("target", NodeKind::NameRef));
    vec![
        TransformationTemplate::new(
            "dead pre-increment to sum",
            GraphPattern::new(pre).with("stored value unread", dead_increment).with("step operator", set_step_op),
            vec![
                step(),
                one(),
                TransformOp::move_to("target", "step", InsertAt::Index(0)),
                TransformOp::add("step", "one", InsertAt::Last),
                TransformOp::replace("inc", "step"),
            ],
        ),
        TransformationTemplate::new(
            "dead post-increment to value",
            GraphPattern::new(post).with("stored value unread", dead_increment),
            vec![TransformOp::replace("inc", "target")],
        ),
    ]
}

/// Shared conditions for substituting `value` (defined at `def`) into the
/// read `use`.
fn substitutable(cpg: &Cpg, def: NodeId, value: NodeId, use_: NodeId, loc_decl: NodeId) -> bool {
    let ast = &cpg.ast;
    ast.kind(use_) == NodeKind::NameRef
        && is_read(ast, use_)
        && type_of(ast, value).is_some()
        && type_of(ast, value) == decl_type(ast, loc_decl)
        && is_safe(ast, value)
        && field_names_visible(ast, value, use_)
        && reaches_forward(cpg, def, use_)
        && clean_path(cpg, def, use_, &inputs(ast, value))
}

pub fn single_use_declarations() -> TransformationTemplate {
    let p = NodePattern::new("decl", NodeKind::LocalVarDecl).at(0, NodePattern::any("value"));
    let source = GraphPattern::new(p).with("referenced once by a read", |cpg, b| {
        let d = b.node("decl");
        let [u] = refs_to(&cpg.ast, d)[..] else { return false };
        if !substitutable(cpg, d, b.node("value"), u, d) {
            return false;
        }
        b.bind("use", u);
        true
    });
    TransformationTemplate::new(
        "inline single-use variables",
        source,
        vec![TransformOp::replace("use", "value"), TransformOp::delete("decl")],
    )
}

/// The only use of `def`, provided `def` is also its only reaching
/// definition.
fn sole_use(cpg: &Cpg, def: NodeId) -> Option<NodeId> {
    let uses: BTreeSet<NodeId> = cpg.ddg.uses(def).collect();
    let [u] = uses.into_iter().collect::<Vec<_>>()[..] else { return None };
    let defs: Vec<NodeId> = cpg.ddg.defs(u).collect();
    (defs == [def]).then_some(u)
}

fn single_use_definition(cpg: &Cpg, b: &mut Binding) -> bool {
    let ast = &cpg.ast;
    let d = b.node("def");
    let Some(Loc::Local(decl)) = def_loc(ast, d) else { return false };
    if !in_block(ast, d) {
        return false;
    }
    let Some(u) = sole_use(cpg, d) else { return false };
    if !substitutable(cpg, d, b.node("value"), u, decl) {
        return false;
    }
    b.bind("use", u);
    true
}

pub fn single_use_definitions() -> Vec<TransformationTemplate> {
    let assign = NodePattern::new("def", NodeKind::Assign)
        .at(0, NodePattern::new("target", NodeKind::NameRef))
        .at(1, NodePattern::any("value"));
    let decl = NodePattern::new("def", NodeKind::LocalVarDecl).at(0, NodePattern::any("value"));
    vec![
        TransformationTemplate::new(
            "inline single-use assignment",
            GraphPattern::new(assign).with("sole reaching definition of one read", single_use_definition),
            vec![TransformOp::replace("use", "value"), TransformOp::delete("def")],
        ),
        TransformationTemplate::new(
            "inline single-use initializer",
            GraphPattern::new(decl).with("sole reaching definition of one read", single_use_definition),
            vec![TransformOp::replace("use", "value")],
        ),
    ]
}

pub fn templates() -> Vec<TransformationTemplate> {
    let mut out = increment_statements();
    out.extend(dead_increments());
    out.push(single_use_declarations());
    out.extend(single_use_definitions());
    out
}
