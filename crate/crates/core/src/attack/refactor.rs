//! Refactoring attack edits. Each proposer returns `None` only when the
//! program has no applicable site.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::build::{call, capitalize, field_access, fresh, item, literal, member, name_ref, names, statements, wrap};
use super::insertion::{body_blocks, harmless, insert_limit, plain_type};
use super::{location, EditKind, Proposal};
use crate::evalx::interp::entry_point;
use crate::frontend::ast::{Ast, Attrs, Literal, NodeId, NodeKind, Op, Span, Type};
use crate::frontend::types::{is_class_ref, type_of};

pub fn propose(kind: EditKind, ast: &Ast, rng: &mut ChaCha8Rng) -> Proposal {
    use EditKind::*;
    match kind {
        WrapOptionalVariable => wrap_variable(ast, rng),
        WrapOptionalValue => wrap_value(ast, rng),
        ExtractVariable => extract_variable(ast, rng),
        ExtractConstant => extract_constant(ast, rng),
        MoveConstant => move_constant(ast, rng),
        InvertEquality => swap_if(ast, rng, true),
        InvertNegation => swap_if(ast, rng, false),
        EmptyMethod => insert_method(ast, rng, false),
        UnsupportedMethod => insert_method(ast, rng, true),
        EmptyConstructor => insert_constructor(ast, rng, false),
        UnsupportedConstructor => insert_constructor(ast, rng, true),
        EmptyClass => empty_class(ast, rng),
        AccessMethod => access_method(ast, rng),
        ForToWhile => for_to_while(ast, rng),
        DeadStatement | CopiedStatement => None,
    }
}

fn body_nodes(ast: &Ast) -> Vec<NodeId> {
    ast.callables().into_iter().filter_map(|m| ast.body(m)).flat_map(|b| ast.preorder(b)).collect()
}

fn is_lvalue(ast: &Ast, r: NodeId) -> bool {
    match ast.parent(r) {
        Some(p) => match ast.kind(p) {
            NodeKind::Assign => ast.child(p, 0) == Some(r),
            NodeKind::UnaryOp => ast.attrs(p).op.is_some_and(Op::is_increment),
            _ => false,
        },
        None => false,
    }
}

fn refs(ast: &Ast, decl: NodeId) -> Vec<NodeId> {
    ast.live_nodes()
        .into_iter()
        .filter(|n| matches!(ast.kind(*n), NodeKind::NameRef | NodeKind::FieldAccess) && ast.decl(*n) == Some(decl))
        .collect()
}

fn file_of_node(ast: &Ast, id: NodeId) -> NodeId {
    ast.ancestors(id).find(|a| ast.kind(*a) == NodeKind::File).unwrap_or_else(|| ast.children(ast.root())[0])
}

fn entry_file(ast: &Ast) -> NodeId {
    match entry_point(ast) {
        Some(m) => file_of_node(ast, m),
        None => ast.children(ast.root())[0],
    }
}

fn never_null(ast: &Ast, e: NodeId) -> bool {
    match type_of(ast, e) {
        Some(t) if t.is_primitive() => true,
        Some(Type::Str) => ast.kind(e) == NodeKind::Literal,
        _ => false,
    }
}

fn default_of(t: &Type) -> Literal {
    match t {
        Type::Int => Literal::Int(0),
        Type::Double => Literal::Double(0.0),
        Type::Boolean => Literal::Bool(false),
        _ => Literal::Str(String::new()),
    }
}

fn wrap_variable(ast: &Ast, rng: &mut ChaCha8Rng) -> Proposal {
    let sites: Vec<NodeId> = body_nodes(ast)
        .into_iter()
        .filter(|d| {
            if ast.kind(*d) != NodeKind::LocalVarDecl || ast.parent(*d).is_none_or(|p| ast.kind(p) != NodeKind::Block) {
                return false;
            }
            let Some(e) = ast.child(*d, 0) else { return false };
            let ty = ast.attrs(*d).ty.clone();
            ty.as_ref().is_some_and(|t| matches!(t, Type::Int | Type::Double | Type::Boolean | Type::Str))
                && type_of(ast, e) == ty
                && never_null(ast, e)
                && refs(ast, *d).iter().all(|r| !is_lvalue(ast, *r))
        })
        .collect();
    let d = *sites.choose(rng)?;
    let mut out = ast.clone();
    let inner = out.attrs(d).ty.clone().expect("typed");
    out.attrs_mut(d).ty = Some(Type::Optional(Box::new(inner)));
    let e = out.children(d)[0];
    let w = out.alloc(NodeKind::OptionalWrap, Attrs::op(Op::Of), Span::default());
    out.replace(e, w);
    out.push_child(w, e);
    for r in refs(ast, d) {
        let u = out.alloc(NodeKind::OptionalUnwrap, Attrs::op(Op::Get), Span::default());
        out.replace(r, u);
        out.push_child(u, r);
    }
    Some((out, location(ast, d)))
}

fn wrap_value(ast: &Ast, rng: &mut ChaCha8Rng) -> Proposal {
    let sites: Vec<NodeId> = body_nodes(ast)
        .into_iter()
        .filter(|e| {
            ast.kind(*e).is_expression()
                && !is_lvalue(ast, *e)
                && !is_class_ref(ast, *e)
                && never_null(ast, *e)
                && ast.parent(*e).is_some_and(|p| ast.kind(p) != NodeKind::OptionalWrap)
        })
        .collect();
    let e = *sites.choose(rng)?;
    let mut out = ast.clone();
    let default = rng.gen_bool(0.5).then(|| {
        let t = type_of(ast, e).expect("typed");
        literal(&mut out, default_of(&t))
    });
    let op = if default.is_some() { Op::OrElse } else { Op::Get };
    let u = out.alloc(NodeKind::OptionalUnwrap, Attrs::op(op), Span::default());
    out.replace(e, u);
    let w = wrap(&mut out, e);
    out.push_child(u, w);
    if let Some(d) = default {
        out.push_child(u, d);
    }
    Some((out, location(ast, e)))
}

/// Part of a statement evaluated before anything else it contains.
fn leading_region(ast: &Ast, s: NodeId) -> Option<NodeId> {
    match ast.kind(s) {
        NodeKind::ExprStmt | NodeKind::LocalVarDecl | NodeKind::ReturnStmt | NodeKind::IfStmt => ast.child(s, 0),
        NodeKind::Assign => ast.child(s, 1),
        _ => None,
    }
}

fn has_increment(ast: &Ast, e: NodeId) -> bool {
    ast.preorder(e)
        .into_iter()
        .any(|n| ast.kind(n) == NodeKind::UnaryOp && ast.attrs(n).op.is_some_and(Op::is_increment))
}

fn extract_variable(ast: &Ast, rng: &mut ChaCha8Rng) -> Proposal {
    let mut sites = Vec::new();
    for b in body_blocks(ast) {
        for (i, s) in ast.children(b).iter().enumerate().take(insert_limit(ast, b)) {
            let Some(region) = leading_region(ast, *s) else { continue };
            if has_increment(ast, region) {
                continue;
            }
            for e in ast.preorder(region) {
                if !is_lvalue(ast, e) && harmless(ast, e) && plain_type(type_of(ast, e)).is_some() {
                    sites.push((b, i, e));
                }
            }
        }
    }
    let (b, i, e) = *sites.choose(rng)?;
    let mut out = ast.clone();
    let name = fresh(&names(ast), ["value", "result", "part", "term", "expr"].choose(rng).expect("names"));
    let ty = plain_type(type_of(ast, e)).expect("checked");
    let decl = out.alloc(NodeKind::LocalVarDecl, Attrs::typed(name.clone(), ty), Span::default());
    let r = name_ref(&mut out, &name);
    out.replace(e, r);
    out.push_child(decl, e);
    out.insert_child(b, i, decl);
    Some((out, location(ast, e)))
}

const CONTAINER: &str = "Constants";

fn is_container(ast: &Ast, c: NodeId) -> bool {
    ast.kind(c) == NodeKind::ClassDecl
        && ast.name(c).is_some_and(|n| n.starts_with(CONTAINER))
        && ast.children(c).iter().all(|f| {
            let a = ast.attrs(*f);
            ast.kind(*f) == NodeKind::FieldDecl && a.is_static && a.is_final
        })
}

/// A container class without a member called `field`, created in the
/// file of `near` when none exists. Returns its name and node in `out`.
fn container_for(ast: &Ast, out: &mut Ast, field: &str, near: NodeId) -> (String, NodeId) {
    for c in ast.classes() {
        if is_container(ast, c) && !ast.children(c).iter().any(|f| ast.name(*f) == Some(field)) {
            return (ast.name(c).expect("named").to_string(), c);
        }
    }
    let name = fresh(&names(ast), CONTAINER);
    let class = item(out, &format!("class {name} {{}}")).expect("class parses");
    out.push_child(file_of_node(ast, near), class);
    (name, class)
}

fn extract_constant(ast: &Ast, rng: &mut ChaCha8Rng) -> Proposal {
    let sites: Vec<NodeId> = body_nodes(ast)
        .into_iter()
        .filter(|n| ast.kind(*n) == NodeKind::Literal && !matches!(ast.attrs(*n).value, None | Some(Literal::Null)))
        .collect();
    let lit = *sites.choose(rng)?;
    let value = ast.attrs(lit).value.clone().expect("literal");
    let base = match value.ty() {
        Type::Int => "NUMBER",
        Type::Double => "FACTOR",
        Type::Boolean => "FLAG",
        _ => "TEXT",
    };
    let mut out = ast.clone();
    let field = fresh(&names(ast), base);
    let (cname, class) = container_for(ast, &mut out, &field, lit);
    let decl = member(&mut out, &cname, &format!("static final {} {field} = {};", value.ty(), value.source_text())).expect("field parses");
    out.push_child(class, decl);
    let recv = name_ref(&mut out, &cname);
    let access = field_access(&mut out, recv, &field);
    out.replace(lit, access);
    Some((out, location(ast, lit)))
}

fn move_constant(ast: &Ast, rng: &mut ChaCha8Rng) -> Proposal {
    let sites: Vec<NodeId> = ast
        .live_nodes()
        .into_iter()
        .filter(|f| {
            let a = ast.attrs(*f);
            if ast.kind(*f) != NodeKind::FieldDecl || !a.is_static || !a.is_final {
                return false;
            }
            if ast.child(*f, 0).is_none_or(|v| ast.kind(v) != NodeKind::Literal) {
                return false;
            }
            let Some(owner) = ast.parent(*f) else { return false };
            let rs = refs(ast, *f);
            !is_container(ast, owner)
                && !rs.is_empty()
                && rs.iter().all(|r| ast.enclosing_class(*r) == Some(owner) && ast.enclosing_callable(*r).is_some())
        })
        .collect();
    let f = *sites.choose(rng)?;
    let fname = ast.name(f).expect("named").to_string();
    let mut out = ast.clone();
    let (cname, class) = container_for(ast, &mut out, &fname, f);
    out.push_child(class, f);
    for r in refs(ast, f) {
        let recv = name_ref(&mut out, &cname);
        let access = field_access(&mut out, recv, &fname);
        out.replace(r, access);
    }
    Some((out, location(ast, f)))
}

fn swap_if(ast: &Ast, rng: &mut ChaCha8Rng, equality: bool) -> Proposal {
    let sites: Vec<NodeId> = body_nodes(ast)
        .into_iter()
        .filter(|s| {
            ast.kind(*s) == NodeKind::IfStmt && ast.children(*s).len() == 3 && {
                let c = ast.children(*s)[0];
                let eq = ast.kind(c) == NodeKind::BinaryOp && matches!(ast.attrs(c).op, Some(Op::Eq | Op::Ne));
                eq == equality
            }
        })
        .collect();
    let s = *sites.choose(rng)?;
    let mut out = ast.clone();
    let c = out.children(s)[0];
    match (out.kind(c), out.attrs(c).op) {
        (NodeKind::BinaryOp, Some(Op::Eq)) => out.attrs_mut(c).op = Some(Op::Ne),
        (NodeKind::BinaryOp, Some(Op::Ne)) => out.attrs_mut(c).op = Some(Op::Eq),
        (NodeKind::UnaryOp, Some(Op::Not)) => {
            let inner = out.children(c)[0];
            out.replace(c, inner);
        }
        _ => {
            let n = out.alloc(NodeKind::UnaryOp, Attrs::op(Op::Not), Span::default());
            out.replace(c, n);
            out.push_child(n, c);
        }
    }
    out.node_mut(s).children.swap(1, 2);
    Some((out, location(ast, s)))
}

const PARAM_TYPES: [Type; 4] = [Type::Int, Type::Double, Type::Boolean, Type::Str];

fn random_params(rng: &mut ChaCha8Rng, n: usize) -> Vec<Type> {
    (0..n).map(|_| PARAM_TYPES.choose(rng).expect("types").clone()).collect()
}

fn param_list(types: &[Type]) -> String {
    types.iter().enumerate().map(|(i, t)| format!("{t} arg{i}")).collect::<Vec<_>>().join(", ")
}

fn sample_arg(t: &Type, rng: &mut ChaCha8Rng) -> String {
    match t {
        Type::Int => rng.gen_range(0..100).to_string(),
        Type::Double => format!("{}.5", rng.gen_range(0..10)),
        Type::Boolean => rng.gen_bool(0.5).to_string(),
        _ => "\"x\"".into(),
    }
}

/// Exception class to throw, reusing an empty one made earlier.
fn exception_class(ast: &Ast, out: &mut Ast) -> String {
    const BASE: &str = "UnsupportedOperationException";
    for c in ast.classes() {
        if ast.name(c).is_some_and(|n| n.starts_with(BASE)) && ast.children(c).is_empty() {
            return ast.name(c).expect("named").to_string();
        }
    }
    let name = fresh(&names(ast), BASE);
    let class = item(out, &format!("class {name} {{}}")).expect("class parses");
    out.push_child(entry_file(ast), class);
    name
}

fn insert_method(ast: &Ast, rng: &mut ChaCha8Rng, throwing: bool) -> Proposal {
    // `None` stands for the top level.
    let mut targets: Vec<Option<NodeId>> = ast.classes().into_iter().map(Some).collect();
    targets.push(None);
    let target = *targets.choose(rng)?;
    let mut out = ast.clone();
    let name = fresh(&names(ast), ["helper", "process", "update", "refresh", "validate", "prepare"].choose(rng).expect("names"));
    let arity = rng.gen_range(0..=2);
    let params = random_params(rng, arity);
    let is_static = target.is_some() && rng.gen_bool(0.5);
    let modifier = if is_static { "static " } else { "" };
    let text = if throwing {
        let ret = [Type::Void, Type::Int, Type::Double, Type::Boolean, Type::Str].choose(rng).expect("types").clone();
        let exc = exception_class(ast, &mut out);
        format!("{modifier}{ret} {name}({}) {{ throw new {exc}(); }}", param_list(&params))
    } else {
        format!("{modifier}void {name}({}) {{}}", param_list(&params))
    };
    let anchor = match target {
        Some(c) => {
            let m = member(&mut out, ast.name(c).expect("named"), &text).expect("method parses");
            let at = rng.gen_range(0..=ast.children(c).len());
            out.insert_child(c, at, m);
            c
        }
        None => {
            let m = item(&mut out, &text).expect("method parses");
            let file = entry_file(ast);
            out.push_child(file, m);
            file
        }
    };
    if !throwing {
        let callers: Vec<NodeId> = body_blocks(ast)
            .into_iter()
            .filter(|b| match (target, ast.enclosing_callable(*b)) {
                (None, _) => true,
                (Some(c), Some(m)) => ast.enclosing_class(m) == Some(c) && (is_static || !ast.attrs(m).is_static),
                _ => false,
            })
            .collect();
        for _ in 0..rng.gen_range(0..=2) {
            let Some(b) = callers.choose(rng).copied() else { break };
            let args: Vec<String> = params.iter().map(|t| sample_arg(t, rng)).collect();
            let at = rng.gen_range(0..=insert_limit(&out, b));
            let stmt = statements(&mut out, &format!("{name}({});", args.join(", "))).expect("call parses");
            out.insert_child(b, at, stmt[0]);
        }
    }
    Some((out, location(ast, anchor)))
}

fn insert_constructor(ast: &Ast, rng: &mut ChaCha8Rng, throwing: bool) -> Proposal {
    let mut sites = Vec::new();
    for c in ast.classes() {
        let name = ast.name(c).expect("named");
        let arities: BTreeSet<usize> = ast
            .children(c)
            .iter()
            .filter(|m| ast.kind(**m) == NodeKind::ConstructorDecl)
            .map(|m| ast.params(*m).len())
            .collect();
        let instantiated = ast.live_nodes().into_iter().any(|n| ast.kind(n) == NodeKind::New && ast.name(n) == Some(name));
        let free: Vec<usize> = match (throwing, arities.is_empty()) {
            (false, true) => vec![0],
            (true, true) if instantiated => Vec::new(),
            (true, _) => (1..=3).filter(|k| !arities.contains(k)).collect(),
            (false, false) => (0..=3).filter(|k| !arities.contains(k)).collect(),
        };
        if !free.is_empty() {
            sites.push((c, free));
        }
    }
    let (c, free) = sites.choose(rng)?.clone();
    let arity = *free.choose(rng).expect("non-empty");
    let cname = ast.name(c).expect("named").to_string();
    let mut out = ast.clone();
    let params = param_list(&random_params(rng, arity));
    let body = if throwing { format!("throw new {}();", exception_class(ast, &mut out)) } else { String::new() };
    let ctor = member(&mut out, &cname, &format!("{cname}({params}) {{ {body} }}")).expect("constructor parses");
    let at = rng.gen_range(0..=ast.children(c).len());
    out.insert_child(c, at, ctor);
    Some((out, location(ast, c)))
}

fn empty_class(ast: &Ast, rng: &mut ChaCha8Rng) -> Proposal {
    let name = fresh(&names(ast), ["Helper", "Util", "Manager", "Config", "Registry", "Context"].choose(rng).expect("names"));
    let text = if rng.gen_bool(0.5) { format!("class {name} {{ {name}() {{}} }}") } else { format!("class {name} {{}}") };
    let mut out = ast.clone();
    let class = item(&mut out, &text).expect("class parses");
    let file = entry_file(ast);
    out.push_child(file, class);
    Some((out, location(ast, file)))
}

fn access_method(ast: &Ast, rng: &mut ChaCha8Rng) -> Proposal {
    let sites: Vec<(NodeId, Vec<NodeId>)> = ast
        .live_nodes()
        .into_iter()
        .filter(|f| ast.kind(*f) == NodeKind::FieldDecl && !ast.attrs(*f).is_static && ast.attrs(*f).ty.is_some())
        .filter_map(|f| {
            let class = ast.parent(f)?;
            let reads: Vec<NodeId> = refs(ast, f)
                .into_iter()
                .filter(|r| !is_lvalue(ast, *r) && ast.enclosing_callable(*r).is_some())
                .filter(|r| ast.kind(*r) == NodeKind::FieldAccess || ast.enclosing_class(*r) == Some(class))
                .collect();
            (!reads.is_empty()).then_some((f, reads))
        })
        .collect();
    let (f, reads) = sites.choose(rng)?.clone();
    let class = ast.parent(f).expect("owned");
    let fname = ast.name(f).expect("named").to_string();
    let ty = ast.attrs(f).ty.clone().expect("typed");
    let getter = fresh(&names(ast), &format!("get{}", capitalize(&fname)));
    let mut out = ast.clone();
    let m = member(&mut out, ast.name(class).expect("named"), &format!("{ty} {getter}() {{ return {fname}; }}")).expect("getter parses");
    let at = rng.gen_range(0..=ast.children(class).len());
    out.insert_child(class, at, m);
    for r in reads {
        let recv = (out.kind(r) == NodeKind::FieldAccess).then(|| out.children(r)[0]);
        let c = call(&mut out, &getter, recv, &[]);
        out.replace(r, c);
    }
    Some((out, location(ast, f)))
}

fn for_to_while(ast: &Ast, rng: &mut ChaCha8Rng) -> Proposal {
    let sites: Vec<NodeId> = body_nodes(ast)
        .into_iter()
        .filter(|s| ast.kind(*s) == NodeKind::ForStmt && ast.parent(*s).is_some_and(|p| ast.kind(p) == NodeKind::Block))
        .collect();
    let s = *sites.choose(rng)?;
    let block = ast.parent(s).expect("in block");
    let idx = ast.index_in_parent(s).expect("child");
    let &[init, cond, update, body] = ast.children(s) else { return None };
    let clash = ast.kind(init) == NodeKind::LocalVarDecl && {
        let name = ast.name(init);
        ast.children(block)[idx + 1..]
            .iter()
            .flat_map(|later| ast.preorder(*later))
            .any(|n| ast.kind(n) == NodeKind::LocalVarDecl && ast.name(n) == name)
    };
    let mut out = ast.clone();
    let w = out.alloc(NodeKind::WhileStmt, Attrs::default(), Span::default());
    out.push_child(w, cond);
    out.push_child(w, body);
    out.push_child(body, update);
    if clash {
        let scope = out.alloc(NodeKind::Block, Attrs::default(), Span::default());
        out.replace(s, scope);
        out.push_child(scope, init);
        out.push_child(scope, w);
    } else {
        out.replace(s, init);
        out.insert_child(block, idx + 1, w);
    }
    Some((out, location(ast, s)))
}
