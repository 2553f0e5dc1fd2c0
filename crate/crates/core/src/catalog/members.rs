//! Removal of trivial members: empty methods, constructors and classes,
//! getters, and members that only throw.

use super::effects::is_safe;
use super::query::{bare_name_resolves, in_block, is_entry, refs_to, trivial_receiver, type_mentioned};
use crate::frontend::ast::{Ast, AttrKey, AttrValue, Literal, NodeId, NodeKind, Type};
use crate::frontend::builtins::Builtin;
use crate::frontend::types::{decl_type, is_class_ref};
use crate::pattern::{AttrSource, Binding, GraphPattern, NodePattern, Slot, Presence, TransformOp, TransformationTemplate};

fn empty_body(role: &str) -> NodePattern {
    NodePattern::new(role, NodeKind::Block).count(0)
}

pub fn empty_methods() -> TransformationTemplate {
    let p = NodePattern::new("method", NodeKind::MethodDecl)
        .attr(AttrKey::Type, AttrValue::Type(Type::Void))
        .last(empty_body("body"));
    let source = GraphPattern::new(p).with("deletable call sites", |cpg, b| {
        let ast = &cpg.ast;
        let m = b.node("method");
        if is_entry(ast, m) {
            return false;
        }
        let mut stmts = Vec::new();
        for c in refs_to(ast, m) {
            let (recv, args) = ast.call_parts(c);
            if !trivial_receiver(ast, recv) || !args.iter().all(|a| is_safe(ast, *a)) {
                return false;
            }
            match ast.parent(c) {
                Some(s) if ast.kind(s) == NodeKind::ExprStmt && in_block(ast, s) => stmts.push(s),
                _ => return false,
            }
        }
        b.set_group("calls", stmts);
        true
    });
    TransformationTemplate::new(
        "remove empty methods",
        source,
        vec![TransformOp::for_each("calls", "call", vec![TransformOp::delete("call")]), TransformOp::delete("method")],
    )
}

pub fn empty_constructors() -> TransformationTemplate {
    let p = NodePattern::new("class", NodeKind::ClassDecl).child(
        Slot::Any,
        Presence::Required,
        NodePattern::new("ctor", NodeKind::ConstructorDecl).last(empty_body("body")),
    );
    let source = GraphPattern::new(p).with("calls survive removal", |cpg, b| {
        let ast = &cpg.ast;
        let (class, ctor) = (b.node("class"), b.node("ctor"));
        let news = refs_to(ast, ctor);
        let others = ast.children(class).iter().filter(|m| ast.kind(**m) == NodeKind::ConstructorDecl).count() - 1;
        if !news.is_empty() && !(ast.params(ctor).is_empty() && others == 0) {
            return false;
        }
        b.set_group("news", news);
        true
    });
    TransformationTemplate::new(
        "remove empty constructors",
        source,
        vec![
            TransformOp::for_each(
                "news",
                "new",
                vec![TransformOp::set("new", AttrKey::Decl, AttrSource::NodeOf("class".into()))],
            ),
            TransformOp::delete("ctor"),
        ],
    )
}

pub fn empty_classes() -> TransformationTemplate {
    let p = NodePattern::new("class", NodeKind::ClassDecl).count(0);
    let source = GraphPattern::new(p).with("unreferenced", |cpg, b| {
        let ast = &cpg.ast;
        let c = b.node("class");
        refs_to(ast, c).is_empty() && !type_mentioned(ast, ast.name(c).unwrap_or_default())
    });
    TransformationTemplate::new("remove empty classes", source, vec![TransformOp::delete("class")])
}

/// What a getter returns.
#[derive(Debug, Clone, PartialEq)]
pub enum Getter {
    Field(NodeId),
    Constant(Literal),
}

fn is_constant(ast: &Ast, f: NodeId) -> bool {
    let a = ast.attrs(f);
    a.is_static && a.is_final && ast.child(f, 0).is_some_and(|i| ast.kind(i) == NodeKind::Literal)
}

/// A non-void, parameterless method whose body is a single `return` of a
/// field of its class, a class constant or a literal of the return type.
pub fn getter_of(ast: &Ast, m: NodeId) -> Option<Getter> {
    if ast.kind(m) != NodeKind::MethodDecl || !ast.params(m).is_empty() || is_entry(ast, m) {
        return None;
    }
    let ret = ast.attrs(m).ty.clone().filter(|t| *t != Type::Void)?;
    let body = ast.body(m)?;
    let [r] = ast.children(body) else { return None };
    if ast.kind(*r) != NodeKind::ReturnStmt {
        return None;
    }
    let e = ast.child(*r, 0)?;
    match ast.kind(e) {
        NodeKind::Literal => {
            let v = ast.attrs(e).value.clone()?;
            (v.ty() == ret).then_some(Getter::Constant(v))
        }
        NodeKind::NameRef | NodeKind::FieldAccess => {
            if ast.kind(e) == NodeKind::FieldAccess {
                let recv = ast.children(e)[0];
                if ast.kind(recv) != NodeKind::This && !is_class_ref(ast, recv) {
                    return None;
                }
            }
            let f = ast.decl(e)?;
            let own = ast.parent(f) == ast.enclosing_class(m);
            let ok = ast.kind(f) == NodeKind::FieldDecl && (own || is_constant(ast, f)) && decl_type(ast, f) == Some(ret);
            ok.then_some(Getter::Field(f))
        }
        _ => None,
    }
}

fn getter_field(ast: &Ast, call: NodeId) -> Option<NodeId> {
    match getter_of(ast, ast.decl(call)?)? {
        Getter::Field(f) => Some(f),
        Getter::Constant(_) => None,
    }
}

fn bind_field(b: &mut Binding, ast: &Ast, f: NodeId) {
    b.set_value("name", AttrValue::Str(ast.name(f).unwrap_or_default().to_string()));
    b.set_value("field", AttrValue::Node(f));
}

fn call_pattern(qualified: bool) -> NodePattern {
    NodePattern::new("call", NodeKind::Call).attr(AttrKey::Qualified, AttrValue::Bool(qualified))
}

fn field_access_ops(recv: Vec<TransformOp>) -> Vec<TransformOp> {
    let mut ops = vec![TransformOp::create_with(
        "access",
        NodeKind::FieldAccess,
        vec![(AttrKey::Name, AttrSource::Value("name".into())), (AttrKey::Decl, AttrSource::Value("field".into()))],
    )];
    ops.extend(recv);
    ops.push(TransformOp::replace("call", "access"));
    ops
}

/// Getter call sites rewritten to the field or constant they return,
/// followed by removal of getters nobody calls.
pub fn getters() -> Vec<TransformationTemplate> {
    let bare = GraphPattern::new(call_pattern(false)).with("getter reachable by name", |cpg, b| {
        let ast = &cpg.ast;
        let c = b.node("call");
        let Some(f) = getter_field(ast, c) else { return false };
        if !bare_name_resolves(ast, c, ast.name(f).unwrap_or_default(), f) {
            return false;
        }
        bind_field(b, ast, f);
        true
    });
    let via_this = GraphPattern::new(call_pattern(false)).with("instance getter with shadowed name", |cpg, b| {
        let ast = &cpg.ast;
        let c = b.node("call");
        let Some(f) = getter_field(ast, c) else { return false };
        if ast.attrs(f).is_static || bare_name_resolves(ast, c, ast.name(f).unwrap_or_default(), f) {
            return false;
        }
        bind_field(b, ast, f);
        true
    });
    let via_class = GraphPattern::new(call_pattern(false)).with("static getter with shadowed name", |cpg, b| {
        let ast = &cpg.ast;
        let c = b.node("call");
        let Some(f) = getter_field(ast, c) else { return false };
        let Some(class) = ast.parent(f) else { return false };
        let cname = ast.name(class).unwrap_or_default().to_string();
        if !ast.attrs(f).is_static
            || bare_name_resolves(ast, c, ast.name(f).unwrap_or_default(), f)
            || !bare_name_resolves(ast, c, &cname, class)
        {
            return false;
        }
        bind_field(b, ast, f);
        b.set_value("class", AttrValue::Node(class));
        b.set_value("class_name", AttrValue::Str(cname));
        true
    });
    let qualified = GraphPattern::new(call_pattern(true).at(0, NodePattern::any("recv"))).with("getter of the receiver's class", |cpg, b| {
        let ast = &cpg.ast;
        let c = b.node("call");
        let Some(f) = getter_field(ast, c) else { return false };
        let m = ast.decl(c).expect("linked");
        if ast.parent(f) != ast.enclosing_class(m) {
            return false;
        }
        bind_field(b, ast, f);
        true
    });
    let constant = GraphPattern::new(NodePattern::new("call", NodeKind::Call)).with("constant getter", |cpg, b| {
        let ast = &cpg.ast;
        let c = b.node("call");
        let Some(Getter::Constant(v)) = ast.decl(c).and_then(|m| getter_of(ast, m)) else { return false };
        if !trivial_receiver(ast, ast.call_parts(c).0) {
            return false;
        }
        b.set_value("lit", AttrValue::Lit(v));
        true
    });
    let unused = GraphPattern::new(NodePattern::new("method", NodeKind::MethodDecl)).with("uncalled getter", |cpg, b| {
        let ast = &cpg.ast;
        let m = b.node("method");
        getter_of(ast, m).is_some() && refs_to(ast, m).is_empty()
    });
    vec![
        TransformationTemplate::new(
            "getter call to field",
            bare,
            vec![
                TransformOp::create_with(
                    "ref",
                    NodeKind::NameRef,
                    vec![(AttrKey::Name, AttrSource::Value("name".into())), (AttrKey::Decl, AttrSource::Value("field".into()))],
                ),
                TransformOp::replace("call", "ref"),
            ],
        ),
        TransformationTemplate::new(
            "getter call to this field",
            via_this,
            field_access_ops(vec![TransformOp::create("this", NodeKind::This), TransformOp::add("access", "this", crate::pattern::InsertAt::Index(0))]),
        ),
        TransformationTemplate::new(
            "getter call to static field",
            via_class,
            field_access_ops(vec![
                TransformOp::create_with(
                    "cls",
                    NodeKind::NameRef,
                    vec![(AttrKey::Name, AttrSource::Value("class_name".into())), (AttrKey::Decl, AttrSource::Value("class".into()))],
                ),
                TransformOp::add("access", "cls", crate::pattern::InsertAt::Index(0)),
            ]),
        ),
        TransformationTemplate::new(
            "qualified getter call to field",
            qualified,
            field_access_ops(vec![TransformOp::move_to("recv", "access", crate::pattern::InsertAt::Index(0))]),
        ),
        TransformationTemplate::new(
            "getter call to constant",
            constant,
            vec![
                TransformOp::create_with("lit", NodeKind::Literal, vec![(AttrKey::Value, AttrSource::Value("lit".into()))]),
                TransformOp::replace("call", "lit"),
            ],
        ),
        TransformationTemplate::new("remove getter methods", unused, vec![TransformOp::delete("method")]),
    ]
}

fn throws_first(kind: NodeKind) -> NodePattern {
    NodePattern::new("member", kind).last(NodePattern::new("body", NodeKind::Block).at(0, NodePattern::new("throw", NodeKind::ThrowStmt)))
}

pub fn unsupported_methods() -> TransformationTemplate {
    let source = GraphPattern::new(throws_first(NodeKind::MethodDecl)).with("removable", |cpg, b| {
        let ast = &cpg.ast;
        let m = b.node("member");
        // A dangling call with a builtin's name would turn into the builtin.
        !is_entry(ast, m) && Builtin::from_name(ast.name(m).unwrap_or_default()).is_none()
    });
    TransformationTemplate::new("remove unsupported methods", source, vec![TransformOp::delete("member")])
}

pub fn unsupported_constructors() -> TransformationTemplate {
    let source = GraphPattern::new(throws_first(NodeKind::ConstructorDecl));
    TransformationTemplate::new("remove unsupported constructors", source, vec![TransformOp::delete("member")])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpg::Cpg;
    use crate::frontend::load_str;
    use crate::frontend::printer::print_all;
    use crate::pattern::{apply, DEFAULT_PASS_CAP};

    fn run(src: &str, ts: &[TransformationTemplate]) -> Cpg {
        let mut cpg = Cpg::build(load_str(src).unwrap());
        for t in ts {
            apply(&mut cpg, t, DEFAULT_PASS_CAP).unwrap();
        }
        cpg
    }

    #[test]
    fn empty_method_and_its_calls_removed() {
        let c = run("class A { void noop() {} static void main() { A a = new A(); a.noop(); println(1); } }", &[empty_methods()]);
        let text = print_all(&c.ast);
        // Receiver `a` may be null; the call stays.
        assert!(text.contains("noop"));
        let c = run("class A { void noop() {} void run() { noop(); this.noop(); println(1); } static void main() { println(2); } }", &[empty_methods()]);
        assert!(!print_all(&c.ast).contains("noop"), "{}", print_all(&c.ast));
    }

    #[test]
    fn entry_point_is_kept() {
        let c = run("void main() {}", &[empty_methods()]);
        assert_eq!(c.ast.callables().len(), 1);
    }

    #[test]
    fn empty_constructor_calls_relinked() {
        let c = run("class A { int v = 3; A() {} } void main() { A a = new A(); println(a.v); }", &[empty_constructors()]);
        let new = c.ast.live_nodes().into_iter().find(|n| c.ast.kind(*n) == NodeKind::New).unwrap();
        assert_eq!(c.ast.kind(c.ast.decl(new).unwrap()), NodeKind::ClassDecl);
        let c = run("class A { A() {} A(int x) {} } void main() { A a = new A(); }", &[empty_constructors()]);
        // The uncalled overload goes first, then the empty default constructor.
        assert_eq!(c.ast.callables().len(), 1);
    }

    #[test]
    fn thrower_then_empty_class() {
        let c = run(
            "class E {} class U { int unsupported() { throw new E(); } } void main() { println(1); }",
            &[unsupported_methods(), empty_classes()],
        );
        assert!(c.ast.classes().is_empty());
    }

    #[test]
    fn getter_calls_inlined() {
        let src = "class P { int x; int k; P(int x) { this.x = x; } int getX() { return x; } int one() { return 1; } \
                   int sum(int x) { return getX() + x + one(); } } \
                   void main() { P p = new P(2); println(p.getX() + p.sum(1)); }";
        let c = run(src, &getters());
        let text = print_all(&c.ast);
        assert!(!text.contains("getX") && !text.contains("one()"), "{text}");
        assert!(text.contains("this.x + x + 1"), "{text}");
        assert!(text.contains("p.x + p.sum(1)"), "{text}");
    }

    #[test]
    fn widening_getter_is_not_a_getter() {
        let ast = load_str("class P { int x; double getX() { return x; } }").unwrap();
        let m = ast.callables()[0];
        assert_eq!(getter_of(&ast, m), None);
    }
}
