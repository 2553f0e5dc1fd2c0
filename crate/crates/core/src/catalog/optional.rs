//! Optional wrapping that can never be empty.

use super::effects::is_safe;
use super::query::refs_to;
use crate::cpg::Cpg;
use crate::frontend::ast::{Ast, AttrValue, Attrs, Literal, NodeId, NodeKind, Op, Type};
use crate::frontend::types::type_of;
use crate::pattern::{AttrSource, Binding, GraphPattern, NodePattern, TransformOp, TransformationTemplate};

/// `e` can be wrapped by `Optional.of` without faulting and unwraps to
/// itself.
fn never_null(ast: &Ast, e: NodeId) -> bool {
    match type_of(ast, e) {
        Some(t) if t.is_primitive() => true,
        Some(_) => ast.kind(e) == NodeKind::New || matches!(ast.attrs(e).value, Some(Literal::Str(_))),
        None => false,
    }
}

/// An unwrap whose default, if any, can be dropped.
fn plain_unwrap(ast: &Ast, u: NodeId) -> bool {
    ast.kind(u) == NodeKind::OptionalUnwrap
        && match ast.attrs(u).op {
            Some(Op::Get) => true,
            Some(Op::OrElse) => ast.child(u, 1).is_none_or(|d| is_safe(ast, d)),
            _ => false,
        }
}

fn is_optional(a: &Attrs) -> bool {
    matches!(a.ty, Some(Type::Optional(_)))
}

fn wrapped() -> NodePattern {
    NodePattern::new("wrap", NodeKind::OptionalWrap).at(0, NodePattern::any("value"))
}

/// `Optional<T> x = Optional.of(e);` with every use unwrapped becomes
/// `T x = e;` with the unwrapping removed.
pub fn unwrap_variables() -> TransformationTemplate {
    let p = NodePattern::new("decl", NodeKind::LocalVarDecl).test("optional type", is_optional).at(0, wrapped());
    let source = GraphPattern::new(p).with("always unwrapped, never empty", |cpg: &Cpg, b: &mut Binding| {
        let ast = &cpg.ast;
        let (d, e) = (b.node("decl"), b.node("value"));
        let Some(Type::Optional(inner)) = ast.attrs(d).ty.clone() else { return false };
        if type_of(ast, e).as_ref() != Some(&*inner) || !never_null(ast, e) {
            return false;
        }
        let mut unwraps = Vec::new();
        for r in refs_to(ast, d) {
            match ast.parent(r) {
                Some(u) if ast.child(u, 0) == Some(r) && plain_unwrap(ast, u) => unwraps.push(u),
                _ => return false,
            }
        }
        b.set_group("unwraps", unwraps);
        b.set_value("inner", AttrValue::Type(*inner));
        true
    });
    TransformationTemplate::new(
        "inline optional values",
        source,
        vec![
            TransformOp::set("decl", crate::frontend::ast::AttrKey::Type, AttrSource::Value("inner".into())),
            TransformOp::replace("wrap", "value"),
            TransformOp::for_each("unwraps", "unwrap", vec![TransformOp::replace("unwrap", "unwrap/0")]),
        ],
    )
}

/// `Optional.of(e).get()` and `.orElse(d)` become `e`.
pub fn unwrap_calls() -> TransformationTemplate {
    let p = NodePattern::new("unwrap", NodeKind::OptionalUnwrap).at(0, wrapped());
    let source = GraphPattern::new(p).with("never empty", |cpg: &Cpg, b: &mut Binding| {
        let ast = &cpg.ast;
        never_null(ast, b.node("value")) && plain_unwrap(ast, b.node("unwrap"))
    });
    TransformationTemplate::new("inline optional unwrapping", source, vec![TransformOp::replace("unwrap", "value")])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_str;
    use crate::frontend::printer::print_all;
    use crate::pattern::{apply, DEFAULT_PASS_CAP};

    fn run(src: &str, t: TransformationTemplate) -> String {
        let mut cpg = Cpg::build(load_str(src).unwrap());
        apply(&mut cpg, &t, DEFAULT_PASS_CAP).unwrap();
        print_all(&cpg.ast)
    }

    #[test]
    fn wrap_then_unwrap_collapses() {
        let t = run("void f(int v) { println(Optional.of(v).orElse(3)); }", unwrap_calls());
        assert!(t.contains("println(v);"), "{t}");
        let t = run("void f(String s) { println(Optional.ofNullable(s).orElse(\"x\")); }", unwrap_calls());
        assert!(t.contains("orElse"), "{t}");
    }

    #[test]
    fn optional_variable_unwrapped() {
        let t = run("void f(int v) { Optional<Integer> o = Optional.of(v + 1); println(o.get()); println(o.get() * 2); }", unwrap_variables());
        assert!(t.contains("int o = v + 1;"), "{t}");
        assert!(t.contains("println(o * 2);"), "{t}");
    }

    #[test]
    fn escaping_optional_kept() {
        let t = run("void g(Optional<Integer> o) {} void f(int v) { Optional<Integer> o = Optional.of(v); g(o); }", unwrap_variables());
        assert!(t.contains("Optional<Integer> o"), "{t}");
    }
}
