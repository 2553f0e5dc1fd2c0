//! Class constants: moving them to their only user and inlining single
//! uses.

use std::collections::BTreeSet;

use super::query::{is_read, local_named, refs_to, trivial_receiver};
use crate::frontend::ast::{Ast, AttrKey, AttrValue, NodeId, NodeKind};
use crate::frontend::types::{is_class_ref, type_of};
use crate::pattern::{AttrSource, GraphPattern, InsertAt, NodePattern, TransformOp, TransformationTemplate};

fn constant_pattern() -> NodePattern {
    NodePattern::new("const", NodeKind::FieldDecl)
        .attr(AttrKey::Static, AttrValue::Bool(true))
        .attr(AttrKey::Final, AttrValue::Bool(true))
        .at(0, NodePattern::new("lit", NodeKind::Literal))
}

fn has_field(ast: &Ast, class: NodeId, name: &str) -> bool {
    ast.children(class).iter().any(|m| ast.kind(*m) == NodeKind::FieldDecl && ast.name(*m) == Some(name))
}

pub fn move_constants() -> TransformationTemplate {
    let source = GraphPattern::new(constant_pattern()).with("used by exactly one other class", |cpg, b| {
        let ast = &cpg.ast;
        let k = b.node("const");
        let name = ast.name(k).unwrap_or_default().to_string();
        let refs = refs_to(ast, k);
        let users: BTreeSet<Option<NodeId>> = refs.iter().map(|r| ast.enclosing_class(*r)).collect();
        let [Some(dest)] = users.into_iter().collect::<Vec<_>>()[..] else { return false };
        if Some(dest) == ast.parent(k) || has_field(ast, dest, &name) {
            return false;
        }
        let dest_name = ast.name(dest).unwrap_or_default().to_string();
        let (mut bare, mut requalify) = (Vec::new(), Vec::new());
        for r in refs {
            match ast.kind(r) {
                NodeKind::NameRef => {}
                NodeKind::FieldAccess if is_class_ref(ast, ast.children(r)[0]) => {
                    if !local_named(ast, r, &name) {
                        bare.push(r);
                    } else if !local_named(ast, r, &dest_name) {
                        requalify.push(r);
                    } else {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        b.bind("dest", dest);
        b.set_group("bare", bare);
        b.set_group("requalify", requalify);
        true
    });
    TransformationTemplate::new(
        "move constants to only using class",
        source,
        vec![
            TransformOp::move_to("const", "dest", InsertAt::Index(0)),
            TransformOp::for_each(
                "bare",
                "access",
                vec![
                    TransformOp::create_with(
                        "ref",
                        NodeKind::NameRef,
                        vec![(AttrKey::Name, AttrSource::Role("const".into(), AttrKey::Name)), (AttrKey::Decl, AttrSource::NodeOf("const".into()))],
                    ),
                    TransformOp::replace("access", "ref"),
                ],
            ),
            TransformOp::for_each(
                "requalify",
                "access",
                vec![
                    TransformOp::set("access/0", AttrKey::Name, AttrSource::Role("dest".into(), AttrKey::Name)),
                    TransformOp::set("access/0", AttrKey::Decl, AttrSource::NodeOf("dest".into())),
                ],
            ),
        ],
    )
}

pub fn inline_constants() -> TransformationTemplate {
    let source = GraphPattern::new(constant_pattern()).with("single read of matching type", |cpg, b| {
        let ast = &cpg.ast;
        let k = b.node("const");
        if type_of(ast, b.node("lit")) != ast.attrs(k).ty {
            return false;
        }
        let [r] = refs_to(ast, k)[..] else { return false };
        let receiver_ok = ast.kind(r) == NodeKind::NameRef || trivial_receiver(ast, ast.child(r, 0));
        if !is_read(ast, r) || !receiver_ok {
            return false;
        }
        b.bind("use", r);
        true
    });
    TransformationTemplate::new(
        "inline single-use constants",
        source,
        vec![
            TransformOp::create_with("copy", NodeKind::Literal, vec![(AttrKey::Value, AttrSource::Role("lit".into(), AttrKey::Value))]),
            TransformOp::replace("use", "copy"),
            TransformOp::delete("const"),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpg::Cpg;
    use crate::frontend::load_str;
    use crate::frontend::printer::print_all;
    use crate::pattern::{apply, DEFAULT_PASS_CAP};

    fn run(src: &str, t: TransformationTemplate) -> Cpg {
        let mut cpg = Cpg::build(load_str(src).unwrap());
        apply(&mut cpg, &t, DEFAULT_PASS_CAP).unwrap();
        cpg
    }

    fn owner(c: &Cpg, field: &str) -> String {
        let f = c.ast.live_nodes().into_iter().find(|n| c.ast.kind(*n) == NodeKind::FieldDecl && c.ast.name(*n) == Some(field)).unwrap();
        c.ast.name(c.ast.parent(f).unwrap()).unwrap().to_string()
    }

    #[test]
    fn constant_moves_to_sole_user() {
        let c = run(
            "class Util { static final int MAX = 9; } class Game { static void main() { println(Util.MAX); println(Util.MAX + 1); } }",
            move_constants(),
        );
        assert_eq!(owner(&c, "MAX"), "Game");
        assert!(!print_all(&c.ast).contains("Util.MAX"));
    }

    #[test]
    fn shared_or_local_constants_stay() {
        let two = "class Util { static final int MAX = 9; } class A { void f() { println(Util.MAX); } } \
                   class Game { static void main() { println(Util.MAX); } }";
        assert_eq!(owner(&run(two, move_constants()), "MAX"), "Util");
        let own = "class Game { static final int MAX = 9; static void main() { println(MAX); } }";
        assert_eq!(owner(&run(own, move_constants()), "MAX"), "Game");
    }

    #[test]
    fn single_use_constant_inlined() {
        let c = run("class G { static final int K = 4; static void main() { println(K * 2); } }", inline_constants());
        assert!(print_all(&c.ast).contains("println(4 * 2)"));
        let c = run("class G { static final double K = 4; static void main() { println(K); } }", inline_constants());
        assert!(print_all(&c.ast).contains("K"));
    }
}
