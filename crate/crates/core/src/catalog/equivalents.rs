//! Semantically equivalent replacements: negated and unequal if-else
//! conditions, and `for` loops.

use std::collections::BTreeSet;

use super::query::refs_to;
use crate::cpg::Cpg;
use crate::frontend::ast::{Ast, AttrKey, AttrValue, NodeId, NodeKind, Op};
use crate::pattern::{
    derive_template, AttrSource, Binding, GraphPattern, InsertAt, NodePattern, TransformOp, TransformationTemplate,
};

fn op(o: Op) -> AttrValue {
    AttrValue::Op(o)
}

fn if_else(cond: NodePattern, then: &str, els: &str) -> NodePattern {
    NodePattern::new("if", NodeKind::IfStmt)
        .count(3)
        .at(0, cond)
        .at(1, NodePattern::new(then, NodeKind::Block))
        .at(2, NodePattern::new(els, NodeKind::Block))
}

pub fn negated_if_else() -> TransformationTemplate {
    let source = if_else(
        NodePattern::new("not", NodeKind::UnaryOp).attr(AttrKey::Op, op(Op::Not)).at(0, NodePattern::any("cond")),
        "then",
        "else",
    );
    let target = if_else(NodePattern::any("cond"), "else", "then");
    derive_template("revert negated if-else", &GraphPattern::new(source), &target).expect("derivable")
}

pub fn unequal_if_else() -> TransformationTemplate {
    let cmp = |o: Op| {
        NodePattern::new("cmp", NodeKind::BinaryOp)
            .attr(AttrKey::Op, op(o))
            .at(0, NodePattern::any("lhs"))
            .at(1, NodePattern::any("rhs"))
    };
    let source = if_else(cmp(Op::Ne), "then", "else");
    let target = if_else(cmp(Op::Eq), "else", "then");
    derive_template("revert if-unequal-else", &GraphPattern::new(source), &target).expect("derivable")
}

pub fn for_to_while() -> TransformationTemplate {
    let source = NodePattern::new("for", NodeKind::ForStmt)
        .at(0, NodePattern::any("init"))
        .at(1, NodePattern::any("cond"))
        .at(2, NodePattern::any("update"))
        .at(3, NodePattern::new("body", NodeKind::Block));
    let target = NodePattern::new("scope", NodeKind::Block).at(0, NodePattern::any("init")).at(
        1,
        NodePattern::new("while", NodeKind::WhileStmt)
            .at(0, NodePattern::any("cond"))
            .at(1, NodePattern::new("body", NodeKind::Block).last(NodePattern::any("update"))),
    );
    derive_template("for loop to while loop", &GraphPattern::new(source), &target).expect("derivable")
}

/// Declarations of `block` whose names would collide with something in the
/// statements following it once the block is spliced into its parent.
fn clashing_decls(ast: &Ast, block: NodeId) -> Vec<NodeId> {
    let parent = ast.parent(block).expect("nested block");
    let pos = ast.index_in_parent(block).expect("child");
    let later: Vec<NodeId> = ast.children(parent)[pos + 1..].iter().flat_map(|s| ast.preorder(*s)).collect();
    ast.children(block)
        .iter()
        .copied()
        .filter(|d| ast.kind(*d) == NodeKind::LocalVarDecl)
        .filter(|d| {
            let name = ast.name(*d);
            later.iter().any(|n| {
                ast.name(*n) == name
                    && match ast.kind(*n) {
                        NodeKind::LocalVarDecl => true,
                        NodeKind::NameRef => ast.decl(*n) != Some(*d),
                        _ => false,
                    }
            })
        })
        .collect()
}

/// A block nested directly in another block is spliced into it, renaming
/// its declarations where they would collide.
pub fn flatten_blocks() -> TransformationTemplate {
    let source = GraphPattern::new(NodePattern::new("block", NodeKind::Block)).with("nested in a block", |cpg: &Cpg, b: &mut Binding| {
        let ast = &cpg.ast;
        let blk = b.node("block");
        let Some(outer) = ast.parent(blk).filter(|p| ast.kind(*p) == NodeKind::Block) else { return false };
        let clash = clashing_decls(ast, blk);
        let refs: BTreeSet<NodeId> = clash.iter().flat_map(|d| refs_to(ast, *d)).collect();
        b.bind("outer", outer);
        b.set_group("stmts", ast.children(blk).to_vec());
        b.set_group("renamed", clash);
        b.set_group("renamed_refs", refs.into_iter().collect());
        true
    });
    TransformationTemplate::new(
        "flatten nested block",
        source,
        vec![
            TransformOp::for_each("renamed", "decl", vec![TransformOp::set("decl", AttrKey::Name, AttrSource::Fresh("decl".into()))]),
            TransformOp::for_each(
                "renamed_refs",
                "ref",
                vec![TransformOp::set("ref", AttrKey::Name, AttrSource::DeclAttr("ref".into(), AttrKey::Name))],
            ),
            TransformOp::for_each("stmts", "stmt", vec![TransformOp::move_to("stmt", "outer", InsertAt::Before("block".into()))]),
            TransformOp::delete("block"),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_str;
    use crate::frontend::printer::print_all;
    use crate::pattern::{apply, dump_template, DEFAULT_PASS_CAP};

    fn run(src: &str, ts: &[TransformationTemplate]) -> String {
        let mut cpg = Cpg::build(load_str(src).unwrap());
        for t in ts {
            apply(&mut cpg, t, DEFAULT_PASS_CAP).unwrap();
        }
        print_all(&cpg.ast)
    }

    #[test]
    fn unequal_condition_swapped() {
        let t = run("void p() {} void q() {} void f(int x) { if (x != 0) { p(); } else { q(); } }", &[unequal_if_else()]);
        assert!(t.contains("if (x == 0) {\n        q();\n    } else {\n        p();"), "{t}");
        let ops = dump_template(&unequal_if_else());
        assert_eq!(ops.matches("SET_ATTR").count(), 1, "{ops}");
    }

    #[test]
    fn negation_swapped() {
        let t = run("void p() {} void q() {} void f(boolean c) { if (!c) { p(); } else { q(); } }", &[negated_if_else()]);
        assert!(t.contains("if (c) {\n        q();\n    } else {\n        p();"), "{t}");
    }

    #[test]
    fn if_without_else_unchanged() {
        let src = "void p() {} void f(boolean c) { if (!c) { p(); } }";
        assert_eq!(run(src, &[negated_if_else()]), print_all(&load_str(src).unwrap()));
    }

    #[test]
    fn for_becomes_scoped_while() {
        let t = run("void f(int n) { for (int i = 0; i < n; i++) { println(i); } }", &[for_to_while()]);
        assert!(t.contains("{\n        int i = 0;\n        while (i < n) {\n            println(i);\n            i++;\n        }\n    }"), "{t}");
        let t = run("void f(int n) { for (int i = 0; i < n; i++) { println(i); } }", &[for_to_while(), flatten_blocks()]);
        assert!(t.contains("    int i = 0;\n    while (i < n) {"), "{t}");
    }

    #[test]
    fn flattening_renames_on_clash() {
        let src = "void f(int n) { for (int i = 0; i < n; i++) { println(i); } for (int i = 0; i < 2; i++) { println(i); } }";
        let mut cpg = Cpg::build(load_str(src).unwrap());
        apply(&mut cpg, &for_to_while(), DEFAULT_PASS_CAP).unwrap();
        apply(&mut cpg, &flatten_blocks(), DEFAULT_PASS_CAP).unwrap();
        let t = print_all(&cpg.ast);
        assert!(t.contains("int i1 = 0;") && t.contains("println(i1);") && t.contains("int i = 0;"), "{t}");
        assert!(load_str(&t).is_ok(), "{t}");
    }
}
