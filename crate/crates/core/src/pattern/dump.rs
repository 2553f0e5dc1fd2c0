//! Plain-text dumps of patterns and templates.

use std::fmt::Write;

use super::{AttrConstraint, AttrSource, GraphPattern, InsertAt, NodePattern, Presence, Slot, TransformOp, TransformationTemplate};

fn kinds(p: &NodePattern) -> String {
    if p.kinds.is_empty() {
        "*".to_string()
    } else {
        p.kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join("|")
    }
}

fn node(p: &NodePattern, depth: usize, prefix: &str, out: &mut String) {
    let _ = write!(out, "{}{}{} {}", "  ".repeat(depth), prefix, kinds(p), p.role);
    for a in &p.attrs {
        let _ = match a {
            AttrConstraint::Eq(k, v) => write!(out, " {}={}", k.name(), v),
            AttrConstraint::Ne(k, v) => write!(out, " {}!={}", k.name(), v),
            AttrConstraint::Test(name, _) => write!(out, " ?{name}"),
        };
    }
    if let Some(c) = p.child_count {
        let _ = write!(out, " #{c}");
    }
    out.push('\n');
    for c in &p.children {
        let slot = match c.slot {
            Slot::Index(i) => i.to_string(),
            Slot::Last => "last".to_string(),
            Slot::Any => "any".to_string(),
        };
        let mark = match c.presence {
            Presence::Required => "",
            Presence::Optional => "?",
            Presence::Forbidden => "!",
        };
        node(&c.pattern, depth + 1, &format!("[{slot}]{mark} "), out);
    }
}

pub fn dump_pattern(p: &GraphPattern) -> String {
    let mut out = String::new();
    node(&p.root, 0, "", &mut out);
    for pred in &p.predicates {
        let _ = writeln!(out, "where {}", pred.name);
    }
    out
}

fn source(s: &AttrSource) -> String {
    match s {
        AttrSource::Const(v) => v.to_string(),
        AttrSource::Role(r, k) => format!("{r}.{}", k.name()),
        AttrSource::Value(v) => format!("${v}"),
        AttrSource::Fresh(r) => format!("fresh({r})"),
        AttrSource::NodeOf(r) => format!("node({r})"),
        AttrSource::DeclOf(r) => format!("decl({r})"),
        AttrSource::DeclAttr(r, k) => format!("decl({r}).{}", k.name()),
    }
}

fn at(a: &InsertAt) -> String {
    match a {
        InsertAt::Index(i) => i.to_string(),
        InsertAt::Last => "last".into(),
        InsertAt::Before(r) => format!("before {r}"),
        InsertAt::After(r) => format!("after {r}"),
    }
}

fn op(o: &TransformOp, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let _ = match o {
        TransformOp::CreateNode { role, kind, attrs } => {
            let attrs: Vec<String> = attrs.iter().map(|(k, s)| format!("{}={}", k.name(), source(s))).collect();
            writeln!(out, "{pad}CREATE_NODE {kind} {role} {}", attrs.join(" ")).map(|_| ())
        }
        TransformOp::DeleteNode { role } => writeln!(out, "{pad}DELETE_NODE {role}"),
        TransformOp::SetAttr { role, key, value } => writeln!(out, "{pad}SET_ATTR {role} {} {}", key.name(), source(value)),
        TransformOp::AddChild { parent, child, at: a } => writeln!(out, "{pad}ADD_CHILD {parent} {child} {}", at(a)),
        TransformOp::RemoveChild { parent, child } => writeln!(out, "{pad}REMOVE_CHILD {parent} {child}"),
        TransformOp::MoveChild { child, to, at: a } => writeln!(out, "{pad}MOVE_CHILD {child} {to} {}", at(a)),
        TransformOp::ReplaceNode { old, new } => writeln!(out, "{pad}REPLACE_NODE {old} {new}"),
        TransformOp::ForEach { group, role, ops } => {
            let _ = writeln!(out, "{pad}FOR_EACH {role} in {group}");
            for inner in ops {
                op(inner, depth + 1, out);
            }
            Ok(())
        }
    };
}

pub fn dump_template(t: &TransformationTemplate) -> String {
    let mut out = format!("template {}\n", t.name);
    out.push_str(&dump_pattern(&t.source));
    out.push_str("ops\n");
    for o in &t.ops {
        op(o, 1, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::ast::{AttrKey, AttrValue, NodeKind, Type};

    #[test]
    fn golden_dump() {
        let p = NodePattern::new("m", NodeKind::MethodDecl)
            .attr(AttrKey::Type, AttrValue::Type(Type::Void))
            .last(NodePattern::new("body", NodeKind::Block).count(0));
        let t = TransformationTemplate::new(
            "empty",
            GraphPattern::new(p).with("not main", |_, _| true),
            vec![TransformOp::delete("m")],
        );
        assert_eq!(
            dump_template(&t),
            "template empty\nMethodDecl m type=void\n  [last] Block body #0\nwhere not main\nops\n  DELETE_NODE m\n"
        );
    }
}
