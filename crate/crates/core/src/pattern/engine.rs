//! Match selection and fixed-point application.

use std::collections::HashSet;

use super::matcher::match_at;
use super::ops::execute;
use super::{GraphPattern, PatternError, PatternMatch, TransformationTemplate};
use crate::cpg::Cpg;

pub const DEFAULT_PASS_CAP: usize = 100;

/// Non-conflicting matches in ascending root id; a match is dropped if it
/// touches a node an earlier match already claimed.
pub fn find_matches(cpg: &Cpg, pattern: &GraphPattern) -> Vec<PatternMatch> {
    let mut roots: Vec<_> = cpg
        .ast
        .live_nodes()
        .into_iter()
        .filter(|n| pattern.root.kinds.is_empty() || pattern.root.kinds.contains(&cpg.ast.kind(*n)))
        .collect();
    roots.sort();
    let mut claimed = HashSet::new();
    let mut out = Vec::new();
    for root in roots {
        let Some(binding) = match_at(cpg, pattern, root) else { continue };
        let touched = binding.touched();
        if touched.iter().any(|n| claimed.contains(n)) {
            continue;
        }
        claimed.extend(touched);
        out.push(PatternMatch { root, binding });
    }
    out
}

/// One pass: every current match is re-validated against the graph as
/// left by the previous rewrite, then transformed. Returns the number of
/// matches executed.
pub fn apply_once(cpg: &mut Cpg, template: &TransformationTemplate) -> Result<usize, PatternError> {
    let matches = find_matches(cpg, &template.source);
    let optional = template.source.root.optional_roles();
    let mut done = 0;
    let mut dirty = false;
    for m in matches {
        let mut binding = if dirty {
            cpg.rebuild();
            dirty = false;
            match match_at(cpg, &template.source, m.root) {
                Some(b) => b,
                None => continue,
            }
        } else {
            m.binding
        };
        execute(&mut cpg.ast, &template.ops, &mut binding, &optional)?;
        cpg.ast.collect_garbage();
        dirty = true;
        done += 1;
    }
    if dirty {
        cpg.rebuild();
    }
    Ok(done)
}

/// Applies a template until it no longer matches. Errors once `cap` passes
/// have run and matches remain.
pub fn apply(cpg: &mut Cpg, template: &TransformationTemplate, cap: usize) -> Result<usize, PatternError> {
    let mut total = 0;
    let mut passes = 0;
    loop {
        if find_matches(cpg, &template.source).is_empty() {
            return Ok(total);
        }
        if passes == cap {
            return Err(PatternError::NonTermination { template: template.name.clone(), cap });
        }
        let n = apply_once(cpg, template)?;
        passes += 1;
        total += n;
        if n == 0 {
            return Ok(total);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::ast::{AttrKey, AttrValue, NodeKind, Type};
    use crate::frontend::load_str;
    use crate::pattern::{AttrSource, NodePattern, TransformOp};

    fn empty_void_method() -> TransformationTemplate {
        let p = NodePattern::new("m", NodeKind::MethodDecl)
            .attr(AttrKey::Type, AttrValue::Type(Type::Void))
            .last(NodePattern::new("body", NodeKind::Block).count(0));
        TransformationTemplate::new("empty", GraphPattern::new(p), vec![TransformOp::delete("m")])
    }

    fn empty_class() -> TransformationTemplate {
        let p = NodePattern::new("c", NodeKind::ClassDecl).count(0);
        TransformationTemplate::new("class", GraphPattern::new(p), vec![TransformOp::delete("c")])
    }

    #[test]
    fn no_match_leaves_graph() {
        let mut cpg = Cpg::build(load_str("void f() { println(); }").unwrap());
        let before = crate::frontend::canon::canonical(&cpg.ast);
        assert_eq!(apply(&mut cpg, &empty_void_method(), DEFAULT_PASS_CAP).unwrap(), 0);
        assert_eq!(crate::frontend::canon::canonical(&cpg.ast), before);
    }

    #[test]
    fn chain_removes_method_then_class() {
        let mut cpg = Cpg::build(load_str("class A { void noop() {} } void main() { println(); }").unwrap());
        assert_eq!(apply(&mut cpg, &empty_void_method(), DEFAULT_PASS_CAP).unwrap(), 1);
        assert_eq!(apply(&mut cpg, &empty_class(), DEFAULT_PASS_CAP).unwrap(), 1);
        assert!(cpg.ast.classes().is_empty());
        assert!(find_matches(&cpg, &empty_void_method().source).is_empty());
    }

    #[test]
    fn runaway_template_hits_cap() {
        // Renames a method forever.
        let p = NodePattern::new("m", NodeKind::MethodDecl);
        let t = TransformationTemplate::new(
            "spin",
            GraphPattern::new(p),
            vec![TransformOp::set("m", AttrKey::Name, AttrSource::Fresh("m".into()))],
        );
        let mut cpg = Cpg::build(load_str("void f() {}").unwrap());
        let err = apply(&mut cpg, &t, 5).unwrap_err();
        assert_eq!(err, PatternError::NonTermination { template: "spin".into(), cap: 5 });
    }
}
