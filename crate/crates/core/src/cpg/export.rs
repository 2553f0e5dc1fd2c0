//! Plain-text graph dump: one node per line (`id kind attrs`), then one edge
//! per line (`src dst layer label`).

use std::fmt::Write;

use super::Cpg;
use crate::frontend::ast::{AttrKey, AttrValue};

const KEYS: [AttrKey; 6] = [AttrKey::Name, AttrKey::Type, AttrKey::Value, AttrKey::Op, AttrKey::Static, AttrKey::Final];

pub fn export(cpg: &Cpg) -> String {
    let mut out = String::new();
    for n in cpg.ast.live_nodes() {
        let node = cpg.ast.node(n);
        let _ = write!(out, "{} {}", n.0, node.kind);
        for key in KEYS {
            match node.attrs.get(key) {
                AttrValue::None | AttrValue::Bool(false) => {}
                AttrValue::Bool(true) => {
                    let _ = write!(out, " {}", key.name());
                }
                v => {
                    let _ = write!(out, " {}={}", key.name(), v);
                }
            }
        }
        if let Some(d) = node.attrs.decl {
            let _ = write!(out, " decl={}", d.0);
        }
        out.push('\n');
    }
    for e in cpg.edges() {
        let _ = writeln!(out, "{} {} {} {}", e.src.0, e.dst.0, e.layer, e.label);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_str;

    #[test]
    fn golden_small_method() {
        let cpg = Cpg::build(load_str("void f() { int a = 1; int b = a; }").unwrap());
        let expected = "\
0 Program
1 File name=\"Main.minij\"
2 MethodDecl name=\"f\" type=void
3 Block
4 LocalVarDecl name=\"a\" type=int
5 Literal value=1
6 LocalVarDecl name=\"b\" type=int
7 NameRef name=\"a\" decl=4
0 1 AST 0
1 2 AST 0
2 3 AST 0
3 4 AST 0
3 6 AST 1
4 5 AST 0
6 7 AST 0
2 5 EOG -
4 7 EOG -
5 4 EOG -
7 6 EOG -
4 7 DDG -
";
        assert_eq!(export(&cpg), expected);
    }
}
