//! Linearization of a program into structural tokens.
//!
//! Names, types and literal values are discarded; only the kinds below are
//! emitted. The integer ids are frozen:
//!
//! | id | kind | emitted for |
//! |----|------|-------------|
//! | 1 | `METHOD_BEGIN` | method declaration |
//! | 2 | `VARIABLE` | parameter, local declaration |
//! | 3 | `LOOP_BEGIN` | `while`, `for` |
//! | 4 | `ASSIGN` | `=`, `++`, `--` |
//! | 5 | `APPLY` | call, `Optional.of`/`ofNullable`, `.get()`/`.orElse()` |
//! | 6 | `LOOP_END` | end of loop |
//! | 7 | `METHOD_END` | end of method |
//! | 8 | `CLASS_BEGIN` | class declaration |
//! | 9 | `CLASS_END` | end of class |
//! | 10 | `CONSTRUCTOR_BEGIN` | constructor declaration |
//! | 11 | `CONSTRUCTOR_END` | end of constructor |
//! | 12 | `FIELD` | field declaration |
//! | 13 | `IF_BEGIN` | `if` |
//! | 14 | `ELSE` | start of an else branch |
//! | 15 | `IF_END` | end of `if` |
//! | 16 | `RETURN` | `return` |
//! | 17 | `THROW` | `throw` |
//! | 18 | `NEW` | object creation |
//! | 19 | `BLOCK_BEGIN` | nested bare block |
//! | 20 | `BLOCK_END` | end of nested bare block |
//!
//! Two traversal modes exist. [`Mode::Baseline`] walks the tree in preorder,
//! keeps members in source order and emits a `for` loop's update before its
//! body, like classic token-based detectors. [`Mode::Eog`] emits
//! sub-expressions before the construct that consumes them, lays out loops in
//! evaluation order, and sorts members topologically (see [`order_members`]).

mod order;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cpg::Cpg;
use crate::frontend::ast::{Ast, NodeId, NodeKind, Span};

pub use order::{member_key, order_members, MemberKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TokenKind {
    MethodBegin = 1,
    Variable = 2,
    LoopBegin = 3,
    Assign = 4,
    Apply = 5,
    LoopEnd = 6,
    MethodEnd = 7,
    ClassBegin = 8,
    ClassEnd = 9,
    ConstructorBegin = 10,
    ConstructorEnd = 11,
    Field = 12,
    IfBegin = 13,
    Else = 14,
    IfEnd = 15,
    Return = 16,
    Throw = 17,
    New = 18,
    BlockBegin = 19,
    BlockEnd = 20,
}

impl TokenKind {
    pub const ALL: [TokenKind; 20] = [
        TokenKind::MethodBegin,
        TokenKind::Variable,
        TokenKind::LoopBegin,
        TokenKind::Assign,
        TokenKind::Apply,
        TokenKind::LoopEnd,
        TokenKind::MethodEnd,
        TokenKind::ClassBegin,
        TokenKind::ClassEnd,
        TokenKind::ConstructorBegin,
        TokenKind::ConstructorEnd,
        TokenKind::Field,
        TokenKind::IfBegin,
        TokenKind::Else,
        TokenKind::IfEnd,
        TokenKind::Return,
        TokenKind::Throw,
        TokenKind::New,
        TokenKind::BlockBegin,
        TokenKind::BlockEnd,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<TokenKind> {
        TokenKind::ALL.get(usize::from(id).checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            TokenKind::MethodBegin => "METHOD_BEGIN",
            TokenKind::Variable => "VARIABLE",
            TokenKind::LoopBegin => "LOOP_BEGIN",
            TokenKind::Assign => "ASSIGN",
            TokenKind::Apply => "APPLY",
            TokenKind::LoopEnd => "LOOP_END",
            TokenKind::MethodEnd => "METHOD_END",
            TokenKind::ClassBegin => "CLASS_BEGIN",
            TokenKind::ClassEnd => "CLASS_END",
            TokenKind::ConstructorBegin => "CONSTRUCTOR_BEGIN",
            TokenKind::ConstructorEnd => "CONSTRUCTOR_END",
            TokenKind::Field => "FIELD",
            TokenKind::IfBegin => "IF_BEGIN",
            TokenKind::Else => "ELSE",
            TokenKind::IfEnd => "IF_END",
            TokenKind::Return => "RETURN",
            TokenKind::Throw => "THROW",
            TokenKind::New => "NEW",
            TokenKind::BlockBegin => "BLOCK_BEGIN",
            TokenKind::BlockEnd => "BLOCK_END",
        }
    }

    pub fn from_name(name: &str) -> Option<TokenKind> {
        TokenKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Lower-case prose label ("method start", "loop end", ...).
    pub fn label(self) -> String {
        self.name().to_lowercase().replace('_', " ").replace("begin", "start")
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Mode {
    Baseline,
    #[default]
    Eog,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "baseline" => Ok(Mode::Baseline),
            "eog" | "normalized" => Ok(Mode::Eog),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

/// Tokens plus the source span that produced each one.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<TokenKind>,
    pub spans: Vec<Span>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn ids(&self) -> Vec<u8> {
        self.tokens.iter().map(|t| t.id()).collect()
    }

    fn push(&mut self, kind: TokenKind, span: Span) {
        self.tokens.push(kind);
        self.spans.push(span);
    }
}

pub fn tokenize(cpg: &Cpg, mode: Mode) -> TokenSequence {
    tokenize_ast(&cpg.ast, mode)
}

pub fn tokenize_ast(ast: &Ast, mode: Mode) -> TokenSequence {
    let mut e = Emitter { ast, mode, out: TokenSequence::default() };
    let items: Vec<NodeId> = ast.children(ast.root()).iter().flat_map(|f| ast.children(*f).iter().copied()).collect();
    for item in e.ordered(&items) {
        e.node(item);
    }
    e.out
}

/// Tokens of a single subtree, members ordered per `mode`.
pub fn tokens_of(ast: &Ast, id: NodeId, mode: Mode) -> Vec<TokenKind> {
    let mut e = Emitter { ast, mode, out: TokenSequence::default() };
    e.node(id);
    e.out.tokens
}

/// One token name per line.
pub fn dump(seq: &TokenSequence) -> String {
    seq.tokens.iter().map(|t| format!("{t}\n")).collect()
}

pub fn parse_dump(text: &str) -> Result<Vec<TokenKind>, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| TokenKind::from_name(l).ok_or_else(|| format!("unknown token `{l}`")))
        .collect()
}

struct Emitter<'a> {
    ast: &'a Ast,
    mode: Mode,
    out: TokenSequence,
}

impl Emitter<'_> {
    fn ordered(&self, items: &[NodeId]) -> Vec<NodeId> {
        match self.mode {
            Mode::Baseline => items.to_vec(),
            Mode::Eog => order::order_items(self.ast, items),
        }
    }

    fn emit(&mut self, kind: TokenKind, n: NodeId) {
        let span = self.ast.node(n).span;
        self.out.push(kind, span);
    }

    fn pre(&self) -> bool {
        self.mode == Mode::Baseline
    }

    /// `kind` around the children, before them in preorder and after in postorder.
    fn wrap(&mut self, kind: Option<TokenKind>, n: NodeId) {
        let kids = self.ast.children(n).to_vec();
        if self.pre() {
            if let Some(k) = kind {
                self.emit(k, n);
            }
        }
        for k in kids {
            self.node(k);
        }
        if !self.pre() {
            if let Some(k) = kind {
                self.emit(k, n);
            }
        }
    }

    fn node(&mut self, n: NodeId) {
        let ast = self.ast;
        let kids = ast.children(n).to_vec();
        match ast.kind(n) {
            NodeKind::Program | NodeKind::File => {
                for k in kids {
                    self.node(k);
                }
            }
            NodeKind::ClassDecl => {
                self.emit(TokenKind::ClassBegin, n);
                for m in self.ordered(&kids) {
                    self.node(m);
                }
                self.emit(TokenKind::ClassEnd, n);
            }
            NodeKind::MethodDecl | NodeKind::ConstructorDecl => {
                let (begin, end) = if ast.kind(n) == NodeKind::MethodDecl {
                    (TokenKind::MethodBegin, TokenKind::MethodEnd)
                } else {
                    (TokenKind::ConstructorBegin, TokenKind::ConstructorEnd)
                };
                self.emit(begin, n);
                for k in kids {
                    self.node(k);
                }
                self.emit(end, n);
            }
            NodeKind::FieldDecl => self.wrap(Some(TokenKind::Field), n),
            NodeKind::ParamDecl | NodeKind::LocalVarDecl => self.wrap(Some(TokenKind::Variable), n),
            NodeKind::Block => {
                let bare = ast.parent(n).is_some_and(|p| ast.kind(p) == NodeKind::Block);
                if bare {
                    self.emit(TokenKind::BlockBegin, n);
                }
                for k in kids {
                    self.node(k);
                }
                if bare {
                    self.emit(TokenKind::BlockEnd, n);
                }
            }
            NodeKind::Assign => self.wrap(Some(TokenKind::Assign), n),
            NodeKind::UnaryOp => {
                let inc = ast.attrs(n).op.is_some_and(|o| o.is_increment());
                self.wrap(inc.then_some(TokenKind::Assign), n)
            }
            NodeKind::Call | NodeKind::OptionalWrap | NodeKind::OptionalUnwrap => self.wrap(Some(TokenKind::Apply), n),
            NodeKind::New => self.wrap(Some(TokenKind::New), n),
            NodeKind::ReturnStmt => self.wrap(Some(TokenKind::Return), n),
            NodeKind::ThrowStmt => self.wrap(Some(TokenKind::Throw), n),
            NodeKind::IfStmt => {
                if self.pre() {
                    self.emit(TokenKind::IfBegin, n);
                    self.node(kids[0]);
                } else {
                    self.node(kids[0]);
                    self.emit(TokenKind::IfBegin, n);
                }
                self.node(kids[1]);
                if let Some(e) = kids.get(2) {
                    self.emit(TokenKind::Else, *e);
                    self.node(*e);
                }
                self.emit(TokenKind::IfEnd, n);
            }
            NodeKind::WhileStmt => {
                self.emit(TokenKind::LoopBegin, n);
                self.node(kids[0]);
                self.node(kids[1]);
                self.emit(TokenKind::LoopEnd, n);
            }
            NodeKind::ForStmt => {
                let [init, cond, update, body] = [kids[0], kids[1], kids[2], kids[3]];
                if self.pre() {
                    self.emit(TokenKind::LoopBegin, n);
                    for k in [init, cond, update, body] {
                        self.node(k);
                    }
                } else {
                    self.node(init);
                    self.emit(TokenKind::LoopBegin, n);
                    for k in [cond, body, update] {
                        self.node(k);
                    }
                }
                self.emit(TokenKind::LoopEnd, n);
            }
            NodeKind::ExprStmt
            | NodeKind::FieldAccess
            | NodeKind::NameRef
            | NodeKind::This
            | NodeKind::BinaryOp
            | NodeKind::Literal => self.wrap(None, n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_str;

    const ORIGINAL: &str = "void printRoots(int n) { for (int i=0; i<n; i++) { double d = sqrt(i); d++; println(d); } }";
    const VARIANT: &str = "void printRoots(int n) { int i = 0; while (i < n) { double d = sqrt(i); println(++d); i++; } }";

    fn labels(src: &str, mode: Mode) -> Vec<String> {
        tokenize_ast(&load_str(src).unwrap(), mode).tokens.iter().map(|t| t.label()).collect()
    }

    #[test]
    fn ids_round_trip() {
        for k in TokenKind::ALL {
            assert_eq!(TokenKind::from_id(k.id()), Some(k));
            assert_eq!(TokenKind::from_name(k.name()), Some(k));
        }
        assert_eq!(TokenKind::from_id(0), None);
        assert_eq!(TokenKind::from_id(21), None);
    }

    #[test]
    fn baseline_original_column() {
        let expected = [
            "method start", "variable", "loop start", "variable", "assign", "variable", "apply", "assign", "apply", "loop end",
            "method end",
        ];
        assert_eq!(labels(ORIGINAL, Mode::Baseline), expected);
    }

    #[test]
    fn baseline_variant_column() {
        let expected = [
            "method start", "variable", "variable", "loop start", "variable", "apply", "apply", "assign", "assign", "loop end",
            "method end",
        ];
        assert_eq!(labels(VARIANT, Mode::Baseline), expected);
    }

    #[test]
    fn eog_mode_is_postorder() {
        let t = tokenize_ast(&load_str("void f() { int x = sqrt(abs(1)); }").unwrap(), Mode::Eog);
        assert_eq!(
            t.tokens,
            vec![TokenKind::MethodBegin, TokenKind::Apply, TokenKind::Apply, TokenKind::Variable, TokenKind::MethodEnd]
        );
        let for_loop = labels("void f() { for (int i = 0; i < 3; i++) { println(i); } }", Mode::Eog);
        assert_eq!(for_loop, ["method start", "variable", "loop start", "apply", "assign", "loop end", "method end"]);
    }

    #[test]
    fn empty_class() {
        let t = tokenize_ast(&load_str("class A {}").unwrap(), Mode::Eog);
        assert_eq!(t.tokens, vec![TokenKind::ClassBegin, TokenKind::ClassEnd]);
    }

    #[test]
    fn spans_parallel_tokens() {
        let t = tokenize_ast(&load_str(ORIGINAL).unwrap(), Mode::Eog);
        assert_eq!(t.tokens.len(), t.spans.len());
        assert!(t.spans.iter().all(|s| s.line >= 1));
    }

    #[test]
    fn dump_round_trip() {
        let t = tokenize_ast(&load_str(VARIANT).unwrap(), Mode::Baseline);
        let text = dump(&t);
        assert!(text.starts_with("METHOD_BEGIN\nVARIABLE\n"));
        assert_eq!(parse_dump(&text).unwrap(), t.tokens);
        assert!(parse_dump("NOPE").is_err());
    }

    #[test]
    fn if_else_and_bare_block() {
        let got = labels("void f(int a) { if (a > 1) { return; } else { { println(a); } } }", Mode::Eog);
        assert_eq!(
            got,
            [
                "method start", "variable", "if start", "return", "else", "block start", "apply", "block end", "if end",
                "method end"
            ]
        );
    }
}
