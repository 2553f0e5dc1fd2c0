use super::ast::{Ast, Attrs, Literal, NodeId, NodeKind, Op, Span, Type};
use super::lexer::{lex, Tok, Token};
use super::{SourceUnit, SyntaxError};

type PResult<T> = Result<T, SyntaxError>;

/// Parses `unit` and appends a `File` node to the program root.
pub fn parse_into(ast: &mut Ast, unit: &SourceUnit) -> PResult<NodeId> {
    let toks = lex(&unit.text)?;
    let root = ast.root();
    let file = ast.add_child(root, NodeKind::File, Attrs::named(unit.path.clone()), Span::default());
    let mut p = Parser { toks, pos: 0, ast, classes: Vec::new() };
    while !p.at_eof() {
        let item = p.top_level()?;
        p.ast.push_child(file, item);
    }
    let end = p.toks.last().map(|t| t.span).unwrap_or_default();
    ast.node_mut(file).span = Span { start: 0, end: end.end, line: 1, col: 1 };
    Ok(file)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    ast: &'a mut Ast,
    classes: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(SyntaxError::at(self.span(), msg))
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.err(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Span> {
        if self.is_sym(s) {
            Ok(self.bump().span)
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<Span> {
        if self.is_kw(s) {
            Ok(self.bump().span)
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                if s == "get" || s == "orElse" {
                    return Err(SyntaxError::at(sp, format!("`{s}` is reserved")));
                }
                Ok((s, sp))
            }
            _ => self.unexpected("identifier"),
        }
    }

    fn node(&mut self, kind: NodeKind, attrs: Attrs, span: Span, children: &[NodeId]) -> NodeId {
        let id = self.ast.alloc(kind, attrs, span);
        for c in children {
            self.ast.push_child(id, *c);
        }
        id
    }

    fn finish(&mut self, id: NodeId, start: Span) -> NodeId {
        let end = self.prev_span();
        self.ast.node_mut(id).span = Span { start: start.start, end: end.end, line: start.line, col: start.col };
        id
    }

    // ---- declarations ----

    fn top_level(&mut self) -> PResult<NodeId> {
        let start = self.span();
        let (is_static, is_final) = self.modifiers();
        if self.is_kw("class") {
            return self.class_decl(start);
        }
        let ty = self.parse_type(true)?;
        let (name, _) = self.ident()?;
        if !self.is_sym("(") {
            return self.unexpected("`(` (top-level fields are not supported)");
        }
        self.callable(NodeKind::MethodDecl, name, Some(ty), is_static, is_final, start)
    }

    fn modifiers(&mut self) -> (bool, bool) {
        let (mut st, mut fi) = (false, false);
        loop {
            if self.eat_kw("static") {
                st = true;
            } else if self.eat_kw("final") {
                fi = true;
            } else if self.eat_kw("public") || self.eat_kw("private") || self.eat_kw("protected") {
            } else {
                return (st, fi);
            }
        }
    }

    fn class_decl(&mut self, start: Span) -> PResult<NodeId> {
        self.expect_kw("class")?;
        let (name, _) = self.ident()?;
        self.expect_sym("{")?;
        let class = self.node(NodeKind::ClassDecl, Attrs::named(name.clone()), start, &[]);
        self.classes.push(name);
        while !self.is_sym("}") {
            if self.at_eof() {
                return self.unexpected("`}`");
            }
            let m = self.member()?;
            self.ast.push_child(class, m);
        }
        self.expect_sym("}")?;
        self.classes.pop();
        Ok(self.finish(class, start))
    }

    fn member(&mut self) -> PResult<NodeId> {
        let start = self.span();
        let (is_static, is_final) = self.modifiers();
        if self.is_kw("class") {
            return self.class_decl(start);
        }
        let current = self.classes.last().cloned().unwrap_or_default();
        if matches!(self.peek(), Tok::Ident(n) if *n == current) && matches!(self.peek_at(1), Tok::Sym("(")) {
            self.bump();
            return self.callable(NodeKind::ConstructorDecl, current, None, is_static, is_final, start);
        }
        let ty = self.parse_type(true)?;
        let (name, _) = self.ident()?;
        if self.is_sym("(") {
            return self.callable(NodeKind::MethodDecl, name, Some(ty), is_static, is_final, start);
        }
        if ty == Type::Void {
            return Err(SyntaxError::at(start, "field cannot have type void"));
        }
        let mut attrs = Attrs::typed(name, ty);
        attrs.is_static = is_static;
        attrs.is_final = is_final;
        let field = self.node(NodeKind::FieldDecl, attrs, start, &[]);
        if self.eat_sym("=") {
            let init = self.expr()?;
            self.ast.push_child(field, init);
        }
        self.expect_sym(";")?;
        Ok(self.finish(field, start))
    }

    fn callable(
        &mut self,
        kind: NodeKind,
        name: String,
        ty: Option<Type>,
        is_static: bool,
        is_final: bool,
        start: Span,
    ) -> PResult<NodeId> {
        let mut attrs = Attrs::named(name);
        attrs.ty = ty;
        attrs.is_static = is_static;
        attrs.is_final = is_final;
        let decl = self.node(kind, attrs, start, &[]);
        self.expect_sym("(")?;
        if !self.is_sym(")") {
            loop {
                let pstart = self.span();
                let is_final = self.eat_kw("final");
                let pty = self.parse_type(false)?;
                let (pname, _) = self.ident()?;
                let mut pattrs = Attrs::typed(pname, pty);
                pattrs.is_final = is_final;
                let p = self.node(NodeKind::ParamDecl, pattrs, pstart, &[]);
                let p = self.finish(p, pstart);
                self.ast.push_child(decl, p);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        let body = self.block()?;
        self.ast.push_child(decl, body);
        Ok(self.finish(decl, start))
    }

    fn starts_type(&self) -> bool {
        match self.peek() {
            Tok::Kw(k) => matches!(*k, "int" | "double" | "boolean" | "String" | "Optional" | "void"),
            Tok::Ident(_) => matches!(self.peek_at(1), Tok::Ident(_)),
            _ => false,
        }
    }

    fn parse_type(&mut self, allow_void: bool) -> PResult<Type> {
        let sp = self.span();
        let t = match self.peek().clone() {
            Tok::Kw("int") => Type::Int,
            Tok::Kw("double") => Type::Double,
            Tok::Kw("boolean") => Type::Boolean,
            Tok::Kw("String") => Type::Str,
            Tok::Kw("void") if allow_void => Type::Void,
            Tok::Kw("Optional") => {
                self.bump();
                self.expect_sym("<")?;
                let inner = match self.peek().clone() {
                    Tok::Ident(n) if n == "Integer" => Type::Int,
                    Tok::Ident(n) if n == "Double" => Type::Double,
                    Tok::Ident(n) if n == "Boolean" => Type::Boolean,
                    Tok::Kw("String") => Type::Str,
                    Tok::Ident(n) => Type::Class(n),
                    _ => return self.unexpected("type argument"),
                };
                self.bump();
                self.expect_sym(">")?;
                return Ok(Type::Optional(Box::new(inner)));
            }
            Tok::Ident(n) => Type::Class(n),
            _ => return Err(SyntaxError::at(sp, format!("expected type, found {}", self.peek().describe()))),
        };
        self.bump();
        Ok(t)
    }

    // ---- statements ----

    fn block(&mut self) -> PResult<NodeId> {
        let start = self.expect_sym("{")?;
        let block = self.node(NodeKind::Block, Attrs::default(), start, &[]);
        while !self.is_sym("}") {
            if self.at_eof() {
                return self.unexpected("`}`");
            }
            let s = self.statement()?;
            self.ast.push_child(block, s);
        }
        self.expect_sym("}")?;
        Ok(self.finish(block, start))
    }

    /// Bodies of `if`/`while`/`for` are always blocks in the tree.
    fn body(&mut self) -> PResult<NodeId> {
        if self.is_sym("{") {
            return self.block();
        }
        let start = self.span();
        let s = self.statement()?;
        let b = self.node(NodeKind::Block, Attrs::default(), start, &[s]);
        Ok(self.finish(b, start))
    }

    fn statement(&mut self) -> PResult<NodeId> {
        let start = self.span();
        if self.is_sym("{") {
            return self.block();
        }
        if self.eat_kw("if") {
            self.expect_sym("(")?;
            let cond = self.expr()?;
            self.expect_sym(")")?;
            let then = self.body()?;
            let mut kids = vec![cond, then];
            if self.eat_kw("else") {
                kids.push(self.body()?);
            }
            let n = self.node(NodeKind::IfStmt, Attrs::default(), start, &kids);
            return Ok(self.finish(n, start));
        }
        if self.eat_kw("while") {
            self.expect_sym("(")?;
            let cond = self.expr()?;
            self.expect_sym(")")?;
            let body = self.body()?;
            let n = self.node(NodeKind::WhileStmt, Attrs::default(), start, &[cond, body]);
            return Ok(self.finish(n, start));
        }
        if self.eat_kw("for") {
            self.expect_sym("(")?;
            let init = if self.starts_local() { self.local_decl()? } else { self.simple()? };
            self.expect_sym(";")?;
            let cond = self.expr()?;
            self.expect_sym(";")?;
            let update = self.simple()?;
            self.expect_sym(")")?;
            let body = self.body()?;
            let n = self.node(NodeKind::ForStmt, Attrs::default(), start, &[init, cond, update, body]);
            return Ok(self.finish(n, start));
        }
        if self.eat_kw("return") {
            let mut kids = Vec::new();
            if !self.is_sym(";") {
                kids.push(self.expr()?);
            }
            self.expect_sym(";")?;
            let n = self.node(NodeKind::ReturnStmt, Attrs::default(), start, &kids);
            return Ok(self.finish(n, start));
        }
        if self.eat_kw("throw") {
            if !self.is_kw("new") {
                return self.unexpected("`new`");
            }
            let e = self.expr()?;
            self.expect_sym(";")?;
            let n = self.node(NodeKind::ThrowStmt, Attrs::default(), start, &[e]);
            return Ok(self.finish(n, start));
        }
        let s = if self.starts_local() { self.local_decl()? } else { self.simple()? };
        self.expect_sym(";")?;
        Ok(s)
    }

    fn starts_local(&self) -> bool {
        self.is_kw("final") || (self.starts_type() && !self.is_kw("void"))
    }

    fn local_decl(&mut self) -> PResult<NodeId> {
        let start = self.span();
        let is_final = self.eat_kw("final");
        let ty = self.parse_type(false)?;
        let (name, _) = self.ident()?;
        let mut attrs = Attrs::typed(name, ty);
        attrs.is_final = is_final;
        let decl = self.node(NodeKind::LocalVarDecl, attrs, start, &[]);
        if self.eat_sym("=") {
            let init = self.expr()?;
            self.ast.push_child(decl, init);
        }
        Ok(self.finish(decl, start))
    }

    /// Assignment or expression statement (no trailing `;`).
    fn simple(&mut self) -> PResult<NodeId> {
        let start = self.span();
        let e = self.expr()?;
        if self.is_sym("=") {
            let eq = self.span();
            self.bump();
            if !matches!(self.ast.kind(e), NodeKind::NameRef | NodeKind::FieldAccess) {
                return Err(SyntaxError::at(eq, "left side of assignment is not assignable"));
            }
            let value = self.expr()?;
            let n = self.node(NodeKind::Assign, Attrs::default(), start, &[e, value]);
            return Ok(self.finish(n, start));
        }
        let n = self.node(NodeKind::ExprStmt, Attrs::default(), start, &[e]);
        Ok(self.finish(n, start))
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<NodeId> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<Op> {
        let Tok::Sym(s) = self.peek() else { return None };
        Some(match *s {
            "||" => Op::Or,
            "&&" => Op::And,
            "==" => Op::Eq,
            "!=" => Op::Ne,
            "<" => Op::Lt,
            "<=" => Op::Le,
            ">" => Op::Gt,
            ">=" => Op::Ge,
            "+" => Op::Add,
            "-" => Op::Sub,
            "*" => Op::Mul,
            "/" => Op::Div,
            "%" => Op::Rem,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<NodeId> {
        let start = self.span();
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            let n = self.node(NodeKind::BinaryOp, Attrs::op(op), start, &[lhs, rhs]);
            lhs = self.finish(n, start);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<NodeId> {
        let start = self.span();
        if self.is_sym("-") {
            match self.peek_at(1).clone() {
                Tok::Int(v) => {
                    self.bump();
                    self.bump();
                    let lit = self.node(NodeKind::Literal, Attrs::literal(Literal::Int(-v)), start, &[]);
                    let lit = self.finish(lit, start);
                    return self.postfix(lit, start);
                }
                Tok::Double(v) => {
                    self.bump();
                    self.bump();
                    let lit = self.node(NodeKind::Literal, Attrs::literal(Literal::Double(-v)), start, &[]);
                    let lit = self.finish(lit, start);
                    return self.postfix(lit, start);
                }
                _ => {}
            }
        }
        let op = match self.peek() {
            Tok::Sym("!") => Some(Op::Not),
            Tok::Sym("-") => Some(Op::Neg),
            Tok::Sym("++") => Some(Op::PreInc),
            Tok::Sym("--") => Some(Op::PreDec),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let operand = self.unary()?;
            if op.is_increment() && !matches!(self.ast.kind(operand), NodeKind::NameRef | NodeKind::FieldAccess) {
                return Err(SyntaxError::at(start, "operand of increment is not assignable"));
            }
            let n = self.node(NodeKind::UnaryOp, Attrs::op(op), start, &[operand]);
            return Ok(self.finish(n, start));
        }
        let p = self.primary()?;
        self.postfix(p, start)
    }

    fn postfix(&mut self, mut e: NodeId, start: Span) -> PResult<NodeId> {
        loop {
            if self.is_sym("++") || self.is_sym("--") {
                let op = if self.is_sym("++") { Op::PostInc } else { Op::PostDec };
                if !matches!(self.ast.kind(e), NodeKind::NameRef | NodeKind::FieldAccess) {
                    return self.err("operand of increment is not assignable");
                }
                self.bump();
                let n = self.node(NodeKind::UnaryOp, Attrs::op(op), start, &[e]);
                e = self.finish(n, start);
                continue;
            }
            if !self.eat_sym(".") {
                return Ok(e);
            }
            match self.peek().clone() {
                Tok::Ident(n) if n == "get" && matches!(self.peek_at(1), Tok::Sym("(")) => {
                    self.bump();
                    self.expect_sym("(")?;
                    self.expect_sym(")")?;
                    let u = self.node(NodeKind::OptionalUnwrap, Attrs::op(Op::Get), start, &[e]);
                    e = self.finish(u, start);
                }
                Tok::Ident(n) if n == "orElse" && matches!(self.peek_at(1), Tok::Sym("(")) => {
                    self.bump();
                    self.expect_sym("(")?;
                    let d = self.expr()?;
                    self.expect_sym(")")?;
                    let u = self.node(NodeKind::OptionalUnwrap, Attrs::op(Op::OrElse), start, &[e, d]);
                    e = self.finish(u, start);
                }
                _ => {
                    let (name, _) = self.ident()?;
                    if self.is_sym("(") {
                        let args = self.args()?;
                        let mut attrs = Attrs::named(name);
                        attrs.qualified = true;
                        let mut kids = vec![e];
                        kids.extend(args);
                        let c = self.node(NodeKind::Call, attrs, start, &kids);
                        e = self.finish(c, start);
                    } else {
                        let f = self.node(NodeKind::FieldAccess, Attrs::named(name), start, &[e]);
                        e = self.finish(f, start);
                    }
                }
            }
        }
    }

    fn args(&mut self) -> PResult<Vec<NodeId>> {
        self.expect_sym("(")?;
        let mut out = Vec::new();
        if !self.is_sym(")") {
            loop {
                out.push(self.expr()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        Ok(out)
    }

    fn primary(&mut self) -> PResult<NodeId> {
        let start = self.span();
        let lit = |p: &mut Self, l: Literal| {
            p.bump();
            let n = p.node(NodeKind::Literal, Attrs::literal(l), start, &[]);
            p.finish(n, start)
        };
        match self.peek().clone() {
            Tok::Int(v) => {
                if v > i32::MAX as i64 {
                    return self.err("integer literal too large");
                }
                Ok(lit(self, Literal::Int(v)))
            }
            Tok::Double(v) => Ok(lit(self, Literal::Double(v))),
            Tok::Str(s) => Ok(lit(self, Literal::Str(s))),
            Tok::Kw("true") => Ok(lit(self, Literal::Bool(true))),
            Tok::Kw("false") => Ok(lit(self, Literal::Bool(false))),
            Tok::Kw("null") => Ok(lit(self, Literal::Null)),
            Tok::Kw("this") => {
                self.bump();
                let n = self.node(NodeKind::This, Attrs::default(), start, &[]);
                Ok(self.finish(n, start))
            }
            Tok::Kw("new") => {
                self.bump();
                let (name, _) = self.ident()?;
                let args = self.args()?;
                let n = self.node(NodeKind::New, Attrs::named(name), start, &args);
                Ok(self.finish(n, start))
            }
            Tok::Kw("Optional") => {
                self.bump();
                self.expect_sym(".")?;
                let op = match self.peek() {
                    Tok::Ident(n) if n == "of" => Op::Of,
                    Tok::Ident(n) if n == "ofNullable" => Op::OfNullable,
                    _ => return self.unexpected("`of` or `ofNullable`"),
                };
                self.bump();
                self.expect_sym("(")?;
                let v = self.expr()?;
                self.expect_sym(")")?;
                let n = self.node(NodeKind::OptionalWrap, Attrs::op(op), start, &[v]);
                Ok(self.finish(n, start))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(_) => {
                let (name, _) = self.ident()?;
                if self.is_sym("(") {
                    let args = self.args()?;
                    let n = self.node(NodeKind::Call, Attrs::named(name), start, &args);
                    Ok(self.finish(n, start))
                } else {
                    let n = self.node(NodeKind::NameRef, Attrs::named(name), start, &[]);
                    Ok(self.finish(n, start))
                }
            }
            _ => self.unexpected("expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, SourceUnit};
    use super::*;

    fn p(text: &str) -> Result<Ast, SyntaxError> {
        parse(&SourceUnit::new("t.minij", text))
    }

    fn kinds(ast: &Ast) -> Vec<NodeKind> {
        ast.live_nodes().into_iter().map(|n| ast.kind(n)).collect()
    }

    #[test]
    fn empty_class() {
        let ast = p("class A {}").unwrap();
        let file = ast.children(ast.root())[0];
        let class = ast.children(file)[0];
        assert_eq!(ast.kind(class), NodeKind::ClassDecl);
        assert!(ast.children(class).is_empty());
    }

    #[test]
    fn missing_initializer_reports_semicolon() {
        let e = p("class A { void m() { int x = ; } }").unwrap_err();
        assert_eq!((e.line, e.col), (1, 30));
        assert!(e.message.contains("expected expression"));
    }

    #[test]
    fn for_loop_layout() {
        let ast = p("void f(int n) { for (int i = 0; i < n; i++) { println(i); } }").unwrap();
        let f = ast.live_nodes().into_iter().find(|n| ast.kind(*n) == NodeKind::ForStmt).unwrap();
        let k: Vec<_> = ast.children(f).iter().map(|c| ast.kind(*c)).collect();
        assert_eq!(k, vec![NodeKind::LocalVarDecl, NodeKind::BinaryOp, NodeKind::ExprStmt, NodeKind::Block]);
    }

    #[test]
    fn precedence() {
        let ast = p("void f() { int x = 1 + 2 * 3 - 4; }").unwrap();
        let decl = ast.live_nodes().into_iter().find(|n| ast.kind(*n) == NodeKind::LocalVarDecl).unwrap();
        let top = ast.children(decl)[0];
        assert_eq!(ast.attrs(top).op, Some(Op::Sub));
        let lhs = ast.children(top)[0];
        assert_eq!(ast.attrs(lhs).op, Some(Op::Add));
    }

    #[test]
    fn negative_literal_folds() {
        let ast = p("void f() { int x = -5; int y = - x; }").unwrap();
        let ks = kinds(&ast);
        assert_eq!(ks.iter().filter(|k| **k == NodeKind::UnaryOp).count(), 1);
    }

    #[test]
    fn optional_forms() {
        let ast = p("void f() { Optional<Integer> o = Optional.of(1); int a = o.get(); int b = o.orElse(2); }").unwrap();
        let ks = kinds(&ast);
        assert_eq!(ks.iter().filter(|k| **k == NodeKind::OptionalWrap).count(), 1);
        assert_eq!(ks.iter().filter(|k| **k == NodeKind::OptionalUnwrap).count(), 2);
    }

    #[test]
    fn single_statement_bodies_become_blocks() {
        let ast = p("void f(int a) { if (a > 0) println(a); else println(0); }").unwrap();
        let i = ast.live_nodes().into_iter().find(|n| ast.kind(*n) == NodeKind::IfStmt).unwrap();
        assert_eq!(ast.kind(ast.children(i)[1]), NodeKind::Block);
        assert_eq!(ast.kind(ast.children(i)[2]), NodeKind::Block);
    }

    #[test]
    fn constructor_and_field() {
        let ast = p("class P { static final int K = 3; int x; P(int x) { this.x = x; } }").unwrap();
        let ks = kinds(&ast);
        assert!(ks.contains(&NodeKind::ConstructorDecl));
        assert_eq!(ks.iter().filter(|k| **k == NodeKind::FieldDecl).count(), 2);
    }

    #[test]
    fn rejects_bad_assignment_target() {
        assert!(p("void f() { 1 = 2; }").is_err());
        assert!(p("void f() { int get = 1; }").is_err());
        assert!(p("void f() { int x = 2147483648; }").is_err());
        assert!(p("void f() { int x = -2147483648; }").is_ok());
    }
}
