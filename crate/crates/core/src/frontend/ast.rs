//! Arena-backed syntax tree shared by the frontend, the code property graph
//! and the attack generators.
//!
//! Every node lives in one [`Ast`] arena and is addressed by a [`NodeId`].
//! Children are ordered; the layout of the child list is fixed per
//! [`NodeKind`] (see the table on [`NodeKind`]). Resolution links
//! (`Attrs::decl`) point from uses to declarations inside the same arena.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Node kinds and their child layout:
///
/// | kind | children |
/// |------|----------|
/// | `Program` | `File*` |
/// | `File` | `(ClassDecl \| MethodDecl)*` |
/// | `ClassDecl` | members |
/// | `FieldDecl` | `[init]` |
/// | `MethodDecl`, `ConstructorDecl` | `ParamDecl*, Block` |
/// | `Block` | statements |
/// | `LocalVarDecl` | `[init]` |
/// | `Assign` | `target, value` |
/// | `IfStmt` | `cond, then, [else]` |
/// | `ForStmt` | `init, cond, update, body` |
/// | `WhileStmt` | `cond, body` |
/// | `ReturnStmt` | `[value]` |
/// | `ThrowStmt` | `New` |
/// | `ExprStmt` | `expr` |
/// | `Call` | `[receiver] (if qualified), args*` |
/// | `FieldAccess` | `receiver` |
/// | `UnaryOp` | `operand` |
/// | `BinaryOp` | `lhs, rhs` |
/// | `OptionalWrap` | `value` |
/// | `OptionalUnwrap` | `receiver, [default]` |
/// | `New` | `args*` |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    Program,
    File,
    ClassDecl,
    FieldDecl,
    MethodDecl,
    ConstructorDecl,
    ParamDecl,
    Block,
    LocalVarDecl,
    Assign,
    IfStmt,
    ForStmt,
    WhileStmt,
    ReturnStmt,
    ThrowStmt,
    ExprStmt,
    Call,
    FieldAccess,
    NameRef,
    This,
    UnaryOp,
    BinaryOp,
    Literal,
    OptionalWrap,
    OptionalUnwrap,
    New,
}

impl NodeKind {
    pub const ALL: [NodeKind; 26] = [
        NodeKind::Program,
        NodeKind::File,
        NodeKind::ClassDecl,
        NodeKind::FieldDecl,
        NodeKind::MethodDecl,
        NodeKind::ConstructorDecl,
        NodeKind::ParamDecl,
        NodeKind::Block,
        NodeKind::LocalVarDecl,
        NodeKind::Assign,
        NodeKind::IfStmt,
        NodeKind::ForStmt,
        NodeKind::WhileStmt,
        NodeKind::ReturnStmt,
        NodeKind::ThrowStmt,
        NodeKind::ExprStmt,
        NodeKind::Call,
        NodeKind::FieldAccess,
        NodeKind::NameRef,
        NodeKind::This,
        NodeKind::UnaryOp,
        NodeKind::BinaryOp,
        NodeKind::Literal,
        NodeKind::OptionalWrap,
        NodeKind::OptionalUnwrap,
        NodeKind::New,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Program => "Program",
            NodeKind::File => "File",
            NodeKind::ClassDecl => "ClassDecl",
            NodeKind::FieldDecl => "FieldDecl",
            NodeKind::MethodDecl => "MethodDecl",
            NodeKind::ConstructorDecl => "ConstructorDecl",
            NodeKind::ParamDecl => "ParamDecl",
            NodeKind::Block => "Block",
            NodeKind::LocalVarDecl => "LocalVarDecl",
            NodeKind::Assign => "Assign",
            NodeKind::IfStmt => "IfStmt",
            NodeKind::ForStmt => "ForStmt",
            NodeKind::WhileStmt => "WhileStmt",
            NodeKind::ReturnStmt => "ReturnStmt",
            NodeKind::ThrowStmt => "ThrowStmt",
            NodeKind::ExprStmt => "ExprStmt",
            NodeKind::Call => "Call",
            NodeKind::FieldAccess => "FieldAccess",
            NodeKind::NameRef => "NameRef",
            NodeKind::This => "This",
            NodeKind::UnaryOp => "UnaryOp",
            NodeKind::BinaryOp => "BinaryOp",
            NodeKind::Literal => "Literal",
            NodeKind::OptionalWrap => "OptionalWrap",
            NodeKind::OptionalUnwrap => "OptionalUnwrap",
            NodeKind::New => "New",
        }
    }

    /// Statements are the nodes that may appear directly inside a `Block`.
    pub fn is_statement(self) -> bool {
        matches!(
            self,
            NodeKind::Block
                | NodeKind::LocalVarDecl
                | NodeKind::Assign
                | NodeKind::IfStmt
                | NodeKind::ForStmt
                | NodeKind::WhileStmt
                | NodeKind::ReturnStmt
                | NodeKind::ThrowStmt
                | NodeKind::ExprStmt
        )
    }

    pub fn is_expression(self) -> bool {
        matches!(
            self,
            NodeKind::Call
                | NodeKind::FieldAccess
                | NodeKind::NameRef
                | NodeKind::This
                | NodeKind::UnaryOp
                | NodeKind::BinaryOp
                | NodeKind::Literal
                | NodeKind::OptionalWrap
                | NodeKind::OptionalUnwrap
                | NodeKind::New
        )
    }

    pub fn is_member(self) -> bool {
        matches!(
            self,
            NodeKind::ClassDecl | NodeKind::FieldDecl | NodeKind::MethodDecl | NodeKind::ConstructorDecl
        )
    }

    pub fn is_callable(self) -> bool {
        matches!(self, NodeKind::MethodDecl | NodeKind::ConstructorDecl)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Type {
    Int,
    Double,
    Boolean,
    Str,
    Void,
    Null,
    Class(String),
    Optional(Box<Type>),
}

impl Type {
    pub fn is_numeric(&self) -> bool {
        matches!(self, Type::Int | Type::Double)
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, Type::Int | Type::Double | Type::Boolean)
    }

    /// Boxed spelling used inside `Optional<...>`.
    pub fn boxed_name(&self) -> String {
        match self {
            Type::Int => "Integer".into(),
            Type::Double => "Double".into(),
            Type::Boolean => "Boolean".into(),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Double => f.write_str("double"),
            Type::Boolean => f.write_str("boolean"),
            Type::Str => f.write_str("String"),
            Type::Void => f.write_str("void"),
            Type::Null => f.write_str("null"),
            Type::Class(name) => f.write_str(name),
            Type::Optional(inner) => write!(f, "Optional<{}>", inner.boxed_name()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Literal {
    Int(i64),
    Double(f64),
    Bool(bool),
    Str(String),
    Null,
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Literal::Int(a), Literal::Int(b)) => a == b,
            (Literal::Double(a), Literal::Double(b)) => a.to_bits() == b.to_bits(),
            (Literal::Bool(a), Literal::Bool(b)) => a == b,
            (Literal::Str(a), Literal::Str(b)) => a == b,
            (Literal::Null, Literal::Null) => true,
            _ => false,
        }
    }
}

impl Eq for Literal {}

impl Literal {
    pub fn ty(&self) -> Type {
        match self {
            Literal::Int(_) => Type::Int,
            Literal::Double(_) => Type::Double,
            Literal::Bool(_) => Type::Boolean,
            Literal::Str(_) => Type::Str,
            Literal::Null => Type::Null,
        }
    }

    /// Source spelling; doubles always carry a fraction or exponent so
    /// they re-lex as doubles.
    pub fn source_text(&self) -> String {
        match self {
            Literal::Int(v) => v.to_string(),
            Literal::Double(v) => format!("{v:?}"),
            Literal::Bool(v) => v.to_string(),
            Literal::Str(s) => {
                let mut out = String::with_capacity(s.len() + 2);
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        c => out.push(c),
                    }
                }
                out.push('"');
                out
            }
            Literal::Null => "null".into(),
        }
    }

    pub fn is_negative_number(&self) -> bool {
        match self {
            Literal::Int(v) => *v < 0,
            Literal::Double(v) => v.is_sign_negative(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Not,
    Neg,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
    /// `Optional.of(e)`
    Of,
    /// `Optional.ofNullable(e)`
    OfNullable,
    /// `o.get()`
    Get,
    /// `o.orElse(d)`
    OrElse,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Div => "/",
            Op::Rem => "%",
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Gt => ">",
            Op::Ge => ">=",
            Op::Eq => "==",
            Op::Ne => "!=",
            Op::And => "&&",
            Op::Or => "||",
            Op::Not => "!",
            Op::Neg => "-",
            Op::PreInc | Op::PostInc => "++",
            Op::PreDec | Op::PostDec => "--",
            Op::Of => "of",
            Op::OfNullable => "ofNullable",
            Op::Get => "get",
            Op::OrElse => "orElse",
        }
    }

    pub fn is_increment(self) -> bool {
        matches!(self, Op::PreInc | Op::PreDec | Op::PostInc | Op::PostDec)
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, Op::Lt | Op::Le | Op::Gt | Op::Ge | Op::Eq | Op::Ne)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, Op::And | Op::Or)
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, Op::Add | Op::Sub | Op::Mul | Op::Div | Op::Rem)
    }

    /// Binding strength used by the parser and the printer.
    pub fn precedence(self) -> u8 {
        match self {
            Op::Or => 1,
            Op::And => 2,
            Op::Eq | Op::Ne => 3,
            Op::Lt | Op::Le | Op::Gt | Op::Ge => 4,
            Op::Add | Op::Sub => 5,
            Op::Mul | Op::Div | Op::Rem => 6,
            Op::Not | Op::Neg | Op::PreInc | Op::PreDec => 7,
            Op::PostInc | Op::PostDec => 8,
            Op::Of | Op::OfNullable | Op::Get | Op::OrElse => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Span {
    pub start: u32,
    pub end: u32,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn cover(self, other: Span) -> Span {
        if self == Span::default() {
            return other;
        }
        if other == Span::default() {
            return self;
        }
        let first = if other.start < self.start { other } else { self };
        Span { start: first.start, end: self.end.max(other.end), line: first.line, col: first.col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Attrs {
    pub name: Option<String>,
    pub ty: Option<Type>,
    pub value: Option<Literal>,
    pub op: Option<Op>,
    pub is_static: bool,
    pub is_final: bool,
    /// `Call` only: child 0 is an explicit receiver.
    pub qualified: bool,
    /// Resolution link from a use to its declaration.
    pub decl: Option<NodeId>,
}

/// Addressable attribute names, used by patterns and transformation ops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttrKey {
    Name,
    Type,
    Value,
    Op,
    Static,
    Final,
    Qualified,
    Decl,
}

impl AttrKey {
    pub fn name(self) -> &'static str {
        match self {
            AttrKey::Name => "name",
            AttrKey::Type => "type",
            AttrKey::Value => "value",
            AttrKey::Op => "op",
            AttrKey::Static => "static",
            AttrKey::Final => "final",
            AttrKey::Qualified => "qualified",
            AttrKey::Decl => "decl",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    None,
    Str(String),
    Type(Type),
    Lit(Literal),
    Op(Op),
    Bool(bool),
    Node(NodeId),
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::None => f.write_str("none"),
            AttrValue::Str(s) => write!(f, "{s:?}"),
            AttrValue::Type(t) => write!(f, "{t}"),
            AttrValue::Lit(l) => f.write_str(&l.source_text()),
            AttrValue::Op(o) => write!(f, "{o:?}"),
            AttrValue::Bool(b) => write!(f, "{b}"),
            AttrValue::Node(n) => write!(f, "{n}"),
        }
    }
}

impl Attrs {
    pub fn get(&self, key: AttrKey) -> AttrValue {
        match key {
            AttrKey::Name => self.name.clone().map_or(AttrValue::None, AttrValue::Str),
            AttrKey::Type => self.ty.clone().map_or(AttrValue::None, AttrValue::Type),
            AttrKey::Value => self.value.clone().map_or(AttrValue::None, AttrValue::Lit),
            AttrKey::Op => self.op.map_or(AttrValue::None, AttrValue::Op),
            AttrKey::Static => AttrValue::Bool(self.is_static),
            AttrKey::Final => AttrValue::Bool(self.is_final),
            AttrKey::Qualified => AttrValue::Bool(self.qualified),
            AttrKey::Decl => self.decl.map_or(AttrValue::None, AttrValue::Node),
        }
    }

    /// Returns false when the value does not fit the key.
    pub fn set(&mut self, key: AttrKey, value: AttrValue) -> bool {
        match (key, value) {
            (AttrKey::Name, AttrValue::Str(s)) => self.name = Some(s),
            (AttrKey::Name, AttrValue::None) => self.name = None,
            (AttrKey::Type, AttrValue::Type(t)) => self.ty = Some(t),
            (AttrKey::Type, AttrValue::None) => self.ty = None,
            (AttrKey::Value, AttrValue::Lit(l)) => self.value = Some(l),
            (AttrKey::Value, AttrValue::None) => self.value = None,
            (AttrKey::Op, AttrValue::Op(o)) => self.op = Some(o),
            (AttrKey::Op, AttrValue::None) => self.op = None,
            (AttrKey::Static, AttrValue::Bool(b)) => self.is_static = b,
            (AttrKey::Final, AttrValue::Bool(b)) => self.is_final = b,
            (AttrKey::Qualified, AttrValue::Bool(b)) => self.qualified = b,
            (AttrKey::Decl, AttrValue::Node(n)) => self.decl = Some(n),
            (AttrKey::Decl, AttrValue::None) => self.decl = None,
            _ => return false,
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AstNode {
    pub kind: NodeKind,
    pub attrs: Attrs,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    pub span: Span,
}

/// The node arena. Deleted nodes leave a `None` hole so ids stay stable.
#[derive(Debug, Clone, PartialEq)]
pub struct Ast {
    nodes: Vec<Option<AstNode>>,
    root: NodeId,
}

impl Ast {
    /// A fresh arena holding only a `Program` root.
    pub fn new() -> Ast {
        let root = AstNode {
            kind: NodeKind::Program,
            attrs: Attrs::default(),
            children: Vec::new(),
            parent: None,
            span: Span::default(),
        };
        Ast {
            nodes: vec![Some(root)],
            root: NodeId(0),
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Upper bound (exclusive) on node ids ever allocated.
    pub fn capacity(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.get(id.index()).is_some_and(Option::is_some)
    }

    pub fn get(&self, id: NodeId) -> Option<&AstNode> {
        self.nodes.get(id.index()).and_then(Option::as_ref)
    }

    pub fn node(&self, id: NodeId) -> &AstNode {
        self.get(id)
            .unwrap_or_else(|| panic!("node {id} is not alive"))
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut AstNode {
        self.nodes
            .get_mut(id.index())
            .and_then(Option::as_mut)
            .unwrap_or_else(|| panic!("node {id} is not alive"))
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.node(id).kind
    }

    pub fn attrs(&self, id: NodeId) -> &Attrs {
        &self.node(id).attrs
    }

    pub fn attrs_mut(&mut self, id: NodeId) -> &mut Attrs {
        &mut self.node_mut(id).attrs
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.node(id).children
    }

    pub fn child(&self, id: NodeId, index: usize) -> Option<NodeId> {
        self.node(id).children.get(index).copied()
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.node(id).parent
    }

    pub fn name(&self, id: NodeId) -> Option<&str> {
        self.node(id).attrs.name.as_deref()
    }

    pub fn decl(&self, id: NodeId) -> Option<NodeId> {
        self.node(id).attrs.decl
    }

    /// Allocates a detached node.
    pub fn alloc(&mut self, kind: NodeKind, attrs: Attrs, span: Span) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Some(AstNode {
            kind,
            attrs,
            children: Vec::new(),
            parent: None,
            span,
        }));
        id
    }

    /// Allocates a node and appends it to `parent`.
    pub fn add_child(&mut self, parent: NodeId, kind: NodeKind, attrs: Attrs, span: Span) -> NodeId {
        let id = self.alloc(kind, attrs, span);
        self.push_child(parent, id);
        id
    }

    pub fn push_child(&mut self, parent: NodeId, child: NodeId) {
        self.detach(child);
        self.node_mut(parent).children.push(child);
        self.node_mut(child).parent = Some(parent);
    }

    pub fn insert_child(&mut self, parent: NodeId, index: usize, child: NodeId) {
        self.detach(child);
        let children = &mut self.node_mut(parent).children;
        let index = index.min(children.len());
        children.insert(index, child);
        self.node_mut(child).parent = Some(parent);
    }

    /// Removes `id` from its parent's child list; the subtree stays alive.
    pub fn detach(&mut self, id: NodeId) {
        if let Some(parent) = self.node(id).parent {
            self.node_mut(parent).children.retain(|c| *c != id);
            self.node_mut(id).parent = None;
        }
    }

    /// Puts `new` where `old` is; `old` ends up detached.
    pub fn replace(&mut self, old: NodeId, new: NodeId) {
        if old == new {
            return;
        }
        self.detach(new);
        if let Some(parent) = self.node(old).parent {
            let pos = self.index_in_parent(old).expect("child listed in parent");
            self.node_mut(parent).children[pos] = new;
            self.node_mut(new).parent = Some(parent);
            self.node_mut(old).parent = None;
        }
    }

    pub fn index_in_parent(&self, id: NodeId) -> Option<usize> {
        let parent = self.node(id).parent?;
        self.node(parent).children.iter().position(|c| *c == id)
    }

    /// Detaches and frees the whole subtree.
    pub fn remove_subtree(&mut self, id: NodeId) {
        self.detach(id);
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            if let Some(node) = self.nodes[n.index()].take() {
                stack.extend(node.children);
            }
        }
    }

    /// Copies a subtree; the copy is detached. Resolution links are kept.
    pub fn clone_subtree(&mut self, id: NodeId) -> NodeId {
        let node = self.node(id).clone();
        let copy = self.alloc(node.kind, node.attrs, node.span);
        for child in node.children {
            let c = self.clone_subtree(child);
            self.push_child(copy, c);
        }
        copy
    }

    /// Frees every node not reachable from the root. Returns the count.
    pub fn collect_garbage(&mut self) -> usize {
        let mut reachable = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            reachable[n.index()] = true;
            stack.extend(self.node(n).children.iter().copied());
        }
        let mut freed = 0;
        for (i, slot) in self.nodes.iter_mut().enumerate() {
            if slot.is_some() && !reachable[i] {
                *slot = None;
                freed += 1;
            }
        }
        if freed > 0 {
            // Links into freed subtrees would dangle.
            for node in self.nodes.iter_mut().flatten() {
                if node.attrs.decl.is_some_and(|d| !reachable[d.index()]) {
                    node.attrs.decl = None;
                }
            }
        }
        freed
    }

    pub fn ancestors(&self, id: NodeId) -> Ancestors<'_> {
        Ancestors {
            ast: self,
            next: self.node(id).parent,
        }
    }

    /// Nearest ancestor (excluding `id`) of the given kind.
    pub fn enclosing(&self, id: NodeId, kind: NodeKind) -> Option<NodeId> {
        self.ancestors(id).find(|a| self.kind(*a) == kind)
    }

    pub fn enclosing_callable(&self, id: NodeId) -> Option<NodeId> {
        self.ancestors(id).find(|a| self.kind(*a).is_callable())
    }

    pub fn is_ancestor(&self, ancestor: NodeId, id: NodeId) -> bool {
        ancestor == id || self.ancestors(id).any(|a| a == ancestor)
    }

    /// Preorder listing of a subtree.
    pub fn preorder(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.node(n).children.iter().rev().copied());
        }
        out
    }

    pub fn subtree_size(&self, id: NodeId) -> usize {
        self.preorder(id).len()
    }

    /// All live nodes reachable from the root, in preorder.
    pub fn live_nodes(&self) -> Vec<NodeId> {
        self.preorder(self.root)
    }

    /// Classes in preorder (nested classes included).
    pub fn classes(&self) -> Vec<NodeId> {
        self.live_nodes()
            .into_iter()
            .filter(|n| self.kind(*n) == NodeKind::ClassDecl)
            .collect()
    }

    pub fn callables(&self) -> Vec<NodeId> {
        self.live_nodes()
            .into_iter()
            .filter(|n| self.kind(*n).is_callable())
            .collect()
    }

    /// Body block of a method or constructor.
    pub fn body(&self, callable: NodeId) -> Option<NodeId> {
        let last = *self.children(callable).last()?;
        (self.kind(last) == NodeKind::Block).then_some(last)
    }

    pub fn params(&self, callable: NodeId) -> Vec<NodeId> {
        self.children(callable)
            .iter()
            .copied()
            .filter(|c| self.kind(*c) == NodeKind::ParamDecl)
            .collect()
    }

    /// Nearest enclosing class of a node (not the node itself).
    pub fn enclosing_class(&self, id: NodeId) -> Option<NodeId> {
        self.enclosing(id, NodeKind::ClassDecl)
    }

    /// Receiver and argument children of a call.
    pub fn call_parts(&self, call: NodeId) -> (Option<NodeId>, &[NodeId]) {
        let node = self.node(call);
        if node.attrs.qualified {
            (node.children.first().copied(), &node.children[1..])
        } else {
            (None, &node.children[..])
        }
    }

    /// Ancestor `File` path, if any.
    pub fn file_of(&self, id: NodeId) -> Option<&str> {
        let file = if self.kind(id) == NodeKind::File {
            Some(id)
        } else {
            self.enclosing(id, NodeKind::File)
        };
        file.and_then(|f| self.name(f))
    }
}

impl Default for Ast {
    fn default() -> Self {
        Ast::new()
    }
}

pub struct Ancestors<'a> {
    ast: &'a Ast,
    next: Option<NodeId>,
}

impl Iterator for Ancestors<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        let current = self.next?;
        self.next = self.ast.node(current).parent;
        Some(current)
    }
}

/// Convenience constructors for attribute sets.
impl Attrs {
    pub fn named(name: impl Into<String>) -> Attrs {
        Attrs {
            name: Some(name.into()),
            ..Attrs::default()
        }
    }

    pub fn typed(name: impl Into<String>, ty: Type) -> Attrs {
        Attrs {
            name: Some(name.into()),
            ty: Some(ty),
            ..Attrs::default()
        }
    }

    pub fn op(op: Op) -> Attrs {
        Attrs {
            op: Some(op),
            ..Attrs::default()
        }
    }

    pub fn literal(value: Literal) -> Attrs {
        Attrs {
            value: Some(value),
            ..Attrs::default()
        }
    }
}
