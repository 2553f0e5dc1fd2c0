//! Name resolution: links every use to its declaration.
//!
//! Lookup order for a bare name: enclosing local scopes, fields of the
//! innermost class, static fields of outer classes, then class names.
//! Unqualified calls look at methods of the innermost class, static
//! methods of outer classes, free methods and finally builtins. Nested
//! classes are static: they cannot reach instance members of their outer
//! class. Locals may not shadow other locals or parameters.

use std::collections::{BTreeMap, HashMap};

use super::ast::{Ast, NodeId, NodeKind, Type};
use super::builtins::Builtin;
use super::types::{is_class_ref, type_of};
use super::{Location, ResolutionError};

#[derive(Debug, Default, Clone)]
pub struct ClassInfo {
    pub fields: BTreeMap<String, NodeId>,
    pub methods: BTreeMap<String, NodeId>,
    pub ctors: BTreeMap<usize, NodeId>,
}

/// Program-wide declaration tables.
#[derive(Debug, Default, Clone)]
pub struct Tables {
    pub classes: BTreeMap<String, NodeId>,
    pub class_info: HashMap<NodeId, ClassInfo>,
    pub free_methods: BTreeMap<String, NodeId>,
}

impl Tables {
    pub fn build(ast: &Ast) -> Result<Tables, ResolutionError> {
        let mut t = Tables::default();
        for file in ast.children(ast.root()).to_vec() {
            for item in ast.children(file).to_vec() {
                match ast.kind(item) {
                    NodeKind::ClassDecl => t.add_class(ast, item)?,
                    NodeKind::MethodDecl => {
                        let name = ast.name(item).unwrap_or_default().to_string();
                        if t.free_methods.insert(name.clone(), item).is_some() {
                            return Err(err(ast, item, format!("duplicate method `{name}`")));
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(t)
    }

    fn add_class(&mut self, ast: &Ast, class: NodeId) -> Result<(), ResolutionError> {
        let name = ast.name(class).unwrap_or_default().to_string();
        if self.classes.insert(name.clone(), class).is_some() {
            return Err(err(ast, class, format!("duplicate class `{name}`")));
        }
        let mut info = ClassInfo::default();
        for m in ast.children(class).to_vec() {
            let mname = ast.name(m).unwrap_or_default().to_string();
            match ast.kind(m) {
                NodeKind::FieldDecl => {
                    if info.fields.insert(mname.clone(), m).is_some() {
                        return Err(err(ast, m, format!("duplicate field `{mname}`")));
                    }
                }
                NodeKind::MethodDecl => {
                    if info.methods.insert(mname.clone(), m).is_some() {
                        return Err(err(ast, m, format!("duplicate method `{mname}`")));
                    }
                }
                NodeKind::ConstructorDecl => {
                    let arity = ast.params(m).len();
                    if info.ctors.insert(arity, m).is_some() {
                        return Err(err(ast, m, format!("duplicate constructor of arity {arity}")));
                    }
                }
                NodeKind::ClassDecl => self.add_class(ast, m)?,
                _ => {}
            }
        }
        self.class_info.insert(class, info);
        Ok(())
    }

    pub fn info(&self, class: NodeId) -> Option<&ClassInfo> {
        self.class_info.get(&class)
    }
}

fn err(ast: &Ast, id: NodeId, message: impl Into<String>) -> ResolutionError {
    let span = ast.node(id).span;
    ResolutionError {
        location: Location {
            path: ast.file_of(id).map(str::to_string),
            line: span.line,
            col: span.col,
        },
        message: message.into(),
    }
}

/// Resolves the whole program in place. Existing links are overwritten.
pub fn resolve(ast: &mut Ast) -> Result<(), ResolutionError> {
    let tables = Tables::build(ast)?;
    let mut r = Resolver { tables, classes: Vec::new(), is_static: true, scopes: Vec::new() };
    for file in ast.children(ast.root()).to_vec() {
        for item in ast.children(file).to_vec() {
            match ast.kind(item) {
                NodeKind::ClassDecl => r.class(ast, item)?,
                NodeKind::MethodDecl => r.callable(ast, item)?,
                k => return Err(err(ast, item, format!("unexpected top-level {k}"))),
            }
        }
    }
    Ok(())
}

struct Resolver {
    tables: Tables,
    classes: Vec<NodeId>,
    is_static: bool,
    scopes: Vec<Vec<(String, NodeId)>>,
}

impl Resolver {
    fn check_type(&self, ast: &Ast, at: NodeId, ty: &Type) -> Result<(), ResolutionError> {
        match ty {
            Type::Class(n) if !self.tables.classes.contains_key(n) => Err(err(ast, at, format!("unknown type `{n}`"))),
            Type::Optional(inner) => self.check_type(ast, at, inner),
            _ => Ok(()),
        }
    }

    fn class(&mut self, ast: &mut Ast, class: NodeId) -> Result<(), ResolutionError> {
        self.classes.push(class);
        for m in ast.children(class).to_vec() {
            match ast.kind(m) {
                NodeKind::ClassDecl => self.class(ast, m)?,
                NodeKind::FieldDecl => {
                    if let Some(ty) = ast.attrs(m).ty.clone() {
                        self.check_type(ast, m, &ty)?;
                    }
                    self.is_static = ast.attrs(m).is_static;
                    if let Some(init) = ast.child(m, 0) {
                        self.expr(ast, init)?;
                    }
                }
                NodeKind::MethodDecl | NodeKind::ConstructorDecl => self.callable(ast, m)?,
                _ => {}
            }
        }
        self.classes.pop();
        Ok(())
    }

    fn callable(&mut self, ast: &mut Ast, decl: NodeId) -> Result<(), ResolutionError> {
        self.is_static = self.classes.is_empty() || ast.attrs(decl).is_static;
        if ast.kind(decl) == NodeKind::ConstructorDecl {
            self.is_static = false;
        }
        if let Some(ty) = ast.attrs(decl).ty.clone() {
            self.check_type(ast, decl, &ty)?;
        }
        self.scopes.push(Vec::new());
        for p in ast.params(decl) {
            let ty = ast.attrs(p).ty.clone().unwrap_or(Type::Int);
            self.check_type(ast, p, &ty)?;
            self.declare(ast, p)?;
        }
        if let Some(body) = ast.body(decl) {
            self.block(ast, body)?;
        }
        self.scopes.pop();
        Ok(())
    }

    fn declare(&mut self, ast: &Ast, decl: NodeId) -> Result<(), ResolutionError> {
        let name = ast.name(decl).unwrap_or_default().to_string();
        if self.lookup_local(&name).is_some() {
            return Err(err(ast, decl, format!("`{name}` is already declared in this scope")));
        }
        self.scopes.last_mut().expect("inside a scope").push((name, decl));
        Ok(())
    }

    fn lookup_local(&self, name: &str) -> Option<NodeId> {
        self.scopes
            .iter()
            .rev()
            .flat_map(|s| s.iter().rev())
            .find(|(n, _)| n == name)
            .map(|(_, d)| *d)
    }

    fn block(&mut self, ast: &mut Ast, block: NodeId) -> Result<(), ResolutionError> {
        self.scopes.push(Vec::new());
        for s in ast.children(block).to_vec() {
            self.stmt(ast, s)?;
        }
        self.scopes.pop();
        Ok(())
    }

    fn stmt(&mut self, ast: &mut Ast, s: NodeId) -> Result<(), ResolutionError> {
        let kids = ast.children(s).to_vec();
        match ast.kind(s) {
            NodeKind::Block => self.block(ast, s)?,
            NodeKind::LocalVarDecl => {
                let ty = ast.attrs(s).ty.clone().unwrap_or(Type::Int);
                self.check_type(ast, s, &ty)?;
                if let Some(init) = kids.first() {
                    self.expr(ast, *init)?;
                }
                self.declare(ast, s)?;
            }
            NodeKind::Assign => {
                self.target(ast, kids[0])?;
                self.expr(ast, kids[1])?;
            }
            NodeKind::IfStmt | NodeKind::WhileStmt => {
                self.expr(ast, kids[0])?;
                for k in &kids[1..] {
                    self.stmt(ast, *k)?;
                }
            }
            NodeKind::ForStmt => {
                self.scopes.push(Vec::new());
                self.stmt(ast, kids[0])?;
                self.expr(ast, kids[1])?;
                self.stmt(ast, kids[2])?;
                self.stmt(ast, kids[3])?;
                self.scopes.pop();
            }
            NodeKind::ReturnStmt | NodeKind::ThrowStmt | NodeKind::ExprStmt => {
                for k in kids {
                    self.expr(ast, k)?;
                }
            }
            k => return Err(err(ast, s, format!("{k} is not a statement"))),
        }
        Ok(())
    }

    fn target(&mut self, ast: &mut Ast, t: NodeId) -> Result<(), ResolutionError> {
        self.expr(ast, t)?;
        if is_class_ref(ast, t) {
            return Err(err(ast, t, "cannot assign to a class"));
        }
        Ok(())
    }

    fn expr(&mut self, ast: &mut Ast, e: NodeId) -> Result<(), ResolutionError> {
        let kids = ast.children(e).to_vec();
        for k in &kids {
            self.expr(ast, *k)?;
        }
        match ast.kind(e) {
            NodeKind::NameRef => {
                let d = self.name_ref(ast, e)?;
                ast.attrs_mut(e).decl = Some(d);
                if ast.kind(d) == NodeKind::ClassDecl {
                    let parent = ast.parent(e);
                    let ok = parent.is_some_and(|p| {
                        ast.child(p, 0) == Some(e)
                            && (ast.kind(p) == NodeKind::FieldAccess
                                || (ast.kind(p) == NodeKind::Call && ast.attrs(p).qualified))
                    });
                    if !ok {
                        return Err(err(ast, e, "class name used as a value"));
                    }
                }
            }
            NodeKind::This => {
                if self.is_static || self.classes.is_empty() {
                    return Err(err(ast, e, "`this` in a static context"));
                }
            }
            NodeKind::FieldAccess => {
                let d = self.field_access(ast, e, kids[0])?;
                ast.attrs_mut(e).decl = Some(d);
            }
            NodeKind::Call => {
                let d = self.call(ast, e)?;
                ast.attrs_mut(e).decl = d;
            }
            NodeKind::New => {
                let name = ast.name(e).unwrap_or_default().to_string();
                let Some(&class) = self.tables.classes.get(&name) else {
                    return Err(err(ast, e, format!("unknown class `{name}`")));
                };
                let info = self.tables.info(class).expect("class info");
                let d = if info.ctors.is_empty() {
                    if !kids.is_empty() {
                        return Err(err(ast, e, format!("`{name}` has no constructor taking {} arguments", kids.len())));
                    }
                    class
                } else {
                    match info.ctors.get(&kids.len()) {
                        Some(c) => *c,
                        None => {
                            return Err(err(ast, e, format!("`{name}` has no constructor taking {} arguments", kids.len())))
                        }
                    }
                };
                ast.attrs_mut(e).decl = Some(d);
            }
            NodeKind::OptionalUnwrap => {
                if !matches!(type_of(ast, kids[0]), Some(Type::Optional(_))) {
                    return Err(err(ast, e, "unwrap of a non-Optional value"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn name_ref(&self, ast: &Ast, e: NodeId) -> Result<NodeId, ResolutionError> {
        let name = ast.name(e).unwrap_or_default().to_string();
        if let Some(d) = self.lookup_local(&name) {
            return Ok(d);
        }
        for (depth, class) in self.classes.iter().rev().enumerate() {
            if let Some(&f) = self.tables.info(*class).and_then(|i| i.fields.get(&name)) {
                let st = ast.attrs(f).is_static;
                if depth == 0 && !st && self.is_static {
                    return Err(err(ast, e, format!("instance field `{name}` used in a static context")));
                }
                if depth > 0 && !st {
                    return Err(err(ast, e, format!("instance field `{name}` of an outer class")));
                }
                return Ok(f);
            }
        }
        if let Some(&c) = self.tables.classes.get(&name) {
            return Ok(c);
        }
        Err(err(ast, e, format!("undeclared name `{name}`")))
    }

    fn class_of_type(&self, ty: Option<Type>) -> Option<NodeId> {
        match ty? {
            Type::Class(n) => self.tables.classes.get(&n).copied(),
            _ => None,
        }
    }

    fn field_access(&self, ast: &Ast, e: NodeId, recv: NodeId) -> Result<NodeId, ResolutionError> {
        let name = ast.name(e).unwrap_or_default().to_string();
        let static_only = is_class_ref(ast, recv);
        let class = if static_only {
            ast.decl(recv)
        } else {
            self.class_of_type(type_of(ast, recv))
        };
        let Some(class) = class else {
            return Err(err(ast, e, format!("no field `{name}` on this receiver")));
        };
        let Some(&f) = self.tables.info(class).and_then(|i| i.fields.get(&name)) else {
            return Err(err(ast, e, format!("unknown field `{name}`")));
        };
        if static_only && !ast.attrs(f).is_static {
            return Err(err(ast, e, format!("`{name}` is not static")));
        }
        Ok(f)
    }

    fn call(&self, ast: &Ast, e: NodeId) -> Result<Option<NodeId>, ResolutionError> {
        let name = ast.name(e).unwrap_or_default().to_string();
        let (recv, args) = ast.call_parts(e);
        let nargs = args.len();
        let check = |m: NodeId| -> Result<Option<NodeId>, ResolutionError> {
            let arity = ast.params(m).len();
            if arity != nargs {
                return Err(err(ast, e, format!("`{name}` takes {arity} arguments, {nargs} given")));
            }
            Ok(Some(m))
        };
        if let Some(recv) = recv {
            let static_only = is_class_ref(ast, recv);
            let class = if static_only {
                ast.decl(recv)
            } else {
                self.class_of_type(type_of(ast, recv))
            };
            let m = class.and_then(|c| self.tables.info(c)).and_then(|i| i.methods.get(&name));
            let Some(&m) = m else {
                return Err(err(ast, e, format!("unknown method `{name}`")));
            };
            if static_only && !ast.attrs(m).is_static {
                return Err(err(ast, e, format!("`{name}` is not static")));
            }
            return check(m);
        }
        for (depth, class) in self.classes.iter().rev().enumerate() {
            if let Some(&m) = self.tables.info(*class).and_then(|i| i.methods.get(&name)) {
                let st = ast.attrs(m).is_static;
                if !st && (self.is_static || depth > 0) {
                    return Err(err(ast, e, format!("instance method `{name}` called from a static context")));
                }
                return check(m);
            }
        }
        if let Some(&m) = self.tables.free_methods.get(&name) {
            return check(m);
        }
        if let Some(b) = Builtin::from_name(&name) {
            if !b.arity_ok(nargs) {
                return Err(err(ast, e, format!("wrong number of arguments to `{name}`")));
            }
            return Ok(None);
        }
        Err(err(ast, e, format!("unknown method `{name}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{load_str, FrontendError};
    use super::*;

    fn find(ast: &Ast, kind: NodeKind, name: &str) -> Vec<NodeId> {
        ast.live_nodes()
            .into_iter()
            .filter(|n| ast.kind(*n) == kind && ast.name(*n) == Some(name))
            .collect()
    }

    #[test]
    fn while_condition_links_to_local() {
        let ast = load_str(
            "void printRoots(int n) {\n  int i = 0;\n  while (i < n) {\n    double d = sqrt(i);\n    println(++d);\n    i++;\n  }\n}\n",
        )
        .unwrap();
        let decl = find(&ast, NodeKind::LocalVarDecl, "i")[0];
        assert_eq!(ast.node(decl).span.line, 2);
        let refs = find(&ast, NodeKind::NameRef, "i");
        assert_eq!(refs.len(), 3);
        assert!(refs.iter().all(|r| ast.decl(*r) == Some(decl)));
    }

    #[test]
    fn no_references_no_links() {
        let ast = load_str("class A { int x; void m() { println(); } }").unwrap();
        let linked = ast.live_nodes().into_iter().filter(|n| ast.decl(*n).is_some()).count();
        assert_eq!(linked, 0);
    }

    #[test]
    fn undeclared_name() {
        let e = load_str("void f() { int x = y; }").unwrap_err();
        assert!(matches!(e, FrontendError::Resolution(r) if r.message.contains("`y`")));
    }

    #[test]
    fn duplicate_local() {
        assert!(load_str("void f() { int x = 1; int x = 2; }").is_err());
        assert!(load_str("void f(int x) { int x = 2; }").is_err());
        assert!(load_str("void f() { { int x = 1; } int x = 2; }").is_ok());
    }

    #[test]
    fn fields_statics_and_calls() {
        let src = "class A { static final int K = 2; int v; A(int v) { this.v = v; } int get2() { return v + K; } }\n\
                   class B { static void main() { A a = new A(3); println(a.get2() + A.K); } }";
        let ast = load_str(src).unwrap();
        let call = find(&ast, NodeKind::Call, "get2")[0];
        assert_eq!(ast.kind(ast.decl(call).unwrap()), NodeKind::MethodDecl);
        let new = ast.live_nodes().into_iter().find(|n| ast.kind(*n) == NodeKind::New).unwrap();
        assert_eq!(ast.kind(ast.decl(new).unwrap()), NodeKind::ConstructorDecl);
    }

    #[test]
    fn static_context_errors() {
        assert!(load_str("class A { int v; static void m() { println(v); } }").is_err());
        assert!(load_str("class A { void i() {} static void m() { i(); } }").is_err());
        assert!(load_str("class A { A(int x) {} static void m() { A a = new A(); } }").is_err());
        assert!(load_str("class A { static void m() { int x = A; } }").is_err());
    }

    #[test]
    fn arity_checked() {
        assert!(load_str("void g(int a) {} void f() { g(); }").is_err());
        assert!(load_str("void f() { sqrt(1, 2); }").is_err());
    }
}
