//! Reference interpreter for resolved MiniJ programs.
//!
//! Used as the semantics oracle: two programs are considered equivalent on
//! an input vector when they print the same lines and end with the same
//! fault (or none). `int` arithmetic wraps at 32 bits. Doubles print via
//! the shortest round-trip decimal, always with a fraction or exponent
//! (`3.0`, `0.1`, `1e20`), plus `NaN`, `Infinity` and `-Infinity`.
//!
//! The entry point is a `static void main()` (in a class or at top level);
//! otherwise the first free method, whose parameters are bound from the
//! leading input lines. Remaining lines feed `readLine()`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::frontend::ast::{Ast, Literal, NodeId, NodeKind, Op, Type};
use crate::frontend::builtins::Builtin;
use crate::frontend::types::{builtin_of, is_class_ref};

pub const DEFAULT_STEP_LIMIT: u64 = 200_000;
const MAX_DEPTH: usize = 400;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fault {
    DivisionByZero,
    MissingInput,
    StepLimit,
    StackOverflow,
    NullPointer,
    NoSuchElement,
    BadInput(String),
    Thrown(String),
    Unresolved(String),
    Type(String),
    NoEntry,
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::DivisionByZero => f.write_str("division by zero"),
            Fault::MissingInput => f.write_str("missing input"),
            Fault::StepLimit => f.write_str("step budget exceeded"),
            Fault::StackOverflow => f.write_str("call depth exceeded"),
            Fault::NullPointer => f.write_str("null dereference"),
            Fault::NoSuchElement => f.write_str("empty Optional"),
            Fault::BadInput(s) => write!(f, "malformed number {s:?}"),
            Fault::Thrown(s) => write!(f, "uncaught {s}"),
            Fault::Unresolved(s) => write!(f, "unresolved call to {s}"),
            Fault::Type(s) => write!(f, "type error: {s}"),
            Fault::NoEntry => f.write_str("no entry point"),
        }
    }
}

/// Printed lines plus the terminating fault, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub lines: Vec<String>,
    pub fault: Option<Fault>,
}

/// Inputs and the outcome of each run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramIO {
    pub inputs: Vec<Vec<String>>,
    pub outputs: Vec<RunOutcome>,
}

pub fn interpret_program(ast: &Ast, inputs: &[Vec<String>]) -> ProgramIO {
    ProgramIO {
        inputs: inputs.to_vec(),
        outputs: inputs.iter().map(|i| run(ast, i)).collect(),
    }
}

pub fn run(ast: &Ast, input: &[String]) -> RunOutcome {
    run_with_limit(ast, input, DEFAULT_STEP_LIMIT)
}

pub fn run_with_limit(ast: &Ast, input: &[String], step_limit: u64) -> RunOutcome {
    let mut it = Interp {
        ast,
        input: input.iter().cloned().collect(),
        lines: Vec::new(),
        buffer: None,
        statics: HashMap::new(),
        heap: Vec::new(),
        steps: 0,
        step_limit,
        depth: 0,
    };
    let fault = it.start().err();
    if let Some(b) = it.buffer.take() {
        it.lines.push(b);
    }
    RunOutcome { lines: it.lines, fault }
}

/// The method the interpreter starts from.
pub fn entry_point(ast: &Ast) -> Option<NodeId> {
    let nodes = ast.live_nodes();
    let is_main = |n: &NodeId| {
        ast.kind(*n) == NodeKind::MethodDecl
            && ast.name(*n) == Some("main")
            && ast.params(*n).is_empty()
            && (ast.attrs(*n).is_static || ast.enclosing_class(*n).is_none())
    };
    if let Some(m) = nodes.iter().find(|n| is_main(n)) {
        return Some(*m);
    }
    ast.children(ast.root())
        .iter()
        .flat_map(|f| ast.children(*f).iter())
        .find(|n| ast.kind(**n) == NodeKind::MethodDecl)
        .copied()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i32),
    Double(f64),
    Bool(bool),
    Str(String),
    Null,
    Obj(usize),
    Opt(Option<Box<Value>>),
    Void,
}

pub fn format_double(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "Infinity".into() } else { "-Infinity".into() }
    } else {
        format!("{v:?}")
    }
}

struct Object {
    class: NodeId,
    fields: HashMap<NodeId, Value>,
}

enum Flow {
    Normal,
    Return(Value),
}

type R<T> = Result<T, Fault>;

struct Frame {
    locals: HashMap<NodeId, Value>,
    this: Option<usize>,
}

struct Interp<'a> {
    ast: &'a Ast,
    input: VecDeque<String>,
    lines: Vec<String>,
    buffer: Option<String>,
    statics: HashMap<NodeId, Value>,
    heap: Vec<Object>,
    steps: u64,
    step_limit: u64,
    depth: usize,
}

fn default_value(ty: Option<&Type>) -> Value {
    match ty {
        Some(Type::Int) => Value::Int(0),
        Some(Type::Double) => Value::Double(0.0),
        Some(Type::Boolean) => Value::Bool(false),
        _ => Value::Null,
    }
}

/// Implicit widening applied on stores.
fn coerce(ty: Option<&Type>, v: Value) -> Value {
    match (ty, v) {
        (Some(Type::Double), Value::Int(i)) => Value::Double(i as f64),
        (_, v) => v,
    }
}

fn type_err<T>(what: &str) -> R<T> {
    Err(Fault::Type(what.to_string()))
}

impl<'a> Interp<'a> {
    fn tick(&mut self) -> R<()> {
        self.steps += 1;
        if self.steps > self.step_limit {
            Err(Fault::StepLimit)
        } else {
            Ok(())
        }
    }

    fn start(&mut self) -> R<()> {
        let ast = self.ast;
        for class in ast.classes() {
            for m in ast.children(class) {
                if ast.kind(*m) == NodeKind::FieldDecl && ast.attrs(*m).is_static {
                    let ty = ast.attrs(*m).ty.as_ref();
                    let v = match ast.child(*m, 0) {
                        Some(init) => {
                            let mut frame = Frame { locals: HashMap::new(), this: None };
                            let v = self.expr(&mut frame, init)?;
                            coerce(ty, v)
                        }
                        None => default_value(ty),
                    };
                    self.statics.insert(*m, v);
                }
            }
        }
        let entry = entry_point(ast).ok_or(Fault::NoEntry)?;
        let mut args = Vec::new();
        for p in ast.params(entry) {
            let line = self.input.pop_front().ok_or(Fault::MissingInput)?;
            let v = match ast.attrs(p).ty.as_ref() {
                Some(Type::Int) => Value::Int(line.trim().parse().map_err(|_| Fault::BadInput(line.clone()))?),
                Some(Type::Double) => Value::Double(line.trim().parse().map_err(|_| Fault::BadInput(line.clone()))?),
                Some(Type::Boolean) => Value::Bool(line.trim() == "true"),
                Some(Type::Str) => Value::Str(line),
                _ => return Err(Fault::BadInput(line)),
            };
            args.push(v);
        }
        let this = if ast.attrs(entry).is_static || ast.enclosing_class(entry).is_none() {
            None
        } else {
            let class = ast.enclosing_class(entry).expect("method in class");
            Some(self.instantiate(class)?)
        };
        self.invoke(entry, this, args)?;
        Ok(())
    }

    fn instantiate(&mut self, class: NodeId) -> R<usize> {
        let idx = self.heap.len();
        self.heap.push(Object { class, fields: HashMap::new() });
        let ast = self.ast;
        for m in ast.children(class) {
            if ast.kind(*m) == NodeKind::FieldDecl && !ast.attrs(*m).is_static {
                let ty = ast.attrs(*m).ty.as_ref();
                let v = match ast.child(*m, 0) {
                    Some(init) => {
                        let mut frame = Frame { locals: HashMap::new(), this: Some(idx) };
                        let v = self.expr(&mut frame, init)?;
                        coerce(ty, v)
                    }
                    None => default_value(ty),
                };
                self.heap[idx].fields.insert(*m, v);
            }
        }
        Ok(idx)
    }

    fn invoke(&mut self, callable: NodeId, this: Option<usize>, args: Vec<Value>) -> R<Value> {
        self.tick()?;
        if self.depth >= MAX_DEPTH {
            return Err(Fault::StackOverflow);
        }
        self.depth += 1;
        let ast = self.ast;
        let mut frame = Frame { locals: HashMap::new(), this };
        for (p, v) in ast.params(callable).into_iter().zip(args) {
            frame.locals.insert(p, coerce(ast.attrs(p).ty.as_ref(), v));
        }
        let result = match ast.body(callable) {
            Some(b) => self.stmt(&mut frame, b),
            None => Ok(Flow::Normal),
        };
        self.depth -= 1;
        let ret_ty = ast.attrs(callable).ty.as_ref();
        match result? {
            Flow::Return(v) => Ok(coerce(ret_ty, v)),
            Flow::Normal => Ok(Value::Void),
        }
    }

    fn block(&mut self, frame: &mut Frame, b: NodeId) -> R<Flow> {
        for s in self.ast.children(b) {
            if let Flow::Return(v) = self.stmt(frame, *s)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn truthy(&mut self, frame: &mut Frame, e: NodeId) -> R<bool> {
        match self.expr(frame, e)? {
            Value::Bool(b) => Ok(b),
            _ => type_err("condition is not boolean"),
        }
    }

    fn stmt(&mut self, frame: &mut Frame, s: NodeId) -> R<Flow> {
        self.tick()?;
        let ast = self.ast;
        let kids = ast.children(s);
        match ast.kind(s) {
            NodeKind::Block => self.block(frame, s),
            NodeKind::LocalVarDecl => {
                let ty = ast.attrs(s).ty.as_ref();
                let v = match kids.first() {
                    Some(init) => {
                        let v = self.expr(frame, *init)?;
                        coerce(ty, v)
                    }
                    None => default_value(ty),
                };
                frame.locals.insert(s, v);
                Ok(Flow::Normal)
            }
            NodeKind::Assign => {
                let target = kids[0];
                let recv = self.lvalue_receiver(frame, target)?;
                let v = self.expr(frame, kids[1])?;
                self.store(frame, target, recv, v)?;
                Ok(Flow::Normal)
            }
            NodeKind::ExprStmt => {
                self.expr(frame, kids[0])?;
                Ok(Flow::Normal)
            }
            NodeKind::IfStmt => {
                if self.truthy(frame, kids[0])? {
                    self.stmt(frame, kids[1])
                } else if let Some(e) = kids.get(2) {
                    self.stmt(frame, *e)
                } else {
                    Ok(Flow::Normal)
                }
            }
            NodeKind::WhileStmt => {
                while self.truthy(frame, kids[0])? {
                    self.tick()?;
                    if let Flow::Return(v) = self.stmt(frame, kids[1])? {
                        return Ok(Flow::Return(v));
                    }
                }
                Ok(Flow::Normal)
            }
            NodeKind::ForStmt => {
                self.stmt(frame, kids[0])?;
                while self.truthy(frame, kids[1])? {
                    self.tick()?;
                    if let Flow::Return(v) = self.stmt(frame, kids[3])? {
                        return Ok(Flow::Return(v));
                    }
                    self.stmt(frame, kids[2])?;
                }
                Ok(Flow::Normal)
            }
            NodeKind::ReturnStmt => {
                let v = match kids.first() {
                    Some(e) => self.expr(frame, *e)?,
                    None => Value::Void,
                };
                Ok(Flow::Return(v))
            }
            NodeKind::ThrowStmt => {
                let name = ast.name(kids[0]).unwrap_or("Exception").to_string();
                // Arguments are still evaluated, like a real constructor call.
                for a in ast.children(kids[0]) {
                    self.expr(frame, *a)?;
                }
                Err(Fault::Thrown(name))
            }
            k => type_err(&format!("{k} is not a statement")),
        }
    }

    /// Evaluates the receiver of a field target before the right-hand side.
    fn lvalue_receiver(&mut self, frame: &mut Frame, target: NodeId) -> R<Option<usize>> {
        let ast = self.ast;
        if ast.kind(target) != NodeKind::FieldAccess {
            return Ok(None);
        }
        let recv = ast.children(target)[0];
        let field = ast.decl(target).and_then(|d| ast.get(d).map(|_| d));
        let is_static = field.is_some_and(|f| ast.attrs(f).is_static);
        if is_static && (is_class_ref(ast, recv) || ast.kind(recv) == NodeKind::This) {
            return Ok(None);
        }
        match self.expr(frame, recv)? {
            Value::Obj(o) => Ok(Some(o)),
            Value::Null => Err(Fault::NullPointer),
            _ if is_static => Ok(None),
            _ => type_err("field access on a non-object"),
        }
    }

    fn field_decl(&self, node: NodeId) -> R<NodeId> {
        match self.ast.decl(node).filter(|d| self.ast.contains(*d)) {
            Some(d) => Ok(d),
            None => Err(Fault::Unresolved(self.ast.name(node).unwrap_or("?").to_string())),
        }
    }

    fn store(&mut self, frame: &mut Frame, target: NodeId, recv: Option<usize>, v: Value) -> R<()> {
        let ast = self.ast;
        let decl = self.field_decl(target)?;
        let v = coerce(ast.attrs(decl).ty.as_ref(), v);
        match ast.kind(decl) {
            NodeKind::LocalVarDecl | NodeKind::ParamDecl => {
                frame.locals.insert(decl, v);
            }
            NodeKind::FieldDecl => {
                if ast.attrs(decl).is_static {
                    self.statics.insert(decl, v);
                } else {
                    let obj = match recv {
                        Some(o) => o,
                        None => frame.this.ok_or(Fault::NullPointer)?,
                    };
                    self.heap[obj].fields.insert(decl, v);
                }
            }
            _ => return type_err("assignment to a non-variable"),
        }
        Ok(())
    }

    fn load(&mut self, frame: &Frame, node: NodeId, recv: Option<usize>) -> R<Value> {
        let ast = self.ast;
        let decl = self.field_decl(node)?;
        match ast.kind(decl) {
            NodeKind::LocalVarDecl | NodeKind::ParamDecl => Ok(frame
                .locals
                .get(&decl)
                .cloned()
                .unwrap_or_else(|| default_value(ast.attrs(decl).ty.as_ref()))),
            NodeKind::FieldDecl => {
                if ast.attrs(decl).is_static {
                    Ok(self.statics.get(&decl).cloned().unwrap_or_else(|| default_value(ast.attrs(decl).ty.as_ref())))
                } else {
                    let obj = match recv {
                        Some(o) => o,
                        None => frame.this.ok_or(Fault::NullPointer)?,
                    };
                    Ok(self.heap[obj]
                        .fields
                        .get(&decl)
                        .cloned()
                        .unwrap_or_else(|| default_value(ast.attrs(decl).ty.as_ref())))
                }
            }
            _ => type_err("class used as a value"),
        }
    }

    fn expr(&mut self, frame: &mut Frame, e: NodeId) -> R<Value> {
        let ast = self.ast;
        let node = ast.node(e);
        let kids = &node.children;
        match node.kind {
            NodeKind::Literal => Ok(match node.attrs.value.as_ref() {
                Some(Literal::Int(v)) => Value::Int(*v as i32),
                Some(Literal::Double(v)) => Value::Double(*v),
                Some(Literal::Bool(b)) => Value::Bool(*b),
                Some(Literal::Str(s)) => Value::Str(s.clone()),
                Some(Literal::Null) | None => Value::Null,
            }),
            NodeKind::NameRef => self.load(frame, e, None),
            NodeKind::This => frame.this.map(Value::Obj).ok_or(Fault::NullPointer),
            NodeKind::FieldAccess => {
                let recv = self.lvalue_receiver(frame, e)?;
                self.load(frame, e, recv)
            }
            NodeKind::UnaryOp => {
                let op = node.attrs.op.unwrap_or(Op::Not);
                if op.is_increment() {
                    return self.increment(frame, e, op);
                }
                let v = self.expr(frame, kids[0])?;
                match (op, v) {
                    (Op::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                    (Op::Neg, Value::Int(i)) => Ok(Value::Int(i.wrapping_neg())),
                    (Op::Neg, Value::Double(d)) => Ok(Value::Double(-d)),
                    _ => type_err("bad unary operand"),
                }
            }
            NodeKind::BinaryOp => {
                let op = node.attrs.op.unwrap_or(Op::Add);
                if op.is_logical() {
                    let l = self.truthy(frame, kids[0])?;
                    if (op == Op::And && !l) || (op == Op::Or && l) {
                        return Ok(Value::Bool(l));
                    }
                    return Ok(Value::Bool(self.truthy(frame, kids[1])?));
                }
                let l = self.expr(frame, kids[0])?;
                let r = self.expr(frame, kids[1])?;
                self.binary(op, l, r)
            }
            NodeKind::Call => self.call(frame, e),
            NodeKind::New => {
                let mut args = Vec::new();
                for a in kids {
                    args.push(self.expr(frame, *a)?);
                }
                let decl = self.field_decl(e)?;
                let class = if ast.kind(decl) == NodeKind::ClassDecl {
                    decl
                } else {
                    ast.enclosing_class(decl).ok_or(Fault::NoEntry)?
                };
                self.tick()?;
                let obj = self.instantiate(class)?;
                if ast.kind(decl) == NodeKind::ConstructorDecl {
                    self.invoke(decl, Some(obj), args)?;
                }
                Ok(Value::Obj(obj))
            }
            NodeKind::OptionalWrap => {
                let v = self.expr(frame, kids[0])?;
                match (node.attrs.op, v) {
                    (Some(Op::OfNullable), Value::Null) => Ok(Value::Opt(None)),
                    (_, Value::Null) => Err(Fault::NullPointer),
                    (_, v) => Ok(Value::Opt(Some(Box::new(v)))),
                }
            }
            NodeKind::OptionalUnwrap => {
                let o = self.expr(frame, kids[0])?;
                let default = match kids.get(1) {
                    Some(d) => Some(self.expr(frame, *d)?),
                    None => None,
                };
                match o {
                    Value::Opt(Some(v)) => Ok(*v),
                    Value::Opt(None) => default.ok_or(Fault::NoSuchElement),
                    Value::Null => Err(Fault::NullPointer),
                    _ => type_err("unwrap of a non-Optional"),
                }
            }
            k => type_err(&format!("{k} is not an expression")),
        }
    }

    fn increment(&mut self, frame: &mut Frame, e: NodeId, op: Op) -> R<Value> {
        let target = self.ast.children(e)[0];
        let recv = self.lvalue_receiver(frame, target)?;
        let old = self.load(frame, target, recv)?;
        let delta = if matches!(op, Op::PreInc | Op::PostInc) { 1 } else { -1 };
        let new = match &old {
            Value::Int(i) => Value::Int(i.wrapping_add(delta)),
            Value::Double(d) => Value::Double(d + delta as f64),
            _ => return type_err("increment of a non-number"),
        };
        self.store(frame, target, recv, new.clone())?;
        Ok(if matches!(op, Op::PreInc | Op::PreDec) { new } else { old })
    }

    fn binary(&mut self, op: Op, l: Value, r: Value) -> R<Value> {
        use Value::*;
        if op == Op::Add && (matches!(l, Str(_)) || matches!(r, Str(_))) {
            return Ok(Str(format!("{}{}", self.show(&l), self.show(&r))));
        }
        if op == Op::Eq || op == Op::Ne {
            let eq = match (&l, &r) {
                (Int(a), Double(b)) | (Double(b), Int(a)) => (*a as f64) == *b,
                (Double(a), Double(b)) => a == b,
                _ => l == r,
            };
            return Ok(Bool(if op == Op::Eq { eq } else { !eq }));
        }
        match (l, r) {
            (Int(a), Int(b)) => Ok(match op {
                Op::Add => Int(a.wrapping_add(b)),
                Op::Sub => Int(a.wrapping_sub(b)),
                Op::Mul => Int(a.wrapping_mul(b)),
                Op::Div => {
                    if b == 0 {
                        return Err(Fault::DivisionByZero);
                    }
                    Int(a.wrapping_div(b))
                }
                Op::Rem => {
                    if b == 0 {
                        return Err(Fault::DivisionByZero);
                    }
                    Int(a.wrapping_rem(b))
                }
                Op::Lt => Bool(a < b),
                Op::Le => Bool(a <= b),
                Op::Gt => Bool(a > b),
                Op::Ge => Bool(a >= b),
                _ => return type_err("bad int operator"),
            }),
            (l @ (Int(_) | Double(_)), r @ (Int(_) | Double(_))) => {
                let a = as_f64(&l);
                let b = as_f64(&r);
                Ok(match op {
                    Op::Add => Double(a + b),
                    Op::Sub => Double(a - b),
                    Op::Mul => Double(a * b),
                    Op::Div => Double(a / b),
                    Op::Rem => Double(a % b),
                    Op::Lt => Bool(a < b),
                    Op::Le => Bool(a <= b),
                    Op::Gt => Bool(a > b),
                    Op::Ge => Bool(a >= b),
                    _ => return type_err("bad double operator"),
                })
            }
            _ => type_err("bad binary operands"),
        }
    }

    fn show(&self, v: &Value) -> String {
        match v {
            Value::Int(i) => i.to_string(),
            Value::Double(d) => format_double(*d),
            Value::Bool(b) => b.to_string(),
            Value::Str(s) => s.clone(),
            Value::Null => "null".into(),
            Value::Void => String::new(),
            Value::Obj(o) => format!("{}@obj", self.ast.name(self.heap[*o].class).unwrap_or("Object")),
            Value::Opt(Some(v)) => format!("Optional[{}]", self.show(v)),
            Value::Opt(None) => "Optional.empty".into(),
        }
    }

    fn call(&mut self, frame: &mut Frame, e: NodeId) -> R<Value> {
        let ast = self.ast;
        let (recv, arg_nodes) = ast.call_parts(e);
        if let Some(b) = builtin_of(ast, e) {
            let mut args = Vec::new();
            for a in arg_nodes {
                args.push(self.expr(frame, *a)?);
            }
            return self.builtin(b, args);
        }
        let name = ast.name(e).unwrap_or("?").to_string();
        let decl = ast.decl(e).filter(|d| ast.contains(*d)).ok_or(Fault::Unresolved(name))?;
        let is_static = ast.attrs(decl).is_static || ast.enclosing_class(decl).is_none();
        let this = match recv {
            Some(r) if is_class_ref(ast, r) => None,
            Some(r) => match self.expr(frame, r)? {
                Value::Obj(o) => Some(o),
                Value::Null => return Err(Fault::NullPointer),
                _ => return type_err("method call on a non-object"),
            },
            None if is_static => None,
            None => Some(frame.this.ok_or(Fault::NullPointer)?),
        };
        let mut args = Vec::new();
        for a in arg_nodes {
            args.push(self.expr(frame, *a)?);
        }
        let this = if is_static { None } else { this };
        self.invoke(decl, this, args)
    }

    fn builtin(&mut self, b: Builtin, args: Vec<Value>) -> R<Value> {
        use Value::*;
        match b {
            Builtin::Println => {
                let text = args.first().map(|v| self.show(v)).unwrap_or_default();
                let line = match self.buffer.take() {
                    Some(mut pre) => {
                        pre.push_str(&text);
                        pre
                    }
                    None => text,
                };
                self.lines.push(line);
                Ok(Void)
            }
            Builtin::Print => {
                let text = self.show(&args[0]);
                self.buffer.get_or_insert_with(String::new).push_str(&text);
                Ok(Void)
            }
            Builtin::ReadLine => self.input.pop_front().map(Str).ok_or(Fault::MissingInput),
            Builtin::Sqrt => match &args[0] {
                v @ (Int(_) | Double(_)) => Ok(Double(as_f64(v).sqrt())),
                _ => type_err("sqrt of a non-number"),
            },
            Builtin::Abs => match &args[0] {
                Int(i) => Ok(Int(i.wrapping_abs())),
                Double(d) => Ok(Double(d.abs())),
                _ => type_err("abs of a non-number"),
            },
            Builtin::Min | Builtin::Max => match (&args[0], &args[1]) {
                (Int(a), Int(c)) => Ok(Int(if b == Builtin::Min { *a.min(c) } else { *a.max(c) })),
                (x @ (Int(_) | Double(_)), y @ (Int(_) | Double(_))) => {
                    let (x, y) = (as_f64(x), as_f64(y));
                    Ok(Double(if b == Builtin::Min { x.min(y) } else { x.max(y) }))
                }
                _ => type_err("min/max of non-numbers"),
            },
            Builtin::ParseInt => match &args[0] {
                Str(s) => s.parse::<i32>().map(Int).map_err(|_| Fault::BadInput(s.clone())),
                Null => Err(Fault::BadInput("null".into())),
                _ => type_err("parseInt of a non-string"),
            },
        }
    }
}

fn as_f64(v: &Value) -> f64 {
    match v {
        Value::Int(i) => *i as f64,
        Value::Double(d) => *d,
        _ => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_str;

    fn out(src: &str, input: &[&str]) -> RunOutcome {
        let ast = load_str(src).unwrap();
        run(&ast, &input.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    }

    #[test]
    fn running_example_forms_agree() {
        let original = "void printRoots(int n) { for (int i = 0; i < n; i++) { double d = sqrt(i); d++; println(d); } }";
        let variant = "void printRoots(int n) { int i = 0; while (i < n) { double d = sqrt(i); println(++d); i++; } }";
        let normal = "void printRoots(int n) { int i = 0; while (i < n) { println(sqrt(i) + 1); i = i + 1; } }";
        let a = out(original, &["3"]);
        assert_eq!(a.lines, vec!["1.0", "2.0", "2.414213562373095"]);
        assert_eq!(a, out(variant, &["3"]));
        assert_eq!(a, out(normal, &["3"]));
    }

    #[test]
    fn empty_method_call_prints_nothing() {
        let r = out("class A { static void noop() {} static void main() { noop(); } }", &[]);
        assert!(r.lines.is_empty() && r.fault.is_none());
    }

    #[test]
    fn infinite_loop_hits_budget() {
        let r = out("void f() { while (true) { } }", &[]);
        assert_eq!(r.fault, Some(Fault::StepLimit));
    }

    #[test]
    fn faults_are_reported() {
        assert_eq!(out("void f(int a) { println(1); println(5 / a); }", &["0"]).fault, Some(Fault::DivisionByZero));
        assert_eq!(out("void f() { String s = readLine(); }", &[]).fault, Some(Fault::MissingInput));
        let t = out("class E {} void f() { println(2); throw new E(); }", &[]);
        assert_eq!(t.lines, vec!["2"]);
        assert_eq!(t.fault, Some(Fault::Thrown("E".into())));
    }

    #[test]
    fn objects_fields_and_statics() {
        let src = "class P { static int count = 0; int v; P(int v) { this.v = v; count++; } int twice() { return v * 2; } }\n\
                   class M { static void main() { P a = new P(3); P b = new P(4); println(a.twice() + b.v); println(P.count); print(\"x\"); print(1.5); println(); } }";
        let r = out(src, &[]);
        assert_eq!(r.lines, vec!["10", "2", "x1.5"]);
    }

    #[test]
    fn optionals_and_strings() {
        let src = "void f(String s) { Optional<String> o = Optional.ofNullable(null); println(o.orElse(s) + 1); println(Optional.of(2).get() + 0.5); Optional<Integer> e = Optional.ofNullable(null); println(e.get()); }";
        let r = out(src, &["hi"]);
        assert_eq!(r.lines, vec!["hi1", "2.5"]);
        assert_eq!(r.fault, Some(Fault::NoSuchElement));
    }

    #[test]
    fn int_wraps_and_widening() {
        let r = out("void f() { int x = 2147483647; x++; println(x); double d = 7 / 2; println(d); println(parseInt(\"12\") % 5); }", &[]);
        assert_eq!(r.lines, vec!["-2147483648", "3.0", "2"]);
    }

    #[test]
    fn deterministic() {
        let src = "void f(int n) { int s = 0; for (int i = 0; i < n; i++) { s = s + i * i; } println(s); }";
        assert_eq!(out(src, &["50"]), out(src, &["50"]));
    }
}
