//! Behavior-preserving obfuscation attacks, written directly against the
//! AST so that they share no code with the normalization catalog.
//!
//! Insertion attacks add dead statements, either copies of existing
//! declarations under fresh names or entries from a statement pool.
//! Refactoring attacks draw from eight operation families:
//!
//! | family | edits |
//! |--------|-------|
//! | optional wrapping | wrap a local in `Optional`, wrap a value in `Optional.of(..).get()` |
//! | extract variable | hoist a pure subexpression into a fresh local |
//! | constant container | literal to a new constant in a container class, move an existing constant there |
//! | swap if-else | swap branches and invert the condition |
//! | insert method | empty method (with calls), method that only throws |
//! | insert constructor | empty constructor, throwing constructor, empty class |
//! | access method | getter for an instance field, replacing every read |
//! | for to while | `for` rewritten as `while`, wrapped in a block on a name clash |
//!
//! Every edit is applied to a copy, printed, re-resolved and run on the
//! test inputs; edits that fail to load or change any output are dropped.

pub mod build;
pub mod insertion;
pub mod refactor;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evalx::interp::{interpret_program, ProgramIO};
use crate::frontend::ast::{Ast, NodeId, NodeKind};
use crate::frontend::FrontendError;

pub use insertion::DEFAULT_POOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    Insertion,
    Refactoring,
}

impl FromStr for AttackKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "insertion" => Ok(AttackKind::Insertion),
            "refactoring" => Ok(AttackKind::Refactoring),
            _ => Err(format!("unknown attack kind `{s}`")),
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::Insertion => "insertion",
            AttackKind::Refactoring => "refactoring",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefactorOp {
    OptionalWrapping,
    ExtractVariable,
    ConstantContainer,
    SwapIfElse,
    InsertMethod,
    InsertConstructor,
    AccessMethod,
    ForToWhile,
}

impl RefactorOp {
    pub const ALL: [RefactorOp; 8] = [
        RefactorOp::OptionalWrapping,
        RefactorOp::ExtractVariable,
        RefactorOp::ConstantContainer,
        RefactorOp::SwapIfElse,
        RefactorOp::InsertMethod,
        RefactorOp::InsertConstructor,
        RefactorOp::AccessMethod,
        RefactorOp::ForToWhile,
    ];

    pub fn edits(self) -> &'static [EditKind] {
        use EditKind::*;
        match self {
            RefactorOp::OptionalWrapping => &[WrapOptionalVariable, WrapOptionalValue],
            RefactorOp::ExtractVariable => &[ExtractVariable],
            RefactorOp::ConstantContainer => &[ExtractConstant, MoveConstant],
            RefactorOp::SwapIfElse => &[InvertEquality, InvertNegation],
            RefactorOp::InsertMethod => &[EmptyMethod, UnsupportedMethod],
            RefactorOp::InsertConstructor => &[EmptyConstructor, UnsupportedConstructor, EmptyClass],
            RefactorOp::AccessMethod => &[AccessMethod],
            RefactorOp::ForToWhile => &[ForToWhile],
        }
    }
}

/// One logged edit kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EditKind {
    DeadStatement,
    CopiedStatement,
    WrapOptionalVariable,
    WrapOptionalValue,
    ExtractVariable,
    ExtractConstant,
    MoveConstant,
    InvertEquality,
    InvertNegation,
    EmptyMethod,
    UnsupportedMethod,
    EmptyConstructor,
    UnsupportedConstructor,
    EmptyClass,
    AccessMethod,
    ForToWhile,
}

impl EditKind {
    pub const ALL: [EditKind; 16] = [
        EditKind::DeadStatement,
        EditKind::CopiedStatement,
        EditKind::WrapOptionalVariable,
        EditKind::WrapOptionalValue,
        EditKind::ExtractVariable,
        EditKind::ExtractConstant,
        EditKind::MoveConstant,
        EditKind::InvertEquality,
        EditKind::InvertNegation,
        EditKind::EmptyMethod,
        EditKind::UnsupportedMethod,
        EditKind::EmptyConstructor,
        EditKind::UnsupportedConstructor,
        EditKind::EmptyClass,
        EditKind::AccessMethod,
        EditKind::ForToWhile,
    ];

    pub fn name(self) -> &'static str {
        use EditKind::*;
        match self {
            DeadStatement => "dead-statement",
            CopiedStatement => "copied-statement",
            WrapOptionalVariable => "wrap-optional-variable",
            WrapOptionalValue => "wrap-optional-value",
            ExtractVariable => "extract-variable",
            ExtractConstant => "extract-constant",
            MoveConstant => "move-constant",
            InvertEquality => "invert-equality",
            InvertNegation => "invert-negation",
            EmptyMethod => "empty-method",
            UnsupportedMethod => "unsupported-method",
            EmptyConstructor => "empty-constructor",
            UnsupportedConstructor => "unsupported-constructor",
            EmptyClass => "empty-class",
            AccessMethod => "access-method",
            ForToWhile => "for-to-while",
        }
    }
}

impl fmt::Display for EditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EditKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        EditKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown edit `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edit {
    pub kind: EditKind,
    /// `file:line:col` in the program as it was before this edit.
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub intensity: usize,
    pub seed: u64,
    /// Dead-statement templates; `$v` and `$w` become fresh names.
    pub pool: Vec<String>,
    /// Refactoring families to draw from.
    pub operations: Vec<RefactorOp>,
}

impl Default for AttackSpec {
    fn default() -> Self {
        AttackSpec {
            kind: AttackKind::Insertion,
            intensity: 5,
            seed: 0,
            pool: DEFAULT_POOL.iter().map(|s| s.to_string()).collect(),
            operations: RefactorOp::ALL.to_vec(),
        }
    }
}

impl AttackSpec {
    pub fn insertion(intensity: usize, seed: u64) -> AttackSpec {
        AttackSpec { kind: AttackKind::Insertion, intensity, seed, ..AttackSpec::default() }
    }

    pub fn refactoring(intensity: usize, seed: u64) -> AttackSpec {
        AttackSpec { kind: AttackKind::Refactoring, intensity, seed, ..AttackSpec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    #[error("attack intensity must be at least 1")]
    ZeroIntensity,
    #[error("program does not load: {0}")]
    Frontend(#[from] FrontendError),
    #[error("no legal insertion point after {attempts} attempts")]
    NoInsertionPoint { attempts: usize },
    #[error("no attack operation is applicable")]
    NotApplicable,
    #[error("only {done} of {wanted} edits preserved behavior")]
    Exhausted { done: usize, wanted: usize },
}

#[derive(Debug, Clone)]
pub struct Attacked {
    pub ast: Ast,
    pub edits: Vec<Edit>,
}

impl Attacked {
    pub fn log_json(&self) -> serde_json::Value {
        serde_json::json!({ "edits": self.edits })
    }
}

/// An attacked copy of the program and where the edit happened.
pub(crate) type Proposal = Option<(Ast, String)>;

/// Tries per edit before giving up.
pub const ATTEMPTS_PER_EDIT: usize = 60;

/// One edit per ten statements, at least one.
pub fn default_intensity(ast: &Ast) -> usize {
    let stmts = ast
        .live_nodes()
        .into_iter()
        .filter(|n| ast.kind(*n).is_statement() && ast.kind(*n) != NodeKind::Block)
        .count();
    (stmts / 10).max(1)
}

pub(crate) fn location(ast: &Ast, id: NodeId) -> String {
    let span = ast.node(id).span;
    format!("{}:{}:{}", ast.file_of(id).unwrap_or("?"), span.line, span.col)
}

struct Driver<'a> {
    inputs: &'a [Vec<String>],
    expected: ProgramIO,
    current: Ast,
    edits: Vec<Edit>,
}

impl Driver<'_> {
    /// Accepts the proposal when it loads and behaves like the original.
    fn offer(&mut self, kind: EditKind, p: Proposal) -> bool {
        let Some((candidate, location)) = p else { return false };
        let Ok(reloaded) = build::reload(&candidate) else { return false };
        if interpret_program(&reloaded, self.inputs) != self.expected {
            return false;
        }
        self.current = reloaded;
        self.edits.push(Edit { kind, location });
        true
    }
}

fn driver<'a>(ast: &Ast, inputs: &'a [Vec<String>]) -> Result<Driver<'a>, AttackError> {
    let current = build::reload(ast)?;
    let expected = interpret_program(&current, inputs);
    Ok(Driver { inputs, expected, current, edits: Vec::new() })
}

pub fn attack(ast: &Ast, spec: &AttackSpec, inputs: &[Vec<String>]) -> Result<Attacked, AttackError> {
    match spec.kind {
        AttackKind::Insertion => insert_dead_code(ast, spec, inputs),
        AttackKind::Refactoring => refactor_attack(ast, spec, inputs),
    }
}

pub fn insert_dead_code(ast: &Ast, spec: &AttackSpec, inputs: &[Vec<String>]) -> Result<Attacked, AttackError> {
    insert_with(ast, spec, inputs, None)
}

fn insert_with(ast: &Ast, spec: &AttackSpec, inputs: &[Vec<String>], only: Option<EditKind>) -> Result<Attacked, AttackError> {
    if spec.intensity == 0 {
        return Err(AttackError::ZeroIntensity);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut d = driver(ast, inputs)?;
    let mut attempts = 0;
    while d.edits.len() < spec.intensity {
        if attempts == ATTEMPTS_PER_EDIT {
            return Err(AttackError::NoInsertionPoint { attempts });
        }
        attempts += 1;
        let (kind, p) = insertion::propose(&d.current, &spec.pool, &mut rng, only);
        if d.offer(kind, p) {
            attempts = 0;
        }
    }
    Ok(Attacked { ast: d.current, edits: d.edits })
}

pub fn refactor_attack(ast: &Ast, spec: &AttackSpec, inputs: &[Vec<String>]) -> Result<Attacked, AttackError> {
    let families: Vec<Vec<EditKind>> = spec.operations.iter().map(|op| op.edits().to_vec()).collect();
    refactor_with(ast, &families, spec, inputs)
}

/// Applies edits of exactly one kind.
pub fn apply_edits(ast: &Ast, kind: EditKind, count: usize, seed: u64, inputs: &[Vec<String>]) -> Result<Attacked, AttackError> {
    let spec = AttackSpec::refactoring(count, seed);
    match kind {
        EditKind::DeadStatement | EditKind::CopiedStatement => insert_with(ast, &spec, inputs, Some(kind)),
        k => refactor_with(ast, &[vec![k]], &spec, inputs),
    }
}

/// Draws a family uniformly, then an edit of that family uniformly among
/// those with an applicable site.
fn refactor_with(ast: &Ast, families: &[Vec<EditKind>], spec: &AttackSpec, inputs: &[Vec<String>]) -> Result<Attacked, AttackError> {
    if spec.intensity == 0 {
        return Err(AttackError::ZeroIntensity);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut d = driver(ast, inputs)?;
    let mut attempts = 0;
    while d.edits.len() < spec.intensity {
        let mut open: Vec<Vec<EditKind>> = families.to_vec();
        let mut accepted = false;
        while !open.is_empty() && attempts < ATTEMPTS_PER_EDIT {
            let fi = rand::Rng::gen_range(&mut rng, 0..open.len());
            let Some(kind) = open[fi].choose(&mut rng).copied() else {
                open.remove(fi);
                continue;
            };
            match refactor::propose(kind, &d.current, &mut rng) {
                None => {
                    open[fi].retain(|k| *k != kind);
                    if open[fi].is_empty() {
                        open.remove(fi);
                    }
                }
                p => {
                    attempts += 1;
                    if d.offer(kind, p) {
                        accepted = true;
                        break;
                    }
                }
            }
        }
        if accepted {
            attempts = 0;
        } else if d.edits.is_empty() && open.is_empty() {
            return Err(AttackError::NotApplicable);
        } else {
            return Err(AttackError::Exhausted { done: d.edits.len(), wanted: spec.intensity });
        }
    }
    Ok(Attacked { ast: d.current, edits: d.edits })
}
