//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use cpgnorm::attack::{apply_edits, EditKind};
use cpgnorm::catalog::{normalize, NormalizationConfig, TransformationId};
use cpgnorm::compare::corpus::{load_corpus, Submission};
use cpgnorm::cpg::Cpg;
use cpgnorm::frontend::ast::Ast;
use cpgnorm::frontend::printer::print_all;
use cpgnorm::linearize::{tokenize, Mode, TokenKind};

use TransformationId::*;

/// Attack edits and the transformations expected to undo them.
pub const PAIRING: [(EditKind, &[TransformationId]); 14] = [
    (EditKind::EmptyMethod, &[T1]),
    (EditKind::EmptyConstructor, &[T2]),
    (EditKind::EmptyClass, &[T3, T2]),
    (EditKind::AccessMethod, &[T4]),
    (EditKind::UnsupportedMethod, &[T5, T3]),
    (EditKind::UnsupportedConstructor, &[T6, T3]),
    (EditKind::MoveConstant, &[T7]),
    (EditKind::ExtractVariable, &[T8]),
    (EditKind::ExtractConstant, &[T9, T7, T3]),
    (EditKind::WrapOptionalVariable, &[T10]),
    (EditKind::WrapOptionalValue, &[T11]),
    (EditKind::InvertNegation, &[T12]),
    (EditKind::InvertEquality, &[T13]),
    (EditKind::ForToWhile, &[T14]),
];

pub const SEEDS: u64 = 4;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixtures() -> Vec<Submission> {
    load_corpus(&fixture_dir()).expect("bundled fixtures")
}

pub fn normalized(ast: &Ast) -> Cpg {
    normalize(Cpg::build(ast.clone()), &NormalizationConfig::default()).expect("normalization converges")
}

pub fn normalized_tokens(ast: &Ast) -> Vec<TokenKind> {
    tokenize(&normalized(ast), Mode::Eog).tokens
}

pub struct Reversal {
    pub kind: EditKind,
    pub fixture: String,
    pub seed: u64,
    /// None when the edit does not apply to the fixture.
    pub equal: Option<bool>,
    pub detail: String,
}

/// Applies one edit of `kind` per seed to every fixture and compares
/// normalized tokens with the normalized original.
pub fn reversals(subs: &[Submission], kind: EditKind) -> Vec<Reversal> {
    let mut out = Vec::new();
    for s in subs {
        let ast = s.load().unwrap();
        let base = normalized_tokens(&ast);
        for seed in 0..SEEDS {
            let (equal, detail) = match apply_edits(&ast, kind, 1, seed, &s.inputs) {
                Ok(a) => {
                    let n = normalized(&a.ast);
                    let same = tokenize(&n, Mode::Eog).tokens == base;
                    let detail = if same {
                        String::new()
                    } else {
                        format!("--- attacked\n{}\n--- normalized\n{}", print_all(&a.ast), print_all(&n.ast))
                    };
                    (Some(same), detail)
                }
                Err(e) => (None, e.to_string()),
            };
            out.push(Reversal { kind, fixture: s.id.clone(), seed, equal, detail });
        }
    }
    out
}
