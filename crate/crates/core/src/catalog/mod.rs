//! The normalization catalog: fourteen transformations, the statement
//! reordering / dead-code phase, and the pipeline that runs them to a
//! fixed point.
//!
//! | id | transformation |
//! |----|----------------|
//! | T1 | Remove Empty Methods |
//! | T2 | Remove Empty Constructors |
//! | T3 | Remove Empty Classes |
//! | T4 | Getter Methods |
//! | T5 | Unsupported Methods |
//! | T6 | Unsupported Constructors |
//! | T7 | Move Constants To Only Using Class |
//! | T8 | Inline Single-use Variables |
//! | T9 | Inline Single-use Constants |
//! | T10, T11 | Inline Optional Values (variables, unwrapping calls) |
//! | T12 | Revert Negated If-Else |
//! | T13 | Revert If-Unequal-Else |
//! | T14 | For Loop To While Loop |

pub mod constants;
pub mod effects;
pub mod equivalents;
pub mod inline;
pub mod members;
pub mod optional;
pub mod query;
pub mod reorder;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cpg::Cpg;
use crate::frontend::canon::canonical;
use crate::pattern::{apply, PatternError, TransformationTemplate, DEFAULT_PASS_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TransformationId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
    T10,
    T11,
    T12,
    T13,
    T14,
}

impl TransformationId {
    pub const ALL: [TransformationId; 14] = [
        TransformationId::T1,
        TransformationId::T2,
        TransformationId::T3,
        TransformationId::T4,
        TransformationId::T5,
        TransformationId::T6,
        TransformationId::T7,
        TransformationId::T8,
        TransformationId::T9,
        TransformationId::T10,
        TransformationId::T11,
        TransformationId::T12,
        TransformationId::T13,
        TransformationId::T14,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn from_number(n: usize) -> Option<TransformationId> {
        n.checked_sub(1).and_then(|i| TransformationId::ALL.get(i).copied())
    }

    pub fn name(self) -> &'static str {
        use TransformationId::*;
        match self {
            T1 => "Remove Empty Methods",
            T2 => "Remove Empty Constructors",
            T3 => "Remove Empty Classes",
            T4 => "Getter Methods",
            T5 => "Unsupported Methods",
            T6 => "Unsupported Constructors",
            T7 => "Move Constants To Only Using Class",
            T8 => "Inline Single-use Variables",
            T9 => "Inline Single-use Constants",
            T10 | T11 => "Inline Optional Values",
            T12 => "Revert Negated If-Else",
            T13 => "Revert If-Unequal-Else",
            T14 => "For Loop To While Loop",
        }
    }
}

impl fmt::Display for TransformationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown transformation `{0}` (expected T1..T14)")]
pub struct UnknownTransformation(pub String);

impl FromStr for TransformationId {
    type Err = UnknownTransformation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let digits = t.strip_prefix(['T', 't']).unwrap_or(t);
        digits
            .parse()
            .ok()
            .and_then(TransformationId::from_number)
            .ok_or_else(|| UnknownTransformation(s.to_string()))
    }
}

impl TryFrom<String> for TransformationId {
    type Error = UnknownTransformation;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<TransformationId> for String {
    fn from(t: TransformationId) -> String {
        t.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizationConfig {
    pub enabled: BTreeSet<TransformationId>,
    pub reorder: bool,
    pub dead_code: bool,
    /// Pass cap per template, also bounding the pipeline rounds.
    pub cap: usize,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            enabled: TransformationId::ALL.into_iter().collect(),
            reorder: true,
            dead_code: true,
            cap: DEFAULT_PASS_CAP,
        }
    }
}

impl NormalizationConfig {
    /// Everything except the given transformations.
    pub fn without(ids: &[TransformationId]) -> NormalizationConfig {
        let mut c = NormalizationConfig::default();
        for id in ids {
            c.enabled.remove(id);
        }
        c
    }

    /// Only the given transformations, without reordering or pruning.
    pub fn only(ids: &[TransformationId]) -> NormalizationConfig {
        NormalizationConfig { enabled: ids.iter().copied().collect(), reorder: false, dead_code: false, cap: DEFAULT_PASS_CAP }
    }
}

fn build(id: TransformationId) -> Vec<TransformationTemplate> {
    use TransformationId::*;
    match id {
        T1 => vec![members::empty_methods()],
        T2 => vec![members::empty_constructors()],
        T3 => vec![members::empty_classes()],
        T4 => members::getters(),
        T5 => vec![members::unsupported_methods()],
        T6 => vec![members::unsupported_constructors()],
        T7 => vec![constants::move_constants()],
        T8 => inline::templates(),
        T9 => vec![constants::inline_constants()],
        T10 => vec![optional::unwrap_variables()],
        T11 => vec![optional::unwrap_calls()],
        T12 => vec![equivalents::negated_if_else()],
        T13 => vec![equivalents::unequal_if_else()],
        T14 => vec![equivalents::for_to_while(), equivalents::flatten_blocks()],
    }
}

/// Templates implementing one transformation, in application order.
pub fn templates(id: TransformationId) -> &'static [TransformationTemplate] {
    static ALL: OnceLock<Vec<Vec<TransformationTemplate>>> = OnceLock::new();
    &ALL.get_or_init(|| TransformationId::ALL.into_iter().map(build).collect())[id.number() - 1]
}

/// Applies the templates of `ids` in order, repeatedly, until none
/// matches. Returns the number of rewrites.
pub fn run_to_fixed_point(cpg: &mut Cpg, ids: &[TransformationId], cap: usize) -> Result<usize, PatternError> {
    let mut total = 0;
    for _ in 0..cap {
        let mut n = 0;
        for id in ids {
            for t in templates(*id) {
                n += apply(cpg, t, cap)?;
            }
        }
        if n == 0 {
            return Ok(total);
        }
        total += n;
    }
    Err(PatternError::NonTermination { template: "transformation sweep".into(), cap })
}

fn run_group(mut cpg: Cpg, ids: &[TransformationId]) -> Cpg {
    run_to_fixed_point(&mut cpg, ids, DEFAULT_PASS_CAP).expect("bundled templates terminate");
    cpg
}

/// T1 to T6.
pub fn remove_trivial_members(cpg: Cpg) -> Cpg {
    use TransformationId::*;
    run_group(cpg, &[T1, T2, T3, T4, T5, T6])
}

/// T7, over all classes of one submission.
pub fn move_constants(cpg: Cpg) -> Cpg {
    run_group(cpg, &[TransformationId::T7])
}

/// T8 to T11.
pub fn inline_elements(cpg: Cpg) -> Cpg {
    use TransformationId::*;
    run_group(cpg, &[T8, T9, T10, T11])
}

/// T12 to T14.
pub fn replace_equivalents(cpg: Cpg) -> Cpg {
    use TransformationId::*;
    run_group(cpg, &[T12, T13, T14])
}

/// Removes dead code, then sorts statements. Returns true on change.
pub fn reorder_and_prune(cpg: &mut Cpg, reorder: bool, dead_code: bool) -> bool {
    let pruned = dead_code && reorder::prune(cpg);
    let sorted = reorder && reorder::reorder(cpg);
    pruned || sorted
}

/// Pipeline stage reported to [`normalize_traced`] callbacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    FirstPhase,
    ReorderAndPrune,
    SecondPhase,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::FirstPhase => "phase 1",
            Stage::ReorderAndPrune => "reorder and prune",
            Stage::SecondPhase => "phase 2",
        })
    }
}

pub fn normalize(cpg: Cpg, config: &NormalizationConfig) -> Result<Cpg, PatternError> {
    normalize_traced(cpg, config, |_, _| {})
}

/// [`normalize`], calling `trace` after every stage of every round.
pub fn normalize_traced(
    mut cpg: Cpg,
    config: &NormalizationConfig,
    mut trace: impl FnMut(Stage, &Cpg),
) -> Result<Cpg, PatternError> {
    let ids: Vec<TransformationId> = config.enabled.iter().copied().collect();
    for _ in 0..config.cap.max(1) {
        let before = canonical(&cpg.ast);
        run_to_fixed_point(&mut cpg, &ids, config.cap)?;
        trace(Stage::FirstPhase, &cpg);
        if config.reorder || config.dead_code {
            reorder_and_prune(&mut cpg, config.reorder, config.dead_code);
            trace(Stage::ReorderAndPrune, &cpg);
        }
        run_to_fixed_point(&mut cpg, &ids, config.cap)?;
        trace(Stage::SecondPhase, &cpg);
        if canonical(&cpg.ast) == before {
            return Ok(cpg);
        }
    }
    Err(PatternError::NonTermination { template: "normalization pipeline".into(), cap: config.cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_str;
    use crate::frontend::printer::print_all;
    use crate::linearize::{tokenize, Mode};

    fn norm(src: &str) -> Cpg {
        normalize(Cpg::build(load_str(src).unwrap()), &NormalizationConfig::default()).unwrap()
    }

    const ORIGINAL: &str = "void printRoots(int n) { for (int i=0; i<n; i++) { double d = sqrt(i); d++; println(d); } }";
    const VARIANT: &str = "void printRoots(int n) { int i = 0; while (i < n) { double d = sqrt(i); println(++d); i++; } }";

    #[test]
    fn running_example_converges() {
        let a = norm(ORIGINAL);
        let b = norm(VARIANT);
        assert_eq!(canonical(&a.ast), canonical(&b.ast));
        assert_eq!(tokenize(&a, Mode::Eog).tokens, tokenize(&b, Mode::Eog).tokens);
        let text = print_all(&a.ast);
        assert!(text.contains("int i = 0;\n    while (i < n) {\n        println(sqrt(i) + 1);\n        i = i + 1;\n    }"), "{text}");
    }

    #[test]
    fn normalization_is_idempotent() {
        let once = norm(ORIGINAL);
        let text = canonical(&once.ast);
        let twice = normalize(once, &NormalizationConfig::default()).unwrap();
        assert_eq!(canonical(&twice.ast), text);
    }

    #[test]
    fn ids_parse_and_print() {
        assert_eq!("T7".parse::<TransformationId>().unwrap(), TransformationId::T7);
        assert_eq!("14".parse::<TransformationId>().unwrap(), TransformationId::T14);
        assert!("T15".parse::<TransformationId>().is_err());
        assert_eq!(TransformationId::T14.to_string(), "T14");
        assert_eq!(TransformationId::T1.name(), "Remove Empty Methods");
    }

    #[test]
    fn disabled_transformations_do_not_run() {
        let cfg = NormalizationConfig::without(&[TransformationId::T14]);
        let c = normalize(Cpg::build(load_str(ORIGINAL).unwrap()), &cfg).unwrap();
        assert!(print_all(&c.ast).contains("for ("));
    }

    #[test]
    fn trivial_members_removed() {
        let c = remove_trivial_members(Cpg::build(load_str("class E {} class U { int unsupported() { throw new E(); } } void main() { println(1); }").unwrap()));
        assert!(c.ast.classes().is_empty());
        let src = "void main() { println(1); }";
        let c = remove_trivial_members(Cpg::build(load_str(src).unwrap()));
        assert_eq!(canonical(&c.ast), canonical(&load_str(src).unwrap()));
    }
}
