//! Submissions on disk and the corpus-level detect pipeline.
//!
//! A corpus directory holds one subdirectory per submission; loose `.minij`
//! files at the top level count as single-file submissions. Each `*.in`
//! file inside a submission directory is one input vector (one line per
//! `readLine`).

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{compare_all, ComparisonResult};
use crate::catalog::{normalize, NormalizationConfig};
use crate::cpg::Cpg;
use crate::frontend::{load, Ast, FrontendError, SourceUnit};
use crate::linearize::{tokenize_ast, Mode, TokenSequence};
use crate::pattern::PatternError;

pub const SOURCE_EXT: &str = "minij";
pub const INPUT_EXT: &str = "in";

#[derive(Debug, Clone, PartialEq)]
pub struct Submission {
    pub id: String,
    pub units: Vec<SourceUnit>,
    pub inputs: Vec<Vec<String>>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}: no submissions found")]
    Empty(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.to_path_buf(), source }
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).map_err(io_err(dir))? {
        out.push(e.map_err(io_err(dir))?.path());
    }
    out.sort();
    Ok(out)
}

fn has_ext(p: &Path, ext: &str) -> bool {
    p.is_file() && p.extension().is_some_and(|e| e == ext)
}

fn collect_sources(root: &Path, dir: &Path, out: &mut Vec<SourceUnit>) -> Result<(), CorpusError> {
    for p in sorted_entries(dir)? {
        if p.is_dir() {
            collect_sources(root, &p, out)?;
        } else if has_ext(&p, SOURCE_EXT) {
            let text = fs::read_to_string(&p).map_err(io_err(&p))?;
            let rel = p.strip_prefix(root).unwrap_or(&p).to_string_lossy().replace('\\', "/");
            out.push(SourceUnit::new(rel, text));
        }
    }
    Ok(())
}

pub fn parse_input(text: &str) -> Vec<String> {
    text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect()
}

impl Submission {
    pub fn from_text(id: impl Into<String>, path: impl Into<String>, text: impl Into<String>) -> Submission {
        Submission { id: id.into(), units: vec![SourceUnit::new(path, text)], inputs: Vec::new() }
    }

    pub fn from_dir(dir: &Path) -> Result<Submission, CorpusError> {
        let id = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let mut units = Vec::new();
        collect_sources(dir, dir, &mut units)?;
        let mut inputs = Vec::new();
        for p in sorted_entries(dir)? {
            if has_ext(&p, INPUT_EXT) {
                inputs.push(parse_input(&fs::read_to_string(&p).map_err(io_err(&p))?));
            }
        }
        Ok(Submission { id, units, inputs })
    }

    pub fn load(&self) -> Result<Ast, FrontendError> {
        load(&self.units)
    }

    /// Writes sources and input vectors under `dir/<id>/`.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        let base = dir.join(&self.id);
        for u in &self.units {
            let p = base.join(&u.path);
            if let Some(parent) = p.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(p, &u.text)?;
        }
        fs::create_dir_all(&base)?;
        for (i, input) in self.inputs.iter().enumerate() {
            let mut text = input.join("\n");
            text.push('\n');
            fs::write(base.join(format!("input{i}.{INPUT_EXT}")), text)?;
        }
        Ok(())
    }
}

pub fn load_corpus(dir: &Path) -> Result<Vec<Submission>, CorpusError> {
    let mut subs = Vec::new();
    for p in sorted_entries(dir)? {
        if p.is_dir() {
            let s = Submission::from_dir(&p)?;
            if !s.units.is_empty() {
                subs.push(s);
            }
        } else if has_ext(&p, SOURCE_EXT) {
            let id = p.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let text = fs::read_to_string(&p).map_err(io_err(&p))?;
            subs.push(Submission::from_text(id, name, text));
        }
    }
    if subs.is_empty() {
        return Err(CorpusError::Empty(dir.to_path_buf()));
    }
    Ok(subs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    /// Preorder tokens of the source as written.
    Baseline,
    /// Normalized graph, tokens in evaluation order.
    Normalized,
}

impl std::str::FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Approach, String> {
        match s {
            "baseline" => Ok(Approach::Baseline),
            "normalized" | "eog" => Ok(Approach::Normalized),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

impl std::fmt::Display for Approach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Approach::Baseline => "baseline",
            Approach::Normalized => "normalized",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{id}: {source}")]
    Frontend { id: String, source: FrontendError },
    #[error("{id}: normalization failed: {source}")]
    Normalize { id: String, source: PatternError },
}

impl PipelineError {
    pub fn id(&self) -> &str {
        match self {
            PipelineError::Frontend { id, .. } | PipelineError::Normalize { id, .. } => id,
        }
    }
}

pub fn normalize_ast(ast: Ast, cfg: &NormalizationConfig) -> Result<Ast, PatternError> {
    Ok(normalize(Cpg::build(ast), cfg)?.ast)
}

pub fn tokens_for(ast: Ast, approach: Approach, cfg: &NormalizationConfig) -> Result<TokenSequence, PatternError> {
    Ok(match approach {
        Approach::Baseline => tokenize_ast(&ast, Mode::Baseline),
        Approach::Normalized => tokenize_ast(&normalize_ast(ast, cfg)?, Mode::Eog),
    })
}

pub fn prepare(sub: &Submission, approach: Approach, cfg: &NormalizationConfig) -> Result<TokenSequence, PipelineError> {
    let ast = sub.load().map_err(|source| PipelineError::Frontend { id: sub.id.clone(), source })?;
    tokens_for(ast, approach, cfg).map_err(|source| PipelineError::Normalize { id: sub.id.clone(), source })
}

#[derive(Debug)]
pub struct CorpusRun {
    pub results: Vec<ComparisonResult>,
    pub failures: Vec<PipelineError>,
}

/// Tokenizes every submission in parallel and compares all pairs of the
/// ones that made it through; failed submissions are listed, not fatal.
pub fn compare_corpus(subs: &[Submission], min_match: usize, approach: Approach, cfg: &NormalizationConfig) -> CorpusRun {
    let prepared: Vec<Result<TokenSequence, PipelineError>> = subs.par_iter().map(|s| prepare(s, approach, cfg)).collect();
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (s, r) in subs.iter().zip(prepared) {
        match r {
            Ok(seq) => entries.push((s.id.clone(), seq)),
            Err(e) => failures.push(e),
        }
    }
    CorpusRun { results: compare_all(&entries, min_match), failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broken_submission_reported_in_band() {
        let subs = vec![
            Submission::from_text("a", "A.minij", "void main() { println(1); println(2); }"),
            Submission::from_text("b", "B.minij", "void main() { println(1); println(2); }"),
            Submission::from_text("c", "C.minij", "void main( {"),
        ];
        let run = compare_corpus(&subs, 1, Approach::Baseline, &NormalizationConfig::default());
        assert_eq!(run.results.len(), 1);
        assert_eq!(run.results[0].similarity_avg, 1.0);
        assert_eq!(run.failures.len(), 1);
        assert_eq!(run.failures[0].id(), "c");
    }

    #[test]
    fn approach_names_round_trip() {
        for a in [Approach::Baseline, Approach::Normalized] {
            assert_eq!(a.to_string().parse::<Approach>().unwrap(), a);
        }
    }
}
