//! Attack, detect with both approaches, and compare the similarity
//! distributions of plagiarism and unrelated pairs.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::stats::{interpret_run, median, median_separation, pair_key, PairLabel, RunEffects, SimilaritySample, StatsError};
use crate::attack::{attack, default_intensity, AttackError, AttackSpec, Edit};
use crate::catalog::NormalizationConfig;
use crate::compare::corpus::{compare_corpus, Approach, Submission};
use crate::compare::{ComparisonResult, DEFAULT_MIN_MATCH};
use crate::frontend::printer::print_program;
use crate::frontend::{FrontendError, SourceUnit};

pub const DEFAULT_ATTACKED: usize = 10;
pub const MIN_INTENSITY: usize = 5;
/// Extra seeds tried when an attack cannot place all its edits.
pub const ATTACK_RETRIES: u64 = 4;

pub const REPORT_CSV_HEADER: &str = "approach,dataset,metric,value";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub attack: AttackSpec,
    /// How many of the programs (taken in order) get a plagiarized copy.
    pub attacked: usize,
    pub min_match: usize,
    pub normalization: NormalizationConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            attack: AttackSpec { intensity: MIN_INTENSITY, ..AttackSpec::default() },
            attacked: DEFAULT_ATTACKED,
            min_match: DEFAULT_MIN_MATCH,
            normalization: NormalizationConfig::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{id}: {source}")]
    Frontend { id: String, source: FrontendError },
    #[error("{id}: attack failed: {source}")]
    Attack { id: String, source: AttackError },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApproachSummary {
    pub approach: Approach,
    pub median_plagiarism: f64,
    pub median_unrelated: f64,
    /// Percentage points.
    pub median_separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PairRow {
    pub id_a: String,
    pub id_b: String,
    pub label: PairLabel,
    pub baseline: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub dataset: String,
    pub seed: u64,
    pub programs: usize,
    pub attacked: usize,
    pub min_match: usize,
    pub approaches: Vec<ApproachSummary>,
    pub effects: RunEffects,
    pub pipeline_failures: Vec<String>,
    pub pairs: Vec<PairRow>,
}

#[derive(Debug, Clone)]
pub struct AttackedSubmission {
    pub original: String,
    pub submission: Submission,
    pub edits: Vec<Edit>,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub report: ExperimentReport,
    pub plagiarisms: Vec<AttackedSubmission>,
}

impl ExperimentReport {
    pub fn summary(&self, approach: Approach) -> Option<&ApproachSummary> {
        self.approaches.iter().find(|a| a.approach == approach)
    }

    pub fn csv_rows(&self) -> Vec<[String; 4]> {
        let mut rows = Vec::new();
        let mut push = |approach: &str, metric: &str, value: String| {
            rows.push([approach.to_string(), self.dataset.clone(), metric.to_string(), value]);
        };
        for a in &self.approaches {
            let name = a.approach.to_string();
            push(&name, "medianPlagiarism", a.median_plagiarism.to_string());
            push(&name, "medianUnrelated", a.median_unrelated.to_string());
            push(&name, "medianSeparation", a.median_separation.to_string());
        }
        for (group, e) in [("plagiarism", &self.effects.plagiarism), ("falsePositive", &self.effects.false_positive)] {
            let name = Approach::Normalized.to_string();
            push(&name, &format!("{group}.pairs"), e.pairs.to_string());
            push(&name, &format!("{group}.medianDifference"), e.median_difference.to_string());
            push(&name, &format!("{group}.wilcoxonP"), e.wilcoxon_p.to_string());
            push(&name, &format!("{group}.cliffsDelta"), e.cliffs_delta.to_string());
            push(&name, &format!("{group}.interpretation"), e.interpretation.to_string());
            push(&name, &format!("{group}.ciLow"), e.delta_ci.0.to_string());
            push(&name, &format!("{group}.ciHigh"), e.delta_ci.1.to_string());
        }
        rows
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(REPORT_CSV_HEADER.split(','))?;
        for r in self.csv_rows() {
            out.write_record(&r)?;
        }
        out.flush()
    }
}

fn plagiarize(sub: &Submission, spec: &AttackSpec) -> Result<AttackedSubmission, ExperimentError> {
    let ast = sub.load().map_err(|source| ExperimentError::Frontend { id: sub.id.clone(), source })?;
    let intensity = spec.intensity.max(default_intensity(&ast));
    let mut last = AttackError::NotApplicable;
    for retry in 0..=ATTACK_RETRIES {
        let s = AttackSpec { intensity, seed: spec.seed.wrapping_add(retry), ..spec.clone() };
        match attack(&ast, &s, &sub.inputs) {
            Ok(a) => {
                let units = print_program(&a.ast).into_iter().map(|(p, t)| SourceUnit::new(p, t)).collect();
                let submission = Submission { id: format!("{}-{}", sub.id, spec.kind), units, inputs: sub.inputs.clone() };
                return Ok(AttackedSubmission { original: sub.id.clone(), submission, edits: a.edits });
            }
            Err(e @ AttackError::Exhausted { .. }) => last = e,
            Err(e) => return Err(ExperimentError::Attack { id: sub.id.clone(), source: e }),
        }
    }
    Err(ExperimentError::Attack { id: sub.id.clone(), source: last })
}

fn sample(results: &[ComparisonResult], labels: &BTreeMap<(String, String), PairLabel>) -> SimilaritySample {
    let mut s = SimilaritySample::default();
    for r in results {
        match labels.get(&pair_key(&r.id_a, &r.id_b)) {
            Some(PairLabel::Plagiarism) => s.plagiarism_pairs.push(r.similarity_avg),
            Some(PairLabel::Unrelated) => s.unrelated_pairs.push(r.similarity_avg),
            None => {}
        }
    }
    s
}

fn summarize(approach: Approach, s: &SimilaritySample) -> Result<ApproachSummary, StatsError> {
    Ok(ApproachSummary {
        approach,
        median_plagiarism: median(&s.plagiarism_pairs)?,
        median_unrelated: median(&s.unrelated_pairs)?,
        median_separation: median_separation(s)?,
    })
}

/// Plagiarizes the first `cfg.attacked` programs, then compares every pair
/// of the combined corpus. A pair is a plagiarism pair when it joins a
/// program with its own attacked copy; every other pair is unrelated.
pub fn run_experiment(originals: &[Submission], cfg: &ExperimentConfig) -> Result<Experiment, ExperimentError> {
    let n = cfg.attacked.min(originals.len());
    let plagiarisms: Vec<AttackedSubmission> =
        originals[..n].par_iter().map(|s| plagiarize(s, &cfg.attack)).collect::<Result<_, _>>()?;
    let mut all: Vec<Submission> = originals.to_vec();
    all.extend(plagiarisms.iter().map(|p| p.submission.clone()));
    let root: BTreeMap<&str, &str> = originals
        .iter()
        .map(|s| (s.id.as_str(), s.id.as_str()))
        .chain(plagiarisms.iter().map(|p| (p.submission.id.as_str(), p.original.as_str())))
        .collect();
    let mut labels = BTreeMap::new();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            let label = if root[a.id.as_str()] == root[b.id.as_str()] { PairLabel::Plagiarism } else { PairLabel::Unrelated };
            labels.insert(pair_key(&a.id, &b.id), label);
        }
    }
    let before = compare_corpus(&all, cfg.min_match, Approach::Baseline, &cfg.normalization);
    let after = compare_corpus(&all, cfg.min_match, Approach::Normalized, &cfg.normalization);
    let mut approaches = Vec::new();
    for (approach, run) in [(Approach::Baseline, &before), (Approach::Normalized, &after)] {
        approaches.push(summarize(approach, &sample(&run.results, &labels))?);
    }
    // both runs must cover the same pairs, so drop whatever either side lost
    let failed: Vec<String> = before.failures.iter().chain(&after.failures).map(|f| f.to_string()).collect();
    let keep = |r: &&ComparisonResult, other: &[ComparisonResult]| other.iter().any(|o| o.id_a == r.id_a && o.id_b == r.id_b);
    let b: Vec<ComparisonResult> = before.results.iter().filter(|r| keep(r, &after.results)).cloned().collect();
    let a: Vec<ComparisonResult> = after.results.iter().filter(|r| keep(r, &before.results)).cloned().collect();
    let effects = interpret_run(&b, &a, &labels)?;
    let normalized: BTreeMap<_, f64> = a.iter().map(|r| (pair_key(&r.id_a, &r.id_b), r.similarity_avg)).collect();
    let mut pairs: Vec<PairRow> = b
        .iter()
        .map(|r| {
            let key = pair_key(&r.id_a, &r.id_b);
            PairRow {
                label: labels[&key],
                normalized: normalized[&key],
                baseline: r.similarity_avg,
                id_a: key.0,
                id_b: key.1,
            }
        })
        .collect();
    pairs.sort_by(|x, y| (&x.id_a, &x.id_b).cmp(&(&y.id_a, &y.id_b)));
    let report = ExperimentReport {
        dataset: cfg.attack.kind.to_string(),
        seed: cfg.attack.seed,
        programs: originals.len(),
        attacked: plagiarisms.len(),
        min_match: cfg.min_match,
        approaches,
        effects,
        pipeline_failures: failed,
        pairs,
    };
    Ok(Experiment { report, plagiarisms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalx::corpus::generate;

    #[test]
    fn small_insertion_run() {
        let subs = generate(6, 11);
        let cfg = ExperimentConfig { attacked: 5, ..ExperimentConfig::default() };
        let e = run_experiment(&subs, &cfg).unwrap();
        assert_eq!(e.report.attacked, 5);
        assert_eq!(e.report.effects.plagiarism.pairs, 5);
        assert_eq!(e.report.pairs.len(), 11 * 10 / 2);
        let norm = e.report.summary(Approach::Normalized).unwrap();
        assert_eq!(norm.median_plagiarism, 1.0);
        let mut buf = Vec::new();
        e.report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(REPORT_CSV_HEADER));
        assert!(text.contains("normalized,insertion,medianSeparation,"));
    }
}
