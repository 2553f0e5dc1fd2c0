//! Separation, one-sided Wilcoxon signed-rank test and Cliff's delta.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::statistics::{Data, Median};
use thiserror::Error;

use crate::compare::ComparisonResult;

/// Largest number of nonzero differences handled by the exact distribution.
pub const EXACT_LIMIT: usize = 12;
pub const MIN_PAIRS: usize = 5;
pub const BOOTSTRAP_RESAMPLES: usize = 10_000;
pub const DEFAULT_BOOTSTRAP_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("empty sample group")]
    EmptyGroup,
    #[error("need at least {MIN_PAIRS} nonzero differences, got {0}")]
    TooFewPairs(usize),
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("before/after runs cover different pairs: {0}")]
    PairMismatch(String),
}

pub fn median(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyGroup);
    }
    Ok(Data::new(values.to_vec()).median())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimilaritySample {
    pub plagiarism_pairs: Vec<f64>,
    pub unrelated_pairs: Vec<f64>,
}

/// Median plagiarism similarity minus median unrelated similarity, in pp.
pub fn median_separation(sample: &SimilaritySample) -> Result<f64, StatsError> {
    Ok(100.0 * (median(&sample.plagiarism_pairs)? - median(&sample.unrelated_pairs)?))
}

/// Average ranks (1-based) of `values`, ties sharing the mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|a, b| values[*a].total_cmp(&values[*b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for k in &idx[i..=j] {
            ranks[*k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Signed ranks with Pratt's zero handling: zero differences take part in
/// ranking and are then dropped. Returns the nonzero ranks and their signs.
pub fn signed_ranks(x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<bool>), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks = average_ranks(&abs);
    let (mut r, mut pos) = (Vec::new(), Vec::new());
    for (di, ri) in d.iter().zip(ranks) {
        if *di != 0.0 {
            r.push(ri);
            pos.push(*di > 0.0);
        }
    }
    Ok((r, pos))
}

/// P(W+ >= w) over all sign patterns, counted on doubled (integral) ranks.
pub fn exact_upper_tail(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for r in &doubled {
        for s in (*r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let obs = (w_plus * 2.0).round() as usize;
    let hits: u64 = counts[obs.min(total + 1)..].iter().sum();
    hits as f64 / 2f64.powi(ranks.len() as i32)
}

/// Normal approximation with continuity correction; the variance uses the
/// actual ranks, which accounts for ties.
pub fn normal_upper_tail(ranks: &[f64], w_plus: f64) -> f64 {
    let mean: f64 = ranks.iter().sum::<f64>() / 2.0;
    let var: f64 = ranks.iter().map(|r| r * r).sum::<f64>() / 4.0;
    if var == 0.0 {
        return 1.0;
    }
    let z = (w_plus - mean - 0.5) / var.sqrt();
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    (1.0 - n.cdf(z)).clamp(f64::MIN_POSITIVE, 1.0)
}

/// One-sided test of `x > y` on paired values.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let (ranks, pos) = signed_ranks(x, y)?;
    if ranks.is_empty() {
        return Ok(1.0);
    }
    if ranks.len() < MIN_PAIRS {
        return Err(StatsError::TooFewPairs(ranks.len()));
    }
    let w_plus: f64 = ranks.iter().zip(&pos).filter(|(_, p)| **p).map(|(r, _)| r).sum();
    Ok(if ranks.len() <= EXACT_LIMIT { exact_upper_tail(&ranks, w_plus) } else { normal_upper_tail(&ranks, w_plus) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpretation {
    Negligible,
    Small,
    Medium,
    Large,
    #[serde(rename = "Very Large")]
    VeryLarge,
}

impl Interpretation {
    pub fn of(delta: f64) -> Interpretation {
        match delta.abs() {
            d if d < 0.147 => Interpretation::Negligible,
            d if d < 0.33 => Interpretation::Small,
            d if d < 0.474 => Interpretation::Medium,
            d if d < 0.8 => Interpretation::Large,
            _ => Interpretation::VeryLarge,
        }
    }
}

impl std::fmt::Display for Interpretation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Interpretation::Negligible => "Negligible",
            Interpretation::Small => "Small",
            Interpretation::Medium => "Medium",
            Interpretation::Large => "Large",
            Interpretation::VeryLarge => "Very Large",
        })
    }
}

fn delta_sorted(x: &[f64], sorted_y: &[f64]) -> f64 {
    let mut score: i64 = 0;
    for v in x {
        let below = sorted_y.partition_point(|y| y < v);
        let not_above = sorted_y.partition_point(|y| y <= v);
        score += below as i64 - (sorted_y.len() - not_above) as i64;
    }
    score as f64 / (x.len() * sorted_y.len()) as f64
}

/// Dominance statistic `(#(x > y) - #(x < y)) / (|x| |y|)`.
pub fn delta(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.is_empty() || y.is_empty() {
        return Err(StatsError::EmptyGroup);
    }
    let mut ys = y.to_vec();
    ys.sort_by(f64::total_cmp);
    Ok(delta_sorted(x, &ys))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CliffsDelta {
    pub delta: f64,
    pub interpretation: Interpretation,
    pub ci: (f64, f64),
}

/// Percentile bootstrap interval for delta, resampling both groups.
pub fn bootstrap_ci(x: &[f64], y: &[f64], resamples: usize, seed: u64) -> Result<(f64, f64), StatsError> {
    if x.is_empty() || y.is_empty() {
        return Err(StatsError::EmptyGroup);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = vec![0.0; x.len()];
    let mut ys = vec![0.0; y.len()];
    let mut deltas = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        for v in xs.iter_mut() {
            *v = x[rng.gen_range(0..x.len())];
        }
        for v in ys.iter_mut() {
            *v = y[rng.gen_range(0..y.len())];
        }
        ys.sort_by(f64::total_cmp);
        deltas.push(delta_sorted(&xs, &ys));
    }
    deltas.sort_by(f64::total_cmp);
    let at = |q: f64| deltas[((q * resamples as f64).floor() as usize).min(resamples - 1)];
    Ok((at(0.025), at(0.975)))
}

pub fn cliffs_delta(x: &[f64], y: &[f64]) -> Result<CliffsDelta, StatsError> {
    cliffs_delta_seeded(x, y, DEFAULT_BOOTSTRAP_SEED)
}

pub fn cliffs_delta_seeded(x: &[f64], y: &[f64], seed: u64) -> Result<CliffsDelta, StatsError> {
    let d = delta(x, y)?;
    Ok(CliffsDelta { delta: d, interpretation: Interpretation::of(d), ci: bootstrap_ci(x, y, BOOTSTRAP_RESAMPLES, seed)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairLabel {
    Plagiarism,
    Unrelated,
}

/// Unordered pair key.
pub fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EffectReport {
    pub pairs: usize,
    /// Median after minus median before, in pp.
    pub median_difference: f64,
    pub wilcoxon_p: f64,
    pub cliffs_delta: f64,
    pub interpretation: Interpretation,
    pub delta_ci: (f64, f64),
}

pub fn effect(before: &[f64], after: &[f64]) -> Result<EffectReport, StatsError> {
    let c = cliffs_delta(after, before)?;
    Ok(EffectReport {
        pairs: after.len(),
        median_difference: 100.0 * (median(after)? - median(before)?),
        wilcoxon_p: wilcoxon_signed_rank(after, before)?,
        cliffs_delta: c.delta,
        interpretation: c.interpretation,
        delta_ci: c.ci,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunEffects {
    pub plagiarism: EffectReport,
    pub false_positive: EffectReport,
}

fn keyed(results: &[ComparisonResult]) -> BTreeMap<(String, String), f64> {
    results.iter().map(|r| (pair_key(&r.id_a, &r.id_b), r.similarity_avg)).collect()
}

/// Paired comparison of two detector runs over the same labelled pairs.
/// Pairs without a label are ignored.
pub fn interpret_run(
    before: &[ComparisonResult],
    after: &[ComparisonResult],
    labels: &BTreeMap<(String, String), PairLabel>,
) -> Result<RunEffects, StatsError> {
    let b = keyed(before);
    let a = keyed(after);
    let bk: BTreeSet<_> = b.keys().collect();
    let ak: BTreeSet<_> = a.keys().collect();
    if let Some(k) = bk.symmetric_difference(&ak).next() {
        return Err(StatsError::PairMismatch(format!("{}/{}", k.0, k.1)));
    }
    let group = |label: PairLabel| {
        let keys: Vec<_> = b.keys().filter(|k| labels.get(*k) == Some(&label)).collect();
        let before: Vec<f64> = keys.iter().map(|k| b[*k]).collect();
        let after: Vec<f64> = keys.iter().map(|k| a[*k]).collect();
        effect(&before, &after)
    };
    Ok(RunEffects { plagiarism: group(PairLabel::Plagiarism)?, false_positive: group(PairLabel::Unrelated)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separation_example() {
        let s = SimilaritySample { plagiarism_pairs: vec![0.9, 1.0, 1.0], unrelated_pairs: vec![0.1, 0.2, 0.15] };
        assert!((median_separation(&s).unwrap() - 85.0).abs() < 1e-9);
        let e = SimilaritySample { plagiarism_pairs: vec![0.3, 0.4], unrelated_pairs: vec![0.4, 0.3] };
        assert_eq!(median_separation(&e).unwrap(), 0.0);
        assert_eq!(median_separation(&SimilaritySample::default()), Err(StatsError::EmptyGroup));
    }

    #[test]
    fn all_positive_six() {
        let x = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let y = [1.0; 6];
        assert_eq!(wilcoxon_signed_rank(&x, &y).unwrap(), 1.0 / 64.0);
    }

    #[test]
    fn identical_samples() {
        let x = [0.1, 0.5, 0.7];
        assert_eq!(wilcoxon_signed_rank(&x, &x).unwrap(), 1.0);
        let c = cliffs_delta(&x, &x).unwrap();
        assert_eq!(c.delta, 0.0);
        assert_eq!(c.interpretation, Interpretation::Negligible);
    }

    #[test]
    fn too_few_pairs() {
        assert_eq!(wilcoxon_signed_rank(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]), Err(StatsError::TooFewPairs(3)));
        assert_eq!(wilcoxon_signed_rank(&[1.0], &[0.0, 0.0]), Err(StatsError::LengthMismatch(1, 2)));
    }

    #[test]
    fn complete_dominance() {
        let c = cliffs_delta(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(c.delta, 1.0);
        assert_eq!(c.interpretation, Interpretation::VeryLarge);
        assert_eq!(c.ci, (1.0, 1.0));
    }

    #[test]
    fn thresholds() {
        assert_eq!(Interpretation::of(0.1), Interpretation::Negligible);
        assert_eq!(Interpretation::of(-0.2), Interpretation::Small);
        assert_eq!(Interpretation::of(0.4), Interpretation::Medium);
        assert_eq!(Interpretation::of(0.5), Interpretation::Large);
        assert_eq!(Interpretation::of(0.8), Interpretation::VeryLarge);
        assert_eq!(serde_json::to_string(&Interpretation::VeryLarge).unwrap(), "\"Very Large\"");
    }

    #[test]
    fn ties_share_ranks() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    fn result(a: &str, b: &str, s: f64) -> ComparisonResult {
        ComparisonResult {
            id_a: a.into(),
            id_b: b.into(),
            tiles: vec![],
            similarity_avg: s,
            similarity_max: s,
            matched_tokens: 0,
            len_a: 1,
            len_b: 1,
        }
    }

    #[test]
    fn unchanged_run_has_no_effect() {
        let mut runs = Vec::new();
        let mut labels = BTreeMap::new();
        for i in 0..6 {
            runs.push(result(&format!("p{i}"), &format!("q{i}"), 0.1 * i as f64));
            labels.insert(pair_key(&format!("p{i}"), &format!("q{i}")), PairLabel::Plagiarism);
            runs.push(result(&format!("u{i}"), &format!("v{i}"), 0.05 * i as f64));
            labels.insert(pair_key(&format!("v{i}"), &format!("u{i}")), PairLabel::Unrelated);
        }
        let fx = interpret_run(&runs, &runs, &labels).unwrap();
        assert_eq!(fx.plagiarism.cliffs_delta, 0.0);
        assert_eq!(fx.plagiarism.wilcoxon_p, 1.0);
        assert_eq!(fx.false_positive.cliffs_delta, 0.0);
        let fewer = &runs[1..];
        assert!(matches!(interpret_run(&runs, fewer, &labels), Err(StatsError::PairMismatch(_))));
    }
}
