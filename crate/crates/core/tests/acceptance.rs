//! The ten acceptance criteria, one test each. Every test prints a single
//! `criterion N ...: PASS|FAIL` line before asserting.

mod common;

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{fixtures, normalized, reversals, PAIRING};
use cpgnorm::attack::{apply_edits, attack, AttackSpec, EditKind};
use cpgnorm::catalog::{normalize, normalize_traced, NormalizationConfig, TransformationId};
use cpgnorm::compare::corpus::{Approach, Submission};
use cpgnorm::compare::{compare_pair, greedy_tiles};
use cpgnorm::cpg::Cpg;
use cpgnorm::evalx::corpus::generate;
use cpgnorm::evalx::experiment::{run_experiment, Experiment, ExperimentConfig};
use cpgnorm::evalx::{interpret_program, ProgramIO};
use cpgnorm::evalx::stats::{delta, exact_upper_tail, signed_ranks, wilcoxon_signed_rank};
use cpgnorm::frontend::canon::canonical;
use cpgnorm::frontend::printer::print_program;
use cpgnorm::frontend::{load, load_str, Ast, SourceUnit};
use cpgnorm::linearize::{tokenize, tokenize_ast, Mode, TokenKind};

const CORPUS_SEED: u64 = 2024;
const ATTACK_SEED: u64 = 7;
const INTENSITY: usize = 5;

const ORIGINAL: &str = "void printRoots(int n) {\n    for (int i=0; i<n; i++) {\n        double d = sqrt(i);\n        d++;\n        println(d);\n    }\n}\n";
const VARIANT: &str = "void printRoots(int n) {\n    int i = 0;\n    while (i < n) {\n        double d = sqrt(i);\n        println(++d);\n        i++;\n    }\n}\n";

fn report(n: usize, name: &str, pass: bool, detail: String) {
    println!("criterion {n} ({name}): {} [{detail}]", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn corpus() -> &'static Vec<Submission> {
    static C: OnceLock<Vec<Submission>> = OnceLock::new();
    C.get_or_init(|| generate(20, CORPUS_SEED))
}

fn experiment(spec: AttackSpec) -> (Experiment, Duration) {
    let start = Instant::now();
    let cfg = ExperimentConfig { attack: spec, attacked: 10, ..ExperimentConfig::default() };
    let e = run_experiment(corpus(), &cfg).expect("experiment runs");
    (e, start.elapsed())
}

fn insertion_run() -> &'static (Experiment, Duration) {
    static R: OnceLock<(Experiment, Duration)> = OnceLock::new();
    R.get_or_init(|| experiment(AttackSpec::insertion(INTENSITY, ATTACK_SEED)))
}

fn refactoring_run() -> &'static (Experiment, Duration) {
    static R: OnceLock<(Experiment, Duration)> = OnceLock::new();
    R.get_or_init(|| experiment(AttackSpec::refactoring(INTENSITY, ATTACK_SEED)))
}

#[test]
fn criterion_1_running_example() {
    let start = Instant::now();
    let a = load_str(ORIGINAL).unwrap();
    let b = load_str(VARIANT).unwrap();
    let base = compare_pair("original", &tokenize_ast(&a, Mode::Baseline), "variant", &tokenize_ast(&b, Mode::Baseline), 3);
    let na = tokenize(&normalized(&a), Mode::Eog);
    let nb = tokenize(&normalized(&b), Mode::Eog);
    let norm = compare_pair("original", &na, "variant", &nb, 3);
    let elapsed = start.elapsed();
    let pass = base.similarity_avg == 0.0 && norm.similarity_avg == 1.0 && na.tokens == nb.tokens && elapsed < Duration::from_secs(1);
    report(
        1,
        "running example",
        pass,
        format!(
            "baseline {:.4} (need 0.0), normalized {:.4} (need 1.0), identical tokens {}, {:?}",
            base.similarity_avg,
            norm.similarity_avg,
            na.tokens == nb.tokens,
            elapsed
        ),
    );
}

#[test]
fn criterion_2_baseline_token_fidelity() {
    use TokenKind::*;
    let original = [MethodBegin, Variable, LoopBegin, Variable, Assign, Variable, Apply, Assign, Apply, LoopEnd, MethodEnd];
    let variant = [MethodBegin, Variable, Variable, LoopBegin, Variable, Apply, Apply, Assign, Assign, LoopEnd, MethodEnd];
    let a = tokenize_ast(&load_str(ORIGINAL).unwrap(), Mode::Baseline).tokens;
    let b = tokenize_ast(&load_str(VARIANT).unwrap(), Mode::Baseline).tokens;
    let names = |t: &[TokenKind]| t.iter().map(|k| k.name()).collect::<Vec<_>>().join(" ");
    report(2, "baseline token fidelity", a == original && b == variant, format!("original: {}; variant: {}", names(&a), names(&b)));
}

#[test]
fn criterion_3_per_transformation_reversal() {
    let subs = fixtures();
    let mut covered: BTreeMap<TransformationId, std::collections::BTreeSet<String>> = BTreeMap::new();
    let mut broken = Vec::new();
    for (kind, ts) in PAIRING {
        for r in reversals(&subs, kind) {
            match r.equal {
                Some(true) => {
                    covered.entry(ts[0]).or_default().insert(r.fixture.clone());
                }
                Some(false) => broken.push(format!("{kind}/{}/{}", r.fixture, r.seed)),
                None => {}
            }
        }
    }
    let thin: Vec<String> = TransformationId::ALL
        .iter()
        .filter(|t| covered.get(t).map_or(0, |s| s.len()) < 2)
        .map(|t| t.to_string())
        .collect();
    let min = TransformationId::ALL.iter().map(|t| covered.get(t).map_or(0, |s| s.len())).min().unwrap_or(0);
    report(
        3,
        "per-transformation reversal",
        broken.is_empty() && thin.is_empty(),
        format!("{} fixtures, min fixtures per transformation {min}, mismatches {broken:?}, under-covered {thin:?}", subs.len()),
    );
}

#[test]
fn criterion_4_insertion_experiment() {
    let (e, t) = insertion_run();
    let norm = e.report.summary(Approach::Normalized).unwrap();
    let base = e.report.summary(Approach::Baseline).unwrap();
    let fx = &e.report.effects.plagiarism;
    let pass = norm.median_separation >= 80.0 && fx.cliffs_delta >= 0.8 && *t < Duration::from_secs(120);
    report(
        4,
        "insertion experiment",
        pass,
        format!(
            "normalized separation {:.1} pp, baseline {:.1} pp, plagiarism delta {:.3} ({}), p {:.2e}, {:?}",
            norm.median_separation, base.median_separation, fx.cliffs_delta, fx.interpretation, fx.wilcoxon_p, t
        ),
    );
}

#[test]
fn criterion_5_refactoring_experiment() {
    let (e, t) = refactoring_run();
    let norm = e.report.summary(Approach::Normalized).unwrap();
    let base = e.report.summary(Approach::Baseline).unwrap();
    let pass = norm.median_separation >= 76.0 && base.median_separation < norm.median_separation && *t < Duration::from_secs(120);
    report(
        5,
        "refactoring experiment",
        pass,
        format!(
            "normalized separation {:.1} pp, baseline {:.1} pp, plagiarism delta {:.3}, {:?}",
            norm.median_separation, base.median_separation, e.report.effects.plagiarism.cliffs_delta, t
        ),
    );
}

#[test]
fn criterion_6_false_positive_impact() {
    let ins = &insertion_run().0.report.effects.false_positive;
    let refa = &refactoring_run().0.report.effects.false_positive;
    let ok = |d: f64| d <= 0.33;
    report(
        6,
        "false-positive impact",
        ok(ins.cliffs_delta) && ok(refa.cliffs_delta),
        format!(
            "unrelated-pair delta: insertion {:.3} ({}), refactoring {:.3} ({}), {} pairs each",
            ins.cliffs_delta, ins.interpretation, refa.cliffs_delta, refa.interpretation, ins.pairs
        ),
    );
}

fn reload(ast: &Ast) -> Option<Ast> {
    let units: Vec<SourceUnit> = print_program(ast).into_iter().map(|(p, t)| SourceUnit::new(p, t)).collect();
    load(&units).ok()
}

fn agrees(expected: &ProgramIO, ast: Option<Ast>, inputs: &[Vec<String>]) -> bool {
    ast.is_some_and(|a| interpret_program(&a, inputs) == *expected)
}

/// Every program/variant pair whose outputs must agree.
fn semantic_variants(s: &Submission) -> Vec<(String, Ast)> {
    let ast = s.load().unwrap();
    let mut out = vec![("original".to_string(), ast.clone())];
    for spec in [AttackSpec::insertion(INTENSITY, ATTACK_SEED), AttackSpec::refactoring(INTENSITY, ATTACK_SEED)] {
        if let Ok(a) = attack(&ast, &spec, &s.inputs) {
            out.push((spec.kind.to_string(), a.ast));
        }
    }
    out
}

#[test]
fn criterion_7_semantics_preservation() {
    let mut subs: Vec<Submission> = corpus().clone();
    let fixtures = fixtures();
    subs.extend(fixtures.iter().cloned());
    let mut checks = 0usize;
    let mut bad = Vec::new();
    for s in &subs {
        assert!(s.inputs.len() >= 3, "{} has fewer than three input vectors", s.id);
        let expected = interpret_program(&s.load().unwrap(), &s.inputs);
        let mut variants = semantic_variants(s);
        if fixtures.iter().any(|f| f.id == s.id) {
            for kind in EditKind::ALL {
                if let Ok(a) = apply_edits(&s.load().unwrap(), kind, 2, ATTACK_SEED, &s.inputs) {
                    variants.push((kind.to_string(), a.ast));
                }
            }
        }
        for (name, v) in variants {
            checks += 1;
            if !agrees(&expected, reload(&v), &s.inputs) {
                bad.push(format!("{}/{name}", s.id));
            }
            let mut stages = Vec::new();
            let r = normalize_traced(Cpg::build(v), &NormalizationConfig::default(), |stage, cpg| stages.push((stage, reload(&cpg.ast))));
            if r.is_err() {
                bad.push(format!("{}/{name}: normalization failed", s.id));
            }
            for (i, (stage, a)) in stages.into_iter().enumerate() {
                checks += 1;
                if !agrees(&expected, a, &s.inputs) {
                    bad.push(format!("{}/{name}/{stage}#{i}", s.id));
                }
            }
        }
    }
    report(
        7,
        "semantics preservation",
        bad.is_empty(),
        format!("{} programs, {checks} output comparisons, mismatches {:?}", subs.len(), &bad[..bad.len().min(5)]),
    );
}

#[test]
fn criterion_8_idempotence() {
    let cfg = NormalizationConfig::default();
    let mut total = 0;
    let mut bad = Vec::new();
    let mut subs: Vec<Submission> = corpus().clone();
    subs.extend(fixtures());
    for s in &subs {
        for (name, v) in semantic_variants(s) {
            total += 1;
            let once = normalize(Cpg::build(v), &cfg).unwrap();
            let first = canonical(&once.ast);
            let twice = normalize(once, &cfg).unwrap();
            if canonical(&twice.ast) != first {
                bad.push(format!("{}/{name}", s.id));
            }
        }
    }
    report(8, "normalization idempotence", bad.is_empty(), format!("{}/{total} programs idempotent, failures {bad:?}", total - bad.len()));
}

fn brute_delta(x: &[f64], y: &[f64]) -> f64 {
    let mut s: i64 = 0;
    for a in x {
        for b in y {
            s += (a > b) as i64 - (a < b) as i64;
        }
    }
    s as f64 / (x.len() * y.len()) as f64
}

/// P(W+ >= observed) by walking all sign patterns.
fn enumerate_tail(ranks: &[f64], observed: f64) -> f64 {
    let n = ranks.len();
    let doubled: Vec<u64> = ranks.iter().map(|r| (r * 2.0).round() as u64).collect();
    let obs = (observed * 2.0).round() as u64;
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let w: u64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| doubled[i]).sum();
        hits += (w >= obs) as u64;
    }
    hits as f64 / (1u64 << n) as f64
}

fn w_plus(x: &[f64], y: &[f64]) -> (Vec<f64>, f64) {
    let (r, pos) = signed_ranks(x, y).unwrap();
    let w = r.iter().zip(&pos).filter(|(_, p)| **p).map(|(r, _)| r).sum();
    (r, w)
}

#[test]
fn criterion_9_statistical_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut delta_ok = 0;
    for _ in 0..100 {
        let nx = rng.gen_range(1..40);
        let ny = rng.gen_range(1..40);
        let x: Vec<f64> = (0..nx).map(|_| rng.gen_range(0..10) as f64 / 10.0).collect();
        let y: Vec<f64> = (0..ny).map(|_| rng.gen_range(0..10) as f64 / 10.0).collect();
        delta_ok += (delta(&x, &y).unwrap() == brute_delta(&x, &y)) as usize;
    }
    let mut exact_ok = 0;
    let mut exact_total = 0;
    for n in 5..=12 {
        for _ in 0..10 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64).collect();
            let (r, w) = w_plus(&x, &y);
            if r.len() < 5 || r.len() > 12 {
                continue;
            }
            exact_total += 1;
            exact_ok += (wilcoxon_signed_rank(&x, &y).unwrap() == enumerate_tail(&r, w)) as usize;
            exact_ok -= (exact_upper_tail(&r, w) != enumerate_tail(&r, w)) as usize;
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let x: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..1.0)).collect();
        let y: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..1.0)).collect();
        let (r, w) = w_plus(&x, &y);
        assert_eq!(r.len(), 20);
        worst = worst.max((wilcoxon_signed_rank(&x, &y).unwrap() - enumerate_tail(&r, w)).abs());
    }
    report(
        9,
        "statistical-kernel oracles",
        delta_ok == 100 && exact_ok == exact_total && exact_total > 0 && worst <= 0.01,
        format!("delta {delta_ok}/100 exact, Wilcoxon exact {exact_ok}/{exact_total}, n=20 approximation error {worst:.4}"),
    );
}

/// Repeatedly marks the first longest common run of unmarked tokens.
fn brute_tiling(a: &[u8], b: &[u8], min: usize) -> usize {
    let mut ma = vec![false; a.len()];
    let mut mb = vec![false; b.len()];
    let mut total = 0;
    loop {
        let mut best = (0, 0, 0);
        for i in 0..a.len() {
            for j in 0..b.len() {
                let mut k = 0;
                while i + k < a.len() && j + k < b.len() && !ma[i + k] && !mb[j + k] && a[i + k] == b[j + k] {
                    k += 1;
                }
                if k > best.2 {
                    best = (i, j, k);
                }
            }
        }
        if best.2 < min.max(1) {
            return total;
        }
        let (i, j, k) = best;
        ma[i..i + k].iter_mut().for_each(|m| *m = true);
        mb[j..j + k].iter_mut().for_each(|m| *m = true);
        total += k;
    }
}

#[test]
fn criterion_10_matcher_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ok = 0;
    for _ in 0..200 {
        let alphabet = rng.gen_range(2..5);
        let a: Vec<u8> = (0..rng.gen_range(0..=20)).map(|_| rng.gen_range(0..alphabet)).collect();
        let b: Vec<u8> = (0..rng.gen_range(0..=20)).map(|_| rng.gen_range(0..alphabet)).collect();
        let min = rng.gen_range(1..5);
        let tiles: usize = greedy_tiles(&a, &b, min).iter().map(|t| t.length).sum();
        ok += (tiles == brute_tiling(&a, &b, min)) as usize;
    }
    report(10, "matcher oracle", ok == 200, format!("{ok}/200 pairs match the brute-force tiling"));
}
