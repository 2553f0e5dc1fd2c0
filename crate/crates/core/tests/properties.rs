use proptest::prelude::*;

use cpgnorm::catalog::{normalize, NormalizationConfig};
use cpgnorm::compare::{greedy_tiles, similarity};
use cpgnorm::cpg::Cpg;
use cpgnorm::evalx::corpus::generate;
use cpgnorm::evalx::interpret_program;
use cpgnorm::evalx::stats::{cliffs_delta, delta, wilcoxon_signed_rank};
use cpgnorm::frontend::canon::canonical;
use cpgnorm::frontend::load;
use cpgnorm::frontend::printer::print_program;
use cpgnorm::frontend::SourceUnit;

fn tiles_disjoint(a: &[u8], b: &[u8], min: usize) -> bool {
    let t = greedy_tiles(a, b, min);
    let mut ma = vec![false; a.len()];
    let mut mb = vec![false; b.len()];
    for x in &t {
        if x.length < min || a[x.start_a..x.start_a + x.length] != b[x.start_b..x.start_b + x.length] {
            return false;
        }
        for k in 0..x.length {
            if ma[x.start_a + k] || mb[x.start_b + k] {
                return false;
            }
            ma[x.start_a + k] = true;
            mb[x.start_b + k] = true;
        }
    }
    true
}

proptest! {
    #[test]
    fn tiles_are_disjoint_exact_copies(a in prop::collection::vec(0u8..4, 0..30), b in prop::collection::vec(0u8..4, 0..30), min in 1usize..5) {
        prop_assert!(tiles_disjoint(&a, &b, min));
    }

    #[test]
    fn scores_are_bounded(a in prop::collection::vec(0u8..3, 0..25), b in prop::collection::vec(0u8..3, 0..25), min in 1usize..4) {
        let ab: usize = greedy_tiles(&a, &b, min).iter().map(|t| t.length).sum();
        let (avg, max) = similarity(ab, a.len(), b.len());
        prop_assert!(ab <= a.len().min(b.len()));
        prop_assert!((0.0..=1.0).contains(&avg) && (0.0..=1.0).contains(&max) && avg <= max);
    }

    #[test]
    fn delta_is_antisymmetric(x in prop::collection::vec(0u8..10, 1..30), y in prop::collection::vec(0u8..10, 1..30)) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let y: Vec<f64> = y.into_iter().map(f64::from).collect();
        prop_assert_eq!(delta(&x, &y).unwrap(), -delta(&y, &x).unwrap());
    }

    #[test]
    fn wilcoxon_p_in_unit_interval(d in prop::collection::vec(-5i8..6, 5..30)) {
        let x: Vec<f64> = d.iter().map(|v| f64::from(*v)).collect();
        let y = vec![0.0; x.len()];
        if let Ok(p) = wilcoxon_signed_rank(&x, &y) {
            prop_assert!(p > 0.0 && p <= 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn generated_programs_normalize_stably(seed in 0u64..10_000) {
        let s = &generate(1, seed)[0];
        let ast = s.load().unwrap();
        let expected = interpret_program(&ast, &s.inputs);
        prop_assert_eq!(&interpret_program(&ast, &s.inputs), &expected);
        let cfg = NormalizationConfig::default();
        let once = normalize(Cpg::build(ast), &cfg).unwrap();
        let units: Vec<SourceUnit> = print_program(&once.ast).into_iter().map(|(p, t)| SourceUnit::new(p, t)).collect();
        prop_assert_eq!(interpret_program(&load(&units).unwrap(), &s.inputs), expected);
        let first = canonical(&once.ast);
        prop_assert_eq!(canonical(&normalize(once, &cfg).unwrap().ast), first);
    }
}

#[test]
fn bootstrap_interval_brackets_delta() {
    let x: Vec<f64> = (0..30).map(|i| (i % 7) as f64).collect();
    let y: Vec<f64> = (0..25).map(|i| (i % 5) as f64).collect();
    let c = cliffs_delta(&x, &y).unwrap();
    assert!(c.ci.0 <= c.delta && c.delta <= c.ci.1, "{c:?}");
    assert_eq!(cliffs_delta(&x, &y).unwrap(), c);
}
