//! Brute-force cross-checks of the dependence layers on random methods.

use std::collections::{BTreeSet, HashSet};

use cpgnorm::cpg::ddg::{def_loc, use_loc};
use cpgnorm::cpg::{Cpg, MethodFlow};
use cpgnorm::frontend::ast::{Ast, NodeId};
use cpgnorm::frontend::load_str;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARS: [&str; 3] = ["a", "b", "c"];

fn expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    match rng.gen_range(0..if depth == 0 { 2 } else { 4 }) {
        0 => VARS[rng.gen_range(0..3)].to_string(),
        1 => rng.gen_range(0..9).to_string(),
        2 => format!("{} + {}", expr(rng, depth - 1), expr(rng, depth - 1)),
        _ => format!("{} * {}", expr(rng, depth - 1), expr(rng, depth - 1)),
    }
}

fn cond(rng: &mut ChaCha8Rng) -> String {
    let v = VARS[rng.gen_range(0..3)];
    match rng.gen_range(0..3) {
        0 => format!("{v} < {}", rng.gen_range(0..9)),
        1 => format!("{v} > {} && {} < 5", rng.gen_range(0..9), VARS[rng.gen_range(0..3)]),
        _ => format!("{v} == 1 || {v} == 2"),
    }
}

fn block(rng: &mut ChaCha8Rng, depth: u32, loops: bool, out: &mut String) {
    for _ in 0..rng.gen_range(1..4) {
        let v = VARS[rng.gen_range(0..3)];
        match rng.gen_range(0..if depth == 0 { 3 } else { 6 }) {
            0 => out.push_str(&format!("{v} = {};", expr(rng, 2))),
            1 => out.push_str(&format!("println({});", expr(rng, 1))),
            2 => out.push_str(&format!("{v}++;")),
            3 | 4 => {
                out.push_str(&format!("if ({}) {{", cond(rng)));
                block(rng, depth - 1, loops, out);
                out.push('}');
                if rng.gen_bool(0.5) {
                    out.push_str(" else {");
                    block(rng, depth - 1, loops, out);
                    out.push('}');
                }
            }
            _ if loops => {
                out.push_str(&format!("while ({}) {{", cond(rng)));
                block(rng, depth - 1, loops, out);
                out.push('}');
            }
            _ => {
                out.push_str("return;");
                return;
            }
        }
    }
}

fn program(seed: u64, loops: bool) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut body = String::from("int b = a + 1; int c = 0;");
    block(&mut rng, 3, loops, &mut body);
    format!("void f(int a) {{ {body} }}")
}

fn only_flow(cpg: &Cpg) -> &MethodFlow {
    cpg.eog.flows.values().next().unwrap()
}

/// Every maximal path, starting at the entry or at the head of an
/// unreachable region; the graph must be acyclic.
fn paths(flow: &MethodFlow) -> Vec<Vec<NodeId>> {
    fn walk(flow: &MethodFlow, n: NodeId, cur: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        cur.push(n);
        let mut last = true;
        for e in flow.successors(n) {
            last = false;
            walk(flow, e.dst, cur, out);
        }
        if last || flow.exits.contains(&n) {
            out.push(cur.clone());
        }
        cur.pop();
    }
    let preds = flow.predecessors();
    let mut out = Vec::new();
    for n in &flow.nodes {
        if *n == flow.entry || preds[n].is_empty() {
            walk(flow, *n, &mut Vec::new(), &mut out);
        }
    }
    out
}

fn path_pairs(ast: &Ast, flow: &MethodFlow) -> BTreeSet<(NodeId, NodeId)> {
    let mut pairs = BTreeSet::new();
    for p in paths(flow) {
        for (i, u) in p.iter().enumerate() {
            let Some(l) = use_loc(ast, *u) else { continue };
            if let Some(d) = p[..i].iter().rev().find(|d| def_loc(ast, **d).as_ref() == Some(&l)) {
                pairs.insert((*d, *u));
            }
        }
    }
    pairs
}

/// `y` post-dominates `x` iff every path from `x` to the exit meets `y`.
fn pdom(flow: &MethodFlow, x: NodeId, y: NodeId) -> bool {
    if x == y {
        return true;
    }
    let mut seen = HashSet::from([x]);
    let mut stack = vec![x];
    while let Some(n) = stack.pop() {
        if flow.exits.contains(&n) {
            return false;
        }
        for e in flow.successors(n) {
            if e.dst != y && seen.insert(e.dst) {
                stack.push(e.dst);
            }
        }
    }
    true
}

fn brute_cdg(flow: &MethodFlow) -> BTreeSet<(NodeId, NodeId, bool)> {
    let mut out = BTreeSet::new();
    for a in &flow.nodes {
        for e in flow.successors(*a) {
            let Some(label) = e.branch else { continue };
            for y in &flow.nodes {
                let strict = *y != *a && pdom(flow, *a, *y);
                if pdom(flow, e.dst, *y) && !strict {
                    out.insert((*a, *y, label));
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ddg_matches_path_enumeration(seed in any::<u64>()) {
        let src = program(seed, false);
        let cpg = Cpg::build(load_str(&src).unwrap());
        let flow = only_flow(&cpg);
        let got: BTreeSet<_> = cpg.data_dependencies(flow.entry).into_iter().collect();
        prop_assert_eq!(got, path_pairs(&cpg.ast, flow), "{}", src);
    }

    #[test]
    fn cdg_matches_brute_force_post_dominance(seed in any::<u64>()) {
        let src = program(seed, true);
        let cpg = Cpg::build(load_str(&src).unwrap());
        let flow = only_flow(&cpg);
        let got: BTreeSet<_> = cpg
            .control_dependence(flow.entry)
            .into_iter()
            .map(|e| (e.src, e.dst, e.label == "true"))
            .collect();
        prop_assert_eq!(got, brute_cdg(flow), "{}", src);
    }
}

#[test]
fn straight_line_graphs_have_no_control_dependence() {
    let cpg = Cpg::build(load_str("void f(int a) { int b = a; a = b * 2; println(a + b); }").unwrap());
    assert!(cpg.cdg.edges.is_empty());
    assert!(!cpg.ddg.pairs.is_empty());
}
