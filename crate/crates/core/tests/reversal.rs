mod common;

use std::collections::BTreeSet;

use common::{fixtures, reversals, PAIRING};
use cpgnorm::attack::EditKind;

#[test]
fn every_edit_kind_is_undone_on_the_fixtures() {
    let subs = fixtures();
    let mut bad = Vec::new();
    for (kind, ts) in PAIRING {
        let rs = reversals(&subs, kind);
        let applied: BTreeSet<&str> = rs.iter().filter(|r| r.equal.is_some()).map(|r| r.fixture.as_str()).collect();
        println!("{kind} ({}): applies to {applied:?}", ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("+"));
        for r in rs.iter().filter(|r| r.equal == Some(false)) {
            bad.push(format!("{} on {} seed {}\n{}", r.kind, r.fixture, r.seed, r.detail));
        }
        if applied.len() < 2 {
            bad.push(format!("{kind} applies to fewer than two fixtures"));
        }
    }
    for b in &bad {
        println!("{b}");
    }
    assert!(bad.is_empty(), "{} problems", bad.len());
}

#[test]
fn dead_statements_are_pruned() {
    let subs = fixtures();
    for kind in [EditKind::DeadStatement, EditKind::CopiedStatement] {
        let rs = reversals(&subs, kind);
        assert!(rs.iter().all(|r| r.equal == Some(true)), "{kind}: {}", rs.iter().map(|r| r.detail.as_str()).collect::<String>());
    }
}
