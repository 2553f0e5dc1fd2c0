//! Pairwise token-sequence comparison and similarity scores.
//!
//! `similarityAvg = 2 * matched / (lenA + lenB)` and
//! `similarityMax = matched / min(lenA, lenB)`; both are 0 when a side is
//! empty.

pub mod corpus;
mod gst;

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::frontend::ast::Span;
use crate::linearize::TokenSequence;

pub use gst::{greedy_tiles, Tile};

pub const DEFAULT_MIN_MATCH: usize = 9;

pub const CSV_HEADER: &str = "idA,idB,similarityAvg,similarityMax,matchedTokens,lenA,lenB";

pub fn match_sequences(a: &TokenSequence, b: &TokenSequence, min_match: usize) -> Vec<Tile> {
    greedy_tiles(&a.tokens, &b.tokens, min_match)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TileSpan {
    #[serde(flatten)]
    pub tile: Tile,
    pub span_a: Span,
    pub span_b: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComparisonResult {
    pub id_a: String,
    pub id_b: String,
    pub tiles: Vec<TileSpan>,
    pub similarity_avg: f64,
    pub similarity_max: f64,
    pub matched_tokens: usize,
    pub len_a: usize,
    pub len_b: usize,
}

pub fn similarity(matched: usize, len_a: usize, len_b: usize) -> (f64, f64) {
    if len_a == 0 || len_b == 0 {
        return (0.0, 0.0);
    }
    let avg = 2.0 * matched as f64 / (len_a + len_b) as f64;
    let max = matched as f64 / len_a.min(len_b) as f64;
    (avg, max)
}

fn cover(spans: &[Span], start: usize, len: usize) -> Span {
    spans[start..start + len].iter().copied().reduce(Span::cover).unwrap_or_default()
}

pub fn compare_pair(id_a: &str, a: &TokenSequence, id_b: &str, b: &TokenSequence, min_match: usize) -> ComparisonResult {
    let tiles = match_sequences(a, b, min_match);
    let matched = tiles.iter().map(|t| t.length).sum();
    let (similarity_avg, similarity_max) = similarity(matched, a.len(), b.len());
    let tiles = tiles
        .into_iter()
        .map(|tile| TileSpan {
            tile,
            span_a: cover(&a.spans, tile.start_a, tile.length),
            span_b: cover(&b.spans, tile.start_b, tile.length),
        })
        .collect();
    ComparisonResult {
        id_a: id_a.to_string(),
        id_b: id_b.to_string(),
        tiles,
        similarity_avg,
        similarity_max,
        matched_tokens: matched,
        len_a: a.len(),
        len_b: b.len(),
    }
}

/// Every unordered pair, sorted by descending `similarityAvg`, then ids.
pub fn compare_all(entries: &[(String, TokenSequence)], min_match: usize) -> Vec<ComparisonResult> {
    let pairs: Vec<(usize, usize)> = (0..entries.len()).flat_map(|i| (i + 1..entries.len()).map(move |j| (i, j))).collect();
    let mut out: Vec<ComparisonResult> = pairs
        .par_iter()
        .map(|&(i, j)| compare_pair(&entries[i].0, &entries[i].1, &entries[j].0, &entries[j].1, min_match))
        .collect();
    sort_results(&mut out);
    out
}

pub fn sort_results(results: &mut [ComparisonResult]) {
    results.sort_by(|x, y| {
        y.similarity_avg
            .total_cmp(&x.similarity_avg)
            .then_with(|| x.id_a.cmp(&y.id_a))
            .then_with(|| x.id_b.cmp(&y.id_b))
    });
}

pub fn write_csv<W: Write>(w: W, results: &[ComparisonResult]) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER.split(','))?;
    for r in results {
        out.write_record([
            r.id_a.clone(),
            r.id_b.clone(),
            r.similarity_avg.to_string(),
            r.similarity_max.to_string(),
            r.matched_tokens.to_string(),
            r.len_a.to_string(),
            r.len_b.to_string(),
        ])?;
    }
    out.flush()
}

pub fn to_json(results: &[ComparisonResult]) -> serde_json::Value {
    serde_json::json!({ "results": results })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearize::TokenKind;

    fn seq(ids: &[u8]) -> TokenSequence {
        TokenSequence {
            tokens: ids.iter().map(|i| TokenKind::from_id(*i).unwrap()).collect(),
            spans: vec![Span::default(); ids.len()],
        }
    }

    #[test]
    fn self_similarity_is_one() {
        let a = seq(&[1, 2, 3, 2, 4, 6, 7]);
        let r = compare_pair("a", &a, "b", &a, 3);
        assert_eq!(r.similarity_avg, 1.0);
        assert_eq!(r.similarity_max, 1.0);
    }

    #[test]
    fn symmetric_scores() {
        let a = seq(&[1, 2, 3, 2, 4, 2, 5, 4, 5, 6, 7]);
        let b = seq(&[1, 2, 2, 3, 2, 5, 5, 4, 4, 6, 7]);
        let ab = compare_pair("a", &a, "b", &b, 2);
        let ba = compare_pair("b", &b, "a", &a, 2);
        assert_eq!(ab.similarity_avg, ba.similarity_avg);
        assert_eq!(ab.matched_tokens, ba.matched_tokens);
    }

    #[test]
    fn corpus_rows_sorted_and_csv() {
        let entries = vec![
            ("x".to_string(), seq(&[1, 2, 3, 4, 5, 6, 7])),
            ("y".to_string(), seq(&[1, 2, 3, 4, 5, 6, 7])),
            ("z".to_string(), seq(&[8, 9])),
        ];
        let rows = compare_all(&entries, 3);
        assert_eq!(rows.len(), 3);
        assert_eq!((rows[0].id_a.as_str(), rows[0].id_b.as_str()), ("x", "y"));
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert!(text.contains("x,y,1,1,7,7,7"));
        let json = to_json(&rows);
        assert_eq!(json["results"][0]["similarityAvg"], 1.0);
        assert_eq!(json["results"][0]["tiles"][0]["startA"], 0);
    }
}
