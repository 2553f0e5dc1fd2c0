//! Greedy String Tiling.
//!
//! Each round finds the longest run of pairwise-equal unmarked tokens and
//! tiles every non-overlapping occurrence of that length, scanning start
//! pairs in `(a, b)` order. Rounds stop once the longest run is shorter
//! than the minimum match length.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tile {
    pub start_a: usize,
    pub start_b: usize,
    pub length: usize,
}

pub fn greedy_tiles<T: PartialEq>(a: &[T], b: &[T], min_match: usize) -> Vec<Tile> {
    let min_match = min_match.max(1);
    let (n, m) = (a.len(), b.len());
    let mut marked_a = vec![false; n];
    let mut marked_b = vec![false; m];
    let mut tiles = Vec::new();
    // run[i][j]: length of the unmarked common run starting at (i, j).
    let mut run = vec![0usize; (n + 1) * (m + 1)];
    let w = m + 1;
    loop {
        let mut longest = 0;
        for i in (0..n).rev() {
            for j in (0..m).rev() {
                let r = if !marked_a[i] && !marked_b[j] && a[i] == b[j] { run[(i + 1) * w + j + 1] + 1 } else { 0 };
                run[i * w + j] = r;
                longest = longest.max(r);
            }
        }
        if longest < min_match {
            break;
        }
        for i in 0..n {
            for j in 0..m {
                if run[i * w + j] < longest {
                    continue;
                }
                let free = (i..i + longest).all(|k| !marked_a[k]) && (j..j + longest).all(|k| !marked_b[k]);
                if free {
                    marked_a[i..i + longest].iter_mut().for_each(|x| *x = true);
                    marked_b[j..j + longest].iter_mut().for_each(|x| *x = true);
                    tiles.push(Tile { start_a: i, start_b: j, length: longest });
                }
            }
        }
    }
    tiles
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_sequences_single_tile() {
        let a = [1, 2, 3, 4, 5];
        assert_eq!(greedy_tiles(&a, &a, 3), vec![Tile { start_a: 0, start_b: 0, length: 5 }]);
    }

    #[test]
    fn below_threshold_ignored() {
        assert!(greedy_tiles(&[1, 2, 9, 3, 4], &[1, 2, 8, 3, 4], 3).is_empty());
        assert_eq!(greedy_tiles(&[1, 2, 9, 3, 4], &[1, 2, 8, 3, 4], 2).len(), 2);
    }

    #[test]
    fn longest_first_then_rest() {
        let a = [1, 2, 3, 7, 1, 2, 3, 4, 5];
        let b = [1, 2, 3, 4, 5, 0, 1, 2, 3];
        let t = greedy_tiles(&a, &b, 3);
        assert_eq!(t[0], Tile { start_a: 4, start_b: 0, length: 5 });
        assert_eq!(t[1], Tile { start_a: 0, start_b: 6, length: 3 });
    }

    #[test]
    fn empty_inputs() {
        assert!(greedy_tiles::<u8>(&[], &[1], 1).is_empty());
    }
}
