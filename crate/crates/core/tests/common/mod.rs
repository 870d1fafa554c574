//! Independent oracles shared by the integration suites. Nothing here calls
//! into the library's algorithms.

#![allow(dead_code)]

use std::collections::VecDeque;

use rand::Rng;

/// Driving and dependence powers as printed in the published MICMAC table,
/// rows x_1..x_26.
pub const PUBLISHED_POWERS: [(u32, u32); 26] = [
    (5, 1),
    (2, 1),
    (5, 1),
    (5, 1),
    (5, 1),
    (4, 5),
    (1, 2),
    (1, 15),
    (4, 1),
    (2, 7),
    (1, 6),
    (2, 1),
    (2, 2),
    (4, 3),
    (6, 2),
    (2, 3),
    (2, 4),
    (3, 6),
    (2, 1),
    (3, 1),
    (2, 1),
    (10, 1),
    (3, 3),
    (2, 4),
    (2, 1),
    (1, 7),
];

/// Published reachable sets (1-based factor numbers), rows x_1..x_26.
pub const PUBLISHED_REACHABLE: [&[usize]; 26] = [
    &[1, 6, 8, 10, 18],
    &[2, 11],
    &[3, 6, 8, 10, 18],
    &[4, 6, 8, 10, 18],
    &[5, 6, 8, 10, 18],
    &[6, 8, 10, 18],
    &[7],
    &[8],
    &[9, 23, 24, 26],
    &[8, 10],
    &[11],
    &[7, 12],
    &[8, 13],
    &[8, 11, 14, 17],
    &[8, 11, 14, 15, 16, 17],
    &[11, 16],
    &[8, 17],
    &[8, 10, 18],
    &[8, 19],
    &[8, 13, 20],
    &[21, 26],
    &[8, 11, 14, 15, 16, 17, 22, 23, 24, 26],
    &[23, 24, 26],
    &[24, 26],
    &[25, 26],
    &[26],
];

/// Published antecedent sets, rows x_1..x_26.
pub const PUBLISHED_ANTECEDENT: [&[usize]; 26] = [
    &[1],
    &[2],
    &[3],
    &[4],
    &[5],
    &[1, 3, 4, 5, 6],
    &[7, 12],
    &[1, 3, 4, 5, 6, 8, 10, 13, 14, 15, 17, 18, 19, 20, 22],
    &[9],
    &[1, 3, 4, 5, 6, 10, 18],
    &[2, 11, 14, 15, 16, 22],
    &[12],
    &[13, 20],
    &[14, 15, 22],
    &[15, 22],
    &[15, 16, 22],
    &[14, 15, 17, 22],
    &[1, 3, 4, 5, 6, 18],
    &[19],
    &[20],
    &[21],
    &[22],
    &[9, 22, 23],
    &[9, 22, 23, 24],
    &[25],
    &[9, 21, 22, 23, 24, 25, 26],
];

/// Level partition obtained by applying the removal rule by hand to the
/// published reachable/antecedent sets (1-based factor numbers).
pub const EXPECTED_LEVELS: [&[usize]; 5] = [
    &[7, 8, 11, 26],
    &[2, 10, 12, 13, 16, 17, 19, 21, 24, 25],
    &[14, 18, 20, 23],
    &[6, 9, 15],
    &[1, 3, 4, 5, 22],
];

pub fn code(one_based: usize) -> String {
    format!("x_{one_based}")
}

/// Reflexive path existence by breadth-first search from every node.
pub fn bfs_reachability(n: usize, edges: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let mut out = vec![vec![false; n]; n];
    for (src, row) in out.iter_mut().enumerate() {
        let mut queue = VecDeque::from([src]);
        row[src] = true;
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if edges[u][v] && !row[v] {
                    row[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    out
}

pub fn random_digraph(rng: &mut impl Rng, n: usize) -> Vec<Vec<bool>> {
    let density: f64 = rng.gen_range(0.0..0.5);
    (0..n)
        .map(|i| (0..n).map(|j| i != j && rng.gen_bool(density)).collect())
        .collect()
}

/// Random acyclic relation (edges only from lower to higher index before
/// relabeling), so the partition sees no cycles.
pub fn random_dag(rng: &mut impl Rng, n: usize) -> Vec<Vec<bool>> {
    let density: f64 = rng.gen_range(0.0..0.6);
    (0..n)
        .map(|i| (0..n).map(|j| i < j && rng.gen_bool(density)).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// `G + G^2 + ...` until the next term's largest entry drops below `eps`.
pub fn neumann_series(g: &[Vec<f64>], eps: f64, max_terms: usize) -> Vec<Vec<f64>> {
    let n = g.len();
    let mut sum = vec![vec![0.0; n]; n];
    let mut term = g.to_vec();
    for _ in 0..max_terms {
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += term[i][j];
            }
        }
        let largest = term.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if largest < eps {
            break;
        }
        term = mat_mul(&term, g);
    }
    sum
}

/// Random non-negative matrix, zero diagonal, rescaled so its largest row
/// sum equals `max_row_sum`.
pub fn random_normalized(rng: &mut impl Rng, n: usize, max_row_sum: f64) -> Vec<Vec<f64>> {
    let mut g: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j || rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..4.0) })
                .collect()
        })
        .collect();
    g[0][n - 1] += 1.0;
    let largest = g.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
    for v in g.iter_mut().flatten() {
        *v *= max_row_sum / largest;
    }
    g
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
