//! Interpretive structural modeling.
//!
//! Thresholds the total influence matrix into a binary adjacency, closes it
//! under Boolean arithmetic into the reachability matrix `M = (A + I)^k`,
//! then peels the factors into levels: a factor belongs to the current top
//! level when everything it still reaches also reaches it back.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::dematel::TotalInfluenceMatrix;
use crate::matrix::BoolMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsmError {
    #[error("lambda must be a non-negative number, got {0}")]
    InvalidLambda(f64),
    #[error("adjacency matrix has a self-loop at {0}")]
    SelfLoop(usize),
    #[error("reachability matrix is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("reachability matrix is not transitive: {from} -> {via} -> {to} but not {from} -> {to}")]
    NotTransitive { from: usize, via: usize, to: usize },
    #[error("partition stalled with {remaining} factors unassigned")]
    PartitionStalled { remaining: usize },
    #[error("level partition does not cover the {0} factors of the reachability matrix")]
    PartitionMismatch(usize),
}

/// Binary direct-influence relation, zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    entries: BoolMatrix,
    lambda: Option<f64>,
}

impl AdjacencyMatrix {
    pub fn new(entries: BoolMatrix) -> Result<Self, IsmError> {
        if let Some(i) = (0..entries.dim()).find(|&i| entries.get(i, i)) {
            return Err(IsmError::SelfLoop(i));
        }
        Ok(AdjacencyMatrix {
            entries,
            lambda: None,
        })
    }

    pub fn entries(&self) -> &BoolMatrix {
        &self.entries
    }

    /// Threshold used to derive this adjacency, if it was derived.
    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }
}

/// `a_ij = 1` iff `i != j` and `t_ij >= lambda`.
pub fn derive_adjacency(t: &TotalInfluenceMatrix, lambda: f64) -> Result<AdjacencyMatrix, IsmError> {
    if !(lambda >= 0.0) || lambda.is_infinite() {
        return Err(IsmError::InvalidLambda(lambda));
    }
    let m = t.entries();
    let n = m.dim();
    let mut entries = BoolMatrix::new(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && m[(i, j)] >= lambda {
                entries.set(i, j, true);
            }
        }
    }
    Ok(AdjacencyMatrix {
        entries,
        lambda: Some(lambda),
    })
}

/// Mean plus population standard deviation over all `n^2` cells of `T`.
pub fn suggested_lambda(t: &TotalInfluenceMatrix) -> f64 {
    let m = t.entries();
    let count = (m.dim() * m.dim()) as f64;
    if count == 0.0 {
        return 0.0;
    }
    let mean = m.iter().sum::<f64>() / count;
    let var = m.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
    mean + var.sqrt()
}

/// Reflexive-transitive closure of an adjacency relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityMatrix {
    entries: BoolMatrix,
    exponent: Option<usize>,
}

impl ReachabilityMatrix {
    /// Accepts a matrix that is already reflexive and transitive.
    pub fn from_matrix(entries: BoolMatrix) -> Result<Self, IsmError> {
        let n = entries.dim();
        if let Some(i) = (0..n).find(|&i| !entries.get(i, i)) {
            return Err(IsmError::NotReflexive(i));
        }
        for from in 0..n {
            for via in 0..n {
                if !entries.get(from, via) {
                    continue;
                }
                if let Some(to) = (0..n).find(|&to| entries.get(via, to) && !entries.get(from, to)) {
                    return Err(IsmError::NotTransitive { from, via, to });
                }
            }
        }
        Ok(ReachabilityMatrix {
            entries,
            exponent: None,
        })
    }

    pub fn entries(&self) -> &BoolMatrix {
        &self.entries
    }

    /// Least `k` with `(A + I)^k = (A + I)^(k+1)` for the adjacency `A` this
    /// closure was computed from; `None` when the matrix was supplied closed.
    pub fn exponent(&self) -> Option<usize> {
        self.exponent
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    #[inline]
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        self.entries.get(from, to)
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        ReachabilityMatrix {
            entries: self.entries.permuted(perm),
            exponent: self.exponent,
        }
    }
}

/// Closure by repeated Boolean squaring of `A + I` until a fixed point.
pub fn transitive_closure(a: &AdjacencyMatrix) -> ReachabilityMatrix {
    let base = a.entries().with_diagonal();
    let mut power = base.clone();
    loop {
        let squared = power.bool_mul(&power);
        if squared == power {
            break;
        }
        power = squared;
    }
    let exponent = fixed_point_exponent(&base);
    ReachabilityMatrix {
        entries: power,
        exponent: Some(exponent),
    }
}

/// Reflexive closure by Warshall's algorithm. Independent of the squaring
/// route; used as its cross-check.
pub fn warshall_closure(a: &BoolMatrix) -> BoolMatrix {
    let n = a.dim();
    let mut m = a.with_diagonal();
    for k in 0..n {
        for i in 0..n {
            if !m.get(i, k) {
                continue;
            }
            for j in 0..n {
                if m.get(k, j) {
                    m.set(i, j, true);
                }
            }
        }
    }
    m
}

// Multiplies out (A + I)^j one power at a time, as the fixed-point definition reads.
fn fixed_point_exponent(base: &BoolMatrix) -> usize {
    let mut power = base.clone();
    let mut k = 1;
    loop {
        let next = power.bool_mul(base);
        if next == power {
            return k;
        }
        power = next;
        k += 1;
    }
}

/// Reachable, antecedent and intersection sets of one factor, as catalog
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSets {
    pub reachable: BTreeSet<usize>,
    pub antecedent: BTreeSet<usize>,
    pub intersection: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilitySets {
    sets: Vec<FactorSets>,
}

impl ReachabilitySets {
    pub fn sets(&self) -> &[FactorSets] {
        &self.sets
    }

    pub fn get(&self, index: usize) -> &FactorSets {
        &self.sets[index]
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

pub fn reachability_sets(m: &ReachabilityMatrix) -> ReachabilitySets {
    let n = m.dim();
    let sets = (0..n)
        .map(|i| {
            let reachable: BTreeSet<usize> = (0..n).filter(|&j| m.reaches(i, j)).collect();
            let antecedent: BTreeSet<usize> = (0..n).filter(|&j| m.reaches(j, i)).collect();
            let intersection = reachable.intersection(&antecedent).copied().collect();
            FactorSets {
                reachable,
                antecedent,
                intersection,
            }
        })
        .collect();
    ReachabilitySets { sets }
}

/// Levels `L_1..L_m`; `L_1` is the surface, the last level the root causes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelPartition {
    levels: Vec<Vec<usize>>,
}

impl LevelPartition {
    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Zero-based level index of every factor.
    pub fn level_of(&self) -> Vec<usize> {
        let n = self.levels.iter().map(Vec::len).sum();
        let mut out = vec![usize::MAX; n];
        for (k, level) in self.levels.iter().enumerate() {
            for &f in level {
                if f < n {
                    out[f] = k;
                }
            }
        }
        out
    }
}

/// Repeatedly takes every remaining factor whose remaining reachable set is
/// contained in its remaining antecedent set (`R ∩ Q = R`), then removes
/// them.
pub fn partition_levels(sets: &ReachabilitySets) -> Result<LevelPartition, IsmError> {
    let n = sets.len();
    let mut remaining: BTreeSet<usize> = (0..n).collect();
    let mut levels = Vec::new();
    while !remaining.is_empty() {
        let level: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                let s = &sets.sets[i];
                s.reachable
                    .iter()
                    .filter(|j| remaining.contains(j))
                    .all(|j| s.antecedent.contains(j))
            })
            .collect();
        if level.is_empty() {
            return Err(IsmError::PartitionStalled {
                remaining: remaining.len(),
            });
        }
        for i in &level {
            remaining.remove(i);
        }
        levels.push(level);
    }
    Ok(LevelPartition { levels })
}

/// Groups of mutually reachable factors, ordered by smallest member.
pub fn condense(m: &ReachabilityMatrix) -> Vec<Vec<usize>> {
    let n = m.dim();
    let mut assigned = vec![false; n];
    let mut groups = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let group: Vec<usize> = (i..n)
            .filter(|&j| !assigned[j] && m.reaches(i, j) && m.reaches(j, i))
            .collect();
        for &j in &group {
            assigned[j] = true;
        }
        groups.push(group);
    }
    groups
}

/// Weakly connected components of the relation, ordered by smallest member.
pub fn regions(m: &ReachabilityMatrix) -> Vec<Vec<usize>> {
    let n = m.dim();
    let mut region = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if region[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        region[start] = id;
        while let Some(u) = queue.pop_front() {
            members.push(u);
            for v in 0..n {
                if region[v] == usize::MAX && (m.reaches(u, v) || m.reaches(v, u)) {
                    region[v] = id;
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonNode {
    /// Factor indices; more than one when the factors form a cycle.
    pub members: Vec<usize>,
    /// Zero-based level index.
    pub level: usize,
}

/// Minimal hierarchy digraph. Edges run between node indices from the
/// influencing node toward the influenced one, i.e. toward the surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonDigraph {
    pub nodes: Vec<SkeletonNode>,
    pub edges: Vec<(usize, usize)>,
}

impl SkeletonDigraph {
    /// Adjacency over factors: each cycle group becomes a ring and each
    /// skeleton edge links the groups' first members. Its closure equals
    /// the reachability matrix the skeleton came from.
    pub fn expanded_adjacency(&self, n: usize) -> AdjacencyMatrix {
        let mut entries = BoolMatrix::new(n);
        for node in &self.nodes {
            let k = node.members.len();
            if k > 1 {
                for w in 0..k {
                    entries.set(node.members[w], node.members[(w + 1) % k], true);
                }
            }
        }
        for &(a, b) in &self.edges {
            entries.set(self.nodes[a].members[0], self.nodes[b].members[0], true);
        }
        AdjacencyMatrix {
            entries,
            lambda: None,
        }
    }

    /// Node containing each factor.
    pub fn node_of(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (idx, node) in self.nodes.iter().enumerate() {
            for &f in &node.members {
                out[f] = idx;
            }
        }
        out
    }
}

/// Condenses cycles and keeps only the edges of the condensed order that
/// are not implied by a longer path.
pub fn skeleton(m: &ReachabilityMatrix, levels: &LevelPartition) -> Result<SkeletonDigraph, IsmError> {
    let n = m.dim();
    let level_of = levels.level_of();
    if level_of.len() != n || level_of.contains(&usize::MAX) {
        return Err(IsmError::PartitionMismatch(n));
    }
    let groups = condense(m);
    let nodes: Vec<SkeletonNode> = groups
        .into_iter()
        .map(|members| SkeletonNode {
            level: level_of[members[0]],
            members,
        })
        .collect();
    let rep: Vec<usize> = nodes.iter().map(|node| node.members[0]).collect();
    let c = nodes.len();
    let mut edges = Vec::new();
    for a in 0..c {
        for b in 0..c {
            if a == b || !m.reaches(rep[a], rep[b]) {
                continue;
            }
            let implied = (0..c).any(|mid| {
                mid != a && mid != b && m.reaches(rep[a], rep[mid]) && m.reaches(rep[mid], rep[b])
            });
            if !implied {
                edges.push((a, b));
            }
        }
    }
    Ok(SkeletonDigraph { nodes, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SquareMatrix;

    fn adj(n: usize, edges: &[(usize, usize)]) -> AdjacencyMatrix {
        AdjacencyMatrix::new(BoolMatrix::from_edges(n, edges)).unwrap()
    }

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn total(rows: &[&[f64]]) -> TotalInfluenceMatrix {
        TotalInfluenceMatrix::from_entries(SquareMatrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn threshold_cuts() {
        let t = total(&[&[0.0, 0.4], &[0.2, 0.0]]);
        let a = derive_adjacency(&t, 0.3).unwrap();
        assert_eq!(a.entries(), &BoolMatrix::from_edges(2, &[(0, 1)]));
        assert_eq!(a.lambda(), Some(0.3));
        let a = derive_adjacency(&t, 0.0).unwrap();
        assert_eq!(a.entries(), &BoolMatrix::from_edges(2, &[(0, 1), (1, 0)]));
        let a = derive_adjacency(&t, 0.41).unwrap();
        assert_eq!(a.entries().count_ones(), 0);
        assert!(derive_adjacency(&t, -1.0).is_err());
        assert!(derive_adjacency(&t, f64::NAN).is_err());
    }

    #[test]
    fn diagonal_never_thresholded_in() {
        let t = total(&[&[0.9, 0.1], &[0.1, 0.9]]);
        let a = derive_adjacency(&t, 0.5).unwrap();
        assert_eq!(a.entries().count_ones(), 0);
    }

    #[test]
    fn suggested_lambda_is_mean_plus_std() {
        // cells 0, 1, 1, 2: mean 1, population variance 0.5
        let t = total(&[&[0.0, 1.0], &[1.0, 2.0]]);
        assert!((suggested_lambda(&t) - (1.0 + 0.5f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn self_loop_rejected() {
        assert_eq!(
            AdjacencyMatrix::new(BoolMatrix::identity(2)),
            Err(IsmError::SelfLoop(0))
        );
    }

    #[test]
    fn empty_relation_closes_to_identity() {
        let m = transitive_closure(&adj(3, &[]));
        assert_eq!(m.entries(), &BoolMatrix::identity(3));
        assert_eq!(m.exponent(), Some(1));
    }

    #[test]
    fn chain_closure_and_exponent() {
        let m = transitive_closure(&adj(4, &[(0, 1), (1, 2), (2, 3)]));
        let sets = reachability_sets(&m);
        assert_eq!(sets.get(0).reachable, set(&[0, 1, 2, 3]));
        assert_eq!(sets.get(1).reachable, set(&[1, 2, 3]));
        assert_eq!(sets.get(2).reachable, set(&[2, 3]));
        assert_eq!(sets.get(3).reachable, set(&[3]));
        assert_eq!(m.exponent(), Some(3));
        assert_eq!(m.entries(), &warshall_closure(&BoolMatrix::from_edges(4, &[(0, 1), (1, 2), (2, 3)])));
    }

    #[test]
    fn from_matrix_checks_invariants() {
        assert_eq!(
            ReachabilityMatrix::from_matrix(BoolMatrix::new(2)),
            Err(IsmError::NotReflexive(0))
        );
        let bad = BoolMatrix::from_u8_rows(&[[1, 1, 0], [0, 1, 1], [0, 0, 1]]).unwrap();
        assert!(matches!(
            ReachabilityMatrix::from_matrix(bad),
            Err(IsmError::NotTransitive { from: 0, via: 1, to: 2 })
        ));
        let good = BoolMatrix::from_u8_rows(&[[1, 1, 1], [0, 1, 1], [0, 0, 1]]).unwrap();
        assert_eq!(ReachabilityMatrix::from_matrix(good).unwrap().exponent(), None);
    }

    #[test]
    fn identity_sets_are_singletons() {
        let m = ReachabilityMatrix::from_matrix(BoolMatrix::identity(3)).unwrap();
        let sets = reachability_sets(&m);
        for i in 0..3 {
            let s = sets.get(i);
            assert_eq!(s.reachable, set(&[i]));
            assert_eq!(s.antecedent, set(&[i]));
            assert_eq!(s.intersection, set(&[i]));
        }
        let levels = partition_levels(&sets).unwrap();
        assert_eq!(levels.levels(), &[vec![0, 1, 2]]);
        let sk = skeleton(&m, &levels).unwrap();
        assert!(sk.edges.is_empty());
    }

    #[test]
    fn chain_levels_sinks_first() {
        let m = transitive_closure(&adj(3, &[(0, 1), (1, 2)]));
        let levels = partition_levels(&reachability_sets(&m)).unwrap();
        assert_eq!(levels.levels(), &[vec![2], vec![1], vec![0]]);
        let sk = skeleton(&m, &levels).unwrap();
        assert_eq!(sk.edges, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn diamond_reduction() {
        // a=0, b=1, c=2, d=3 with the redundant a->d
        let m = transitive_closure(&adj(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]));
        let levels = partition_levels(&reachability_sets(&m)).unwrap();
        let sk = skeleton(&m, &levels).unwrap();
        assert_eq!(sk.edges, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn cycle_is_condensed() {
        // 0 <-> 1 -> 2
        let m = transitive_closure(&adj(3, &[(0, 1), (1, 0), (1, 2)]));
        assert_eq!(condense(&m), vec![vec![0, 1], vec![2]]);
        let levels = partition_levels(&reachability_sets(&m)).unwrap();
        assert_eq!(levels.levels(), &[vec![2], vec![0, 1]]);
        let sk = skeleton(&m, &levels).unwrap();
        assert_eq!(sk.nodes.len(), 2);
        assert_eq!(sk.edges, vec![(0, 1)]);
        assert_eq!(transitive_closure(&sk.expanded_adjacency(3)), m);
    }

    #[test]
    fn stalled_partition_detected() {
        // sets that do not come from a closure: 0 reaches 1 without 1 reaching back,
        // and 1 reaches 0 without 0 reaching back
        let sets = ReachabilitySets {
            sets: vec![
                FactorSets {
                    reachable: set(&[0, 1]),
                    antecedent: set(&[0]),
                    intersection: set(&[0]),
                },
                FactorSets {
                    reachable: set(&[0, 1]),
                    antecedent: set(&[1]),
                    intersection: set(&[1]),
                },
            ],
        };
        assert_eq!(
            partition_levels(&sets),
            Err(IsmError::PartitionStalled { remaining: 2 })
        );
    }

    #[test]
    fn regions_are_weak_components() {
        let m = transitive_closure(&adj(5, &[(0, 1), (2, 1), (3, 4)]));
        assert_eq!(regions(&m), vec![vec![0, 1, 2], vec![3, 4]]);
    }

    #[test]
    fn skeleton_rejects_foreign_partition() {
        let m = ReachabilityMatrix::from_matrix(BoolMatrix::identity(3)).unwrap();
        let levels = partition_levels(&reachability_sets(
            &ReachabilityMatrix::from_matrix(BoolMatrix::identity(2)).unwrap(),
        ))
        .unwrap();
        assert!(skeleton(&m, &levels).is_err());
    }
}
