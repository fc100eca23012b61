//! Biregular bipartite factor graphs of the classical seed code.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param, Error, Result};

/// Restarts allowed before `sample_biregular` gives up.
pub const SAMPLE_RETRY_CAP: usize = 1000;

/// Default number of subsets `expansion_profile` may enumerate.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 20_000_000;

/// Bipartite graph `G = (A ∪ B, E)` with left vertices `A` (bits of the
/// classical code) and right vertices `B` (its checks).
///
/// `d_a` and `d_b` are the maximum left and right degrees; for graphs
/// from [`sample_biregular`] every degree equals them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_a: usize,
    n_b: usize,
    d_a: usize,
    d_b: usize,
    adj_a: Vec<Vec<usize>>,
    adj_b: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl BipartiteGraph {
    /// Builds a graph from left adjacency lists. Lists are sorted; entries
    /// must lie in `0..n_b`. Multi-edges are kept so that
    /// [`check_biregular`] can reject them.
    pub fn from_left_adjacency(n_b: usize, adj_a: Vec<Vec<usize>>) -> Result<Self> {
        let mut adj_a = adj_a;
        let mut adj_b = vec![Vec::new(); n_b];
        for (a, nbrs) in adj_a.iter_mut().enumerate() {
            nbrs.sort_unstable();
            for &b in nbrs.iter() {
                if b >= n_b {
                    return Err(param(format!("neighbor {b} of left vertex {a} >= n_B={n_b}")));
                }
                adj_b[b].push(a);
            }
        }
        let d_a = adj_a.iter().map(Vec::len).max().unwrap_or(0);
        let d_b = adj_b.iter().map(Vec::len).max().unwrap_or(0);
        Ok(BipartiteGraph {
            n_a: adj_a.len(),
            n_b,
            d_a,
            d_b,
            adj_a,
            adj_b,
        })
    }

    /// Graph whose biadjacency is the parity-check matrix `h` (rows are
    /// right vertices, columns left vertices).
    pub fn from_parity_check(h: &[Vec<u8>]) -> Result<Self> {
        let n_b = h.len();
        let n_a = h.first().map_or(0, Vec::len);
        let mut adj_a = vec![Vec::new(); n_a];
        for (b, row) in h.iter().enumerate() {
            if row.len() != n_a {
                return Err(param("ragged parity-check matrix"));
            }
            for (a, &x) in row.iter().enumerate() {
                if x & 1 == 1 {
                    adj_a[a].push(b);
                }
            }
        }
        Self::from_left_adjacency(n_b, adj_a)
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }
    pub fn n_b(&self) -> usize {
        self.n_b
    }
    pub fn d_a(&self) -> usize {
        self.d_a
    }
    pub fn d_b(&self) -> usize {
        self.d_b
    }
    pub fn edge_count(&self) -> usize {
        self.adj_a.iter().map(Vec::len).sum()
    }
    pub fn left_neighbors(&self, a: usize) -> &[usize] {
        &self.adj_a[a]
    }
    pub fn right_neighbors(&self, b: usize) -> &[usize] {
        &self.adj_b[b]
    }
    pub fn neighbors(&self, side: Side, v: usize) -> &[usize] {
        match side {
            Side::Left => &self.adj_a[v],
            Side::Right => &self.adj_b[v],
        }
    }

    /// Dense parity-check matrix `H` (`n_b × n_a`).
    pub fn parity_check_rows(&self) -> Vec<Vec<usize>> {
        self.adj_b.clone()
    }

    /// Text format: header `n_A n_B d_A d_B`, then one line per left vertex.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {} {}\n", self.n_a, self.n_b, self.d_a, self.d_b);
        for nbrs in &self.adj_a {
            let line: Vec<String> = nbrs.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let nums = parse_usizes(header)?;
        let [n_a, n_b, d_a, d_b] = nums[..] else {
            return Err(Error::Parse(format!("bad graph header `{header}`")));
        };
        let mut adj_a = Vec::with_capacity(n_a);
        for _ in 0..n_a {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("graph file truncated".into()))?;
            adj_a.push(parse_usizes(line)?);
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse("trailing data after adjacency lists".into()));
        }
        let g = Self::from_left_adjacency(n_b, adj_a)?;
        if g.d_a != d_a || g.d_b != d_b {
            return Err(Error::Parse(format!(
                "header degrees ({d_a}, {d_b}) disagree with adjacency ({}, {})",
                g.d_a, g.d_b
            )));
        }
        Ok(g)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_usizes(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("not an index: `{t}`")))
        })
        .collect()
}

/// Samples a simple `(d_a, d_b)`-biregular graph with `n_a` left vertices.
///
/// Configuration model: left stubs are matched to right stubs uniformly at
/// random, except that a stub whose vertex is already adjacent is never
/// chosen; a dead end restarts the whole matching.
pub fn sample_biregular(n_a: usize, d_a: usize, d_b: usize, seed: u64) -> Result<BipartiteGraph> {
    if n_a == 0 || d_a == 0 || d_b == 0 {
        return Err(param("n_A, d_A and d_B must be positive"));
    }
    if !(d_a * n_a).is_multiple_of(d_b) {
        return Err(param(format!("d_B={d_b} does not divide d_A·n_A={}", d_a * n_a)));
    }
    let n_b = d_a * n_a / d_b;
    if n_b < d_a {
        return Err(param(format!("n_B={n_b} < d_A={d_a}: no simple graph exists")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLE_RETRY_CAP {
        if let Some(adj_a) = try_match(n_a, n_b, d_a, d_b, &mut rng) {
            return BipartiteGraph::from_left_adjacency(n_b, adj_a);
        }
    }
    Err(Error::SamplingFailure {
        attempts: SAMPLE_RETRY_CAP,
    })
}

fn try_match(
    n_a: usize,
    n_b: usize,
    d_a: usize,
    d_b: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<usize>>> {
    let mut pool: Vec<usize> = (0..n_b).flat_map(|b| std::iter::repeat_n(b, d_b)).collect();
    pool.shuffle(rng);
    let mut adj_a = vec![Vec::with_capacity(d_a); n_a];
    for nbrs in adj_a.iter_mut() {
        for _ in 0..d_a {
            let mut pick = None;
            for _ in 0..8 {
                let i = rng.random_range(0..pool.len());
                if !nbrs.contains(&pool[i]) {
                    pick = Some(i);
                    break;
                }
            }
            if pick.is_none() {
                let valid: Vec<usize> = (0..pool.len())
                    .filter(|&i| !nbrs.contains(&pool[i]))
                    .collect();
                if valid.is_empty() {
                    return None;
                }
                pick = Some(valid[rng.random_range(0..valid.len())]);
            }
            nbrs.push(pool.swap_remove(pick.expect("picked")));
        }
    }
    Some(adj_a)
}

/// True iff every left degree is `d_a`, every right degree `d_b`, there are
/// no multi-edges, and both adjacency views describe the same edge set.
pub fn check_biregular(g: &BipartiteGraph) -> bool {
    if g.adj_a.len() != g.n_a || g.adj_b.len() != g.n_b || g.d_a * g.n_a != g.d_b * g.n_b {
        return false;
    }
    let simple = |lists: &[Vec<usize>], deg: usize, bound: usize| {
        lists.iter().all(|l| {
            l.len() == deg && l.windows(2).all(|w| w[0] < w[1]) && l.iter().all(|&x| x < bound)
        })
    };
    if !simple(&g.adj_a, g.d_a, g.n_b) || !simple(&g.adj_b, g.d_b, g.n_a) {
        return false;
    }
    g.adj_a
        .iter()
        .enumerate()
        .all(|(a, nbrs)| nbrs.iter().all(|&b| g.adj_b[b].binary_search(&a).is_ok()))
}

/// Exhaustive table `s ↦ min_{|S|=s} |Γ(S)|` for `s = 1..=max_subset_size`
/// on the given side. Exponential; only meant as a test oracle.
pub fn expansion_profile(
    g: &BipartiteGraph,
    side: Side,
    max_subset_size: usize,
) -> Result<Vec<(usize, usize)>> {
    expansion_profile_with_budget(g, side, max_subset_size, DEFAULT_ENUMERATION_BUDGET)
}

pub fn expansion_profile_with_budget(
    g: &BipartiteGraph,
    side: Side,
    max_subset_size: usize,
    budget: u64,
) -> Result<Vec<(usize, usize)>> {
    let (n, m) = match side {
        Side::Left => (g.n_a, g.n_b),
        Side::Right => (g.n_b, g.n_a),
    };
    let max_s = max_subset_size.min(n);
    let total: u64 = (1..=max_s).map(|s| binomial(n as u64, s as u64)).sum();
    if total > budget {
        return Err(Error::Budget(format!(
            "{total} subsets for s <= {max_s} exceeds budget {budget}"
        )));
    }
    let mut best = vec![usize::MAX; max_s + 1];
    let mut counts = vec![0u32; m];
    let mut covered = 0usize;
    enumerate_subsets(g, side, n, max_s, 0, 0, &mut counts, &mut covered, &mut best);
    Ok((1..=max_s).map(|s| (s, best[s])).collect())
}

#[allow(clippy::too_many_arguments)]
fn enumerate_subsets(
    g: &BipartiteGraph,
    side: Side,
    n: usize,
    max_s: usize,
    start: usize,
    size: usize,
    counts: &mut [u32],
    covered: &mut usize,
    best: &mut [usize],
) {
    if size > 0 && *covered < best[size] {
        best[size] = *covered;
    }
    if size == max_s {
        return;
    }
    for v in start..n {
        for &u in g.neighbors(side, v) {
            if counts[u] == 0 {
                *covered += 1;
            }
            counts[u] += 1;
        }
        enumerate_subsets(g, side, n, max_s, v + 1, size + 1, counts, covered, best);
        for &u in g.neighbors(side, v) {
            counts[u] -= 1;
            if counts[u] == 0 {
                *covered -= 1;
            }
        }
    }
}

/// Checks `min|Γ(S)| ≥ (1−δ)·d·|S|` for every tabulated `s ≤ γ·n`.
pub fn satisfies_expansion(
    g: &BipartiteGraph,
    side: Side,
    profile: &[(usize, usize)],
    gamma: f64,
    delta: f64,
) -> bool {
    let (n, d) = match side {
        Side::Left => (g.n_a, g.d_a),
        Side::Right => (g.n_b, g.d_b),
    };
    profile
        .iter()
        .filter(|(s, _)| (*s as f64) <= gamma * n as f64)
        .all(|&(s, min)| min as f64 >= (1.0 - delta) * (d * s) as f64)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sample_60_5_10() {
        let g = sample_biregular(60, 5, 10, 1).unwrap();
        assert_eq!(g.n_b(), 30);
        assert_eq!(g.edge_count(), 300);
        assert!(check_biregular(&g));
    }

    #[test]
    fn degree_one_is_perfect_matching() {
        let g = sample_biregular(2, 1, 1, 0).unwrap();
        assert_eq!(g.n_b(), 2);
        assert!(check_biregular(&g));
        let mut hit: Vec<usize> = (0..2).map(|a| g.left_neighbors(a)[0]).collect();
        hit.sort();
        assert_eq!(hit, vec![0, 1]);
    }

    #[test]
    fn full_right_degree_forces_complete_graph() {
        let g = sample_biregular(3, 2, 3, 0).unwrap();
        assert_eq!(g.n_b(), 2);
        for b in 0..2 {
            assert_eq!(g.right_neighbors(b), &[0, 1, 2]);
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(sample_biregular(3, 1, 2, 0), Err(Error::Parameter(_))));
        assert!(matches!(sample_biregular(4, 3, 6, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn check_rejects_deleted_and_duplicated_edges() {
        let g = sample_biregular(12, 3, 6, 4).unwrap();
        let mut adj: Vec<Vec<usize>> = (0..12).map(|a| g.left_neighbors(a).to_vec()).collect();
        let mut deleted = adj.clone();
        deleted[0].pop();
        assert!(!check_biregular(&BipartiteGraph::from_left_adjacency(6, deleted).unwrap()));
        let first = adj[0][0];
        adj[0][1] = first;
        assert!(!check_biregular(&BipartiteGraph::from_left_adjacency(6, adj).unwrap()));
    }

    #[test]
    fn text_round_trip() {
        let g = sample_biregular(20, 5, 10, 9).unwrap();
        let text = g.to_text();
        assert!(text.starts_with("20 10 5 10\n"));
        assert_eq!(BipartiteGraph::from_text(&text).unwrap(), g);
        assert!(BipartiteGraph::from_text("2 1 1 2\n0\n").is_err());
    }

    #[test]
    fn matching_profile() {
        let g = sample_biregular(2, 1, 1, 0).unwrap();
        let p = expansion_profile(&g, Side::Left, 1).unwrap();
        assert_eq!(p, vec![(1, 1)]);
        assert!(satisfies_expansion(&g, Side::Left, &p, 1.0, 0.0));
    }

    #[test]
    fn complete_graph_profile_caps_expansion() {
        let g = sample_biregular(3, 2, 3, 0).unwrap();
        let p = expansion_profile(&g, Side::Left, 2).unwrap();
        assert_eq!(p[1], (2, 2));
        assert!(!satisfies_expansion(&g, Side::Left, &p, 1.0, 0.0));
    }

    #[test]
    fn budget_error() {
        let g = sample_biregular(60, 5, 10, 1).unwrap();
        assert!(matches!(
            expansion_profile_with_budget(&g, Side::Left, 6, 1000),
            Err(Error::Budget(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sampled_graphs_are_biregular_and_deterministic(half in 5usize..30, seed in any::<u64>()) {
            let n_a = 2 * half;
            let g = sample_biregular(n_a, 5, 10, seed).unwrap();
            prop_assert!(check_biregular(&g));
            prop_assert_eq!(&g, &sample_biregular(n_a, 5, 10, seed).unwrap());
        }

        #[test]
        fn profile_monotone_and_bounded(seed in any::<u64>()) {
            let g = sample_biregular(16, 3, 6, seed).unwrap();
            let p = expansion_profile(&g, Side::Left, 4).unwrap();
            for w in p.windows(2) {
                prop_assert!(w[0].1 <= w[1].1);
            }
            for &(s, min) in &p {
                prop_assert!(min <= (3 * s).min(g.n_b()));
            }
        }
    }
}
