//! The syndrome adjacency graph and exhaustive connected-set searches over it.

use std::ops::ControlFlow;

use crate::bitset::BitSet;
use crate::code::CssCode;

/// Default vertex cap for the exponential searches.
pub const DEFAULT_SEARCH_CAP: usize = 12;

/// Vertices `0..n` are qubits and `n..n + |C_X|` are checks. A check is
/// adjacent to the qubits in its support; two qubits are adjacent when some
/// row of `H_X` or `H_Z` contains both.
#[derive(Clone, Debug)]
pub struct SyndromeAdjacencyGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    max_degree: usize,
}

/// `d = d_B(d_B + 2d_A − 1)`.
pub fn degree_bound(d_a: usize, d_b: usize) -> usize {
    d_b * (d_b + 2 * d_a - 1)
}

pub fn build_syndrome_graph(code: &CssCode) -> SyndromeAdjacencyGraph {
    let n = code.n();
    let m = code.num_checks();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + m];
    for c in 0..m {
        for &v in code.check_support(c) {
            adj[v].push(n + c);
            adj[n + c].push(v);
        }
    }
    let rows = (0..m)
        .map(|c| code.check_support(c))
        .chain((0..code.num_generators()).map(|g| code.generator_support(g)));
    for row in rows {
        for &u in row {
            for &v in row {
                if u != v {
                    adj[u].push(v);
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
    debug_assert!(max_degree <= degree_bound(code.d_a(), code.d_b()));
    SyndromeAdjacencyGraph { n, adj, max_degree }
}

impl SyndromeAdjacencyGraph {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn is_qubit(&self, u: usize) -> bool {
        u < self.n
    }

    pub fn check_vertex(&self, c: usize) -> usize {
        self.n + c
    }

    /// Embeds a qubit set and a check set as one vertex set.
    pub fn vertex_set(&self, qubits: &BitSet, checks: &BitSet) -> BitSet {
        assert_eq!(qubits.len(), self.n, "qubit set width mismatch");
        assert_eq!(checks.len(), self.adj.len() - self.n, "check set width mismatch");
        let mut x = BitSet::new(self.adj.len());
        for v in qubits {
            x.insert(v);
        }
        for c in checks {
            x.insert(self.n + c);
        }
        x
    }

    /// Splits a vertex set back into its qubit and check parts.
    pub fn split(&self, x: &BitSet) -> (BitSet, BitSet) {
        let mut q = BitSet::new(self.n);
        let mut c = BitSet::new(self.adj.len() - self.n);
        for u in x {
            if u < self.n {
                q.insert(u);
            } else {
                c.insert(u - self.n);
            }
        }
        (q, c)
    }

    /// Open neighborhood `Γ(X)` in the graph.
    pub fn neighborhood(&self, x: &BitSet) -> BitSet {
        let mut out = BitSet::new(self.adj.len());
        for u in x {
            for &w in &self.adj[u] {
                out.insert(w);
            }
        }
        out
    }
}

/// Connected components of the subgraph induced on `x`, each sorted, ordered
/// by smallest vertex.
pub fn connected_components(g: &SyndromeAdjacencyGraph, x: &BitSet) -> Vec<Vec<usize>> {
    assert_eq!(x.len(), g.num_vertices(), "vertex set width mismatch");
    let mut seen = BitSet::new(x.len());
    let mut out = Vec::new();
    for start in x {
        if seen.contains(start) {
            continue;
        }
        seen.insert(start);
        let mut comp = vec![start];
        let mut head = 0;
        while head < comp.len() {
            let u = comp[head];
            head += 1;
            for &w in g.neighbors(u) {
                if x.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Enumerates every connected vertex set `X` with `root ⊆ X`, `|X| ≤ cap`,
/// whose other vertices satisfy `allowed`, exactly once each (ESU
/// enumeration with `root` contracted to a single vertex). `root` itself must
/// be connected or the search only grows from it as given.
pub(crate) fn for_each_connected_superset<A, V>(
    g: &SyndromeAdjacencyGraph,
    root: &[usize],
    cap: usize,
    allowed: A,
    mut visit: V,
) -> ControlFlow<()>
where
    A: Fn(usize) -> bool,
    V: FnMut(&[usize]) -> ControlFlow<()>,
{
    if root.len() > cap {
        return ControlFlow::Continue(());
    }
    let nv = g.num_vertices();
    let mut state = Esu {
        g,
        cap,
        in_sub: BitSet::new(nv),
        // Number of subgraph vertices adjacent to each vertex.
        touch: vec![0u32; nv],
        sub: Vec::with_capacity(cap),
    };
    for &r in root {
        state.push(r);
    }
    let mut ext: Vec<usize> = Vec::new();
    for &r in root {
        for &w in g.neighbors(r) {
            if !state.in_sub.contains(w) && allowed(w) && !ext.contains(&w) {
                ext.push(w);
            }
        }
    }
    ext.sort_unstable();
    state.extend(ext, &allowed, &mut visit)
}

struct Esu<'g> {
    g: &'g SyndromeAdjacencyGraph,
    cap: usize,
    in_sub: BitSet,
    touch: Vec<u32>,
    sub: Vec<usize>,
}

impl Esu<'_> {
    fn push(&mut self, w: usize) {
        self.in_sub.insert(w);
        self.sub.push(w);
        for &u in self.g.neighbors(w) {
            self.touch[u] += 1;
        }
    }

    fn pop(&mut self) {
        let w = self.sub.pop().expect("nonempty");
        self.in_sub.remove(w);
        for &u in self.g.neighbors(w) {
            self.touch[u] -= 1;
        }
    }

    fn extend<A, V>(&mut self, mut ext: Vec<usize>, allowed: &A, visit: &mut V) -> ControlFlow<()>
    where
        A: Fn(usize) -> bool,
        V: FnMut(&[usize]) -> ControlFlow<()>,
    {
        visit(&self.sub)?;
        if self.sub.len() == self.cap {
            return ControlFlow::Continue(());
        }
        while let Some(w) = ext.pop() {
            // Exclusive neighbors of w: outside the subgraph and not adjacent
            // to it.
            let mut next = ext.clone();
            for &u in self.g.neighbors(w) {
                if allowed(u) && !self.in_sub.contains(u) && self.touch[u] == 0 && !next.contains(&u) {
                    next.push(u);
                }
            }
            self.push(w);
            let flow = self.extend(next, allowed, visit);
            self.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Result of a capped exhaustive search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxConn {
    Exact(usize),
    /// A qualifying set of exactly the cap size exists; larger ones were not
    /// searched.
    AtLeast(usize),
}

impl MaxConn {
    pub fn lower_bound(self) -> usize {
        match self {
            MaxConn::Exact(k) | MaxConn::AtLeast(k) => k,
        }
    }
}

/// `max{|X| : X connected, |X ∩ E| ≥ α|X|}` over sets of at most `cap`
/// vertices. `e` is a vertex set of the graph and `α ∈ (0, 1]`.
pub fn max_conn_alpha(g: &SyndromeAdjacencyGraph, e: &BitSet, alpha: f64, cap: usize) -> MaxConn {
    assert_eq!(e.len(), g.num_vertices(), "vertex set width mismatch");
    assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    // Every qualifying set meets E. Order E vertices first so each set is
    // enumerated once, from its smallest E vertex.
    let rank = |u: usize| if e.contains(u) { u } else { g.num_vertices() + u };
    let mut best = 0usize;
    for r in e {
        let _ = for_each_connected_superset(g, &[r], cap, |u| rank(u) > r, |x| {
            let hits = x.iter().filter(|&&u| e.contains(u)).count();
            if hits as f64 >= alpha * x.len() as f64 - 1e-12 {
                best = best.max(x.len());
            }
            if best == cap {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if best == cap {
            return MaxConn::AtLeast(cap);
        }
    }
    MaxConn::Exact(best)
}

/// A qubit set `W ⊇ S` whose components in the graph each meet `S`, with
/// `|W| ≤ c·|D ∩ Γ_X(W)|`, of at most `cap` qubits. Returns the first one
/// found, smallest sizes first.
pub fn find_witness(
    g: &SyndromeAdjacencyGraph,
    code: &CssCode,
    s: &BitSet,
    d: &BitSet,
    c: f64,
    cap: usize,
) -> Option<BitSet> {
    assert_eq!(s.len(), code.n(), "qubit set width mismatch");
    assert_eq!(d.len(), code.num_checks(), "check set width mismatch");
    if s.is_empty() {
        return Some(s.clone());
    }
    let root = s.to_indices();
    let nq = g.num_qubits();
    let score = |w: &[usize]| {
        let mut hit = BitSet::new(code.num_checks());
        for &v in w {
            for &ch in code.qubit_checks(v) {
                if d.contains(ch) {
                    hit.insert(ch);
                }
            }
        }
        w.len() as f64 <= c * hit.weight() as f64 + 1e-12
    };
    // Components of S can join through W, so the search grows from all of S
    // at once; W is connected to S exactly when each component meets S.
    let mut found = None;
    for size in root.len()..=cap {
        let _ = for_each_connected_superset(g, &root, size, |u| u < nq, |w| {
            if w.len() == size && score(w) {
                found = Some(BitSet::from_indices(nq, w.iter().copied()));
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if found.is_some() {
            break;
        }
    }
    found
}
