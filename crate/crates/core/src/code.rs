//! Hypergraph-product CSS code built from a seed graph.
//!
//! Qubits are `V = A² ⊎ B²`: `(α, a) ∈ A²` has index `α·n_A + a` and
//! `(b, β) ∈ B²` has index `n_A² + b·n_B + β`. Z-type checks `C_X = A×B`
//! are indexed `α·n_B + β`, X-type generators `C_Z = B×A` are indexed
//! `b·n_A + a`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::gf2::{gf2_rank, Gf2Matrix};
use crate::graph::BipartiteGraph;

/// Version tag for the qubit/check index layout above.
pub const LAYOUT_VERSION: &str = "hgp-v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QubitLabel {
    /// `(α, a) ∈ A²`
    LeftPair { alpha: usize, a: usize },
    /// `(b, β) ∈ B²`
    RightPair { b: usize, beta: usize },
}

/// Quantum expander code: factor graphs `G_X = (V ∪ C_X)` and
/// `G_Z = (V ∪ C_Z)` stored as sparse incidence in both directions.
///
/// "X side" always means the checks the decoder reads the syndrome from;
/// [`CssCode::swap_roles`] exchanges the two sides for Z-error decoding.
#[derive(Clone, Debug)]
pub struct CssCode {
    graph: BipartiteGraph,
    swapped: bool,
    hx: Gf2Matrix,
    hz: Gf2Matrix,
    qubit_x: Vec<Vec<usize>>,
    qubit_z: Vec<Vec<usize>>,
}

/// Builds the hypergraph product of the seed code with itself.
pub fn build_code(g: &BipartiteGraph) -> CssCode {
    let (n_a, n_b) = (g.n_a(), g.n_b());
    let a2 = |alpha: usize, a: usize| alpha * n_a + a;
    let b2 = |b: usize, beta: usize| n_a * n_a + b * n_b + beta;
    let n = n_a * n_a + n_b * n_b;

    // (α,β) ∈ C_X touches (α,a) for a ∈ Γ(β) and (b,β) for b ∈ Γ(α).
    let mut x_rows = Vec::with_capacity(n_a * n_b);
    for alpha in 0..n_a {
        for beta in 0..n_b {
            let mut row: Vec<usize> = g.right_neighbors(beta).iter().map(|&a| a2(alpha, a)).collect();
            row.extend(g.left_neighbors(alpha).iter().map(|&b| b2(b, beta)));
            x_rows.push(row);
        }
    }
    // (b,a) ∈ C_Z touches (α,a) for α ∈ Γ(b) and (b,β) for β ∈ Γ(a).
    let mut z_rows = Vec::with_capacity(n_a * n_b);
    for b in 0..n_b {
        for a in 0..n_a {
            let mut row: Vec<usize> = g.right_neighbors(b).iter().map(|&alpha| a2(alpha, a)).collect();
            row.extend(g.left_neighbors(a).iter().map(|&beta| b2(b, beta)));
            z_rows.push(row);
        }
    }
    let hx = Gf2Matrix::new(n, x_rows).expect("hypergraph product rows are sets");
    let hz = Gf2Matrix::new(n, z_rows).expect("hypergraph product rows are sets");
    let qubit_x = hx.transpose().row_iter().map(<[usize]>::to_vec).collect();
    let qubit_z = hz.transpose().row_iter().map(<[usize]>::to_vec).collect();
    CssCode {
        graph: g.clone(),
        swapped: false,
        hx,
        hz,
        qubit_x,
        qubit_z,
    }
}

impl CssCode {
    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.hx.cols()
    }

    pub fn num_checks(&self) -> usize {
        self.hx.rows()
    }

    pub fn num_generators(&self) -> usize {
        self.hz.rows()
    }

    pub fn d_a(&self) -> usize {
        self.graph.d_a()
    }

    pub fn d_b(&self) -> usize {
        self.graph.d_b()
    }

    pub fn is_swapped(&self) -> bool {
        self.swapped
    }

    /// Parity checks read by the decoder (`H_X`, rows indexed by `C_X`).
    pub fn hx(&self) -> &Gf2Matrix {
        &self.hx
    }

    /// Generators the decoder flips within (`H_Z`, rows indexed by `C_Z`).
    pub fn hz(&self) -> &Gf2Matrix {
        &self.hz
    }

    /// `Γ_X(c)` for a check `c ∈ C_X`.
    pub fn check_support(&self, c: usize) -> &[usize] {
        self.hx.row(c)
    }

    /// `Γ_Z(g)` for a generator `g ∈ C_Z`.
    pub fn generator_support(&self, g: usize) -> &[usize] {
        self.hz.row(g)
    }

    /// `Γ_X(v)`: checks containing qubit `v`.
    pub fn qubit_checks(&self, v: usize) -> &[usize] {
        &self.qubit_x[v]
    }

    /// `Γ_Z(v)`: generators containing qubit `v`.
    pub fn qubit_generators(&self, v: usize) -> &[usize] {
        &self.qubit_z[v]
    }

    /// Code with the X and Z sides exchanged; decoding its X side corrects
    /// Z errors of `self`.
    pub fn swap_roles(&self) -> CssCode {
        CssCode {
            graph: self.graph.clone(),
            swapped: !self.swapped,
            hx: self.hz.clone(),
            hz: self.hx.clone(),
            qubit_x: self.qubit_z.clone(),
            qubit_z: self.qubit_x.clone(),
        }
    }

    pub fn label(&self, v: usize) -> QubitLabel {
        let (n_a, n_b) = (self.graph.n_a(), self.graph.n_b());
        if v < n_a * n_a {
            QubitLabel::LeftPair {
                alpha: v / n_a,
                a: v % n_a,
            }
        } else {
            let w = v - n_a * n_a;
            QubitLabel::RightPair {
                b: w / n_b,
                beta: w % n_b,
            }
        }
    }

    pub fn index(&self, label: QubitLabel) -> usize {
        let (n_a, n_b) = (self.graph.n_a(), self.graph.n_b());
        match label {
            QubitLabel::LeftPair { alpha, a } => alpha * n_a + a,
            QubitLabel::RightPair { b, beta } => n_a * n_a + b * n_b + beta,
        }
    }

    pub fn empty_error(&self) -> BitSet {
        BitSet::new(self.n())
    }

    pub fn empty_syndrome(&self) -> BitSet {
        BitSet::new(self.num_checks())
    }

    /// `σ_X(E) = ⊕_{v ∈ E} Γ_X(v)`.
    pub fn syndrome(&self, e: &BitSet) -> BitSet {
        assert_eq!(e.len(), self.n(), "error width mismatch");
        let mut s = self.empty_syndrome();
        for v in e {
            for &c in &self.qubit_x[v] {
                s.toggle(c);
            }
        }
        s
    }

    /// Every entry of `H_X·H_Zᵀ`; returns the first nonzero `(check, generator)`.
    pub fn orthogonality_violation(&self) -> Option<(usize, usize)> {
        let mut parity = vec![false; self.num_generators()];
        for c in 0..self.num_checks() {
            parity.iter_mut().for_each(|p| *p = false);
            for &v in self.check_support(c) {
                for &g in &self.qubit_z[v] {
                    parity[g] ^= true;
                }
            }
            if let Some(g) = parity.iter().position(|&p| p) {
                return Some((c, g));
            }
        }
        None
    }

    /// `k = n − rank(H_X) − rank(H_Z)`.
    pub fn dimension(&self) -> usize {
        self.n() - gf2_rank(&self.hx) - gf2_rank(&self.hz)
    }
}

pub fn syndrome_x(code: &CssCode, e: &BitSet) -> BitSet {
    code.syndrome(e)
}

pub fn code_dimension(code: &CssCode) -> usize {
    code.dimension()
}

/// Classical seed matrix `H` (`n_B × n_A`).
pub fn seed_matrix(g: &BipartiteGraph) -> Gf2Matrix {
    Gf2Matrix::new(g.n_a(), g.parity_check_rows()).expect("simple adjacency")
}

/// On-disk reference to a code: the seed graph file plus layout version.
/// Codes are rebuilt from the graph rather than stored.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CodeRef {
    pub layout: String,
    pub graph: PathBuf,
}

impl CodeRef {
    pub fn new(graph: impl Into<PathBuf>) -> Self {
        CodeRef {
            layout: LAYOUT_VERSION.to_string(),
            graph: graph.into(),
        }
    }

    /// Loads the graph (relative paths resolve against `base`) and rebuilds.
    pub fn load(&self, base: &Path) -> Result<CssCode> {
        if self.layout != LAYOUT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported layout `{}` (expected {LAYOUT_VERSION})",
                self.layout
            )));
        }
        let path = if self.graph.is_absolute() {
            self.graph.clone()
        } else {
            base.join(&self.graph)
        };
        Ok(build_code(&BipartiteGraph::read(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::in_row_space;
    use crate::graph::sample_biregular;
    use proptest::prelude::*;

    pub(crate) fn toy_graph() -> BipartiteGraph {
        BipartiteGraph::from_parity_check(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap()
    }

    #[test]
    fn toy_code_shape() {
        let code = build_code(&toy_graph());
        assert_eq!(code.n(), 13);
        assert_eq!(code.num_checks(), 6);
        assert_eq!(code.num_generators(), 6);
        assert_eq!(code.orthogonality_violation(), None);
        assert_eq!(gf2_rank(code.hx()), 6);
        assert_eq!(gf2_rank(code.hz()), 6);
        assert_eq!(code.dimension(), 1);
    }

    #[test]
    fn incidence_rules() {
        let g = sample_biregular(12, 3, 6, 2).unwrap();
        let code = build_code(&g);
        let (n_a, n_b) = (g.n_a(), g.n_b());
        for v in 0..code.n() {
            assert_eq!(code.index(code.label(v)), v);
            for c in 0..code.num_checks() {
                let (alpha, beta) = (c / n_b, c % n_b);
                let expect = match code.label(v) {
                    QubitLabel::LeftPair { alpha: x, a } => x == alpha && g.left_neighbors(a).contains(&beta),
                    QubitLabel::RightPair { b, beta: y } => y == beta && g.left_neighbors(alpha).contains(&b),
                };
                assert_eq!(code.qubit_checks(v).contains(&c), expect);
            }
            for gen in 0..code.num_generators() {
                let (b, a) = (gen / n_a, gen % n_a);
                let expect = match code.label(v) {
                    QubitLabel::LeftPair { alpha, a: x } => x == a && g.right_neighbors(b).contains(&alpha),
                    QubitLabel::RightPair { b: y, beta } => y == b && g.left_neighbors(a).contains(&beta),
                };
                assert_eq!(code.qubit_generators(v).contains(&gen), expect);
            }
        }
    }

    #[test]
    fn code_60_5_10_degrees() {
        let g = sample_biregular(60, 5, 10, 1).unwrap();
        let code = build_code(&g);
        assert_eq!(code.n(), 4500);
        for gen in 0..code.num_generators() {
            assert_eq!(code.generator_support(gen).len(), 15);
        }
        for c in 0..code.num_checks() {
            assert_eq!(code.check_support(c).len(), 15);
        }
        for v in 0..code.n() {
            assert!(code.qubit_checks(v).len() <= 20);
            assert!(code.qubit_generators(v).len() <= 20);
        }
        assert_eq!(code.orthogonality_violation(), None);
    }

    #[test]
    fn syndrome_examples() {
        let code = build_code(&toy_graph());
        assert!(code.syndrome(&code.empty_error()).is_empty());
        for v in 0..code.n() {
            let s = code.syndrome(&BitSet::from_indices(13, [v]));
            assert_eq!(s.to_indices(), code.qubit_checks(v));
        }
        for g in 0..code.num_generators() {
            assert!(code.syndrome(&code.hz().row_bits(g)).is_empty());
        }
    }

    #[test]
    fn single_qubit_outside_stabilizers() {
        let code = build_code(&toy_graph());
        let v = (0..13).find(|&v| !code.qubit_checks(v).is_empty()).unwrap();
        assert!(!in_row_space(code.hz(), &BitSet::from_indices(13, [v])).unwrap());
    }

    #[test]
    fn swapped_roles_are_involutive() {
        let code = build_code(&toy_graph());
        let back = code.swap_roles().swap_roles();
        assert_eq!(back.hx(), code.hx());
        assert_eq!(code.swap_roles().hx(), code.hz());
        assert_eq!(code.swap_roles().orthogonality_violation(), None);
    }

    #[test]
    fn code_ref_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = sample_biregular(12, 3, 6, 5).unwrap();
        g.write(dir.path().join("g.txt")).unwrap();
        let r = CodeRef::new("g.txt");
        let json = serde_json::to_string(&r).unwrap();
        let back: CodeRef = serde_json::from_str(&json).unwrap();
        let code = back.load(dir.path()).unwrap();
        assert_eq!(code.hx(), build_code(&g).hx());
        let bad = CodeRef { layout: "v0".into(), graph: "g.txt".into() };
        assert!(bad.load(dir.path()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn syndrome_is_linear(a in proptest::collection::vec(0usize..180, 0..20),
                              b in proptest::collection::vec(0usize..180, 0..20)) {
            let code = build_code(&sample_biregular(12, 3, 6, 7).unwrap());
            let e1 = BitSet::from_indices(code.n(), a);
            let e2 = BitSet::from_indices(code.n(), b);
            prop_assert_eq!(code.syndrome(&e1.xor(&e2)), code.syndrome(&e1).xor(&code.syndrome(&e2)));
        }
    }
}
