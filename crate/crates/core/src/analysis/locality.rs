//! Checks that decoding acts independently on well-separated parts of the
//! execution support.

use crate::bitset::BitSet;
use crate::code::CssCode;
use crate::decoder::{decode_beta, Beta, FlipRecord, FlipTable};
use crate::error::{Error, Result};

use super::adjacency::SyndromeAdjacencyGraph;

/// Runs `decode_beta` on `(E, D)` and on `(E ∩ K, D ∩ Γ_X(K))` and compares
/// the restricted run's flips with the full run's flips that meet `K`, in
/// order. `k` is a qubit set; the graph neighborhoods of `K` and `U \ K` must
/// be disjoint, where `U` is the full run's execution support.
pub fn locality_check(
    code: &CssCode,
    table: &FlipTable,
    graph: &SyndromeAdjacencyGraph,
    e: &BitSet,
    d: &BitSet,
    k: &BitSet,
    beta: Beta,
) -> Result<bool> {
    let no_checks = code.empty_syndrome();
    let sigma = code.syndrome(e).xor(d);
    let full = decode_beta(code, table, &sigma, beta);
    let u = full.execution_support(e);

    let rest = u.xor(&u.and(k));
    let near_k = graph.neighborhood(&graph.vertex_set(k, &no_checks));
    let near_rest = graph.neighborhood(&graph.vertex_set(&rest, &no_checks));
    if near_k.intersection_weight(&near_rest) > 0 {
        return Err(Error::Precondition("neighborhoods of K and U \\ K intersect".into()));
    }

    let mut checks_k = code.empty_syndrome();
    for v in k {
        for &c in code.qubit_checks(v) {
            checks_k.insert(c);
        }
    }
    let sigma_k = code.syndrome(&e.and(k)).xor(&d.and(&checks_k));
    let restricted = decode_beta(code, table, &sigma_k, beta);

    let key = |r: &FlipRecord| (r.generator, r.qubits.clone());
    let expected: Vec<_> = full
        .flips
        .iter()
        .filter(|r| r.qubits.iter().any(|&v| k.contains(v)))
        .map(key)
        .collect();
    let got: Vec<_> = restricted.flips.iter().map(key).collect();
    Ok(expected == got)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::adjacency::{build_syndrome_graph, connected_components};
    use crate::code::build_code;
    use crate::decoder::precompute_flips;
    use crate::graph::sample_biregular;

    fn half() -> Beta {
        Beta::new(1, 2).unwrap()
    }

    #[test]
    fn separated_components_decode_independently() {
        let code = build_code(&sample_biregular(60, 5, 10, 8).unwrap());
        let table = precompute_flips(&code).unwrap();
        let graph = build_syndrome_graph(&code);
        let n = code.n();
        let first = BitSet::from_indices(n, [0, 1]);
        let near = graph.neighborhood(&graph.neighborhood(&graph.vertex_set(&first, &code.empty_syndrome())));
        // A second cluster at graph distance > 4 from the first.
        let far_seed = (0..n).rev().find(|&v| !near.contains(v)).unwrap();
        let second = BitSet::from_indices(n, [far_seed]);
        let e = first.or(&second);
        let d = code.empty_syndrome();
        let full = decode_beta(&code, &table, &code.syndrome(&e), half());
        let u = full.execution_support(&e);
        let comps = connected_components(&graph, &graph.vertex_set(&u, &code.empty_syndrome()));
        for comp in comps {
            let k = BitSet::from_indices(n, comp);
            match locality_check(&code, &table, &graph, &e, &d, &k, half()) {
                Ok(ok) => assert!(ok),
                Err(Error::Precondition(_)) => {}
                Err(other) => panic!("{other}"),
            }
        }
    }

    #[test]
    fn trivial_splits() {
        let code = build_code(&sample_biregular(20, 5, 10, 8).unwrap());
        let table = precompute_flips(&code).unwrap();
        let graph = build_syndrome_graph(&code);
        let e = BitSet::from_indices(code.n(), [7, 300]);
        let d = BitSet::from_indices(code.num_checks(), [3]);
        let out = decode_beta(&code, &table, &code.syndrome(&e).xor(&d), half());
        let u = out.execution_support(&e);
        assert!(locality_check(&code, &table, &graph, &e, &d, &u, half()).unwrap());
        assert!(locality_check(&code, &table, &graph, &e, &d, &code.empty_error(), half()).unwrap());
    }

    #[test]
    fn overlapping_split_is_rejected() {
        let code = build_code(&sample_biregular(20, 5, 10, 8).unwrap());
        let table = precompute_flips(&code).unwrap();
        let graph = build_syndrome_graph(&code);
        let supp = code.generator_support(0);
        let e = BitSet::from_indices(code.n(), [supp[0], supp[1]]);
        let k = BitSet::from_indices(code.n(), [supp[0]]);
        let r = locality_check(&code, &table, &graph, &e, &code.empty_syndrome(), &k, half());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
