//! Candidate flips `F ⊆ Γ_Z(g)` for every generator.
//!
//! Every generator has a local frame: its support qubits in increasing
//! index order and the checks `Γ_X(Γ_Z(g))` in increasing order. Flips are
//! stored once per distinct local incidence pattern (a template) as pairs of
//! local bit masks, so for a biregular seed all generators share a single
//! template.

use std::collections::HashMap;

use crate::bitset::BitSet;
use crate::code::CssCode;
use crate::error::{Error, Result};

/// Largest generator support the table will enumerate (`2^22` subsets).
pub const DEFAULT_ENUMERATION_CAP: usize = 22;

/// Local checks per generator must fit in a `u128`.
pub const MAX_LOCAL_CHECKS: usize = 128;

/// One flip `F`, expressed in a generator's local frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FlipEntry {
    /// Bit `i` set iff the i-th support qubit is in `F`.
    pub qubits: u32,
    /// Bit `j` set iff the j-th local check is in `σ_X(F)`.
    pub syndrome: u128,
    /// `|F|`
    pub size: u32,
    /// `|σ_X(F)|`
    pub weight: u32,
}

#[derive(Clone, Debug)]
pub struct FlipTemplate {
    qubit_masks: Vec<u128>,
    /// `ℱ`, sorted by (weight, size, mask).
    filtered: Vec<FlipEntry>,
    /// `ℱ₀`: every nonempty subset, sorted the same way.
    unfiltered: Vec<FlipEntry>,
}

impl FlipTemplate {
    fn enumerate(qubit_masks: Vec<u128>, d_a: usize) -> Self {
        let k = qubit_masks.len();
        let mut unfiltered = Vec::with_capacity((1usize << k) - 1);
        // Gray-code walk: syndrome of each subset from its predecessor.
        let mut syndrome = 0u128;
        let mut qubits = 0u32;
        for i in 1u32..(1u32 << k) {
            let bit = i.trailing_zeros() as usize;
            qubits ^= 1 << bit;
            syndrome ^= qubit_masks[bit];
            unfiltered.push(FlipEntry {
                qubits,
                syndrome,
                size: qubits.count_ones(),
                weight: syndrome.count_ones(),
            });
        }
        unfiltered.sort_unstable_by_key(|e| (e.weight, e.size, std::cmp::Reverse(e.qubits.reverse_bits())));
        let filtered = unfiltered
            .iter()
            .copied()
            .filter(|e| in_filtered_family(e, d_a))
            .collect();
        FlipTemplate {
            qubit_masks,
            filtered,
            unfiltered,
        }
    }

    pub fn qubit_masks(&self) -> &[u128] {
        &self.qubit_masks
    }

    pub fn filtered(&self) -> &[FlipEntry] {
        &self.filtered
    }

    pub fn unfiltered(&self) -> &[FlipEntry] {
        &self.unfiltered
    }

    pub fn support_size(&self) -> usize {
        self.qubit_masks.len()
    }
}

/// `|σ_X(F)| ≥ (d_A/2)|F|`.
pub fn in_filtered_family(e: &FlipEntry, d_a: usize) -> bool {
    2 * e.weight as usize >= d_a * e.size as usize
}

/// Global indices of a generator's local frame.
#[derive(Clone, Debug)]
pub struct GeneratorFrame {
    pub template: usize,
    pub qubits: Vec<usize>,
    pub checks: Vec<usize>,
}

/// `ℱ` and `ℱ₀` for every generator, plus the check → generator index
/// used to find generators whose local syndrome changed.
#[derive(Clone, Debug)]
pub struct FlipTable {
    d_a: usize,
    templates: Vec<FlipTemplate>,
    frames: Vec<GeneratorFrame>,
    check_generators: Vec<Vec<usize>>,
}

/// Enumerates all candidate flips with the default cap.
pub fn precompute_flips(code: &CssCode) -> Result<FlipTable> {
    FlipTable::with_cap(code, DEFAULT_ENUMERATION_CAP)
}

impl FlipTable {
    pub fn with_cap(code: &CssCode, cap: usize) -> Result<Self> {
        let cap = cap.min(31);
        let d_a = code.d_a();
        let mut templates = Vec::new();
        let mut by_pattern: HashMap<Vec<u128>, usize> = HashMap::new();
        let mut frames = Vec::with_capacity(code.num_generators());
        let mut check_generators = vec![Vec::new(); code.num_checks()];
        for g in 0..code.num_generators() {
            let qubits = code.generator_support(g).to_vec();
            if qubits.len() > cap {
                return Err(Error::Capacity(format!(
                    "generator {g} has support {} > enumeration cap {cap}",
                    qubits.len()
                )));
            }
            let mut checks: Vec<usize> = qubits
                .iter()
                .flat_map(|&v| code.qubit_checks(v).iter().copied())
                .collect();
            checks.sort_unstable();
            checks.dedup();
            if checks.len() > MAX_LOCAL_CHECKS {
                return Err(Error::Capacity(format!(
                    "generator {g} touches {} checks > {MAX_LOCAL_CHECKS}",
                    checks.len()
                )));
            }
            let pattern: Vec<u128> = qubits
                .iter()
                .map(|&v| {
                    code.qubit_checks(v).iter().fold(0u128, |m, c| {
                        m | 1u128 << checks.binary_search(c).expect("local check")
                    })
                })
                .collect();
            let template = *by_pattern.entry(pattern.clone()).or_insert_with(|| {
                templates.push(FlipTemplate::enumerate(pattern, d_a));
                templates.len() - 1
            });
            for &c in &checks {
                check_generators[c].push(g);
            }
            frames.push(GeneratorFrame {
                template,
                qubits,
                checks,
            });
        }
        Ok(FlipTable {
            d_a,
            templates,
            frames,
            check_generators,
        })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn num_generators(&self) -> usize {
        self.frames.len()
    }

    pub fn templates(&self) -> &[FlipTemplate] {
        &self.templates
    }

    pub fn frame(&self, g: usize) -> &GeneratorFrame {
        &self.frames[g]
    }

    pub fn template_of(&self, g: usize) -> &FlipTemplate {
        &self.templates[self.frames[g].template]
    }

    /// `ℱ` restricted to `Γ_Z(g)`.
    pub fn flips(&self, g: usize) -> &[FlipEntry] {
        self.template_of(g).filtered()
    }

    /// `ℱ₀` restricted to `Γ_Z(g)`.
    pub fn all_flips(&self, g: usize) -> &[FlipEntry] {
        self.template_of(g).unfiltered()
    }

    /// Generators whose local frame contains check `c`.
    pub fn generators_touching(&self, c: usize) -> &[usize] {
        &self.check_generators[c]
    }

    /// `σ` restricted to the local checks of `g`.
    #[inline]
    pub fn local_syndrome(&self, g: usize, sigma: &BitSet) -> u128 {
        self.frames[g]
            .checks
            .iter()
            .enumerate()
            .fold(0u128, |m, (j, &c)| m | (sigma.contains(c) as u128) << j)
    }

    pub fn qubits_of(&self, g: usize, mask: u32) -> Vec<usize> {
        let q = &self.frames[g].qubits;
        (0..q.len()).filter(|i| mask >> i & 1 == 1).map(|i| q[i]).collect()
    }

    pub fn checks_of(&self, g: usize, mask: u128) -> Vec<usize> {
        let c = &self.frames[g].checks;
        (0..c.len()).filter(|j| mask >> j & 1 == 1).map(|j| c[j]).collect()
    }

    /// Local mask of an explicit qubit set `F ⊆ Γ_Z(g)`; `None` if `F`
    /// leaves the support.
    pub fn mask_of(&self, g: usize, qubits: &[usize]) -> Option<u32> {
        let support = &self.frames[g].qubits;
        qubits.iter().try_fold(0u32, |m, v| {
            support.binary_search(v).ok().map(|i| m | 1 << i)
        })
    }

    /// Entry for an explicit flip `F ⊆ Γ_Z(g)`, computed from the local
    /// incidence (whether or not it is in `ℱ`).
    pub fn entry_for(&self, g: usize, mask: u32) -> FlipEntry {
        let masks = &self.template_of(g).qubit_masks;
        let syndrome = (0..masks.len())
            .filter(|i| mask >> i & 1 == 1)
            .fold(0u128, |s, i| s ^ masks[i]);
        FlipEntry {
            qubits: mask,
            syndrome,
            size: mask.count_ones(),
            weight: syndrome.count_ones(),
        }
    }

    /// `Δ(σ, F) = 2|σ ∩ σ_X(F)| − |σ_X(F)|` through the local masks.
    pub fn delta(&self, sigma: &BitSet, g: usize, entry: &FlipEntry) -> i64 {
        let local = self.local_syndrome(g, sigma);
        local_delta(local, entry)
    }
}

#[inline]
pub fn local_delta(local: u128, entry: &FlipEntry) -> i64 {
    2 * (local & entry.syndrome).count_ones() as i64 - entry.weight as i64
}

/// `Δ(σ, F) = |σ| − |σ ⊕ σ_X(F)|` on global sets.
pub fn delta(sigma: &BitSet, flip_syndrome: &BitSet) -> i64 {
    sigma.weight() as i64 - sigma.xor(flip_syndrome).weight() as i64
}

/// `true` iff `m1` precedes `m2` when both are read as sorted index lists
/// of equal length.
#[inline]
pub fn lex_less(m1: u32, m2: u32) -> bool {
    let x = m1 ^ m2;
    x != 0 && m1 & (x & x.wrapping_neg()) != 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_code;
    use crate::graph::{sample_biregular, BipartiteGraph};

    fn toy() -> CssCode {
        build_code(&BipartiteGraph::from_parity_check(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap())
    }

    // Independent enumeration over global sets.
    fn brute_family(code: &CssCode, g: usize) -> Vec<(Vec<usize>, usize)> {
        let support = code.generator_support(g);
        let mut out = Vec::new();
        for mask in 1u32..(1 << support.len()) {
            let f: Vec<usize> = (0..support.len()).filter(|i| mask >> i & 1 == 1).map(|i| support[i]).collect();
            let e = BitSet::from_indices(code.n(), f.iter().copied());
            let w = code.syndrome(&e).weight();
            if 2 * w >= code.d_a() * f.len() {
                out.push((f, w));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn toy_table_matches_brute_force() {
        let code = toy();
        let table = precompute_flips(&code).unwrap();
        for g in 0..code.num_generators() {
            let k = code.generator_support(g).len();
            assert_eq!(table.all_flips(g).len(), (1 << k) - 1);
            let mut got: Vec<(Vec<usize>, usize)> = table
                .flips(g)
                .iter()
                .map(|e| (table.qubits_of(g, e.qubits), e.weight as usize))
                .collect();
            got.sort();
            assert_eq!(got, brute_family(&code, g));
        }
    }

    #[test]
    fn five_qubit_generator_has_31_subsets() {
        let code = build_code(&sample_biregular(3, 2, 3, 0).unwrap());
        let table = precompute_flips(&code).unwrap();
        assert_eq!(code.generator_support(0).len(), 5);
        assert_eq!(table.all_flips(0).len(), 31);
        assert_eq!(brute_family(&code, 0).len(), table.flips(0).len());
    }

    #[test]
    fn full_support_excluded_single_qubits_included() {
        let code = build_code(&sample_biregular(12, 3, 6, 1).unwrap());
        let table = precompute_flips(&code).unwrap();
        assert_eq!(table.templates().len(), 1);
        for g in [0, 17, 71] {
            let k = code.generator_support(g).len();
            let full = table.entry_for(g, (1 << k) - 1);
            assert_eq!(full.weight, 0);
            assert!(!table.flips(g).contains(&full));
            for i in 0..k {
                let e = table.entry_for(g, 1 << i);
                assert_eq!(e.weight as usize, code.qubit_checks(code.generator_support(g)[i]).len());
                assert!(e.weight as usize >= code.d_a());
                assert!(table.flips(g).contains(&e));
            }
        }
    }

    #[test]
    fn complement_closure() {
        let code = build_code(&sample_biregular(12, 3, 6, 1).unwrap());
        let table = precompute_flips(&code).unwrap();
        let t = &table.templates()[0];
        let k = t.support_size();
        let full = (1u32 << k) - 1;
        let members: std::collections::HashSet<u32> = t.filtered().iter().map(|e| e.qubits).collect();
        for m in 1..full {
            assert!(members.contains(&m) || members.contains(&(full ^ m)));
        }
    }

    #[test]
    fn capacity_error() {
        let code = build_code(&sample_biregular(12, 3, 6, 1).unwrap());
        assert!(matches!(FlipTable::with_cap(&code, 8), Err(Error::Capacity(_))));
    }

    #[test]
    fn delta_forms_agree() {
        let code = build_code(&sample_biregular(12, 3, 6, 1).unwrap());
        let table = precompute_flips(&code).unwrap();
        let e = BitSet::from_indices(code.n(), [3, 40, 150, 151]);
        let sigma = code.syndrome(&e);
        for g in 0..code.num_generators() {
            for entry in table.flips(g).iter().step_by(7) {
                let f = BitSet::from_indices(code.n(), table.qubits_of(g, entry.qubits));
                let global = delta(&sigma, &code.syndrome(&f));
                assert_eq!(table.delta(&sigma, g, entry), global);
            }
        }
        let entry = table.flips(0)[0];
        let syn = BitSet::from_indices(code.num_checks(), table.checks_of(0, entry.syndrome));
        assert_eq!(table.delta(&code.empty_syndrome(), 0, &entry), -(entry.weight as i64));
        assert_eq!(table.delta(&syn, 0, &entry), entry.weight as i64);
    }

    #[test]
    fn lex_order() {
        // {0,3} < {1,2} as index lists.
        assert!(lex_less(0b1001, 0b0110));
        assert!(!lex_less(0b0110, 0b1001));
        assert!(!lex_less(5, 5));
    }
}
