//! Residual-error classification and small-code oracles.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::code::{CssCode, QubitLabel};
use crate::decoder::ConstantsLedger;
use crate::error::{Error, Result};
use crate::gf2::RowSpace;

/// Largest `rank(H_Z)` for which cosets are enumerated exhaustively.
pub const COSET_ENUMERATION_MAX_RANK: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeClass {
    Exact,
    StabilizerEquivalent,
    LogicalFailure,
    SyndromeNonzero,
}

impl OutcomeClass {
    /// `E ⊕ Ê` is a stabilizer (including the empty set).
    pub fn is_success(self) -> bool {
        matches!(self, OutcomeClass::Exact | OutcomeClass::StabilizerEquivalent)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeClass::Exact => "exact",
            OutcomeClass::StabilizerEquivalent => "stabilizer_equivalent",
            OutcomeClass::LogicalFailure => "logical_failure",
            OutcomeClass::SyndromeNonzero => "syndrome_nonzero",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: OutcomeClass,
    /// `|E ⊕ Ê|`
    pub residual_weight: usize,
}

/// Classifies residuals against a precomputed basis of `H_Z`'s row space.
#[derive(Clone, Debug)]
pub struct Classifier {
    stabilizers: RowSpace,
}

impl Classifier {
    pub fn new(code: &CssCode) -> Self {
        Classifier {
            stabilizers: RowSpace::new(code.hz()),
        }
    }

    pub fn classify(&self, code: &CssCode, e: &BitSet, e_hat: &BitSet) -> Classification {
        self.classify_residual(code, &e.xor(e_hat))
    }

    pub fn classify_residual(&self, code: &CssCode, r: &BitSet) -> Classification {
        let class = if r.is_empty() {
            OutcomeClass::Exact
        } else if !code.syndrome(r).is_empty() {
            OutcomeClass::SyndromeNonzero
        } else if self.stabilizers.contains(r) {
            OutcomeClass::StabilizerEquivalent
        } else {
            OutcomeClass::LogicalFailure
        };
        Classification {
            class,
            residual_weight: r.weight(),
        }
    }
}

/// One-off classification; use [`Classifier`] for repeated calls.
pub fn classify(code: &CssCode, e: &BitSet, e_hat: &BitSet) -> Classification {
    Classifier::new(code).classify(code, e, e_hat)
}

/// Minimum-weight error with syndrome `sigma` among errors of weight at most
/// `weight_cap`; ties go to the lexicographically smallest index list.
pub fn brute_force_decode(code: &CssCode, sigma: &BitSet, weight_cap: usize) -> Option<BitSet> {
    assert_eq!(sigma.len(), code.num_checks(), "syndrome width mismatch");
    let singles: Vec<BitSet> = (0..code.n())
        .map(|v| BitSet::from_indices(code.num_checks(), code.qubit_checks(v).iter().copied()))
        .collect();
    let mut chosen = Vec::new();
    for w in 0..=weight_cap.min(code.n()) {
        if search(&singles, sigma.clone(), 0, w, &mut chosen) {
            return Some(BitSet::from_indices(code.n(), chosen));
        }
    }
    None
}

fn search(singles: &[BitSet], rest: BitSet, from: usize, left: usize, chosen: &mut Vec<usize>) -> bool {
    if left == 0 {
        return rest.is_empty();
    }
    for v in from..=singles.len() - left {
        chosen.push(v);
        if search(singles, rest.xor(&singles[v]), v + 1, left - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Minimum weight over the coset `r + rowspace(H_Z)`, by enumerating a basis
/// of the row space. Only feasible for small codes.
pub fn reduced_weight(code: &CssCode, r: &BitSet) -> Result<usize> {
    let basis: Vec<BitSet> = {
        let space = RowSpace::new(code.hz());
        if space.rank() > COSET_ENUMERATION_MAX_RANK {
            return Err(Error::Budget(format!("rank(H_Z) = {} is too large to enumerate", space.rank())));
        }
        space.basis().cloned().collect()
    };
    let mut best = r.weight();
    let mut cur = r.clone();
    // Gray-code walk over all 2^rank combinations.
    for i in 1u64..(1u64 << basis.len()) {
        cur.xor_with(&basis[i.trailing_zeros() as usize]);
        best = best.min(cur.weight());
    }
    Ok(best)
}

/// `‖E‖ = |E ∩ A²|/d_B + |E ∩ B²|/d_A`, kept as an exact fraction over
/// `d_A·d_B`.
#[derive(Clone, Copy, Debug)]
pub struct NormalizedWeight {
    pub num: u64,
    pub den: u64,
}

impl NormalizedWeight {
    pub fn of(code: &CssCode, e: &BitSet) -> Self {
        let (d_a, d_b) = (code.d_a() as u64, code.d_b() as u64);
        let num = e
            .iter()
            .map(|v| match code.label(v) {
                QubitLabel::LeftPair { .. } => d_a,
                QubitLabel::RightPair { .. } => d_b,
            })
            .sum();
        NormalizedWeight { num, den: d_a * d_b }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for NormalizedWeight {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for NormalizedWeight {}

impl PartialOrd for NormalizedWeight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NormalizedWeight {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

/// Outcome of checking `|r| ≤ c₀·|D ∩ σ_X(r)|` on a final residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ResidualBoundAudit {
    /// `r` is not reduced or exceeds `γ₀√n`; nothing is claimed.
    NotApplicable,
    Holds,
    Violated,
}

pub fn residual_noise_bound(code: &CssCode, r: &BitSet, d: &BitSet, ledger: &ConstantsLedger) -> Result<ResidualBoundAudit> {
    let w = r.weight();
    if w as f64 > ledger.gamma_0 * (code.n() as f64).sqrt() || reduced_weight(code, r)? < w {
        return Ok(ResidualBoundAudit::NotApplicable);
    }
    let hits = code.syndrome(r).intersection_weight(d);
    Ok(if w as f64 <= ledger.c_0 * hits as f64 + 1e-9 {
        ResidualBoundAudit::Holds
    } else {
        ResidualBoundAudit::Violated
    })
}
