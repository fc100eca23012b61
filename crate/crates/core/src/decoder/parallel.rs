//! Color-parallel small-set-flip decoding.

use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::code::CssCode;

use super::coloring::Coloring;
use super::flips::FlipTable;
use super::sequential::{BetaRule, Candidate, Rule};
use super::{Beta, DecodeOutcome, FlipRecord, Stopping, Terminated};

// Color classes at least this large are scanned on the rayon pool.
const PAR_CLASS_MIN: usize = 64;

/// At step `i` every generator of color `i mod k` picks its best qualifying
/// flip against the same snapshot `σ_i`; all picks are applied together.
///
/// Once `k` consecutive steps flip nothing the state is fixed. Under
/// [`Stopping::Fixpoint`] the run ends there; under
/// [`Stopping::F0Budget`] the remaining steps are known to be empty and are
/// counted without being executed.
pub fn decode_parallel(
    code: &CssCode,
    table: &FlipTable,
    coloring: &Coloring,
    sigma: &BitSet,
    beta: Beta,
    stopping: Stopping,
) -> DecodeOutcome {
    assert_eq!(sigma.len(), code.num_checks(), "syndrome width mismatch");
    let rule = BetaRule(beta);
    let mut out = DecodeOutcome::start(code.n(), sigma);
    let mut sigma = sigma.clone();
    let k = coloring.num_colors() as u64;
    let budget = match stopping {
        Stopping::Fixpoint => None,
        Stopping::F0Budget { steps } => Some(steps),
    };

    let mut step = 0u64;
    let mut idle = 0u64;
    out.terminated_by = loop {
        if budget.is_some_and(|b| step >= b) {
            break Terminated::StepBudget;
        }
        if k == 0 || idle >= k {
            match budget {
                None => break Terminated::NoFlipAvailable,
                Some(b) => {
                    step = b;
                    break Terminated::StepBudget;
                }
            }
        }
        let color = (step % k) as usize;
        let class = coloring.class(color);
        let pick = |&g: &usize| rule.best(table, g, table.local_syndrome(g, &sigma));
        let picks: Vec<Candidate> = if class.len() >= PAR_CLASS_MIN {
            class.par_iter().filter_map(pick).collect()
        } else {
            class.iter().filter_map(pick).collect()
        };

        if picks.is_empty() {
            idle += 1;
        } else {
            idle = 0;
            let before = sigma.weight() as i64;
            let mut total_delta = 0i64;
            for cand in &picks {
                let qubits = table.qubits_of(cand.gen, cand.entry.qubits);
                for &v in &qubits {
                    out.correction.toggle(v);
                    out.flip_support.insert(v);
                }
                for c in table.checks_of(cand.gen, cand.entry.syndrome) {
                    sigma.toggle(c);
                }
                total_delta += cand.delta;
                out.flips.push(FlipRecord {
                    step: step as usize,
                    color: Some(color),
                    generator: cand.gen,
                    qubits,
                    delta: cand.delta,
                    weight: cand.entry.weight,
                });
            }
            // Same-color check neighborhoods are disjoint, so the step's Δ is
            // the sum of the per-generator Δ.
            debug_assert_eq!(before - sigma.weight() as i64, total_delta);
        }
        out.syndrome_trace.push(sigma.weight());
        step += 1;
    };
    out.steps = step;
    out.sweeps = Some(if k == 0 { 0 } else { (out.syndrome_trace.len() as u64 - 1).div_ceil(k) });
    out.final_syndrome = sigma;
    out
}
