//! Audits of decoder runs: sequential replay of a flip log and the bound on
//! the execution support.

use serde::Serialize;

use crate::bitset::BitSet;
use crate::code::CssCode;

use super::flips::delta;
use super::{Beta, DecodeOutcome, FlipRecord};

#[derive(Clone, Debug)]
pub struct ReplayReport {
    /// Index of the first record that failed a check, with the reason.
    pub violation: Option<(usize, String)>,
    /// `(step, |σ|)` after the last record of each logged step.
    pub step_weights: Vec<(usize, usize)>,
    pub correction: BitSet,
    pub final_syndrome: BitSet,
}

impl ReplayReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }

    /// The replay reproduces the run's correction, final syndrome and the
    /// syndrome weight after every step that flipped something.
    pub fn reproduces(&self, out: &DecodeOutcome) -> bool {
        self.correction == out.correction
            && self.final_syndrome == out.final_syndrome
            && self
                .step_weights
                .iter()
                .all(|&(step, w)| out.syndrome_trace.get(step + 1) == Some(&w))
    }
}

/// Applies the logged flips one at a time, recomputing every quantity from
/// the code itself, and checks that each flip lies in a single generator
/// support, belongs to `ℱ`, matches its logged Δ and passes
/// `Δ(σ, F) ≥ β|σ_X(F)|` at the moment it is applied.
pub fn replay_flips(code: &CssCode, sigma: &BitSet, flips: &[FlipRecord], beta: Beta) -> ReplayReport {
    let mut sigma = sigma.clone();
    let mut correction = code.empty_error();
    let mut violation = None;
    let mut step_weights: Vec<(usize, usize)> = Vec::new();
    let mut step_start = sigma.clone();
    let mut current_step = None;
    for (i, r) in flips.iter().enumerate() {
        if current_step != Some(r.step) {
            if let Some(s) = current_step {
                step_weights.push((s, sigma.weight()));
            }
            current_step = Some(r.step);
            step_start = sigma.clone();
        }
        let support = code.generator_support(r.generator);
        let f = BitSet::from_indices(code.n(), r.qubits.iter().copied());
        let syn = code.syndrome(&f);
        let d = delta(&sigma, &syn);
        let weight = syn.weight() as u32;
        let mut fail = |msg: String| {
            if violation.is_none() {
                violation = Some((i, msg));
            }
        };
        if r.qubits.is_empty() || !r.qubits.iter().all(|v| support.binary_search(v).is_ok()) {
            fail(format!("flip is not a nonempty subset of generator {}", r.generator));
        }
        if 2 * (weight as usize) < code.d_a() * r.qubits.len() {
            fail("flip outside the filtered family".into());
        }
        if !beta.admits(d, weight) {
            fail(format!("delta {d} < beta·{weight}"));
        }
        // Within a parallel step Δ is logged against the step's snapshot.
        if delta(&step_start, &syn) != r.delta {
            fail(format!("logged delta {} != recomputed {}", r.delta, delta(&step_start, &syn)));
        }
        sigma.xor_with(&syn);
        correction.xor_with(&f);
    }
    if let Some(s) = current_step {
        step_weights.push((s, sigma.weight()));
    }
    ReplayReport {
        violation,
        step_weights,
        correction,
        final_syndrome: sigma,
    }
}

/// `|U ∪ D| ≤ |E ∪ D| / (2α₀)` with `α₀ = rβ/(4 + 2rβ)`, `r = d_A/d_B`,
/// evaluated exactly in integers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupportBound {
    /// `|U ∪ D|` over `V ∪ C_X`.
    pub support: usize,
    /// `|E ∪ D|` over `V ∪ C_X`.
    pub noise: usize,
    pub holds: bool,
    /// `|E ∪ D|/(2α₀) − |U ∪ D|`.
    pub slack: f64,
}

pub fn support_bound(code: &CssCode, e: &BitSet, d: &BitSet, out: &DecodeOutcome, beta: Beta) -> SupportBound {
    let support = out.execution_support(e).weight() + d.weight();
    let noise = e.weight() + d.weight();
    let (da, db) = (code.d_a() as i128, code.d_b() as i128);
    let (num, den) = (beta.num() as i128, beta.den() as i128);
    let scale = 2 * da * num;
    let slack_scaled = (4 * db * den + 2 * da * num) * noise as i128 - scale * support as i128;
    SupportBound {
        support,
        noise,
        holds: slack_scaled >= 0,
        slack: slack_scaled as f64 / scale as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_code;
    use crate::decoder::flips::precompute_flips;
    use crate::decoder::sequential::decode_beta;
    use crate::graph::sample_biregular;

    fn half() -> Beta {
        Beta::new(1, 2).unwrap()
    }

    #[test]
    fn sequential_log_replays() {
        let code = build_code(&sample_biregular(20, 5, 10, 4).unwrap());
        let table = precompute_flips(&code).unwrap();
        let e = BitSet::from_indices(code.n(), [1, 2, 77, 300, 301]);
        let sigma = code.syndrome(&e);
        let out = decode_beta(&code, &table, &sigma, half());
        let report = replay_flips(&code, &sigma, &out.flips, half());
        assert!(report.ok());
        assert!(report.reproduces(&out));
        assert_eq!(report.step_weights.len(), out.flips.len());
    }

    #[test]
    fn tampered_logs_are_caught() {
        let code = build_code(&sample_biregular(20, 5, 10, 4).unwrap());
        let table = precompute_flips(&code).unwrap();
        let e = BitSet::from_indices(code.n(), [5, 260]);
        let sigma = code.syndrome(&e);
        let out = decode_beta(&code, &table, &sigma, half());

        let mut wrong_delta = out.flips.clone();
        wrong_delta[0].delta += 1;
        assert_eq!(replay_flips(&code, &sigma, &wrong_delta, half()).violation.map(|v| v.0), Some(0));

        // Flipping the same set twice: the second application raises |σ|.
        let mut doubled = out.flips.clone();
        let mut again = doubled[0].clone();
        again.step = doubled.len();
        again.delta = -again.delta;
        doubled.push(again);
        assert!(replay_flips(&code, &sigma, &doubled, half()).violation.is_some());

        let mut foreign = out.flips.clone();
        foreign[0].generator = (foreign[0].generator + 1) % code.num_generators();
        assert!(replay_flips(&code, &sigma, &foreign, half()).violation.is_some());
    }

    #[test]
    fn support_bound_arithmetic() {
        let code = build_code(&sample_biregular(20, 5, 10, 4).unwrap());
        let table = precompute_flips(&code).unwrap();
        let e = BitSet::from_indices(code.n(), [5]);
        let d = code.empty_syndrome();
        let out = decode_beta(&code, &table, &code.syndrome(&e), half());
        let b = support_bound(&code, &e, &d, &out, half());
        // α₀ = (1/2)(1/2)/(4 + 1/2) = 1/18, so the bound is 9·|E ∪ D| = 9.
        assert_eq!((b.support, b.noise), (1, 1));
        assert!(b.holds);
        assert!((b.slack - 8.0).abs() < 1e-12);
    }
}
