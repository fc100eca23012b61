//! Sequential small-set-flip loops (ratio-greedy and β-threshold).
//!
//! Tie rule: largest Δ/|F| (ratio) or largest Δ (β-threshold), then
//! smallest |F|, then lowest generator index, then the lexicographically
//! smallest qubit set.

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeSet;

use crate::bitset::BitSet;
use crate::code::CssCode;

use super::flips::{lex_less, local_delta, FlipEntry, FlipTable};
use super::{Beta, DecodeOutcome, FlipRecord, Terminated};

/// How candidates are refreshed after each flip. Both produce identical
/// outcomes; `Full` is the reference the incremental path is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rescan {
    /// Re-evaluate only generators whose local checks changed.
    Incremental,
    /// Re-evaluate every generator at every step.
    Full,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Candidate {
    pub gen: usize,
    pub entry: FlipEntry,
    pub delta: i64,
}

pub(crate) trait Rule {
    type Key: Ord + Copy;

    fn family<'a>(&self, table: &'a FlipTable, g: usize) -> &'a [FlipEntry];
    /// Length of the weight-sorted prefix that can possibly qualify when the
    /// local syndrome has `k` bits.
    fn cutoff(&self, entries: &[FlipEntry], k: u32) -> usize;
    fn qualifies(&self, delta: i64, entry: &FlipEntry) -> bool;
    /// `a` is preferred over `b` (same generator).
    fn prefer(&self, a: &Candidate, b: &Candidate) -> bool;
    fn key(&self, c: &Candidate) -> Self::Key;
    fn key_gen(key: &Self::Key) -> usize;

    fn best(&self, table: &FlipTable, g: usize, local: u128) -> Option<Candidate> {
        if local == 0 {
            return None;
        }
        let entries = self.family(table, g);
        let end = self.cutoff(entries, local.count_ones());
        let mut best: Option<Candidate> = None;
        for entry in &entries[..end] {
            let delta = local_delta(local, entry);
            if !self.qualifies(delta, entry) {
                continue;
            }
            let cand = Candidate {
                gen: g,
                entry: *entry,
                delta,
            };
            if best.as_ref().is_none_or(|b| self.prefer(&cand, b)) {
                best = Some(cand);
            }
        }
        best
    }
}

pub(crate) struct BetaRule(pub Beta);

impl Rule for BetaRule {
    type Key = (Reverse<i64>, u32, usize);

    fn family<'a>(&self, table: &'a FlipTable, g: usize) -> &'a [FlipEntry] {
        table.flips(g)
    }

    fn cutoff(&self, entries: &[FlipEntry], k: u32) -> usize {
        // 2|σ∩σ(F)| ≥ (1+β)|σ(F)| with |σ∩σ(F)| ≤ k.
        let (num, den) = (self.0.num() as u64, self.0.den() as u64);
        entries.partition_point(|e| e.weight as u64 * (den + num) <= 2 * k as u64 * den)
    }

    fn qualifies(&self, delta: i64, entry: &FlipEntry) -> bool {
        self.0.admits(delta, entry.weight)
    }

    fn prefer(&self, a: &Candidate, b: &Candidate) -> bool {
        match a.delta.cmp(&b.delta) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match a.entry.size.cmp(&b.entry.size) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => lex_less(a.entry.qubits, b.entry.qubits),
            },
        }
    }

    fn key(&self, c: &Candidate) -> Self::Key {
        (Reverse(c.delta), c.entry.size, c.gen)
    }

    fn key_gen(key: &Self::Key) -> usize {
        key.2
    }
}

/// `Δ/|F|`, ordered so that larger ratios sort first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct RatioKey {
    delta: i64,
    size: u32,
}

impl Ord for RatioKey {
    fn cmp(&self, other: &Self) -> Ordering {
        (other.delta * self.size as i64).cmp(&(self.delta * other.size as i64))
    }
}

impl PartialOrd for RatioKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) struct RatioRule;

impl Rule for RatioRule {
    type Key = (RatioKey, u32, usize);

    fn family<'a>(&self, table: &'a FlipTable, g: usize) -> &'a [FlipEntry] {
        table.all_flips(g)
    }

    fn cutoff(&self, entries: &[FlipEntry], k: u32) -> usize {
        // Δ > 0 needs 2|σ∩σ(F)| > |σ(F)|.
        entries.partition_point(|e| e.weight < 2 * k)
    }

    fn qualifies(&self, delta: i64, _entry: &FlipEntry) -> bool {
        delta > 0
    }

    fn prefer(&self, a: &Candidate, b: &Candidate) -> bool {
        let ka = RatioKey { delta: a.delta, size: a.entry.size };
        let kb = RatioKey { delta: b.delta, size: b.entry.size };
        match ka.cmp(&kb) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match a.entry.size.cmp(&b.entry.size) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => lex_less(a.entry.qubits, b.entry.qubits),
            },
        }
    }

    fn key(&self, c: &Candidate) -> Self::Key {
        (
            RatioKey {
                delta: c.delta,
                size: c.entry.size,
            },
            c.entry.size,
            c.gen,
        )
    }

    fn key_gen(key: &Self::Key) -> usize {
        key.2
    }
}

/// β-threshold decoding over `ℱ`: while some `F` has `Δ(σ, F) ≥ β|σ_X(F)|`,
/// flip the best one.
pub fn decode_beta(code: &CssCode, table: &FlipTable, sigma: &BitSet, beta: Beta) -> DecodeOutcome {
    decode_beta_with(code, table, sigma, beta, Rescan::Incremental)
}

pub fn decode_beta_with(
    code: &CssCode,
    table: &FlipTable,
    sigma: &BitSet,
    beta: Beta,
    rescan: Rescan,
) -> DecodeOutcome {
    run(code, table, sigma, &BetaRule(beta), rescan)
}

/// Ratio-greedy decoding over `ℱ₀`: while some `F` has `Δ(σ, F) > 0`, flip
/// an argmax of `Δ/|F|`.
pub fn decode_ratio(code: &CssCode, table: &FlipTable, sigma: &BitSet) -> DecodeOutcome {
    decode_ratio_with(code, table, sigma, Rescan::Incremental)
}

pub fn decode_ratio_with(code: &CssCode, table: &FlipTable, sigma: &BitSet, rescan: Rescan) -> DecodeOutcome {
    run(code, table, sigma, &RatioRule, rescan)
}

fn run<R: Rule>(code: &CssCode, table: &FlipTable, sigma: &BitSet, rule: &R, rescan: Rescan) -> DecodeOutcome {
    assert_eq!(sigma.len(), code.num_checks(), "syndrome width mismatch");
    let mut out = DecodeOutcome::start(code.n(), sigma);
    let mut sigma = sigma.clone();
    let num_gens = table.num_generators();

    let mut best: Vec<Option<Candidate>> = vec![None; num_gens];
    let mut queue: BTreeSet<R::Key> = BTreeSet::new();
    let mut stamp = vec![usize::MAX; num_gens];
    let mut affected: Vec<usize> = Vec::new();

    let refresh = |g: usize, sigma: &BitSet, best: &mut Vec<Option<Candidate>>, queue: &mut BTreeSet<R::Key>| {
        if let Some(old) = best[g].take() {
            queue.remove(&rule.key(&old));
        }
        if let Some(c) = rule.best(table, g, table.local_syndrome(g, sigma)) {
            queue.insert(rule.key(&c));
            best[g] = Some(c);
        }
    };

    for g in 0..num_gens {
        refresh(g, &sigma, &mut best, &mut queue);
    }

    let mut step = 0usize;
    while let Some(&key) = queue.first() {
        let g = R::key_gen(&key);
        let cand = best[g].expect("queued generator has a candidate");
        let qubits = table.qubits_of(g, cand.entry.qubits);
        for &v in &qubits {
            out.correction.toggle(v);
            out.flip_support.insert(v);
        }
        let changed = table.checks_of(g, cand.entry.syndrome);
        for &c in &changed {
            sigma.toggle(c);
        }
        debug_assert!(sigma.weight() < *out.syndrome_trace.last().expect("trace"));
        out.syndrome_trace.push(sigma.weight());
        out.flips.push(FlipRecord {
            step,
            color: None,
            generator: g,
            qubits,
            delta: cand.delta,
            weight: cand.entry.weight,
        });

        match rescan {
            Rescan::Full => {
                for h in 0..num_gens {
                    refresh(h, &sigma, &mut best, &mut queue);
                }
            }
            Rescan::Incremental => {
                affected.clear();
                for &c in &changed {
                    for &h in table.generators_touching(c) {
                        if stamp[h] != step {
                            stamp[h] = step;
                            affected.push(h);
                        }
                    }
                }
                for &h in &affected {
                    refresh(h, &sigma, &mut best, &mut queue);
                }
            }
        }
        step += 1;
    }
    out.steps = step as u64;
    out.final_syndrome = sigma;
    out.terminated_by = Terminated::NoFlipAvailable;
    out
}
