//! Qubit and syndrome noise: `E ⊆ V`, `D ⊆ C_X`, and `σ = σ_X(E) ⊕ D`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::code::CssCode;
use crate::error::{param, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum QubitNoise {
    Iid { p: f64 },
    FixedWeight { w: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum SyndromeNoise {
    None,
    Iid { q: f64 },
    FixedWeight { w: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub qubit: QubitNoise,
    pub syndrome: SyndromeNoise,
}

impl NoiseSpec {
    pub fn iid(p_phys: f64, p_synd: f64) -> Self {
        NoiseSpec {
            qubit: QubitNoise::Iid { p: p_phys },
            syndrome: if p_synd == 0.0 {
                SyndromeNoise::None
            } else {
                SyndromeNoise::Iid { q: p_synd }
            },
        }
    }

    pub fn validate(&self, n_qubits: usize, n_checks: usize) -> Result<()> {
        let prob = |x: f64, name: &str| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(param(format!("{name}={x} is not a probability")))
            }
        };
        match self.qubit {
            QubitNoise::Iid { p } => prob(p, "p_phys")?,
            QubitNoise::FixedWeight { w } if w > n_qubits => {
                return Err(param(format!("qubit weight {w} > n={n_qubits}")))
            }
            QubitNoise::FixedWeight { .. } => {}
        }
        match self.syndrome {
            SyndromeNoise::Iid { q } => prob(q, "p_synd")?,
            SyndromeNoise::FixedWeight { w } if w > n_checks => {
                return Err(param(format!("syndrome weight {w} > |C_X|={n_checks}")))
            }
            _ => {}
        }
        Ok(())
    }

    /// True when both parts are i.i.d. (or absent), i.e. the spec is a
    /// member of the local stochastic family.
    pub fn is_local_stochastic(&self) -> bool {
        matches!(self.qubit, QubitNoise::Iid { .. })
            && !matches!(self.syndrome, SyndromeNoise::FixedWeight { .. })
    }

    fn p(&self) -> f64 {
        match self.qubit {
            QubitNoise::Iid { p } => p,
            QubitNoise::FixedWeight { .. } => f64::NAN,
        }
    }

    fn q(&self) -> f64 {
        match self.syndrome {
            SyndromeNoise::Iid { q } => q,
            SyndromeNoise::None => 0.0,
            SyndromeNoise::FixedWeight { .. } => f64::NAN,
        }
    }
}

/// Independent RNG stream `stream` of the master seed.
pub fn trial_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

fn sample_bits<R: Rng + ?Sized>(len: usize, p: f64, rng: &mut R) -> BitSet {
    let mut s = BitSet::new(len);
    if p <= 0.0 {
        return s;
    }
    if p >= 1.0 {
        return BitSet::full(len);
    }
    for i in 0..len {
        if rng.random_bool(p) {
            s.insert(i);
        }
    }
    s
}

fn sample_weight<R: Rng + ?Sized>(len: usize, w: usize, rng: &mut R) -> BitSet {
    BitSet::from_indices(len, rand::seq::index::sample(rng, len, w))
}

/// Draws `(E, D)`; `E` first, then `D`, from the same stream.
pub fn sample_error<R: Rng + ?Sized>(spec: &NoiseSpec, code: &CssCode, rng: &mut R) -> (BitSet, BitSet) {
    let e = match spec.qubit {
        QubitNoise::Iid { p } => sample_bits(code.n(), p, rng),
        QubitNoise::FixedWeight { w } => sample_weight(code.n(), w, rng),
    };
    let d = match spec.syndrome {
        SyndromeNoise::None => code.empty_syndrome(),
        SyndromeNoise::Iid { q } => sample_bits(code.num_checks(), q, rng),
        SyndromeNoise::FixedWeight { w } => sample_weight(code.num_checks(), w, rng),
    };
    (e, d)
}

/// `σ_X(E) ⊕ D`.
pub fn observed_syndrome(code: &CssCode, e: &BitSet, d: &BitSet) -> BitSet {
    code.syndrome(e).xor(d)
}

/// A probe `(S, T)` for the bound `P[S ⊆ E, T ⊆ D] ≤ p^|S| q^|T|`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Probe {
    pub qubits: Vec<usize>,
    pub checks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub size: (usize, usize),
    pub hits: usize,
    pub trials: usize,
    pub frequency: f64,
    pub bound: f64,
    /// Binomial standard deviation of the frequency under the bound.
    pub sigma: f64,
    /// Frequency exceeds the bound by more than four sigma.
    pub violation: bool,
}

/// Empirical check of the local stochastic bound on each probe.
pub fn ls_audit<R: Rng + ?Sized>(
    spec: &NoiseSpec,
    code: &CssCode,
    probes: &[Probe],
    trials: usize,
    rng: &mut R,
) -> Result<Vec<ProbeReport>> {
    if !spec.is_local_stochastic() {
        return Err(Error::UnsupportedModel(
            "fixed-weight noise is not local stochastic".into(),
        ));
    }
    spec.validate(code.n(), code.num_checks())?;
    let mut hits = vec![0usize; probes.len()];
    for _ in 0..trials {
        let (e, d) = sample_error(spec, code, rng);
        for (h, probe) in hits.iter_mut().zip(probes) {
            if probe.qubits.iter().all(|&v| e.contains(v)) && probe.checks.iter().all(|&c| d.contains(c)) {
                *h += 1;
            }
        }
    }
    Ok(probes
        .iter()
        .zip(hits)
        .map(|(probe, h)| {
            let bound = spec.p().powi(probe.qubits.len() as i32) * spec.q().powi(probe.checks.len() as i32);
            let frequency = h as f64 / trials as f64;
            let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
            ProbeReport {
                size: (probe.qubits.len(), probe.checks.len()),
                hits: h,
                trials,
                frequency,
                bound,
                sigma,
                violation: frequency > bound + 4.0 * sigma,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_code;
    use crate::graph::{sample_biregular, BipartiteGraph};

    fn toy() -> CssCode {
        build_code(&BipartiteGraph::from_parity_check(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap())
    }

    #[test]
    fn extreme_probabilities() {
        let code = toy();
        let mut rng = trial_rng(1, 0);
        let (e, d) = sample_error(&NoiseSpec::iid(0.0, 0.0), &code, &mut rng);
        assert!(e.is_empty() && d.is_empty());
        let (e, _) = sample_error(&NoiseSpec::iid(1.0, 0.0), &code, &mut rng);
        assert_eq!(e.weight(), 13);
    }

    #[test]
    fn fixed_weight_and_validation() {
        let code = toy();
        let spec = NoiseSpec {
            qubit: QubitNoise::FixedWeight { w: 4 },
            syndrome: SyndromeNoise::FixedWeight { w: 2 },
        };
        let (e, d) = sample_error(&spec, &code, &mut trial_rng(3, 3));
        assert_eq!((e.weight(), d.weight()), (4, 2));
        assert!(spec.validate(13, 6).is_ok());
        assert!(NoiseSpec::iid(1.5, 0.0).validate(13, 6).is_err());
        let heavy = NoiseSpec { qubit: QubitNoise::FixedWeight { w: 14 }, syndrome: SyndromeNoise::None };
        assert!(heavy.validate(13, 6).is_err());
        assert!(matches!(
            ls_audit(&spec, &code, &[Probe::default()], 10, &mut trial_rng(0, 0)),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn observed_syndrome_examples() {
        let code = toy();
        let empty = code.empty_error();
        assert!(observed_syndrome(&code, &empty, &code.empty_syndrome()).is_empty());
        let d = BitSet::from_indices(6, [2]);
        assert_eq!(observed_syndrome(&code, &empty, &d), d);
        let e = BitSet::from_indices(13, [4, 11]);
        let s = code.syndrome(&e);
        let sub = BitSet::from_indices(6, s.iter().take(1));
        let mut expect = s.clone();
        expect.remove(sub.iter().next().unwrap());
        assert_eq!(observed_syndrome(&code, &e, &sub), expect);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let code = toy();
        let spec = NoiseSpec::iid(0.3, 0.3);
        let a = sample_error(&spec, &code, &mut trial_rng(9, 4));
        let b = sample_error(&spec, &code, &mut trial_rng(9, 4));
        assert_eq!(a, b);
        let draws: Vec<_> = (0..8).map(|s| sample_error(&spec, &code, &mut trial_rng(9, s))).collect();
        assert!(draws.iter().any(|x| *x != draws[0]));
    }

    #[test]
    fn iid_marginal_on_4500_qubits() {
        // 10^5 trials × 4500 qubits; check P[v ∈ E] for a few qubits and the
        // pooled rate within 3 binomial sigma.
        let code = build_code(&sample_biregular(60, 5, 10, 1).unwrap());
        let p = 0.01;
        let trials = 100_000;
        let probe = [0usize, 1234, 4499];
        let mut hits = [0usize; 3];
        let mut total = 0usize;
        let mut rng = trial_rng(42, 0);
        let spec = NoiseSpec::iid(p, 0.0);
        for _ in 0..trials {
            let (e, _) = sample_error(&spec, &code, &mut rng);
            total += e.weight();
            for (h, &v) in hits.iter_mut().zip(&probe) {
                *h += e.contains(v) as usize;
            }
        }
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for h in hits {
            assert!((h as f64 / trials as f64 - p).abs() <= 3.0 * sigma, "{h}");
        }
        let pooled = (p * (1.0 - p) / (trials * 4500) as f64).sqrt();
        assert!((total as f64 / (trials * 4500) as f64 - p).abs() <= 3.0 * pooled);
    }

    #[test]
    fn ls_audit_probes() {
        let code = toy();
        let spec = NoiseSpec::iid(0.1, 0.0);
        let probes = vec![
            Probe::default(),
            Probe { qubits: vec![3], checks: vec![] },
            Probe { qubits: vec![0, 7], checks: vec![] },
        ];
        let r = ls_audit(&spec, &code, &probes, 100_000, &mut trial_rng(5, 0)).unwrap();
        assert_eq!(r[0].frequency, 1.0);
        for rep in &r {
            assert!(!rep.violation);
            assert!((rep.frequency - rep.bound).abs() <= 4.0 * rep.sigma.max(1e-12));
        }
        assert!((r[2].bound - 0.01).abs() < 1e-12);
    }

    #[test]
    fn ls_audit_random_probes() {
        let code = toy();
        let spec = NoiseSpec::iid(0.2, 0.1);
        let mut rng = trial_rng(11, 1);
        let probes: Vec<Probe> = (0..100)
            .map(|i| {
                let k = i % 4;
                let qubits = rand::seq::index::sample(&mut rng, 13, k.min(3)).into_vec();
                let checks = if i % 5 == 0 { vec![i % 6] } else { vec![] };
                Probe { qubits, checks }
            })
            .collect();
        let r = ls_audit(&spec, &code, &probes, 20_000, &mut rng).unwrap();
        assert!(r.iter().all(|x| !x.violation));
    }
}
