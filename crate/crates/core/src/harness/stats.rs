//! Binomial intervals and the Mann-Kendall trend test.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Wilson score interval for `k` successes in `n` trials at two-sided
/// confidence `level`.
pub fn wilson_interval(k: u64, n: u64, level: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = std_normal().inverse_cdf(0.5 + level / 2.0);
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MannKendall {
    pub n: usize,
    pub s: i64,
    pub variance: f64,
    pub z: f64,
    /// One-sided p-value for an upward trend.
    pub p_upward: f64,
}

impl MannKendall {
    pub fn upward_at(&self, alpha: f64) -> bool {
        self.p_upward < alpha
    }
}

/// Mann-Kendall statistic with the tie-corrected variance and continuity
/// correction.
pub fn mann_kendall(xs: &[f64]) -> MannKendall {
    let n = xs.len();
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            s += match xs[j].partial_cmp(&xs[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut ties = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        ties += t * (t - 1.0) * (2.0 * t + 5.0);
        i = j;
    }
    let nf = n as f64;
    let variance = (nf * (nf - 1.0) * (2.0 * nf + 5.0) - ties) / 18.0;
    let z = if variance <= 0.0 {
        0.0
    } else if s > 0 {
        (s - 1) as f64 / variance.sqrt()
    } else if s < 0 {
        (s + 1) as f64 / variance.sqrt()
    } else {
        0.0
    };
    MannKendall {
        n,
        s,
        variance,
        z,
        p_upward: 1.0 - std_normal().cdf(z),
    }
}
