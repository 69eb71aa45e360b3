//! Finite-shot estimates of correlation tables.
//!
//! Each setting pair `(x, y)` draws from its own ChaCha20 stream: the seed is
//! shared and the stream id is `4x + y`, so one pair's draws never depend on
//! another's.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};

use crate::correlations::{compute_tables, CorrelationTables};
use crate::error::{Error, Result};
use crate::ideal::{Realization, BOB_SETTINGS};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub shots_per_pair: u64,
    pub estimated: CorrelationTables,
    /// Largest `√(p(1-p)/shots)` over the exact probabilities.
    pub stderr_max: f64,
    pub seed: u64,
}

pub fn stream_id(x: usize, y: usize) -> u64 {
    (BOB_SETTINGS * x + y) as u64
}

/// Counts for `shots` draws from `probs`, as a chain of conditional binomials.
/// Negative probabilities are treated as zero.
pub fn multinomial(probs: &[f64], shots: u64, rng: &mut ChaCha20Rng) -> Vec<u64> {
    let clamped: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
    let mut remaining_mass: f64 = clamped.iter().sum();
    let mut remaining = shots;
    let mut counts = vec![0; probs.len()];
    let last = clamped.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    for (i, &p) in clamped.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == last {
            counts[i] = remaining;
            break;
        }
        let q = if remaining_mass > 0.0 { (p / remaining_mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(remaining, q).expect("q is a probability").sample(rng);
        counts[i] = k;
        remaining -= k;
        remaining_mass -= p;
    }
    counts
}

/// Samples every table present in `exact`.
pub fn sample_from_tables(exact: &CorrelationTables, shots: u64, seed: u64) -> Result<SampleResult> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut estimated = CorrelationTables::empty(exact.d());
    let mut spread_max = 0.0f64;
    for (x, y) in exact.present_pairs() {
        let probs = exact.require(x, y)?;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id(x, y));
        let counts = multinomial(probs, shots, &mut rng);
        estimated.set(x, y, counts.iter().map(|&k| k as f64 / shots as f64).collect())?;
        for &p in probs {
            let p = p.clamp(0.0, 1.0);
            spread_max = spread_max.max((p * (1.0 - p)).sqrt());
        }
    }
    // Dividing by √shots keeps the 1/√N scaling exact in floating point.
    let stderr_max = spread_max / (shots as f64).sqrt();
    Ok(SampleResult { shots_per_pair: shots, estimated, stderr_max, seed })
}

pub fn sample_tables(r: &Realization, shots: u64, seed: u64) -> Result<SampleResult> {
    sample_from_tables(&compute_tables(r)?, shots, seed)
}
