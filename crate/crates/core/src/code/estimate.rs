use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{full_mask, syndrome_mask, CodeConfig, Decoder, MAX_ENUMERATED_K};
use crate::error::{Error, Result};

/// Fixed work split for Monte Carlo; results do not depend on thread count.
const MC_CHUNKS: u64 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodingReport {
    pub decoder: String,
    pub k: usize,
    pub flip_probabilities: Vec<f64>,
    /// Exact enumeration; absent when K is too large to enumerate.
    pub logical_error_exact: Option<f64>,
    pub logical_error_mc: f64,
    pub mc_stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl DecodingReport {
    /// (mc - exact) / stderr, when both are available and stderr > 0.
    pub fn z_score(&self) -> Option<f64> {
        let exact = self.logical_error_exact?;
        (self.mc_stderr > 0.0).then(|| (self.logical_error_mc - exact) / self.mc_stderr)
    }
}

/// Probability that decoding leaves every qubit flipped, summed over all 2^K
/// error patterns.
pub fn logical_error_exact(cfg: &CodeConfig, decoder: &dyn Decoder) -> Result<f64> {
    let k = cfg.k();
    if k > MAX_ENUMERATED_K {
        return Err(Error::Capacity {
            k,
            limit: MAX_ENUMERATED_K,
        });
    }
    if decoder.k() != k {
        return Err(Error::InvalidInput(format!(
            "decoder built for K={}, code has K={k}",
            decoder.k()
        )));
    }
    // Pattern probability = low-half table x high-half table.
    let probs = cfg.flip_probabilities();
    let lo_bits = k / 2;
    let half_table = |offset: usize, bits: usize| -> Vec<f64> {
        (0..1u64 << bits)
            .map(|m| {
                (0..bits)
                    .map(|i| {
                        let p = probs[offset + i];
                        if (m >> i) & 1 == 1 {
                            p
                        } else {
                            1.0 - p
                        }
                    })
                    .product()
            })
            .collect()
    };
    let lo = half_table(0, lo_bits);
    let hi = half_table(lo_bits, k - lo_bits);
    let lo_mask = full_mask(lo_bits);
    let all = full_mask(k);

    let total: f64 = (0..1u64 << k)
        .filter(|&pattern| pattern ^ decoder.correction(syndrome_mask(pattern, k)) == all)
        .map(|pattern| lo[(pattern & lo_mask) as usize] * hi[(pattern >> lo_bits) as usize])
        .sum();
    Ok(total.clamp(0.0, 1.0))
}

fn chunk_seed(seed: u64, chunk: u64) -> u64 {
    // splitmix64 finalizer over (seed, chunk)
    let mut z = seed ^ chunk.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Samples `trials` flip patterns, decodes each, and counts logical failures.
pub fn logical_error_mc(
    cfg: &CodeConfig,
    decoder: &dyn Decoder,
    trials: u64,
    seed: u64,
) -> Result<DecodingReport> {
    if trials < 10_000 {
        return Err(Error::InvalidInput(format!(
            "Monte Carlo needs >= 10000 trials, got {trials}"
        )));
    }
    let k = cfg.k();
    if decoder.k() != k {
        return Err(Error::InvalidInput(format!(
            "decoder built for K={}, code has K={k}",
            decoder.k()
        )));
    }
    let probs = cfg.flip_probabilities();
    let all = full_mask(k);

    let failures: u64 = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let n = trials / MC_CHUNKS + u64::from(chunk < trials % MC_CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(seed, chunk));
            let mut fails = 0u64;
            for _ in 0..n {
                let mut pattern = 0u64;
                for (i, &p) in probs.iter().enumerate() {
                    if rng.gen::<f64>() < p {
                        pattern |= 1 << i;
                    }
                }
                if pattern ^ decoder.correction(syndrome_mask(pattern, k)) == all {
                    fails += 1;
                }
            }
            fails
        })
        .sum();

    let estimate = failures as f64 / trials as f64;
    let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    let exact = if k <= MAX_ENUMERATED_K {
        Some(logical_error_exact(cfg, decoder)?)
    } else {
        None
    };
    Ok(DecodingReport {
        decoder: decoder.name().to_string(),
        k,
        flip_probabilities: probs.to_vec(),
        logical_error_exact: exact,
        logical_error_mc: estimate,
        mc_stderr: stderr,
        trials,
        seed,
    })
}
