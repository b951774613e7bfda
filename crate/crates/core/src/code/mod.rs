//! Bit-flip repetition code spread over K independent paths.
//!
//! Errors are tracked as classical flip vectors (a Pauli frame): qubit i is
//! flipped with probability p_i, parity checks between neighbours give K-1
//! syndrome bits, and a decoder picks one of the two flip patterns consistent
//! with the syndrome. A logical error is a residual flip of every qubit.
//!
//! Patterns and syndromes are packed little-endian into `u64` masks: bit i of
//! a pattern is qubit i, bit i of a syndrome is the parity of qubits i, i+1.

mod decoder;
mod estimate;
mod mapping;

pub use decoder::{build_lut, decode_mwm, decoder, decoders, Decoder, DecoderFactory, LookupTable, MinWeight};
pub use estimate::{logical_error_exact, logical_error_mc, DecodingReport};
pub use mapping::{
    flip_probability_from_fidelity, flip_mapping, flip_mappings, BitFlipMapping, FlipMapping,
    MappingFactory, WernerMapping,
};

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// Largest K for which syndrome tables and exact enumeration are built.
pub const MAX_ENUMERATED_K: usize = 25;
/// Largest K representable in a packed pattern.
pub const MAX_K: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeConfig {
    flip_probabilities: Vec<f64>,
}

impl CodeConfig {
    pub fn new(flip_probabilities: Vec<f64>) -> Result<Self> {
        let k = flip_probabilities.len();
        if k == 0 {
            return Err(Error::InvalidConfig("repetition code needs K >= 1".into()));
        }
        if k > MAX_K {
            return Err(Error::Capacity { k, limit: MAX_K });
        }
        for &p in &flip_probabilities {
            check_probability("flip probability", p)?;
        }
        Ok(Self { flip_probabilities })
    }

    pub fn uniform(k: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; k])
    }

    pub fn k(&self) -> usize {
        self.flip_probabilities.len()
    }

    pub fn flip_probabilities(&self) -> &[f64] {
        &self.flip_probabilities
    }

    /// True when every qubit is more likely intact than flipped, the regime
    /// in which decoding helps.
    pub fn is_meaningful(&self) -> bool {
        self.flip_probabilities.iter().all(|&p| p <= 0.5)
    }

    pub fn is_uniform(&self) -> bool {
        self.flip_probabilities
            .windows(2)
            .all(|w| w[0] == w[1])
    }
}

/// Parity-check outcomes; `bits[i]` is the parity of qubits i and i+1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syndrome {
    pub bits: Vec<u8>,
}

impl Syndrome {
    pub fn from_mask(mask: u64, k: usize) -> Self {
        Self {
            bits: (0..k.saturating_sub(1)).map(|i| ((mask >> i) & 1) as u8).collect(),
        }
    }

    pub fn mask(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &b)| m | (u64::from(b & 1) << i))
    }
}

pub(crate) fn full_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

pub(crate) fn pack(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |m, (i, &b)| m | (u64::from(b & 1) << i))
}

pub(crate) fn unpack(mask: u64, k: usize) -> Vec<u8> {
    (0..k).map(|i| ((mask >> i) & 1) as u8).collect()
}

pub(crate) fn syndrome_mask(pattern: u64, k: usize) -> u64 {
    (pattern ^ (pattern >> 1)) & full_mask(k.saturating_sub(1))
}

/// The consistent pattern that leaves qubit 0 untouched; the other one is
/// its complement.
pub(crate) fn base_candidate(syndrome: u64, k: usize) -> u64 {
    let mut pattern = 0u64;
    let mut bit = 0u64;
    for i in 0..k.saturating_sub(1) {
        bit ^= (syndrome >> i) & 1;
        pattern |= bit << (i + 1);
    }
    pattern
}

/// Parity checks of a K-qubit flip pattern.
pub fn syndrome(pattern: &[u8], k: usize) -> Result<Syndrome> {
    if pattern.len() != k {
        return Err(Error::InvalidInput(format!(
            "flip pattern has {} entries, code has K={k}",
            pattern.len()
        )));
    }
    if pattern.iter().any(|&b| b > 1) {
        return Err(Error::InvalidInput("flip pattern entries must be 0 or 1".into()));
    }
    if k > MAX_K {
        return Err(Error::Capacity { k, limit: MAX_K });
    }
    Ok(Syndrome::from_mask(syndrome_mask(pack(pattern), k), k))
}
