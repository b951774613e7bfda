use super::{base_candidate, full_mask, unpack, CodeConfig, Syndrome, MAX_ENUMERATED_K};
use crate::error::{Error, Result};
use crate::registry::Registry;

/// Maps a syndrome to the flip pattern to undo.
pub trait Decoder: Send + Sync {
    fn name(&self) -> &'static str;

    fn k(&self) -> usize;

    /// Correction for a packed syndrome.
    fn correction(&self, syndrome: u64) -> u64;

    fn decode(&self, s: &Syndrome) -> Vec<u8> {
        unpack(self.correction(s.mask()), self.k())
    }
}

/// Minimum-weight matching on the 1-D defect chain: the lighter of the two
/// consistent patterns, ties going to the one that leaves qubit 0 alone.
#[derive(Clone, Copy, Debug)]
pub struct MinWeight {
    k: usize,
}

impl MinWeight {
    pub fn new(k: usize) -> Self {
        Self { k }
    }
}

impl Decoder for MinWeight {
    fn name(&self) -> &'static str {
        "mwm"
    }

    fn k(&self) -> usize {
        self.k
    }

    fn correction(&self, syndrome: u64) -> u64 {
        let base = base_candidate(syndrome, self.k);
        let weight = base.count_ones() as usize;
        if 2 * weight > self.k {
            base ^ full_mask(self.k)
        } else {
            base
        }
    }
}

/// Precomputed maximum-likelihood corrections for every syndrome under the
/// per-qubit flip probabilities.
#[derive(Clone, Debug)]
pub struct LookupTable {
    k: usize,
    table: Vec<u64>,
}

impl LookupTable {
    pub fn build(cfg: &CodeConfig) -> Result<Self> {
        let k = cfg.k();
        if k > MAX_ENUMERATED_K {
            return Err(Error::Capacity {
                k,
                limit: MAX_ENUMERATED_K,
            });
        }
        let probs = cfg.flip_probabilities();
        let ln_flip: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
        let ln_keep: Vec<f64> = probs.iter().map(|p| (-p).ln_1p()).collect();
        let log_likelihood = |pattern: u64| -> f64 {
            (0..k)
                .map(|i| if (pattern >> i) & 1 == 1 { ln_flip[i] } else { ln_keep[i] })
                .sum()
        };
        let entries = 1usize << (k - 1);
        let table = (0..entries as u64)
            .map(|s| {
                let base = base_candidate(s, k);
                let other = base ^ full_mask(k);
                if log_likelihood(other) > log_likelihood(base) {
                    other
                } else {
                    base
                }
            })
            .collect();
        Ok(Self { k, table })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl Decoder for LookupTable {
    fn name(&self) -> &'static str {
        "lut"
    }

    fn k(&self) -> usize {
        self.k
    }

    fn correction(&self, syndrome: u64) -> u64 {
        self.table[syndrome as usize]
    }
}

pub fn decode_mwm(s: &Syndrome, cfg: &CodeConfig) -> Result<Vec<u8>> {
    if s.bits.len() + 1 != cfg.k() {
        return Err(Error::InvalidInput(format!(
            "syndrome has {} bits, code has K={}",
            s.bits.len(),
            cfg.k()
        )));
    }
    Ok(MinWeight::new(cfg.k()).decode(s))
}

pub fn build_lut(cfg: &CodeConfig) -> Result<LookupTable> {
    LookupTable::build(cfg)
}

pub type DecoderFactory = fn(&CodeConfig) -> Result<Box<dyn Decoder>>;

/// Built-in decoders keyed by name.
pub fn decoders() -> Registry<DecoderFactory> {
    let mut reg: Registry<DecoderFactory> = Registry::new("decoder");
    reg.register("mwm", |cfg| Ok(Box::new(MinWeight::new(cfg.k()))))
        .register("lut", |cfg| Ok(Box::new(LookupTable::build(cfg)?)));
    reg
}

pub fn decoder(name: &str, cfg: &CodeConfig) -> Result<Box<dyn Decoder>> {
    (decoders().get(name)?)(cfg)
}
