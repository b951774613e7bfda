use crate::error::{check_probability, Result};
use crate::registry::Registry;

/// Converts a path fidelity into the bit-flip probability seen by the code.
pub trait FlipMapping: Send + Sync {
    fn name(&self) -> &'static str;

    fn flip_probability(&self, fidelity: f64) -> f64;
}

/// X and Y weight of an isotropic Pauli channel with the given fidelity:
/// 2(1 - f)/3.
#[derive(Clone, Copy, Debug, Default)]
pub struct WernerMapping;

impl FlipMapping for WernerMapping {
    fn name(&self) -> &'static str {
        "werner"
    }

    fn flip_probability(&self, fidelity: f64) -> f64 {
        2.0 * (1.0 - fidelity) / 3.0
    }
}

/// All lost fidelity is a bit flip: 1 - f.
#[derive(Clone, Copy, Debug, Default)]
pub struct BitFlipMapping;

impl FlipMapping for BitFlipMapping {
    fn name(&self) -> &'static str {
        "bitflip"
    }

    fn flip_probability(&self, fidelity: f64) -> f64 {
        1.0 - fidelity
    }
}

pub type MappingFactory = fn() -> Box<dyn FlipMapping>;

pub fn flip_mappings() -> Registry<MappingFactory> {
    let mut reg: Registry<MappingFactory> = Registry::new("fidelity mapping");
    reg.register("werner", || Box::new(WernerMapping))
        .register("bitflip", || Box::new(BitFlipMapping));
    reg
}

pub fn flip_mapping(name: &str) -> Result<Box<dyn FlipMapping>> {
    Ok((flip_mappings().get(name)?)())
}

pub fn flip_probability_from_fidelity(fidelity: f64, mapping: &dyn FlipMapping) -> Result<f64> {
    let f = check_probability("path fidelity", fidelity)?;
    Ok(mapping.flip_probability(f).clamp(0.0, 1.0))
}
