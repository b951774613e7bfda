//! Name-keyed registries of interchangeable strategies.
//!
//! Every family of algorithm variants (queue backends, decoders, fidelity to
//! flip-probability mappings) is exposed as a trait object and registered
//! under a short name. Configuration files and CLI flags select a variant by
//! that name at runtime.

use crate::error::{Error, Result};

/// Ordered collection of named factories for one strategy family.
pub struct Registry<F> {
    kind: &'static str,
    entries: Vec<(&'static str, F)>,
}

impl<F> Registry<F> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    /// Adds a factory. A later registration under the same name replaces the
    /// earlier one.
    pub fn register(&mut self, name: &'static str, factory: F) -> &mut Self {
        if let Some(slot) = self.entries.iter_mut().find(|(n, _)| *n == name) {
            slot.1 = factory;
        } else {
            self.entries.push((name, factory));
        }
        self
    }

    pub fn get(&self, name: &str) -> Result<&F> {
        self.entries
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, f)| f)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_ok()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}
