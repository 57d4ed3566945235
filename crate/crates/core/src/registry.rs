//! Name-keyed registries of interchangeable strategies.
//!
//! Each pipeline stage that admits more than one algorithm (color decoding of
//! spherical-harmonic coefficients, intensity estimation, placement sampling)
//! exposes a trait and a registry of named factories. Callers select a variant
//! at runtime by name, usually from a CLI flag or config file.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

type Factory<T> = Box<dyn Fn() -> Box<T> + Send + Sync>;

pub struct Registry<T: ?Sized> {
    family: &'static str,
    default: &'static str,
    factories: BTreeMap<&'static str, Factory<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(family: &'static str, default: &'static str) -> Self {
        Self {
            family,
            default,
            factories: BTreeMap::new(),
        }
    }

    /// Registers `factory` under `name`, replacing any previous entry.
    pub fn register<F>(&mut self, name: &'static str, factory: F) -> &mut Self
    where
        F: Fn() -> Box<T> + Send + Sync + 'static,
    {
        self.factories.insert(name, Box::new(factory));
        self
    }

    pub fn create(&self, name: &str) -> Result<Box<T>> {
        match self.factories.get(name) {
            Some(factory) => Ok(factory()),
            None => Err(Error::UnknownStrategy {
                family: self.family,
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            }),
        }
    }

    pub fn create_default(&self) -> Box<T> {
        self.create(self.default)
            .expect("registry default must be registered")
    }

    pub fn default_name(&self) -> &'static str {
        self.default
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("family", &self.family)
            .field("default", &self.default)
            .field("names", &self.factories.keys().collect::<Vec<_>>())
            .finish()
    }
}
