//! Named problem constructors with tunable parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use sdre_core::benchmarks::{
    InvertedPendulum, Lorenz, LorenzParams, PendulumParams, LORENZ_NAME, PENDULUM_NAME,
};
use sdre_core::model::ProblemSpec;

type Builder = Box<dyn Fn(&BTreeMap<String, f64>) -> Result<ProblemSpec, String> + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInfo {
    pub name: String,
    pub state_dim: usize,
    pub input_dim: usize,
    /// Parameter names with their default values.
    pub defaults: Vec<(String, f64)>,
}

struct Entry {
    info: ProblemInfo,
    build: Builder,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegistryError {
    Duplicate(String),
    UnknownProblem(String),
    UnknownParameter { problem: String, parameter: String },
    InvalidParameters { problem: String, reason: String },
}

impl fmt::Display for RegistryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegistryError::Duplicate(n) => write!(f, "problem '{n}' is already registered"),
            RegistryError::UnknownProblem(n) => write!(f, "unknown problem '{n}'"),
            RegistryError::UnknownParameter { problem, parameter } => {
                write!(f, "problem '{problem}' has no parameter '{parameter}'")
            }
            RegistryError::InvalidParameters { problem, reason } => {
                write!(f, "invalid parameters for '{problem}': {reason}")
            }
        }
    }
}

impl std::error::Error for RegistryError {}

pub struct Registry {
    entries: BTreeMap<String, Entry>,
}

impl Registry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// The two built-in benchmarks.
    pub fn with_defaults() -> Self {
        let mut reg = Self::empty();
        let l = LorenzParams::default();
        reg.register(
            ProblemInfo {
                name: LORENZ_NAME.into(),
                state_dim: 3,
                input_dim: 1,
                defaults: vec![
                    ("sigma".into(), l.sigma),
                    ("beta".into(), l.beta),
                    ("rho".into(), l.rho),
                    ("q_scale".into(), l.q_scale),
                ],
            },
            |p| {
                let params = LorenzParams {
                    sigma: p["sigma"],
                    beta: p["beta"],
                    rho: p["rho"],
                    q_scale: p["q_scale"],
                };
                Lorenz::new(params)
                    .map(|l| Arc::new(l) as ProblemSpec)
                    .ok_or_else(|| "sigma and beta must be positive".into())
            },
        )
        .expect("fresh registry");
        let d = PendulumParams::default();
        reg.register(
            ProblemInfo {
                name: PENDULUM_NAME.into(),
                state_dim: 4,
                input_dim: 1,
                defaults: vec![
                    ("cart_mass".into(), d.cart_mass),
                    ("pole_mass".into(), d.pole_mass),
                    ("length".into(), d.length),
                    ("gravity".into(), d.gravity),
                ],
            },
            |p| {
                let params = PendulumParams {
                    cart_mass: p["cart_mass"],
                    pole_mass: p["pole_mass"],
                    length: p["length"],
                    gravity: p["gravity"],
                };
                InvertedPendulum::new(params)
                    .map(|p| Arc::new(p) as ProblemSpec)
                    .ok_or_else(|| "need cart_mass > 0, pole_mass >= 0, length > 0".into())
            },
        )
        .expect("fresh registry");
        reg
    }

    /// Adds a problem. `build` receives every declared parameter, defaults
    /// filled in.
    pub fn register<F>(&mut self, info: ProblemInfo, build: F) -> Result<(), RegistryError>
    where
        F: Fn(&BTreeMap<String, f64>) -> Result<ProblemSpec, String> + Send + Sync + 'static,
    {
        if self.entries.contains_key(&info.name) {
            return Err(RegistryError::Duplicate(info.name));
        }
        self.entries.insert(
            info.name.clone(),
            Entry {
                info,
                build: Box::new(build),
            },
        );
        Ok(())
    }

    /// Registered problems sorted by name.
    pub fn list(&self) -> Vec<ProblemInfo> {
        self.entries.values().map(|e| e.info.clone()).collect()
    }

    pub fn info(&self, name: &str) -> Option<&ProblemInfo> {
        self.entries.get(name).map(|e| &e.info)
    }

    pub fn build(
        &self,
        name: &str,
        overrides: &BTreeMap<String, f64>,
    ) -> Result<ProblemSpec, RegistryError> {
        let entry = self
            .entries
            .get(name)
            .ok_or_else(|| RegistryError::UnknownProblem(name.into()))?;
        let mut params: BTreeMap<String, f64> = entry.info.defaults.iter().cloned().collect();
        for (k, v) in overrides {
            match params.get_mut(k) {
                Some(slot) => *slot = *v,
                None => {
                    return Err(RegistryError::UnknownParameter {
                        problem: name.into(),
                        parameter: k.clone(),
                    })
                }
            }
        }
        (entry.build)(&params).map_err(|reason| RegistryError::InvalidParameters {
            problem: name.into(),
            reason,
        })
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::with_defaults()
    }
}
