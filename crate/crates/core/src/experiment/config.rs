use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::buyers::{BuyerKind, BuyerModel};
use crate::error::{Error, Result};
use crate::instances::InstanceSpec;
use crate::sellers::{PolicySpec, TwoPhaseConfig};

/// Elimination parameter: a fixed value or `"auto"` for `d^(-2/3) T^(-1/3)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LambdaSetting {
    #[default]
    Auto,
    Fixed(f64),
}

impl LambdaSetting {
    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Auto => None,
            Self::Fixed(v) => Some(*v),
        }
    }
}

impl Serialize for LambdaSetting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Auto => s.serialize_str("auto"),
            Self::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for LambdaSetting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = LambdaSetting;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"auto\" or a number in (0, 1]")
            }

            fn visit_str<E: serde::de::Error>(
                self,
                v: &str,
            ) -> std::result::Result<Self::Value, E> {
                if v == "auto" {
                    Ok(LambdaSetting::Auto)
                } else {
                    Err(E::custom(format!("expected \"auto\", got {v:?}")))
                }
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<Self::Value, E> {
                Ok(LambdaSetting::Fixed(v))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
                Ok(LambdaSetting::Fixed(v as f64))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                Ok(LambdaSetting::Fixed(v as f64))
            }
        }
        d.deserialize_any(Visitor)
    }
}

/// Phase-1 constant used unless a config overrides it. Much smaller than the
/// analysis constant so that phase 1 stays short at desk-scale horizons.
pub const DESK_PHASE1_CONSTANT: f64 = 2.0;

fn default_eta() -> f64 {
    0.1
}
fn default_replicates() -> u64 {
    1
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_phase1_constant() -> f64 {
    DESK_PHASE1_CONSTANT
}
fn default_parallel() -> bool {
    true
}

/// Experiment description, read from a TOML file.
///
/// ```toml
/// policies = ["two_phase", "fixed:0.5"]
/// buyer = "fixed_confidence"
/// eta = 0.1
/// horizons = [4096, 8192, 16384]
/// replicates = 30
/// base_seed = 7
/// output_dir = "out/hard"
/// phase1_constant = 2.0
/// lambda = "auto"
///
/// [instance]
/// family = "hard"
/// d = 3
/// eta = 0.1
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub policies: Vec<PolicySpec>,
    pub buyer: BuyerKind,
    #[serde(default = "default_eta")]
    pub eta: f64,
    pub horizons: Vec<u64>,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_phase1_constant")]
    pub phase1_constant: f64,
    #[serde(default)]
    pub lambda: LambdaSetting,
    /// Run episodes on the rayon pool. Results do not depend on this flag.
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn buyer_model(&self) -> Result<BuyerModel> {
        BuyerModel::new(self.buyer, self.eta)
    }

    pub fn two_phase(&self) -> TwoPhaseConfig {
        TwoPhaseConfig {
            lambda: self.lambda.value(),
            phase1_constant: self.phase1_constant,
            eta: self.eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.horizons.is_empty() {
            return Err(Error::Config("at least one horizon is required".into()));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("horizons must be strictly increasing".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("at least one policy is required".into()));
        }
        let names: std::collections::BTreeSet<String> =
            self.policies.iter().map(|p| p.to_string()).collect();
        if names.len() != self.policies.len() {
            return Err(Error::Config("policies must be distinct".into()));
        }
        self.buyer_model()
            .map_err(|e| Error::Config(format!("buyer model: {e}")))?;
        if let LambdaSetting::Fixed(v) = self.lambda {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("lambda must lie in (0, 1], got {v}")));
            }
        }
        if !(self.phase1_constant.is_finite() && self.phase1_constant >= 0.0) {
            return Err(Error::Config("phase1_constant must be >= 0".into()));
        }
        for &horizon in &self.horizons {
            let instance = self
                .instance
                .resolve(horizon)
                .map_err(|e| Error::Config(format!("instance at T = {horizon}: {e}")))?;
            for policy in &self.policies {
                policy
                    .build(&instance, &self.two_phase())
                    .map_err(|e| Error::Config(format!("policy {policy} at T = {horizon}: {e}")))?;
            }
        }
        Ok(())
    }
}
