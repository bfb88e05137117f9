//! On-disk router configuration (JSON) and its mapping onto [`RouterConfig`].

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crw_router::{RouterConfig, Transition, WaveguideSpec};

use crate::CliError;

fn default_site() -> usize {
    1
}

fn default_hopping() -> f64 {
    1.0
}

/// Input waveguide block. `site` is the 1-based lattice site the atom couples
/// to; `hopping` and `detuning` default to the unit-band convention.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub coupling: f64,
    #[serde(default = "default_site")]
    pub site: usize,
    #[serde(default = "default_hopping")]
    pub hopping: f64,
    #[serde(default)]
    pub detuning: f64,
}

/// Output waveguide block; outputs always attach at site 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub coupling: f64,
    #[serde(default = "default_hopping")]
    pub hopping: f64,
    #[serde(default)]
    pub detuning: f64,
}

/// Top-level config document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub rabi: f64,
    pub input: InputSpec,
    pub outputs: Vec<OutputSpec>,
}

impl ConfigDocument {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn to_router(&self) -> Result<RouterConfig, CliError> {
        let input = WaveguideSpec::new(
            self.input.detuning,
            self.input.hopping,
            self.input.coupling,
            self.input.site,
            Transition::ViaF,
        )?;
        let outputs = self
            .outputs
            .iter()
            .map(|o| WaveguideSpec::new(o.detuning, o.hopping, o.coupling, 1, Transition::ViaE))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RouterConfig::new(self.rabi, input, outputs)?)
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl From<&RouterConfig> for ConfigDocument {
    fn from(cfg: &RouterConfig) -> Self {
        Self {
            rabi: cfg.rabi,
            input: InputSpec {
                coupling: cfg.input.coupling,
                site: cfg.input.coupling_site,
                hopping: cfg.input.hopping,
                detuning: cfg.input.detuning,
            },
            outputs: cfg
                .outputs
                .iter()
                .map(|o| OutputSpec {
                    coupling: o.coupling,
                    hopping: o.hopping,
                    detuning: o.detuning,
                })
                .collect(),
        }
    }
}
