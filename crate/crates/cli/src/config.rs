// Copyright 2026 The qba developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Run configuration: defaults, config-file loading (flat `key=value` or
//! JSON) and flag overrides.

use serde::{Deserialize, Serialize};

use qba::adversary::Scenario;
use qba::engine::ProtocolConfig;
use qba::hardy::optimal_alpha;

use crate::CliError;

/// Everything one Monte Carlo batch needs; output paths are command-line
/// only so reports stay byte-identical across runs of the same batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    pub n: usize,
    pub trials: u32,
    pub seed: u64,
    pub alpha: f64,
    pub message_bit: u8,
    pub message_fraction: f64,
    pub flip_prob: f64,
    pub epsilon: f64,
    pub k_min: usize,
    pub min_runs: usize,
    pub chi_fraction: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: "honest".into(),
            n: 256,
            trials: 100,
            seed: 0,
            alpha: optimal_alpha(),
            message_bit: 1,
            message_fraction: 0.75,
            flip_prob: 0.0,
            epsilon: 0.0,
            k_min: 1,
            min_runs: 16,
            chi_fraction: 1.0,
        }
    }
}

impl RunConfig {
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        Scenario::from_name(&self.scenario).map_err(CliError::config)
    }

    /// The protocol configuration of one trial with the given seed.
    pub fn protocol_config(&self, seed: u64) -> Result<ProtocolConfig, CliError> {
        let config = ProtocolConfig {
            n: self.n,
            alpha: self.alpha,
            message_bit: self.message_bit,
            message_fraction: self.message_fraction,
            flip_prob: self.flip_prob,
            epsilon: self.epsilon,
            k_min: self.k_min,
            min_runs: self.min_runs,
            seed,
            scenario: self.scenario()?,
            chi_fraction: self.chi_fraction,
        };
        config.validate().map_err(CliError::config)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        self.protocol_config(0)?;
        Ok(())
    }

    /// Load from a JSON object or a flat `key=value` file (one pair per
    /// line, `#` comments allowed).
    pub fn from_file(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        } else {
            Self::from_key_values(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }

    fn from_key_values(text: &str) -> Result<Self, String> {
        let mut config = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected key=value", lineno + 1));
            };
            let (key, value) = (key.trim(), value.trim());
            let parse = |what: &str| format!("line {}: bad {what} value `{value}`", lineno + 1);
            match key {
                "scenario" => config.scenario = value.to_string(),
                "n" => config.n = value.parse().map_err(|_| parse("n"))?,
                "trials" => config.trials = value.parse().map_err(|_| parse("trials"))?,
                "seed" => config.seed = value.parse().map_err(|_| parse("seed"))?,
                "alpha" => config.alpha = value.parse().map_err(|_| parse("alpha"))?,
                "message_bit" => {
                    config.message_bit = value.parse().map_err(|_| parse("message_bit"))?
                }
                "message_fraction" => {
                    config.message_fraction =
                        value.parse().map_err(|_| parse("message_fraction"))?
                }
                "flip_prob" => config.flip_prob = value.parse().map_err(|_| parse("flip_prob"))?,
                "epsilon" => config.epsilon = value.parse().map_err(|_| parse("epsilon"))?,
                "k_min" => config.k_min = value.parse().map_err(|_| parse("k_min"))?,
                "min_runs" => config.min_runs = value.parse().map_err(|_| parse("min_runs"))?,
                "chi_fraction" => {
                    config.chi_fraction = value.parse().map_err(|_| parse("chi_fraction"))?
                }
                other => return Err(format!("line {}: unknown key `{other}`", lineno + 1)),
            }
        }
        Ok(config)
    }
}
