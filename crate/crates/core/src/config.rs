//! Scenario configuration and the built-in reproduction scenarios.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::actor::Personality;
use crate::error::{Error, Result};
use crate::knowledge::{check_unit, Ontology};
use crate::transfer::{BeliefWeight, TransferParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeTier {
    pub fraction: f64,
    pub target_k: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OntologySpec {
    #[default]
    Identity,
    Explicit(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub n_actors: usize,
    pub n_assertions: usize,
    pub n_receivers: usize,
    pub n_steps: u64,
    pub snapshot_every: u64,
    pub personality: Personality,
    pub knowledge_tiers: Vec<KnowledgeTier>,
    pub zeta: f64,
    pub xi: f64,
    pub delta_p: f64,
    pub w: f64,
    pub trust_init: f64,
    pub ontology: OntologySpec,
    pub ontology_belief_weight: BeliefWeight,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let third = 1.0 / 3.0;
        ScenarioConfig {
            name: "custom".into(),
            n_actors: 100,
            n_assertions: 10,
            n_receivers: 1,
            n_steps: 50_000,
            snapshot_every: 500,
            personality: Personality::EXPERT,
            knowledge_tiers: vec![
                KnowledgeTier {
                    fraction: third,
                    target_k: 0.9,
                },
                KnowledgeTier {
                    fraction: third,
                    target_k: 0.1,
                },
                KnowledgeTier {
                    fraction: third,
                    target_k: 0.5,
                },
            ],
            zeta: 1.0,
            xi: 0.5,
            delta_p: 0.01,
            w: 1.0,
            trust_init: 0.5,
            ontology: OntologySpec::Identity,
            ontology_belief_weight: BeliefWeight::Transferred,
            rng_seed: 0,
        }
    }
}

/// Parameter names accepted by [`ScenarioConfig::set_param`].
pub const SCALAR_PARAMS: &[&str] = &[
    "n_actors",
    "n_assertions",
    "n_receivers",
    "n_steps",
    "snapshot_every",
    "kappa",
    "rho",
    "pi",
    "zeta",
    "xi",
    "delta_p",
    "w",
    "trust_init",
    "rng_seed",
    "ontology_belief_weight",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("cannot parse `{value}` for {key}")))
}

impl ScenarioConfig {
    pub fn experts() -> Self {
        ScenarioConfig {
            name: "experts".into(),
            personality: Personality::EXPERT,
            ..ScenarioConfig::default()
        }
    }

    pub fn trolls() -> Self {
        ScenarioConfig {
            name: "trolls".into(),
            personality: Personality::TROLL,
            ..ScenarioConfig::default()
        }
    }

    /// Built-in scenarios sorted by name.
    pub fn builtins() -> Vec<ScenarioConfig> {
        vec![ScenarioConfig::experts(), ScenarioConfig::trolls()]
    }

    pub fn builtin(name: &str) -> Result<Self> {
        Self::builtins()
            .into_iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownScenario(name.to_string()))
    }

    /// Loads a config file, or the `config` section of a run manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        let parse_err = |source| Error::ConfigParse {
            path: path.to_path_buf(),
            source,
        };
        let value: serde_json::Value = serde_json::from_str(&text).map_err(parse_err)?;
        let value = match value {
            serde_json::Value::Object(mut map) if map.contains_key("tool_version") => {
                map.remove("config").unwrap_or_default()
            }
            other => other,
        };
        let cfg: ScenarioConfig = serde_json::from_value(value).map_err(parse_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set_param(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n_actors" => self.n_actors = parse(key, value)?,
            "n_assertions" => self.n_assertions = parse(key, value)?,
            "n_receivers" | "N" => self.n_receivers = parse(key, value)?,
            "n_steps" => self.n_steps = parse(key, value)?,
            "snapshot_every" => self.snapshot_every = parse(key, value)?,
            "kappa" => self.personality.kappa = parse(key, value)?,
            "rho" => self.personality.rho = parse(key, value)?,
            "pi" => self.personality.pi = parse(key, value)?,
            "zeta" => self.zeta = parse(key, value)?,
            "xi" => self.xi = parse(key, value)?,
            "delta_p" => self.delta_p = parse(key, value)?,
            "w" => self.w = parse(key, value)?,
            "trust_init" => self.trust_init = parse(key, value)?,
            "rng_seed" => self.rng_seed = parse(key, value)?,
            "ontology_belief_weight" => {
                self.ontology_belief_weight = match value.trim() {
                    "transferred" => BeliefWeight::Transferred,
                    "source" => BeliefWeight::Source,
                    other => {
                        return Err(Error::config(format!(
                            "ontology_belief_weight must be transferred or source, got `{other}`"
                        )))
                    }
                }
            }
            _ => return Err(Error::UnknownParameter(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_actors < 2 {
            return Err(Error::config("n_actors must be at least 2"));
        }
        if self.n_assertions == 0 {
            return Err(Error::config("n_assertions must be at least 1"));
        }
        if self.n_receivers == 0 || self.n_receivers >= self.n_actors {
            return Err(Error::config(format!(
                "n_receivers must be in 1..{}, got {}",
                self.n_actors, self.n_receivers
            )));
        }
        if self.n_receivers > 16 {
            return Err(Error::config(
                "n_receivers above 16 makes the game intractable",
            ));
        }
        if self.snapshot_every == 0 {
            return Err(Error::config("snapshot_every must be at least 1"));
        }
        self.personality.validate()?;
        if self.knowledge_tiers.is_empty() {
            return Err(Error::config("at least one knowledge tier is required"));
        }
        for tier in &self.knowledge_tiers {
            check_unit("tier fraction", tier.fraction)?;
            check_unit("tier target_k", tier.target_k)?;
        }
        let total: f64 = self.knowledge_tiers.iter().map(|t| t.fraction).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "tier fractions must sum to 1, got {total}"
            )));
        }
        check_unit("w", self.w)?;
        check_unit("trust_init", self.trust_init)?;
        self.transfer_params().validate()?;
        self.build_ontology()?;
        Ok(())
    }

    pub fn transfer_params(&self) -> TransferParams {
        TransferParams {
            remembrance: self.zeta,
            trust_memory: self.xi,
            popularity_decay: self.delta_p,
            belief_weight: self.ontology_belief_weight,
        }
    }

    pub fn build_ontology(&self) -> Result<Ontology> {
        match &self.ontology {
            OntologySpec::Identity => Ok(Ontology::identity(self.n_assertions)),
            OntologySpec::Explicit(rows) => {
                let m = Ontology::from_rows(rows)?;
                if m.size() != self.n_assertions {
                    return Err(Error::config(format!(
                        "ontology is {0}x{0} but n_assertions is {1}",
                        m.size(),
                        self.n_assertions
                    )));
                }
                Ok(m)
            }
        }
    }
}
