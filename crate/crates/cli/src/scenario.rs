//! Scenario document schema.
//!
//! Scenarios are TOML with a strict schema: unknown keys are rejected so a
//! misspelled rate cannot silently fall back to a default. The document must
//! also pass full network validation before it is accepted.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use caseflow_core::{
    validate_network, ArrivalModel, CountryId, CountrySpec, Discipline, NetworkSpec, Objective,
    ObjectiveMode, Strategy, ValidationReport,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    /// Syntax errors and schema violations, with line/column and field path.
    #[error("{0}")]
    Schema(#[from] toml::de::Error),
    #[error("field {field}: {message}")]
    Invalid { field: String, message: String },
    #[error(transparent)]
    Network(#[from] ValidationReport),
}

/// One country as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountryEntry {
    pub id: String,
    pub capacity_per_period: f64,
    #[serde(default)]
    pub national_rate: f64,
    #[serde(default)]
    pub international_fraction: f64,
    #[serde(default)]
    pub partner_weights: BTreeMap<String, f64>,
    #[serde(default)]
    pub discipline: Discipline,
}

/// Optional defaults for the `optimize` subcommand; command-line flags take
/// precedence over these.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_units: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveArg>,
}

/// A full scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub horizon: u32,
    pub seed: u64,
    #[serde(default)]
    pub arrival_model: ArrivalModel,
    #[serde(default)]
    pub response_delay: u32,
    pub countries: Vec<CountryEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeBlock>,
}

impl ScenarioDocument {
    pub fn network(&self) -> NetworkSpec {
        NetworkSpec {
            countries: self
                .countries
                .iter()
                .map(|entry| CountrySpec {
                    id: CountryId::new(&entry.id),
                    capacity_per_period: entry.capacity_per_period,
                    national_rate: entry.national_rate,
                    international_fraction: entry.international_fraction,
                    partner_weights: entry
                        .partner_weights
                        .iter()
                        .map(|(id, weight)| (CountryId::new(id), *weight))
                        .collect(),
                    discipline: entry.discipline,
                })
                .collect(),
            arrival_model: self.arrival_model,
            response_delay: self.response_delay,
        }
    }

    /// Planner objective using this scenario's horizon and seed.
    pub fn objective(&self, mode: ObjectiveMode) -> Objective {
        Objective {
            mode,
            horizon: self.horizon,
            seed: self.seed,
        }
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Parses and fully validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioDocument, ScenarioError> {
    let document: ScenarioDocument = toml::from_str(text)?;
    if document.horizon < 1 {
        return Err(ScenarioError::Invalid {
            field: "horizon".into(),
            message: "must be at least 1".into(),
        });
    }
    for (index, country) in document.countries.iter().enumerate() {
        if !valid_id(&country.id) {
            return Err(ScenarioError::Invalid {
                field: format!("countries[{index}].id"),
                message: format!(
                    "{:?} is not a valid id (ascii letters, digits, '_', '-', '.')",
                    country.id
                ),
            });
        }
    }
    validate_network(document.network())?;
    Ok(document)
}

/// Canonical TOML rendering of a document; `parse_scenario` accepts its own
/// output.
pub fn render_scenario(document: &ScenarioDocument) -> String {
    toml::to_string_pretty(document).expect("scenario documents always serialize")
}

/// Strategy name as accepted on the command line and in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StrategyArg(pub Strategy);

impl FromStr for StrategyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(Self(Strategy::Greedy)),
            "brute" | "brute_force" => Ok(Self(Strategy::BruteForce)),
            "saturation" | "saturation_heuristic" => Ok(Self(Strategy::SaturationHeuristic)),
            other => Err(format!(
                "unknown strategy {other:?}, expected greedy|brute|saturation"
            )),
        }
    }
}

impl fmt::Display for StrategyArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            Strategy::Greedy => "greedy",
            Strategy::BruteForce => "brute_force",
            Strategy::SaturationHeuristic => "saturation_heuristic",
        })
    }
}

impl TryFrom<String> for StrategyArg {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<StrategyArg> for String {
    fn from(value: StrategyArg) -> Self {
        value.to_string()
    }
}

/// Objective syntax: `global` or `own:<country-id>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ObjectiveArg(pub ObjectiveMode);

impl FromStr for ObjectiveArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "global" {
            return Ok(Self(ObjectiveMode::GlobalThroughput));
        }
        if let Some(id) = s.strip_prefix("own:") {
            if id.is_empty() {
                return Err("own: requires a country id, e.g. own:A".into());
            }
            return Ok(Self(ObjectiveMode::OwnThroughput(CountryId::new(id))));
        }
        Err(format!(
            "unknown objective {s:?}, expected global or own:<country-id>"
        ))
    }
}

impl fmt::Display for ObjectiveArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            ObjectiveMode::GlobalThroughput => f.write_str("global"),
            ObjectiveMode::OwnThroughput(id) => write!(f, "own:{id}"),
        }
    }
}

impl TryFrom<String> for ObjectiveArg {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<ObjectiveArg> for String {
    fn from(value: ObjectiveArg) -> Self {
        value.to_string()
    }
}
