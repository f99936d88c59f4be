//! Static model of the country network.
//!
//! A [`NetworkSpec`] lists the participating countries, the arrival model,
//! and the response delay for cross-border answers. Each [`CountrySpec`]
//! carries its per-period capacity, its national arrival rate, the fraction
//! of national cases that spawn one foreign sub-request, and the routing
//! weights over partner countries.
//!
//! Validation is total: [`validate_network`] checks every invariant and
//! reports *all* violations, each naming the offending country.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque country identifier. Ordering is lexicographic and is part of the
/// simulator's determinism contract.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountryId(String);

impl CountryId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CountryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CountryId {
    fn from(id: &str) -> Self {
        Self(id.to_owned())
    }
}

impl From<String> for CountryId {
    fn from(id: String) -> Self {
        Self(id)
    }
}

/// Queue discipline for a country's pending cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discipline {
    /// Serve every national case before any international request; FIFO
    /// within each class.
    #[default]
    NationalPriority,
    /// Strict arrival order regardless of class.
    Fifo,
}

/// How per-period arrival counts are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalModel {
    /// A fractional accumulator emits `floor` counts whose long-run average
    /// equals the rate exactly.
    #[default]
    Deterministic,
    /// Counts drawn `Poisson(rate)` from the country's seeded stream.
    Poisson,
}

/// One country's static parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountrySpec {
    pub id: CountryId,
    /// Cases the country can serve per period; may be fractional.
    pub capacity_per_period: f64,
    /// Expected national case arrivals per period.
    pub national_rate: f64,
    /// Probability that a national case needs one foreign sub-request.
    pub international_fraction: f64,
    /// Routing weights over partner countries; must sum to 1 when non-empty.
    pub partner_weights: BTreeMap<CountryId, f64>,
    pub discipline: Discipline,
}

/// The whole network plus cross-cutting simulation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub countries: Vec<CountrySpec>,
    pub arrival_model: ArrivalModel,
    /// Periods between a sub-request closing abroad and the parent learning
    /// of it.
    pub response_delay: u32,
}

impl NetworkSpec {
    pub fn country(&self, id: &CountryId) -> Option<&CountrySpec> {
        self.countries.iter().find(|c| &c.id == id)
    }

    /// Country ids in the canonical (lexicographic) processing order.
    pub fn sorted_ids(&self) -> Vec<CountryId> {
        let mut ids: Vec<_> = self.countries.iter().map(|c| c.id.clone()).collect();
        ids.sort();
        ids
    }
}

/// A single invariant violation found during validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("network has no countries")]
    EmptyNetwork,
    #[error("duplicate country id {0}")]
    DuplicateId(CountryId),
    #[error("country {country}: capacity_per_period must be positive, got {capacity}")]
    NonPositiveCapacity { country: CountryId, capacity: f64 },
    #[error("country {country}: national_rate must be non-negative, got {rate}")]
    NegativeRate { country: CountryId, rate: f64 },
    #[error("country {country}: international_fraction must lie in [0, 1], got {fraction}")]
    FractionOutOfRange { country: CountryId, fraction: f64 },
    #[error("country {country}: partner_weights references the country itself")]
    SelfReferentialPartner { country: CountryId },
    #[error("country {country}: partner {partner} does not exist in the network")]
    DanglingPartner {
        country: CountryId,
        partner: CountryId,
    },
    #[error("country {country}: weight for partner {partner} must be non-negative, got {weight}")]
    NegativeWeight {
        country: CountryId,
        partner: CountryId,
        weight: f64,
    },
    #[error("country {country}: partner weights sum to {sum}, expected 1")]
    WeightSumMismatch { country: CountryId, sum: f64 },
    #[error("country {country}: international_fraction > 0 requires partner_weights")]
    MissingPartners { country: CountryId },
}

/// Every violation found in one validation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<ValidationError>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "network validation failed:")?;
        for violation in &self.violations {
            write!(f, "\n  - {violation}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Checks every network invariant, reporting all violations rather than the
/// first, and returns the spec unchanged when it is valid. Validating an
/// already-validated spec is a no-op.
pub fn validate_network(spec: NetworkSpec) -> Result<NetworkSpec, ValidationReport> {
    let violations = collect_violations(&spec);
    if violations.is_empty() {
        Ok(spec)
    } else {
        Err(ValidationReport { violations })
    }
}

pub(crate) fn collect_violations(spec: &NetworkSpec) -> Vec<ValidationError> {
    let mut violations = Vec::new();
    if spec.countries.is_empty() {
        violations.push(ValidationError::EmptyNetwork);
    }

    let mut seen = BTreeSet::new();
    for country in &spec.countries {
        if !seen.insert(country.id.clone()) {
            violations.push(ValidationError::DuplicateId(country.id.clone()));
        }
    }

    for country in &spec.countries {
        let id = &country.id;
        if !(country.capacity_per_period.is_finite() && country.capacity_per_period > 0.0) {
            violations.push(ValidationError::NonPositiveCapacity {
                country: id.clone(),
                capacity: country.capacity_per_period,
            });
        }
        if !(country.national_rate.is_finite() && country.national_rate >= 0.0) {
            violations.push(ValidationError::NegativeRate {
                country: id.clone(),
                rate: country.national_rate,
            });
        }
        if !(country.international_fraction.is_finite()
            && (0.0..=1.0).contains(&country.international_fraction))
        {
            violations.push(ValidationError::FractionOutOfRange {
                country: id.clone(),
                fraction: country.international_fraction,
            });
        }

        if country.partner_weights.contains_key(id) {
            violations.push(ValidationError::SelfReferentialPartner { country: id.clone() });
        }
        for (partner, weight) in &country.partner_weights {
            if partner != id && !seen.contains(partner) {
                violations.push(ValidationError::DanglingPartner {
                    country: id.clone(),
                    partner: partner.clone(),
                });
            }
            if !(weight.is_finite() && *weight >= 0.0) {
                violations.push(ValidationError::NegativeWeight {
                    country: id.clone(),
                    partner: partner.clone(),
                    weight: *weight,
                });
            }
        }

        if country.international_fraction > 0.0 && country.partner_weights.is_empty() {
            violations.push(ValidationError::MissingPartners { country: id.clone() });
        }
        // Weights that do not sum to 1 are a configuration mistake even when
        // the fraction is currently zero.
        if !country.partner_weights.is_empty() {
            let sum: f64 = country.partner_weights.values().sum();
            if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                violations.push(ValidationError::WeightSumMismatch {
                    country: id.clone(),
                    sum,
                });
            }
        }
    }
    violations
}

/// Errors from the sampling helpers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("partner weight map is empty")]
    EmptyPartnerWeights,
    #[error("partner weights sum to zero; nothing to sample")]
    ZeroWeightSum,
    #[error("arrival rate must be non-negative and finite, got {0}")]
    InvalidRate(f64),
}

/// Draws one partner id with probability proportional to its weight.
///
/// Keys are visited in sorted-id order, so identical seeds give identical
/// draws on every platform.
pub fn sample_partner<R: Rng + ?Sized>(
    weights: &BTreeMap<CountryId, f64>,
    rng: &mut R,
) -> Result<CountryId, NetworkError> {
    if weights.is_empty() {
        return Err(NetworkError::EmptyPartnerWeights);
    }
    let total: f64 = weights.values().filter(|w| **w > 0.0).sum();
    if total <= 0.0 {
        return Err(NetworkError::ZeroWeightSum);
    }
    let target = rng.random::<f64>() * total;
    let mut cumulative = 0.0;
    let mut last = None;
    for (id, weight) in weights {
        if *weight <= 0.0 {
            continue;
        }
        cumulative += weight;
        last = Some(id);
        if target < cumulative {
            return Ok(id.clone());
        }
    }
    // Rounding can leave target == total; fall back to the last candidate.
    Ok(last.expect("at least one positive weight").clone())
}

/// Produces one period's arrival count.
///
/// Deterministic model: the accumulator gains `rate`, the integer part is
/// emitted, and the fraction carries over, so the long-run average equals
/// the rate exactly. Poisson model: one draw from the stream; the
/// accumulator passes through untouched.
pub fn arrivals_for_period<R: Rng + ?Sized>(
    model: ArrivalModel,
    rate: f64,
    accumulator: f64,
    rng: &mut R,
) -> Result<(u64, f64), NetworkError> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(NetworkError::InvalidRate(rate));
    }
    match model {
        ArrivalModel::Deterministic => {
            let filled = accumulator + rate;
            let count = filled.floor();
            Ok((count as u64, filled - count))
        }
        ArrivalModel::Poisson => {
            if rate == 0.0 {
                return Ok((0, accumulator));
            }
            let poisson = Poisson::new(rate).expect("positive finite rate");
            let count: f64 = poisson.sample(rng);
            Ok((count as u64, accumulator))
        }
    }
}
