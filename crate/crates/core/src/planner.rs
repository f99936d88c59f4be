//! Capacity-expansion planning.
//!
//! All strategies buy capacity in discrete units and score a candidate plan
//! the same way: simulate the network with the added capacity and count
//! closed cases, either for one country or network-wide. Three allocators
//! are provided:
//!
//! - [`saturation_heuristic_allocate`] sends each unit to the most saturated
//!   country among those the objective country routes requests to (plus
//!   itself) — the "invest in the saturated partner" rule.
//! - [`greedy_allocate`] commits each unit where the simulated marginal gain
//!   is largest.
//! - [`brute_force_allocate`] enumerates every distribution of units over
//!   countries and is the ground-truth oracle for the other two.
//!
//! Candidate evaluations are independent simulations and run in parallel;
//! results are reduced in a fixed candidate order so tie-breaking never
//! depends on scheduling.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{CountryId, NetworkSpec};
use crate::sim::{run, summarize, SimError, SimTrace};

/// What a plan is optimising for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectiveMode {
    /// Closed cases at one country (its own return-on-investment view).
    OwnThroughput(CountryId),
    /// Closed cases across the whole network.
    GlobalThroughput,
}

/// Scoring configuration shared by all strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub mode: ObjectiveMode,
    pub horizon: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    SaturationHeuristic,
    Greedy,
    BruteForce,
}

/// A committed allocation of budget units and its achieved objective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvestmentPlan {
    /// Added capacity per period, for every country (zero entries included).
    pub allocations: BTreeMap<CountryId, f64>,
    pub budget_units: u32,
    pub unit_size: f64,
    /// Closed-case count achieved under the plan.
    pub objective_value: f64,
    pub strategy: Strategy,
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("unknown country {0}")]
    UnknownCountry(CountryId),
    #[error("allocation for {country} must be non-negative, got {delta}")]
    NegativeDelta { country: CountryId, delta: f64 },
    #[error("budget_units must be at least 1")]
    ZeroBudget,
    #[error("unit_size must be positive, got {0}")]
    NonPositiveUnit(f64),
    #[error("{combinations} candidate distributions exceed the enumeration guard of {limit}")]
    EnumerationTooLarge { combinations: u128, limit: u128 },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Upper bound on the brute-force search space.
pub const ENUMERATION_LIMIT: u128 = 100_000;

fn apply_allocations(
    network: &NetworkSpec,
    allocations: &BTreeMap<CountryId, f64>,
) -> Result<NetworkSpec, PlanError> {
    for (id, delta) in allocations {
        if network.country(id).is_none() {
            return Err(PlanError::UnknownCountry(id.clone()));
        }
        if !(delta.is_finite() && *delta >= 0.0) {
            return Err(PlanError::NegativeDelta {
                country: id.clone(),
                delta: *delta,
            });
        }
    }
    let mut modified = network.clone();
    for country in &mut modified.countries {
        if let Some(delta) = allocations.get(&country.id) {
            country.capacity_per_period += delta;
        }
    }
    Ok(modified)
}

fn objective_value(trace: &SimTrace, objective: &Objective) -> f64 {
    match &objective.mode {
        ObjectiveMode::OwnThroughput(id) => trace.closed_at(id) as f64,
        ObjectiveMode::GlobalThroughput => trace.closed_total() as f64,
    }
}

fn check_objective(network: &NetworkSpec, objective: &Objective) -> Result<(), PlanError> {
    if let ObjectiveMode::OwnThroughput(id) = &objective.mode {
        if network.country(id).is_none() {
            return Err(PlanError::UnknownCountry(id.clone()));
        }
    }
    Ok(())
}

/// Scores a capacity-delta map: simulates the network with the deltas applied
/// and returns the objective's closed-case count. Pure and deterministic.
pub fn evaluate_allocation(
    network: &NetworkSpec,
    allocations: &BTreeMap<CountryId, f64>,
    objective: &Objective,
) -> Result<f64, PlanError> {
    check_objective(network, objective)?;
    let modified = apply_allocations(network, allocations)?;
    let trace = run(&modified, objective.horizon, objective.seed)?;
    Ok(objective_value(&trace, objective))
}

fn zero_allocations(network: &NetworkSpec) -> BTreeMap<CountryId, f64> {
    network
        .sorted_ids()
        .into_iter()
        .map(|id| (id, 0.0))
        .collect()
}

fn check_budget(budget_units: u32, unit_size: f64) -> Result<(), PlanError> {
    if budget_units < 1 {
        return Err(PlanError::ZeroBudget);
    }
    if !(unit_size.is_finite() && unit_size > 0.0) {
        return Err(PlanError::NonPositiveUnit(unit_size));
    }
    Ok(())
}

/// Mean per-period saturation by country under the given allocations.
fn saturations_under(
    network: &NetworkSpec,
    allocations: &BTreeMap<CountryId, f64>,
    objective: &Objective,
) -> Result<BTreeMap<CountryId, f64>, PlanError> {
    let modified = apply_allocations(network, allocations)?;
    let trace = run(&modified, objective.horizon, objective.seed)?;
    Ok(summarize(&trace)
        .countries
        .into_iter()
        .map(|c| (c.country, c.mean_saturation))
        .collect())
}

/// Countries eligible for a unit under the saturation heuristic: those that
/// receive international requests from the objective country, plus the
/// objective country itself. Global objectives consider everyone.
fn heuristic_candidates(
    network: &NetworkSpec,
    objective: &Objective,
) -> Result<Vec<CountryId>, PlanError> {
    match &objective.mode {
        ObjectiveMode::GlobalThroughput => Ok(network.sorted_ids()),
        ObjectiveMode::OwnThroughput(own) => {
            let spec = network
                .country(own)
                .ok_or_else(|| PlanError::UnknownCountry(own.clone()))?;
            let mut candidates = vec![own.clone()];
            if spec.international_fraction > 0.0 {
                for (partner, weight) in &spec.partner_weights {
                    if *weight > 0.0 {
                        candidates.push(partner.clone());
                    }
                }
            }
            candidates.sort();
            candidates.dedup();
            Ok(candidates)
        }
    }
}

/// The "invest in the saturated partner" rule: each unit goes to the most
/// saturated candidate, measured from a fresh baseline simulation under the
/// allocations committed so far. Ties prefer the smaller current capacity,
/// then the lexicographically smaller id.
pub fn saturation_heuristic_allocate(
    network: &NetworkSpec,
    budget_units: u32,
    unit_size: f64,
    objective: &Objective,
) -> Result<InvestmentPlan, PlanError> {
    check_budget(budget_units, unit_size)?;
    check_objective(network, objective)?;
    let candidates = heuristic_candidates(network, objective)?;
    let mut allocations = zero_allocations(network);

    for _ in 0..budget_units {
        let saturations = saturations_under(network, &allocations, objective)?;
        let mut best: Option<(&CountryId, f64, f64)> = None;
        for id in &candidates {
            let saturation = saturations[id];
            let capacity = network.country(id).expect("candidate exists").capacity_per_period
                + allocations[id];
            let better = match best {
                None => true,
                Some((_, best_sat, best_cap)) => {
                    saturation > best_sat || (saturation == best_sat && capacity < best_cap)
                }
            };
            if better {
                best = Some((id, saturation, capacity));
            }
        }
        let (chosen, _, _) = best.expect("validated network is non-empty");
        *allocations.get_mut(&chosen.clone()).expect("known country") += unit_size;
    }

    let objective_value = evaluate_allocation(network, &allocations, objective)?;
    Ok(InvestmentPlan {
        allocations,
        budget_units,
        unit_size,
        objective_value,
        strategy: Strategy::SaturationHeuristic,
    })
}

/// Commits each unit to the country with the largest simulated objective
/// gain. Ties prefer the higher current saturation, then the smaller id.
pub fn greedy_allocate(
    network: &NetworkSpec,
    budget_units: u32,
    unit_size: f64,
    objective: &Objective,
) -> Result<InvestmentPlan, PlanError> {
    check_budget(budget_units, unit_size)?;
    check_objective(network, objective)?;
    let ids = network.sorted_ids();
    let mut allocations = zero_allocations(network);
    let mut committed_value = None;

    for _ in 0..budget_units {
        let saturations = saturations_under(network, &allocations, objective)?;
        let scored: Vec<(CountryId, f64)> = ids
            .par_iter()
            .map(|id| {
                let mut tentative = allocations.clone();
                *tentative.get_mut(id).expect("known country") += unit_size;
                evaluate_allocation(network, &tentative, objective).map(|v| (id.clone(), v))
            })
            .collect::<Result<_, _>>()?;

        let mut best: Option<(&CountryId, f64, f64)> = None;
        for (id, value) in &scored {
            let saturation = saturations[id];
            let better = match best {
                None => true,
                Some((_, best_value, best_sat)) => {
                    *value > best_value || (*value == best_value && saturation > best_sat)
                }
            };
            if better {
                best = Some((id, *value, saturation));
            }
        }
        let (chosen, value, _) = best.expect("validated network is non-empty");
        *allocations.get_mut(&chosen.clone()).expect("known country") += unit_size;
        committed_value = Some(value);
    }

    Ok(InvestmentPlan {
        allocations,
        budget_units,
        unit_size,
        objective_value: committed_value.expect("budget >= 1"),
        strategy: Strategy::Greedy,
    })
}

/// Number of ways to distribute `budget_units` over `country_count`
/// countries: C(budget + n - 1, n - 1).
pub fn distribution_count(country_count: usize, budget_units: u32) -> u128 {
    if country_count == 0 {
        return 0;
    }
    let n = country_count as u128 - 1;
    let b = u128::from(budget_units);
    // C(b + n, n), multiplicative form; saturates rather than overflowing.
    let mut result: u128 = 1;
    for i in 1..=n {
        result = result.saturating_mul(b + i) / i;
    }
    result
}

fn enumerate_distributions(country_count: usize, budget_units: u32) -> Vec<Vec<u32>> {
    let mut result = Vec::new();
    let mut current = vec![0u32; country_count];
    fn recurse(index: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if index == current.len() - 1 {
            current[index] = remaining;
            out.push(current.clone());
            return;
        }
        for units in 0..=remaining {
            current[index] = units;
            recurse(index + 1, remaining - units, current, out);
        }
    }
    recurse(0, budget_units, &mut current, &mut result);
    result
}

/// Ground-truth oracle: evaluates every distribution of budget units over
/// countries and returns the best. Ties pick the lexicographically smallest
/// allocation vector (in sorted-id order). Fails when the search space
/// exceeds [`ENUMERATION_LIMIT`].
pub fn brute_force_allocate(
    network: &NetworkSpec,
    budget_units: u32,
    unit_size: f64,
    objective: &Objective,
) -> Result<InvestmentPlan, PlanError> {
    check_budget(budget_units, unit_size)?;
    check_objective(network, objective)?;
    let ids = network.sorted_ids();
    let combinations = distribution_count(ids.len(), budget_units);
    if combinations > ENUMERATION_LIMIT {
        return Err(PlanError::EnumerationTooLarge {
            combinations,
            limit: ENUMERATION_LIMIT,
        });
    }

    // Lexicographically ascending, so keeping strict improvements makes the
    // first optimum — the smallest vector — win ties.
    let distributions = enumerate_distributions(ids.len(), budget_units);
    let scored: Vec<(Vec<u32>, f64)> = distributions
        .into_par_iter()
        .map(|units| {
            let allocations: BTreeMap<CountryId, f64> = ids
                .iter()
                .cloned()
                .zip(units.iter().map(|u| f64::from(*u) * unit_size))
                .collect();
            evaluate_allocation(network, &allocations, objective).map(|v| (units, v))
        })
        .collect::<Result<_, _>>()?;

    let (best_units, best_value) = scored
        .into_iter()
        .reduce(|best, candidate| if candidate.1 > best.1 { candidate } else { best })
        .expect("at least one distribution");

    let allocations = ids
        .iter()
        .cloned()
        .zip(best_units.iter().map(|u| f64::from(*u) * unit_size))
        .collect();
    Ok(InvestmentPlan {
        allocations,
        budget_units,
        unit_size,
        objective_value: best_value,
        strategy: Strategy::BruteForce,
    })
}
