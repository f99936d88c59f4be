//! Shared fixtures for the benchmark targets.

use std::collections::BTreeMap;

use caseflow_core::{ArrivalModel, CountryId, CountrySpec, Discipline, NetworkSpec};

/// Requestor with spare capacity feeding a saturated partner.
pub fn bottleneck_pair() -> NetworkSpec {
    let mut weights = BTreeMap::new();
    weights.insert(CountryId::from("B"), 1.0);
    NetworkSpec {
        countries: vec![
            CountrySpec {
                id: "A".into(),
                capacity_per_period: 10.0,
                national_rate: 6.0,
                international_fraction: 0.5,
                partner_weights: weights,
                discipline: Discipline::NationalPriority,
            },
            CountrySpec {
                id: "B".into(),
                capacity_per_period: 3.0,
                national_rate: 3.0,
                international_fraction: 0.0,
                partner_weights: BTreeMap::new(),
                discipline: Discipline::NationalPriority,
            },
        ],
        arrival_model: ArrivalModel::Deterministic,
        response_delay: 0,
    }
}

/// Fully connected network of `n` countries with uniform routing.
pub fn mesh(n: usize) -> NetworkSpec {
    let ids: Vec<CountryId> = (0..n).map(|i| CountryId::new(format!("C{i:02}"))).collect();
    let countries = ids
        .iter()
        .map(|id| {
            let others: Vec<&CountryId> = ids.iter().filter(|other| *other != id).collect();
            let weight = 1.0 / others.len() as f64;
            CountrySpec {
                id: id.clone(),
                capacity_per_period: 4.0,
                national_rate: 3.5,
                international_fraction: 0.4,
                partner_weights: others.iter().map(|o| ((*o).clone(), weight)).collect(),
                discipline: Discipline::NationalPriority,
            }
        })
        .collect();
    NetworkSpec {
        countries,
        arrival_model: ArrivalModel::Poisson,
        response_delay: 1,
    }
}
