use serde::{Deserialize, Serialize};

use crate::network::{CountryId, NetworkSpec};
use crate::sim::case::Case;

/// Per-period, per-country counters emitted by every simulation step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodMetrics {
    pub period: u32,
    pub country: CountryId,
    pub arrivals_national: u64,
    pub arrivals_international: u64,
    pub served: u64,
    pub closed: u64,
    /// Queue length at period end.
    pub backlog: u64,
    /// Total arrivals this period divided by capacity_per_period.
    pub saturation: f64,
}

/// Complete record of one run: inputs, per-period metrics sorted by
/// (period, country), and the final registry of every case created.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTrace {
    pub network: NetworkSpec,
    pub seed: u64,
    pub horizon: u32,
    pub metrics: Vec<PeriodMetrics>,
    pub cases: Vec<Case>,
}

impl SimTrace {
    pub fn metrics_for_country<'a>(
        &'a self,
        id: &'a CountryId,
    ) -> impl Iterator<Item = &'a PeriodMetrics> {
        self.metrics.iter().filter(move |m| &m.country == id)
    }

    pub fn metrics_for_period(&self, period: u32) -> impl Iterator<Item = &PeriodMetrics> {
        self.metrics.iter().filter(move |m| m.period == period)
    }

    /// Total cases closed at `host` over the whole horizon.
    pub fn closed_at(&self, host: &CountryId) -> u64 {
        self.metrics_for_country(host).map(|m| m.closed).sum()
    }

    /// Total cases closed network-wide over the whole horizon.
    pub fn closed_total(&self) -> u64 {
        self.metrics.iter().map(|m| m.closed).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountrySummary {
    pub country: CountryId,
    pub arrivals_national: u64,
    pub arrivals_international: u64,
    pub served: u64,
    pub closed: u64,
    pub end_backlog: u64,
    /// Cases served here that are still blocked on a partner at horizon end.
    pub end_awaiting: u64,
    pub mean_saturation: f64,
    /// Mean periods from creation to closure, over closed cases hosted here.
    /// Absent when nothing closed.
    pub mean_latency: Option<f64>,
    /// Same, restricted to cases that spawned a sub-request. Absent when no
    /// dependent case closed.
    pub mean_dependent_latency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkTotals {
    pub created: u64,
    pub closed: u64,
    pub end_backlog: u64,
    pub end_awaiting: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub countries: Vec<CountrySummary>,
    pub totals: NetworkTotals,
}

fn mean_latency<'a>(cases: impl Iterator<Item = &'a Case>) -> Option<f64> {
    let mut count = 0u64;
    let mut total = 0u64;
    for case in cases {
        if let Some(closed) = case.closed_period {
            count += 1;
            total += u64::from(closed - case.created_period);
        }
    }
    (count > 0).then(|| total as f64 / count as f64)
}

/// Aggregates a trace into per-country and network-wide totals.
pub fn summarize(trace: &SimTrace) -> SummaryReport {
    let ids = trace.network.sorted_ids();
    let mut countries = Vec::with_capacity(ids.len());
    for id in &ids {
        let mut arrivals_national = 0;
        let mut arrivals_international = 0;
        let mut served = 0;
        let mut closed = 0;
        let mut end_backlog = 0;
        let mut saturation_sum = 0.0;
        let mut periods = 0u32;
        for m in trace.metrics_for_country(id) {
            arrivals_national += m.arrivals_national;
            arrivals_international += m.arrivals_international;
            served += m.served;
            closed += m.closed;
            end_backlog = m.backlog;
            saturation_sum += m.saturation;
            periods += 1;
        }
        let hosted = || trace.cases.iter().filter(|c| &c.host == id);
        countries.push(CountrySummary {
            country: id.clone(),
            arrivals_national,
            arrivals_international,
            served,
            closed,
            end_backlog,
            end_awaiting: hosted().filter(|c| c.is_awaiting()).count() as u64,
            mean_saturation: if periods > 0 {
                saturation_sum / f64::from(periods)
            } else {
                0.0
            },
            mean_latency: mean_latency(hosted()),
            mean_dependent_latency: mean_latency(hosted().filter(|c| c.is_dependent())),
        });
    }
    let totals = NetworkTotals {
        created: trace.cases.len() as u64,
        closed: trace.cases.iter().filter(|c| c.is_closed()).count() as u64,
        end_backlog: countries.iter().map(|c| c.end_backlog).sum(),
        end_awaiting: countries.iter().map(|c| c.end_awaiting).sum(),
    };
    SummaryReport { countries, totals }
}
