//! Capacity measurement and cross-border case-flow simulation for digital
//! investigation units.
//!
//! The crate is organised in four layers:
//!
//! - [`capacity`] — the measurement math: averaged investigator availability,
//!   per-investigator throughput, downtime-adjusted capacity, saturation, and
//!   the backlog recurrence.
//! - [`network`] — the static country network: per-country capacities, arrival
//!   rates, the fraction of cases that spawn a foreign sub-request, and
//!   partner-routing weights.
//! - [`sim`] — a deterministic discrete-period simulator of case lifecycles
//!   across the network, including backlog growth under saturation and parent
//!   cases blocked on partner countries.
//! - [`planner`] — capacity-expansion strategies (saturation heuristic, greedy
//!   marginal-gain, exhaustive brute force) scored by simulation.
//!
//! All randomness flows through seeded [`rand_chacha::ChaCha8Rng`] streams, so
//! every result is a pure function of its inputs and the seed.

pub mod capacity;
pub mod network;
pub mod planner;
pub mod sim;

pub use capacity::{
    average_investigators, backlog_next, capacity_estimate, per_investigator_throughput,
    saturation, AvailabilityRecord, CapacityError, CapacityInput, CapacityReport,
};
pub use network::{
    arrivals_for_period, sample_partner, validate_network, ArrivalModel, CountryId, CountrySpec,
    Discipline, NetworkError, NetworkSpec, ValidationError, ValidationReport,
};
pub use planner::{
    brute_force_allocate, evaluate_allocation, greedy_allocate, saturation_heuristic_allocate,
    InvestmentPlan, Objective, ObjectiveMode, PlanError, Strategy,
};
pub use sim::{
    run, summarize, Case, CaseId, CaseKind, CountrySummary, NetworkTotals, PeriodMetrics,
    SimError, SimState, SimTrace, SummaryReport,
};
