//! Measurement math for investigation capacity.
//!
//! Capacity is measured over a time span `T`. Each investigator contributes
//! `available_time / T` to the *average investigator count*, so part-time
//! staff and turnover are handled uniformly. Observed throughput per
//! investigator is `cases_closed / average_investigators`, and the capacity
//! estimate uplifts that rate by a downtime fraction before scaling it back
//! to a headcount:
//!
//! ```text
//! capacity = (rate + rate * downtime_fraction) * current_investigators
//! ```
//!
//! **Downtime interpretation.** `downtime_fraction` is the extra fraction of
//! *observed* per-investigator throughput that idle time could have yielded:
//! a unit closing 50 cases per investigator at 20% reported downtime is
//! credited with a potential of 60. It is *not* a discount on available time.
//! With `downtime_fraction = 0` the estimate reduces to observed throughput.
//!
//! Saturation compares incoming requests against capacity; a ratio above 1
//! means the unit accrues backlog, which [`backlog_next`] steps one period at
//! a time.
//!
//! All functions here are pure and share no state; they are safe to call
//! concurrently.

use thiserror::Error;

/// Errors from the capacity measurement operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityError {
    #[error("no availability records supplied")]
    EmptyAvailability,
    #[error("availability records disagree on span: {first} vs {other}")]
    MismatchedSpans { first: f64, other: f64 },
    #[error("every investigator reports zero available time")]
    ZeroAvailability,
    #[error("span must be a positive finite number, got {0}")]
    InvalidSpan(f64),
    #[error("available time {available} must lie in [0, {span}]")]
    AvailabilityOutOfRange { available: f64, span: f64 },
    #[error("average investigator count must be positive, got {0}")]
    NonPositiveAverage(f64),
    #[error("downtime fraction must lie in [0, 1), got {0}")]
    DowntimeOutOfRange(f64),
    #[error("capacity must be positive, got {0}")]
    NonPositiveCapacity(f64),
    #[error("current investigator count must be positive, got {0}")]
    NonPositiveInvestigators(f64),
    #[error("{quantity} must be a non-negative finite number, got {value}")]
    NegativeQuantity { quantity: &'static str, value: f64 },
}

fn require_non_negative(quantity: &'static str, value: f64) -> Result<f64, CapacityError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(CapacityError::NegativeQuantity { quantity, value })
    }
}

/// One investigator's available time within a measurement span.
#[derive(Debug, Clone, PartialEq)]
pub struct AvailabilityRecord {
    investigator_id: String,
    available_time: f64,
    span: f64,
}

impl AvailabilityRecord {
    /// Builds a record, enforcing `span > 0` and `0 <= available_time <= span`.
    pub fn new(
        investigator_id: impl Into<String>,
        available_time: f64,
        span: f64,
    ) -> Result<Self, CapacityError> {
        if !(span.is_finite() && span > 0.0) {
            return Err(CapacityError::InvalidSpan(span));
        }
        if !(available_time.is_finite() && (0.0..=span).contains(&available_time)) {
            return Err(CapacityError::AvailabilityOutOfRange {
                available: available_time,
                span,
            });
        }
        Ok(Self {
            investigator_id: investigator_id.into(),
            available_time,
            span,
        })
    }

    pub fn investigator_id(&self) -> &str {
        &self.investigator_id
    }

    pub fn available_time(&self) -> f64 {
        self.available_time
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    /// Fraction of the span this investigator was available.
    pub fn fraction(&self) -> f64 {
        self.available_time / self.span
    }
}

/// Inputs to a capacity estimate for one group over one span.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityInput {
    /// Cases closed by the group during the span.
    pub cases_closed: f64,
    /// Per-investigator availability; every record must share one span.
    pub availabilities: Vec<AvailabilityRecord>,
    /// Reported idle share, in `[0, 1)`. See the module docs for the exact
    /// interpretation.
    pub downtime_fraction: f64,
    /// Headcount to scale the estimate to. `None` uses the computed average,
    /// which reproduces the group's own historical staffing.
    pub current_investigators: Option<f64>,
}

/// Result of a capacity estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub average_investigators: f64,
    /// Observed cases per span per investigator.
    pub per_investigator_rate: f64,
    /// Estimated cases per span for the group.
    pub capacity: f64,
}

/// Sums `available_time / span` over the records.
///
/// The result is the effective number of full-time investigators; it lies in
/// `(0, n]` for `n` records.
pub fn average_investigators(records: &[AvailabilityRecord]) -> Result<f64, CapacityError> {
    let first = records.first().ok_or(CapacityError::EmptyAvailability)?;
    for record in records {
        if record.span != first.span {
            return Err(CapacityError::MismatchedSpans {
                first: first.span,
                other: record.span,
            });
        }
    }
    let total: f64 = records.iter().map(AvailabilityRecord::fraction).sum();
    if total <= 0.0 {
        return Err(CapacityError::ZeroAvailability);
    }
    Ok(total)
}

/// Observed cases per span per investigator: `cases_closed / average_investigators`.
pub fn per_investigator_throughput(
    cases_closed: f64,
    average_investigators: f64,
) -> Result<f64, CapacityError> {
    require_non_negative("cases_closed", cases_closed)?;
    if !(average_investigators.is_finite() && average_investigators > 0.0) {
        return Err(CapacityError::NonPositiveAverage(average_investigators));
    }
    Ok(cases_closed / average_investigators)
}

/// Downtime-adjusted capacity estimate for a group.
///
/// Computes the observed per-investigator rate, uplifts it by
/// `downtime_fraction`, and scales by the current headcount (defaulting to
/// the computed average, see [`CapacityInput::current_investigators`]).
pub fn capacity_estimate(input: &CapacityInput) -> Result<CapacityReport, CapacityError> {
    if !(input.downtime_fraction.is_finite() && (0.0..1.0).contains(&input.downtime_fraction)) {
        return Err(CapacityError::DowntimeOutOfRange(input.downtime_fraction));
    }
    let average = average_investigators(&input.availabilities)?;
    let rate = per_investigator_throughput(input.cases_closed, average)?;
    let current = input.current_investigators.unwrap_or(average);
    if !(current.is_finite() && current > 0.0) {
        return Err(CapacityError::NonPositiveInvestigators(current));
    }
    Ok(CapacityReport {
        average_investigators: average,
        per_investigator_rate: rate,
        capacity: (rate + rate * input.downtime_fraction) * current,
    })
}

/// Incoming requests divided by capacity. A value above 1 means the backlog
/// grows.
pub fn saturation(incoming_requests: f64, capacity: f64) -> Result<f64, CapacityError> {
    require_non_negative("incoming_requests", incoming_requests)?;
    if !(capacity.is_finite() && capacity > 0.0) {
        return Err(CapacityError::NonPositiveCapacity(capacity));
    }
    Ok(incoming_requests / capacity)
}

/// One period of the backlog recurrence: `max(0, backlog + arrivals - capacity)`.
pub fn backlog_next(backlog: f64, arrivals: f64, capacity: f64) -> Result<f64, CapacityError> {
    require_non_negative("backlog", backlog)?;
    require_non_negative("arrivals", arrivals)?;
    require_non_negative("capacity", capacity)?;
    Ok((backlog + arrivals - capacity).max(0.0))
}
