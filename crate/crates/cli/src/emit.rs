//! Trace rendering: the bit-pinned CSV format and the human-readable
//! summary.

use std::fmt::Write;

use caseflow_core::{summarize, SimTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    Summary,
}

pub const CSV_HEADER: &str =
    "period,country,arrivals_national,arrivals_international,served,closed,backlog,saturation";

/// Renders a trace. CSV rows are sorted by (period, country id), reals carry
/// six decimal places, and lines end with `\n`; the output is byte-identical
/// for identical traces.
pub fn emit_trace(trace: &SimTrace, format: TraceFormat) -> String {
    match format {
        TraceFormat::Csv => to_csv(trace),
        TraceFormat::Summary => to_summary(trace),
    }
}

fn to_csv(trace: &SimTrace) -> String {
    let mut rows: Vec<_> = trace.metrics.iter().collect();
    rows.sort_by(|a, b| (a.period, &a.country).cmp(&(b.period, &b.country)));
    let mut out = String::with_capacity(rows.len() * 48 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for m in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6}",
            m.period,
            m.country,
            m.arrivals_national,
            m.arrivals_international,
            m.served,
            m.closed,
            m.backlog,
            m.saturation
        )
        .expect("writing to a String cannot fail");
    }
    out
}

fn latency(value: Option<f64>) -> String {
    match value {
        Some(periods) => format!("{periods:.2}"),
        None => "n/a".to_string(),
    }
}

fn to_summary(trace: &SimTrace) -> String {
    let report = summarize(trace);
    let mut out = String::new();
    for c in &report.countries {
        writeln!(out, "== country {} ==", c.country).unwrap();
        writeln!(
            out,
            "arrivals (national/international): {} / {}",
            c.arrivals_national, c.arrivals_international
        )
        .unwrap();
        writeln!(out, "served: {}", c.served).unwrap();
        writeln!(out, "closed: {}", c.closed).unwrap();
        writeln!(out, "end backlog: {}", c.end_backlog).unwrap();
        writeln!(out, "awaiting partner answer: {}", c.end_awaiting).unwrap();
        writeln!(out, "mean saturation: {:.6}", c.mean_saturation).unwrap();
        writeln!(out, "mean latency (periods): {}", latency(c.mean_latency)).unwrap();
        writeln!(
            out,
            "mean dependent-case latency (periods): {}",
            latency(c.mean_dependent_latency)
        )
        .unwrap();
        writeln!(out).unwrap();
    }
    let t = &report.totals;
    writeln!(out, "== network ==").unwrap();
    writeln!(out, "created: {}", t.created).unwrap();
    writeln!(out, "closed: {}", t.closed).unwrap();
    writeln!(out, "end backlog: {}", t.end_backlog).unwrap();
    writeln!(out, "awaiting partner answer: {}", t.end_awaiting).unwrap();
    out
}
