//! Subcommand definitions and dispatch.
//!
//! Exit-code contract: 0 on success, 1 on domain errors (unreadable or
//! invalid scenarios, measurement errors, planner errors), 2 on usage errors
//! (bad flags, missing parameters). Results go to stdout (or `--out`);
//! diagnostics go to stderr.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use caseflow_core::{
    brute_force_allocate, capacity_estimate, evaluate_allocation, greedy_allocate, run as run_sim,
    saturation, saturation_heuristic_allocate, AvailabilityRecord, CapacityInput, InvestmentPlan,
    Strategy,
};

use crate::emit::{emit_trace, TraceFormat};
use crate::scenario::{parse_scenario, render_scenario, ObjectiveArg, ScenarioDocument, StrategyArg};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "caseflow",
    version,
    about = "Measure investigation capacity, simulate cross-border case flows, and plan capacity expansion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Summary,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a group's capacity from cases closed and availability.
    Capacity {
        /// Cases closed during the measurement span.
        #[arg(long)]
        cases_closed: f64,
        /// Span length; availabilities use the same unit.
        #[arg(long)]
        span: f64,
        /// One investigator's available time within the span; repeat per
        /// investigator.
        #[arg(long = "availability", required = true)]
        availabilities: Vec<f64>,
        /// Reported idle fraction, in [0, 1).
        #[arg(long)]
        downtime: f64,
        /// Headcount to scale the estimate to; defaults to the computed
        /// average.
        #[arg(long)]
        current: Option<f64>,
    },
    /// Divide incoming requests by capacity.
    Saturation {
        #[arg(long)]
        requests: f64,
        #[arg(long)]
        capacity: f64,
    },
    /// Run a scenario file and emit its trace.
    Simulate {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// Write the result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Print the parsed scenario back as canonical TOML instead of
        /// simulating.
        #[arg(long)]
        echo_scenario: bool,
    },
    /// Allocate a capacity-expansion budget over countries.
    Optimize {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// Budget in units; falls back to the scenario's optimize block.
        #[arg(long)]
        budget: Option<u32>,
        /// Added capacity per unit; scenario fallback, then 1.0.
        #[arg(long)]
        unit: Option<f64>,
        /// greedy | brute | saturation; falls back to the scenario.
        #[arg(long)]
        strategy: Option<StrategyArg>,
        /// global | own:ID; falls back to the scenario.
        #[arg(long)]
        objective: Option<ObjectiveArg>,
        /// Write the plan here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Domain(anyhow::Error),
    Usage(String),
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure::Domain(error)
    }
}

struct Output {
    text: String,
    destination: Option<PathBuf>,
}

impl Output {
    fn stdout(text: String) -> Self {
        Self {
            text,
            destination: None,
        }
    }
}

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli.command) {
        Ok(output) => match output.destination {
            None => {
                print!("{}", output.text);
                EXIT_OK
            }
            Some(path) => match fs::write(&path, &output.text) {
                Ok(()) => {
                    eprintln!("wrote {}", path.display());
                    EXIT_OK
                }
                Err(error) => {
                    eprintln!("error: cannot write {}: {error}", path.display());
                    EXIT_DOMAIN
                }
            },
        },
        Err(Failure::Domain(error)) => {
            eprintln!("error: {error:#}");
            EXIT_DOMAIN
        }
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
    }
}

fn execute(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Capacity {
            cases_closed,
            span,
            availabilities,
            downtime,
            current,
        } => {
            let records = availabilities
                .iter()
                .enumerate()
                .map(|(i, available)| AvailabilityRecord::new(format!("i{}", i + 1), *available, span))
                .collect::<Result<Vec<_>, _>>()
                .context("invalid availability record")?;
            let report = capacity_estimate(&CapacityInput {
                cases_closed,
                availabilities: records,
                downtime_fraction: downtime,
                current_investigators: current,
            })
            .context("capacity estimate failed")?;
            // Full precision internally; one decimal at the display boundary.
            let mut text = String::new();
            writeln!(text, "average investigators: {:.1}", report.average_investigators).unwrap();
            writeln!(text, "per-investigator rate: {:.1}", report.per_investigator_rate).unwrap();
            writeln!(text, "capacity: {:.1}", report.capacity).unwrap();
            Ok(Output::stdout(text))
        }
        Command::Saturation { requests, capacity } => {
            let ratio = saturation(requests, capacity).context("saturation failed")?;
            Ok(Output::stdout(format!("{ratio}\n")))
        }
        Command::Simulate {
            scenario,
            out,
            format,
            echo_scenario,
        } => {
            let document = load_scenario(&scenario)?;
            let text = if echo_scenario {
                render_scenario(&document)
            } else {
                let trace = run_sim(&document.network(), document.horizon, document.seed)
                    .context("simulation failed")?;
                let format = match format {
                    FormatArg::Csv => TraceFormat::Csv,
                    FormatArg::Summary => TraceFormat::Summary,
                };
                emit_trace(&trace, format)
            };
            Ok(Output {
                text,
                destination: out,
            })
        }
        Command::Optimize {
            scenario,
            budget,
            unit,
            strategy,
            objective,
            out,
        } => {
            let document = load_scenario(&scenario)?;
            let (budget, unit, strategy, objective_arg) =
                resolve_optimize(&document, budget, unit, strategy, objective)?;
            let network = document.network();
            let objective = document.objective(objective_arg.0.clone());
            let plan = match strategy.0 {
                Strategy::Greedy => greedy_allocate(&network, budget, unit, &objective),
                Strategy::BruteForce => brute_force_allocate(&network, budget, unit, &objective),
                Strategy::SaturationHeuristic => {
                    saturation_heuristic_allocate(&network, budget, unit, &objective)
                }
            }
            .context("allocation failed")?;
            let baseline = evaluate_allocation(&network, &Default::default(), &objective)
                .context("baseline evaluation failed")?;
            Ok(Output {
                text: render_plan(&plan, &objective_arg, &document, baseline),
                destination: out,
            })
        }
    }
}

fn load_scenario(path: &Path) -> Result<ScenarioDocument, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read scenario {}", path.display()))?;
    let document = parse_scenario(&text)
        .with_context(|| format!("invalid scenario {}", path.display()))?;
    Ok(document)
}

/// Command-line flags win; the scenario's optimize block fills the gaps.
fn resolve_optimize(
    document: &ScenarioDocument,
    budget: Option<u32>,
    unit: Option<f64>,
    strategy: Option<StrategyArg>,
    objective: Option<ObjectiveArg>,
) -> Result<(u32, f64, StrategyArg, ObjectiveArg), Failure> {
    let block = document.optimize.clone().unwrap_or_default();
    let budget = budget.or(block.budget_units).ok_or_else(|| {
        Failure::Usage("--budget is required (or set optimize.budget_units in the scenario)".into())
    })?;
    let unit = unit.or(block.unit_size).unwrap_or(1.0);
    let strategy = strategy.or(block.strategy).ok_or_else(|| {
        Failure::Usage("--strategy is required (or set optimize.strategy in the scenario)".into())
    })?;
    let objective = objective.or(block.objective).ok_or_else(|| {
        Failure::Usage("--objective is required (or set optimize.objective in the scenario)".into())
    })?;
    Ok((budget, unit, strategy, objective))
}

fn render_plan(
    plan: &InvestmentPlan,
    objective: &ObjectiveArg,
    document: &ScenarioDocument,
    baseline: f64,
) -> String {
    let mut text = String::new();
    writeln!(text, "strategy: {}", StrategyArg(plan.strategy)).unwrap();
    writeln!(text, "objective: {objective}").unwrap();
    writeln!(text, "horizon: {}", document.horizon).unwrap();
    writeln!(text, "seed: {}", document.seed).unwrap();
    writeln!(text, "budget: {} units of {}", plan.budget_units, plan.unit_size).unwrap();
    writeln!(text, "allocations:").unwrap();
    for (country, added) in &plan.allocations {
        if *added > 0.0 {
            writeln!(text, "  {country}: +{added}").unwrap();
        }
    }
    writeln!(text, "baseline value: {baseline}").unwrap();
    writeln!(text, "objective value: {}", plan.objective_value).unwrap();
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use caseflow_core::ObjectiveMode;

    fn doc_with_block() -> ScenarioDocument {
        let text = "\
horizon = 20
seed = 3

[[countries]]
id = \"A\"
capacity_per_period = 2.0

[optimize]
budget_units = 2
strategy = \"greedy\"
objective = \"global\"
";
        parse_scenario(text).unwrap()
    }

    #[test]
    fn flags_override_the_scenario_block() {
        let doc = doc_with_block();
        let (budget, unit, strategy, objective) = resolve_optimize(
            &doc,
            Some(5),
            Some(0.5),
            Some(StrategyArg(Strategy::BruteForce)),
            Some(ObjectiveArg(ObjectiveMode::OwnThroughput("A".into()))),
        )
        .map_err(|_| ())
        .unwrap();
        assert_eq!(budget, 5);
        assert_eq!(unit, 0.5);
        assert_eq!(strategy.0, Strategy::BruteForce);
        assert_eq!(objective.0, ObjectiveMode::OwnThroughput("A".into()));
    }

    #[test]
    fn scenario_block_fills_missing_flags() {
        let doc = doc_with_block();
        let (budget, unit, strategy, objective) =
            resolve_optimize(&doc, None, None, None, None).map_err(|_| ()).unwrap();
        assert_eq!(budget, 2);
        assert_eq!(unit, 1.0);
        assert_eq!(strategy.0, Strategy::Greedy);
        assert_eq!(objective.0, ObjectiveMode::GlobalThroughput);
    }

    #[test]
    fn missing_parameters_are_usage_errors() {
        let mut doc = doc_with_block();
        doc.optimize = None;
        assert!(matches!(
            resolve_optimize(&doc, None, Some(1.0), None, None),
            Err(Failure::Usage(_))
        ));
    }
}
