//! Multi-mode runs over a scenario batch and the aggregated report.

use netpart_core::{solve_with_options, Driver, Error, PartitionProblem, SolveMode, SolveOptions, SolveReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generator::GeneratorError;
use crate::scenario::{ScenarioBatch, ScenarioSource};

/// Objectives of different modes on one scenario may differ by at most this.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("no modes requested")]
    NoModes,
    #[error("scenario {scenario}, mode {mode}: {source}")]
    Solve { scenario: usize, mode: SolveMode, source: Error },
    #[error("scenario {scenario}: {a} gives {a_obj:?} but {b} gives {b_obj:?}")]
    Disagreement { scenario: usize, a: SolveMode, a_obj: Option<f64>, b: SolveMode, b_obj: Option<f64> },
    #[error("scenario {scenario}: {source}")]
    Generator { scenario: usize, source: GeneratorError },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub modes: Vec<SolveMode>,
    pub driver: Driver,
    /// Worker threads; `None` uses one per core.
    pub threads: Option<usize>,
    pub options: SolveOptions,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self { modes: SolveMode::ALL.to_vec(), driver: Driver::Callback, threads: None, options: SolveOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountStats {
    pub avg: f64,
    pub min: usize,
    pub max: usize,
}

impl CountStats {
    pub fn of(values: &[usize]) -> Self {
        if values.is_empty() {
            return Self { avg: 0.0, min: 0, max: 0 };
        }
        Self {
            avg: values.iter().sum::<usize>() as f64 / values.len() as f64,
            min: *values.iter().min().unwrap(),
            max: *values.iter().max().unwrap(),
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Per-scenario results of one mode, index-aligned with the batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ModeRuns {
    pub times_s: Vec<f64>,
    pub objectives: Vec<Option<f64>>,
    pub radial_cuts: Vec<usize>,
    pub leader_cuts: Vec<usize>,
    pub iterations: Vec<usize>,
    pub nodes: Vec<usize>,
    pub energized_blocks: Vec<usize>,
    pub served: Vec<f64>,
    pub total_demand: Vec<f64>,
    pub percent_served: Vec<f64>,
}

impl ModeRuns {
    fn push(&mut self, report: &SolveReport) {
        self.times_s.push(report.wall_time_s);
        self.objectives.push(report.objective);
        self.radial_cuts.push(report.radial_cuts());
        self.leader_cuts.push(report.leader_cuts());
        self.iterations.push(report.iterations);
        self.nodes.push(report.nodes);
        match &report.topology {
            Some(t) => {
                self.energized_blocks.push(t.blocks.iter().filter(|b| b.active).count());
                self.served.push(t.served_demand);
                self.total_demand.push(t.total_demand);
                self.percent_served.push(t.percent_served);
            }
            None => {
                self.energized_blocks.push(0);
                self.served.push(0.0);
                self.total_demand.push(f64::NAN);
                self.percent_served.push(0.0);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeAggregates {
    pub radial_cuts: CountStats,
    pub leader_cuts: CountStats,
    pub iterations: CountStats,
    pub median_time_s: f64,
    pub mean_time_s: f64,
    pub avg_energized_blocks: f64,
    pub avg_served: f64,
    pub avg_percent_served: f64,
}

impl ModeAggregates {
    pub fn of(runs: &ModeRuns) -> Self {
        Self {
            radial_cuts: CountStats::of(&runs.radial_cuts),
            leader_cuts: CountStats::of(&runs.leader_cuts),
            iterations: CountStats::of(&runs.iterations),
            median_time_s: median(&runs.times_s),
            mean_time_s: mean(&runs.times_s),
            avg_energized_blocks: mean(&runs.energized_blocks.iter().map(|&b| b as f64).collect::<Vec<_>>()),
            avg_served: mean(&runs.served),
            avg_percent_served: mean(&runs.percent_served),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub mode: SolveMode,
    pub runs: ModeRuns,
    pub aggregates: ModeAggregates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Speedup {
    pub mode: SolveMode,
    /// `median(full times) / median(mode times)`.
    pub median_speedup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub blocks: usize,
    pub switches: usize,
    pub providers: usize,
    pub leaders: usize,
    pub kappa: usize,
    pub nu: f64,
    pub gamma: f64,
    pub nominal_demand: f64,
}

impl InstanceSummary {
    pub fn of(p: &PartitionProblem) -> Self {
        Self {
            blocks: p.num_blocks(),
            switches: p.num_switches(),
            providers: p.num_providers(),
            leaders: p.num_leaders(),
            kappa: p.kappa(),
            nu: p.params().nu,
            gamma: p.params().gamma,
            nominal_demand: p.total_demand(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SourceSummary {
    Network(InstanceSummary),
    Family { blocks: usize, density: f64, providers: usize, max_leaders: usize, kappa: usize, nu: f64, gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub source: SourceSummary,
    pub scenarios: usize,
    pub rho: f64,
    pub seed: u64,
    pub driver: Driver,
    pub modes: Vec<ModeReport>,
    pub speedups: Vec<Speedup>,
}

impl BenchmarkReport {
    pub fn mode(&self, mode: SolveMode) -> Option<&ModeReport> {
        self.modes.iter().find(|m| m.mode == mode)
    }
}

fn agree(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() <= AGREEMENT_TOL,
        (None, None) => true,
        _ => false,
    }
}

fn solve_scenario(batch: &ScenarioBatch, m: usize, config: &BenchmarkConfig) -> Result<Vec<SolveReport>, BenchError> {
    let problem = batch.scenario(m).map_err(|source| BenchError::Generator { scenario: m, source })?;
    let mut reports: Vec<SolveReport> = Vec::with_capacity(config.modes.len());
    for &mode in &config.modes {
        let out = solve_with_options(&problem, mode, config.driver, &config.options)
            .map_err(|source| BenchError::Solve { scenario: m, mode, source })?;
        if let Some(first) = reports.first() {
            if !agree(first.objective, out.report.objective) {
                return Err(BenchError::Disagreement {
                    scenario: m,
                    a: first.mode,
                    a_obj: first.objective,
                    b: mode,
                    b_obj: out.report.objective,
                });
            }
        }
        reports.push(out.report);
    }
    Ok(reports)
}

/// Solves every scenario in every mode. Scenarios run on a bounded worker
/// pool; all modes of one scenario run on the same worker, one after the
/// other, and must agree on the objective.
pub fn run_benchmark(batch: &ScenarioBatch, config: &BenchmarkConfig) -> Result<BenchmarkReport, BenchError> {
    if config.modes.is_empty() {
        return Err(BenchError::NoModes);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| BenchError::Pool(e.to_string()))?;
    let results: Vec<Result<Vec<SolveReport>, BenchError>> =
        pool.install(|| (0..batch.count).into_par_iter().map(|m| solve_scenario(batch, m, config)).collect());

    let mut runs: Vec<ModeRuns> = vec![ModeRuns::default(); config.modes.len()];
    for result in results {
        for (k, report) in result?.iter().enumerate() {
            runs[k].push(report);
        }
    }
    let modes: Vec<ModeReport> = config
        .modes
        .iter()
        .zip(runs)
        .map(|(&mode, runs)| ModeReport { mode, aggregates: ModeAggregates::of(&runs), runs })
        .collect();
    let speedups = match modes.iter().find(|m| m.mode == SolveMode::Full) {
        Some(full) => modes
            .iter()
            .filter(|m| m.mode != SolveMode::Full)
            .map(|m| Speedup { mode: m.mode, median_speedup: full.aggregates.median_time_s / m.aggregates.median_time_s })
            .collect(),
        None => Vec::new(),
    };
    let source = match &batch.source {
        ScenarioSource::Fixed(p) => SourceSummary::Network(InstanceSummary::of(p)),
        ScenarioSource::Family(c) => SourceSummary::Family {
            blocks: c.blocks,
            density: c.density,
            providers: c.providers,
            max_leaders: c.max_leaders,
            kappa: c.params.kappa,
            nu: c.params.nu,
            gamma: c.params.gamma,
        },
    };
    Ok(BenchmarkReport { source, scenarios: batch.count, rho: batch.rho, seed: batch.seed, driver: config.driver, modes, speedups })
}

/// Cut statistics in table form: one row per mode.
pub fn cut_table(report: &BenchmarkReport) -> String {
    let mut out = String::from("mode        radial avg  min  max    gf avg  min  max  median s\n");
    for m in &report.modes {
        let (r, g) = (&m.aggregates.radial_cuts, &m.aggregates.leader_cuts);
        out.push_str(&format!(
            "{:<10} {:>11.2} {:>4} {:>4} {:>9.2} {:>4} {:>4} {:>9.4}\n",
            m.mode.name(),
            r.avg,
            r.min,
            r.max,
            g.avg,
            g.min,
            g.max,
            m.aggregates.median_time_s
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn count_stats() {
        let s = CountStats::of(&[2, 0, 4]);
        assert_eq!((s.avg, s.min, s.max), (2.0, 0, 4));
    }

    #[test]
    fn agreement() {
        assert!(agree(Some(1.0), Some(1.0 + 5e-7)));
        assert!(!agree(Some(1.0), Some(1.0 + 2e-6)));
        assert!(agree(None, None));
        assert!(!agree(Some(0.0), None));
    }
}
