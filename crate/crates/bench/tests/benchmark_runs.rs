use netpart_bench::benchmark::{median, CountStats, ModeAggregates};
use netpart_bench::{generate_instance, run_benchmark, BenchmarkConfig, GeneratorConfig, ScenarioBatch};
use netpart_core::{Driver, SolveMode};

fn eight_blocks() -> netpart_core::PartitionProblem {
    generate_instance(&GeneratorConfig { blocks: 8, seed: 11, ..Default::default() }).unwrap()
}

#[test]
fn radial_instance_needs_no_cycle_cuts() {
    let tree = generate_instance(&GeneratorConfig { blocks: 6, density: 0.0, seed: 2, ..Default::default() }).unwrap();
    let batch = ScenarioBatch::new(tree, 1, 0.0, 0);
    let config = BenchmarkConfig { modes: vec![SolveMode::Full, SolveMode::CpBoth], ..Default::default() };
    let report = run_benchmark(&batch, &config).unwrap();
    let (full, both) = (report.mode(SolveMode::Full).unwrap(), report.mode(SolveMode::CpBoth).unwrap());
    assert_eq!(both.runs.radial_cuts, vec![0]);
    assert!((full.runs.objectives[0].unwrap() - both.runs.objectives[0].unwrap()).abs() < 1e-6);
}

#[test]
fn full_protocol_batch_has_one_entry_per_scenario() {
    let batch = ScenarioBatch::new(eight_blocks(), 250, 0.2, 42);
    let report = run_benchmark(&batch, &BenchmarkConfig::default()).unwrap();
    assert_eq!(report.modes.len(), 4);
    for m in &report.modes {
        assert_eq!(m.runs.times_s.len(), 250);
        assert_eq!(m.runs.objectives.len(), 250);
        assert_eq!(m.aggregates, ModeAggregates::of(&m.runs));
        assert_eq!(m.aggregates.radial_cuts, CountStats::of(&m.runs.radial_cuts));
        for (served, total) in m.runs.served.iter().zip(&m.runs.total_demand) {
            assert!(*served <= total + 1e-9);
        }
    }
    let full = report.mode(SolveMode::Full).unwrap();
    for s in &report.speedups {
        let other = report.mode(s.mode).unwrap();
        assert_eq!(s.median_speedup, median(&full.runs.times_s) / median(&other.runs.times_s));
    }
    assert_eq!(report.speedups.len(), 3);
    // serialized reports carry the per-scenario arrays
    let json: serde_json::Value = serde_json::to_value(&report).unwrap();
    assert_eq!(json["modes"][0]["runs"]["objectives"].as_array().unwrap().len(), 250);
}

#[test]
fn reports_are_deterministic_apart_from_times() {
    let batch = ScenarioBatch::new(eight_blocks(), 12, 0.2, 7);
    let config = BenchmarkConfig { driver: Driver::Restart, threads: Some(2), ..Default::default() };
    let strip = |mut r: netpart_bench::BenchmarkReport| {
        for m in &mut r.modes {
            m.runs.times_s.clear();
            m.aggregates.median_time_s = 0.0;
            m.aggregates.mean_time_s = 0.0;
        }
        r.speedups.clear();
        r
    };
    let a = strip(run_benchmark(&batch, &config).unwrap());
    let b = strip(run_benchmark(&batch, &BenchmarkConfig { threads: Some(1), ..config.clone() }).unwrap());
    assert_eq!(a, b);
}

#[test]
fn empty_mode_list_is_rejected() {
    let batch = ScenarioBatch::new(eight_blocks(), 1, 0.2, 0);
    let config = BenchmarkConfig { modes: vec![], ..Default::default() };
    assert!(matches!(run_benchmark(&batch, &config), Err(netpart_bench::BenchError::NoModes)));
}
