mod common;

use std::collections::HashSet;

use netpart_core::{
    enumerate_optimal, solve_with_cuts, solve_with_options, Block, Driver, Error, Parameters, PartitionProblem,
    SolveMode, SolveOptions, Switch,
};

/// Four blocks fed from block 0. Only the closed loop splits the flow so that
/// every switch stays within its rating.
fn ring() -> PartitionProblem {
    let blocks = (0..4)
        .map(|id| Block {
            id,
            providers: if id == 0 { vec![common::provider(0, 0.0, 20.0, true)] } else { vec![] },
            consumers: if id == 0 { vec![] } else { vec![common::consumer(100 + id, 5.0)] },
            ..Default::default()
        })
        .collect();
    let switches = (0..4).map(|id| Switch { id, from: id, to: (id + 1) % 4, r_max: 8.0 }).collect();
    PartitionProblem::new(blocks, switches, Parameters { kappa: 1, ..Default::default() }).unwrap()
}

fn path(n: usize) -> PartitionProblem {
    let blocks = (0..n)
        .map(|id| Block { id, providers: vec![common::provider(id, 0.0, 3.0, true)], consumers: vec![common::consumer(100 + id, 1.0)], ..Default::default() })
        .collect();
    let switches = (0..n - 1).map(|id| Switch { id, from: id, to: id + 1, r_max: 5.0 }).collect();
    PartitionProblem::new(blocks, switches, Parameters { kappa: 2, ..Default::default() }).unwrap()
}

#[test]
fn ring_needs_a_cycle_cut() {
    let p = ring();
    let oracle = enumerate_optimal(&p).unwrap().objective.unwrap();
    for driver in [Driver::Restart, Driver::Callback] {
        let out = solve_with_cuts(&p, SolveMode::CpRadial, driver).unwrap();
        assert!(out.report.cycle_cuts >= 1);
        assert!(out.report.iterations >= 1);
        assert!((out.report.objective.unwrap() - oracle).abs() < 1e-6);
        let topo = out.report.topology.unwrap();
        assert!(topo.closed_switches.len() <= 3);
        assert!(topo.percent_served < 100.0);
    }
}

#[test]
fn tree_needs_no_cycle_cuts() {
    let p = path(4);
    for driver in [Driver::Restart, Driver::Callback] {
        let out = solve_with_cuts(&p, SolveMode::CpRadial, driver).unwrap();
        assert_eq!(out.report.cycle_cuts, 0);
        assert_eq!(out.report.iterations, 0);
    }
}

#[test]
fn full_mode_generates_no_cuts() {
    let p = ring();
    let out = solve_with_cuts(&p, SolveMode::Full, Driver::Restart).unwrap();
    assert_eq!(out.report.total_cuts(), 0);
    assert!(out.cuts.is_empty());
}

#[test]
fn restart_rounds_are_bounded_and_never_repeat() {
    for seed in 0..8u64 {
        let p = common::random_instance(seed, 5, 7, 1 + (seed % 2) as usize);
        let out = solve_with_cuts(&p, SolveMode::CpBoth, Driver::Restart).unwrap();
        let distinct: HashSet<_> = out.candidates.iter().collect();
        assert_eq!(distinct.len(), out.candidates.len());
        assert!((out.report.iterations as u64) <= 1 << p.num_switches());
        for record in &out.cuts {
            assert!(!record.cut.is_satisfied(&record.trigger));
        }
    }
}

#[test]
fn iteration_cap_is_enforced() {
    let p = ring();
    let options = SolveOptions { iteration_cap: Some(0), ..Default::default() };
    let result = solve_with_options(&p, SolveMode::CpRadial, Driver::Restart, &options);
    assert!(matches!(result, Err(Error::IterationCap(0))));
}
