#![allow(dead_code)]

use netpart_core::{Block, Consumer, Parameters, PartitionProblem, Provider, Switch};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small random instance: a random spanning tree plus extra switches.
pub fn random_instance(seed: u64, blocks: usize, switches: usize, kappa: usize) -> PartitionProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut node = 0;
    let mut next = || {
        node += 1;
        node
    };
    let mut eligible = 0;
    let mut list = Vec::new();
    for id in 0..blocks {
        let mut b = Block { id, ..Default::default() };
        for _ in 0..rng.gen_range(0..=2) {
            let c_max = rng.gen_range(1..=8) as f64;
            let leader = eligible < 5 && rng.gen_bool(0.5);
            eligible += leader as usize;
            b.providers.push(Provider {
                node: next(),
                c_min: if rng.gen_bool(0.3) { 1.0 } else { 0.0 },
                c_max,
                leader_eligible: leader,
                cost: rng.gen_range(1..=3) as f64,
            });
        }
        for _ in 0..rng.gen_range(0..=2) {
            b.consumers.push(Consumer { node: next(), demand: rng.gen_range(1..=6) as f64 });
        }
        list.push(b);
    }
    if eligible == 0 {
        list[0].providers.push(Provider { node: next(), c_min: 0.0, c_max: 6.0, leader_eligible: true, cost: 1.0 });
    }
    let mut order: Vec<usize> = (0..blocks).collect();
    order.shuffle(&mut rng);
    let mut sw = Vec::new();
    for i in 1..blocks {
        let j = rng.gen_range(0..i);
        sw.push((order[j], order[i]));
    }
    while sw.len() < switches && blocks > 1 {
        let a = rng.gen_range(0..blocks);
        let b = rng.gen_range(0..blocks);
        if a != b {
            sw.push((a, b));
        }
    }
    let switches = sw
        .into_iter()
        .enumerate()
        .map(|(id, (from, to))| Switch { id, from, to, r_max: rng.gen_range(2..=10) as f64 })
        .collect();
    PartitionProblem::new(list, switches, Parameters { kappa, nu: 0.9, gamma: 1.0 }).unwrap()
}

use netpart_core::{BinaryConfig, VariableMap};
use netpart_milp::{LpSession, LpStatus};

/// Fixes every topology binary at `config` and reports LP feasibility.
pub fn fixed_binary_feasible(lp: &mut LpSession, vars: &VariableMap, config: &BinaryConfig) -> bool {
    for (s, &v) in vars.switch.iter().enumerate() {
        let x = config.switches.is_closed(s) as u8 as f64;
        lp.set_bounds(v, x, x);
    }
    for (b, &v) in vars.block.iter().enumerate() {
        let x = config.blocks[b] as u8 as f64;
        lp.set_bounds(v, x, x);
    }
    for (l, &v) in vars.leader.iter().enumerate() {
        let x = config.leaders[l] as u8 as f64;
        lp.set_bounds(v, x, x);
    }
    lp.solve().unwrap() == LpStatus::Optimal
}

pub fn provider(node: usize, c_min: f64, c_max: f64, leader: bool) -> Provider {
    Provider { node, c_min, c_max, leader_eligible: leader, cost: 1.0 }
}

pub fn consumer(node: usize, demand: f64) -> Consumer {
    Consumer { node, demand }
}
