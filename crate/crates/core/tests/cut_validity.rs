mod common;

use netpart_core::cuts::{evaluate_phi, leader_lower_cut, leader_upper_cut};
use netpart_core::oracle::feasible_set;
use netpart_core::{
    is_radial, separate_cycles, separate_leader_violations, BinaryConfig, Block, ComponentSignature, Parameters,
    PartitionProblem, Provider, Switch, SwitchState,
};
use proptest::prelude::*;

fn k4() -> PartitionProblem {
    let blocks = (0..4)
        .map(|id| Block {
            id,
            providers: vec![Provider { node: id, c_min: 0.0, c_max: 1.0, leader_eligible: true, cost: 1.0 }],
            ..Default::default()
        })
        .collect();
    let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let switches = edges.iter().enumerate().map(|(id, &(from, to))| Switch { id, from, to, r_max: 1.0 }).collect();
    PartitionProblem::new(blocks, switches, Parameters::default()).unwrap()
}

#[test]
fn all_closed_k4_yields_three_cycle_cuts_valid_for_every_radial_state() {
    let p = k4();
    let closed = BinaryConfig::from_masks(&p, 0b111111, 0b1111, 0);
    let cuts = separate_cycles(&p, &closed).unwrap();
    assert_eq!(cuts.len(), 3);
    let mut radial = 0;
    for mask in 0..64u64 {
        let state = SwitchState::from_mask(6, mask);
        if !is_radial(&p, &state).unwrap() {
            continue;
        }
        radial += 1;
        let config = BinaryConfig::from_masks(&p, mask, 0b1111, 0);
        for cut in &cuts {
            assert!(cut.is_satisfied(&config), "{:?} cuts off radial mask {:06b}", cut, mask);
        }
    }
    // forests of K4: 1 + 6 + 15 + 16
    assert_eq!(radial, 38);
    for cut in &cuts {
        assert!(!cut.is_satisfied(&closed));
    }
}

fn signature(ex: usize, inn: usize, bl: usize, leaders: usize) -> ComponentSignature {
    ComponentSignature {
        external: (0..ex).collect(),
        internal: (ex..ex + inn).collect(),
        blocks: (0..bl).collect(),
        leaders: (0..leaders).collect(),
    }
}

/// The linear leader cuts agree with their indicator forms on every binary
/// point of small signatures.
#[test]
fn linear_leader_cuts_match_indicator_forms() {
    for kappa in 1..=2usize {
        for ex in 0..=2 {
            for inn in 0..=2 {
                for bl in 1..=2 {
                    for nl in 0..=kappa + 2 {
                        let sig = signature(ex, inn, bl, nl);
                        let lower = leader_lower_cut(&sig);
                        let upper = leader_upper_cut(&sig, kappa);
                        let (ns, nb) = (ex + inn, bl);
                        for bits in 0..1u64 << (ns + nb + nl) {
                            let config = BinaryConfig {
                                switches: SwitchState::from_mask(ns, bits & ((1 << ns) - 1)),
                                blocks: (0..nb).map(|b| bits >> (ns + b) & 1 == 1).collect(),
                                leaders: (0..nl).map(|l| bits >> (ns + nb + l) & 1 == 1).collect(),
                            };
                            let phi = evaluate_phi(&config, &sig) as usize;
                            let count = config.leaders.iter().filter(|&&x| x).count();
                            assert_eq!(lower.is_satisfied(&config), count >= phi);
                            let bound = if phi == 1 { kappa } else { nl };
                            assert_eq!(upper.as_ref().map_or(true, |c| c.is_satisfied(&config)), count <= bound);
                        }
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Cuts separated at arbitrary binary points never remove a feasible
    /// topology and always remove the point itself.
    #[test]
    fn separated_cuts_are_valid(seed in 0u64..10_000, kappa in 1usize..3, sw in any::<u64>(), bl in any::<u64>(), ld in any::<u64>()) {
        let p = common::random_instance(seed, 4, 5, kappa);
        let feasible = feasible_set(&p).unwrap();
        let point = BinaryConfig::from_masks(&p, sw & 31, bl & 15, ld);
        let mut cuts = separate_cycles(&p, &point).unwrap();
        cuts.extend(separate_leader_violations(&p, &point).unwrap());
        for cut in &cuts {
            prop_assert!(!cut.is_satisfied(&point));
        }
        feasible.for_each(|s, b, l| {
            let config = BinaryConfig::from_masks(&p, s, b, l);
            for cut in &cuts {
                assert!(cut.is_satisfied(&config), "{:?} removes feasible {:?}", cut, config);
            }
        });
    }
}
