use netpart_bench::generator::switch_count;
use netpart_bench::{generate_instance, parse_network, parse_network_str, serialize_network, GeneratorConfig};
use netpart_core::{is_radial, Parameters, SwitchState};
use proptest::prelude::*;

#[test]
fn generated_ten_block_file_round_trips() {
    let p = generate_instance(&GeneratorConfig { blocks: 10, density: 0.4, providers: 8, seed: 5, ..Default::default() }).unwrap();
    let text = serialize_network(&p);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.json");
    std::fs::write(&path, &text).unwrap();
    let back = parse_network(&path).unwrap();
    assert_eq!(back, p);
    assert_eq!(serialize_network(&back), text);
}

#[test]
fn hundred_seeds_satisfy_the_instance_invariants() {
    let mut shedding_possible = 0;
    for seed in 0..100 {
        let config = GeneratorConfig { blocks: 8, seed, params: Parameters { kappa: 1 + (seed % 2) as usize, ..Default::default() }, ..Default::default() };
        let p = generate_instance(&config).unwrap();
        assert_eq!(p.num_blocks(), 8);
        assert_eq!(p.num_switches(), switch_count(8, config.density));
        assert!(p.num_leaders() >= 1 && p.num_leaders() <= 6);
        // the switch graph is connected: closing everything leaves one component
        let all = SwitchState::new(vec![true; p.num_switches()]);
        assert_eq!(netpart_core::connected_components(&p, &all).unwrap().len(), 1);
        let capacity: f64 = (0..p.num_providers()).map(|g| p.provider(g).c_max).sum();
        if capacity < p.total_demand() {
            shedding_possible += 1;
        }
    }
    // both regimes occur across seeds
    assert!(shedding_possible > 0 && shedding_possible < 100);
}

#[test]
fn unreadable_path_is_an_io_error() {
    assert!(matches!(parse_network(std::path::Path::new("/nonexistent/net.json")), Err(netpart_bench::network_file::ReadError::Io(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_is_canonical(seed in any::<u64>(), blocks in 1usize..10, density in 0.0f64..1.0, providers in 1usize..8) {
        let p = generate_instance(&GeneratorConfig { blocks, density, providers, seed, ..Default::default() }).unwrap();
        let text = serialize_network(&p);
        let back = parse_network_str(&text).unwrap();
        prop_assert_eq!(serialize_network(&back), text);
        prop_assert_eq!(back, p);
    }

    #[test]
    fn spanning_tree_prefix_is_radial(seed in any::<u64>(), blocks in 2usize..10) {
        let p = generate_instance(&GeneratorConfig { blocks, density: 0.0, seed, ..Default::default() }).unwrap();
        prop_assert_eq!(p.num_switches(), blocks - 1);
        let all = SwitchState::new(vec![true; blocks - 1]);
        prop_assert!(is_radial(&p, &all).unwrap());
    }
}
