//! Network files, synthetic instances, demand scenarios and multi-mode
//! benchmarks for the partitioning solver, plus the `netpart` command line.

pub mod benchmark;
pub mod cli;
pub mod generator;
pub mod network_file;
pub mod scenario;

pub use benchmark::{run_benchmark, BenchError, BenchmarkConfig, BenchmarkReport, ModeReport};
pub use generator::{generate_instance, GeneratorConfig, GeneratorError};
pub use network_file::{parse_network, parse_network_str, serialize_network, NetworkError};
pub use scenario::{ScenarioBatch, ScenarioSource};
