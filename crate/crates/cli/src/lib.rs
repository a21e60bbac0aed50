//! Configuration, suites and output formats behind the `heatstein` binary.

pub mod config;
pub mod emit;
pub mod suite;

pub use config::{ASource, ExperimentConfig, FileConfig, Overrides};
pub use emit::{dump_samples, emit, EmitKind, SampleKind};
pub use suite::{run_suite, write_jsonl, Header, Suite};
