//! Instance generators, the verification driver and batch runs.

mod bench;
mod generate;
mod verify;

pub use bench::{run_suite, BenchRow, BenchSummary};
pub use generate::{
    gen_random, gen_tight_example, random_suite, tight_cap, tight_tau, GeneratorKind, GeneratorSpec, SuiteEntry,
    TightExample,
};
pub use verify::{verify, AgentVerdict, VerdictReport};
