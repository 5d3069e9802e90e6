use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mmsfair::harness::{gen_random, gen_tight_example, random_suite, run_suite, verify, GeneratorKind, GeneratorSpec};
use mmsfair::json::{allocation_from_json, allocation_to_json, instance_from_json, instance_to_json};
use mmsfair::pipeline::{alpha_for, approx_mms_traced, AlphaMode};
use mmsfair::{Error, Instance, Oracle, Result};

#[derive(Parser)]
#[command(
    name = "mmsfair",
    version,
    about = "Approximate maximin-share allocations with exact arithmetic"
)]
struct Cli {
    #[command(flatten)]
    limits: Limits,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Limits {
    /// Largest good set the exact MMS search accepts.
    #[arg(long, global = true, default_value_t = 20)]
    max_goods: usize,
    /// Largest number of parts the exact MMS search accepts.
    #[arg(long, global = true, default_value_t = 8)]
    max_parts: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an allocation and print the solve report.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// `classic` (3/4), `improved`, or an explicit fraction P/Q.
        #[arg(long, default_value = "improved")]
        alpha: String,
        /// Write the reduction log and bag-filling events here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the allocation here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print maximin shares and witnessing partitions.
    Mms {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        agent: Option<usize>,
    },
    /// Check an allocation against alpha times every agent's MMS.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        allocation: PathBuf,
        /// P/Q, `classic` or `improved`.
        #[arg(long)]
        alpha: String,
    },
    /// Print a generated instance.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Solve a seeded suite in parallel and print per-instance results.
    Bench {
        #[arg(long, value_enum, default_value_t = Suite::Random)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "improved")]
        alpha: String,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    Tight {
        #[arg(long)]
        n: usize,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        bound: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = GeneratorKind::UniformInt)]
        kind: GeneratorKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Random,
}

/// A run that completed but whose verdict is negative.
struct Rejected;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let oracle = Oracle::with_limits(cli.limits.max_goods, cli.limits.max_parts);
    match run(&oracle, cli.command) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Rejected)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Capacity { .. } => ExitCode::from(3),
                Error::InternalInvariant { trace, .. } => {
                    eprintln!("trace: {trace}");
                    ExitCode::from(4)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(oracle: &Oracle, command: Command) -> Result<std::result::Result<(), Rejected>> {
    match command {
        Command::Solve {
            input,
            alpha,
            trace,
            output,
        } => {
            let inst = read_instance(&input)?;
            let mode: AlphaMode = alpha.parse()?;
            let choice = alpha_for(inst.n(), &mode)?;
            let (report, solve_trace) = approx_mms_traced(oracle, &inst, &choice)?;
            if let Some(path) = trace {
                let events = solve_trace
                    .stages
                    .as_ref()
                    .map(|s| s.bag_fill.trace.clone())
                    .unwrap_or_default();
                let doc = serde_json::json!({
                    "reductions": solve_trace.log.records,
                    "bagfill": events,
                });
                fs::write(path, serde_json::to_string_pretty(&doc)?)?;
            }
            if let Some(path) = output {
                fs::write(path, allocation_to_json(&report.allocation))?;
            }
            print_json(&report)?;
        }
        Command::Mms { input, agent } => {
            let inst = read_instance(&input)?;
            let agents: Vec<usize> = match agent {
                Some(a) if a >= inst.n() => {
                    return Err(Error::InvalidReference(format!("agent {a} out of range")));
                }
                Some(a) => vec![a],
                None => (0..inst.n()).collect(),
            };
            let all: mmsfair::Bundle = (0..inst.columns()).map(|c| inst.id(c).clone()).collect();
            let mut out = Vec::new();
            for a in agents {
                let r = oracle.mms(&inst, a, inst.n(), &all)?;
                out.push(serde_json::json!({ "agent": a, "mms": r.value, "partition": r.partition }));
            }
            print_json(&out)?;
        }
        Command::Verify {
            input,
            allocation,
            alpha,
        } => {
            let inst = read_instance(&input)?;
            let alloc = allocation_from_json(&fs::read_to_string(allocation)?)?;
            let alpha = match alpha.parse::<AlphaMode>()? {
                AlphaMode::Explicit(v) => v,
                mode => alpha_for(inst.n(), &mode)?.alpha,
            };
            let report = verify(oracle, &inst, &alloc, &alpha, None)?;
            print_json(&report)?;
            if !report.pass {
                return Ok(Err(Rejected));
            }
        }
        Command::Gen { family } => {
            let inst = match family {
                GenFamily::Tight { n } => gen_tight_example(n)?.instance,
                GenFamily::Random {
                    n,
                    m,
                    bound,
                    seed,
                    kind,
                } => gen_random(&GeneratorSpec {
                    kind,
                    n,
                    m,
                    value_bound: bound,
                    seed,
                })?,
            };
            println!("{}", instance_to_json(&inst));
        }
        Command::Bench {
            suite: Suite::Random,
            count,
            seed,
            alpha,
        } => {
            let mode: AlphaMode = alpha.parse()?;
            let entries = random_suite(count, seed)?;
            let summary = run_suite(oracle, &entries, &mode)?;
            print_json(&summary)?;
            if summary.failed > 0 {
                return Ok(Err(Rejected));
            }
        }
    }
    Ok(Ok(()))
}

fn read_instance(path: &Path) -> Result<Instance> {
    instance_from_json(&fs::read_to_string(path)?)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}
