//! Command-line grammar.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vnfperf_core::sim::{DEFAULT_MEASURED_PACKETS, DEFAULT_QUEUE_CAP};
use vnfperf_core::Method;

use crate::commands::{self, Global, OutputFormat, SimOptions};
use crate::error::CliError;
use crate::parallel::available_threads;

#[derive(Debug, Parser)]
#[command(name = "vnfperf", version, about = "Performance models of virtualized network functions")]
pub struct Cli {
    /// Directory receiving result files and manifests.
    #[arg(long, global = true, default_value = "vnfperf-out")]
    pub output_dir: PathBuf,
    /// Rendering of the stdout view. Result files are always CSV and JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed of all random streams.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    Qna,
    Jackson,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyticMethod {
    Qna,
    Jackson,
}

impl From<AnalyticMethod> for Method {
    fn from(m: AnalyticMethod) -> Self {
        match m {
            AnalyticMethod::Qna => Method::Qna,
            AnalyticMethod::Jackson => Method::Jackson,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Packets leaving the system measured per replication (after a 10% warmup).
    #[arg(long, default_value_t = DEFAULT_MEASURED_PACKETS)]
    pub packets: u64,
    #[arg(long, default_value_t = 1)]
    pub replications: u32,
    /// Worker threads for replications (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Largest waiting line tolerated at any queue before the run is
    /// declared divergent.
    #[arg(long, default_value_t = DEFAULT_QUEUE_CAP)]
    pub queue_cap: usize,
    /// Count EPC delays in the response time (scenario files).
    #[arg(long)]
    pub include_epc_delays: bool,
}

impl SimArgs {
    fn options(&self) -> SimOptions {
        SimOptions {
            packets: self.packets,
            replications: self.replications,
            queue_cap: self.queue_cap,
            threads: self.threads.unwrap_or_else(available_threads),
            include_epc_delays: self.include_epc_delays,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a network or scenario analytically.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMethod::Qna)]
        method: SolveMethod,
        /// Include the intermediate quantities of the SCV system.
        #[arg(long)]
        explain: bool,
    },
    /// Run the discrete-event simulator.
    Simulate {
        file: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
        /// Record the first N events to simulate-trace.csv (network files).
        #[arg(long, value_name = "N", num_args = 0..=1, default_missing_value = "100000")]
        trace: Option<usize>,
    },
    /// Tabulate response times of several methods, optionally against simulation.
    Compare {
        file: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [AnalyticMethod::Qna, AnalyticMethod::Jackson])]
        methods: Vec<AnalyticMethod>,
        #[arg(long)]
        simulate: bool,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Autoscale workers over a range of user counts.
    Sweep {
        file: PathBuf,
        /// `a:b:step` ranges or single values, comma separated.
        #[arg(long)]
        users: String,
        #[arg(long, value_enum, default_value_t = AnalyticMethod::Qna)]
        method: AnalyticMethod,
        #[arg(long, default_value_t = 256)]
        max_workers: usize,
        /// User counts (from the sweep) to cross-check by simulation.
        #[arg(long, value_delimiter = ',')]
        simulate_at: Vec<String>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Check a network or scenario file and list every problem.
    Validate { file: PathBuf },
}

impl Cli {
    pub fn global(&self) -> Global {
        let format = match self.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
            Format::Text => OutputFormat::Text,
        };
        Global { output_dir: self.output_dir.clone(), format, seed: self.seed }
    }

    pub fn run(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let g = self.global();
        match &self.command {
            Command::Solve { file, method, explain } => {
                let methods = match method {
                    SolveMethod::Qna => vec![Method::Qna],
                    SolveMethod::Jackson => vec![Method::Jackson],
                    SolveMethod::Both => vec![Method::Qna, Method::Jackson],
                };
                commands::solve(&g, file, &methods, *explain, out)
            }
            Command::Simulate { file, sim, trace } => commands::simulate(&g, file, &sim.options(), *trace, out),
            Command::Compare { file, methods, simulate, sim } => {
                let methods: Vec<Method> = methods.iter().map(|&m| m.into()).collect();
                let opts = sim.options();
                commands::compare(&g, file, &methods, simulate.then_some(&opts), out)
            }
            Command::Sweep { file, users, method, max_workers, simulate_at, sim } => {
                let users = commands::parse_users(users)?;
                let at = commands::parse_users(&simulate_at.join(",")).or_else(|e| {
                    if simulate_at.is_empty() {
                        Ok(Vec::new())
                    } else {
                        Err(e)
                    }
                })?;
                commands::sweep(&g, file, &users, (*method).into(), *max_workers, &at, &sim.options(), out)
            }
            Command::Validate { file } => commands::validate(&g, file, out),
        }
    }
}
