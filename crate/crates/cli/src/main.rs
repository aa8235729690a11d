use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use output::{Format, Output};

#[derive(Parser)]
#[command(name = "levycap", version, about = "Capacities of Lévy image sets: gauges, energies, criteria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    /// Indent JSON output.
    #[arg(long, global = true)]
    pretty: bool,
}

/// Radial integration controls shared by the gauge-based commands.
#[derive(Args, Clone)]
pub struct RingArgs {
    /// Outer radius of the dyadic-ring integration.
    #[arg(long, default_value_t = 1048576.0)]
    r_max: f64,
    /// Relative tolerance per panel.
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Partial sums above this value are reported divergent.
    #[arg(long, default_value_t = 1e6)]
    threshold: f64,
    /// Evaluate every ring up to r-max instead of stopping early.
    #[arg(long)]
    exhaust: bool,
}

impl RingArgs {
    fn controls(&self) -> levycap::GaugeControls {
        levycap::GaugeControls {
            r_max: self.r_max,
            rel_tol: self.rel_tol,
            threshold: self.threshold,
            exhaust: self.exhaust,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate Ψ(ξ).
    Exponent {
        #[arg(long)]
        spec: PathBuf,
        /// Frequencies; in dimension d every d consecutive values form one ξ.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xi: Vec<f64>,
    },
    /// Evaluate g_{γ,±}(x) or f_γ(x).
    Gauge {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        gamma: f64,
        /// plus, minus or full.
        #[arg(long, default_value = "plus")]
        sign: String,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "x_range", required_unless_present = "x_range")]
        x: Option<f64>,
        /// Range a:b:step (inclusive).
        #[arg(long)]
        x_range: Option<String>,
        /// Emit the per-ring partial sums for a single x.
        #[arg(long, conflicts_with = "x_range")]
        rings: bool,
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Energy of a measure under a kernel, or χ_ξ-energies.
    Energy {
        #[arg(long)]
        measure: PathBuf,
        /// riesz:β or gauge:sign:γ.
        #[arg(long, conflicts_with = "xi", required_unless_present = "xi")]
        kernel: Option<String>,
        /// Frequency for χ_ξ-energies (requires --spec).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Option<Vec<f64>>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PolicyArg::Natural)]
        policy: PolicyArg,
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Minimal energy and capacity on a grid schedule, or on one measure.
    Capacity {
        /// riesz:β or gauge:sign:γ.
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        spec: Option<PathBuf>,
        /// interval:a:b or cantor.
        #[arg(long, default_value = "interval:0:1", conflicts_with = "measure")]
        grid: String,
        /// Grid sizes (interval) or depths (cantor).
        #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
        schedule: Vec<usize>,
        /// Solve on a single measure file instead of a schedule.
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-8)]
        gap_tol: f64,
        #[arg(long, default_value_t = 20000)]
        max_iter: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Fourier-side criterion integral and its consistency checks.
    Criterion {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = CheckArg::Integral)]
        check: CheckArg,
        /// Gauge exponent for --check fubini (default d - β).
        #[arg(long)]
        gamma: Option<f64>,
        /// Sign part for --check fubini.
        #[arg(long, default_value = "plus")]
        sign: String,
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Monte Carlo checks of the energy identity.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = SimMode::Energy)]
        mode: SimMode,
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Option<Vec<f64>>,
        /// Later time for --mode chi.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Earlier time for --mode chi.
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        /// Riesz exponent for --mode image.
        #[arg(long)]
        beta: Option<f64>,
        /// Times for --mode path.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 1000)]
        batch_size: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long)]
        antithetic: bool,
    },
    /// Scripted reproductions of the worked cases.
    Casebook {
        #[arg(value_enum)]
        case: CaseArg,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        /// Series length for the drift case.
        #[arg(long, default_value_t = 1_000_000)]
        k_terms: usize,
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
        /// Sample count for the "identically zero" check of the Poisson case.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Spec for the symmetric and audit cases (default: Brownian).
        #[arg(long)]
        spec: Option<PathBuf>,
        /// γ for the symmetric case.
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        /// Measure for the audit case (default: uniform(0,1,8)).
        #[arg(long)]
        measure: Option<PathBuf>,
        #[command(flatten)]
        ring: RingArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    /// Cell averages for grid measures, point values otherwise.
    Natural,
    Raw,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CheckArg {
    Integral,
    Fubini,
    ConditionE,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SimMode {
    Energy,
    Chi,
    Image,
    Path,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum CaseArg {
    Drift,
    Poisson,
    Symmetric,
    Audit,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output {
        format: cli.format,
        path: cli.output,
        pretty: cli.pretty,
    };
    match commands::run(cli.command, &out) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
