use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rankmetric_harness::{run, E2eMode, Experiment, ExperimentConfig, Params};

#[derive(Parser)]
#[command(name = "rankmetric", version, about = "Rank-metric code experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed; trial seeds are derived from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of trials (ignored by deterministic experiments).
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// CSV output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads [default: $RANKMETRIC_WORKERS, else all cores].
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Find self-dual normal bases and verify Tr(α^{2^i} α^{2^j}) = δ_ij.
    Basis {
        /// Field degrees (odd).
        #[arg(long, value_delimiter = ',', default_value = "3,5,7,9,11")]
        n: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive minimum rank distance of Gab(n, k).
    GabDistance {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check that Gab(α^{2^k}, n-k) is the trace-dual of Gab(α, k).
    GabDual {
        #[arg(long, value_delimiter = ',', default_value = "3,5,7,9,11")]
        n: Vec<u32>,
        /// Single dimension to check [default: every 1 ≤ k < n].
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Faulty-edge transmissions over random layered networks, optionally
    /// protected by a Gabidulin code.
    NetcodeSim {
        /// Number of network inputs (odd when --k is given).
        #[arg(long)]
        n: Option<u32>,
        /// Code dimension; enables the coded protocol.
        #[arg(long)]
        k: Option<usize>,
        /// Faulty edge counts, cycled over trials [default: 0..=radius, or 0..=5, at most the edge count].
        #[arg(long, value_delimiter = ',')]
        faulty: Vec<usize>,
        /// Columns per transmission, cycled over trials [default: n].
        #[arg(long, value_delimiter = ',')]
        columns: Vec<usize>,
        /// Flip probability on a faulty edge.
        #[arg(long)]
        p: Option<f64>,
        /// Inner layers of generated networks.
        #[arg(long)]
        depth: Option<usize>,
        /// Vertices per inner layer [default: n].
        #[arg(long)]
        width: Option<usize>,
        /// Edge probability between consecutive layers.
        #[arg(long)]
        density: Option<f64>,
        /// Network file; replaces the random networks.
        #[arg(long)]
        network: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Stacked circuit noise: checks rank(Q) ≤ 4t on random circuits.
    StackedSim {
        #[arg(long)]
        max_width: Option<usize>,
        #[arg(long)]
        max_size: Option<usize>,
        /// Gate fault probability.
        #[arg(long)]
        p: Option<f64>,
        /// Layers ℓ [default: circuit width].
        #[arg(long)]
        layers: Option<usize>,
        /// Exact number of faults at random gates, instead of noise.
        #[arg(long)]
        faults: Option<usize>,
        /// Circuit file; replaces the random circuits.
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Quantum Gabidulin code parameters and commutation checks.
    QgabParams {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// [default: r]
        #[arg(long)]
        s: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive minimum rank distance of a small quantum Gabidulin code and
    /// of `--trials` randomly conjugated copies.
    QgabDistance {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        s: Option<usize>,
        /// Gates per conjugating circuit.
        #[arg(long, default_value_t = 20)]
        size: usize,
        #[command(flatten)]
        common: Common,
    },
    /// End-to-end correction of stacked circuit faults.
    QgabE2e {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: usize,
        /// Error source.
        #[arg(long, value_parser = ["circuit", "single-qubit", "random-rank"], default_value = "circuit")]
        mode: String,
        /// Gates per random circuit.
        #[arg(long)]
        size: Option<usize>,
        /// Forced faults per circuit [default: 1 unless --p is given].
        #[arg(long)]
        faults: Option<usize>,
        /// Gate fault probability.
        #[arg(long)]
        p: Option<f64>,
        /// Rank of planted errors in random-rank mode.
        #[arg(long)]
        rank: Option<usize>,
        /// Circuit file; replaces the random circuits.
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn config(command: Command) -> Result<ExperimentConfig, rankmetric_harness::HarnessError> {
    let (experiment, params, common) = match command {
        Command::Basis { n, common } => (
            Experiment::Basis,
            Params {
                n,
                ..Params::default()
            },
            common,
        ),
        Command::GabDistance { n, k, common } => (
            Experiment::GabDistance,
            Params {
                n: vec![n],
                k: Some(k),
                ..Params::default()
            },
            common,
        ),
        Command::GabDual { n, k, common } => (
            Experiment::GabDual,
            Params {
                n,
                k,
                ..Params::default()
            },
            common,
        ),
        Command::NetcodeSim {
            n,
            k,
            faulty,
            columns,
            p,
            depth,
            width,
            density,
            network,
            common,
        } => (
            Experiment::NetcodeSim,
            Params {
                n: n.into_iter().collect(),
                k,
                faulty,
                columns,
                p,
                depth,
                width,
                density,
                network,
                ..Params::default()
            },
            common,
        ),
        Command::StackedSim {
            max_width,
            max_size,
            p,
            layers,
            faults,
            circuit,
            common,
        } => (
            Experiment::StackedSim,
            Params {
                max_width,
                max_size,
                p,
                layers,
                faults,
                circuit,
                ..Params::default()
            },
            common,
        ),
        Command::QgabParams { n, r, s, common } => (
            Experiment::QgabParams,
            Params {
                n: vec![n],
                r: Some(r),
                s,
                ..Params::default()
            },
            common,
        ),
        Command::QgabDistance {
            n,
            r,
            s,
            size,
            common,
        } => (
            Experiment::QgabDistance,
            Params {
                n: vec![n],
                r: Some(r),
                s,
                size: Some(size),
                ..Params::default()
            },
            common,
        ),
        Command::QgabE2e {
            n,
            r,
            mode,
            size,
            faults,
            p,
            rank,
            circuit,
            common,
        } => (
            Experiment::QgabE2e,
            Params {
                n: vec![n],
                r: Some(r),
                mode: mode.parse::<E2eMode>()?,
                size,
                faults,
                p,
                rank,
                circuit,
                ..Params::default()
            },
            common,
        ),
    };
    Ok(ExperimentConfig {
        experiment,
        params,
        seed: common.seed,
        trials: common.trials,
        out: common.out,
        workers: common.workers,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let summary = match config(cli.command).and_then(|c| run(&c)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    // a closed stdout (e.g. piped into `head`) is not an error
    let mut stdout = io::stdout().lock();
    for line in &summary.notes {
        let _ = writeln!(stdout, "{line}");
    }
    let violations = summary.violations();
    if violations > 0 {
        eprintln!(
            "{}: {violations} of {} rows violate an invariant",
            summary.experiment,
            summary.records.len()
        );
        return ExitCode::from(1);
    }
    let _ = writeln!(
        stdout,
        "{}: all {} rows pass",
        summary.experiment,
        summary.records.len()
    );
    ExitCode::SUCCESS
}
