//! `melonic`: runs the identity checks and prints one report per line.

mod checks;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use checks::Knobs;
use report::{CheckReport, Status};

#[derive(Parser)]
#[command(name = "melonic", version, about = "Exact checks for the quartic melonic tensor model")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include wall-clock time in each report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check an identity order by order.
    #[command(subcommand)]
    Verify(Verify),
    /// Closed-form quantities of the quartic matrix model.
    #[command(subcommand)]
    Compute(Compute),
    /// Inspect a colored graph given as JSON.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Gaussian moments, symbolic in N and checked against index sums.
    #[command(subcommand)]
    Moment(MomentCmd),
}

#[derive(Subcommand)]
enum Verify {
    /// Direct, intermediate-field and e^Y routes to Z, plus the N-grading of log Z.
    Decomposition(Knobs),
    /// [X, Y] = D Y on basis monomials.
    Commutator(Knobs),
    /// Coefficients of the affine BCH series.
    Bch(Knobs),
    /// L_n Z = 0 for the one-matrix model, n = -1..2.
    Virasoro(Knobs),
    /// Orthogonality, K_N identities and Gaussian norms.
    Orthopoly(Knobs),
    /// Bilinear residue of the one-matrix model.
    Hirota(Knobs),
    /// Closed form of the conjugated vertex operators.
    Conjugation(Knobs),
    /// Bilinear residue of the tensor model, per color.
    TensorBilinear(Knobs),
}

#[derive(Subcommand)]
enum Compute {
    /// Planar two-point coefficients against the closed form.
    Tutte {
        #[arg(long, default_value_t = 4)]
        nmax: u32,
    },
    /// Free energy of the quartic matrix model.
    FreeEnergy(Knobs),
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Degree as the sum of jacket genera.
    Degree {
        #[arg(long)]
        file: PathBuf,
    },
    /// Faces, Euler characteristic and genus of every jacket.
    Jackets {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum MomentCmd {
    /// `⟨∏ Tr M^k⟩` for a comma-separated list of powers.
    Matrix {
        #[arg(long, value_delimiter = ',', required = true)]
        word: Vec<u32>,
        /// Compare with explicit index sums for N = 1..=nsize.
        #[arg(long, default_value_t = 2)]
        nsize: u32,
    },
    /// Moment of the tensor invariant described by a graph file.
    Tensor {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        nsize: u32,
    },
}

fn run(cmd: &Cmd) -> Vec<CheckReport> {
    match cmd {
        Cmd::Verify(v) => match v {
            Verify::Decomposition(k) => checks::decomposition(k),
            Verify::Commutator(k) => checks::commutator(k),
            Verify::Bch(k) => checks::bch(k),
            Verify::Virasoro(k) => checks::virasoro(k),
            Verify::Orthopoly(k) => checks::orthopoly(k),
            Verify::Hirota(k) => checks::hirota(k),
            Verify::Conjugation(k) => checks::conjugation(k),
            Verify::TensorBilinear(k) => checks::tensor_bilinear(k),
        },
        Cmd::Compute(c) => match c {
            Compute::Tutte { nmax } => checks::tutte(*nmax),
            Compute::FreeEnergy(k) => checks::free_energy(k),
        },
        Cmd::Graph(g) => match g {
            GraphCmd::Degree { file } => checks::graph_degree(file),
            GraphCmd::Jackets { file } => checks::graph_jackets(file),
        },
        Cmd::Moment(m) => match m {
            MomentCmd::Matrix { word, nsize } => checks::moment_matrix(word, *nsize),
            MomentCmd::Tensor { file, nsize } => checks::moment_tensor(file, *nsize),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let mut reports = run(&cli.cmd);
    if cli.timing {
        // the checks of one invocation share a single clock
        let ms = start.elapsed().as_millis() as u64;
        for r in &mut reports {
            r.runtime_ms = Some(ms);
        }
    }

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for r in &reports {
        let line = match cli.format {
            Format::Json => serde_json::to_string(r).expect("report serializes"),
            Format::Text => r.to_text(),
        };
        // a closed pipe is not worth a panic
        if writeln!(out, "{line}").is_err() {
            break;
        }
    }

    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    let (pass, fail, error) = (count(Status::Pass), count(Status::Fail), count(Status::Error));
    eprintln!("{} checks: {pass} passed, {fail} failed, {error} errors", reports.len());
    if error > 0 {
        ExitCode::from(2)
    } else if fail > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
