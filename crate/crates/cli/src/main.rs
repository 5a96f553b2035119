//! Command-line entry point for the convergence experiments.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use signorini_cli::{csv, json, vtk, ProblemKind, RunConfig, StudyOutput};
use signorini_cr::SolverStrategy;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemArg {
    /// Manufactured solution with known errors
    Known,
    /// Oscillatory source measured against a fine reference solve
    Oscillatory,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    /// Semismooth Newton iteration
    Newton,
    /// Active-set fixed-point iteration
    FixedPoint,
}

/// Convergence studies for a penalty-free Nitsche treatment of unilateral
/// contact with Crouzeix–Raviart elements.
#[derive(Debug, Parser)]
#[command(name = "signorini", version, about)]
struct Cli {
    /// Benchmark problem to run
    #[arg(long, value_enum, default_value_t = ProblemArg::Known)]
    problem: ProblemArg,

    /// Oscillation count N of the oscillatory source
    #[arg(long, default_value_t = 3)]
    n_oscillation: usize,

    /// Number of refinement levels; level i uses an n = 16·2^i mesh
    #[arg(long, default_value_t = 4)]
    levels: usize,

    /// Nitsche scaling γ₀ in γ = γ₀h
    #[arg(long, default_value_t = 10.0)]
    gamma0: f64,

    /// Formulation parameter θ₁ (1 nonsymmetric, 0 reduced, −1 symmetric)
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    theta1: f64,

    /// Formulation parameter θ₂ (0 penalty-free, 1 classical)
    #[arg(long, default_value_t = 0.0)]
    theta2: f64,

    /// Nonlinear iteration strategy
    #[arg(long, value_enum, default_value_t = StrategyArg::Newton)]
    strategy: StrategyArg,

    /// Relative broken-H¹ increment tolerance of the nonlinear iteration
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,

    /// Base path for reports: writes BASE.csv and BASE.json; without this
    /// flag the CSV goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write the finest-level solution as legacy VTK to this path
    #[arg(long)]
    vtk: Option<PathBuf>,

    /// Mesh resolution of the reference solve for the oscillatory problem
    #[arg(long, default_value_t = 512)]
    reference_n: usize,
}

impl Cli {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            problem: match self.problem {
                ProblemArg::Known => ProblemKind::Known,
                ProblemArg::Oscillatory => ProblemKind::Oscillatory,
            },
            n_oscillation: self.n_oscillation,
            levels: self.levels,
            gamma0: self.gamma0,
            theta1: self.theta1,
            theta2: self.theta2,
            strategy: match self.strategy {
                StrategyArg::Newton => SolverStrategy::SemismoothNewton,
                StrategyArg::FixedPoint => SolverStrategy::FixedPoint,
            },
            rel_increment_tol: self.tol,
            reference_n: self.reference_n,
        }
    }
}

fn write_reports(cli: &Cli, output: &StudyOutput) -> io::Result<()> {
    match &cli.out {
        Some(base) => {
            let csv_path = PathBuf::from(format!("{}.csv", base.display()));
            let json_path = PathBuf::from(format!("{}.json", base.display()));
            csv::write_csv(&output.report, &mut BufWriter::new(File::create(&csv_path)?))?;
            json::write_json(&output.report, &mut BufWriter::new(File::create(&json_path)?))?;
            eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
        }
        None => {
            let stdout = io::stdout();
            csv::write_csv(&output.report, &mut stdout.lock())?;
        }
    }
    if let Some(path) = &cli.vtk {
        let finest = output
            .fields
            .last()
            .expect("a validated study has at least two levels");
        vtk::export_solution(finest, &mut BufWriter::new(File::create(path)?))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: &Cli) -> u8 {
    let config = cli.to_config();
    if let Err(e) = config.validate() {
        eprintln!("invalid configuration: {e}");
        return 2;
    }
    let output = match signorini_cli::run_convergence_study(&config) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("study failed: {e}");
            return 1;
        }
    };
    for record in &output.report.levels {
        let mark = if record.converged { "converged" } else { "DID NOT CONVERGE" };
        eprintln!(
            "level {}: n = {}, dofs = {}, iterations = {}, {}",
            record.level, record.n, record.n_dofs, record.solve.iterations, mark
        );
    }
    if let Err(e) = write_reports(cli, &output) {
        eprintln!("failed to write reports: {e}");
        return 1;
    }
    if output.report.all_converged {
        0
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(&cli);
    io::stdout().flush().ok();
    ExitCode::from(code)
}
