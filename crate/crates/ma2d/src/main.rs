use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ma2d::bench::{
    render_table, render_timing, run_solve, run_table, run_timing, write_csv, BenchRow, Method,
};
use ma2d::methods::{DtPolicy, MethodConfig};

#[derive(Parser)]
#[command(
    name = "ma2d",
    version,
    about = "Finite-difference solvers for det(D^2 u) = f with Dirichlet data on a square"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one example problem and print a run summary.
    Solve {
        #[arg(long, value_enum, ignore_case = true, default_value = "a-newton")]
        method: Method,
        /// Example problem (1, 2 or 3).
        #[arg(long, default_value_t = 1)]
        example: usize,
        /// Grid nodes per side.
        #[arg(long, default_value_t = 31)]
        n: usize,
        #[command(flatten)]
        opts: SolverOpts,
    },
    /// Error table over methods x examples x grid sizes.
    Table {
        #[arg(
            long = "methods",
            value_enum,
            ignore_case = true,
            value_delimiter = ',',
            default_values_t = [Method::ANewton, Method::B, Method::C]
        )]
        methods: Vec<Method>,
        #[arg(long = "examples", value_delimiter = ',', default_values_t = [1, 2, 3])]
        examples: Vec<usize>,
        /// Grid sizes, comma separated.
        #[arg(long = "n", value_delimiter = ',', default_values_t = [31, 45, 63, 89, 127])]
        ns: Vec<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// Write the table to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opts: SolverOpts,
    },
    /// Wall-clock timing sweep on one example.
    Timing {
        #[arg(
            long = "methods",
            value_enum,
            ignore_case = true,
            value_delimiter = ',',
            default_values_t = [Method::B]
        )]
        methods: Vec<Method>,
        #[arg(long, default_value_t = 1)]
        example: usize,
        #[arg(long = "n", value_delimiter = ',', default_values_t = [31, 45, 63, 89, 127])]
        ns: Vec<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opts: SolverOpts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct SolverOpts {
    /// Outer increment tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Outer iteration cap (default depends on the method).
    #[arg(long)]
    max_iters: Option<usize>,
    /// Wide-stencil width.
    #[arg(long)]
    stencil_width: Option<usize>,
    /// Damping factor of method C, in (0, 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Constant initial slack.
    #[arg(long)]
    g0: Option<f64>,
    /// Eigenvalue clamp of the convexified operator.
    #[arg(long)]
    delta: Option<f64>,
    /// Fixed explicit step for the monotone sweep (default: adaptive).
    #[arg(long)]
    dt: Option<f64>,
}

impl SolverOpts {
    fn config(&self) -> MethodConfig {
        let mut cfg = MethodConfig::default();
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        cfg.max_outer = self.max_iters;
        if let Some(v) = self.stencil_width {
            cfg.stencil_width = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.g0 {
            cfg.g0 = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.dt {
            cfg.dt = DtPolicy::Fixed(v);
        }
        cfg
    }
}

fn emit(rows: &[BenchRow], format: OutputFormat, out: Option<&PathBuf>, timing: bool) -> io::Result<()> {
    let body = |w: &mut dyn Write| -> io::Result<()> {
        match format {
            OutputFormat::Text => {
                let text = if timing { render_timing(rows) } else { render_table(rows) };
                w.write_all(text.as_bytes())
            }
            OutputFormat::Csv => {
                write_csv(rows, &mut *w).map_err(|e| io::Error::new(io::ErrorKind::Other, e))
            }
        }
    };
    match out {
        Some(path) => {
            let mut file = File::create(path)?;
            body(&mut file)
        }
        None => body(&mut io::stdout().lock()),
    }
}

fn finish(rows: &[BenchRow], failures: &[String], format: OutputFormat, out: Option<&PathBuf>, timing: bool) -> ExitCode {
    for f in failures {
        eprintln!("error: {f}");
    }
    if let Err(e) = emit(rows, format, out, timing) {
        eprintln!("error: failed to write output: {e}");
        return ExitCode::FAILURE;
    }
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Command::Solve { method, example, n, opts } => {
            match run_solve(method, example, n, &opts.config()) {
                Ok((row, report)) => {
                    println!("method       {}", row.method);
                    println!("example      {}", row.example);
                    println!("N            {}", row.n);
                    println!("iterations   {}", row.iters);
                    println!("converged    {}", row.converged);
                    // Unconverged fixed-point runs return their best iterate,
                    // whose defect is the history minimum, not the last entry.
                    let residual = if row.converged {
                        report.residual_history.last().copied()
                    } else {
                        report.residual_history.iter().copied().reduce(f64::min)
                    };
                    if let Some(r) = residual {
                        println!("residual     {r:.6e}");
                    }
                    if row.error.is_nan() {
                        println!("error        n/a (no exact solution)");
                    } else {
                        println!("error        {:.6e}", row.error);
                    }
                    println!("min_lambda1  {:.6e}", row.min_lambda1);
                    println!("min_gtilde   {:.6e}", row.min_gtilde);
                    println!("seconds      {:.3}", row.seconds);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Table { methods, examples, ns, format, out, opts } => {
            let (rows, failures) = run_table(&methods, &examples, &ns, &opts.config());
            finish(&rows, &failures, format, out.as_ref(), false)
        }
        Command::Timing { methods, example, ns, format, out, opts } => {
            let (rows, failures) = run_timing(&methods, example, &ns, &opts.config());
            finish(&rows, &failures, format, out.as_ref(), true)
        }
    }
}
