//! Benchmark harness: runs the solvers over the example problems and grid
//! sizes, collects per-run rows and serializes them as text or CSV.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::methods::{
    method_a_euler, method_a_newton, method_b_solve, method_c_solve, MethodConfig, SolveReport,
};
use crate::problems::{example1, example2, example3, linf_error, Problem};

/// Solver selector for benchmark runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Method {
    AEuler,
    ANewton,
    B,
    C,
}

pub const ALL_METHODS: [Method; 4] = [Method::AEuler, Method::ANewton, Method::B, Method::C];

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::AEuler => "A-euler",
            Method::ANewton => "A-newton",
            Method::B => "B",
            Method::C => "C",
        };
        f.write_str(s)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a-euler" => Ok(Method::AEuler),
            "a-newton" => Ok(Method::ANewton),
            "b" => Ok(Method::B),
            "c" => Ok(Method::C),
            _ => Err(Error::InvalidData(format!(
                "unknown method '{s}' (expected A-euler, A-newton, B or C)"
            ))),
        }
    }
}

/// The built-in example problems, numbered 1 to 3.
pub fn example_problem(example: usize) -> Result<Problem> {
    match example {
        1 => Ok(example1()),
        2 => Ok(example2()),
        3 => Ok(example3()),
        _ => Err(Error::InvalidData(format!("example must be 1, 2 or 3, got {example}"))),
    }
}

/// One benchmark measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub example: usize,
    pub n: usize,
    /// Max-norm error against the exact solution; NaN when none is known.
    pub error: f64,
    pub iters: usize,
    pub seconds: f64,
    pub converged: bool,
    pub min_lambda1: f64,
    pub min_gtilde: f64,
}

/// Runs one solver on one example and grid size.
pub fn run_solve(
    method: Method,
    example: usize,
    n: usize,
    config: &MethodConfig,
) -> Result<(BenchRow, SolveReport)> {
    let problem = example_problem(example)?;
    let grid = Grid2D::new(problem.domain, n)?;
    let report = match method {
        Method::AEuler => method_a_euler(&problem, &grid, config)?,
        Method::ANewton => method_a_newton(&problem, &grid, config)?,
        Method::B => method_b_solve(&problem, &grid, config)?,
        Method::C => method_c_solve(&problem, &grid, config)?,
    };
    let error = if problem.has_exact() {
        linf_error(&report.u, &problem)?
    } else {
        f64::NAN
    };
    let row = BenchRow {
        method,
        example,
        n,
        error,
        iters: report.iterations,
        seconds: report.seconds,
        converged: report.converged,
        min_lambda1: report.min_lambda1,
        min_gtilde: report.min_gtilde,
    };
    Ok((row, report))
}

/// Runs the full cross product. A solver that stops without converging
/// still yields a row; only hard errors (invalid data, divergence, linear
/// solver failure) are reported in the failure list.
pub fn run_table(
    methods: &[Method],
    examples: &[usize],
    ns: &[usize],
    config: &MethodConfig,
) -> (Vec<BenchRow>, Vec<String>) {
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &method in methods {
        for &example in examples {
            for &n in ns {
                match run_solve(method, example, n, config) {
                    Ok((row, _)) => rows.push(row),
                    Err(e) => failures.push(format!("{method} example {example} N={n}: {e}")),
                }
            }
        }
    }
    (rows, failures)
}

/// Timing sweep of selected methods over grid sizes on one example.
pub fn run_timing(
    methods: &[Method],
    example: usize,
    ns: &[usize],
    config: &MethodConfig,
) -> (Vec<BenchRow>, Vec<String>) {
    run_table(methods, &[example], ns, config)
}

pub const CSV_HEADER: &str =
    "method,example,N,error,iters,seconds,converged,min_lambda1,min_gtilde";

/// Writes rows as CSV with the fixed header. Floats use `{:.6e}` so values
/// survive a parse round trip at the precision the tables quote.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER.split(','))
        .map_err(|e| Error::InvalidData(format!("csv write failed: {e}")))?;
    for r in rows {
        w.write_record([
            r.method.to_string(),
            r.example.to_string(),
            r.n.to_string(),
            format!("{:.6e}", r.error),
            r.iters.to_string(),
            format!("{:.6e}", r.seconds),
            r.converged.to_string(),
            format!("{:.6e}", r.min_lambda1),
            format!("{:.6e}", r.min_gtilde),
        ])
        .map_err(|e| Error::InvalidData(format!("csv write failed: {e}")))?;
    }
    w.flush().map_err(|e| Error::InvalidData(format!("csv flush failed: {e}")))?;
    Ok(())
}

/// Parses rows written by [`write_csv`].
pub fn rows_from_csv<R: Read>(input: R) -> Result<Vec<BenchRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let bad = |e: String| Error::InvalidData(format!("csv parse failed: {e}"));
    {
        let headers = reader.headers().map_err(|e| bad(e.to_string()))?;
        let expected: Vec<&str> = CSV_HEADER.split(',').collect();
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(bad(format!("unexpected header {headers:?}")));
        }
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != 9 {
            return Err(bad(format!("expected 9 fields, got {}", record.len())));
        }
        let field = |k: usize| record.get(k).unwrap();
        rows.push(BenchRow {
            method: field(0).parse()?,
            example: field(1).parse().map_err(|e| bad(format!("example: {e}")))?,
            n: field(2).parse().map_err(|e| bad(format!("N: {e}")))?,
            error: field(3).parse().map_err(|e| bad(format!("error: {e}")))?,
            iters: field(4).parse().map_err(|e| bad(format!("iters: {e}")))?,
            seconds: field(5).parse().map_err(|e| bad(format!("seconds: {e}")))?,
            converged: field(6).parse().map_err(|e| bad(format!("converged: {e}")))?,
            min_lambda1: field(7).parse().map_err(|e| bad(format!("min_lambda1: {e}")))?,
            min_gtilde: field(8).parse().map_err(|e| bad(format!("min_gtilde: {e}")))?,
        });
    }
    Ok(rows)
}

/// Plain-text table of the benchmark rows.
pub fn render_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<10} {:>7} {:>5} {:>12} {:>8} {:>9} {:>9} {:>12} {:>12}\n",
        "method", "example", "N", "error", "iters", "seconds", "converged", "min_lambda1", "min_gtilde"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<10} {:>7} {:>5} {:>12.4e} {:>8} {:>9.3} {:>9} {:>12.4e} {:>12.4e}\n",
            r.method.to_string(),
            r.example,
            r.n,
            r.error,
            r.iters,
            r.seconds,
            r.converged,
            r.min_lambda1,
            r.min_gtilde
        ));
    }
    out
}

/// Timing-focused text table.
pub fn render_timing(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:<10} {:>7} {:>5} {:>9}\n", "method", "example", "N", "seconds"));
    for r in rows {
        out.push_str(&format!(
            "{:<10} {:>7} {:>5} {:>9.3}\n",
            r.method.to_string(),
            r.example,
            r.n,
            r.seconds
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in ALL_METHODS {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
            assert_eq!(m.to_string().to_lowercase().parse::<Method>().unwrap(), m);
        }
        assert!("A-bogus".parse::<Method>().is_err());
    }

    #[test]
    fn example_problems_resolve() {
        for k in 1..=3 {
            assert!(example_problem(k).is_ok());
        }
        assert!(example_problem(0).is_err());
        assert!(example_problem(4).is_err());
    }

    #[test]
    fn csv_round_trip_preserves_rows() {
        let rows = vec![
            BenchRow {
                method: Method::B,
                example: 1,
                n: 31,
                error: 4.226e-4,
                iters: 12,
                seconds: 0.035,
                converged: true,
                min_lambda1: 0.98,
                min_gtilde: -1.2e-11,
            },
            BenchRow {
                method: Method::C,
                example: 3,
                n: 63,
                error: f64::NAN,
                iters: 500,
                seconds: 1.25,
                converged: false,
                min_lambda1: 0.0,
                min_gtilde: 0.0,
            },
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        let parsed = rows_from_csv(buf.as_slice()).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].method, Method::B);
        assert_eq!(parsed[0].error, 4.226e-4);
        assert!(parsed[1].error.is_nan());
        assert_eq!(parsed[1].converged, false);
    }

    #[test]
    fn empty_run_yields_header_only_csv() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.trim_end(), CSV_HEADER);
    }

    #[test]
    fn table_collects_failures_without_aborting() {
        let cfg = MethodConfig::default();
        let (rows, failures) = run_table(&[Method::B], &[1, 9], &[9], &cfg);
        assert_eq!(rows.len(), 1);
        assert_eq!(failures.len(), 1);
        assert!(failures[0].contains("example 9"));
    }

    #[test]
    fn render_table_lists_each_row() {
        let cfg = MethodConfig::default();
        let (rows, failures) = run_table(&[Method::B], &[1], &[9, 15], &cfg);
        assert!(failures.is_empty());
        let text = render_table(&rows);
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("B"));
    }
}
