use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use symsq::error::Error;
use symsq::report::Format;
use symsq::suites::{parse_assignment, run, RunConfig, SUITES};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

/// Runs a verification suite and writes its report.
#[derive(Debug, Parser)]
#[command(name = "symsq", version)]
struct Cli {
    /// Suite to run.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    suite: String,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Parameter override `k=v`; repeatable.
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Coefficient table for suites that use one.
    #[arg(long, value_name = "PATH")]
    coeff_file: Option<PathBuf>,
    /// Tolerance override `k=v`; repeatable.
    #[arg(long = "tolerance", value_name = "K=V")]
    tolerances: Vec<String>,
}

fn config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::new(&cli.suite);
    cfg.seed = cli.seed;
    cfg.coeff_file = cli.coeff_file.clone();
    for s in &cli.params {
        let (k, v) = parse_assignment(s)?;
        cfg.params.insert(k, v);
    }
    for s in &cli.tolerances {
        let (k, v) = parse_assignment(s)?;
        cfg.tolerances.insert(k, v);
    }
    Ok(cfg)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match config(&cli).and_then(|c| run(&c)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("symsq: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let format = match cli.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    let written = match &cli.out {
        Some(path) => File::create(path)
            .map_err(Error::from)
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                report.write(&mut w, format)?;
                w.flush().map_err(Error::from)
            }),
        None => {
            let mut w = io::stdout().lock();
            report.write(&mut w, format)
        }
    };
    if let Err(e) = written {
        eprintln!("symsq: cannot write report: {e}");
        return ExitCode::from(2);
    }
    let failed = report.failures().count();
    if failed > 0 {
        eprintln!("symsq: {failed} of {} checks failed", report.rows.len());
        for r in report.failures().take(10) {
            eprintln!("  {} {}", r.check_id, r.params);
        }
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
