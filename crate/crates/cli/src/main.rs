mod commands;
mod config;
mod failure;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use config::{validate, Cli};
use failure::{Failure, Outcome};
use output::Artifacts;

/// Worker count for grid scans and parallel assembly.
const WORKERS_ENV: &str = "TFLIMIT_WORKERS";

fn init_workers() -> Outcome<()> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::validation(format!("{WORKERS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::validation(format!("worker pool: {e}")))
}

fn execute(cli: &Cli) -> Outcome<String> {
    init_workers()?;
    let cfg = validate(&cli.command)?;
    let report = commands::run(&cfg)?;
    let json = serde_json::to_string_pretty(&report.json)? + "\n";
    if let Some(dir) = &cli.out {
        let mut files = Artifacts::default();
        let stem = cfg.name().replace('-', "_");
        files.add(format!("{stem}.json"), json.clone());
        for (name, csv) in &report.csv {
            files.add(name.clone(), csv.render());
        }
        if cli.svg {
            if let Some(chart) = &report.chart {
                files.add(format!("{stem}.svg"), chart.render());
            }
        }
        files.write_all(dir)?;
    }
    Ok(json)
}

fn report_failure(f: &Failure, as_json: bool) -> ExitCode {
    if as_json {
        eprintln!("{}", f.to_json());
    } else {
        eprintln!("tflimit: {f}");
    }
    ExitCode::from(f.exit_code())
}

fn main() -> ExitCode {
    let wants_json = std::env::args().any(|a| a == "--error-json");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            if wants_json {
                let f = Failure::validation(e.to_string().trim_end().to_string());
                return report_failure(&f, true);
            }
            let _ = e.print();
            return ExitCode::from(failure::EXIT_VALIDATION);
        }
    };
    match execute(&cli) {
        Ok(json) => {
            print!("{json}");
            ExitCode::SUCCESS
        }
        Err(f) => report_failure(&f, cli.error_json),
    }
}
