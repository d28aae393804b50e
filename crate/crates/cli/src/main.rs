use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use qrad::config::{parse_scenario, render, validate};
use qrad::exit;
use qrad::output::write_run;
use qrad::runner::{default_workers, run_scenario};
use qrad::verify;
use qrad_core::cavity::{box_modes, BoxGeometry};
use qrad_core::units;

#[derive(Parser)]
#[command(name = "qrad", version, about = "Quantum radiation from time-dependent backgrounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        config: PathBuf,
        /// Output directory (overrides [output] dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to QRAD_WORKERS or the core count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the built-in oracle checks.
    Verify {
        /// mirror, cavity, thermal, response, dielectric, frw, special or all.
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long)]
        json: bool,
    },
    /// List the lowest modes of a rectangular cavity.
    Modes {
        /// Edge lengths, e.g. 1,1,1.
        #[arg(long, value_delimiter = ',', num_args = 1..=3, required = true)]
        lengths: Vec<f64>,
        /// Unit of the edge lengths: m or cm.
        #[arg(long, default_value = "m")]
        unit: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn run(config: PathBuf, out: Option<PathBuf>, workers: Option<usize>) -> ExitCode {
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config.display());
            return code(exit::VALIDATION);
        }
    };
    let parsed = match parse_scenario(&text) {
        Ok(p) => p,
        Err(errs) => {
            for e in &errs.0 {
                eprintln!("error: {e}");
            }
            return code(exit::VALIDATION);
        }
    };
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let plan = match validate(&parsed.config) {
        Ok(p) => p,
        Err(errs) => {
            eprintln!("error: {errs}");
            return code(exit::VALIDATION);
        }
    };
    let workers = workers.filter(|n| *n > 0).unwrap_or_else(default_workers);
    let start = Instant::now();
    let records = match run_scenario(&plan, workers) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return code(exit::NUMERICAL);
        }
    };
    let dir = out.unwrap_or_else(|| PathBuf::from(&parsed.config.output.dir));
    match write_run(
        &dir,
        &parsed.config.output.prefix,
        &render(&parsed.config),
        &records,
        workers,
        start.elapsed().as_secs_f64(),
    ) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            code(exit::SUCCESS)
        }
        Err(e) => {
            eprintln!("error: cannot write results to {}: {e}", dir.display());
            code(exit::NUMERICAL)
        }
    }
}

fn verify_cmd(suite: &str, json: bool) -> ExitCode {
    let Some(criteria) = verify::suite(suite) else {
        let names: Vec<_> = verify::SUITES.iter().map(|s| s.0).collect();
        eprintln!("error: unknown suite `{suite}` (expected one of: {})", names.join(", "));
        return code(exit::VALIDATION);
    };
    let checks = verify::run(criteria);
    if json {
        println!("{}", serde_json::to_string_pretty(&checks).expect("checks serialize"));
    } else {
        for c in &checks {
            println!("{c}");
        }
        let failed = checks.iter().filter(|c| !c.passed).count();
        println!("{} checks, {failed} failed", checks.len());
    }
    if checks.iter().all(|c| c.passed) {
        code(exit::SUCCESS)
    } else {
        code(exit::VERIFICATION)
    }
}

fn modes(lengths: Vec<f64>, unit: &str, count: usize) -> ExitCode {
    let scale = match unit {
        "m" => 1.0,
        "cm" => units::length(1.0, units::LengthUnit::Centimetre),
        other => {
            eprintln!("error: unknown length unit `{other}` (expected m or cm)");
            return code(exit::VALIDATION);
        }
    };
    let l = match lengths.as_slice() {
        [a] => [*a; 3],
        [a, b, c] => [*a, *b, *c],
        _ => {
            eprintln!("error: give one edge length (cube) or three");
            return code(exit::VALIDATION);
        }
    };
    let geom = match BoxGeometry::new(l.map(|x| x * scale)) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return code(exit::VALIDATION);
        }
    };
    match box_modes(&geom, count) {
        Ok(ms) => {
            println!("level,nx,ny,nz,omega,ghz");
            for m in ms {
                let [a, b, c] = m.indices;
                println!(
                    "{},{a},{b},{c},{:e},{:e}",
                    m.level,
                    m.omega,
                    units::to_gigahertz(m.omega)
                );
            }
            code(exit::SUCCESS)
        }
        Err(e) => {
            eprintln!("error: {e}");
            code(exit::VALIDATION)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                code(exit::VALIDATION)
            } else {
                code(exit::SUCCESS)
            };
        }
    };
    match cli.command {
        Command::Run { config, out, workers } => run(config, out, workers),
        Command::Verify { suite, json } => verify_cmd(&suite, json),
        Command::Modes { lengths, unit, count } => modes(lengths, &unit, count),
    }
}
