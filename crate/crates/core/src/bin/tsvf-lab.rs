use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tsvf_core::report::{cmd_list, cmd_run, cmd_selftest, Format, RunConfig};
use tsvf_core::scenarios::ScenarioConfig;

#[derive(Parser)]
#[command(
    name = "tsvf-lab",
    version,
    about = "Pre- and post-selected quantum systems: worked examples and property checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List scenario names with descriptions.
    List,
    /// Run scenarios and report analytic values, Monte Carlo estimates and verdicts.
    Run {
        /// Scenario to run (repeatable); `all` or none runs the whole catalog.
        #[arg(long = "scenario", value_name = "NAME")]
        scenarios: Vec<String>,
        #[arg(long, default_value_t = ScenarioConfig::default().trials)]
        trials: u64,
        #[arg(long, default_value_t = ScenarioConfig::default().seed)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Width of Monte Carlo acceptance bands in binomial standard deviations.
        #[arg(long, default_value_t = ScenarioConfig::default().sigma)]
        sigma: f64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random-instance property suites.
    Selftest {
        #[arg(long, default_value_t = ScenarioConfig::default().seed)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", cmd_list());
            ExitCode::SUCCESS
        }
        Command::Run {
            scenarios,
            trials,
            seed,
            format,
            sigma,
            out,
        } => {
            let cfg = RunConfig {
                scenarios,
                trials,
                seed,
                format,
                sigma,
                out,
            };
            match cmd_run(&cfg) {
                Ok(outcome) => {
                    if cfg.out.is_none() {
                        print!("{}", outcome.rendered);
                    }
                    ExitCode::from(outcome.exit_code())
                }
                Err(e) => {
                    eprintln!("tsvf-lab: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Selftest { seed } => match cmd_selftest(seed) {
            Ok(report) => {
                print!("{}", report.to_text());
                ExitCode::from(u8::from(!report.passed()))
            }
            Err(e) => {
                eprintln!("tsvf-lab: {e}");
                ExitCode::from(2)
            }
        },
    }
}
