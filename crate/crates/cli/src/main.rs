use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use sigeq::config::Config;
use sigeq::nash::{self, DynamicsTrace};
use sigeq::oracle;
use sigeq::sweep::{self, SweepParam, SweepRow};
use sigeq::{Concept, EquilibriumReport, GameSpec, ReceiverRule};

#[derive(Parser)]
#[command(name = "sigeq", version, about = "Equilibria of binary signaling games over Gaussian channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON game configuration.
    #[arg(long)]
    config: PathBuf,
    /// Also write CSV output to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured game and print the equilibrium report.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "stackelberg")]
        concept: Concept,
    },
    /// Solve the game for each value of one parameter and print CSV rows.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "stackelberg")]
        concept: Concept,
        /// Parameter name, e.g. `d`, `alpha`, `pi0_t`, `c10_r`, `eps10`, `sigma`.
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, allow_negative_numbers = true)]
        max: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Run alternating best responses and print the iterates.
    Dynamics {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 64)]
        max_iter: usize,
        /// Initial rule scale along the signaling direction.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        /// Initial rule threshold.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eta: f64,
    },
    /// Check the analytic risks of the equilibrium against a simulation.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "stackelberg")]
        concept: Concept,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Shift the simulated rule's threshold (sanity check for the checker).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, hide = true)]
        corrupt_threshold: f64,
    },
}

/// Failure that should exit with status 1 rather than 2.
struct VerificationFailed;

fn load(common: &Common) -> anyhow::Result<(Config, GameSpec)> {
    let config = Config::load(&common.config)?;
    let spec = config.build()?;
    Ok((config, spec))
}

fn write_csv(path: Option<&Path>, lines: &[String]) -> anyhow::Result<()> {
    if let Some(p) = path {
        let mut text = lines.join("\n");
        text.push('\n');
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn report_csv(r: &EquilibriumReport) -> Vec<String> {
    vec![EquilibriumReport::csv_header().to_string(), r.csv_row()]
}

fn run(cli: Cli) -> anyhow::Result<Option<VerificationFailed>> {
    match cli.command {
        Command::Solve { common, concept } => {
            let (_, spec) = load(&common)?;
            let r = sigeq::solve(&spec, concept)?;
            print!("{}", r.render_text());
            write_csv(common.csv.as_deref(), &report_csv(&r))?;
        }
        Command::Sweep { common, concept, param, min, max, steps } => {
            let (config, _) = load(&common)?;
            let param: SweepParam = param.parse()?;
            let values = sweep::linspace(min, max, steps)?;
            let rows = sweep::sweep(&config, param, &values, concept)?;
            let mut lines = vec![SweepRow::csv_header().to_string()];
            lines.extend(rows.iter().map(SweepRow::csv_row));
            for l in &lines {
                println!("{l}");
            }
            write_csv(common.csv.as_deref(), &lines)?;
        }
        Command::Dynamics { common, max_iter, a, eta } => {
            if a == 0.0 || !a.is_finite() {
                bail!("initial rule needs a finite, nonzero --a");
            }
            let (_, spec) = load(&common)?;
            let init = match nash::default_init_rule(&spec)? {
                ReceiverRule::Threshold { direction, .. } => {
                    ReceiverRule::threshold(direction.iter().map(|v| a * v).collect(), eta)?
                }
                _ => unreachable!("default rule is a threshold rule"),
            };
            let trace = nash::best_response_dynamics(&spec, &init, max_iter)?;
            let mut lines = vec![DynamicsTrace::csv_header().to_string()];
            lines.extend(trace.csv_rows());
            for l in &lines {
                println!("{l}");
            }
            println!("{}", trace.outcome_line());
            write_csv(common.csv.as_deref(), &lines)?;
        }
        Command::Verify { common, concept, samples, seed, corrupt_threshold } => {
            let (_, spec) = load(&common)?;
            let r = sigeq::solve(&spec, concept)?;
            let v = oracle::verify_report(&spec, &r, samples, seed, corrupt_threshold)?;
            print!("{}", v.render());
            write_csv(common.csv.as_deref(), &v.lines)?;
            if !v.pass {
                return Ok(Some(VerificationFailed));
            }
        }
    }
    Ok(None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(VerificationFailed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
