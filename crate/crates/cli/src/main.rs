// Copyright 2026 The qba developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line runner for the qba simulator.
//!
//! Exit codes: 0 on success, 2 on configuration errors (unknown scenario,
//! bad values, unreadable config file), 1 on internal errors.

mod config;
mod runner;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qba::engine::{Transcript, replay_transcript};
use qba::hardy::{HardyModel, ObservablePair, optimal_alpha, q_max_search};

use config::RunConfig;
use runner::{execute_run, execute_sweep, sweep_csv};

/// CLI-level error with its exit code class.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Internal(String),
}

impl CliError {
    fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Internal(e.to_string())
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qba",
    version,
    about = "Three-party quantum Byzantine agreement simulator over Hardy-type correlations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario for a number of seeded trials and report statistics.
    Run(RunArgs),
    /// Run a grid of (n, alpha, scenario) cells and emit an aggregated CSV.
    Sweep(SweepArgs),
    /// Print the 16-row joint probability table of the shared state.
    Tables(TablesArgs),
    /// Print the maximizer of the Hardy probability.
    Qmax,
    /// Re-verify a stored transcript stream.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct ConfigFlags {
    /// Config file (flat key=value or JSON); flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario name (honest, c_mixed, c_two_faced, a_basis_flip,
    /// b_basis_flip, a_fake_links, b_fake_links, a_liar, b_liar).
    #[arg(long)]
    scenario: Option<String>,
    /// Resource parameter N (>= 8).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Real observable overlap <u|d>; defaults to the optimum ~0.786151.
    #[arg(long)]
    alpha: Option<f64>,
    /// The commander's order bit.
    #[arg(long)]
    message_bit: Option<u8>,
    /// Fraction of commander slots measured in the message basis.
    #[arg(long)]
    message_fraction: Option<f64>,
    /// Bit-flip probability of the classical confirmation channel.
    #[arg(long)]
    flip_prob: Option<f64>,
    /// Tolerated violation fraction in Hardy tests.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Violations needed to falsify a message-basis hypothesis.
    #[arg(long)]
    k_min: Option<usize>,
    /// Minimum runs for a conclusive Hardy test.
    #[arg(long)]
    min_runs: Option<usize>,
    /// Fraction of swaps tampered in the basis-flip scenarios.
    #[arg(long)]
    chi_fraction: Option<f64>,
}

impl ConfigFlags {
    fn build(&self) -> Result<RunConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! merge {
            ($field:ident) => {
                if let Some(value) = &self.$field {
                    config.$field = value.clone();
                }
            };
        }
        merge!(scenario);
        merge!(n);
        merge!(trials);
        merge!(seed);
        merge!(alpha);
        merge!(message_bit);
        merge!(message_fraction);
        merge!(flip_prob);
        merge!(epsilon);
        merge!(k_min);
        merge!(min_runs);
        merge!(chi_fraction);
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    flags: ConfigFlags,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the per-trial CSV summary here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the first trial's transcript stream (JSON lines) here.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Suppress the stdout summary.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    flags: ConfigFlags,
    /// Comma-separated list of N values (overrides --n).
    #[arg(long)]
    n_list: Option<String>,
    /// Comma-separated list of alpha values (overrides --alpha).
    #[arg(long)]
    alpha_list: Option<String>,
    /// Comma-separated list of scenarios (overrides --scenario).
    #[arg(long)]
    scenario_list: Option<String>,
    /// Write the aggregated CSV here (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// Real observable overlap <u|d>.
    #[arg(long)]
    alpha: Option<f64>,
    /// Which state to tabulate: the Hardy state or the cheating state.
    #[arg(long, default_value = "psi", value_parser = ["psi", "chi"])]
    state: String,
    /// Write the CSV here (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// The transcript stream to re-verify.
    #[arg(long)]
    transcript: PathBuf,
    /// Write the replay summary JSON here (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Tables(args) => cmd_tables(args),
        Command::Qmax => cmd_qmax(),
        Command::Replay(args) => cmd_replay(args),
    };
    if let Err(error) = result {
        eprintln!("{error}");
        std::process::exit(error.exit_code());
    }
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let config = args.flags.build()?;
    let (report, transcript) = execute_run(&config)?;
    if let Some(path) = &args.out {
        std::fs::write(path, report.to_json())
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = &args.csv {
        std::fs::write(path, report.to_csv())
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = &args.transcript {
        std::fs::write(path, transcript.to_jsonl())
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    if !args.quiet {
        let agg = &report.aggregate;
        println!(
            "scenario {} | n {} | trials {} | seed {}",
            config.scenario, config.n, config.trials, config.seed
        );
        println!(
            "readable {:.3} | agreement {:.3} | correct action {:.3} | detection {:.3} | false accusations {:.3}",
            agg.readability_rate,
            agg.agreement_rate,
            agg.correct_action_rate,
            agg.detection_power,
            agg.false_accusation_rate
        );
        if let (Some(q_hat), Some((lo, hi))) = (agg.q_hat, agg.q_wilson_99) {
            println!(
                "q analytic {:.7} | q observed {q_hat:.7} (99% interval [{lo:.7}, {hi:.7}], {} / {} events)",
                report.q_analytic, agg.q_events, agg.q_runs
            );
        }
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|item| item.trim())
        .filter(|item| !item.is_empty())
        .map(|item| {
            item.parse::<T>()
                .map_err(|_| CliError::Config(format!("bad {what} value `{item}`")))
        })
        .collect()
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let config = args.flags.build()?;
    let ns = match &args.n_list {
        Some(list) => parse_list(list, "n")?,
        None => vec![config.n],
    };
    let alphas = match &args.alpha_list {
        Some(list) => parse_list(list, "alpha")?,
        None => vec![config.alpha],
    };
    let scenarios = match &args.scenario_list {
        Some(list) => {
            let names: Vec<String> = parse_list(list, "scenario")?;
            for name in &names {
                qba::adversary::Scenario::from_name(name).map_err(CliError::config)?;
            }
            names
        }
        None => vec![config.scenario.clone()],
    };
    let cells = execute_sweep(&config, &ns, &alphas, &scenarios, config.seed)?;
    write_or_print(&args.out, &sweep_csv(&cells))
}

fn cmd_tables(args: TablesArgs) -> Result<(), CliError> {
    let alpha = args.alpha.unwrap_or_else(optimal_alpha);
    let pair = ObservablePair::from_alpha_real(alpha).map_err(CliError::config)?;
    let model = HardyModel::build(pair, pair).map_err(CliError::config)?;
    let state = match args.state.as_str() {
        "chi" => model.chi(),
        _ => model.psi_h(),
    };
    let table = model.probability_table(state).map_err(CliError::internal)?;
    write_or_print(&args.out, &table.to_csv())
}

fn cmd_qmax() -> Result<(), CliError> {
    let (alpha_opt, q_max) = q_max_search();
    println!("alpha_opt = {alpha_opt:.10}");
    println!("alpha_opt_squared = {:.10}", alpha_opt * alpha_opt);
    println!("q_max = {q_max:.10}");
    Ok(())
}

fn cmd_replay(args: ReplayArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.transcript).map_err(|e| {
        CliError::Config(format!("cannot read {}: {e}", args.transcript.display()))
    })?;
    let transcript = Transcript::from_jsonl(&text).map_err(CliError::internal)?;
    let summary = replay_transcript(&transcript).map_err(CliError::internal)?;
    let mut json =
        serde_json::to_string_pretty(&summary).map_err(|e| CliError::Internal(e.to_string()))?;
    json.push('\n');
    write_or_print(&args.out, &json)
}
