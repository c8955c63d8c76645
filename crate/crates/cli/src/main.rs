use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rgmusic_cli::config::{ExperimentConfig, Scenario};
use rgmusic_cli::runners;

/// Robust scatter estimation and robust G-MUSIC direction finding.
#[derive(Parser)]
#[command(name = "rgmusic", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Key-value config file (one `key = value` per line, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for all random streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte Carlo trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads (0 = all cores). Does not change results.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated method list (music, robust_music, gmusic,
    /// emp_gmusic, robust_gmusic, emp_robust_gmusic).
    #[arg(long = "method", value_delimiter = ',')]
    method: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue histogram data of the robust scatter estimate against the
    /// limiting density, plus threshold markers.
    Spectrum(CommonArgs),
    /// One realization of all localization functions on a common grid.
    Oneshot(CommonArgs),
    /// Monte Carlo mean-square-error sweep over source powers.
    Mse(CommonArgs),
    /// Run the full estimation pipeline on a snapshot file (RSPK1 or CSV).
    Estimate {
        /// Input snapshot file.
        input: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn apply_common(cfg: &mut ExperimentConfig, args: &CommonArgs) -> Result<(), String> {
    if let Some(path) = &args.config {
        cfg.apply_file(path).map_err(|e| e.to_string())?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if let Some(methods) = &args.method {
        let mut parsed = Vec::new();
        for name in methods {
            match rgmusic::doa::Method::parse(name) {
                Some(m) => parsed.push(m),
                None => return Err(format!("unknown method {name:?}")),
            }
        }
        cfg.methods = parsed;
    }
    Ok(())
}

fn run() -> Result<(), runners::RunError> {
    let cli = Cli::parse();
    let (scenario, common) = match &cli.command {
        Command::Spectrum(c) => (Scenario::Spectrum, c),
        Command::Oneshot(c) => (Scenario::Oneshot, c),
        Command::Mse(c) => (Scenario::Mse, c),
        Command::Estimate { common, .. } => (Scenario::Estimate, common),
    };
    let mut cfg = ExperimentConfig::for_scenario(scenario);
    apply_common(&mut cfg, common).map_err(|e| {
        runners::RunError::Config(rgmusic_cli::config::ConfigError::Invalid(e))
    })?;

    match &cli.command {
        Command::Spectrum(_) => {
            let art = runners::run_spectrum_histogram(&cfg)?;
            println!(
                "gamma = {:.6}, S+ = {:.6}, S+_mu = {:.6}, p- = {:.6}",
                art.gamma, art.s_plus, art.s_plus_mu, art.p_minus
            );
            for (j, lam) in art.spike_locations.iter().enumerate() {
                println!("Lambda_{} = {:.6}", j + 1, lam);
            }
            println!(
                "{} trials written to {} ({} skipped)",
                art.robust_eigs.len(),
                cfg.out_dir.display(),
                art.skipped_trials
            );
        }
        Command::Oneshot(_) => {
            let art = runners::run_localization_oneshot(&cfg)?;
            for (method, angles) in &art.angles {
                let joined = angles
                    .iter()
                    .map(|a| format!("{:.4}", a.to_degrees()))
                    .collect::<Vec<_>>()
                    .join(", ");
                println!("{:<18} minima at {joined} deg", method.label());
            }
            println!("curves written to {}", cfg.out_dir.display());
        }
        Command::Mse(_) => {
            let art = runners::run_mse_sweep(&cfg)?;
            for row in &art.rows {
                let cells = row
                    .mse
                    .iter()
                    .map(|v| format!("{v:.3e}"))
                    .collect::<Vec<_>>()
                    .join("  ");
                println!("{:>6.1} dB  {cells}", row.power_db);
            }
            println!("sweep written to {}", cfg.out_dir.display());
        }
        Command::Estimate { input, .. } => {
            let input = input
                .clone()
                .or_else(|| cfg.input.clone())
                .ok_or_else(|| {
                    runners::RunError::Config(rgmusic_cli::config::ConfigError::Invalid(
                        "estimate needs an input file (positional or `input` key)".into(),
                    ))
                })?;
            cfg.input = Some(input.clone());
            let art = runners::run_estimate(&cfg, &input)?;
            print!("{}", art.summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
