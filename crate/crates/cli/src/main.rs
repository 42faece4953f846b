//! Command-line front end: solve single instances, generate instances, and
//! run Monte Carlo sweeps.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use relay_ra::{
    generate_instance, run_sweep, solve, solve_direct_only, solve_fixed_pairing, Allocation,
    ChannelInstance, ScenarioConfig, SweepResult,
};

#[derive(Parser)]
#[command(
    name = "relay-ra",
    about = "Minimum-power subcarrier pairing, mode selection and power allocation \
             for two-slot OFDM relaying",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Protocol {
    /// Optimized subcarrier pairing with opportunistic relaying.
    Osp,
    /// Fixed (diagonal) pairing with opportunistic relaying.
    Fsp,
    /// Direct transmission on every subcarrier.
    Direct,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file and print the allocation as JSON.
    Solve {
        /// Instance JSON file ({"K":…, "gamma_sr":[…], …}).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Protocol::Osp)]
        protocol: Protocol,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
        /// Additionally report the sum power in dBm on stderr.
        #[arg(long)]
        dbm: bool,
    },
    /// Average the three protocols over seeded channel realizations and
    /// write one CSV row per (K, d) grid point.
    Sweep {
        /// Subcarrier counts, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        /// Relay positions in (0, 1), comma separated.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        d: Vec<f64>,
        #[arg(long)]
        runs: usize,
        #[arg(long)]
        seed: u64,
        /// Rate target in bits per OFDM symbol.
        #[arg(long, default_value_t = 100.0)]
        rreq: f64,
        /// Rate acceptance slack of the dual search.
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// Noise power per subcarrier in dBm.
        #[arg(long, default_value_t = -50.0, allow_negative_numbers = true)]
        sigma2_dbm: f64,
        /// Path-loss exponent.
        #[arg(long, default_value_t = 3.0)]
        alpha: f64,
        /// Impulse-response length.
        #[arg(long, default_value_t = 8)]
        taps: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate one channel instance file.
    Gen {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100.0)]
        rreq: f64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = -50.0, allow_negative_numbers = true)]
        sigma2_dbm: f64,
        #[arg(long, default_value_t = 3.0)]
        alpha: f64,
        #[arg(long, default_value_t = 8)]
        taps: usize,
        /// Output instance JSON path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Solve {
            input,
            protocol,
            output,
            dbm,
        } => {
            let text = fs::read_to_string(&input)
                .map_err(|e| format!("cannot read {}: {e}", input.display()))?;
            let inst: ChannelInstance = serde_json::from_str(&text)
                .map_err(|e| format!("malformed instance {}: {e}", input.display()))?;
            inst.validate().map_err(|e| e.to_string())?;

            let alloc = match protocol {
                Protocol::Osp => solve(&inst),
                Protocol::Fsp => solve_fixed_pairing(&inst),
                Protocol::Direct => solve_direct_only(&inst),
            }
            .map_err(|e| e.to_string())?;

            match output {
                OutputFormat::Json => print_allocation(&alloc)?,
            }
            if dbm {
                eprintln!("sum power: {:.6} dBm", watts_to_dbm(alloc.sum_power));
            }
            Ok(())
        }
        Command::Sweep {
            k,
            d,
            runs,
            seed,
            rreq,
            eps,
            sigma2_dbm,
            alpha,
            taps,
            out,
        } => {
            let mut grid = Vec::new();
            for &kk in &k {
                for &dd in &d {
                    let mut cfg = ScenarioConfig::new(kk, dd, seed);
                    cfg.r_req = rreq;
                    cfg.epsilon = eps;
                    cfg.sigma2_dbm = sigma2_dbm;
                    cfg.pathloss_exponent = alpha;
                    cfg.num_taps = taps;
                    grid.push(cfg);
                }
            }
            let results = run_sweep(&grid, runs).map_err(|e| e.to_string())?;
            let mut csv = String::from(SweepResult::csv_header());
            csv.push('\n');
            for row in &results {
                csv.push_str(&row.csv_row());
                csv.push('\n');
            }
            fs::write(&out, csv).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            Ok(())
        }
        Command::Gen {
            k,
            d,
            seed,
            rreq,
            eps,
            sigma2_dbm,
            alpha,
            taps,
            out,
        } => {
            let mut cfg = ScenarioConfig::new(k, d, seed);
            cfg.r_req = rreq;
            cfg.epsilon = eps;
            cfg.sigma2_dbm = sigma2_dbm;
            cfg.pathloss_exponent = alpha;
            cfg.num_taps = taps;
            let inst = generate_instance(&cfg).map_err(|e| e.to_string())?;
            let json = serde_json::to_string_pretty(&inst)
                .map_err(|e| format!("serialization failed: {e}"))?;
            fs::write(&out, json + "\n")
                .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            Ok(())
        }
    }
}

fn print_allocation(alloc: &Allocation) -> Result<(), String> {
    let json = serde_json::to_string_pretty(alloc)
        .map_err(|e| format!("serialization failed: {e}"))?;
    println!("{json}");
    Ok(())
}

fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}
