use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skydist_core::datagen::{CsvSpec, Distribution, PartitionScheme};
use skydist_core::experiment::{
    run_experiment, sweep, AlgParams, Algorithm, DataSource, Experiment, RunConfig, SweepParam,
};

const EXIT_ERROR: u8 = 1;
const EXIT_MISMATCH: u8 = 2;

/// Runs distributed skyline protocols on generated or CSV data and reports
/// their communication and round costs.
#[derive(Parser, Debug)]
#[command(name = "skydist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One row per selected algorithm.
    Run(Common),
    /// One row per (algorithm, parameter value).
    Sweep {
        /// Parameter to vary: r, rho, grid, kappa, ell or s.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Synthetic distribution: indi, corr or anti.
    #[arg(long, default_value = "indi")]
    data: Distribution,
    /// Number of synthetic points.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    /// Read points from a headed CSV file instead of generating them.
    #[arg(long, requires_all = ["x_col", "y_col"])]
    csv: Option<PathBuf>,
    #[arg(long)]
    x_col: Option<String>,
    #[arg(long)]
    y_col: Option<String>,
    /// Prefer small x values.
    #[arg(long)]
    negate_x: bool,
    /// Prefer small y values.
    #[arg(long)]
    negate_y: bool,
    /// Drop repeated (x, y) rows instead of rejecting the file.
    #[arg(long)]
    dedupe: bool,
    /// Horizontal partition scheme: random, by-key or sorted.
    #[arg(long, default_value = "random")]
    partition: PartitionScheme,
    /// Number of sites.
    #[arg(long, default_value_t = 20)]
    s: usize,
    /// Comma-separated algorithms, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "naive")]
    alg: Vec<String>,
    /// Round budget for tradeoff (default 3) and prune (default 8).
    #[arg(long, visible_alias = "rounds")]
    r: Option<usize>,
    /// Tell the trade-off protocol the skyline size in advance.
    #[arg(long)]
    known_k: Option<usize>,
    #[arg(long, default_value_t = 500)]
    rho: usize,
    #[arg(long, default_value_t = 20)]
    grid: usize,
    #[arg(long, default_value_t = 1)]
    kappa: usize,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Average over this many consecutive seeds.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report wall-clock times.
    #[arg(long)]
    timings: bool,
    /// Largest instance verified against the sequential skyline.
    #[arg(long, default_value_t = 100_000)]
    verify_cap: usize,
    /// Write one message transcript per row into this directory.
    #[arg(long)]
    transcripts: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, String> {
        let data = match &self.csv {
            Some(path) => {
                let mut spec =
                    CsvSpec::new(self.x_col.clone().unwrap_or_default(), self.y_col.clone().unwrap_or_default());
                spec.negate_x = self.negate_x;
                spec.negate_y = self.negate_y;
                spec.dedupe = self.dedupe;
                DataSource::Csv { path: path.clone(), spec }
            }
            None => DataSource::Synthetic { kind: self.data, n: self.n },
        };
        let mut algorithms = Vec::new();
        for name in &self.alg {
            if name.trim().eq_ignore_ascii_case("all") {
                algorithms.extend(
                    Algorithm::ALL
                        .into_iter()
                        .filter(|&a| a != Algorithm::Sorted || self.partition == PartitionScheme::Sorted),
                );
            } else {
                algorithms.push(name.parse::<Algorithm>().map_err(|e| e.to_string())?);
            }
        }
        let mut cfg = RunConfig::new(data, algorithms);
        cfg.partition = self.partition;
        cfg.s = self.s;
        cfg.params = AlgParams {
            rounds: self.r,
            rho: self.rho,
            grid: self.grid,
            kappa: self.kappa,
            ell: self.ell,
            known_k: self.known_k,
        };
        cfg.seed = self.seed;
        cfg.repeat = self.repeat;
        cfg.verify_cap = self.verify_cap;
        cfg.timings = self.timings;
        cfg.keep_transcripts = self.transcripts.is_some();
        Ok(cfg)
    }
}

fn file_name(label: &str) -> String {
    let name: String = label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
    format!("{name}.csv")
}

fn write_transcripts(dir: &Path, exp: &Experiment) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (label, transcript) in &exp.transcripts {
        fs::write(dir.join(file_name(label)), transcript.to_delimited())?;
    }
    Ok(())
}

fn report(common: &Common, exp: &Experiment) -> Result<(), String> {
    let table = exp.to_csv();
    match &common.out {
        Some(path) => fs::write(path, &table).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{table}"),
    }
    if let Some(dir) = &common.transcripts {
        write_transcripts(dir, exp).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<Experiment, String> {
    let (common, exp) = match &cli.command {
        Command::Run(common) => (common, run_experiment(&common.config()?)),
        Command::Sweep { param, values, common } => (common, sweep(&common.config()?, *param, values)),
    };
    let exp = exp.map_err(|e| e.to_string())?;
    report(common, &exp)?;
    Ok(exp)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(exp) if exp.all_verified() => ExitCode::SUCCESS,
        Ok(exp) => {
            for mismatch in &exp.mismatches {
                eprintln!("verification failed: {mismatch}");
            }
            ExitCode::from(EXIT_MISMATCH)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
