use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use catswap::dynamics::timescales;
use catswap::runner::{run_path, RunOptions};

#[derive(Parser)]
#[command(name = "catswap", version, about = "Cat-state swapping in the Tavis-Cummings model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a JSON config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides output.directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long, env = "CATSWAP_THREADS")]
        threads: Option<usize>,
        /// Validate the config and print the resolved plan without running it.
        #[arg(long)]
        dry_run: bool,
    },
    /// Print the characteristic times for coupling g, mean photon number and N.
    Timescales {
        #[arg(long)]
        g: f64,
        #[arg(long)]
        nbar: f64,
        #[arg(long = "N")]
        n: usize,
    },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

fn fail(err: catswap::Error, context: &str) -> ExitCode {
    eprintln!("error: {context}: {err}");
    if err.is_config_error() {
        ExitCode::from(EXIT_CONFIG)
    } else {
        ExitCode::from(EXIT_NUMERICAL)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Run { config, out, threads, dry_run } => {
            if let Some(k) = threads {
                if k == 0 {
                    eprintln!("error: --threads must be at least 1");
                    return ExitCode::from(EXIT_CONFIG);
                }
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
                    eprintln!("error: cannot start thread pool: {e}");
                    return ExitCode::from(EXIT_NUMERICAL);
                }
            }
            let opts = RunOptions { out_dir: out, dry_run };
            match run_path(&config, &opts) {
                Ok(report) => {
                    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e, &format!("running {}", config.display())),
            }
        }
        Command::Timescales { g, nbar, n } => match timescales(g, nbar, n) {
            Ok(ts) => {
                println!("t_R  = {:.12}", ts.rabi);
                println!("t_c  = {:.12}", ts.collapse);
                println!("t_r  = {:.12}", ts.revival);
                println!("t_r1 = {:.12}", ts.first_revival);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}
