use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coopsense::fusion::optimize_vote_count;
use coopsense::specfun::Probability;
use coopsense_cli::{run_experiment, summary, CliError, ExperimentSpec, Overrides};

#[derive(Parser)]
#[command(
    name = "coopsense",
    version,
    about = "Cooperative energy-detection experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep spec and write its CSV table.
    Run {
        spec: PathBuf,
        /// Output file; overrides the spec's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for relative outputs.
        #[arg(long, env = "COOPSENSE_OUT_DIR")]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to available parallelism.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Check a spec without running it.
    Validate { spec: PathBuf },
    /// Optimal vote threshold for i.i.d. SUs.
    OptimizeN {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        pf: f64,
        #[arg(long)]
        pd: f64,
        #[arg(long)]
        alpha: f64,
    },
}

fn probability(v: f64, name: &str) -> Result<Probability, CliError> {
    Probability::new(v).map_err(|e| {
        CliError::Invalid(vec![coopsense_cli::Diagnostic {
            field: name.to_string(),
            message: e.to_string(),
        }])
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            spec,
            out,
            out_dir,
            seed,
            workers,
            trials,
        } => ExperimentSpec::load(&spec).and_then(|mut s| {
            Overrides { seed, trials }.apply(&mut s);
            let report = run_experiment(&s, out.as_deref(), out_dir.as_deref(), workers)?;
            print!("{}", summary(&report));
            Ok(())
        }),
        Command::Validate { spec } => ExperimentSpec::load(&spec).and_then(|s| {
            s.validate()?;
            println!("{}: ok", spec.display());
            Ok(())
        }),
        Command::OptimizeN { k, pf, pd, alpha } => (|| {
            let opt = optimize_vote_count(
                k,
                probability(pf, "pf")?,
                probability(pd, "pd")?,
                probability(alpha, "alpha")?,
            )?;
            println!("n* = {}", opt.votes);
            println!("N* = K - n* = {}", opt.n_star);
            println!("Qe* = {}", opt.total_error);
            Ok(())
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
