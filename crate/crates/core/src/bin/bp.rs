use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bplab::blockgeom::BodySpec;
use bplab::harness::{run_suite, write_report, BodyRef, ExperimentConfig, Suite};
use bplab::Result;

#[derive(Parser)]
#[command(name = "bp", version, about = "Sections, transforms and counterexamples for block-invariant convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classification table over (kappa, n), optionally with numerical evidence.
    Classify {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        kappas: Vec<usize>,
        #[arg(long)]
        verify: bool,
        /// Directions per gallery body in verification scans.
        #[arg(long, default_value_t = 24)]
        scan_dirs: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Runs the suite described by a JSON experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sign scan of the transform of |x|^{-kappa} for one body.
    Scan {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 256)]
        dirs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte Carlo samples per direction.
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Block q-ball, perturbation design and section/volume comparison.
    Counterexample {
        #[arg(long, default_value_t = 2)]
        kappa: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 4.0)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn config_for(command: Command) -> Result<(ExperimentConfig, PathBuf)> {
    Ok(match command {
        Command::Classify { max_n, kappas, verify, scan_dirs, seed, out } => {
            let mut c = ExperimentConfig::new(1, 2, Suite::Classify, seed);
            c.options.max_n = max_n;
            c.options.kappas = kappas;
            c.options.verify = verify;
            c.options.verify_options.scan_dirs = scan_dirs;
            c.output.dir = out;
            (c, PathBuf::from("."))
        }
        Command::Run { config } => {
            let c = ExperimentConfig::from_file(&config)?;
            let base = config.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
            (c, base)
        }
        Command::Scan { body, dirs, seed, samples, out } => {
            let text = std::fs::read_to_string(&body)?;
            let spec = BodySpec::from_json(&text)?;
            let mut c = ExperimentConfig::new(spec.kappa, spec.n, Suite::FtScan, seed);
            c.bodies = vec![BodyRef::Inline(spec)];
            c.options.dirs = dirs;
            c.params.n_samples = samples;
            c.output.dir = out;
            c.output.stem = Some("scan".into());
            (c, PathBuf::from("."))
        }
        Command::Counterexample { kappa, n, q, seed, out } => {
            let mut c = ExperimentConfig::new(kappa, n, Suite::Counterexample, seed);
            c.options.q = q;
            c.output.dir = out;
            (c, PathBuf::from("."))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = config_for(cli.command).and_then(|(config, base)| {
        let report = run_suite(&config, &base)?;
        let files = write_report(&config, &report, Path::new("."))?;
        Ok((report, files))
    });
    match outcome {
        Ok((report, files)) => {
            for c in &report.checks {
                println!("{:<13} {}  {:.6e} +- {:.1e}", format!("{:?}", c.status).to_lowercase(), c.name, c.estimate.value, c.estimate.std_error);
            }
            println!("suite {}: {:?}", report.suite.name(), report.status);
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
