use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use homlat_cli::{parse_manifest, run, selftest, CliError};

#[derive(Debug, Parser)]
#[command(name = "homlat", version, about = "FFT-based elastic homogenization on lattice patterns")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory, overriding `output.dir` of the manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for one macroscopic strain with the manifest's kernel.
    Solve { manifest: PathBuf },
    /// Dirichlet baseline plus one run per slope pair of `[sweep]`.
    Sweep { manifest: PathBuf },
    /// Effective stiffness tensor from one solve per basis strain.
    Effective { manifest: PathBuf },
    /// Randomized FFT, Green operator and kernel oracle checks.
    Selftest,
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve { manifest } => {
            let m = parse_manifest(manifest)?;
            let out = run::output_dir(&m, cli.out.as_deref());
            run::run_solve(&m, &out)?;
            let summary = out.join("summary.txt");
            print!("{}", std::fs::read_to_string(&summary).map_err(|e| CliError::io(&summary, e))?);
            announce(&out);
        }
        Command::Sweep { manifest } => {
            let m = parse_manifest(manifest)?;
            let out = run::output_dir(&m, cli.out.as_deref());
            let sweep = run::run_sweep(&m, &out)?;
            println!("{} sweep runs", sweep.runs.len());
            announce(&out);
        }
        Command::Effective { manifest } => {
            let m = parse_manifest(manifest)?;
            let out = run::output_dir(&m, cli.out.as_deref());
            let eff = run::run_effective(&m, &out)?;
            let n = eff.tensor.size();
            for a in 0..n {
                let row: Vec<String> = (0..n).map(|b| format!("{:>14.6e}", eff.tensor.get(a, b))).collect();
                println!("{}", row.join(" "));
            }
            println!("asymmetry: {:.3e}", eff.asymmetry);
            announce(&out);
        }
        Command::Selftest => {
            let checks = selftest::run_selftest(cli.seed)?;
            print!("{}", selftest::report(&checks)?);
        }
    }
    Ok(())
}

fn announce(out: &Path) {
    println!("outputs written to {}", out.display());
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
