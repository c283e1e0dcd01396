use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use h2ion::driver::{optimize_parameters, run_checks, CheckOptions, ParamPoint, SearchStrategy};
use h2ion::{assemble_and_solve, Error, Result, RunConfig, SpectrumReport};

#[derive(Parser)]
#[command(name = "h2ion", version, about = "Variational H2+ spectrum from Monte-Carlo matrix elements")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate matrices, solve, print the table and write a JSON report.
    Run(RunArgs),
    /// Oracle and property checks.
    Check {
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Search basis parameters for the lowest ground-state energy.
    Scan {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Strategy::Grid)]
        strategy: Strategy,
        /// Maximum number of pipeline evaluations.
        #[arg(long, default_value_t = 27)]
        budget: usize,
    },
    /// Print a stored report.
    Report { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Grid,
    Simplex,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; omitted fields take their defaults.
    config: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    no_parity_blocking: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(n) = self.samples {
            c.n_samples = n;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(b) = self.blocks {
            c.n_blocks = b;
        }
        if self.no_parity_blocking {
            c.parity_blocking = false;
        }
        if self.out.is_some() {
            c.output = self.out.clone();
        }
        Ok(c)
    }
}

fn run(args: &RunArgs) -> Result<bool> {
    let config = args.config()?;
    let report = assemble_and_solve(&config)?;
    print!("{}", report.table());
    if let Some(path) = &config.output {
        report.write(path)?;
        eprintln!("report written to {}", path.display());
    }
    Ok(true)
}

fn check(quick: bool, seed: Option<u64>) -> bool {
    let mut opts = if quick { CheckOptions::quick() } else { CheckOptions::default() };
    if let Some(s) = seed {
        opts.seed = s;
    }
    let outcomes = run_checks(&opts);
    for o in &outcomes {
        println!("{}  {:<42} {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    outcomes.iter().all(|o| o.passed)
}

fn scan(args: &RunArgs, strategy: Strategy, budget: usize) -> Result<bool> {
    let config = args.config()?;
    let p = ParamPoint::of(&config.basis);
    let around = |x: f64, rel: f64| vec![x * (1.0 - rel), x, x * (1.0 + rel)];
    let search = match strategy {
        Strategy::Grid => SearchStrategy::Grid {
            w_proton: around(p.w_proton, 0.3),
            w_electron: around(p.w_electron, 0.2),
            r0: around(p.r0, 0.1),
        },
        Strategy::Simplex => SearchStrategy::Simplex { step: [0.2 * p.w_proton, 0.1 * p.w_electron, 0.05 * p.r0] },
    };
    let res = optimize_parameters(&config, &search, budget)?;
    println!("{:>4}  {:>9}  {:>10}  {:>7}  {:>12}  {:>9}", "eval", "w_proton", "w_electron", "r0", "energy", "stderr");
    for (k, e) in res.trace.iter().enumerate() {
        let fmt = |v: Option<f64>, p: usize| v.map_or("failed".to_string(), |v| format!("{v:.p$}"));
        println!(
            "{k:>4}  {:>9.4}  {:>10.4}  {:>7.4}  {:>12}  {:>9}",
            e.params.w_proton,
            e.params.w_electron,
            e.params.r0,
            fmt(e.energy, 6),
            fmt(e.stderr, 6)
        );
    }
    println!(
        "best: w_proton {:.4}, w_electron {:.4}, r0 {:.4}, E0 = {:.6} ± {:.6}{}",
        res.best.w_proton,
        res.best.w_electron,
        res.best.r0,
        res.best_energy,
        res.best_stderr,
        if res.converged { "" } else { " (budget exhausted)" }
    );
    if let Some(path) = &config.output {
        std::fs::write(path, serde_json::to_string_pretty(&res)?)?;
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Check { quick, seed } => Ok(check(*quick, *seed)),
        Command::Scan { run, strategy, budget } => scan(run, *strategy, *budget),
        Command::Report { path } => SpectrumReport::read(path).map(|r| {
            print!("{}", r.table());
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::NotPositiveDefinite { .. }) { 2 } else { 1 })
        }
    }
}
