use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gsco_cli::config::Config;
use gsco_cli::error::{CliError, CliResult};
use gsco_cli::run::{cmd_compare, cmd_generate, cmd_solve, out_dir};

/// Frank-Wolfe solvers for graph-structured sparse recovery.
#[derive(Parser)]
#[command(name = "gsco", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance (matrix, observations, ground truth, graph).
    Generate(Common),
    /// Run one method and write its trace and summary.
    Solve(Common),
    /// Run several configs and/or merge existing run directories.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key=value config file. Repeat for `compare`.
    #[arg(long = "config", value_name = "PATH")]
    configs: Vec<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// `key=value` overrides; for `compare`, bare paths name run directories.
    #[arg(value_name = "ARGS")]
    rest: Vec<String>,
}

impl Common {
    fn layered(&self, file: Option<&PathBuf>) -> CliResult<Config> {
        let mut cfg = match file {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        for pair in self.rest.iter().filter(|a| a.contains('=')) {
            cfg.apply(pair)?;
        }
        if let Some(seed) = self.seed {
            cfg.set("seed", &seed.to_string())?;
        }
        if let Some(out) = &self.out {
            cfg.set("out", &out.to_string_lossy())?;
        }
        Ok(cfg)
    }

    fn single(&self) -> CliResult<Config> {
        if self.configs.len() > 1 {
            return Err(CliError::Config("only one --config is accepted here".into()));
        }
        if let Some(stray) = self.rest.iter().find(|a| !a.contains('=')) {
            return Err(CliError::Config(format!("unexpected argument `{stray}`")));
        }
        self.layered(self.configs.first())
    }
}

// stdout may be a closed pipe (`gsco ... | head`); output is best effort.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(args) => {
            let report = cmd_generate(&args.single()?)?;
            say!("instance written to {}", report.dir.display());
            say!("f(x*) = {}", report.f_x_star);
            say!("fingerprint {}", report.fingerprint);
        }
        Command::Solve(args) => {
            let cfg = args.single()?;
            let s = cmd_solve(&cfg)?;
            say!(
                "{}: best objective {} at t={} after {} iterations ({})",
                s.method, s.best_objective, s.best_t, s.iterations, s.termination
            );
            say!("run written to {}", out_dir(&cfg).display());
        }
        Command::Compare(args) => {
            let configs = args
                .configs
                .iter()
                .map(|p| args.layered(Some(p)))
                .collect::<CliResult<Vec<_>>>()?;
            let dirs: Vec<PathBuf> = args.rest.iter().filter(|a| !a.contains('=')).map(PathBuf::from).collect();
            let out = out_dir(&args.layered(None)?);
            let cmp = cmd_compare(&configs, &dirs, &out)?;
            for (rank, (label, f)) in cmp.ranking.iter().enumerate() {
                say!("{}. {label} {f}", rank + 1);
            }
            say!("comparison written to {}", cmp.csv_path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
