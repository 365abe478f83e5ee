use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commlab_cli::config::{
    CONFIG_GRAMMAR, DEFAULT_BLOCKS, DEFAULT_LIE_N, DEFAULT_MAX_ITERS, DEFAULT_RESTARTS, DEFAULT_WEIGHTS,
};
use commlab_cli::{parse_config, run, AlgebraType, CliError, Outcome, RunConfig, Task};

const SEED_ENV: &str = "COMMLAB_SEED";

const FORMATS: &str = "\
MATRIX FILE
  rows cols
  re im                       rows*cols lines, row-major, 17 significant digits

FAMILY
  powerlog:C,p,q              d_n = C n^(-p) log(n+1)^(-q)
  explicit:x1,x2,...          finite list given inline
  explicit:PATH               finite list read from a values file

VALUES FILE
  one real per line; `#` starts a comment

EXIT STATUS
  0 all checks pass   2 parse or configuration error   3 a check failed   4 no convergence
";

#[derive(Parser)]
#[command(
    name = "commlab",
    version,
    about = "Commutator and self-commutator constructions with numerical certificates"
)]
#[command(after_help = format!("{FORMATS}\n{CONFIG_GRAMMAR}"))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Directory receiving artifacts and report.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Path of the main artifact.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Path of the report CSV.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = automatic).
    #[arg(long, default_value_t = 0)]
    parallelism: usize,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "CHECK=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected CHECK=VALUE")?;
    let v: f64 = v.parse().map_err(|_| format!("invalid tolerance `{v}`"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err("tolerance must be positive".into());
    }
    Ok((k.to_string(), v))
}

#[derive(Subcommand)]
enum Command {
    /// Verify positivity of [C,Z] for the weighted block construction.
    AndersonVerify {
        #[arg(long, default_value = DEFAULT_WEIGHTS)]
        weights: String,
        #[arg(long, default_value_t = DEFAULT_BLOCKS)]
        blocks: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Simultaneous staircase form of one or more operators.
    Staircase {
        #[arg(long = "input", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        /// Inputs are Hermitian; tighter band.
        #[arg(long)]
        hermitian: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Solve [Y*,Y] = T.
    SolveSelfcomm {
        #[arg(long = "type", default_value = "A")]
        kind: AlgebraType,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// sl(n) utilities.
    Lie {
        #[command(subcommand)]
        action: LieCommand,
    },
    /// Minimise max(||A||, ||B||) subject to AB - BA = T.
    Minimize {
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sequence classification and arithmetic means.
    Seq {
        #[command(subcommand)]
        action: SeqCommand,
    },
    /// Run a configuration file.
    Run { config: PathBuf },
}

#[derive(Subcommand)]
enum LieCommand {
    /// Killing form Gram matrix of sl(n) on the standard basis.
    Killing {
        #[arg(long, default_value_t = DEFAULT_LIE_N)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Solve [Y*,Y] = A through the root vectors of sl(n).
    SolveSl {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum SeqCommand {
    /// Decide trace class and commutator class membership.
    Classify {
        #[arg(long)]
        family: String,
        #[command(flatten)]
        common: Common,
    },
    /// Running means after ordering by decreasing modulus.
    Mean {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn build(task: Task, inputs: Vec<PathBuf>, c: Common) -> RunConfig {
    let mut cfg = RunConfig::new(task);
    cfg.inputs = inputs;
    cfg.out_dir = c.out_dir;
    cfg.out = c.out;
    cfg.report = c.report;
    cfg.seed = c.seed;
    cfg.parallelism = c.parallelism;
    cfg.tolerances = c.tol.into_iter().collect();
    cfg
}

fn from_file(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.clone(),
        message: e.to_string(),
    })?;
    let mut cfg = parse_config(&text)?;
    if let Ok(s) = std::env::var(SEED_ENV) {
        cfg.seed = s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} is not an unsigned integer: `{s}`")))?;
    }
    Ok(cfg)
}

fn config(cmd: Command) -> Result<RunConfig, CliError> {
    Ok(match cmd {
        Command::AndersonVerify {
            weights,
            blocks,
            common,
        } => build(Task::AndersonVerify { weights, blocks }, vec![], common),
        Command::Staircase {
            inputs,
            hermitian,
            common,
        } => build(Task::Staircase { hermitian }, inputs, common),
        Command::SolveSelfcomm { kind, input, common } => build(Task::SolveSelfcomm { kind }, vec![input], common),
        Command::Lie { action } => match action {
            LieCommand::Killing { n, common } => build(Task::LieKilling { n }, vec![], common),
            LieCommand::SolveSl { input, common } => build(Task::LieSolveSl, vec![input], common),
        },
        Command::Minimize {
            target,
            restarts,
            max_iters,
            common,
        } => build(Task::Minimize { restarts, max_iters }, vec![target], common),
        Command::Seq { action } => match action {
            SeqCommand::Classify { family, common } => build(Task::SeqClassify { family }, vec![], common),
            SeqCommand::Mean { input, common } => build(Task::SeqMean, vec![input], common),
        },
        Command::Run { config } => from_file(&config)?,
    })
}

fn print_outcome(out: &Outcome) -> std::io::Result<()> {
    let r = &out.report;
    let mut w = std::io::stdout().lock();
    writeln!(w, "{}", r.command)?;
    writeln!(w, "{:<28} {:>24} {:>24}  status", "check", "value", "tolerance")?;
    for c in &r.checks {
        let status = if c.pass { "ok" } else { "FAIL" };
        writeln!(
            w,
            "{:<28} {:>24.16e} {:>24.3e}  {status}",
            c.name, c.measured, c.tolerance
        )?;
    }
    for a in &r.artifacts {
        writeln!(w, "wrote {}", a.display())?;
    }
    writeln!(w, "wall time {:.3?}", r.wall_time)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(cli.command).and_then(|cfg| run(&cfg));
    match result {
        Ok(out) => {
            // A closed stdout (e.g. piped into `head`) must not change the exit status.
            let _ = print_outcome(&out);
            if let Some(msg) = &out.nonconverged {
                eprintln!("error: {msg}");
            } else if let Some(c) = out.report.first_failure() {
                eprintln!(
                    "error: check `{}` failed: value {:.6e}, tolerance {:.3e}",
                    c.name, c.measured, c.tolerance
                );
            }
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
