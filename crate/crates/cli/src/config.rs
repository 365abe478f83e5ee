use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{usage, CliError, Result};

pub const DEFAULT_WEIGHTS: &str = "powerlog:1,-0.5,0";
pub const DEFAULT_BLOCKS: usize = 10;
pub const DEFAULT_RESTARTS: usize = 50;
pub const DEFAULT_MAX_ITERS: usize = 2000;
pub const DEFAULT_LIE_N: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraType {
    A,
    C,
}

impl FromStr for AlgebraType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "A" | "a" => Ok(AlgebraType::A),
            "C" | "c" => Ok(AlgebraType::C),
            other => Err(format!("unknown algebra type `{other}` (expected A or C)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    AndersonVerify { weights: String, blocks: usize },
    Staircase { hermitian: bool },
    SolveSelfcomm { kind: AlgebraType },
    LieKilling { n: usize },
    LieSolveSl,
    Minimize { restarts: usize, max_iters: usize },
    SeqClassify { family: String },
    SeqMean,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::AndersonVerify { .. } => "anderson-verify",
            Task::Staircase { .. } => "staircase",
            Task::SolveSelfcomm { .. } => "solve-selfcomm",
            Task::LieKilling { .. } => "lie killing",
            Task::LieSolveSl => "lie solve-sl",
            Task::Minimize { .. } => "minimize",
            Task::SeqClassify { .. } => "seq classify",
            Task::SeqMean => "seq mean",
        }
    }

    fn needs_input(&self) -> bool {
        !matches!(
            self,
            Task::AndersonVerify { .. } | Task::LieKilling { .. } | Task::SeqClassify { .. }
        )
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    /// Main artifact path; a per-command default inside `out_dir` otherwise.
    pub out: Option<PathBuf>,
    /// Report CSV path; `out_dir/report.csv` otherwise.
    pub report: Option<PathBuf>,
    /// Overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    /// Worker threads; 0 leaves the choice to the runtime.
    pub parallelism: usize,
}

impl RunConfig {
    pub fn new(task: Task) -> Self {
        Self {
            task,
            inputs: Vec::new(),
            out_dir: PathBuf::from("."),
            out: None,
            report: None,
            tolerances: BTreeMap::new(),
            seed: 0,
            parallelism: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol > 0.0) {
                return usage(format!("tolerance `{name}` must be positive, got {tol}"));
            }
        }
        if self.task.needs_input() && self.inputs.is_empty() {
            return usage(format!("{} requires an input file", self.task));
        }
        match self.task {
            Task::AndersonVerify { blocks, .. } if blocks < 3 => usage("blocks must be at least 3"),
            Task::LieKilling { n } if n < 2 => usage("n must be at least 2"),
            Task::Minimize { restarts: 0, .. } => usage("restarts must be at least 1"),
            _ => Ok(()),
        }
    }
}

pub const CONFIG_GRAMMAR: &str = "\
CONFIG FILE
  one `key = value` per line; blank lines and lines starting with `#` are ignored
  command     = anderson-verify | staircase | solve-selfcomm | lie | minimize | seq   (required)
  action      = killing | solve-sl          (lie)   |  classify | mean   (seq)
  type        = A | C                       (solve-selfcomm, default A)
  input       = path[, path ...]
  out_dir     = directory                   (default .)
  out         = main artifact path
  report      = report CSV path             (default <out_dir>/report.csv)
  seed        = unsigned integer            (default 0; COMMLAB_SEED overrides)
  parallelism = worker threads              (default 0 = automatic)
  weights     = family                      (anderson-verify, default powerlog:1,-0.5,0)
  blocks      = block count >= 3            (anderson-verify, default 10)
  hermitian   = true | false                (staircase, default false)
  n           = matrix size >= 2            (lie killing, default 3)
  restarts    = count >= 1                  (minimize, default 50)
  max_iters   = iterations per phase        (minimize, default 2000)
  family      = family                      (seq classify, required)
  tol.<check> = positive real               (replaces the tolerance of report row <check>)
  tol.verify  = positive real               (numerical cutoff of anderson-verify and staircase)
";

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

/// Parses the line-oriented `key = value` run description.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut seen: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| CliError::Config {
            line,
            message: format!("expected `key = value`, got `{trimmed}`"),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(CliError::Config {
                line,
                message: "empty key".into(),
            });
        }
        if let Some((first, _)) = seen.get(&key) {
            return Err(CliError::Config {
                line,
                message: format!("duplicate key `{key}` (first set on line {first})"),
            });
        }
        seen.insert(key, (line, value));
    }

    let (_, command) = seen
        .remove("command")
        .ok_or_else(|| CliError::Usage("command required".into()))?;
    let mut take = |k: &str| seen.remove(k);

    fn number<T: FromStr>(entry: Option<(usize, String)>, key: &str) -> Result<Option<T>> {
        match entry {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| CliError::Config {
                line,
                message: format!("invalid value `{v}` for `{key}`"),
            }),
        }
    }

    let action = take("action");
    let task = match command.as_str() {
        "anderson-verify" => Task::AndersonVerify {
            weights: take("weights").map(|e| e.1).unwrap_or_else(|| DEFAULT_WEIGHTS.into()),
            blocks: number(take("blocks"), "blocks")?.unwrap_or(DEFAULT_BLOCKS),
        },
        "staircase" => {
            let hermitian = match take("hermitian") {
                None => false,
                Some((line, v)) => parse_bool(&v).ok_or_else(|| CliError::Config {
                    line,
                    message: format!("invalid boolean `{v}` for `hermitian`"),
                })?,
            };
            Task::Staircase { hermitian }
        }
        "solve-selfcomm" => {
            let kind = match take("type") {
                None => AlgebraType::A,
                Some((line, v)) => v.parse().map_err(|message| CliError::Config { line, message })?,
            };
            Task::SolveSelfcomm { kind }
        }
        "lie" => match action.as_ref().map(|a| a.1.as_str()) {
            Some("killing") => Task::LieKilling {
                n: number(take("n"), "n")?.unwrap_or(DEFAULT_LIE_N),
            },
            Some("solve-sl") => Task::LieSolveSl,
            _ => return usage("lie requires `action = killing` or `action = solve-sl`"),
        },
        "minimize" => Task::Minimize {
            restarts: number(take("restarts"), "restarts")?.unwrap_or(DEFAULT_RESTARTS),
            max_iters: number(take("max_iters"), "max_iters")?.unwrap_or(DEFAULT_MAX_ITERS),
        },
        "seq" => match action.as_ref().map(|a| a.1.as_str()) {
            Some("classify") => Task::SeqClassify {
                family: take("family")
                    .map(|e| e.1)
                    .ok_or_else(|| CliError::Usage("seq classify requires `family`".into()))?,
            },
            Some("mean") => Task::SeqMean,
            _ => return usage("seq requires `action = classify` or `action = mean`"),
        },
        other => return usage(format!("unknown command `{other}`")),
    };
    if let (Some((line, _)), false) = (&action, matches!(command.as_str(), "lie" | "seq")) {
        return Err(CliError::Config {
            line: *line,
            message: format!("key `action` does not apply to {command}"),
        });
    }

    let mut cfg = RunConfig::new(task);
    if let Some((_, v)) = take("input") {
        cfg.inputs = v.split(',').map(|p| PathBuf::from(p.trim())).collect();
    }
    if let Some((_, v)) = take("out_dir") {
        cfg.out_dir = PathBuf::from(v);
    }
    cfg.out = take("out").map(|e| PathBuf::from(e.1));
    cfg.report = take("report").map(|e| PathBuf::from(e.1));
    cfg.seed = number(take("seed"), "seed")?.unwrap_or(0);
    cfg.parallelism = number(take("parallelism"), "parallelism")?.unwrap_or(0);

    // Whatever is left is either a tolerance override or not understood.
    for (key, (line, value)) in std::mem::take(&mut seen) {
        match key.strip_prefix("tol.") {
            Some(name) if !name.is_empty() => {
                let tol: f64 = value.parse().map_err(|_| CliError::Config {
                    line,
                    message: format!("invalid tolerance `{value}`"),
                })?;
                if !(tol.is_finite() && tol > 0.0) {
                    return Err(CliError::Config {
                        line,
                        message: format!("tolerance `{name}` must be positive"),
                    });
                }
                cfg.tolerances.insert(name.to_string(), tol);
            }
            _ => {
                let known = [
                    "weights",
                    "blocks",
                    "hermitian",
                    "type",
                    "n",
                    "restarts",
                    "max_iters",
                    "family",
                ];
                let message = if known.contains(&key.as_str()) {
                    format!("key `{key}` does not apply to {command}")
                } else {
                    format!("unknown key `{key}`")
                };
                return Err(CliError::Config { line, message });
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
