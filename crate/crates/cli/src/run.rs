use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use commlab::anderson::{admissible, verify_positive_commutator, WeightSequence, DEFAULT_TOLERANCE};
use commlab::idealseq::{arithmetic_mean_sequence, classify_hsii, is_type_a_prefix, SequenceFamily};
use commlab::liealg::{is_semisimple, killing_form_in, solve_sl, SlRootData, SpanBasis};
use commlab::minimize::{minimize_commutator, MinimizeConfig};
use commlab::numkit::{unitarity_defect, DEFAULT_REJECTION_TOL};
use commlab::selfcomm::{make_anticonjugation, solve_type_a, solve_type_c};
use commlab::staircase::{band_bound, band_excess, staircase_form};
use commlab::{Check, ComplexMatrix, SolveReport, C64};

use crate::config::{AlgebraType, RunConfig, Task};
use crate::error::{usage, CliError, Result};
use crate::output::{
    ensure_parent_writable, ensure_writable, format_real, read_matrix, read_values, write_csv, write_matrix,
    write_report,
};

/// Override name that sets the computational tolerance of anderson-verify
/// and staircase instead of re-evaluating a report row.
pub const VERIFY_TOLERANCE_KEY: &str = "verify";

/// Band and unitarity checks of the staircase command.
const STAIRCASE_CHECK_TOL: f64 = 1e-9;

#[derive(Debug)]
pub struct Outcome {
    pub report: SolveReport,
    /// Set when the numerical routine finished without reaching its goal.
    pub nonconverged: Option<String>,
}

impl Outcome {
    fn new(report: SolveReport) -> Self {
        Self {
            report,
            nonconverged: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.nonconverged.is_some() {
            4
        } else if self.report.passed() {
            0
        } else {
            3
        }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    artifacts: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.cfg.out_dir.join(name)
    }

    fn main_path(&self, default: &str) -> PathBuf {
        self.cfg.out.clone().unwrap_or_else(|| self.path(default))
    }

    fn matrix(&mut self, path: PathBuf, m: &ComplexMatrix) -> Result<()> {
        write_matrix(&path, m)?;
        self.artifacts.push(path);
        Ok(())
    }

    fn csv<R>(&mut self, path: PathBuf, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<()>
    where
        R: IntoIterator,
        R::Item: AsRef<[u8]>,
    {
        write_csv(&path, header, rows)?;
        self.artifacts.push(path);
        Ok(())
    }

    fn input(&self, i: usize) -> Result<&Path> {
        self.cfg
            .inputs
            .get(i)
            .map(PathBuf::as_path)
            .ok_or_else(|| CliError::Usage(format!("{} requires an input file", self.cfg.task)))
    }

    fn verify_tol(&self, default: f64) -> f64 {
        self.cfg
            .tolerances
            .get(VERIFY_TOLERANCE_KEY)
            .copied()
            .unwrap_or(default)
    }
}

/// Runs one configured command: checks the output locations, computes,
/// writes artifacts and the report CSV.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let start = Instant::now();
    ensure_writable(&cfg.out_dir)?;
    for p in cfg.out.iter().chain(&cfg.report) {
        ensure_parent_writable(p)?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} worker threads: {e}", cfg.parallelism)))?;
    let mut ctx = Ctx {
        cfg,
        artifacts: Vec::new(),
    };
    let mut outcome = pool.install(|| dispatch(&mut ctx))?;
    apply_overrides(&mut outcome.report, &cfg.tolerances)?;

    let report_path = cfg.report.clone().unwrap_or_else(|| cfg.out_dir.join("report.csv"));
    write_report(&report_path, &outcome.report)?;
    outcome.report.artifacts = ctx.artifacts;
    outcome.report.artifacts.push(report_path);
    outcome.report.wall_time = start.elapsed();
    Ok(outcome)
}

fn apply_overrides(report: &mut SolveReport, overrides: &BTreeMap<String, f64>) -> Result<()> {
    for (name, tol) in overrides {
        if name == VERIFY_TOLERANCE_KEY {
            continue;
        }
        let Some(check) = report.checks.iter_mut().find(|c| &c.name == name) else {
            return usage(format!("tolerance override `{name}` matches no report row"));
        };
        *check = check.with_tolerance(*tol);
    }
    Ok(())
}

fn dispatch(ctx: &mut Ctx<'_>) -> Result<Outcome> {
    match ctx.cfg.task.clone() {
        Task::AndersonVerify { weights, blocks } => anderson(ctx, &weights, blocks),
        Task::Staircase { hermitian } => staircase(ctx, hermitian),
        Task::SolveSelfcomm { kind } => selfcomm(ctx, kind),
        Task::LieKilling { n } => lie_killing(ctx, n),
        Task::LieSolveSl => lie_solve_sl(ctx),
        Task::Minimize { restarts, max_iters } => minimize(ctx, restarts, max_iters),
        Task::SeqClassify { family } => seq_classify(&family),
        Task::SeqMean => seq_mean(ctx),
    }
}

/// `explicit:` followed by a path rather than a number list.
fn explicit_file(text: &str) -> Option<&str> {
    let rest = text.strip_prefix("explicit:")?;
    let numeric = rest.split(',').all(|t| t.trim().parse::<f64>().is_ok());
    (!numeric).then_some(rest)
}

/// `powerlog:C,p,q` means `dₙ = C n^{−p} log(n+1)^{−q}`, as for `seq`.
fn weight_sequence(text: &str, len: usize) -> Result<WeightSequence> {
    if let Some(path) = explicit_file(text) {
        return Ok(WeightSequence::explicit(read_values(Path::new(path))?)?);
    }
    let family: SequenceFamily = text.parse()?;
    match family.kind {
        commlab::idealseq::SequenceKind::PowerLog { c, p, q } => Ok(WeightSequence::power_log(c, -p, -q, len)?),
        commlab::idealseq::SequenceKind::Explicit(v) => Ok(WeightSequence::explicit(v)?),
    }
}

fn anderson(ctx: &mut Ctx<'_>, weights: &str, blocks: usize) -> Result<Outcome> {
    let w = weight_sequence(weights, blocks + 1)?;
    let v = verify_positive_commutator(&w, blocks, ctx.verify_tol(DEFAULT_TOLERANCE))?;
    let mut report = v.report.clone();
    report.push(Check::at_least("interior_min", v.interior_min(), f64::MIN_POSITIVE));
    report.push(Check::info("dimension", v.dimension as f64));
    report.push(Check::info(
        "admissibility_tail_max",
        admissible(&w, blocks + 1).tail_max,
    ));
    let path = ctx.main_path("blocks.csv");
    ctx.csv(
        path,
        &["block_index", "diagonal_value", "residual"],
        v.blocks
            .iter()
            .map(|b| [b.block.to_string(), format_real(b.value), format_real(b.residual)]),
    )?;
    Ok(Outcome::new(report))
}

fn staircase(ctx: &mut Ctx<'_>, hermitian: bool) -> Result<Outcome> {
    let ops = ctx
        .cfg
        .inputs
        .iter()
        .map(|p| read_matrix(p))
        .collect::<Result<Vec<_>>>()?;
    let s = staircase_form(&ops, hermitian, ctx.verify_tol(DEFAULT_REJECTION_TOL))?;
    let n_ops = ops.len();
    let mut report = SolveReport::new("staircase");
    report.push(Check::at_most(
        "unitarity",
        unitarity_defect(&s.unitary),
        STAIRCASE_CHECK_TOL,
    ));
    let d = s.unitary.rows();
    let e1 = (0..d)
        .map(|i| (s.unitary[(i, 0)] - C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).norm())
        .fold(0.0, f64::max);
    report.push(Check::at_most("e1_fixed", e1, STAIRCASE_CHECK_TOL));

    let upath = ctx.main_path("unitary.txt");
    ctx.matrix(upath, &s.unitary)?;
    for (i, t) in s.transformed.iter().enumerate() {
        report.push(Check::at_most(
            format!("band_excess_{}", i + 1),
            band_excess(t, n_ops, hermitian),
            STAIRCASE_CHECK_TOL,
        ));
        ctx.matrix(ctx.path(&format!("transformed_{}.txt", i + 1)), t)?;
        let rows: Vec<[String; 3]> = s.band_profile[i]
            .iter()
            .enumerate()
            .map(|(r, &max_col)| {
                [
                    (r + 1).to_string(),
                    max_col.to_string(),
                    band_bound(r + 1, n_ops, hermitian).min(d).to_string(),
                ]
            })
            .collect();
        ctx.csv(
            ctx.path(&format!("band_{}.csv", i + 1)),
            &["row_index", "max_col", "bound"],
            rows,
        )?;
    }
    Ok(Outcome::new(report))
}

fn selfcomm(ctx: &mut Ctx<'_>, kind: AlgebraType) -> Result<Outcome> {
    let t = read_matrix(ctx.input(0)?)?;
    let (solution, report) = match kind {
        AlgebraType::A => {
            let sol = solve_type_a(&t)?;
            (sol.solution.clone(), sol.report())
        }
        AlgebraType::C => {
            if t.rows() % 2 != 0 {
                return usage(format!("type C needs an even dimension, got {}", t.rows()));
            }
            let j = make_anticonjugation(t.rows() / 2)?;
            let sol = solve_type_c(&t, &j)?;
            let mut report = sol.report();
            report.push(Check::info("hs_norm_Y", sol.solution.norm_fro()));
            (sol.solution.clone(), report)
        }
    };
    let path = ctx.main_path("solution.txt");
    ctx.matrix(path, &solution)?;
    Ok(Outcome::new(report))
}

fn lie_killing(ctx: &mut Ctx<'_>, n: usize) -> Result<Outcome> {
    let data = SlRootData::new(n - 1)?;
    let basis = data.basis();
    let span = SpanBasis::new(&basis)?;
    let dim = basis.len();
    let mut gram = ComplexMatrix::zeros(dim, dim);
    let mut worst: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let k = killing_form_in(&span, &basis[a], &basis[b])?;
            let closed = (&basis[a] * &basis[b]).trace() * (2.0 * n as f64);
            worst = worst.max((k - closed).norm() / closed.norm().max(1.0));
            gram[(a, b)] = k;
        }
    }
    let mut report = SolveReport::new("lie killing");
    report.push(Check::at_most("killing_vs_trace", worst, 1e-9));
    report.push(Check::flag("semisimple", is_semisimple(&basis)?));
    report.push(Check::info("dimension", dim as f64));
    let path = ctx.main_path("killing.txt");
    ctx.matrix(path, &gram)?;
    Ok(Outcome::new(report))
}

fn lie_solve_sl(ctx: &mut Ctx<'_>) -> Result<Outcome> {
    let a = read_matrix(ctx.input(0)?)?;
    let sol = solve_sl(&a)?;
    let path = ctx.main_path("solution.txt");
    ctx.matrix(path, sol.solution())?;
    ctx.csv(
        ctx.path("coefficients.csv"),
        &["j", "a_j"],
        sol.coefficients
            .iter()
            .enumerate()
            .map(|(j, a)| [(j + 1).to_string(), format_real(*a)]),
    )?;
    Ok(Outcome::new(sol.report()))
}

fn minimize(ctx: &mut Ctx<'_>, restarts: usize, max_iters: usize) -> Result<Outcome> {
    let t = read_matrix(ctx.input(0)?)?;
    let mut mc = MinimizeConfig::new(t);
    mc.restarts = restarts;
    mc.max_iters = max_iters;
    mc.seed = ctx.cfg.seed;
    let res = minimize_commutator(&mc)?;
    let path = ctx.main_path("restarts.csv");
    ctx.csv(
        path,
        &["restart", "iters", "feasibility", "objective"],
        res.trace.iter().map(|r| {
            [
                r.restart.to_string(),
                r.iters.to_string(),
                format_real(r.feasibility),
                format_real(r.objective),
            ]
        }),
    )?;
    ctx.matrix(ctx.path("best_a.txt"), &res.best_a)?;
    ctx.matrix(ctx.path("best_b.txt"), &res.best_b)?;
    let mut report = res.report();
    report.push(Check::info("best_restart", res.best_restart as f64));
    let mut out = Outcome::new(report);
    if !res.feasible {
        out.nonconverged = Some(format!(
            "no restart reached feasibility; best residual {:.3e}",
            res.feasibility
        ));
    }
    Ok(out)
}

fn decided(x: Option<bool>) -> f64 {
    match x {
        Some(true) => 1.0,
        Some(false) => 0.0,
        None => f64::NAN,
    }
}

fn seq_classify(text: &str) -> Result<Outcome> {
    let family = match explicit_file(text) {
        Some(path) => SequenceFamily::explicit(read_values(Path::new(path))?),
        None => text.parse()?,
    };
    let class = classify_hsii(&family);
    let mut report = SolveReport::new("seq classify");
    report.push(Check::info("in_trace_class", decided(class.in_trace_class)));
    report.push(Check::info("in_commutator_class", decided(class.in_commutator_class)));
    if let Some(d) = class.diagnostics {
        report.push(Check::info("terms", d.terms as f64));
        report.push(Check::info("partial_sum", d.sum));
        report.push(Check::info("log_weighted_sum", d.log_weighted_sum));
        report.push(Check::info("sum_vs_log_slope", d.sum_vs_log.slope));
        report.push(Check::info("sum_vs_log2_slope", d.sum_vs_log2.slope));
        report.push(Check::info("log_weighted_vs_log_slope", d.log_weighted_vs_log.slope));
        report.push(Check::info("log_weighted_vs_log2_slope", d.log_weighted_vs_log2.slope));
    }
    Ok(Outcome::new(report))
}

fn seq_mean(ctx: &mut Ctx<'_>) -> Result<Outcome> {
    let values = read_values(ctx.input(0)?)?;
    let means = arithmetic_mean_sequence(&values);
    let path = ctx.main_path("mean.csv");
    ctx.csv(path, &[], means.iter().map(|m| [format_real(*m)]))?;
    let prefix = is_type_a_prefix(&values, f64::INFINITY);
    let mut report = SolveReport::new("seq mean");
    report.push(Check::info("terms", values.len() as f64));
    report.push(Check::info("last_mean", means.last().copied().unwrap_or(0.0)));
    report.push(Check::info("balance_defect", prefix.defect));
    Ok(Outcome::new(report))
}
